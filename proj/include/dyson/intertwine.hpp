#pragma once

// The interlacing cone K: triangular arrays z = (z^1, ..., z^n) of nonnegative
// reals, layers 2k-1 and 2k holding k entries, with
//   z^{2k-1}_1 <= z^{2k}_1 <= z^{2k-1}_2 <= ... <= z^{2k-1}_k <= z^{2k}_k,
//   0 <= z^{2k+1}_1 <= z^{2k}_1 <= z^{2k+1}_2 <= ... <= z^{2k}_k <= z^{2k+1}_{k+1}.
// b(z) is the bottom layer z^n, e(z) the last entry of every layer. The kernel
// L(x, .) is the law of e(z) for z uniform on K(x) = {z : b(z) = x}.

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "dyson/random.hpp"

namespace dyson {

/// Number of entries in layer l (1-based): ceil(l / 2).
inline int layer_size(int layer) { return (layer + 1) / 2; }

/// Number of bottom entries for n layers: m with n = 2m or 2m - 1.
inline int bottom_size(int n) { return (n + 1) / 2; }

struct InterlacedArray {
  std::vector<Eigen::VectorXd> layers;  // layers[l-1] = z^l

  int n() const { return int(layers.size()); }
  /// Checks layer sizes, nonnegativity and both interlacing chains.
  bool valid(double tol = 0.0) const;
};

/// b(z) = z^n.
Eigen::VectorXd project_b(const InterlacedArray& z);
/// e(z) = (z^1_1, z^2_1, z^3_2, z^4_2, ...), the last entry of every layer.
Eigen::VectorXd project_e(const InterlacedArray& z);

/// Which slice of the cone is held fixed.
struct ConeSlice {
  enum class Mode { kBottom, kEdge };
  Mode mode = Mode::kBottom;
  Eigen::VectorXd anchor;
  int n = 1;

  static ConeSlice bottom(Eigen::VectorXd x, int n);
  static ConeSlice edge(Eigen::VectorXd y);
};

/// Exact Euclidean volume of K(x) divided into h(x): vol K(x) = h(x) / c_n with
/// c_n = prod_{j=1}^{n-1} j!!, h = h^C for even n and h^D for odd n.
double cone_volume_constant(int n);

/// Uniform sample on K(x). Each layer given the one below it is a box; layers
/// are drawn uniformly in their boxes from the bottom up and the whole array is
/// accepted with probability prod |box| / prod (bound on |box|).
/// Throws BoundaryError if x has ties (or x_1 = 0 for even n), DomainError if x
/// is unordered or negative.
InterlacedArray sample_cone(const Eigen::VectorXd& x, int n, Rng& rng);

struct VolumeEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
};

/// Monte Carlo volume of K(x): mean of prod |box| over bottom-up layer draws.
VolumeEstimate cone_volume(const Eigen::VectorXd& x, int n, std::size_t samples, Rng& rng);

using TestFunction = std::function<double(const Eigen::VectorXd&)>;

struct IntertwiningCase {
  int m = 1;
  int n = 1;
  double t = 1.0;
  Eigen::VectorXd x;
};

struct IntertwiningBudget {
  std::size_t samples = 1000000;  // per side, Monte Carlo route
  double quadrature_tolerance = 1e-10;
  /// Combined standard error above which a Monte Carlo result is inconclusive.
  double max_standard_error = 1e-2;
  std::uint64_t seed = 1;
  int workers = 0;
};

struct IntertwiningResult {
  double lhs = 0.0;     // (L Q_t g)(x)
  double rhs = 0.0;     // (P_t L g)(x)
  double lhs_se = 0.0;  // zero for quadrature
  double rhs_se = 0.0;
  bool quadrature = false;
  bool inconclusive = false;

  double difference() const { return lhs - rhs; }
  double combined_se() const;
};

/// Both sides of L Q_t g = P_t L g at x for every test function g. Nested
/// quadrature for m = 1 (n = 1, 2), Monte Carlo with importance sampling
/// otherwise. P_t is the h-transformed wall semigroup (C for n = 2m, D for
/// n = 2m - 1), Q_t the Y-process semigroup.
std::vector<IntertwiningResult> check_intertwining(const IntertwiningCase& c,
                                                   const std::vector<TestFunction>& tests,
                                                   const IntertwiningBudget& budget = {});

/// Density in y of (L^0 Q_t)(x, dy) = int_{K(x)} q_t(e(z), y) dz in closed form,
/// an n x n determinant. n = 2m: rows a_{2i,j}(0, y_j) for i = 1..m and
/// a_{2m,j}(x_i, y_j) for i = 1..m. n = 2m - 1: rows a_{2i,j}(0, y_j) for
/// i = 1..m-1 and a_{2m-1,j}(x_i, y_j) for i = 1..m.
double intertwined_density(int n, double t, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

}  // namespace dyson
