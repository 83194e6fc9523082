#pragma once

// Discrete Skorokhod construction of the Z process (Z_1 a Brownian motion,
// Z_{j+1} pushed up by Z_j) and the Y process (same, with Y_1 reflected at 0),
// plus the last-passage oracles over ordered time tuples.

#include <Eigen/Core>

#include <optional>
#include <vector>

#include "dyson/random.hpp"

namespace dyson {

/// Uniform grid on [0, t_end].
struct TimeGrid {
  double t_end = 1.0;
  int steps = 1;

  static TimeGrid make(double t_end, int steps);
  double dt() const { return t_end / steps; }
  double time(int k) const { return t_end * k / steps; }
};

/// Increments of n independent Brownian motions on a grid; row i holds B_{i+1}.
struct BrownianLattice {
  TimeGrid grid;
  Eigen::MatrixXd increments;  // n x steps, each entry ~ N(0, dt)

  int n() const { return int(increments.rows()); }
  /// Cumulative paths B_i(t_k), n x (steps + 1), with B_i(0) = 0.
  Eigen::MatrixXd paths() const;
};

enum class PathKind { Z, Y };

/// Particle positions on the grid, n x (steps + 1).
struct PathEnsemble {
  PathKind kind = PathKind::Z;
  Eigen::MatrixXd positions;

  int n() const { return int(positions.rows()); }
  /// Z_1 <= ... <= Z_n at every grid time; Y additionally has 0 <= Y_1.
  bool ordered(double tol = 0.0) const;
};

BrownianLattice sample_lattice(const TimeGrid& grid, int n, Rng& rng);

/// Z_1 = B_1, Z_j(t_k) = max_{l <= k} (Z_{j-1}(t_l) + B_j(t_k) - B_j(t_l)).
PathEnsemble z_process(const BrownianLattice& lat);

/// Y_1(t_k) = max_{l <= k} (B_1(t_k) - B_1(t_l)), Y_j as in z_process with Y_{j-1}
/// as floor. With `start`, the system starts from that (weakly ordered, >= 0)
/// point instead of the origin.
PathEnsemble y_process(const BrownianLattice& lat,
                       const std::optional<Eigen::VectorXd>& start = std::nullopt);

/// max over grid times of one row (0-based).
double running_max(const PathEnsemble& ensemble, int row);

/// Time- and order-reversed lattice: B~_i(s) = B_{n-i+1}(t) - B_{n-i+1}(t - s).
BrownianLattice reversed(const BrownianLattice& lat);

enum class OracleMethod { kAuto, kExhaustive, kDynamicProgramming };

inline constexpr int kExhaustiveMaxN = 4;
inline constexpr int kExhaustiveMaxSteps = 30;
inline constexpr int kAutoExhaustiveSteps = 12;
inline constexpr int kDynamicMaxSteps = 5000;

/// Y_n(t) = max over 0 <= l_1 <= ... <= l_n <= K of sum_i (B_i(l_{i+1}) - B_i(l_i)),
/// l_{n+1} = K. Exhaustive enumeration or a backward max-plus table; kAuto picks
/// enumeration up to 12 steps. Throws CapacityError past the method's limits.
double lpp_oracle_y(const BrownianLattice& lat, OracleMethod method = OracleMethod::kAuto);

/// Same sum with l_1 = 0 fixed: the terminal value Z_n(t).
double lpp_oracle_z(const BrownianLattice& lat, OracleMethod method = OracleMethod::kAuto);

/// sup_{s <= t} Z_n(s) for N independent lattices; trajectory i uses
/// stream (purpose, i).
std::vector<double> sample_sup_z(int n, const TimeGrid& grid, std::size_t count,
                                 const StreamFactory& streams, int workers,
                                 StreamPurpose purpose = StreamPurpose::kLattice);

/// Y_n(t) for N independent lattices.
std::vector<double> sample_y_terminal(int n, const TimeGrid& grid, std::size_t count,
                                      const StreamFactory& streams, int workers,
                                      StreamPurpose purpose = StreamPurpose::kLatticeAlt);

}  // namespace dyson
