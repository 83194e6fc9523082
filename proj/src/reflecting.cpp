#include "dyson/reflecting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dyson/errors.hpp"
#include "dyson/parallel.hpp"

namespace dyson {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Exhaustive search over l_1 <= ... <= l_n <= K. `acc` holds every term fixed so
// far; row i starts at l_{i+1} (0-based row i), which is also where row i-1 ends.
double enumerate(const Eigen::MatrixXd& b, int row, int lower, double acc, bool pinned_start) {
  const int n = int(b.rows());
  const int K = int(b.cols()) - 1;
  const int upper = (row == 0 && pinned_start) ? 0 : K;
  double best = kNegInf;
  for (int l = lower; l <= upper; ++l) {
    const double a = acc + (row > 0 ? b(row - 1, l) : 0.0) - b(row, l);
    if (row == n - 1)
      best = std::max(best, a + b(row, K));
    else
      best = std::max(best, enumerate(b, row + 1, l, a, pinned_start));
  }
  return best;
}

// Backward max-plus table over (row, start index):
//   H_n(l) = B_n(K) - B_n(l),
//   H_i(l) = max_{l' >= l} (B_i(l') - B_i(l) + H_{i+1}(l')).
// Evaluated as a plain double loop.
double last_passage_table(const Eigen::MatrixXd& b, bool pinned_start) {
  const int n = int(b.rows());
  const int K = int(b.cols()) - 1;
  Eigen::VectorXd next(K + 1);
  for (int l = 0; l <= K; ++l) next(l) = b(n - 1, K) - b(n - 1, l);
  for (int row = n - 2; row >= 0; --row) {
    Eigen::VectorXd cur(K + 1);
    for (int l = 0; l <= K; ++l) {
      double best = kNegInf;
      for (int lp = l; lp <= K; ++lp) best = std::max(best, b(row, lp) - b(row, l) + next(lp));
      cur(l) = best;
    }
    next.swap(cur);
  }
  return pinned_start ? next(0) : next.maxCoeff();
}

double oracle(const BrownianLattice& lat, OracleMethod method, bool pinned_start) {
  const int n = lat.n();
  const int K = lat.grid.steps;
  if (n < 1) throw ShapeError("lpp oracle: empty lattice");
  if (method == OracleMethod::kAuto)
    method = (K <= kAutoExhaustiveSteps && n <= kExhaustiveMaxN) ? OracleMethod::kExhaustive
                                                                 : OracleMethod::kDynamicProgramming;
  const Eigen::MatrixXd b = lat.paths();
  if (method == OracleMethod::kExhaustive) {
    if (n > kExhaustiveMaxN || K > kExhaustiveMaxSteps)
      throw CapacityError("lpp oracle: exhaustive enumeration limited to n <= 4, steps <= 30");
    return enumerate(b, 0, 0, 0.0, pinned_start);
  }
  if (K > kDynamicMaxSteps)
    throw CapacityError("lpp oracle: dynamic programming limited to " +
                        std::to_string(kDynamicMaxSteps) + " steps");
  return last_passage_table(b, pinned_start);
}

}  // namespace

TimeGrid TimeGrid::make(double t_end, int steps) {
  if (!(t_end > 0)) throw DomainError("TimeGrid: t_end must be positive");
  if (steps < 1) throw ConfigError("TimeGrid: steps must be >= 1");
  return TimeGrid{t_end, steps};
}

Eigen::MatrixXd BrownianLattice::paths() const {
  Eigen::MatrixXd b(increments.rows(), increments.cols() + 1);
  for (Eigen::Index i = 0; i < increments.rows(); ++i) {
    b(i, 0) = 0.0;
    for (Eigen::Index k = 0; k < increments.cols(); ++k) b(i, k + 1) = b(i, k) + increments(i, k);
  }
  return b;
}

bool PathEnsemble::ordered(double tol) const {
  for (Eigen::Index k = 0; k < positions.cols(); ++k) {
    if (kind == PathKind::Y && positions(0, k) < -tol) return false;
    for (Eigen::Index j = 1; j < positions.rows(); ++j)
      if (positions(j, k) < positions(j - 1, k) - tol) return false;
  }
  return true;
}

BrownianLattice sample_lattice(const TimeGrid& grid, int n, Rng& rng) {
  if (n < 1) throw ConfigError("sample_lattice: n must be >= 1");
  const double sd = std::sqrt(grid.dt());
  BrownianLattice lat{grid, Eigen::MatrixXd(n, grid.steps)};
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < grid.steps; ++k) lat.increments(i, k) = sd * standard_normal(rng);
  return lat;
}

PathEnsemble z_process(const BrownianLattice& lat) {
  const Eigen::MatrixXd b = lat.paths();
  PathEnsemble out{PathKind::Z, Eigen::MatrixXd(b.rows(), b.cols())};
  out.positions.row(0) = b.row(0);
  for (Eigen::Index j = 1; j < b.rows(); ++j) {
    double floor = kNegInf;  // max_{l <= k} (Z_{j-1}(l) - B_j(l))
    for (Eigen::Index k = 0; k < b.cols(); ++k) {
      floor = std::max(floor, out.positions(j - 1, k) - b(j, k));
      out.positions(j, k) = b(j, k) + floor;
    }
  }
  return out;
}

PathEnsemble y_process(const BrownianLattice& lat, const std::optional<Eigen::VectorXd>& start) {
  const Eigen::MatrixXd b = lat.paths();
  const Eigen::Index n = b.rows();
  if (start) {
    if (start->size() != n) throw ShapeError("y_process: start has wrong dimension");
    if ((*start)(0) < 0) throw DomainError("y_process: start below the wall");
    for (Eigen::Index j = 1; j < n; ++j)
      if ((*start)(j) < (*start)(j - 1)) throw DomainError("y_process: start not ordered");
  }
  PathEnsemble out{PathKind::Y, Eigen::MatrixXd(n, b.cols())};
  for (Eigen::Index j = 0; j < n; ++j) {
    double floor = start ? (*start)(j) : 0.0;
    for (Eigen::Index k = 0; k < b.cols(); ++k) {
      const double below = j == 0 ? 0.0 : out.positions(j - 1, k);
      floor = std::max(floor, below - b(j, k));
      out.positions(j, k) = b(j, k) + floor;
    }
  }
  return out;
}

double running_max(const PathEnsemble& ensemble, int row) {
  if (row < 0 || row >= ensemble.n()) throw ShapeError("running_max: row out of range");
  return ensemble.positions.row(row).maxCoeff();
}

BrownianLattice reversed(const BrownianLattice& lat) {
  const int n = lat.n();
  BrownianLattice out{lat.grid, Eigen::MatrixXd(n, lat.grid.steps)};
  for (int i = 0; i < n; ++i) out.increments.row(i) = lat.increments.row(n - 1 - i).reverse();
  return out;
}

double lpp_oracle_y(const BrownianLattice& lat, OracleMethod method) {
  return oracle(lat, method, false);
}

double lpp_oracle_z(const BrownianLattice& lat, OracleMethod method) {
  return oracle(lat, method, true);
}

std::vector<double> sample_sup_z(int n, const TimeGrid& grid, std::size_t count,
                                 const StreamFactory& streams, int workers, StreamPurpose purpose) {
  return parallel_map<double>(count, workers, [&](std::size_t i) {
    Rng rng = streams.stream(purpose, i);
    return running_max(z_process(sample_lattice(grid, n, rng)), n - 1);
  });
}

std::vector<double> sample_y_terminal(int n, const TimeGrid& grid, std::size_t count,
                                      const StreamFactory& streams, int workers,
                                      StreamPurpose purpose) {
  return parallel_map<double>(count, workers, [&](std::size_t i) {
    Rng rng = streams.stream(purpose, i);
    const PathEnsemble y = y_process(sample_lattice(grid, n, rng));
    return y.positions(n - 1, grid.steps);
  });
}

}  // namespace dyson
