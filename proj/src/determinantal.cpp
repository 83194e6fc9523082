#include "dyson/determinantal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include "dyson/quadrature.hpp"
#include "dyson/random.hpp"

namespace dyson {

namespace {

void check_same_shape(const ProcessKind& kind, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& x_end) {
  if (x.size() != kind.size || x_end.size() != kind.size)
    throw ShapeError("density: dimension mismatch for " + to_string(kind));
}

bool weakly_ordered_nonneg(const Eigen::VectorXd& y) {
  if (y.size() > 0 && y(0) < 0) return false;
  for (Eigen::Index i = 1; i < y.size(); ++i)
    if (y(i) < y(i - 1)) return false;
  return true;
}

// Unchecked h-transform, used on the eps-shrinking start points.
double ht_raw(const ProcessKind& kind, double t, const Eigen::VectorXd& x,
              const Eigen::VectorXd& x_end) {
  return invariant_h(kind, x_end) * det_eval(km_matrix(kind, t, x, x_end)) / invariant_h(kind, x);
}

Eigen::VectorXd start_direction(const ProcessKind& kind) {
  const int m = kind.size;
  Eigen::VectorXd v(m);
  for (int i = 0; i < m; ++i)
    v(i) = kind.family == Family::A ? (i + 1) - 0.5 * (m + 1) : double(i + 1);
  return v;
}

int dimension(const EntranceSpec& spec) { return spec.kind.size; }

bool entrance_support(const EntranceSpec& spec, const Eigen::VectorXd& x) {
  if (spec.target == EntranceTarget::kYProcess) return weakly_ordered_nonneg(x);
  return in_chamber(spec.kind, x);
}

// exp(-40^2 / 2) underflows; the Richardson levels would produce inf * 0 beyond it.
constexpr double kEntranceCutoff = 38.0;

// Dyson entrance at t = 1 by Richardson extrapolation in eps^2 on three levels.
double dyson_entrance_raw(const ProcessKind& kind, const Eigen::VectorXd& x_end) {
  const double reach = x_end.cwiseAbs().maxCoeff();
  if (reach > kEntranceCutoff) return 0.0;
  const Eigen::VectorXd v = start_direction(kind);
  const double eps = 0.1 / (1.0 + reach);
  const double f0 = ht_raw(kind, 1.0, eps * v, x_end);
  const double f1 = ht_raw(kind, 1.0, 0.5 * eps * v, x_end);
  const double f2 = ht_raw(kind, 1.0, 0.25 * eps * v, x_end);
  const double coarse = (4.0 * f1 - f0) / 3.0;
  const double fine = (4.0 * f2 - f1) / 3.0;
  const double floor = 1e-6;
  if (std::abs(coarse - fine) > 0.01 * std::max(std::abs(fine), floor))
    throw NumericalInstabilityError("entrance_density: eps-extrapolation did not converge for " +
                                    to_string(kind));
  return (16.0 * fine - coarse) / 15.0;
}

// Envelope for Monte Carlo normalization in high dimension: sorted i.i.d.
// N(0, s^2) (A) or half-normal(s) components.
double mc_normalizer(const EntranceSpec& spec) {
  const int d = dimension(spec);
  const bool whole_line = spec.target == EntranceTarget::kDyson && spec.kind.family == Family::A;
  const double s = 1.5;
  const int samples = 400000;
  Rng rng = StreamFactory(0x6e6f726dULL).stream(StreamPurpose::kCalibration, std::uint64_t(d));
  double log_fact = std::lgamma(d + 1.0);
  double sum = 0.0;
  Eigen::VectorXd x(d);
  for (int k = 0; k < samples; ++k) {
    double log_g = 0.0;
    for (int i = 0; i < d; ++i) {
      double z = standard_normal(rng);
      x(i) = whole_line ? s * z : s * std::abs(z);
      log_g += -0.5 * z * z - std::log(s * std::sqrt(2 * std::numbers::pi)) + (whole_line ? 0.0 : std::log(2.0));
    }
    std::sort(x.data(), x.data() + d);
    sum += entrance_density_raw(spec, x) / std::exp(log_fact + log_g);
  }
  return sum / samples;
}

}  // namespace

double km_density(const ProcessKind& kind, double t, const Eigen::VectorXd& x,
                  const Eigen::VectorXd& x_end) {
  check_same_shape(kind, x, x_end);
  return det_eval(km_matrix(kind, t, x, x_end));
}

double ht_density(const ProcessKind& kind, double t, const Eigen::VectorXd& x,
                  const Eigen::VectorXd& x_end) {
  check_same_shape(kind, x, x_end);
  const double hx = invariant_h(kind, x);
  if (!(hx > 0)) throw BoundaryStartError("ht_density: start on the chamber boundary; use entrance_density");
  if (!in_chamber(kind, x_end)) return 0.0;
  return invariant_h(kind, x_end) * km_density(kind, t, x, x_end) / hx;
}

double q_density(double t, const Eigen::VectorXd& y, const Eigen::VectorXd& y_end) {
  if (y.size() != y_end.size()) throw ShapeError("q_density: dimension mismatch");
  if (y.size() > kMaxQDimension) throw CapacityError("q_density: n > 8");
  if (!weakly_ordered_nonneg(y) || !weakly_ordered_nonneg(y_end))
    throw DomainError("q_density: points must satisfy 0 <= y_1 <= ... <= y_n");
  return q_density_unchecked(t, y, y_end);
}

double entrance_density_raw(const EntranceSpec& spec, const Eigen::VectorXd& x_end) {
  if (x_end.size() != dimension(spec)) throw ShapeError("entrance_density: dimension mismatch");
  if (!entrance_support(spec, x_end)) return 0.0;
  if (spec.target == EntranceTarget::kYProcess)
    return q_density_unchecked(1.0, Eigen::VectorXd::Zero(x_end.size()).eval(), x_end);
  return dyson_entrance_raw(spec.kind, x_end);
}

double entrance_normalizer(const EntranceSpec& spec) {
  using Key = std::tuple<int, int, int>;
  static std::mutex mutex;
  static std::map<Key, double> cache;
  const Key key{int(spec.target), int(spec.kind.family), spec.kind.size};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  // Computed outside the lock; concurrent first callers compute the same value.
  const int d = dimension(spec);
  auto f = [&](const Eigen::VectorXd& x) { return entrance_density_raw(spec, x); };
  double z = 0.0;
  if (d > 3) {
    z = mc_normalizer(spec);
  } else if (spec.target == EntranceTarget::kDyson && spec.kind.family == Family::A) {
    z = integrate_ordered_real(f, d, QuadratureOptions{1e-9});
  } else {
    z = integrate_ordered_cone(f, d, 0.0, QuadratureOptions{1e-9});
  }
  std::lock_guard lock(mutex);
  cache.emplace(key, z);
  return z;
}

double entrance_density(const EntranceSpec& spec, double t, const Eigen::VectorXd& x_end) {
  if (!(t > 0)) throw DomainError("entrance_density: time must be positive");
  const double s = std::sqrt(t);
  const int d = dimension(spec);
  const double raw = entrance_density_raw(spec, (x_end / s).eval());
  return raw / entrance_normalizer(spec) * std::pow(s, -d);
}

}  // namespace dyson
