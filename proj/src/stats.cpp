#include "dyson/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dyson/errors.hpp"

namespace dyson {

SampleSet SampleSet::make(std::vector<double> values, SampleMeta meta) {
  if (values.empty()) throw DomainError("SampleSet: empty sample");
  if (meta.process.empty()) throw ConfigError("SampleSet: process label missing");
  return SampleSet{std::move(values), std::move(meta)};
}

Ecdf::Ecdf(std::vector<double> values) : sorted_(std::move(values)) {
  if (sorted_.empty()) throw DomainError("Ecdf: empty sample");
  std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(double x) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return double(it - sorted_.begin()) / double(sorted_.size());
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0) return 1.0;
  if (lambda < 0.2) return 1.0;  // series converges slowly; Q > 1 - 1e-30 here
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(const SampleSet& a, const SampleSet& b) {
  if (a.values.empty() || b.values.empty()) throw DomainError("ks_two_sample: empty sample");
  std::vector<double> x = a.values, y = b.values;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = double(x.size()), ny = double(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(double(i) / nx - double(j) / ny));
  }
  const double ne = nx * ny / (nx + ny);
  const double sq = std::sqrt(ne);
  return KsResult{d, kolmogorov_survival((sq + 0.12 + 0.11 / sq) * d)};
}

KsResult ks_one_sample(const SampleSet& a, const std::function<double(double)>& cdf) {
  if (a.values.empty()) throw DomainError("ks_one_sample: empty sample");
  std::vector<double> x = a.values;
  std::sort(x.begin(), x.end());
  const double n = double(x.size());
  double d = 0.0;
  double prev_f = -1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    if (!(f >= 0.0 && f <= 1.0)) throw ContractError("ks_one_sample: cdf outside [0, 1]");
    if (f < prev_f - 1e-15) throw ContractError("ks_one_sample: cdf is not monotone");
    prev_f = f;
    // Left limit of F_N at x[i] is i/n, value is (i+1)/n (ties collapse below).
    d = std::max({d, double(i + 1) / n - f, f - double(i) / n});
  }
  const double sq = std::sqrt(n);
  return KsResult{d, kolmogorov_survival((sq + 0.12 + 0.11 / sq) * d)};
}

double dkw_epsilon(std::size_t n, double delta) {
  if (n < 1) throw DomainError("dkw_epsilon: N must be >= 1");
  if (!(delta > 0 && delta < 1)) throw DomainError("dkw_epsilon: delta must be in (0, 1)");
  return std::sqrt(std::log(2.0 / delta) / (2.0 * double(n)));
}

double discretization_bias_budget(double dt, double t) { return 0.6 * std::sqrt(dt / t); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double half_normal_cdf(double a, double t) {
  if (a <= 0) return 0.0;
  return std::erf(a / std::sqrt(2.0 * t));
}

double maxwell_cdf(double a, double t) {
  if (a <= 0) return 0.0;
  const double z = a / std::sqrt(t);
  return std::erf(z / std::numbers::sqrt2) -
         std::sqrt(2.0 / std::numbers::pi) * z * std::exp(-z * z / 2);
}

}  // namespace dyson
