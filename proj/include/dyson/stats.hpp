#pragma once

// Empirical distributions, Kolmogorov-Smirnov tests, the DKW band, and the
// closed-form CDFs the equalities in law are tested against.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace dyson {

struct SampleMeta {
  std::uint64_t seed = 0;
  std::string process;  // e.g. "sup Z_2", "X^C_1"
  double t = 1.0;
  double dt = 0.0;
};

/// Monte Carlo samples together with how they were produced.
struct SampleSet {
  std::vector<double> values;
  SampleMeta meta;

  static SampleSet make(std::vector<double> values, SampleMeta meta);
  std::size_t size() const { return values.size(); }
};

/// Right-continuous empirical CDF.
class Ecdf {
 public:
  explicit Ecdf(std::vector<double> values);
  double operator()(double x) const;
  const std::vector<double>& sorted() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

KsResult ks_two_sample(const SampleSet& a, const SampleSet& b);

/// sup |F_N - F| evaluated at the jump points (both one-sided limits).
/// Throws ContractError if `cdf` is non-monotone or leaves [0, 1] on the samples.
KsResult ks_one_sample(const SampleSet& a, const std::function<double(double)>& cdf);

/// DKW half-width sqrt(ln(2/delta) / (2N)).
double dkw_epsilon(std::size_t n, double delta);

/// Tolerance added to one-sample thresholds for the downward bias of grid
/// maxima: 0.6 sqrt(dt / t).
double discretization_bias_budget(double dt, double t);

double normal_cdf(double x);
/// P(|B_t| <= a) = 2 Phi(a / sqrt t) - 1; also the law of sup_{s <= t} B_s.
double half_normal_cdf(double a, double t);
/// Law of |B_t| for 3-d Brownian motion (Bessel(3) from 0, chi-3 scaled by sqrt t).
double maxwell_cdf(double a, double t);

}  // namespace dyson
