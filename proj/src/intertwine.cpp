#include "dyson/intertwine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dyson/determinantal.hpp"
#include "dyson/errors.hpp"
#include "dyson/parallel.hpp"
#include "dyson/quadrature.hpp"

namespace dyson {

namespace {

// Interval of entry i (0-based) of layer l given layer l+1.
std::pair<double, double> entry_interval(int layer, const Eigen::VectorXd& above, int i) {
  if (layer % 2 == 1)  // z^{2k-1}_i in [z^{2k}_{i-1}, z^{2k}_i], z^{2k}_0 = 0
    return {i == 0 ? 0.0 : above(i - 1), above(i)};
  return {above(i), above(i + 1)};  // z^{2k}_i in [z^{2k+1}_i, z^{2k+1}_{i+1}]
}

void check_anchor(const Eigen::VectorXd& x, int n) {
  if (n < 1) throw ConfigError("cone: n must be >= 1");
  if (x.size() != bottom_size(n)) throw ShapeError("cone: anchor must have ceil(n/2) entries");
  if (x.size() > 0 && x(0) < 0) throw DomainError("cone: anchor below the wall");
  for (Eigen::Index i = 1; i < x.size(); ++i)
    if (x(i) < x(i - 1)) throw DomainError("cone: anchor is not ordered");
  if (n == 1) return;
  for (int i = 0; i < layer_size(n - 1); ++i) {
    const auto [lo, hi] = entry_interval(n - 1, x, i);
    if (!(hi > lo)) throw BoundaryError("cone: degenerate anchor (zero-length interval)");
  }
}

// One bottom-up draw; returns prod over layers of the box volume.
double draw_layers(const Eigen::VectorXd& x, int n, Rng& rng, InterlacedArray& z) {
  z.layers.assign(n, Eigen::VectorXd());
  z.layers[n - 1] = x;
  double weight = 1.0;
  for (int layer = n - 1; layer >= 1; --layer) {
    const Eigen::VectorXd& above = z.layers[layer];
    Eigen::VectorXd cur(layer_size(layer));
    for (int i = 0; i < cur.size(); ++i) {
      const auto [lo, hi] = entry_interval(layer, above, i);
      cur(i) = lo + (hi - lo) * uniform01(rng);
      weight *= hi - lo;
    }
    z.layers[layer - 1] = std::move(cur);
  }
  return weight;
}

// Upper bound on the box volume of each free layer: disjoint intervals inside
// [0, x_max] with k entries have product of lengths <= (x_max / k)^k. The
// layer directly above the bottom is exact.
double weight_bound(const Eigen::VectorXd& x, int n) {
  if (n == 1) return 1.0;
  const double top = x.maxCoeff();
  double bound = 1.0;
  for (int i = 0; i < layer_size(n - 1); ++i) {
    const auto [lo, hi] = entry_interval(n - 1, x, i);
    bound *= hi - lo;
  }
  for (int layer = n - 2; layer >= 1; --layer) {
    const int k = layer_size(layer);
    bound *= std::pow(top / k, k);
  }
  return bound;
}

double double_factorial(int j) {
  double r = 1.0;
  for (int i = j; i > 1; i -= 2) r *= i;
  return r;
}

ProcessKind wall_kind(int n) { return ProcessKind::wall_partner(n); }

// Sorted i.i.d. half-normal(s) proposal on the ordered cone, density d! prod psi.
struct ConeProposal {
  double scale;
  Eigen::VectorXd draw(int d, Rng& rng) const {
    Eigen::VectorXd y(d);
    for (int i = 0; i < d; ++i) y(i) = scale * std::abs(standard_normal(rng));
    std::sort(y.data(), y.data() + d);
    return y;
  }
  double density(const Eigen::VectorXd& y) const {
    double log_p = std::lgamma(double(y.size()) + 1.0);
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double z = y(i) / scale;
      log_p += -0.5 * z * z + std::log(2.0 / (scale * std::sqrt(2 * std::numbers::pi)));
    }
    return std::exp(log_p);
  }
};

struct Moments {
  Eigen::VectorXd sum;
  Eigen::VectorXd sum_sq;
};

constexpr std::size_t kBlock = 4096;

// Mean and standard error of per-sample vectors produced by `sample`.
template <typename F>
std::pair<Eigen::VectorXd, Eigen::VectorXd> monte_carlo(std::size_t samples, std::size_t dims,
                                                        const StreamFactory& streams,
                                                        StreamPurpose purpose, int workers,
                                                        F&& sample) {
  const std::size_t blocks = (samples + kBlock - 1) / kBlock;
  auto parts = parallel_map<Moments>(blocks, workers, [&](std::size_t b) {
    Rng rng = streams.stream(purpose, b);
    Moments mo{Eigen::VectorXd::Zero(Eigen::Index(dims)), Eigen::VectorXd::Zero(Eigen::Index(dims))};
    const std::size_t end = std::min(samples, (b + 1) * kBlock);
    Eigen::VectorXd v(static_cast<Eigen::Index>(dims));
    for (std::size_t i = b * kBlock; i < end; ++i) {
      sample(rng, v);
      mo.sum += v;
      mo.sum_sq += v.cwiseProduct(v);
    }
    return mo;
  });
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(Eigen::Index(dims));
  Eigen::VectorXd sum_sq = sum;
  for (const auto& p : parts) {
    sum += p.sum;
    sum_sq += p.sum_sq;
  }
  const double N = double(samples);
  const Eigen::VectorXd mean = sum / N;
  const Eigen::VectorXd var = (sum_sq / N - mean.cwiseProduct(mean)).cwiseMax(0.0) * (N / (N - 1));
  return {mean, (var / N).cwiseSqrt()};
}

std::vector<IntertwiningResult> quadrature_route(const IntertwiningCase& c,
                                                 const std::vector<TestFunction>& tests,
                                                 const IntertwiningBudget& budget) {
  const QuadratureOptions opts{budget.quadrature_tolerance};
  const double t = c.t;
  const double x = c.x(0);
  std::vector<IntertwiningResult> out;
  for (const auto& g : tests) {
    IntertwiningResult r;
    r.quadrature = true;
    if (c.n == 1) {
      Eigen::VectorXd y(1), xs(1);
      xs(0) = x;
      r.lhs = integrate_to_infinity(
          [&](double v) {
            y(0) = v;
            return q_density_unchecked(t, xs, y) * g(y);
          },
          0.0, opts);
      r.rhs = integrate_to_infinity(
          [&](double v) {
            y(0) = v;
            return ht_density(ProcessKind::TypeD(1), t, xs, y) * g(y);
          },
          0.0, opts);
    } else {
      // LHS: (1/x) int_0^x du int_{0 <= y1 <= y2} q_t((u, x), y) g(y) dy.
      Eigen::VectorXd start(2);
      start(1) = x;
      r.lhs = integrate(
                  [&](double u) {
                    start(0) = u;
                    return integrate_ordered_cone(
                        [&](const Eigen::VectorXd& y) {
                          return q_density_unchecked(t, start, y) * g(y);
                        },
                        2, 0.0, opts);
                  },
                  0.0, x, opts) /
              x;
      // RHS: int p_t(x, x') (1/x') int_0^{x'} g(v, x') dv dx', p_t the C(1) h-transform.
      Eigen::VectorXd xs(1), xe(1), e(2);
      xs(0) = x;
      r.rhs = integrate_to_infinity(
          [&](double xp) {
            if (xp <= 0) return 0.0;
            xe(0) = xp;
            const double p = ht_density(ProcessKind::TypeC(1), t, xs, xe);
            e(1) = xp;
            const double lg = integrate(
                                  [&](double v) {
                                    e(0) = v;
                                    return g(e);
                                  },
                                  0.0, xp, opts) /
                              xp;
            return p * lg;
          },
          0.0, opts);
    }
    out.push_back(r);
  }
  return out;
}

std::vector<IntertwiningResult> monte_carlo_route(const IntertwiningCase& c,
                                                  const std::vector<TestFunction>& tests,
                                                  const IntertwiningBudget& budget) {
  const int n = c.n;
  const int m = c.m;
  const double t = c.t;
  const std::size_t k = tests.size();
  const double spread = std::sqrt(2.0 * t + c.x.maxCoeff() * c.x.maxCoeff());
  const ConeProposal proposal{spread};
  const StreamFactory streams(budget.seed);
  const ProcessKind kind = wall_kind(n);

  // LHS: z ~ U(K(x)), y ~ proposal, weight q_t(e(z), y) / proposal(y).
  auto [lhs, lhs_se] = monte_carlo(
      budget.samples, k, streams, StreamPurpose::kIntertwineLhs, budget.workers,
      [&](Rng& rng, Eigen::VectorXd& v) {
        const Eigen::VectorXd e = project_e(sample_cone(c.x, n, rng));
        const Eigen::VectorXd y = proposal.draw(n, rng);
        const double w = q_density_unchecked(t, e, y) / proposal.density(y);
        for (std::size_t i = 0; i < k; ++i) v(Eigen::Index(i)) = w * tests[i](y);
      });

  // RHS: x' ~ proposal, weight p_t(x, x') / proposal(x'), z ~ U(K(x')).
  auto [rhs, rhs_se] = monte_carlo(
      budget.samples, k, streams, StreamPurpose::kIntertwineRhs, budget.workers,
      [&](Rng& rng, Eigen::VectorXd& v) {
        const Eigen::VectorXd xp = proposal.draw(m, rng);
        if (!in_chamber(kind, xp)) {
          v.setZero();
          return;
        }
        const double w = ht_density(kind, t, c.x, xp) / proposal.density(xp);
        const Eigen::VectorXd e = project_e(sample_cone(xp, n, rng));
        for (std::size_t i = 0; i < k; ++i) v(Eigen::Index(i)) = w * tests[i](e);
      });

  std::vector<IntertwiningResult> out;
  for (std::size_t i = 0; i < k; ++i) {
    const auto ii = Eigen::Index(i);
    IntertwiningResult r{lhs(ii), rhs(ii), lhs_se(ii), rhs_se(ii), false, false};
    r.inconclusive = r.combined_se() > budget.max_standard_error;
    out.push_back(r);
  }
  return out;
}

}  // namespace

bool InterlacedArray::valid(double tol) const {
  const int layers_n = n();
  for (int l = 1; l <= layers_n; ++l) {
    const Eigen::VectorXd& z = layers[l - 1];
    if (z.size() != layer_size(l)) return false;
    if ((z.array() < -tol).any()) return false;
  }
  for (int l = 1; l < layers_n; ++l) {
    const Eigen::VectorXd& below = layers[l - 1];
    const Eigen::VectorXd& above = layers[l];
    for (int i = 0; i < below.size(); ++i) {
      const auto [lo, hi] = entry_interval(l, above, i);
      if (below(i) < lo - tol || below(i) > hi + tol) return false;
    }
  }
  return true;
}

Eigen::VectorXd project_b(const InterlacedArray& z) { return z.layers.back(); }

Eigen::VectorXd project_e(const InterlacedArray& z) {
  Eigen::VectorXd e(z.n());
  for (int l = 0; l < z.n(); ++l) e(l) = z.layers[l](z.layers[l].size() - 1);
  return e;
}

ConeSlice ConeSlice::bottom(Eigen::VectorXd x, int n) {
  if (x.size() != bottom_size(n)) throw ShapeError("ConeSlice: bottom anchor needs ceil(n/2) entries");
  return ConeSlice{Mode::kBottom, std::move(x), n};
}

ConeSlice ConeSlice::edge(Eigen::VectorXd y) {
  const int n = int(y.size());
  if (n < 1) throw ShapeError("ConeSlice: empty edge anchor");
  return ConeSlice{Mode::kEdge, std::move(y), n};
}

double cone_volume_constant(int n) {
  if (n < 1) throw ConfigError("cone_volume_constant: n must be >= 1");
  double c = 1.0;
  for (int j = 1; j < n; ++j) c *= double_factorial(j);
  return c;
}

InterlacedArray sample_cone(const Eigen::VectorXd& x, int n, Rng& rng) {
  check_anchor(x, n);
  const double bound = weight_bound(x, n);
  InterlacedArray z;
  for (int attempt = 0; attempt < 10000000; ++attempt) {
    const double w = draw_layers(x, n, rng, z);
    if (uniform01(rng) * bound <= w) return z;
  }
  throw EnvelopeError("sample_cone: rejection sampler made no progress");
}

VolumeEstimate cone_volume(const Eigen::VectorXd& x, int n, std::size_t samples, Rng& rng) {
  check_anchor(x, n);
  if (samples < 2) throw ConfigError("cone_volume: need at least 2 samples");
  InterlacedArray z;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double w = draw_layers(x, n, rng, z);
    sum += w;
    sum_sq += w * w;
  }
  const double N = double(samples);
  const double mean = sum / N;
  const double var = std::max(0.0, sum_sq / N - mean * mean) * N / (N - 1);
  return VolumeEstimate{mean, std::sqrt(var / N)};
}

double IntertwiningResult::combined_se() const { return std::hypot(lhs_se, rhs_se); }

std::vector<IntertwiningResult> check_intertwining(const IntertwiningCase& c,
                                                   const std::vector<TestFunction>& tests,
                                                   const IntertwiningBudget& budget) {
  if (c.n != 2 * c.m && c.n != 2 * c.m - 1)
    throw ConfigError("check_intertwining: n must be 2m or 2m - 1");
  if (!(c.t > 0)) throw DomainError("check_intertwining: t must be positive");
  if (!in_chamber(wall_kind(c.n), c.x) || (c.x.array() <= 0).any())
    throw DomainError("check_intertwining: x must be in the interior of the chamber");
  if (c.m == 1) return quadrature_route(c, tests, budget);
  return monte_carlo_route(c, tests, budget);
}

double intertwined_density(int n, double t, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const int m = bottom_size(n);
  if (x.size() != m || y.size() != n) throw ShapeError("intertwined_density: dimension mismatch");
  const bool even = n % 2 == 0;
  const int top_rows = even ? m : m - 1;
  const int bottom_index = even ? 2 * m : 2 * m - 1;
  Eigen::MatrixXd a(n, n);
  for (int r = 0; r < n; ++r)
    for (int j = 0; j < n; ++j) {
      if (r < top_rows)
        a(r, j) = a_kernel(t, 2 * (r + 1), j + 1, 0.0, y(j));
      else
        a(r, j) = a_kernel(t, bottom_index, j + 1, x(r - top_rows), y(j));
    }
  return det_eval(a);
}

}  // namespace dyson
