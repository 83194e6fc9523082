#include "doctest.h"

#include <cmath>

#include "dyson/determinantal.hpp"
#include "dyson/errors.hpp"
#include "dyson/intertwine.hpp"
#include "oracles.hpp"
#include "properties.hpp"

using namespace dyson;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(Eigen::Index(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// Membership test written from the interlacing chains directly.
bool interlaced(const InterlacedArray& z) {
  for (int l = 1; l <= z.n(); ++l) {
    if (z.layers[l - 1].size() != (l + 1) / 2) return false;
    if (z.layers[l - 1].minCoeff() < 0) return false;
  }
  for (int l = 1; l < z.n(); ++l) {
    const Eigen::VectorXd& lo = z.layers[l - 1];
    const Eigen::VectorXd& hi = z.layers[l];
    std::vector<double> chain;
    if (l % 2 == 1) {  // lo_1 <= hi_1 <= lo_2 <= ... <= lo_k <= hi_k
      for (Eigen::Index i = 0; i < lo.size(); ++i) {
        chain.push_back(lo(i));
        chain.push_back(hi(i));
      }
    } else {  // hi_1 <= lo_1 <= hi_2 <= ... <= lo_k <= hi_{k+1}
      for (Eigen::Index i = 0; i < lo.size(); ++i) {
        chain.push_back(hi(i));
        chain.push_back(lo(i));
      }
      chain.push_back(hi(lo.size()));
    }
    for (std::size_t i = 1; i < chain.size(); ++i)
      if (chain[i] < chain[i - 1]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("layer sizes") {
  CHECK(layer_size(1) == 1);
  CHECK(layer_size(2) == 1);
  CHECK(layer_size(3) == 2);
  CHECK(layer_size(4) == 2);
  CHECK(bottom_size(5) == 3);
  CHECK(bottom_size(6) == 3);
}

TEST_CASE("projections") {
  InterlacedArray z{{vec({0.4}), vec({1.5})}};
  CHECK(z.valid());
  CHECK(project_b(z) == vec({1.5}));
  CHECK(project_e(z) == vec({0.4, 1.5}));
  InterlacedArray bad{{vec({2.0}), vec({1.5})}};
  CHECK_FALSE(bad.valid());
  CHECK_FALSE(interlaced(bad));
  CHECK_THROWS_AS(ConeSlice::bottom(vec({1, 2}), 2), ShapeError);
  CHECK(ConeSlice::bottom(vec({1, 2}), 4).n == 4);
  CHECK(ConeSlice::edge(vec({0.1, 0.2, 0.3})).n == 3);
}

TEST_CASE("uniform samples on the cone") {
  StreamFactory streams(4);
  Rng rng = streams.stream(StreamPurpose::kCone, 0);
  int below_half = 0;
  const int N = 20000;
  for (int k = 0; k < N; ++k) {
    const auto z = sample_cone(vec({2.0}), 2, rng);
    below_half += z.layers[0](0) <= 1.0;
  }
  CHECK(std::abs(below_half / double(N) - 0.5) < 4 * 0.5 / std::sqrt(double(N)));

  // m = 2, n = 4: mean of z^2_1 against a plain rejection sampler on [0, 2]^4.
  const Eigen::VectorXd x = vec({1.0, 2.0});
  double mean_lib = 0, mean_ref = 0;
  int accepted = 0;
  std::mt19937_64 ref(9);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  while (accepted < N) {
    InterlacedArray cand{{vec({u(ref)}), vec({u(ref)}), vec({u(ref), u(ref)}), x}};
    if (!interlaced(cand)) continue;
    mean_ref += cand.layers[1](0);
    ++accepted;
  }
  for (int k = 0; k < N; ++k) {
    const auto z = sample_cone(x, 4, rng);
    REQUIRE(interlaced(z));
    REQUIRE(z.valid());
    mean_lib += z.layers[1](0);
  }
  CHECK(std::abs(mean_lib / N - mean_ref / N) < 0.02);
}

TEST_CASE("edge projection invariants") {
  StreamFactory streams(5);
  Rng rng = streams.stream(StreamPurpose::kCone, 1);
  for (int k = 0; k < 10000; ++k) {
    const int n = 1 + k % 6;
    const int m = bottom_size(n);
    Eigen::VectorXd x(m);
    for (int i = 0; i < m; ++i) x(i) = 0.3 + i + 0.5 * uniform01(rng);
    const auto z = sample_cone(x, n, rng);
    REQUIRE(interlaced(z));
    const auto e = project_e(z);
    for (int i = 1; i < n; ++i) REQUIRE(e(i) >= e(i - 1));
    REQUIRE(e(n - 1) == project_b(z)(m - 1));
  }
}

TEST_CASE("anchor errors") {
  Rng rng = StreamFactory(1).stream(StreamPurpose::kCone, 0);
  CHECK_THROWS_AS(sample_cone(vec({1.0, 1.0}), 4, rng), BoundaryError);
  CHECK_THROWS_AS(sample_cone(vec({0.0}), 2, rng), BoundaryError);
  CHECK_THROWS_AS(sample_cone(vec({2.0, 1.0}), 3, rng), DomainError);
  CHECK_THROWS_AS(sample_cone(vec({-1.0, 1.0}), 3, rng), DomainError);
  CHECK_THROWS_AS(sample_cone(vec({1.0}), 3, rng), ShapeError);
  CHECK_NOTHROW(sample_cone(vec({0.0, 1.0}), 3, rng));
}

TEST_CASE("cone volumes") {
  Rng rng = StreamFactory(2).stream(StreamPurpose::kCone, 0);
  const auto two = cone_volume(vec({2.0}), 2, 1000, rng);
  CHECK(two.estimate == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(cone_volume(vec({2.0}), 1, 1000, rng).estimate == 1.0);
  // n = 3, x = (1, 2): int_1^2 w dw = 3/2 = h^D(1, 2) / 2.
  const auto three = cone_volume(vec({1.0, 2.0}), 3, 200000, rng);
  CHECK(std::abs(three.estimate - 1.5) < 4 * three.standard_error + 1e-12);
  // n = 4, x = (1, 2): true volume h^C(1, 2) / (1!! 2!! 3!!) = 6 / 6.
  const auto four = cone_volume(vec({1.0, 2.0}), 4, 1000000, rng);
  CHECK(std::abs(four.estimate - 1.0) < 4 * four.standard_error);
  CHECK(std::abs(four.estimate - 6.0) > 100 * four.standard_error);
  CHECK(cone_volume_constant(4) == 6.0);
  CHECK(cone_volume_constant(5) == 48.0);
}

TEST_CASE("cone volume against plain rejection") {
  // Box [0, x_m]^free with an independent membership test.
  std::mt19937_64 ref(21);
  Rng rng = StreamFactory(3).stream(StreamPurpose::kCone, 0);
  for (int n : {3, 4, 5}) {
    const int m = bottom_size(n);
    Eigen::VectorXd x(m);
    for (int i = 0; i < m; ++i) x(i) = 0.7 + 0.9 * i;
    const double top = x(m - 1);
    int free = 0;
    for (int l = 1; l < n; ++l) free += layer_size(l);
    std::uniform_real_distribution<double> u(0.0, top);
    const int N = 400000;
    int hits = 0;
    for (int k = 0; k < N; ++k) {
      InterlacedArray cand;
      for (int l = 1; l < n; ++l) {
        Eigen::VectorXd layer(layer_size(l));
        for (auto& v : layer) v = u(ref);
        std::sort(layer.begin(), layer.end());
        cand.layers.push_back(layer);
      }
      cand.layers.push_back(x);
      hits += interlaced(cand);
    }
    // Sorting each layer maps k! orderings onto one.
    double sort_factor = 1;
    for (int l = 1; l < n; ++l) sort_factor *= std::tgamma(layer_size(l) + 1.0);
    const double p = hits / double(N);
    const double ref_vol = p * std::pow(top, free) / sort_factor;
    const double ref_se = std::sqrt(p * (1 - p) / N) * std::pow(top, free) / sort_factor;
    const auto est = cone_volume(x, n, 400000, rng);
    INFO("n=" << n << " lib=" << est.estimate << " ref=" << ref_vol);
    CHECK(std::abs(est.estimate - ref_vol) < 4 * std::hypot(est.standard_error, ref_se));
    const double h = h_value(ProcessKind::wall_partner(n), x);
    CHECK(std::abs(est.estimate - h / cone_volume_constant(n)) < 4 * est.standard_error);
  }
}

TEST_CASE("determinant identity for the smallest cones") {
  for (double t : {0.5, 1.0, 2.0}) {
    // n = 2: int_0^x q_t((u, x), y) du.
    const double x = 0.9;
    const Eigen::VectorXd y2 = vec({0.4, 1.3});
    const double direct2 = oracle::gk([&](double u) { return q_density(t, vec({u, x}), y2); }, 0.0, x, 1e-13);
    CHECK(std::abs(intertwined_density(2, t, vec({x}), y2) - direct2) < 1e-6);
    // n = 3: e(z) = (v, w, x_2) with x_1 <= w <= x_2, 0 <= v <= w.
    const Eigen::VectorXd xb = vec({0.5, 1.4});
    const Eigen::VectorXd y3 = vec({0.2, 0.8, 1.6});
    const double direct3 = oracle::gk(
        [&](double w) {
          return oracle::gk([&](double v) { return q_density(t, vec({v, w, xb(1)}), y3); }, 0.0, w, 1e-12);
        },
        xb(0), xb(1), 1e-12);
    CHECK(std::abs(intertwined_density(3, t, xb, y3) - direct3) < 1e-6);
  }
  CHECK_THROWS_AS(intertwined_density(3, 1.0, vec({1.0}), vec({0, 1, 2})), ShapeError);
}

TEST_CASE("intertwining by quadrature") {
  const auto tests = props::intertwining_tests();
  const auto d = check_intertwining({1, 1, 1.0, vec({0.7})}, tests);
  for (const auto& r : d) {
    CHECK(r.quadrature);
    CHECK(std::abs(r.difference()) < 1e-8);
  }
  const std::vector<TestFunction> g = {[](const Eigen::VectorXd& y) { return std::exp(-y(0) - y(1)); }};
  const auto c = check_intertwining({1, 2, 1.0, vec({0.7})}, g);
  INFO("lhs=" << c[0].lhs << " rhs=" << c[0].rhs);
  CHECK(std::abs(c[0].difference()) < 1e-5);
  CHECK_THROWS_AS(check_intertwining({1, 3, 1.0, vec({0.7})}, g), ConfigError);
  CHECK_THROWS_AS(check_intertwining({1, 2, 1.0, vec({0.0})}, g), DomainError);
}

TEST_CASE("intertwining by Monte Carlo") {
  IntertwiningBudget budget;
  budget.samples = 200000;
  const auto rs = check_intertwining({2, 3, 1.0, vec({0.6, 1.5})}, props::intertwining_tests(), budget);
  for (const auto& r : rs) {
    INFO("lhs=" << r.lhs << " rhs=" << r.rhs << " se=" << r.combined_se());
    CHECK_FALSE(r.inconclusive);
    CHECK(std::abs(r.difference()) < 4 * r.combined_se());
  }
}
