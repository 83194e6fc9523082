#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "dyson/determinantal.hpp"
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

}  // namespace

TEST_CASE("h values") {
  CHECK(h_value(ProcessKind::TypeD(1), vec({3.7})) == 1.0);
  CHECK(h_value(ProcessKind::TypeC(2), vec({1, 2})) == 6.0);
  CHECK(h_value(ProcessKind::TypeC(2), vec({1, 1})) == 0.0);
  CHECK(h_value(ProcessKind::TypeC(1), vec({0.0})) == 0.0);
  CHECK(h_value(ProcessKind::TypeD(2), vec({0.0, 2})) == 4.0);
  CHECK_THROWS_AS(h_value(ProcessKind::TypeA(2), vec({1, 2})), UnsupportedKindError);
  CHECK_THROWS_AS(h_value(ProcessKind::TypeC(2), vec({1, 2, 3})), ShapeError);
  CHECK(vandermonde(vec({1, 2, 4})) == 1.0 * 3 * 2);
}

TEST_CASE("Karlin-McGregor examples") {
  CHECK(km_density(ProcessKind::TypeD(1), 1.0, vec({0.5}), vec({0.8})) ==
        doctest::Approx(0.55276).epsilon(1e-4));
  CHECK(km_density(ProcessKind::TypeC(1), 1.0, vec({0.5}), vec({0.5})) ==
        doctest::Approx(phi(1.0, 0.0) - phi(1.0, 1.0)).epsilon(1e-14));
  CHECK_THROWS_AS(km_density(ProcessKind::TypeC(2), 1.0, vec({0.5}), vec({0.5, 1})), ShapeError);
}

TEST_CASE("Chapman-Kolmogorov for the absorbed pair") {
  const auto kind = ProcessKind::TypeC(2);
  const Eigen::VectorXd x = vec({0.4, 1.1}), x_end = vec({0.7, 1.6});
  const double t = 0.6, s = 0.5;
  const double lhs = oracle::ordered_2d(
      [&](double a, double b) {
        const Eigen::VectorXd u = vec({a, b});
        return km_density(kind, t, x, u) * km_density(kind, s, u, x_end);
      },
      0.0, 14.0);
  CHECK(std::abs(lhs - km_density(kind, t + s, x, x_end)) < 1e-6);
}

TEST_CASE("h is invariant for the killed semigroup") {
  for (auto kind : {ProcessKind::TypeC(1), ProcessKind::TypeD(1)}) {
    const Eigen::VectorXd x = vec({0.6});
    const double v = oracle::gk([&](double a) { return km_density(kind, 1.3, x, vec({a})) * h_value(kind, vec({a})); },
                                0.0, 20.0);
    CHECK(std::abs(v - h_value(kind, x)) < 1e-5);
  }
  for (auto kind : {ProcessKind::TypeC(2), ProcessKind::TypeD(2)}) {
    const Eigen::VectorXd x = vec({0.5, 1.2});
    const double v = oracle::ordered_2d(
        [&](double a, double b) {
          const Eigen::VectorXd u = vec({a, b});
          return km_density(kind, 0.8, x, u) * h_value(kind, u);
        },
        0.0, 16.0);
    CHECK(std::abs(v - h_value(kind, x)) < 1e-5);
  }
}

TEST_CASE("h-transformed density") {
  const auto c1 = ProcessKind::TypeC(1);
  const double mass = oracle::gk([&](double a) { return ht_density(c1, 1.0, vec({0.5}), vec({a})); }, 0.0, 20.0,
                                 1e-13);
  CHECK(std::abs(mass - 1.0) < 1e-8);
  const auto d1 = ProcessKind::TypeD(1);
  CHECK(ht_density(d1, 0.7, vec({0.3}), vec({1.1})) == km_density(d1, 0.7, vec({0.3}), vec({1.1})));
  CHECK_THROWS_AS(ht_density(c1, 1.0, vec({0.0}), vec({1.0})), BoundaryStartError);
  CHECK(ht_density(ProcessKind::TypeC(2), 1.0, vec({0.5, 1}), vec({1.0, 0.5})) == 0.0);
}

TEST_CASE("q density") {
  for (double t : {0.4, 1.0, 3.0})
    for (double y : {0.0, 0.3, 1.7}) {
      const double v = q_density(t, vec({y}), vec({0.9}));
      CHECK(v == doctest::Approx(phi(t, y + 0.9) + phi(t, y - 0.9)).epsilon(1e-14));
    }
  CHECK_THROWS_AS(q_density(1.0, vec({0.5, 0.2}), vec({0.1, 0.2})), DomainError);
  CHECK_THROWS_AS(q_density(1.0, vec({-0.1, 0.2}), vec({0.1, 0.2})), DomainError);
  CHECK_THROWS_AS(q_density(1.0, vec({0.1}), vec({0.1, 0.2})), ShapeError);
  CHECK_THROWS_AS(q_density(1.0, Eigen::VectorXd::Zero(9), Eigen::VectorXd::Zero(9)), CapacityError);
  // Nonnegative on the cone.
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    const int n = 2 + k % 3;
    const auto y = props::sorted_uniform(rng, n, 0.0, 2.0);
    const auto y_end = props::sorted_uniform(rng, n, 0.0, 3.0);
    CHECK(q_density(1.0, y, y_end) >= -1e-12);
  }
}

TEST_CASE("q density properties") {
  for (const auto& r : {props::q_heat_equation(2, 100, 21), props::q_heat_equation(3, 100, 22),
                        props::q_boundary(2, 100, 23), props::q_boundary(3, 100, 24),
                        props::q_normalization(), props::q_semigroup(2, 25)}) {
    INFO(r.name << ": worst " << r.worst << " at " << r.where);
    CHECK(r.pass());
  }
}

TEST_CASE("q initial condition converges at rate t") {
  const Eigen::VectorXd y = vec({0.6, 1.3});
  auto g = [](double a, double b) { return std::exp(-(a - 0.5) * (a - 0.5) - (b - 1.2) * (b - 1.2)); };
  auto err = [&](double t) {
    const double v = oracle::ordered_2d(
        [&](double a, double b) { return q_density(t, y, vec({a, b})) * g(a, b); }, 0.0, 6.0, 1e-12);
    return v - g(y(0), y(1));
  };
  const double e1 = err(0.02), e2 = err(0.01);
  CHECK(std::abs(e1) < 0.05);
  CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("entrance densities of one particle") {
  const auto c1 = EntranceSpec::dyson(ProcessKind::TypeC(1));
  const auto d1 = EntranceSpec::dyson(ProcessKind::TypeD(1));
  const auto y1 = EntranceSpec::y_process(1);
  for (double t : {0.5, 1.0, 2.0})
    for (double x : {0.1, 0.8, 1.9, 3.5}) {
      const double s = std::sqrt(t), z = x / s;
      const double maxwell = std::sqrt(2 / std::numbers::pi) * z * z * std::exp(-z * z / 2) / s;
      CHECK(entrance_density(c1, t, vec({x})) == doctest::Approx(maxwell).epsilon(1e-6));
      CHECK(entrance_density(d1, t, vec({x})) == doctest::Approx(2 * phi(t, x)).epsilon(1e-6));
      CHECK(entrance_density(y1, t, vec({x})) == doctest::Approx(2 * phi(t, x)).epsilon(1e-6));
    }
  CHECK(entrance_density(c1, 1.0, vec({-0.5})) == 0.0);
  CHECK_THROWS_AS(entrance_density(c1, 0.0, vec({0.5})), DomainError);
}

TEST_CASE("two-particle entrance densities against the squared-h form") {
  // From the origin the h-transform limit is proportional to h(x')^2 exp(-|x'|^2/2)
  // (Vandermonde squared for type A); normalize that here independently.
  auto weight = [](const ProcessKind& kind, double a, double b) {
    const Eigen::VectorXd x = vec({a, b});
    const double h = invariant_h(kind, x);
    return h * h * std::exp(-(a * a + b * b) / 2);
  };
  for (auto kind : {ProcessKind::TypeC(2), ProcessKind::TypeD(2)}) {
    const double z = oracle::ordered_2d([&](double a, double b) { return weight(kind, a, b); }, 0.0, 14.0);
    const auto spec = EntranceSpec::dyson(kind);
    for (auto p : {std::pair{0.4, 1.1}, std::pair{1.0, 2.3}, std::pair{0.2, 0.6}}) {
      const double expected = weight(kind, p.first, p.second) / z;
      CHECK(entrance_density(spec, 1.0, vec({p.first, p.second})) == doctest::Approx(expected).epsilon(1e-5));
    }
    // Brownian scaling at t = 2.
    const double expected = weight(kind, 0.5 / std::sqrt(2.0), 1.5 / std::sqrt(2.0)) / z / 2.0;
    CHECK(entrance_density(spec, 2.0, vec({0.5, 1.5})) == doctest::Approx(expected).epsilon(1e-5));
  }
  const auto a2 = ProcessKind::TypeA(2);
  const double z = oracle::gk(
      [&](double a) { return oracle::gk([&](double b) { return weight(a2, a, b); }, a, 14.0); }, -14.0, 14.0,
      1e-11);
  const auto spec = EntranceSpec::dyson(a2);
  for (auto p : {std::pair{-0.4, 1.1}, std::pair{-1.5, -0.2}}) {
    const double expected = weight(a2, p.first, p.second) / z;
    CHECK(entrance_density(spec, 1.0, vec({p.first, p.second})) == doctest::Approx(expected).epsilon(1e-5));
  }
}

TEST_CASE("Y entrance density for two particles integrates to one") {
  const auto spec = EntranceSpec::y_process(2);
  const double mass = oracle::ordered_2d(
      [&](double a, double b) { return entrance_density(spec, 1.5, vec({a, b})); }, 0.0, 18.0);
  CHECK(std::abs(mass - 1.0) < 1e-6);
}

TEST_CASE("determinant evaluation") {
  CHECK(det_eval(Eigen::MatrixXd::Identity(3, 3)) == 1.0);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  for (int k = 0; k < 50; ++k) {
    const int n = 1 + k % 6;
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = nd(rng);
    const double ref = oracle::cofactor_det(m);
    CHECK(std::abs(det_eval(m) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
    Eigen::MatrixXd scaled = m;
    scaled.row(0) *= 3.5;
    CHECK(det_eval(scaled) == doctest::Approx(3.5 * det_eval(m)).epsilon(1e-12));
  }
  Eigen::MatrixXd singular(3, 3);
  singular << 1, 2, 3, 2, 4, 6, 1, 0, 1;
  CHECK(std::abs(det_eval(singular)) < 1e-14);
  CHECK_THROWS_AS(det_eval(Eigen::MatrixXd::Zero(2, 3)), ShapeError);
  CHECK_THROWS_AS(det_eval(Eigen::MatrixXd::Identity(17, 17)), CapacityError);
}
