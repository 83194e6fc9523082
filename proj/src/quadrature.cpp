#include "dyson/quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>

#include <limits>
#include <memory>
#include <vector>

namespace dyson {

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opts) {
  if (a == b) return 0.0;
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 21>::integrate(
      f, a, b, opts.max_depth, opts.tolerance, &error);
}

double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             const QuadratureOptions& opts) {
  // exp_sinh refines its abscissa tables lazily, so nested calls must not share
  // an instance: one rule per nesting depth, per thread.
  using Rule = boost::math::quadrature::exp_sinh<double>;
  thread_local std::vector<std::unique_ptr<Rule>> rules;
  thread_local std::size_t depth = 0;
  if (rules.size() <= depth) rules.push_back(std::make_unique<Rule>());
  Rule& rule = *rules[depth];
  ++depth;
  struct Exit {
    ~Exit() { --depth; }
  } exit_guard;
  double error = 0.0;
  double l1 = 0.0;
  return rule.integrate(f, a, std::numeric_limits<double>::infinity(), opts.tolerance,
                        &error, &l1);
}

double integrate_real_line(const std::function<double(double)>& f,
                           const QuadratureOptions& opts) {
  thread_local boost::math::quadrature::sinh_sinh<double> rule;
  double error = 0.0;
  double l1 = 0.0;
  return rule.integrate(f, opts.tolerance, &error, &l1);
}

namespace {

double nested(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd& u,
              int level, double lo, const QuadratureOptions& opts) {
  if (level == u.size()) return f(u);
  return integrate_to_infinity(
      [&](double v) {
        u(level) = v;
        return nested(f, u, level + 1, v, opts);
      },
      lo, opts);
}

}  // namespace

double integrate_ordered_cone(const std::function<double(const Eigen::VectorXd&)>& f,
                              int dim, double lo, const QuadratureOptions& opts) {
  if (dim == 0) return f(Eigen::VectorXd());
  Eigen::VectorXd u(dim);
  return nested(f, u, 0, lo, opts);
}

double integrate_ordered_real(const std::function<double(const Eigen::VectorXd&)>& f, int dim,
                              const QuadratureOptions& opts) {
  if (dim == 0) return f(Eigen::VectorXd());
  Eigen::VectorXd u(dim);
  return integrate_real_line(
      [&](double v) {
        u(0) = v;
        return nested(f, u, 1, v, opts);
      },
      opts);
}

}  // namespace dyson
