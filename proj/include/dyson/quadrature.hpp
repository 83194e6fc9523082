#pragma once

// Adaptive 1-d quadrature and nested integration over the ordered cone
// {lo <= u_1 <= ... <= u_d}. Finite intervals use adaptive Gauss-Kronrod,
// half-lines use the exp-sinh map.

#include <Eigen/Core>

#include <functional>

namespace dyson {

struct QuadratureOptions {
  double tolerance = 1e-10;  // relative, per 1-d panel
  unsigned max_depth = 15;
};

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opts = {});

/// int_a^inf f.
double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             const QuadratureOptions& opts = {});

/// int_{-inf}^{inf} f.
double integrate_real_line(const std::function<double(double)>& f,
                           const QuadratureOptions& opts = {});

/// int over lo <= u_1 <= ... <= u_dim < inf of f(u).
double integrate_ordered_cone(const std::function<double(const Eigen::VectorXd&)>& f,
                              int dim, double lo = 0.0, const QuadratureOptions& opts = {});

/// As above with u_1 ranging over the whole real line.
double integrate_ordered_real(const std::function<double(const Eigen::VectorXd&)>& f, int dim,
                              const QuadratureOptions& opts = {});

}  // namespace dyson
