#pragma once

// Exact densities: Karlin-McGregor determinants for the wall systems, the
// h functions and the h-transformed semigroup, the Y-process transition
// density q_t, and entrance densities from the origin.

#include <Eigen/Core>

#include "dyson/heat_kernel.hpp"
#include "dyson/linalg.hpp"
#include "dyson/types.hpp"

namespace dyson {

/// h^C(x) = prod x_i prod_{i<j} (x_j^2 - x_i^2), h^D(x) = prod_{i<j} (x_j^2 - x_i^2).
/// Zero on the chamber boundary. TypeA throws UnsupportedKindError.
template <typename Derived>
typename Derived::Scalar h_value(const ProcessKind& kind, const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  if (kind.family == Family::A) throw UnsupportedKindError("h_value: type A has no wall h");
  if (x.size() != kind.size) throw ShapeError("h_value: dimension mismatch");
  Scalar h(1);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (kind.family == Family::C) h *= x(i);
    for (Eigen::Index j = i + 1; j < x.size(); ++j) h *= x(j) * x(j) - x(i) * x(i);
  }
  return h;
}

/// Vandermonde prod_{i<j} (x_j - x_i), the invariant function of type A.
template <typename Derived>
typename Derived::Scalar vandermonde(const Eigen::MatrixBase<Derived>& x) {
  typename Derived::Scalar v(1);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    for (Eigen::Index j = i + 1; j < x.size(); ++j) v *= x(j) - x(i);
  return v;
}

inline double h_value(const OrderedConfig& c) { return h_value(c.kind, c.x); }

/// Invariant function for any kind: vandermonde for A, h_value for C/D.
template <typename Derived>
typename Derived::Scalar invariant_h(const ProcessKind& kind, const Eigen::MatrixBase<Derived>& x) {
  return kind.family == Family::A ? vandermonde(x) : h_value(kind, x);
}

/// The Karlin-McGregor matrix of one-particle kernels:
///   A: phi_t(x_i - x'_j); C: phi_t(x_i - x'_j) - phi_t(x_i + x'_j);
///   D: phi_t(x_i - x'_j) + phi_t(x_i + x'_j).
template <typename Scalar, typename D1, typename D2>
Matrix<Scalar> km_matrix(const ProcessKind& kind, Scalar t, const Eigen::MatrixBase<D1>& x,
                         const Eigen::MatrixBase<D2>& x_end) {
  const Eigen::Index m = x.size();
  Matrix<Scalar> k(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      const Scalar direct = phi(t, Scalar(x(i) - x_end(j)));
      switch (kind.family) {
        case Family::A: k(i, j) = direct; break;
        case Family::C: k(i, j) = direct - phi(t, Scalar(x(i) + x_end(j))); break;
        case Family::D: k(i, j) = direct + phi(t, Scalar(x(i) + x_end(j))); break;
      }
    }
  return k;
}

/// Karlin-McGregor density of m independent Brownian motions killed (C) or
/// reflected at 0 and killed on collision (D). TypeA gives the plain Weyl-chamber
/// killed density det phi_t(x_i - x'_j).
double km_density(const ProcessKind& kind, double t, const Eigen::VectorXd& x,
                  const Eigen::VectorXd& x_end);

/// h(x') km(t, x, x') / h(x). Throws BoundaryStartError if h(x) = 0.
double ht_density(const ProcessKind& kind, double t, const Eigen::VectorXd& x,
                  const Eigen::VectorXd& x_end);

/// Matrix a_{i,j}(y_i, y'_j), i, j = 1..n.
template <typename Scalar, typename D1, typename D2>
Matrix<Scalar> q_matrix(Scalar t, const Eigen::MatrixBase<D1>& y, const Eigen::MatrixBase<D2>& y_end) {
  const Eigen::Index n = y.size();
  Matrix<Scalar> a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      a(i, j) = a_kernel<Scalar>(t, int(i + 1), int(j + 1), Scalar(y(i)), Scalar(y_end(j)));
  return a;
}

inline constexpr int kMaxQDimension = 8;

/// Transition density of the Y process (reflected at 0, each particle reflected
/// off the one below): det a_{i,j}(y_i, y'_j). Rows index the start point.
/// Unordered input or a negative coordinate throws DomainError.
double q_density(double t, const Eigen::VectorXd& y, const Eigen::VectorXd& y_end);

/// Same determinant without the ordering checks; used for finite differences
/// across the cone boundary.
template <typename Scalar, typename D1, typename D2>
Scalar q_density_unchecked(Scalar t, const Eigen::MatrixBase<D1>& y, const Eigen::MatrixBase<D2>& y_end) {
  return det_eval(q_matrix(t, y, y_end));
}

/// Which entrance law from the origin.
enum class EntranceTarget { kYProcess, kDyson };

struct EntranceSpec {
  EntranceTarget target = EntranceTarget::kDyson;
  ProcessKind kind;  // for kYProcess, kind.size is the number of Y particles

  static EntranceSpec y_process(int n) { return {EntranceTarget::kYProcess, ProcessKind::TypeA(n)}; }
  static EntranceSpec dyson(ProcessKind kind) { return {EntranceTarget::kDyson, kind}; }
};

/// Unnormalized entrance density at t = 1 (see entrance_density).
double entrance_density_raw(const EntranceSpec& spec, const Eigen::VectorXd& x_end);

/// Normalization constant of entrance_density_raw over its chamber. Computed once
/// per spec and cached; safe to call concurrently.
double entrance_normalizer(const EntranceSpec& spec);

/// Density at time t of the process started from the origin.
///
/// Y process: det a_{i,j}(0, y'_j). Dyson systems: limit of ht_density as the
/// start point eps*(1..m) (C, D) or eps*(centered 1..m) (A) shrinks to 0, by
/// Richardson extrapolation in eps^2. Both use Brownian scaling
/// f_t(x') = t^{-d/2} f_1(x'/sqrt t) and a numerically computed normalizer.
/// Throws NumericalInstabilityError if the eps and eps/2 estimates differ by
/// more than 1%.
double entrance_density(const EntranceSpec& spec, double t, const Eigen::VectorXd& x_end);

}  // namespace dyson
