#pragma once

#include <Eigen/Core>

#include <string>

#include "dyson/errors.hpp"

namespace dyson {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

enum class Family { A, C, D };

/// Which particle system: GUE Dyson (A, n particles) or the wall systems of
/// type C (absorbing wall) and D (reflecting wall) with m particles.
struct ProcessKind {
  Family family = Family::A;
  int size = 1;

  static ProcessKind TypeA(int n) { return make(Family::A, n); }
  static ProcessKind TypeC(int m) { return make(Family::C, m); }
  static ProcessKind TypeD(int m) { return make(Family::D, m); }

  /// The wall system whose top particle matches sup X_n: C(m) for n = 2m,
  /// D(m) for n = 2m - 1.
  static ProcessKind wall_partner(int n) {
    if (n < 1) throw ConfigError("wall_partner: n must be >= 1");
    return n % 2 == 0 ? TypeC(n / 2) : TypeD((n + 1) / 2);
  }

  bool operator==(const ProcessKind&) const = default;

 private:
  static ProcessKind make(Family f, int size) {
    if (size < 1) throw ConfigError("ProcessKind: particle count must be >= 1");
    return ProcessKind{f, size};
  }
};

std::string to_string(const ProcessKind& kind);

/// A point of the Weyl chamber of the given kind.
///
/// Type A: strictly increasing. Type C: additionally x_1 > 0. Type D: x_1 >= 0.
struct OrderedConfig {
  ProcessKind kind;
  Vector<double> x;

  /// Validates the chamber constraints; throws DomainError / ShapeError.
  static OrderedConfig make(ProcessKind kind, Vector<double> x);
};

/// True iff `x` lies in the open chamber of `kind` (closed wall for D).
template <typename Derived>
bool in_chamber(const ProcessKind& kind, const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != kind.size) return false;
  for (Eigen::Index i = 1; i < x.size(); ++i)
    if (!(x(i - 1) < x(i))) return false;
  if (x.size() == 0) return true;
  switch (kind.family) {
    case Family::A: return true;
    case Family::C: return x(0) > 0;
    case Family::D: return x(0) >= 0;
  }
  return false;
}

}  // namespace dyson
