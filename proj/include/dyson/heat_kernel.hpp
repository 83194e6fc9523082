#pragma once

// Gaussian heat kernel phi_t, its derivative / repeated tail-integral family
// phi_t^{(k)}, and the two-point kernel a_{i,j} used by every determinantal
// density in the library.
//
// Validated range: t in [0.1, 10], |y| <= 10 sqrt(t). Outside it the values are
// computed by the same recurrences but have not been checked against an oracle.

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

#include "dyson/errors.hpp"

namespace dyson {

inline constexpr int kDefaultMaxOrder = 64;

/// Order of phi_t^{(k)}: derivative order if k >= 0, repeated-integral depth if k < 0.
class KernelOrder {
 public:
  explicit KernelOrder(int k, int max_order = kDefaultMaxOrder) : k_(k) {
    if (std::abs(k) > max_order)
      throw ConfigError("KernelOrder: |k| = " + std::to_string(std::abs(k)) +
                        " exceeds K_max = " + std::to_string(max_order));
  }
  int value() const { return k_; }

 private:
  int k_;
};

namespace detail {

template <typename Scalar>
void require_positive_time(Scalar t) {
  if (!(t > Scalar(0))) throw DomainError("heat kernel: time must be positive");
}

template <typename Scalar>
Scalar std_phi(Scalar x) {
  using std::exp;
  return exp(-x * x / 2) / std::sqrt(2 * std::numbers::pi_v<Scalar>);
}

// Upper tail of the standard normal, via erfc (no 1 - CDF cancellation).
template <typename Scalar>
Scalar std_tail(Scalar x) {
  using std::erfc;
  return erfc(x / std::numbers::sqrt2_v<Scalar>) / 2;
}

// phi_1^{(k)}(x), k >= 0: Hermite-function recurrence
//   p_{j+1} = -x p_j - j p_{j-1}.
template <typename Scalar>
Scalar std_derivative(Scalar x, int k) {
  Scalar prev = std_phi(x);
  if (k == 0) return prev;
  Scalar cur = -x * prev;
  for (int j = 1; j < k; ++j) {
    Scalar next = -x * cur - Scalar(j) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

// I_K(x) = int_x^inf (z - x)^{K-1}/(K-1)! phi_1(z) dz, K >= 1. The family obeys
//   x I_j + j I_{j+1} = I_{j-1},  I_0 = phi_1, I_1 = tail.
// Its second solution is (-1)^j I_j(-x). For x below a small threshold the two
// are comparable and the forward recurrence is used; otherwise I_j is the
// minimal solution and is obtained by backward (Miller) recurrence normalized
// to the Gaussian tail, with the start index doubled until the value settles.
template <typename Scalar>
Scalar std_tail_integral(Scalar x, int K) {
  if (K == 1) return std_tail(x);
  if (x < Scalar(0.5)) {
    Scalar prev = std_phi(x);
    Scalar cur = std_tail(x);
    for (int j = 1; j < K; ++j) {
      Scalar next = (prev - x * cur) / Scalar(j);
      prev = cur;
      cur = next;
    }
    return cur;
  }

  constexpr Scalar kBig = Scalar(1e200);
  auto miller = [&](int start) {
    Scalar above = 0;  // f_{j+1}
    Scalar cur = 1;    // f_j, j = start
    Scalar kept = (start == K) ? cur : Scalar(0);
    int kept_exp = 0;  // kept is scaled by kBig^{-kept_exp} relative to cur
    for (int j = start; j > 1; --j) {
      Scalar below = x * cur + Scalar(j) * above;  // f_{j-1}
      above = cur;
      cur = below;
      if (j - 1 == K) {
        kept = cur;
        kept_exp = 0;
      }
      if (std::abs(cur) > kBig) {
        cur /= kBig;
        above /= kBig;
        if (j - 1 <= K) ++kept_exp;
      }
    }
    // cur holds f_1.
    Scalar ratio = kept / cur;
    for (int e = 0; e < kept_exp; ++e) ratio /= kBig;
    return ratio * std_tail(x);
  };

  int start = K + 64;
  Scalar value = miller(start);
  for (int iter = 0; iter < 10; ++iter) {
    start *= 2;
    Scalar refined = miller(start);
    if (std::abs(refined - value) <= Scalar(1e-14) * std::abs(refined)) return refined;
    value = refined;
  }
  return value;
}

}  // namespace detail

/// Gaussian heat kernel phi_t(z) = (2 pi t)^{-1/2} exp(-z^2 / (2t)).
template <typename Scalar>
Scalar phi(Scalar t, Scalar z) {
  detail::require_positive_time(t);
  using std::sqrt;
  return detail::std_phi(z / sqrt(t)) / sqrt(t);
}

/// Gaussian upper tail int_y^inf phi_t(z) dz.
template <typename Scalar>
Scalar gaussian_tail(Scalar t, Scalar y) {
  detail::require_positive_time(t);
  using std::sqrt;
  return detail::std_tail(y / sqrt(t));
}

/// phi_t^{(k)}(y).
///
/// k >= 0: k-th derivative in y. k < 0: (-1)^{|k|} int_y^inf (z-y)^{|k|-1}/(|k|-1)! phi_t(z) dz.
/// The whole family satisfies d/dy phi^{(k)} = phi^{(k+1)} and the heat equation.
template <typename Scalar>
Scalar phi_k(Scalar t, Scalar y, KernelOrder order) {
  detail::require_positive_time(t);
  using std::sqrt;
  const int k = order.value();
  const Scalar s = sqrt(t);
  const Scalar x = y / s;
  if (k >= 0) return detail::std_derivative(x, k) * std::pow(s, -Scalar(k + 1));
  const int K = -k;
  const Scalar magnitude = detail::std_tail_integral(x, K) * std::pow(s, Scalar(K - 1));
  return (K % 2 == 0) ? magnitude : -magnitude;
}

template <typename Scalar>
Scalar phi_k(Scalar t, Scalar y, int k, int max_order = kDefaultMaxOrder) {
  return phi_k(t, y, KernelOrder(k, max_order));
}

/// a_{i,j}(y, y') = (-1)^{i-1} phi_t^{(j-i)}(y + y') + (-1)^{i+j} phi_t^{(j-i)}(y - y').
///
/// Indices are 1-based. Satisfies d/dy a_{i,j} = -a_{i-1,j} and
/// a_{i,j}(y, y') = -int_{y'}^inf a_{i,j+1}(y, u) du.
template <typename Scalar>
Scalar a_kernel(Scalar t, int i, int j, Scalar y, Scalar y_end,
                int max_order = kDefaultMaxOrder) {
  const KernelOrder order(j - i, max_order);
  const Scalar plus = phi_k(t, y + y_end, order);
  const Scalar minus = phi_k(t, y - y_end, order);
  const Scalar s1 = ((i - 1) % 2 == 0) ? Scalar(1) : Scalar(-1);
  const Scalar s2 = ((i + j) % 2 == 0) ? Scalar(1) : Scalar(-1);
  return s1 * plus + s2 * minus;
}

}  // namespace dyson
