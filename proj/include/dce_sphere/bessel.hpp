#pragma once

// Spherical Bessel functions j_l, n_l (first and second kind) and their
// derivatives for real positive arguments.
//
// n_l is generated by upward recurrence, which is stable for the second kind
// at every argument. j_l uses upward recurrence only in the oscillatory
// region x >= l + 1; below that it is produced by Miller's downward
// recurrence normalized with the sum rule
//
//     sum_k (2k + 1) j_k(x)^2 = 1,
//
// which has no zero crossings to divide by. Derivatives use
//
//     j_l'(x) = (l/x) j_l(x) - j_{l+1}(x),
//     n_l'(x) = n_{l-1}(x) - (l+1)/x n_l(x),   n_{-1}(x) = sin(x)/x,
//
// the forms without cancellation at small x for each kind.

#include <cmath>
#include <string>

#include "dce_sphere/error.hpp"

namespace dce {

inline constexpr int kDefaultBesselLmax = 30;

template <typename Scalar>
struct BesselEval {
  int l = 0;
  Scalar x = Scalar(0);
  Scalar j = Scalar(0);
  Scalar n = Scalar(0);
  Scalar jp = Scalar(0);
  Scalar np = Scalar(0);

  /// Second derivatives from the radial equation
  /// x^2 f'' + 2x f' + (x^2 - l(l+1)) f = 0.
  Scalar jpp() const { return second_derivative(j, jp); }
  Scalar npp() const { return second_derivative(n, np); }

 private:
  Scalar second_derivative(Scalar f, Scalar fp) const {
    const Scalar ll = Scalar(l) * Scalar(l + 1);
    return -Scalar(2) / x * fp - (Scalar(1) - ll / (x * x)) * f;
  }
};

namespace detail {

template <typename Scalar>
void check_bessel_args(int l, Scalar x, int l_max) {
  if (!(x > Scalar(0)) || !std::isfinite(static_cast<double>(x))) {
    throw DomainError("spherical Bessel: argument must be positive and finite");
  }
  if (l < 0 || l > l_max) {
    throw DomainError("spherical Bessel: order " + std::to_string(l) +
                      " outside [0, " + std::to_string(l_max) + "]");
  }
}

// Returns j_l(x) and j_{l+1}(x) through the out-parameters.
template <typename Scalar>
void first_kind_pair(int l, Scalar x, Scalar sin_x, Scalar cos_x, Scalar& j_l,
                     Scalar& j_l1) {
  using std::abs;
  using std::sqrt;
  if (x >= Scalar(l + 1)) {
    Scalar prev = cos_x / x;  // j_{-1}
    Scalar cur = sin_x / x;   // j_0
    for (int k = 0; k <= l; ++k) {
      const Scalar next = Scalar(2 * k + 1) / x * cur - prev;
      prev = cur;
      cur = next;
    }
    j_l = prev;
    j_l1 = cur;
    return;
  }

  // Miller: start far above both l and x where j_k is negligible.
  const int start = l + 1 + static_cast<int>(x) + 50;
  constexpr double kRescaleAt = 1e100;
  Scalar above = Scalar(0);     // f_{k+1}
  Scalar cur = Scalar(1e-30);   // f_k, k = start
  Scalar sum = Scalar(2 * start + 1) * cur * cur;
  Scalar stored_l = Scalar(0);
  Scalar stored_l1 = Scalar(0);
  Scalar f0 = Scalar(0);
  Scalar f1 = Scalar(0);
  for (int k = start; k >= 1; --k) {
    const Scalar below = Scalar(2 * k + 1) / x * cur - above;  // f_{k-1}
    above = cur;
    cur = below;
    const int idx = k - 1;
    sum += Scalar(2 * idx + 1) * cur * cur;
    if (idx == l + 1) stored_l1 = cur;
    if (idx == l) stored_l = cur;
    if (idx == 1) f1 = cur;
    if (abs(cur) > Scalar(kRescaleAt)) {
      const Scalar down = Scalar(1) / Scalar(kRescaleAt);
      cur *= down;
      above *= down;
      stored_l *= down;
      stored_l1 *= down;
      f1 *= down;
      sum *= down * down;
    }
  }
  f0 = cur;
  Scalar scale = Scalar(1) / sqrt(sum);
  // The sum rule fixes the magnitude only; take the sign from the j_0 or j_1
  // closed form, whichever is further from a zero.
  const Scalar j0 = sin_x / x;
  const Scalar j1 = sin_x / (x * x) - cos_x / x;
  if (abs(j0) >= abs(j1)) {
    if ((f0 < Scalar(0)) != (j0 < Scalar(0))) scale = -scale;
  } else {
    if ((f1 < Scalar(0)) != (j1 < Scalar(0))) scale = -scale;
  }
  j_l = stored_l * scale;
  j_l1 = stored_l1 * scale;
}

}  // namespace detail

/// j_l(x), n_l(x) and their x-derivatives in one pass.
template <typename Scalar>
BesselEval<Scalar> spherical_bessel(int l, Scalar x,
                                    int l_max = kDefaultBesselLmax) {
  using std::cos;
  using std::sin;
  detail::check_bessel_args(l, x, l_max);
  const Scalar sx = sin(x);
  const Scalar cx = cos(x);

  BesselEval<Scalar> out;
  out.l = l;
  out.x = x;

  Scalar n_prev = sx / x;   // n_{-1}
  Scalar n_cur = -cx / x;   // n_0
  for (int k = 0; k < l; ++k) {
    const Scalar next = Scalar(2 * k + 1) / x * n_cur - n_prev;
    n_prev = n_cur;
    n_cur = next;
  }
  out.n = n_cur;
  out.np = n_prev - Scalar(l + 1) / x * n_cur;

  Scalar j_l1;
  detail::first_kind_pair(l, x, sx, cx, out.j, j_l1);
  out.jp = Scalar(l) / x * out.j - j_l1;
  return out;
}

template <typename Scalar>
Scalar spherical_j(int l, Scalar x, int l_max = kDefaultBesselLmax) {
  return spherical_bessel(l, x, l_max).j;
}

template <typename Scalar>
Scalar spherical_n(int l, Scalar x, int l_max = kDefaultBesselLmax) {
  return spherical_bessel(l, x, l_max).n;
}

template <typename Scalar>
Scalar spherical_j_prime(int l, Scalar x, int l_max = kDefaultBesselLmax) {
  return spherical_bessel(l, x, l_max).jp;
}

template <typename Scalar>
Scalar spherical_n_prime(int l, Scalar x, int l_max = kDefaultBesselLmax) {
  return spherical_bessel(l, x, l_max).np;
}

}  // namespace dce
