#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "dce_sphere/error.hpp"

namespace dce {

/// Gauss-Legendre nodes and weights on [-1, 1].
///
/// Construction validates that the rule integrates x^k exactly for every
/// k <= 2n - 1 (to a few ulps); a rule that fails throws NumericalFailure.
template <typename Scalar>
class GaussLegendreRule {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  explicit GaussLegendreRule(int order) : order_(order) {
    if (order < 1) throw DomainError("Gauss-Legendre order must be >= 1");
    nodes_.resize(order);
    weights_.resize(order);
    const Scalar eps = Scalar(8) * std::numeric_limits<Scalar>::epsilon();
    for (int i = 0; i < (order + 1) / 2; ++i) {
      using std::abs;
      using std::cos;
      Scalar x = cos(Scalar(std::numbers::pi) * (Scalar(i) + Scalar(0.75)) /
                     (Scalar(order) + Scalar(0.5)));
      Scalar dp = Scalar(0);
      for (int iter = 0; iter < 100; ++iter) {
        Scalar p;
        legendre(order, x, p, dp);
        const Scalar dx = p / dp;
        x -= dx;
        if (abs(dx) <= eps) break;
      }
      Scalar p;
      legendre(order, x, p, dp);
      const Scalar w = Scalar(2) / ((Scalar(1) - x * x) * dp * dp);
      nodes_(i) = -x;
      nodes_(order - 1 - i) = x;
      weights_(i) = w;
      weights_(order - 1 - i) = w;
    }
    validate();
  }

  int order() const { return order_; }
  const Vector& nodes() const { return nodes_; }
  const Vector& weights() const { return weights_; }

  /// Nodes mapped affinely onto [a, b].
  Vector nodes_on(Scalar a, Scalar b) const {
    const Scalar half = (b - a) / Scalar(2), mid = (a + b) / Scalar(2);
    return (nodes_.array() * half + mid).matrix();
  }
  Vector weights_on(Scalar a, Scalar b) const {
    return weights_ * ((b - a) / Scalar(2));
  }

  /// Integral of f over [a, b] with this rule.
  template <typename F>
  Scalar integrate(F&& f, Scalar a, Scalar b) const {
    const Scalar half = (b - a) / Scalar(2), mid = (a + b) / Scalar(2);
    Scalar sum = Scalar(0);
    for (int i = 0; i < order_; ++i) sum += weights_(i) * f(mid + half * nodes_(i));
    return sum * half;
  }

  /// S with (S f)_k = integral from -1 to x_k of the degree n-1 interpolant
  /// of f through the nodes. Built from the discrete Legendre transform and
  /// the antiderivative identity (2m+1) int P_m = P_{m+1} - P_{m-1}.
  Matrix cumulative_matrix() const {
    const int n = order_;
    Matrix P(n + 1, n);  // P(m, k) = P_m(x_k)
    for (int k = 0; k < n; ++k) {
      const Scalar x = nodes_(k);
      P(0, k) = Scalar(1);
      if (n >= 1) P(1, k) = x;
      for (int m = 1; m < n; ++m)
        P(m + 1, k) = (Scalar(2 * m + 1) * x * P(m, k) - Scalar(m) * P(m - 1, k)) /
                      Scalar(m + 1);
    }
    // Coefficients c = T f, T(m, k) = (2m+1)/2 w_k P_m(x_k).
    Matrix T(n, n);
    for (int m = 0; m < n; ++m)
      for (int k = 0; k < n; ++k)
        T(m, k) = Scalar(2 * m + 1) / Scalar(2) * weights_(k) * P(m, k);
    // Antiderivative values A(k, m) = int_{-1}^{x_k} P_m.
    Matrix A(n, n);
    for (int k = 0; k < n; ++k) {
      A(k, 0) = nodes_(k) + Scalar(1);
      for (int m = 1; m < n; ++m)
        A(k, m) = (P(m + 1, k) - P(m - 1, k)) / Scalar(2 * m + 1);
    }
    return A * T;
  }

 private:
  static void legendre(int n, Scalar x, Scalar& p, Scalar& dp) {
    Scalar p0 = Scalar(1), p1 = x;
    if (n == 0) {
      p = p0;
      dp = Scalar(0);
      return;
    }
    for (int k = 2; k <= n; ++k) {
      const Scalar p2 = (Scalar(2 * k - 1) * x * p1 - Scalar(k - 1) * p0) / Scalar(k);
      p0 = p1;
      p1 = p2;
    }
    p = p1;
    dp = Scalar(n) * (x * p1 - p0) / (x * x - Scalar(1));
  }

  void validate() const {
    using std::abs;
    Vector moments = Vector::Zero(2 * order_);
    for (int i = 0; i < order_; ++i) {
      Scalar power = Scalar(1);
      for (int k = 0; k < 2 * order_; ++k) {
        moments(k) += weights_(i) * power;
        power *= nodes_(i);
      }
    }
    const Scalar tol =
        Scalar(64) * Scalar(order_) * std::numeric_limits<Scalar>::epsilon();
    for (int k = 0; k < 2 * order_; ++k) {
      const Scalar exact = (k % 2 == 1) ? Scalar(0) : Scalar(2) / Scalar(k + 1);
      if (!(abs(moments(k) - exact) <= tol)) {
        throw NumericalFailure("Gauss-Legendre rule of order " +
                               std::to_string(order_) +
                               " failed moment check at degree " + std::to_string(k));
      }
    }
  }

  int order_;
  Vector nodes_;
  Vector weights_;
};

/// Shared, lazily built double-precision rule. Thread-safe; the returned
/// reference stays valid for the life of the program.
const GaussLegendreRule<double>& gauss_legendre(int order);

/// Cached cumulative_matrix() of gauss_legendre(order).
const Eigen::MatrixXd& gauss_legendre_cumulative(int order);

struct AdaptiveResult {
  double value = 0;
  double error_estimate = 0;
  int panels = 0;
};

/// Adaptive bisection with a 10/20-point Gauss-Legendre pair per panel.
/// Stops when the summed panel error is below max(rel_tol |I|, abs_tol).
template <typename F>
AdaptiveResult integrate_adaptive(F&& f, double a, double b, double rel_tol,
                                  double abs_tol = 0.0, int max_panels = 1 << 14) {
  const auto& lo = gauss_legendre(10);
  const auto& hi = gauss_legendre(20);
  struct Panel {
    double a, b, value, err;
  };
  auto eval = [&](double pa, double pb) {
    const double cheap = lo.integrate(f, pa, pb);
    const double fine = hi.integrate(f, pa, pb);
    return Panel{pa, pb, fine, std::abs(fine - cheap)};
  };
  std::vector<Panel> panels{eval(a, b)};
  for (;;) {
    double total = 0, err = 0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      total += panels[i].value;
      err += panels[i].err;
      if (panels[i].err > panels[worst].err) worst = i;
    }
    if (err <= std::max(rel_tol * std::abs(total), abs_tol)) {
      return {total, err, static_cast<int>(panels.size())};
    }
    if (static_cast<int>(panels.size()) >= max_panels) {
      throw NumericalFailure("adaptive quadrature: panel limit reached, error estimate " +
                             std::to_string(err) + " for value " + std::to_string(total));
    }
    const Panel p = panels[worst];
    const double mid = 0.5 * (p.a + p.b);
    panels[worst] = eval(p.a, mid);
    panels.push_back(eval(mid, p.b));
  }
}

}  // namespace dce
