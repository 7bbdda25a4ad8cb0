#include "dce_sphere/modes.hpp"

#include <cmath>
#include <sstream>

#include "dce_sphere/bessel.hpp"
#include "dce_sphere/error.hpp"
#include "dce_sphere/quadrature.hpp"

namespace dce {

namespace {

// Integral of f over [a, b] with Gauss-Legendre order doubling. Converged
// when consecutive estimates differ by at most tol * max(floor, sum |w f|).
template <typename F>
double converged_integral(F&& f, double a, double b, double floor, const char* what) {
  double previous = 0;
  bool have_previous = false;
  for (int order = kDefaultRadialOrder; order <= kMaxRadialOrder; order *= 2) {
    const auto& rule = gauss_legendre(order);
    const Eigen::VectorXd r = rule.nodes_on(a, b);
    const Eigen::VectorXd w = rule.weights_on(a, b);
    double sum = 0, l1 = 0;
    for (int i = 0; i < order; ++i) {
      const double v = w(i) * f(r(i));
      sum += v;
      l1 += std::abs(v);
    }
    if (have_previous &&
        std::abs(sum - previous) <= kRadialConvergenceTol * std::max(floor, l1)) {
      return sum;
    }
    previous = sum;
    have_previous = true;
  }
  throw NumericalFailure(std::string("radial quadrature did not converge: ") + what);
}

void check_same_family(const RadialMode& a, const RadialMode& b) {
  if (!(a.config == b.config) || a.l != b.l ||
      a.geometry.r_inner != b.geometry.r_inner ||
      a.geometry.r_outer != b.geometry.r_outer) {
    throw DomainError("inner product needs modes of the same (config, geometry, l)");
  }
}

}  // namespace

double RadialMode::unnormalized(double r) const {
  const auto b = spherical_bessel(l, omega * r);
  return coeff_j * b.j + coeff_n * b.n;
}

double RadialMode::operator()(double r) const { return norm * unnormalized(r); }

double RadialMode::derivative(double r) const {
  const auto b = spherical_bessel(l, omega * r);
  return norm * omega * (coeff_j * b.jp + coeff_n * b.np);
}

RadialMode radial_mode(const BoundaryConfig& config, const ModeFrequency& freq,
                       const CavityGeometry& geom) {
  config.validate();
  geom.validate();
  RadialMode m;
  m.config = config;
  m.geometry = geom;
  m.l = freq.l;
  m.s = freq.s;
  m.omega = freq.omega;
  m.domega_dr_beta = freq.domega_dr_beta;
  if (!config.mixed()) {
    const auto a = spherical_bessel(m.l, m.omega * geom.r_inner);
    m.coeff_j = a.n;
    m.coeff_n = -a.j;
  } else {
    const auto A = spherical_bessel(m.l, m.omega * geom.radius(config.neumann_shell()));
    m.coeff_j = m.omega * A.np;
    m.coeff_n = -m.omega * A.jp;
  }
  m.norm = 1.0;
  const double integral = converged_integral(
      [&](double r) {
        const double phi = m.unnormalized(r);
        return r * r * phi * phi;
      },
      geom.r_inner, geom.r_outer, 0.0, "normalization");
  if (!(integral > 0) || !std::isfinite(integral)) {
    throw NumericalFailure("mode normalization integral is not positive");
  }
  m.norm = 1.0 / std::sqrt(integral);
  return m;
}

RadialMode radial_mode(const BoundaryConfig& config, int l, int s,
                       const CavityGeometry& geom) {
  return radial_mode(config, solve_frequency(config, l, s, geom), geom);
}

double mode_inner_product(const RadialMode& a, const RadialMode& b) {
  check_same_family(a, b);
  return converged_integral([&](double r) { return r * r * a(r) * b(r); },
                            a.geometry.r_inner, a.geometry.r_outer, 1.0,
                            "mode inner product");
}

double ModeDerivative::operator()(double r) const {
  const auto b = spherical_bessel(l, omega * r);
  return a_j * b.j + a_n * b.n + omega_beta * r * (b_j * b.jp + b_n * b.np);
}

ModeDerivative dmode_dr_beta(const RadialMode& mode) {
  const BoundaryConfig& c = mode.config;
  const CavityGeometry& g = mode.geometry;
  const double w = mode.omega;
  const double wb = mode.domega_dr_beta;

  // Partial derivatives of the coefficients in omega and in the explicit
  // moving radius.
  double cj_w = 0, cn_w = 0, cj_r = 0, cn_r = 0;
  if (!c.mixed()) {
    const auto a = spherical_bessel(mode.l, w * g.r_inner);
    cj_w = g.r_inner * a.np;
    cn_w = -g.r_inner * a.jp;
    if (c.moving == Shell::Inner) {
      cj_r = w * a.np;
      cn_r = -w * a.jp;
    }
  } else {
    const double ra = g.radius(c.neumann_shell());
    const auto A = spherical_bessel(mode.l, w * ra);
    cj_w = A.np + w * ra * A.npp();
    cn_w = -A.jp - w * ra * A.jpp();
  }
  const double dcj = cj_r + cj_w * wb;
  const double dcn = cn_r + cn_w * wb;

  auto dphi = [&](double r) {
    const auto b = spherical_bessel(mode.l, w * r);
    return dcj * b.j + dcn * b.n + wb * r * (mode.coeff_j * b.jp + mode.coeff_n * b.np);
  };

  // d/dr_beta of integral r^2 phi^2 over [r_i, r_o]: Leibniz endpoint term
  // plus the interior term.
  const double rb = g.radius(c.moving);
  const double phi_b = mode.unnormalized(rb);
  const double endpoint = (c.moving == Shell::Outer ? 1.0 : -1.0) * rb * rb * phi_b * phi_b;
  const double interior = converged_integral(
      [&](double r) { return 2.0 * r * r * mode.unnormalized(r) * dphi(r); },
      g.r_inner, g.r_outer, 0.0, "norm derivative");
  const double N = mode.norm;
  const double dN = -0.5 * N * N * N * (endpoint + interior);

  ModeDerivative d;
  d.l = mode.l;
  d.omega = w;
  d.omega_beta = wb;
  d.a_j = dN * mode.coeff_j + N * dcj;
  d.a_n = dN * mode.coeff_n + N * dcn;
  d.b_j = N * mode.coeff_j;
  d.b_n = N * mode.coeff_n;
  return d;
}

ModeDerivative dmode_dr_beta(const BoundaryConfig& config, int l, int s,
                             const CavityGeometry& geom) {
  return dmode_dr_beta(radial_mode(config, l, s, geom));
}

double overlap_dr_beta(const BoundaryConfig& config, int l, int s, int s_prime,
                       const CavityGeometry& geom) {
  if (s == s_prime) return 0.0;
  const ModeSet set = build_mode_set(config, l, std::max(s, s_prime), geom);
  return set.overlap(s - 1, s_prime - 1);
}

ModeSet build_mode_set(const BoundaryConfig& config, int l, int s_max,
                       const CavityGeometry& geom) {
  ModeSet set;
  set.config = config;
  set.geometry = geom;
  set.l = l;
  const auto freqs = solve_frequencies(config, l, s_max, geom);
  set.omega.resize(s_max);
  set.domega_dr_beta.resize(s_max);
  for (int i = 0; i < s_max; ++i) {
    set.modes.push_back(radial_mode(config, freqs[i], geom));
    set.derivatives.push_back(dmode_dr_beta(set.modes.back()));
    set.omega(i) = freqs[i].omega;
    set.domega_dr_beta(i) = freqs[i].domega_dr_beta;
  }

  Eigen::MatrixXd prev_gram, prev_overlap;
  for (int order = kDefaultRadialOrder; order <= kMaxRadialOrder; order *= 2) {
    const auto& rule = gauss_legendre(order);
    const Eigen::VectorXd r = rule.nodes_on(geom.r_inner, geom.r_outer);
    const Eigen::VectorXd w =
        (rule.weights_on(geom.r_inner, geom.r_outer).array() * r.array().square()).matrix();
    Eigen::MatrixXd phi(order, s_max), dphi(order, s_max);
    for (int s = 0; s < s_max; ++s) {
      const RadialMode& m = set.modes[s];
      const ModeDerivative& dm = set.derivatives[s];
      for (int k = 0; k < order; ++k) {
        const auto b = spherical_bessel(l, m.omega * r(k));
        phi(k, s) = m.norm * (m.coeff_j * b.j + m.coeff_n * b.n);
        dphi(k, s) = dm.a_j * b.j + dm.a_n * b.n +
                     dm.omega_beta * r(k) * (dm.b_j * b.jp + dm.b_n * b.np);
      }
    }
    const Eigen::MatrixXd weighted = w.asDiagonal() * phi;
    Eigen::MatrixXd gram = weighted.transpose() * phi;
    Eigen::MatrixXd overlap = weighted.transpose() * dphi;
    if (prev_gram.size() != 0) {
      const double dg = (gram - prev_gram).cwiseAbs().maxCoeff();
      const double dov = (overlap - prev_overlap).cwiseAbs().maxCoeff();
      const double scale = std::max(1.0, overlap.cwiseAbs().maxCoeff());
      if (dg <= kRadialConvergenceTol && dov <= kRadialConvergenceTol * scale) {
        set.gram = std::move(gram);
        set.overlap = std::move(overlap);
        set.quadrature_order = order;
        return set;
      }
    }
    prev_gram = std::move(gram);
    prev_overlap = std::move(overlap);
  }
  std::ostringstream os;
  os << "radial matrices for l=" << l << " did not converge by order " << kMaxRadialOrder;
  throw NumericalFailure(os.str());
}

}  // namespace dce
