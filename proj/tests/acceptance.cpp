#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dce_sphere/bessel.hpp"
#include "dce_sphere/dynamics.hpp"
#include "dce_sphere/error.hpp"
#include "dce_sphere/modes.hpp"
#include "dce_sphere/quadrature.hpp"

using namespace dce;
using std::numbers::pi;

namespace {

#include "reference_data.inc"

const BoundaryConfig kDD = BoundaryConfig::dirichlet(Shell::Outer);
const BoundaryConfig kDDInner = BoundaryConfig::dirichlet(Shell::Inner);
const BoundaryConfig kND = BoundaryConfig::neumann_inner();
const BoundaryConfig kDN = BoundaryConfig::neumann_outer();

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome one_dimensional_limit() {
  double worst = 0;
  for (const CavityGeometry g : {CavityGeometry{1, 2}, CavityGeometry{0.3, 5.1},
                                 CavityGeometry{100, 101}, CavityGeometry{1, 1.001},
                                 CavityGeometry{2, 50}, CavityGeometry{1e-2, 7}}) {
    for (const auto& m : solve_frequencies(kDD, 0, 10, g)) {
      const double exact = m.s * pi / g.width();
      worst = std::max(worst, std::abs(m.omega - exact) / exact);
    }
  }
  return {worst < 1e-10, fmt("max rel err %.2e over 6 geometries, s <= 10", worst)};
}

Outcome curve_family(int family, const BoundaryConfig& config) {
  double worst = 0;
  int n = 0, clipped = 0;
  std::string miss;
  for (const auto& p : kCurveSamples) {
    if (p.family != family) continue;
    if (p.clipped) {
      ++clipped;
      continue;
    }
    const MapPoint got = frequency_map_point(config, p.l, p.s, p.x);
    const double err = got.ok ? std::abs(got.y - p.y) : INFINITY;
    if (err > worst) {
      worst = err;
      miss = fmt("(l=%d s=%d x=%g)", p.l, p.s, p.x);
    }
    ++n;
  }
  return {worst < 2e-3, fmt("%d samples, max |dy| %.2e at %s; %d frame-clipped skipped", n, worst,
                            miss.c_str(), clipped)};
}

Outcome orthonormality() {
  double worst = 0;
  for (const auto& c : {kDD, kND, kDN})
    for (double ratio : {1.1, 2.0, 10.0})
      for (int l = 0; l <= 5; ++l) {
        const ModeSet set = build_mode_set(c, l, 8, CavityGeometry{1, ratio});
        worst = std::max(worst, (set.gram - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff());
      }
  return {worst < 1e-8, fmt("max |<ls|ls'> - delta| %.2e", worst)};
}

// Extended-precision reference for the finite differences. With double
// roots the central difference at h = 1e-6 r_beta loses about
// omega / (r_beta |domega/dr_beta|) * 1e-10 in relative accuracy, which
// exceeds 1e-5 for modes that barely reach the moving shell.
using Ld = long double;

Ld characteristic_ld(const BoundaryConfig& c, int l, Ld w, const CavityGeometry& g) {
  if (!c.mixed()) {
    const auto a = spherical_bessel<Ld>(l, w * Ld(g.r_inner));
    const auto b = spherical_bessel<Ld>(l, w * Ld(g.r_outer));
    return a.j * b.n - b.j * a.n;
  }
  const auto d = spherical_bessel<Ld>(l, w * Ld(g.radius(c.moving)));
  const auto n = spherical_bessel<Ld>(l, w * Ld(g.radius(c.neumann_shell())));
  return n.jp * d.n - d.j * n.np;
}

// Polishes the double root to long double by bisection.
Ld root_ld(const BoundaryConfig& c, int l, int s, const CavityGeometry& g) {
  const Ld w0 = solve_frequency(c, l, s, g, 1e-15).omega;
  Ld lo = w0 * (1 - 1e-12L), hi = w0 * (1 + 1e-12L);
  Ld flo = characteristic_ld(c, l, lo, g);
  if (flo * characteristic_ld(c, l, hi, g) > 0) throw NumericalFailure("reference root not bracketed");
  for (int k = 0; k < 80; ++k) {
    const Ld mid = (lo + hi) / 2;
    const Ld fm = characteristic_ld(c, l, mid, g);
    if (fm * flo > 0) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return (lo + hi) / 2;
}

// Unit-norm mode vanishing on the moving (Dirichlet) shell.
struct ReferenceMode {
  int l;
  Ld w, rd, a;
  Ld operator()(Ld r) const {
    const auto d = spherical_bessel<Ld>(l, w * rd);
    const auto b = spherical_bessel<Ld>(l, w * r);
    return a * (d.n * b.j - d.j * b.n);
  }
};

ReferenceMode reference_mode(const BoundaryConfig& c, int l, int s, const CavityGeometry& g) {
  ReferenceMode m{l, root_ld(c, l, s, g), Ld(g.radius(c.moving)), 1};
  const GaussLegendreRule<Ld> rule(32);
  const int panels = 16;
  const Ld h = (Ld(g.r_outer) - Ld(g.r_inner)) / panels;
  Ld sum = 0;
  for (int p = 0; p < panels; ++p) {
    const Ld a = Ld(g.r_inner) + p * h;
    sum += rule.integrate([&](Ld r) { return r * r * m(r) * m(r); }, a, a + h);
  }
  m.a = 1 / std::sqrt(sum);
  return m;
}

Outcome derivative_oracle() {
  std::mt19937 rng(20261014);
  const BoundaryConfig configs[] = {kDD, kDDInner, kND, kDN};
  std::uniform_int_distribution<int> pick_config(0, 3), pick_l(0, 6), pick_s(1, 5);
  std::uniform_real_distribution<double> pick_ri(0.5, 2.0), pick_log_ratio(std::log(1.1),
                                                                           std::log(10.0));
  double worst_w = 0, worst_f = 0;
  std::string where;
  for (int k = 0; k < 50; ++k) {
    const BoundaryConfig& c = configs[pick_config(rng)];
    const int l = pick_l(rng), s = pick_s(rng);
    const double ri = pick_ri(rng);
    const CavityGeometry g{ri, ri * std::exp(pick_log_ratio(rng))};
    const double rb = g.radius(c.moving);
    const double h = 1e-6 * rb;
    const CavityGeometry up = g.with_radius(c.moving, rb + h);
    const CavityGeometry dn = g.with_radius(c.moving, rb - h);

    const double an = domega_dr_beta(c, l, s, g);
    const ReferenceMode mu = reference_mode(c, l, s, up);
    const ReferenceMode md = reference_mode(c, l, s, dn);
    const double fd = static_cast<double>((mu.w - md.w) / (2 * Ld(h)));
    const double ew = std::abs(an - fd) / std::abs(an);

    // Overall sign of the reference follows the library mode.
    const RadialMode m = radial_mode(c, l, s, g);
    const ReferenceMode m0 = reference_mode(c, l, s, g);
    const double probe = g.r_inner + 0.37 * g.width();
    const Ld sign = (m(probe) * static_cast<double>(m0(probe)) < 0) ? -1 : 1;
    const ModeDerivative d = dmode_dr_beta(c, l, s, g);
    double err = 0, scale = 0;
    for (int j = 1; j < 40; ++j) {
      const double r = g.r_inner + g.width() * j / 40.0;
      const double ref = static_cast<double>(sign * (mu(r) - md(r)) / (2 * Ld(h)));
      err = std::max(err, std::abs(d(r) - ref));
      scale = std::max(scale, std::abs(d(r)));
    }
    const double ef = err / scale;
    if (std::max(ew, ef) > std::max(worst_w, worst_f))
      where = fmt("%s l=%d s=%d r=(%g, %g)", c.legend().c_str(), l, s, g.r_inner, g.r_outer);
    worst_w = std::max(worst_w, ew);
    worst_f = std::max(worst_f, ef);
  }
  return {worst_w < 1e-5 && worst_f < 1e-5,
          fmt("50 tuples: domega max rel %.2e, dmode max rel %.2e; worst %s", worst_w, worst_f,
              where.c_str())};
}

Outcome resonance_intensities() {
  const CavityGeometry g{1, 2};
  const std::pair<int, int> panels[] = {{0, 1}, {0, 2}, {1, 1}};
  const BoundaryConfig series[] = {kDDInner, kDD, kDN, kND};
  const double eps = 1e-6;
  double worst_x = 0, worst_res = 0, worst_sin = 0;
  int n = 0;
  for (const auto& m : kMarkerSeries) {
    const auto [l, s] = panels[m.panel];
    const BoundaryConfig& c = series[m.series];
    const int smax = std::max<int>(kDefaultCouplingSmax, m.points.size() + 2);
    const CouplingMatrix cm = coupling_matrix(c, l, smax, g);
    for (std::size_t k = 0; k < m.points.size(); ++k) {
      const int sp = static_cast<int>(k) + 1;
      const double varpi = cm.omega(s - 1) + cm.omega(sp - 1);
      const double x = varpi * g.width() / pi;
      const double T = 2000 * pi / varpi;
      const double norm = std::pow(eps * varpi * T, 2);
      const double want = m.points[k].second / 4;
      const double res = particles_resonant(c, l, s, sp, eps, T, g) / norm;
      const double sin =
          particles_sinusoidal(c, l, s, {eps, varpi, T, g.radius(c.moving)}, g, smax).value / norm;
      worst_x = std::max(worst_x, std::abs(x - m.points[k].first));
      worst_res = std::max(worst_res, std::abs(res - want));
      worst_sin = std::max(worst_sin, std::abs(sin - want));
      ++n;
    }
  }
  return {worst_x < 2e-3 && worst_res < 2e-3 && worst_sin < 2e-3,
          fmt("%d markers: max |dx| %.2e, resonant max |dN| %.2e, full sum max |dN| %.2e", n,
              worst_x, worst_res, worst_sin)};
}

Outcome perturbative_vs_general() {
  const CavityGeometry g{1, 2};
  const double eps = 1e-3;
  const double varpi = 2 * solve_frequency(kDD, 0, 1, g).omega;
  const SinusoidalMotion sine{eps, varpi, 50 / varpi, g.r_outer};
  const auto p = particles_sinusoidal(kDD, 0, 1, sine, g);
  const auto q = particles_general(kDD, 0, 1, MotionProfile(sine), g, kDefaultCouplingSmax);
  const double rel = std::abs(q.value - p.value) / p.value;
  return {rel < 1e-2, fmt("perturbative %.6e, general %.6e, rel diff %.2e", p.value, q.value, rel)};
}

Outcome thin_gap_limits() {
  const CavityGeometry g{100, 101};
  const double eps = 1e-3;
  double worst_n = 0, worst_w = 0;
  for (const auto& c : {kDD, kDDInner, kND, kDN})
    for (int l = 0; l <= 2; ++l) {
      const CouplingMatrix cm = coupling_matrix(c, l, 2, g);
      for (int s = 1; s <= 2; ++s) {
        const double w = cm.omega(s - 1);
        worst_w = std::max(worst_w, std::abs(w / asymptotic_frequency(c, s, g) - 1));
        for (int sp = 1; sp <= 2; ++sp) {
          const double T = 1e-3 / (eps * (w + cm.omega(sp - 1)));
          const double n = particles_resonant(c, l, s, sp, eps, T, g);
          const double a = particles_asymptotic(c, s, sp, eps, T, g);
          worst_n = std::max(worst_n, std::abs(n / a - 1));
        }
      }
    }
  return {worst_n < 2e-2 && worst_w < 1e-2,
          fmt("max rel dev: N %.2e, omega %.2e", worst_n, worst_w)};
}

Outcome qualitative_claims() {
  const CavityGeometry g{1, 2};
  const double eps = 1e-3, T = 10.0;
  auto first = [&](const BoundaryConfig& c) { return particles_resonant(c, 0, 1, 1, eps, T, g); };
  const double dd = first(kDD) / first(kDDInner);
  const double mixed = first(kND) / first(kDN);
  double low_dd = INFINITY, low_mixed = INFINITY;
  for (int l = 0; l <= 5; ++l) {
    low_dd = std::min(low_dd, 2 * solve_frequency(kDD, l, 1, g).omega);
    for (const auto& c : {kND, kDN}) low_mixed = std::min(low_mixed, 2 * solve_frequency(c, l, 1, g).omega);
  }
  const bool ok = dd >= 3 && dd <= 5 && mixed >= 3 && mixed <= 5 && low_mixed < low_dd;
  return {ok, fmt("N outer/inner: DD %.4f, mixed %.4f; lowest resonance mixed %.5f < DD %.5f",
                  dd, mixed, low_mixed, low_dd)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 DD l=0 equally spaced roots", one_dimensional_limit},
      {"2 DD frequency curves", [] { return curve_family(0, kDD); }},
      {"3 Neumann-inner frequency curves", [] { return curve_family(1, kND); }},
      {"4 Neumann-outer frequency curves", [] { return curve_family(2, kDN); }},
      {"5 orthonormality", orthonormality},
      {"6 derivative oracle", derivative_oracle},
      {"7 resonance intensities", resonance_intensities},
      {"8 perturbative vs general", perturbative_vs_general},
      {"9 thin-gap limits", thin_gap_limits},
      {"10 outer/inner ratio and mixed frequencies", qualitative_claims},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  %-44s %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", name.c_str(),
                o.detail.c_str(), sec);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed ? 1 : 0;
}
