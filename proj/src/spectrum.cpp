#include "dce_sphere/spectrum.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "dce_sphere/bessel.hpp"
#include "dce_sphere/error.hpp"
#include "dce_sphere/log.hpp"

namespace dce {

using std::numbers::pi;

void BoundaryConfig::validate() const {
  if (inner == Boundary::Neumann && outer == Boundary::Neumann) {
    throw DomainError("at most one shell may carry the Neumann condition");
  }
  const Boundary on_moving = moving == Shell::Inner ? inner : outer;
  if (on_moving == Boundary::Neumann) {
    throw DomainError(
        "the moving shell must be Dirichlet: a Neumann condition on a moving "
        "shell is not covered by the instantaneous-mode expansion");
  }
}

std::string BoundaryConfig::tag() const {
  std::string t;
  t += inner == Boundary::Dirichlet ? 'D' : 'N';
  t += outer == Boundary::Dirichlet ? 'D' : 'N';
  return t;
}

std::string BoundaryConfig::legend() const {
  static const char* const kTilde = "\xCC\x83";  // U+0303 combining tilde
  std::string out;
  out += inner == Boundary::Dirichlet ? 'D' : 'N';
  if (moving == Shell::Inner) out += kTilde;
  out += outer == Boundary::Dirichlet ? 'D' : 'N';
  if (moving == Shell::Outer) out += kTilde;
  return out;
}

void CavityGeometry::validate() const {
  if (!(r_inner > 0) || !(r_outer > r_inner) || !std::isfinite(r_outer)) {
    std::ostringstream os;
    os << "cavity radii must satisfy r_o > r_i > 0 (got r_i=" << r_inner
       << ", r_o=" << r_outer << ")";
    throw DomainError(os.str());
  }
}

namespace {

struct Radii {
  double alpha;  // Neumann (static) shell for mixed; inner for DD
  double beta;   // moving shell for mixed; outer for DD
};

Radii mixed_radii(const BoundaryConfig& c, const CavityGeometry& g) {
  return {g.radius(c.neumann_shell()), g.radius(c.moving)};
}

void check_omega(double omega) {
  if (!(omega > 0) || !std::isfinite(omega)) {
    throw DomainError("mode frequency must be positive and finite");
  }
}

// Components of (f / hypot(f, g), g / hypot(f, g)) without forming squares.
void unit_pair(double f, double g, double& uf, double& ug) {
  const double h = std::hypot(f, g);
  uf = f / h;
  ug = g / h;
}

double scan_upper_bound(int l, int s_max, const CavityGeometry& g) {
  const double d = g.width();
  const double s_term = (s_max + 1) * pi / d;
  const double l_term = std::sqrt(double(l) * (l + 1)) / g.r_inner;
  return 1.2 * std::hypot(s_term, l_term) + pi / d;
}

}  // namespace

double characteristic(const BoundaryConfig& config, int l, double omega,
                      const CavityGeometry& geom) {
  check_omega(omega);
  if (!config.mixed()) {
    const auto a = spherical_bessel(l, omega * geom.r_inner);
    const auto b = spherical_bessel(l, omega * geom.r_outer);
    return b.j * a.n - a.j * b.n;
  }
  const Radii r = mixed_radii(config, geom);
  const auto A = spherical_bessel(l, omega * r.alpha);
  const auto B = spherical_bessel(l, omega * r.beta);
  return omega * (A.jp * B.n - B.j * A.np);
}

double characteristic_scaled(const BoundaryConfig& config, int l, double omega,
                             const CavityGeometry& geom) {
  check_omega(omega);
  double ja, na, jb, nb;
  if (!config.mixed()) {
    const auto a = spherical_bessel(l, omega * geom.r_inner);
    const auto b = spherical_bessel(l, omega * geom.r_outer);
    unit_pair(a.j, a.n, ja, na);
    unit_pair(b.j, b.n, jb, nb);
    return jb * na - ja * nb;
  }
  const Radii r = mixed_radii(config, geom);
  const auto A = spherical_bessel(l, omega * r.alpha);
  const auto B = spherical_bessel(l, omega * r.beta);
  unit_pair(A.jp, A.np, ja, na);
  unit_pair(B.j, B.n, jb, nb);
  return ja * nb - jb * na;
}

double domega_dr_beta(const BoundaryConfig& config, int l, double omega,
                      const CavityGeometry& geom) {
  check_omega(omega);
  double g_omega, g_beta, scale;
  if (!config.mixed()) {
    const double ri = geom.r_inner, ro = geom.r_outer;
    const auto a = spherical_bessel(l, omega * ri);
    const auto b = spherical_bessel(l, omega * ro);
    const double t1 = ro * b.jp * a.n, t2 = ri * b.j * a.np;
    const double t3 = ri * a.jp * b.n, t4 = ro * a.j * b.np;
    g_omega = t1 + t2 - t3 - t4;
    scale = std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(t4);
    g_beta = config.moving == Shell::Outer ? omega * (b.jp * a.n - a.j * b.np)
                                           : omega * (b.j * a.np - a.jp * b.n);
  } else {
    const Radii r = mixed_radii(config, geom);
    const auto A = spherical_bessel(l, omega * r.alpha);
    const auto B = spherical_bessel(l, omega * r.beta);
    const double t1 = r.alpha * A.jpp() * B.n, t2 = r.beta * A.jp * B.np;
    const double t3 = r.beta * B.jp * A.np, t4 = r.alpha * B.j * A.npp();
    g_omega = t1 + t2 - t3 - t4;
    scale = std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(t4);
    g_beta = omega * (A.jp * B.np - B.jp * A.np);
  }
  if (!(std::abs(g_omega) > 1e-10 * scale)) {
    std::ostringstream os;
    os << "degenerate root at omega=" << omega << " (l=" << l << ", " << config.tag()
       << "): d residual / d omega vanishes relative to its terms";
    throw NumericalFailure(os.str());
  }
  return -g_beta / g_omega;
}

double domega_dr_beta(const BoundaryConfig& config, int l, int s,
                      const CavityGeometry& geom) {
  return solve_frequency(config, l, s, geom).domega_dr_beta;
}

std::vector<ModeFrequency> solve_frequencies(const BoundaryConfig& config, int l,
                                             int s_max, const CavityGeometry& geom,
                                             double tol) {
  config.validate();
  geom.validate();
  if (s_max < 1) throw DomainError("s_max must be >= 1");
  if (!(tol > 0)) throw DomainError("root tolerance must be positive");
  if (l < 0 || l > kDefaultBesselLmax) throw DomainError("l outside supported range");

  const double d = geom.width();
  const double step = pi / (8 * d);
  const double upper = scan_upper_bound(l, s_max, geom);
  auto residual = [&](double w) { return characteristic_scaled(config, l, w, geom); };

  std::vector<ModeFrequency> roots;
  roots.reserve(s_max);
  double lo = 1e-6 / d;
  double g_lo = residual(lo);
  while (!std::isfinite(g_lo) && lo < upper) {
    lo += step;
    g_lo = residual(lo);
  }
  while (static_cast<int>(roots.size()) < s_max) {
    if (lo > upper) {
      std::ostringstream os;
      os << "root scan for l=" << l << " (" << config.tag() << ", r_i=" << geom.r_inner
         << ", r_o=" << geom.r_outer << ") reached omega=" << upper << " with "
         << roots.size() << " of " << s_max << " roots";
      throw RootScanFailure(os.str(), static_cast<int>(roots.size()), s_max);
    }
    const double hi = lo + step;
    double g_hi = residual(hi);
    // Roots are located in (lo, hi]; an exact zero on the grid is taken as the
    // root and the scan resumes just past it.
    double root = -1;
    if (g_hi == 0.0) {
      root = hi;
      g_hi = residual(hi * (1 + 1e-9));
    } else if (std::isfinite(g_hi) && (g_lo < 0) != (g_hi < 0)) {
      double a = lo, b = hi, ga = g_lo;
      for (int it = 0; it < 200 && (b - a) > tol * a; ++it) {
        const double m = 0.5 * (a + b);
        const double gm = residual(m);
        if (gm == 0.0) {
          a = b = m;
          break;
        }
        if ((gm < 0) == (ga < 0)) {
          a = m;
          ga = gm;
        } else {
          b = m;
        }
      }
      root = 0.5 * (a + b);
    }
    if (root > 0) {
      ModeFrequency mf;
      mf.l = l;
      mf.s = static_cast<int>(roots.size()) + 1;
      mf.omega = root;
      mf.domega_dr_beta = domega_dr_beta(config, l, root, geom);
      roots.push_back(mf);
    }
    lo = hi;
    g_lo = g_hi;
  }
  return roots;
}

ModeFrequency solve_frequency(const BoundaryConfig& config, int l, int s,
                              const CavityGeometry& geom, double tol) {
  if (s < 1) throw DomainError("radial index s must be >= 1");
  return solve_frequencies(config, l, s, geom, tol).back();
}

double asymptotic_frequency(const BoundaryConfig& config, int s,
                            const CavityGeometry& geom) {
  geom.validate();
  if (s < 1) throw DomainError("radial index s must be >= 1");
  const double n = config.mixed() ? s - 0.5 : double(s);
  return n * pi / geom.width();
}

int count_sign_changes(const BoundaryConfig& config, int l, double omega_lo,
                       double omega_hi, double step, const CavityGeometry& geom) {
  if (!(step > 0) || !(omega_hi > omega_lo)) throw DomainError("invalid scan interval");
  int changes = 0;
  double prev = std::numeric_limits<double>::quiet_NaN();
  const long n = static_cast<long>(std::ceil((omega_hi - omega_lo) / step));
  for (long i = 0; i <= n; ++i) {
    const double w = std::min(omega_lo + i * step, omega_hi);
    const double g = characteristic_scaled(config, l, w, geom);
    if (!std::isfinite(g) || g == 0.0) continue;
    if (std::isfinite(prev) && (prev < 0) != (g < 0)) ++changes;
    prev = g;
  }
  return changes;
}

MapPoint frequency_map_point(const BoundaryConfig& config, int l, int s, double x) {
  MapPoint pt;
  const double x_eval = x > 0 ? x : kMapZeroAbscissa;
  pt.x = x;
  try {
    config.validate();
    const double target = pi * x_eval;
    // With r_i = 1 the s-th root w(rho) decreases monotonically in
    // rho = r_o / r_i, from +inf at rho -> 1 to 0 as rho -> inf.
    auto w = [&](double gap) {
      return solve_frequency(config, l, s, CavityGeometry{1.0, 1.0 + gap}).omega;
    };
    double gap_lo = std::min(0.5, s / (2.0 * x_eval + 1.0));
    while (w(gap_lo) <= target) {
      gap_lo *= 0.5;
      if (gap_lo < 1e-12) throw NumericalFailure("could not bracket the map point");
    }
    double gap_hi = 2 * gap_lo;
    while (w(gap_hi) > target) {
      gap_hi *= 2;
      if (gap_hi > 1e12) throw NumericalFailure("could not bracket the map point");
    }
    for (int it = 0; it < 200 && (gap_hi - gap_lo) > 1e-14 * (1 + gap_hi); ++it) {
      const double mid = std::sqrt(gap_lo * gap_hi);
      const double m = (gap_hi / gap_lo > 1.5) ? mid : 0.5 * (gap_lo + gap_hi);
      if (w(m) > target) gap_lo = m; else gap_hi = m;
    }
    const double gap = 0.5 * (gap_lo + gap_hi);
    pt.y = x_eval * (1.0 + gap);
    pt.ok = true;
  } catch (const std::exception& e) {
    pt.ok = false;
    pt.error = e.what();
    log::warn("map point l=" + std::to_string(l) + " s=" + std::to_string(s) +
              " x=" + std::to_string(x) + " failed: " + e.what());
  }
  return pt;
}

std::vector<MapPoint> frequency_map(const BoundaryConfig& config, int l, int s,
                                    std::span<const double> abscissae) {
  std::vector<MapPoint> out;
  out.reserve(abscissae.size());
  for (double x : abscissae) out.push_back(frequency_map_point(config, l, s, x));
  return out;
}

}  // namespace dce
