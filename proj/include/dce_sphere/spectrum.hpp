#pragma once

// Mode frequencies of a massless scalar field between two concentric shells
// (natural units, c = 1). A frequency omega_ls is the s-th positive zero,
// counted upward from omega = 0+, of the characteristic residual for angular
// index l.

#include <span>
#include <string>
#include <vector>

namespace dce {

enum class Boundary { Dirichlet, Neumann };
enum class Shell { Inner, Outer };

/// Which condition each shell imposes and which shell moves. Only
/// Dirichlet-Dirichlet and single-Neumann arrangements are supported, and the
/// Neumann shell is always static.
struct BoundaryConfig {
  Boundary inner = Boundary::Dirichlet;
  Boundary outer = Boundary::Dirichlet;
  Shell moving = Shell::Outer;

  static BoundaryConfig dirichlet(Shell moving) {
    return {Boundary::Dirichlet, Boundary::Dirichlet, moving};
  }
  /// Neumann on the static inner shell, Dirichlet on the moving outer shell.
  static BoundaryConfig neumann_inner() {
    return {Boundary::Neumann, Boundary::Dirichlet, Shell::Outer};
  }
  /// Dirichlet on the moving inner shell, Neumann on the static outer shell.
  static BoundaryConfig neumann_outer() {
    return {Boundary::Dirichlet, Boundary::Neumann, Shell::Inner};
  }

  bool mixed() const { return inner != outer; }
  Shell static_shell() const {
    return moving == Shell::Inner ? Shell::Outer : Shell::Inner;
  }
  /// Shell carrying the Neumann condition; only meaningful when mixed().
  Shell neumann_shell() const {
    return inner == Boundary::Neumann ? Shell::Inner : Shell::Outer;
  }

  /// Throws DomainError on two Neumann shells or a moving Neumann shell.
  void validate() const;

  /// Short tag: "DD", "ND" or "DN" (inner letter first).
  std::string tag() const;
  /// Legend label with a combining tilde on the moving shell, e.g. "DD̃".
  std::string legend() const;

  friend bool operator==(const BoundaryConfig&, const BoundaryConfig&) = default;
};

/// Equilibrium shell radii, r_outer > r_inner > 0.
struct CavityGeometry {
  double r_inner = 1.0;
  double r_outer = 2.0;

  void validate() const;
  double width() const { return r_outer - r_inner; }
  double radius(Shell shell) const {
    return shell == Shell::Inner ? r_inner : r_outer;
  }
  CavityGeometry with_radius(Shell shell, double r) const {
    CavityGeometry g = *this;
    (shell == Shell::Inner ? g.r_inner : g.r_outer) = r;
    return g;
  }
  CavityGeometry scaled(double lambda) const {
    return {lambda * r_inner, lambda * r_outer};
  }
};

struct ModeFrequency {
  int l = 0;
  int s = 1;
  double omega = 0;
  /// d omega / d r_beta for the configuration's moving shell.
  double domega_dr_beta = 0;
};

inline constexpr double kDefaultRootTolerance = 1e-12;

/// Raw residual: for DD, j(w r_o) n(w r_i) - j(w r_i) n(w r_o); for mixed,
/// d_{r_a} j(w r_a) n(w r_b) - j(w r_b) d_{r_a} n(w r_a), with r_a the
/// Neumann radius and d_{r_a} f(w r_a) = w f'(w r_a).
double characteristic(const BoundaryConfig& config, int l, double omega,
                      const CavityGeometry& geom);

/// The residual divided by a positive envelope (products of hypot(j, n) or
/// hypot(j', n')), so it stays O(1) while keeping every zero and sign.
double characteristic_scaled(const BoundaryConfig& config, int l, double omega,
                             const CavityGeometry& geom);

/// First s_max roots in increasing order, refined by bisection to
/// |d omega| / omega <= tol. Throws RootScanFailure if the scan bound is
/// reached early and NumericalFailure on a degenerate root.
std::vector<ModeFrequency> solve_frequencies(const BoundaryConfig& config, int l,
                                             int s_max, const CavityGeometry& geom,
                                             double tol = kDefaultRootTolerance);

ModeFrequency solve_frequency(const BoundaryConfig& config, int l, int s,
                              const CavityGeometry& geom,
                              double tol = kDefaultRootTolerance);

/// Implicit derivative -G_{r_beta} / G_omega of a root omega of the residual.
double domega_dr_beta(const BoundaryConfig& config, int l, double omega,
                      const CavityGeometry& geom);
double domega_dr_beta(const BoundaryConfig& config, int l, int s,
                      const CavityGeometry& geom);

/// One-dimensional limit: s pi / d for DD, (s - 1/2) pi / d for mixed.
double asymptotic_frequency(const BoundaryConfig& config, int s,
                            const CavityGeometry& geom);

/// Number of sign changes of characteristic_scaled on a uniform grid of
/// the given step over [omega_lo, omega_hi].
int count_sign_changes(const BoundaryConfig& config, int l, double omega_lo,
                       double omega_hi, double step, const CavityGeometry& geom);

struct MapPoint {
  double x = 0;  ///< omega r_i / pi
  double y = 0;  ///< omega r_o / pi
  bool ok = false;
  std::string error;
};

/// Samples of the (l, s) frequency curve at the requested abscissae
/// x = omega r_i / pi. The map depends only on r_o / r_i; each point solves
/// for the ratio whose s-th root lands on x. Abscissae <= 0 are evaluated at
/// kMapZeroAbscissa. Failures are recorded per point.
inline constexpr double kMapZeroAbscissa = 1e-3;
std::vector<MapPoint> frequency_map(const BoundaryConfig& config, int l, int s,
                                    std::span<const double> abscissae);
MapPoint frequency_map_point(const BoundaryConfig& config, int l, int s, double x);

}  // namespace dce
