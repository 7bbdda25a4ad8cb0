#pragma once

// Normalized radial eigenfunctions
//
//     F_ls(r) = norm * [coeff_j j_l(w r) + coeff_n n_l(w r)],
//     integral_{r_i}^{r_o} r^2 F_ls(r)^2 dr = 1,
//
// their total derivative with respect to the moving radius, and radial
// integrals over the cavity with the r^2 measure.

#include <Eigen/Dense>
#include <vector>

#include "dce_sphere/spectrum.hpp"

namespace dce {

inline constexpr int kDefaultRadialOrder = 64;
inline constexpr int kMaxRadialOrder = 4096;
inline constexpr double kRadialConvergenceTol = 1e-10;

struct RadialMode {
  BoundaryConfig config;
  CavityGeometry geometry;
  int l = 0;
  int s = 1;
  double omega = 0;
  double domega_dr_beta = 0;
  double coeff_j = 0;
  double coeff_n = 0;
  double norm = 0;

  double operator()(double r) const;
  /// dF/dr at fixed geometry.
  double derivative(double r) const;
  /// Unnormalized combination coeff_j j + coeff_n n at r.
  double unnormalized(double r) const;
};

/// Mode built from an already solved frequency.
RadialMode radial_mode(const BoundaryConfig& config, const ModeFrequency& freq,
                       const CavityGeometry& geom);
RadialMode radial_mode(const BoundaryConfig& config, int l, int s,
                       const CavityGeometry& geom);

/// integral r^2 F_a F_b dr; throws DomainError for mismatched (config,
/// geometry, l) and NumericalFailure if the Gauss-Legendre order doubling
/// does not settle below kRadialConvergenceTol.
double mode_inner_product(const RadialMode& a, const RadialMode& b);

/// dF_ls(r)/dr_beta at fixed r, with omega, the coefficients and the norm all
/// following the moving radius:
///
///     dF = a_j j(w r) + a_n n(w r) + w_beta r [b_j j'(w r) + b_n n'(w r)].
struct ModeDerivative {
  int l = 0;
  double omega = 0;
  double a_j = 0, a_n = 0;
  double b_j = 0, b_n = 0;
  double omega_beta = 0;

  double operator()(double r) const;
};

ModeDerivative dmode_dr_beta(const RadialMode& mode);
ModeDerivative dmode_dr_beta(const BoundaryConfig& config, int l, int s,
                             const CavityGeometry& geom);

/// integral r^2 F_ls dF_ls'/dr_beta dr; exactly zero for s == s'.
double overlap_dr_beta(const BoundaryConfig& config, int l, int s, int s_prime,
                       const CavityGeometry& geom);

/// The first s_max modes of one (config, l, geometry) with their radial
/// Gram and overlap matrices evaluated on a common converged rule:
///   gram(a, b)    = integral r^2 F_a F_b dr
///   overlap(a, b) = integral r^2 F_a dF_b/dr_beta dr
struct ModeSet {
  BoundaryConfig config;
  CavityGeometry geometry;
  int l = 0;
  std::vector<RadialMode> modes;
  std::vector<ModeDerivative> derivatives;
  Eigen::VectorXd omega;
  Eigen::VectorXd domega_dr_beta;
  Eigen::MatrixXd gram;
  Eigen::MatrixXd overlap;
  int quadrature_order = 0;

  int size() const { return static_cast<int>(modes.size()); }
};

ModeSet build_mode_set(const BoundaryConfig& config, int l, int s_max,
                       const CavityGeometry& geom);

}  // namespace dce
