#pragma once

// Mode-coupling coefficients of a moving shell. With the geometry frozen at
// its instantaneous value,
//
//   mu_ss'(t) = rdot_beta * velocity(s, s'),
//   velocity(s, s)  = (d w_s / d r_beta) / (2 w_s),
//   velocity(s, s') = sqrt(w_s / w_s') integral r^2 F_s' dF_s/dr_beta dr,
//
// and the static constants
//
//   C(s, s)  = r_beta (d w_s / d r_beta) / (2 w_s),
//   C(s, s') = -r_beta sqrt(w_s / w_s') integral r^2 F_s dF_s'/dr_beta dr.

#include <Eigen/Dense>

#include "dce_sphere/modes.hpp"
#include "dce_sphere/motion.hpp"

namespace dce {

inline constexpr int kDefaultCouplingSmax = 12;

struct CouplingMatrix {
  BoundaryConfig config;
  CavityGeometry geometry;
  int l = 0;
  Eigen::VectorXd omega;
  Eigen::VectorXd domega_dr_beta;
  /// C(s-1, s'-1), not symmetrized.
  Eigen::MatrixXd entries;
  /// mu / rdot_beta at this geometry, not symmetrized.
  Eigen::MatrixXd velocity;

  int size() const { return static_cast<int>(omega.size()); }
  double at(int s, int s_prime) const { return entries(s - 1, s_prime - 1); }
  /// C_(ss') = (C_ss' + C_s's) / 2.
  double symmetric(int s, int s_prime) const {
    return 0.5 * (at(s, s_prime) + at(s_prime, s));
  }
  Eigen::MatrixXd symmetrized() const {
    return 0.5 * (entries + entries.transpose());
  }
};

CouplingMatrix coupling_matrix(const ModeSet& modes);
CouplingMatrix coupling_matrix(const BoundaryConfig& config, int l, int s_max,
                               const CavityGeometry& geom);

/// Unsymmetrized C_lss'.
double coupling_C(const BoundaryConfig& config, int l, int s, int s_prime,
                  const CavityGeometry& geom);

struct MuCoefficient {
  int l = 0, s = 1, s_prime = 1;
  double t = 0;
  double value = 0;
  double symmetric = 0;
  double antisymmetric = 0;
};

/// mu_lss'(t) along the motion, evaluated at the instantaneous geometry.
MuCoefficient mu(int l, int s, int s_prime, double t, const MotionProfile& motion,
                 const BoundaryConfig& config, const CavityGeometry& geom);

}  // namespace dce
