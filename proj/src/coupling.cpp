#include "dce_sphere/coupling.hpp"

#include <cmath>

#include "dce_sphere/error.hpp"

namespace dce {

CouplingMatrix coupling_matrix(const ModeSet& modes) {
  const int n = modes.size();
  CouplingMatrix c;
  c.config = modes.config;
  c.geometry = modes.geometry;
  c.l = modes.l;
  c.omega = modes.omega;
  c.domega_dr_beta = modes.domega_dr_beta;
  c.entries.resize(n, n);
  c.velocity.resize(n, n);
  const double rb = modes.geometry.radius(modes.config.moving);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a == b) {
        const double diag = modes.domega_dr_beta(a) / (2 * modes.omega(a));
        c.velocity(a, b) = diag;
        c.entries(a, b) = rb * diag;
      } else {
        const double ratio = std::sqrt(modes.omega(a) / modes.omega(b));
        c.velocity(a, b) = ratio * modes.overlap(b, a);
        c.entries(a, b) = -rb * ratio * modes.overlap(a, b);
      }
    }
  }
  if (!c.entries.allFinite() || !c.velocity.allFinite()) {
    throw NumericalFailure("coupling matrix has non-finite entries");
  }
  return c;
}

CouplingMatrix coupling_matrix(const BoundaryConfig& config, int l, int s_max,
                               const CavityGeometry& geom) {
  return coupling_matrix(build_mode_set(config, l, s_max, geom));
}

double coupling_C(const BoundaryConfig& config, int l, int s, int s_prime,
                  const CavityGeometry& geom) {
  if (s < 1 || s_prime < 1) throw DomainError("radial indices must be >= 1");
  return coupling_matrix(config, l, std::max(s, s_prime), geom).at(s, s_prime);
}

MuCoefficient mu(int l, int s, int s_prime, double t, const MotionProfile& motion,
                 const BoundaryConfig& config, const CavityGeometry& geom) {
  if (s < 1 || s_prime < 1) throw DomainError("radial indices must be >= 1");
  const CavityGeometry now = geom.with_radius(config.moving, motion.radius(t));
  now.validate();
  const double speed = motion.velocity(t);
  MuCoefficient out;
  out.l = l;
  out.s = s;
  out.s_prime = s_prime;
  out.t = t;
  if (speed == 0.0) return out;
  const CouplingMatrix c = coupling_matrix(config, l, std::max(s, s_prime), now);
  const double forward = speed * c.velocity(s - 1, s_prime - 1);
  const double backward = speed * c.velocity(s_prime - 1, s - 1);
  out.value = forward;
  out.symmetric = 0.5 * (forward + backward);
  out.antisymmetric = 0.5 * (forward - backward);
  return out;
}

}  // namespace dce
