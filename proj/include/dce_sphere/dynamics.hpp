#pragma once

#include <complex>
#include <map>
#include <string>
#include <utility>

#include "dce_sphere/coupling.hpp"
#include "dce_sphere/motion.hpp"

namespace dce {

/// Omega_ls(t) = integral_0^t omega_ls(t1) dt1 along the motion.
double phase_integral(const BoundaryConfig& config, int l, int s,
                      const MotionProfile& motion, double t,
                      const CavityGeometry& geom, double rel_tol = 1e-9);

/// Finite-duration response of a mode pair to a drive at varpi:
///   f = [e^{i(v-w)T} - 1] / [i(v-w)T] - [e^{-i(v+w)T} - 1] / [i(v+w)T],
/// with both removable singularities replaced by their limits.
struct DetuningResponse {
  std::complex<double> value;
};

DetuningResponse detuning_response(double varpi, double omega_pair, double duration);
DetuningResponse detuning(int l, int s, int s_prime, double varpi, double duration,
                          const BoundaryConfig& config, const CavityGeometry& geom);

struct ParticleEstimate {
  double value = 0;
  /// Sinusoidal: N(s_max) - N(max(s, s_max/2, resonant s')). General: |N(h) - N(h/2)|.
  double error_estimate = 0;
  int s_max = 0;
  std::string method;
  int time_nodes = 0;
};

inline constexpr double kDefaultTailTolerance = 1e-2;

/// Perturbative particle number in mode (l, s) for sinusoidal motion,
/// summing s' = 1..s_max. Throws NumericalFailure when the truncation
/// estimate exceeds tail_tol * N.
ParticleEstimate particles_sinusoidal(const BoundaryConfig& config, int l, int s,
                                      const SinusoidalMotion& motion,
                                      const CavityGeometry& geom,
                                      int s_max = kDefaultCouplingSmax,
                                      double tail_tol = kDefaultTailTolerance);

/// (epsilon w_ss' T / 2)^2 |C_(ss')|^2 at varpi = w_ss'.
double particles_resonant(const BoundaryConfig& config, int l, int s, int s_prime,
                          double epsilon, double duration, const CavityGeometry& geom);

struct GeneralOptions {
  int nodes_per_panel = 8;
  /// Panels per shortest period of the integrand phase.
  double panels_per_period = 8;
  /// Allowed relative change when the panels are halved.
  double resolution_tol = 1e-3;
  bool verify_resolution = true;
};

/// Direct time integration of
///   N = sum_s' | integral_0^T mu_(s's)(t) exp{i[Omega_s'(t) + Omega_s(t)]} dt |^2
/// for any motion profile.
ParticleEstimate particles_general(const BoundaryConfig& config, int l, int s,
                                   const MotionProfile& motion,
                                   const CavityGeometry& geom, int s_max,
                                   const GeneralOptions& options = {});

/// Thin-gap limit: DD  e^2 pi^2 T^2 r_b^2 s s' / (4 d^4),
///                 mixed e^2 pi^2 T^2 r_b^2 (2s-1)(2s'-1) / (16 d^4).
double particles_asymptotic(const BoundaryConfig& config, int s, int s_prime,
                            double epsilon, double duration, const CavityGeometry& geom);

/// Expected particle numbers per (l, s); identical for every m.
struct ParticleSpectrum {
  BoundaryConfig config;
  CavityGeometry geometry;
  std::string method;
  std::map<std::pair<int, int>, ParticleEstimate> values;

  /// (2l+1) N_ls: total over the m-degenerate modes.
  double multiplicity_total(int l, int s) const;
  double total() const;
};

}  // namespace dce
