#pragma once

#include <variant>
#include <vector>

#include "dce_sphere/spectrum.hpp"

namespace dce {

/// r_beta(t) = r_beta0 (1 + epsilon sin(varpi t)) on [0, T]; the shell rests
/// at r_beta0 before t = 0 and stops suddenly at t = T.
struct SinusoidalMotion {
  double epsilon = 0;
  double varpi = 0;
  double duration = 0;
  double r_beta0 = 0;
};

/// Samples (t_k, r_k, rdot_k) with t_0 = 0, joined by cubic Hermite pieces.
/// The shell is at rest outside [t_0, t_last].
struct SampledTrajectory {
  std::vector<double> t;
  std::vector<double> r;
  std::vector<double> rdot;
};

/// Law of motion of the moving shell.
class MotionProfile {
 public:
  MotionProfile(SinusoidalMotion m);
  MotionProfile(SampledTrajectory m);

  double radius(double t) const;
  double velocity(double t) const;
  double duration() const;
  /// Times in [0, T] where the velocity may be discontinuous or the sample
  /// interpolant changes piece, sorted, including 0 and T.
  std::vector<double> breakpoints() const;
  double max_speed() const;

  bool is_sinusoidal() const { return std::holds_alternative<SinusoidalMotion>(law_); }
  const SinusoidalMotion& sinusoidal() const { return std::get<SinusoidalMotion>(law_); }
  const SampledTrajectory& sampled() const { return std::get<SampledTrajectory>(law_); }

  /// r(T - t), only for sampled trajectories.
  MotionProfile reversed() const;

  /// Throws DomainError if the moving radius would reach the static shell
  /// or become non-positive anywhere on [0, T].
  void validate(const BoundaryConfig& config, const CavityGeometry& geom) const;

 private:
  std::variant<SinusoidalMotion, SampledTrajectory> law_;
};

/// Uniformly sampled copy of a sinusoidal law (samples per drive period).
SampledTrajectory sample_motion(const SinusoidalMotion& m, int samples_per_period);

/// Speed above which the perturbative (slow-boundary) regime is doubtful.
inline constexpr double kSpeedWarning = 0.1;

}  // namespace dce
