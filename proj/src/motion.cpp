#include "dce_sphere/motion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dce_sphere/error.hpp"

namespace dce {

namespace {

struct HermitePiece {
  double t0, h, r0, r1, v0, v1;

  double value(double t) const {
    const double u = (t - t0) / h;
    const double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * r0 + (u3 - 2 * u2 + u) * h * v0 +
           (-2 * u3 + 3 * u2) * r1 + (u3 - u2) * h * v1;
  }
  double slope(double t) const {
    const double u = (t - t0) / h;
    const double u2 = u * u;
    return ((6 * u2 - 6 * u) * r0 + (3 * u2 - 4 * u + 1) * h * v0 +
            (-6 * u2 + 6 * u) * r1 + (3 * u2 - 2 * u) * h * v1) /
           h;
  }
};

HermitePiece piece_at(const SampledTrajectory& s, double t) {
  auto it = std::upper_bound(s.t.begin(), s.t.end(), t);
  std::size_t k = it == s.t.begin() ? 0 : std::size_t(it - s.t.begin()) - 1;
  k = std::min(k, s.t.size() - 2);
  return {s.t[k], s.t[k + 1] - s.t[k], s.r[k], s.r[k + 1], s.rdot[k], s.rdot[k + 1]};
}

}  // namespace

MotionProfile::MotionProfile(SinusoidalMotion m) : law_(m) {
  if (!(m.duration >= 0) || !std::isfinite(m.epsilon) || !std::isfinite(m.varpi) ||
      !(m.r_beta0 > 0)) {
    throw DomainError("sinusoidal motion needs finite epsilon, varpi, T >= 0, r_beta0 > 0");
  }
  if (!(std::abs(m.epsilon) < 1)) throw DomainError("motion amplitude epsilon must be < 1");
}

MotionProfile::MotionProfile(SampledTrajectory m) : law_(std::move(m)) {
  const auto& s = sampled();
  if (s.t.size() < 2 || s.r.size() != s.t.size() || s.rdot.size() != s.t.size()) {
    throw DomainError("sampled trajectory needs >= 2 samples of (t, r, rdot)");
  }
  if (s.t.front() != 0.0) throw DomainError("sampled trajectory must start at t = 0");
  for (std::size_t k = 1; k < s.t.size(); ++k) {
    if (!(s.t[k] > s.t[k - 1])) throw DomainError("sample times must increase strictly");
  }
  for (std::size_t k = 0; k < s.t.size(); ++k) {
    if (!std::isfinite(s.r[k]) || !std::isfinite(s.rdot[k]) || !(s.r[k] > 0)) {
      throw DomainError("sampled radii must be positive and finite");
    }
  }
}

double MotionProfile::duration() const {
  if (is_sinusoidal()) return sinusoidal().duration;
  return sampled().t.back();
}

double MotionProfile::radius(double t) const {
  if (is_sinusoidal()) {
    const auto& m = sinusoidal();
    const double tc = std::clamp(t, 0.0, m.duration);
    return m.r_beta0 * (1 + m.epsilon * std::sin(m.varpi * tc));
  }
  const auto& s = sampled();
  if (t <= s.t.front()) return s.r.front();
  if (t >= s.t.back()) return s.r.back();
  return piece_at(s, t).value(t);
}

double MotionProfile::velocity(double t) const {
  if (is_sinusoidal()) {
    const auto& m = sinusoidal();
    if (t < 0 || t > m.duration) return 0.0;
    return m.r_beta0 * m.epsilon * m.varpi * std::cos(m.varpi * t);
  }
  const auto& s = sampled();
  if (t < s.t.front() || t > s.t.back()) return 0.0;
  return piece_at(s, t).slope(t);
}

std::vector<double> MotionProfile::breakpoints() const {
  if (is_sinusoidal()) return {0.0, sinusoidal().duration};
  return sampled().t;
}

double MotionProfile::max_speed() const {
  if (is_sinusoidal()) {
    const auto& m = sinusoidal();
    return std::abs(m.r_beta0 * m.epsilon * m.varpi);
  }
  double v = 0;
  for (double x : sampled().rdot) v = std::max(v, std::abs(x));
  return v;
}

MotionProfile MotionProfile::reversed() const {
  if (is_sinusoidal()) {
    throw DomainError("reversal is defined for sampled trajectories; sample the law first");
  }
  const auto& s = sampled();
  const double T = s.t.back();
  SampledTrajectory r;
  const std::size_t n = s.t.size();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = n - 1 - k;
    r.t.push_back(k == 0 ? 0.0 : T - s.t[src]);
    r.r.push_back(s.r[src]);
    r.rdot.push_back(-s.rdot[src]);
  }
  r.t.back() = T;
  return MotionProfile(std::move(r));
}

void MotionProfile::validate(const BoundaryConfig& config,
                             const CavityGeometry& geom) const {
  const double fixed = geom.radius(config.static_shell());
  double lo, hi;
  if (is_sinusoidal()) {
    const auto& m = sinusoidal();
    lo = m.r_beta0 * (1 - std::abs(m.epsilon));
    hi = m.r_beta0 * (1 + std::abs(m.epsilon));
  } else {
    const auto& s = sampled();
    lo = *std::min_element(s.r.begin(), s.r.end());
    hi = *std::max_element(s.r.begin(), s.r.end());
  }
  const bool ordered = config.moving == Shell::Outer ? lo > fixed : (hi < fixed && lo > 0);
  if (!ordered) {
    std::ostringstream os;
    os << "moving radius range [" << lo << ", " << hi << "] crosses the static shell at "
       << fixed;
    throw DomainError(os.str());
  }
}

SampledTrajectory sample_motion(const SinusoidalMotion& m, int samples_per_period) {
  if (samples_per_period < 4) throw DomainError("need at least 4 samples per period");
  const MotionProfile law(m);
  const double period = m.varpi != 0 ? 2 * std::numbers::pi / std::abs(m.varpi) : m.duration;
  const int n = std::max(2, int(std::ceil(m.duration / period * samples_per_period)) + 1);
  SampledTrajectory s;
  for (int k = 0; k < n; ++k) {
    const double t = m.duration * k / (n - 1);
    s.t.push_back(t);
    s.r.push_back(law.radius(t));
    // One-sided value at the end points: the drive is on over [0, T].
    s.rdot.push_back(m.r_beta0 * m.epsilon * m.varpi * std::cos(m.varpi * t));
  }
  return s;
}

}  // namespace dce
