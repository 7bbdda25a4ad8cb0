#include "dce_sphere/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dce_sphere/error.hpp"
#include "dce_sphere/log.hpp"
#include "dce_sphere/quadrature.hpp"

namespace dce {

using std::numbers::pi;
using cplx = std::complex<double>;

namespace {

// (e^{i x} - 1) / (i x), continuous at x = 0.
cplx phase_window(double x) {
  if (std::abs(x) < 1e-5) return {1.0 - x * x / 6.0, x / 2.0 - x * x * x / 24.0};
  return (std::exp(cplx(0, x)) - 1.0) / cplx(0, x);
}

void warn_if_fast(const MotionProfile& motion) {
  if (motion.max_speed() > kSpeedWarning) {
    std::ostringstream os;
    os << "shell speed " << motion.max_speed() << " exceeds " << kSpeedWarning
       << " (c = 1); second-order slow-boundary results are unreliable";
    log::warn(os.str());
  }
}

void check_sinusoid_geometry(const SinusoidalMotion& m, const BoundaryConfig& config,
                             const CavityGeometry& geom) {
  const double rb = geom.radius(config.moving);
  if (std::abs(m.r_beta0 - rb) > 1e-12 * rb) {
    throw DomainError("sinusoidal r_beta0 must equal the moving shell's equilibrium radius");
  }
}

}  // namespace

double phase_integral(const BoundaryConfig& config, int l, int s,
                      const MotionProfile& motion, double t,
                      const CavityGeometry& geom, double rel_tol) {
  if (t < 0 || t > motion.duration() * (1 + 1e-15)) {
    throw DomainError("phase integral time must lie in [0, T]");
  }
  if (t == 0) return 0.0;
  auto omega_at = [&](double tau) {
    return solve_frequency(config, l, s,
                           geom.with_radius(config.moving, motion.radius(tau)))
        .omega;
  };
  double total = 0;
  const auto knots = motion.breakpoints();
  double a = 0;
  for (std::size_t k = 1; k <= knots.size(); ++k) {
    const double b = k < knots.size() ? std::min(knots[k], t) : t;
    if (b > a) {
      total += integrate_adaptive(omega_at, a, b, rel_tol).value;
      a = b;
    }
    if (a >= t) break;
  }
  return total;
}

DetuningResponse detuning_response(double varpi, double omega_pair, double duration) {
  if (!(duration > 0)) throw DomainError("drive duration T must be positive");
  const double T = duration;
  return {phase_window((varpi - omega_pair) * T) + phase_window(-(varpi + omega_pair) * T)};
}

DetuningResponse detuning(int l, int s, int s_prime, double varpi, double duration,
                          const BoundaryConfig& config, const CavityGeometry& geom) {
  const auto f = solve_frequencies(config, l, std::max(s, s_prime), geom);
  return detuning_response(varpi, f[s - 1].omega + f[s_prime - 1].omega, duration);
}

ParticleEstimate particles_sinusoidal(const BoundaryConfig& config, int l, int s,
                                      const SinusoidalMotion& motion,
                                      const CavityGeometry& geom, int s_max,
                                      double tail_tol) {
  if (s < 1 || s_max < s) throw DomainError("need 1 <= s <= s_max");
  check_sinusoid_geometry(motion, config, geom);
  const MotionProfile law(motion);
  law.validate(config, geom);
  warn_if_fast(law);

  ParticleEstimate out;
  out.method = "perturbative";
  out.s_max = s_max;
  if (motion.epsilon == 0 || motion.duration == 0) return out;

  const CouplingMatrix c = coupling_matrix(config, l, s_max, geom);
  const double T = motion.duration;
  const double prefactor = std::pow(motion.epsilon * motion.varpi * T / 2, 2);
  // The term nearest resonance is never part of the tail.
  int half = std::max(s, s_max / 2);
  if (motion.varpi <= c.omega(s - 1) + c.omega(s_max - 1)) {
    Eigen::Index nearest = 0;
    (motion.varpi - c.omega(s - 1) - c.omega.array()).abs().minCoeff(&nearest);
    half = std::max(half, static_cast<int>(nearest) + 1);
  }
  double full = 0, truncated = 0;
  for (int sp = 1; sp <= s_max; ++sp) {
    const cplx f =
        detuning_response(motion.varpi, c.omega(s - 1) + c.omega(sp - 1), T).value;
    const double term = std::norm(c.symmetric(s, sp) * f);
    full += term;
    if (sp <= half) truncated += term;
  }
  out.value = prefactor * full;
  out.error_estimate = prefactor * (full - truncated);
  if (out.error_estimate > tail_tol * out.value) {
    std::ostringstream os;
    os << "s' sum not converged for l=" << l << " s=" << s << ": tail " << out.error_estimate
       << " vs N " << out.value << " (s_max=" << s_max << ")";
    throw NumericalFailure(os.str());
  }
  return out;
}

double particles_resonant(const BoundaryConfig& config, int l, int s, int s_prime,
                          double epsilon, double duration, const CavityGeometry& geom) {
  if (s < 1 || s_prime < 1) throw DomainError("radial indices must be >= 1");
  const CouplingMatrix c = coupling_matrix(config, l, std::max(s, s_prime), geom);
  const double w = c.omega(s - 1) + c.omega(s_prime - 1);
  const double drive = epsilon * w * duration;
  if (std::abs(drive) > 0.3) {
    log::warn("epsilon * omega_ss' * T = " + std::to_string(drive) +
              " is outside the short-time regime of the resonant formula");
  }
  const double cs = c.symmetric(s, s_prime);
  return drive * drive / 4 * cs * cs;
}

double particles_asymptotic(const BoundaryConfig& config, int s, int s_prime,
                            double epsilon, double duration, const CavityGeometry& geom) {
  config.validate();
  geom.validate();
  if (s < 1 || s_prime < 1) throw DomainError("radial indices must be >= 1");
  const double rb = geom.radius(config.moving);
  const double d = geom.width();
  const double base = epsilon * epsilon * pi * pi * duration * duration * rb * rb /
                      (d * d * d * d);
  if (!config.mixed()) return base / 4 * s * s_prime;
  return base / 16 * (2 * s - 1) * (2 * s_prime - 1);
}

namespace {

struct GeneralPass {
  double value = 0;
  int nodes = 0;
};

GeneralPass integrate_pass(const BoundaryConfig& config, int l, int s,
                           const MotionProfile& motion, const CavityGeometry& geom,
                           int s_max, double h_max, int order) {
  const auto& rule = gauss_legendre(order);
  const Eigen::MatrixXd& cumulative = gauss_legendre_cumulative(order);

  Eigen::VectorXd phase = Eigen::VectorXd::Zero(s_max);  // Omega_s' at panel start
  Eigen::VectorXcd amplitude = Eigen::VectorXcd::Zero(s_max);
  Eigen::MatrixXd omega_nodes(order, s_max);
  Eigen::MatrixXd mu_nodes(order, s_max);

  GeneralPass pass;
  const auto knots = motion.breakpoints();
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double span = knots[k + 1] - knots[k];
    if (span <= 0) continue;
    const int pieces = std::max(1, int(std::ceil(span / h_max)));
    const double h = span / pieces;
    for (int p = 0; p < pieces; ++p) {
      const double a = knots[k] + p * h;
      const Eigen::VectorXd t = rule.nodes_on(a, a + h);
      for (int i = 0; i < order; ++i) {
        const CavityGeometry now =
            geom.with_radius(config.moving, motion.radius(t(i)));
        const double speed = motion.velocity(t(i));
        const CouplingMatrix c = coupling_matrix(config, l, s_max, now);
        omega_nodes.row(i) = c.omega.transpose();
        for (int sp = 0; sp < s_max; ++sp) {
          const double sym = 0.5 * (c.velocity(sp, s - 1) + c.velocity(s - 1, sp));
          mu_nodes(i, sp) = speed * sym;
        }
      }
      const double half = h / 2;
      // Omega at every node: panel start value plus the running integral.
      const Eigen::MatrixXd node_phase =
          phase.transpose().replicate(order, 1) + half * (cumulative * omega_nodes);
      const Eigen::VectorXd w = rule.weights() * half;
      for (int sp = 0; sp < s_max; ++sp) {
        for (int i = 0; i < order; ++i) {
          const double total_phase = node_phase(i, sp) + node_phase(i, s - 1);
          amplitude(sp) += w(i) * mu_nodes(i, sp) * std::exp(cplx(0, total_phase));
        }
      }
      phase += (omega_nodes.transpose() * rule.weights()) * half;
      pass.nodes += order;
    }
  }
  pass.value = amplitude.squaredNorm();
  return pass;
}

}  // namespace

ParticleEstimate particles_general(const BoundaryConfig& config, int l, int s,
                                   const MotionProfile& motion,
                                   const CavityGeometry& geom, int s_max,
                                   const GeneralOptions& options) {
  if (s < 1 || s_max < s) throw DomainError("need 1 <= s <= s_max");
  if (options.nodes_per_panel < 2 || !(options.panels_per_period > 0)) {
    throw DomainError("invalid time-integration options");
  }
  config.validate();
  geom.validate();
  motion.validate(config, geom);
  warn_if_fast(motion);

  ParticleEstimate out;
  out.method = "general";
  out.s_max = s_max;
  if (motion.duration() == 0 || motion.max_speed() == 0) return out;

  const CavityGeometry start = geom.with_radius(config.moving, motion.radius(0));
  const auto freqs = solve_frequencies(config, l, s_max, start);
  const double fastest = freqs[s - 1].omega + freqs[s_max - 1].omega;
  const double h_max = 2 * pi / fastest / options.panels_per_period;

  const GeneralPass coarse =
      integrate_pass(config, l, s, motion, geom, s_max, h_max, options.nodes_per_panel);
  if (!options.verify_resolution) {
    out.value = coarse.value;
    out.time_nodes = coarse.nodes;
    return out;
  }
  const GeneralPass fine =
      integrate_pass(config, l, s, motion, geom, s_max, h_max / 2, options.nodes_per_panel);
  out.value = fine.value;
  out.time_nodes = coarse.nodes + fine.nodes;
  out.error_estimate = std::abs(fine.value - coarse.value);
  if (out.error_estimate > options.resolution_tol * std::abs(fine.value)) {
    std::ostringstream os;
    os << "time integration under-resolved for l=" << l << " s=" << s << ": N changed from "
       << coarse.value << " to " << fine.value << " when halving the panels";
    throw NumericalFailure(os.str());
  }
  return out;
}

double ParticleSpectrum::multiplicity_total(int l, int s) const {
  return (2 * l + 1) * values.at({l, s}).value;
}

double ParticleSpectrum::total() const {
  double sum = 0;
  for (const auto& [key, est] : values) sum += (2 * key.first + 1) * est.value;
  return sum;
}

}  // namespace dce
