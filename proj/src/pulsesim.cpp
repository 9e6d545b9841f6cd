#include "nvgeo/pulsesim.hpp"

#include <cmath>
#include <numbers>

namespace nvgeo {

namespace {

constexpr double kPi = std::numbers::pi;

Mat3c pulse(const NvParams& p, const SequenceOptions& options, double area, int m_i) {
  if (options.pulse_rabi_frequency) {
    const double omega = *options.pulse_rabi_frequency;
    if (!(omega > 0.0)) throw ConfigError("pulse Rabi frequency must be positive");
    return microwave_propagator({omega, area / omega, p.Az}, m_i);
  }
  const auto s = spin1_ops();
  return herm_propagator<3>(Mat3c(0.5 * area * s.x), 1.0);
}

double pulse_duration(const SequenceOptions& options, double area) {
  return options.pulse_rabi_frequency ? area / *options.pulse_rabi_frequency : 0.0;
}

// Applies the dephasing factor to the logical coherence, reads out with U and
// returns the |0> population.
double read_out(const Eigen::Vector3cd& psi, double coherence, const Mat3c& u) {
  Mat3c rho = psi * psi.adjoint();
  rho(0, 2) *= coherence;
  rho(2, 0) *= coherence;
  const Mat3c out = u * rho * u.adjoint();
  return out(1, 1).real();
}

double with_t1(double population, double t, const NvParams& p, const SequenceOptions& o) {
  if (!o.include_t1) return population;
  return 1.0 / 3.0 + (population - 1.0 / 3.0) * std::exp(-t / p.T1);
}

const Eigen::Vector3cd& ground() {
  static const Eigen::Vector3cd g(0.0, 1.0, 0.0);
  return g;
}

}  // namespace

Mat3c microwave_propagator(const PulseSpec& ps, int m_i) {
  if (!(ps.rabi_frequency >= 0.0) || !(ps.duration >= 0.0)) {
    throw ConfigError("pulse Rabi frequency and duration must be non-negative");
  }
  if (m_i < -1 || m_i > 1) throw ConfigError("m_I must be -1, 0 or +1");
  const auto s = spin1_ops();
  const Mat3c h = 0.5 * ps.rabi_frequency * s.x + ps.detuning_per_mi * m_i * s.z;
  return herm_propagator<3>(h, ps.duration);
}

double geometric_gate_check(const PulseSpec& ps) {
  const Mat3c u = microwave_propagator(ps, 0);
  Mat2c sub;
  sub << u(0, 0), u(0, 2),
         u(2, 0), u(2, 2);
  Mat2c gate;
  gate << 0, Complex(0, -1),
          Complex(0, -1), 0;
  return std::abs((gate.adjoint() * sub).trace()) / 2.0;
}

Mat3c free_evolution(const NvParams& p, int m_i, double t) {
  // rotating frame at D: only the +/-1 block precesses
  Mat3c h = electron_hamiltonian(p, Vector3::Zero(), m_i);
  h(0, 0) -= p.D;
  h(2, 2) -= p.D;
  return herm_propagator<3>(h, t);
}

SequenceResult rabi_signal(double rabi_frequency, std::span<const double> t_grid,
                           const NvParams& p, const MiPolicy& m_i_policy) {
  p.validate();
  SequenceResult r;
  r.kind = "rabi";
  r.times.assign(t_grid.begin(), t_grid.end());
  const std::vector<int> mis = m_i_policy.values();
  for (double t : t_grid) {
    double pop = 0.0;
    for (int m : mis) {
      const Eigen::Vector3cd psi = microwave_propagator({rabi_frequency, t, p.Az}, m) * ground();
      pop += std::norm(psi[1]);
    }
    r.population_0.push_back(pop / static_cast<double>(mis.size()));
  }
  return r;
}

SequenceResult ramsey_population(std::span<const double> tau_grid, const NvParams& p,
                                 const EchoCurve* envelope, const SequenceOptions& options) {
  p.validate();
  SequenceResult r;
  r.kind = "ramsey";
  r.times.assign(tau_grid.begin(), tau_grid.end());
  const std::vector<int> mis = options.m_i_policy.values();
  const double t_pulses = 2.0 * pulse_duration(options, kPi);
  for (double tau : tau_grid) {
    const double coherence = envelope ? interpolate(*envelope, tau) : 1.0;
    double pop = 0.0;
    for (int m : mis) {
      const Mat3c u_pi = pulse(p, options, kPi, m);
      const Eigen::Vector3cd psi = free_evolution(p, m, tau) * u_pi * ground();
      pop += read_out(psi, coherence, u_pi);
    }
    pop /= static_cast<double>(mis.size());
    r.population_0.push_back(with_t1(pop, tau + t_pulses, p, options));
  }
  return r;
}

SequenceResult echo_sequence_population(double tau1, std::span<const double> tau2_grid,
                                        const NvParams& p, const EchoCurve* bath_factor,
                                        const SequenceOptions& options) {
  p.validate();
  if (!(tau1 >= 0.0)) throw ConfigError("tau1 must be non-negative");
  SequenceResult r;
  r.kind = "refocus";
  r.times.assign(tau2_grid.begin(), tau2_grid.end());
  const std::vector<int> mis = options.m_i_policy.values();
  const double t_pulses = 2.0 * pulse_duration(options, kPi) + pulse_duration(options, 2 * kPi);
  for (double tau2 : tau2_grid) {
    const double total = tau1 + tau2;
    double coherence = bath_factor ? interpolate(*bath_factor, total) : 1.0;
    if (options.mismatch_envelope) {
      coherence *= interpolate(*options.mismatch_envelope, std::abs(tau1 - tau2));
    }
    double pop = 0.0;
    for (int m : mis) {
      const Mat3c u_pi = pulse(p, options, kPi, m);
      const Mat3c u_2pi = pulse(p, options, 2 * kPi, m);
      const Eigen::Vector3cd psi =
          free_evolution(p, m, tau2) * u_2pi * free_evolution(p, m, tau1) * u_pi * ground();
      pop += read_out(psi, coherence, u_pi);
    }
    pop /= static_cast<double>(mis.size());
    r.population_0.push_back(with_t1(pop, total + t_pulses, p, options));
  }
  return r;
}

}  // namespace nvgeo
