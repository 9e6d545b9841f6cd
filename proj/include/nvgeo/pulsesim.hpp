#pragma once

// Microwave pulse sequences on the three-level electron in the rotating frame
// at the carrier D (rotating-wave approximation). Linear +x polarization
// couples |0> only to the bright state |B> = (|+1> + |-1>)/sqrt(2).

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nvgeo/echo.hpp"

namespace nvgeo {

/// Square pulse. The 14N hyperfine detunes |+1> and |-1> oppositely by
/// detuning_per_mi * m_I.
struct PulseSpec {
  double rabi_frequency = 0.0;  // rad/s
  double duration = 0.0;        // s
  double detuning_per_mi = 0.0; // rad/s, Az when driving at D

  double area() const { return rabi_frequency * duration; }
};

/// exp(-i [(Omega/2) Sx + Delta Sz] t) with Delta = detuning_per_mi * m_I.
Mat3c microwave_propagator(const PulseSpec& ps, int m_i);

/// |Tr(G^dag P U P)| / 2 with G = -i sigma_x on the (|+1>, |-1>) subspace.
double geometric_gate_check(const PulseSpec& ps);

/// Free precession under the 14N hyperfine (and strain, if present) for time t.
Mat3c free_evolution(const NvParams& p, int m_i, double t);

struct SequenceResult {
  std::string kind;
  std::vector<double> times;
  std::vector<double> population_0;
};

struct SequenceOptions {
  MiPolicy m_i_policy = MiPolicy::Mixture();
  // square pulses at this Rabi frequency instead of instantaneous pulses
  std::optional<double> pulse_rabi_frequency;
  // relax the |0> population contrast towards 1/3 with exp(-t/T1)
  bool include_t1 = false;
  // echo sequence only: quasi-static dephasing left by unequal free times,
  // looked up at |tau1 - tau2| (e.g. a FID curve)
  std::optional<EchoCurve> mismatch_envelope;
};

/// Population left in |0> after a drive of duration t, averaged over m_I.
SequenceResult rabi_signal(double rabi_frequency, std::span<const double> t_grid,
                           const NvParams& p, const MiPolicy& m_i_policy = MiPolicy::Mixture());

/// pi - tau - pi from |0>. The envelope (e.g. a FID curve, times = tau)
/// multiplies the logical |+1><-1| coherence before the read-out pulse.
SequenceResult ramsey_population(std::span<const double> tau_grid, const NvParams& p,
                                 const EchoCurve* envelope = nullptr,
                                 const SequenceOptions& options = {});

/// pi - tau1 - 2pi - tau2 - pi from |0>. The bath factor is looked up at
/// the total free time tau1 + tau2.
SequenceResult echo_sequence_population(double tau1, std::span<const double> tau2_grid,
                                        const NvParams& p,
                                        const EchoCurve* bath_factor = nullptr,
                                        const SequenceOptions& options = {});

}  // namespace nvgeo
