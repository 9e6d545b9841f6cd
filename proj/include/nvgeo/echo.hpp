#pragma once

// Electron coherence from conditional nuclear evolution.
//
// Each bath cluster (single 13C or nearest-neighbour dimer) evolves under a
// Hamiltonian conditioned on the electron logical state |+> or |->. The echo
// factor of a cluster is the normalized trace
//   (1/dim) Re Tr[U- U+ U-^dag U+^dag]
// with the nuclear state at the high-temperature limit, and the bath signal
// is the product over clusters accumulated in site-index order.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nvgeo/bathgen.hpp"

namespace nvgeo {

struct ConditionalFields {
  Vector3 b_plus = Vector3::Zero();
  Vector3 b_minus = Vector3::Zero();
};

double single_echo_numeric(const ConditionalFields& cf, double gamma_c, double tau);

// 1 - 2 |B+ x B-|^2 / (|B+|^2 |B-|^2) sin^2(gc|B+|tau/2) sin^2(gc|B-|tau/2)
double single_echo_closed(const ConditionalFields& cf, double gamma_c, double tau);

double dimer_echo(const Matrix3& coupling, const ConditionalFields& cf, double gamma_c,
                  double tau);

/// gamma_c B.(I0 + I1) + I0.A.I1 on the two-spin space, basis |I0> (x) |I1>.
Mat4c dimer_hamiltonian(const Matrix3& coupling, const Vector3& field, double gamma_c);

/// Echo factor of one dimer evaluated on many times from cached spectra.
class DimerEchoKernel {
 public:
  DimerEchoKernel(const Matrix3& coupling, const ConditionalFields& cf, double gamma_c);
  double echo(double tau) const;
  Complex echo_complex(double tau) const;
  // |(1/4) Tr[U+ U-^dag]|
  double fid(double tau) const;

 private:
  SpectralPropagator<4> plus_;
  SpectralPropagator<4> minus_;
};

/// How the conserved 14N projection enters: a fixed m_I or the equal-weight
/// mixture over {-1, 0, +1}.
struct MiPolicy {
  bool mixture = true;
  int fixed = 0;

  static MiPolicy Mixture() { return {true, 0}; }
  static MiPolicy Fixed(int m_i);
  std::vector<int> values() const;
  std::string label() const;
};

/// Transverse zero-field splitting applied to the electron eigenstates, plus
/// an optional quasi-static z detuning (rad/s).
struct StrainOptions {
  double ex = 0.0;
  double ey = 0.0;
  double z_offset = 0.0;
};

struct EchoMetadata {
  std::string kind = "echo";  // "echo", "fid", "echo-singles", "echo-dimers"
  Vector3 b_ext = Vector3::Zero();
  std::string m_i_policy = "mixture";
  std::optional<StrainOptions> strain;
  std::uint64_t seed = 0;
};

/// times are the total evolution time (2 tau for echoes, tau for FID).
struct EchoCurve {
  std::vector<double> times;
  std::vector<double> signal;
  EchoMetadata meta;
};

/// Electron-nucleus tensors and intra-dimer couplings of a bath, computed once.
struct BathClusters {
  std::vector<Matrix3> single_hyperfine;
  std::vector<Matrix3> dimer_hyperfine;  // mean of the two member tensors
  std::vector<Matrix3> dimer_coupling;
};

BathClusters build_clusters(const BathConfig& bath, const NvParams& p);

/// Conditional fields of a cluster with electron projection <Sz> = +/- scale.
ConditionalFields cluster_fields(const Matrix3& hyperfine, const Vector3& b_ext,
                                 double scale, double gamma_c);

/// Uniform tau grid [0, tau_max] with `points` samples.
std::vector<double> linear_grid(double tau_max, std::size_t points);

EchoCurve bath_echo_curve(const BathConfig& bath, const NvParams& p, const Vector3& b_ext,
                          const MiPolicy& m_i_policy,
                          const std::optional<StrainOptions>& strain,
                          std::span<const double> tau_grid);

struct EchoDecomposition {
  EchoCurve singles;
  EchoCurve dimers;
};

EchoDecomposition decompose_echo(const BathConfig& bath, const NvParams& p,
                                 const Vector3& b_ext, std::span<const double> tau_grid);

EchoCurve fid_curve(const BathConfig& bath, const NvParams& p, const Vector3& b_ext,
                    const MiPolicy& m_i_policy, std::span<const double> tau_grid);

/// Linear interpolation of a curve at time t; clamps outside the sampled range.
double interpolate(const EchoCurve& curve, double t);

}  // namespace nvgeo
