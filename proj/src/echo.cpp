#include "nvgeo/echo.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace nvgeo {

namespace {

constexpr double kImagTol = 1e-10;

Mat2c zeeman(const Vector3& field, double gamma_c) {
  static const SpinHalfOps ops = spin_half_ops();
  return gamma_c * (field.x() * ops.x + field.y() * ops.y + field.z() * ops.z);
}

template <int N>
Complex echo_trace(const CMat<N>& u_plus, const CMat<N>& u_minus) {
  return (u_minus * u_plus * u_minus.adjoint() * u_plus.adjoint()).trace() / double(N);
}

// The group-commutator trace of two SU(2) elements is real.
double real_su2_trace(const Complex& tr) {
  if (std::abs(tr.imag()) > kImagTol) {
    throw NumericalError("single-spin echo trace has a non-negligible imaginary part");
  }
  return tr.real();
}

const std::array<Mat4c, 3>& single_site_ops(int which) {
  static const auto ops = [] {
    const SpinHalfOps s = spin_half_ops();
    const std::array<Mat2c, 3> half{s.x, s.y, s.z};
    std::array<std::array<Mat4c, 3>, 2> out;
    for (int a = 0; a < 3; ++a) {
      out[0][a] = kron(half[a], Mat2c::Identity());
      out[1][a] = kron(Mat2c::Identity(), half[a]);
    }
    return out;
  }();
  return ops[which];
}

std::vector<double> ones(std::size_t n) { return std::vector<double>(n, 1.0); }

// Accumulates cluster echo factors into `out` in cluster order.
void multiply_echo(const BathClusters& clusters, const Vector3& b_ext, double scale,
                   double gamma_c, std::span<const double> tau_grid, bool singles,
                   bool dimers, std::vector<double>& out) {
  if (singles) {
    for (const auto& a : clusters.single_hyperfine) {
      const ConditionalFields cf = cluster_fields(a, b_ext, scale, gamma_c);
      for (std::size_t i = 0; i < tau_grid.size(); ++i) {
        out[i] *= single_echo_closed(cf, gamma_c, tau_grid[i]);
      }
    }
  }
  if (dimers) {
    for (std::size_t k = 0; k < clusters.dimer_hyperfine.size(); ++k) {
      const ConditionalFields cf =
          cluster_fields(clusters.dimer_hyperfine[k], b_ext, scale, gamma_c);
      const DimerEchoKernel kernel(clusters.dimer_coupling[k], cf, gamma_c);
      for (std::size_t i = 0; i < tau_grid.size(); ++i) out[i] *= kernel.echo(tau_grid[i]);
    }
  }
}

void check_grid(std::span<const double> tau_grid) {
  if (tau_grid.empty()) throw ConfigError("tau grid is empty");
  if (tau_grid.front() != 0.0) throw ConfigError("tau grid must start at 0");
  if (!std::is_sorted(tau_grid.begin(), tau_grid.end())) {
    throw ConfigError("tau grid must be ascending");
  }
}

std::vector<double> scaled_times(std::span<const double> tau_grid, double factor) {
  std::vector<double> t(tau_grid.size());
  std::transform(tau_grid.begin(), tau_grid.end(), t.begin(),
                 [factor](double tau) { return factor * tau; });
  return t;
}

}  // namespace

double single_echo_numeric(const ConditionalFields& cf, double gamma_c, double tau) {
  const Mat2c u_plus = herm_propagator<2>(zeeman(cf.b_plus, gamma_c), tau);
  const Mat2c u_minus = herm_propagator<2>(zeeman(cf.b_minus, gamma_c), tau);
  return real_su2_trace(echo_trace<2>(u_plus, u_minus));
}

double single_echo_closed(const ConditionalFields& cf, double gamma_c, double tau) {
  const double np2 = cf.b_plus.squaredNorm();
  const double nm2 = cf.b_minus.squaredNorm();
  if (np2 == 0.0 || nm2 == 0.0) return 1.0;
  const double misalignment = cf.b_plus.cross(cf.b_minus).squaredNorm() / (np2 * nm2);
  const double sp = std::sin(gamma_c * std::sqrt(np2) * tau / 2.0);
  const double sm = std::sin(gamma_c * std::sqrt(nm2) * tau / 2.0);
  return 1.0 - 2.0 * misalignment * sp * sp * sm * sm;
}

Mat4c dimer_hamiltonian(const Matrix3& coupling, const Vector3& field, double gamma_c) {
  const auto& i0 = single_site_ops(0);
  const auto& i1 = single_site_ops(1);
  Mat4c h = Mat4c::Zero();
  for (int a = 0; a < 3; ++a) {
    h += gamma_c * field[a] * (i0[a] + i1[a]);
    for (int b = 0; b < 3; ++b) h += coupling(a, b) * (i0[a] * i1[b]);
  }
  return h;
}

DimerEchoKernel::DimerEchoKernel(const Matrix3& coupling, const ConditionalFields& cf,
                                 double gamma_c)
    : plus_(dimer_hamiltonian(coupling, cf.b_plus, gamma_c)),
      minus_(dimer_hamiltonian(coupling, cf.b_minus, gamma_c)) {}

// Off zero field the dimer trace acquires a phase; the signal is its real part.
double DimerEchoKernel::echo(double tau) const {
  return echo_trace<4>(plus_(tau), minus_(tau)).real();
}

Complex DimerEchoKernel::echo_complex(double tau) const {
  return echo_trace<4>(plus_(tau), minus_(tau));
}

double DimerEchoKernel::fid(double tau) const {
  return std::abs((plus_(tau) * minus_(tau).adjoint()).trace()) / 4.0;
}

double dimer_echo(const Matrix3& coupling, const ConditionalFields& cf, double gamma_c,
                  double tau) {
  return DimerEchoKernel(coupling, cf, gamma_c).echo(tau);
}

MiPolicy MiPolicy::Fixed(int m_i) {
  if (m_i < -1 || m_i > 1) throw ConfigError("m_I must be -1, 0 or +1");
  return {false, m_i};
}

std::vector<int> MiPolicy::values() const {
  if (mixture) return {-1, 0, 1};
  return {fixed};
}

std::string MiPolicy::label() const {
  return mixture ? "mixture" : "fixed:" + std::to_string(fixed);
}

BathClusters build_clusters(const BathConfig& bath, const NvParams& p) {
  BathClusters c;
  c.single_hyperfine.reserve(bath.singles.size());
  for (const auto& s : bath.singles) {
    c.single_hyperfine.push_back(dipolar_tensor(s.position, p.gamma_e, p.gamma_c, p.mu0));
  }
  for (const auto& d : bath.dimers) {
    const Matrix3 a0 = dipolar_tensor(d.first.position, p.gamma_e, p.gamma_c, p.mu0);
    const Matrix3 a1 = dipolar_tensor(d.second.position, p.gamma_e, p.gamma_c, p.mu0);
    c.dimer_hyperfine.push_back(0.5 * (a0 + a1));
    c.dimer_coupling.push_back(dimer_internal_coupling(d, p));
  }
  return c;
}

ConditionalFields cluster_fields(const Matrix3& hyperfine, const Vector3& b_ext, double scale,
                                 double gamma_c) {
  const Vector3 s_plus(0.0, 0.0, scale);
  const Vector3 s_minus(0.0, 0.0, -scale);
  return {effective_field(b_ext, conditional_hyperfine_field(hyperfine, s_plus), gamma_c),
          effective_field(b_ext, conditional_hyperfine_field(hyperfine, s_minus), gamma_c)};
}

std::vector<double> linear_grid(double tau_max, std::size_t points) {
  if (points < 2 || !(tau_max > 0.0)) throw ConfigError("grid needs >= 2 points and tau_max > 0");
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) {
    g[i] = tau_max * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return g;
}

EchoCurve bath_echo_curve(const BathConfig& bath, const NvParams& p, const Vector3& b_ext,
                          const MiPolicy& m_i_policy,
                          const std::optional<StrainOptions>& strain,
                          std::span<const double> tau_grid) {
  p.validate();
  check_grid(tau_grid);
  const BathClusters clusters = build_clusters(bath, p);

  EchoCurve curve;
  curve.times = scaled_times(tau_grid, 2.0);
  curve.meta = {"echo", b_ext, m_i_policy.label(), strain, bath.seed};

  if (!strain) {
    // without strain the electron projections are +/-1 for every m_I
    curve.signal = ones(tau_grid.size());
    multiply_echo(clusters, b_ext, 1.0, p.gamma_c, tau_grid, true, true, curve.signal);
    return curve;
  }

  NvParams strained = p;
  strained.Ex = strain->ex;
  strained.Ey = strain->ey;
  strained.validate();
  const std::vector<int> mis = m_i_policy.values();
  curve.signal.assign(tau_grid.size(), 0.0);
  for (int m_i : mis) {
    const double scale =
        qubit_eigensystem(strained, b_ext.z(), m_i, strain->z_offset).cos_theta();
    std::vector<double> part = ones(tau_grid.size());
    multiply_echo(clusters, b_ext, scale, p.gamma_c, tau_grid, true, true, part);
    for (std::size_t i = 0; i < part.size(); ++i) {
      curve.signal[i] += part[i] / static_cast<double>(mis.size());
    }
  }
  return curve;
}

EchoDecomposition decompose_echo(const BathConfig& bath, const NvParams& p,
                                 const Vector3& b_ext, std::span<const double> tau_grid) {
  p.validate();
  check_grid(tau_grid);
  const BathClusters clusters = build_clusters(bath, p);
  EchoDecomposition d;
  d.singles.times = d.dimers.times = scaled_times(tau_grid, 2.0);
  d.singles.meta = {"echo-singles", b_ext, "mixture", std::nullopt, bath.seed};
  d.dimers.meta = {"echo-dimers", b_ext, "mixture", std::nullopt, bath.seed};
  d.singles.signal = ones(tau_grid.size());
  d.dimers.signal = ones(tau_grid.size());
  multiply_echo(clusters, b_ext, 1.0, p.gamma_c, tau_grid, true, false, d.singles.signal);
  multiply_echo(clusters, b_ext, 1.0, p.gamma_c, tau_grid, false, true, d.dimers.signal);
  return d;
}

EchoCurve fid_curve(const BathConfig& bath, const NvParams& p, const Vector3& b_ext,
                    const MiPolicy& m_i_policy, std::span<const double> tau_grid) {
  p.validate();
  check_grid(tau_grid);
  const BathClusters clusters = build_clusters(bath, p);
  EchoCurve curve;
  curve.times = scaled_times(tau_grid, 1.0);
  curve.meta = {"fid", b_ext, m_i_policy.label(), std::nullopt, bath.seed};
  curve.signal = ones(tau_grid.size());

  for (const auto& a : clusters.single_hyperfine) {
    const ConditionalFields cf = cluster_fields(a, b_ext, 1.0, p.gamma_c);
    const SpectralPropagator<2> plus(zeeman(cf.b_plus, p.gamma_c));
    const SpectralPropagator<2> minus(zeeman(cf.b_minus, p.gamma_c));
    for (std::size_t i = 0; i < tau_grid.size(); ++i) {
      const double tau = tau_grid[i];
      curve.signal[i] *= std::abs((plus(tau) * minus(tau).adjoint()).trace()) / 2.0;
    }
  }
  for (std::size_t k = 0; k < clusters.dimer_hyperfine.size(); ++k) {
    const ConditionalFields cf =
        cluster_fields(clusters.dimer_hyperfine[k], b_ext, 1.0, p.gamma_c);
    const DimerEchoKernel kernel(clusters.dimer_coupling[k], cf, p.gamma_c);
    for (std::size_t i = 0; i < tau_grid.size(); ++i) curve.signal[i] *= kernel.fid(tau_grid[i]);
  }
  return curve;
}

double interpolate(const EchoCurve& curve, double t) {
  const auto& ts = curve.times;
  if (ts.empty()) throw ConfigError("interpolate: empty curve");
  if (t <= ts.front()) return curve.signal.front();
  if (t >= ts.back()) return curve.signal.back();
  const auto it = std::upper_bound(ts.begin(), ts.end(), t);
  const auto hi = static_cast<std::size_t>(it - ts.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
  return curve.signal[lo] * (1.0 - w) + curve.signal[hi] * w;
}

}  // namespace nvgeo
