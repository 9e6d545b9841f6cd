#include "nvgeo/nvmodel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nvgeo {

namespace {
constexpr double kNormTol = 1e-10;
}

void NvParams::validate() const {
  std::ostringstream err;
  for (const auto& [name, v] : {std::pair{"D", D}, {"Ex", Ex}, {"Ey", Ey}, {"Az", Az},
                                {"gamma_e", gamma_e}, {"gamma_c", gamma_c},
                                {"mu0", mu0}, {"T1", T1}}) {
    if (!std::isfinite(v)) err << name << " is not finite; ";
  }
  if (!(D > 0.0)) err << "D must be positive; ";
  if (!(std::hypot(Ex, Ey) < D / 100.0)) err << "transverse splitting must be below D/100; ";
  if (gamma_c == 0.0) err << "gamma_c must be non-zero; ";
  if (!(mu0 > 0.0)) err << "mu0 must be positive; ";
  if (!(T1 > 0.0)) err << "T1 must be positive; ";
  if (const auto msg = err.str(); !msg.empty()) {
    throw ConfigError("invalid NV parameters: " + msg);
  }
}

Mat3c electron_hamiltonian(const NvParams& p, const Vector3& b_ext, int m_i) {
  p.validate();
  if (m_i < -1 || m_i > 1) throw ConfigError("m_I must be -1, 0 or +1");
  const auto s = spin1_ops();
  Mat3c h = p.D * s.z * s.z
          + p.Ex * (s.x * s.x - s.y * s.y)
          + p.Ey * (s.x * s.y + s.y * s.x)
          + p.gamma_e * (b_ext.x() * s.x + b_ext.y() * s.y + b_ext.z() * s.z)
          + p.Az * static_cast<double>(m_i) * s.z;
  return h;
}

StrainEigensystem qubit_eigensystem(const NvParams& p, double bz, int m_i,
                                    double extra_detuning) {
  if (m_i < -1 || m_i > 1) throw ConfigError("m_I must be -1, 0 or +1");
  const double dz = p.gamma_e * bz + p.Az * static_cast<double>(m_i) + extra_detuning;
  const double transverse = std::hypot(p.Ex, p.Ey);
  const double eps = std::hypot(transverse, dz);

  StrainEigensystem es;
  es.eps_plus = eps;
  es.eps_minus = -eps;
  if (eps == 0.0) {
    es.degenerate = true;
    es.theta = std::numbers::pi / 2.0;
    es.phi = 0.0;
  } else {
    es.theta = std::acos(std::clamp(dz / eps, -1.0, 1.0));
    es.phi = (transverse == 0.0) ? 0.0 : std::atan2(p.Ey, p.Ex);
  }
  const double c = std::cos(es.theta / 2.0);
  const double s = std::sin(es.theta / 2.0);
  const Complex e = std::polar(1.0, es.phi);
  es.state_plus << c, e * s;
  es.state_minus << s, -e * c;
  return es;
}

Matrix3 dipolar_tensor(const Vector3& r, double gamma_i, double gamma_j, double mu0) {
  const double d = r.norm();
  if (!(d >= kNearestNeighbourDistance * (1.0 - 1e-6))) {
    throw ConfigError("dipolar_tensor: separation below the lattice nearest-neighbour distance");
  }
  const Vector3 n = r / d;
  const double c = mu0 / (4.0 * std::numbers::pi) * gamma_i * gamma_j * kHbar / (d * d * d);
  return c * (Matrix3::Identity() - 3.0 * n * n.transpose());
}

Vector3 electron_spin_expectation(const Eigen::Vector3cd& state) {
  if (std::abs(state.norm() - 1.0) > kNormTol) {
    throw NumericalError("electron_spin_expectation: state is not normalized");
  }
  const auto s = spin1_ops();
  return {(state.adjoint() * s.x * state)(0).real(),
          (state.adjoint() * s.y * state)(0).real(),
          (state.adjoint() * s.z * state)(0).real()};
}

Vector3 electron_spin_expectation(const Eigen::Vector2cd& state) {
  return electron_spin_expectation(Eigen::Vector3cd(state[0], 0.0, state[1]));
}

Vector3 effective_field(const Vector3& b_ext, const Vector3& a_n, double gamma_c) {
  if (gamma_c == 0.0) throw ConfigError("effective_field: gamma_c must be non-zero");
  return b_ext + a_n / gamma_c;
}

}  // namespace nvgeo
