#pragma once

// NV ground-state Hamiltonian, strain-mixed qubit eigensystem and the
// conditional hyperfine fields seen by bath nuclei.

#include <numbers>

#include "nvgeo/spinalg.hpp"

namespace nvgeo {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kHbar = 1.054571817e-34;         // J s
inline constexpr double kMu0 = 1.25663706212e-6;         // T m / A
inline constexpr double kDiamondLatticeConstant = 0.3567e-9;  // m
// a0 * sqrt(3) / 4
inline constexpr double kNearestNeighbourDistance =
    kDiamondLatticeConstant * std::numbers::sqrt3 / 4.0;

/// Physical parameters of the NV centre. All energies are in rad/s.
struct NvParams {
  double D = kTwoPi * 2.87e9;
  double Ex = 0.0;
  double Ey = 0.0;
  double Az = kTwoPi * 2.175e6;  // 14N hyperfine, z component
  double gamma_e = -1.76e11;     // rad s^-1 T^-1
  double gamma_c = 6.73e7;       // rad s^-1 T^-1
  double mu0 = kMu0;
  double T1 = 700e-6;            // s

  /// Throws ConfigError when D <= 0, the transverse splitting is not small
  /// compared to D, gamma_c vanishes or a value is not finite.
  void validate() const;
};

/// D Sz^2 + Ex(Sx^2 - Sy^2) + Ey(SxSy + SySx) + gamma_e B.S + Az m_I Sz.
/// The 14N spin enters only through its conserved projection m_I.
Mat3c electron_hamiltonian(const NvParams& p, const Vector3& b_ext, int m_i);

/// Eigensystem of the (|+1>, |-1>) block at zero transverse field.
struct StrainEigensystem {
  double eps_plus = 0.0;
  double eps_minus = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  Eigen::Vector2cd state_plus;
  Eigen::Vector2cd state_minus;
  // z splitting and strain both vanish; theta = pi/2, phi = 0 are a convention
  bool degenerate = false;

  // Longitudinal electron spin projection <Sz> of |+>; |-> carries the opposite sign.
  double cos_theta() const { return std::cos(theta); }
};

/// `extra_detuning` (rad/s) is added to gamma_e Bz + Az m_I; it carries
/// quasi-static inhomogeneous offsets.
StrainEigensystem qubit_eigensystem(const NvParams& p, double bz, int m_i,
                                    double extra_detuning = 0.0);

/// Point-dipole coupling tensor (rad/s):
///   mu0 gi gj hbar / (4 pi r^3) (I - 3 r^ r^T)
/// Rejects separations below the diamond nearest-neighbour distance.
Matrix3 dipolar_tensor(const Vector3& r, double gamma_i, double gamma_j, double mu0);

/// (<Sx>, <Sy>, <Sz>) of a normalized electron state in the (|+1>, |0>, |-1>) basis.
Vector3 electron_spin_expectation(const Eigen::Vector3cd& state);
/// Same for a state in the (|+1>, |-1>) logical subspace.
Vector3 electron_spin_expectation(const Eigen::Vector2cd& state);

/// Hyperfine field felt by a nucleus when the electron has spin expectation s_n.
inline Vector3 conditional_hyperfine_field(const Matrix3& a, const Vector3& s_n) {
  return a.transpose() * s_n;
}

/// B_ext + A_n / gamma_c (tesla).
Vector3 effective_field(const Vector3& b_ext, const Vector3& a_n, double gamma_c);

}  // namespace nvgeo
