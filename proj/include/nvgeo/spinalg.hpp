#pragma once

// Small dense complex linear algebra for spin problems.
//
// Electron basis ordering is (|+1>, |0>, |-1>) everywhere in the library.
// Hamiltonians are angular frequencies (rad/s) with hbar omitted.

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

#include "nvgeo/errors.hpp"

namespace nvgeo {

using Complex = std::complex<double>;

template <int N>
using CMat = Eigen::Matrix<Complex, N, N>;
template <int N>
using CVec = Eigen::Matrix<Complex, N, 1>;

using Mat2c = CMat<2>;
using Mat3c = CMat<3>;
using Mat4c = CMat<4>;
using ComplexMatrix = Eigen::MatrixXcd;

using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;

struct Spin1Ops {
  Mat3c x, y, z;
};

struct SpinHalfOps {
  Mat2c x, y, z;
};

Spin1Ops spin1_ops();
SpinHalfOps spin_half_ops();

/// ||M - M^dagger||_F <= tol * ||M||_F
template <class Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, double tol = kHermitianTol) {
  return (m - m.adjoint()).norm() <= tol * m.norm();
}

template <class Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& u, double tol = kUnitaryTol) {
  using Plain = typename Derived::PlainObject;
  const Plain uu = u.adjoint() * u;
  return (uu - Plain::Identity(u.rows(), u.cols())).norm() <= tol;
}

/// Eigendecomposition of a Hermitian generator, evaluated as
/// exp(-iHt) = V diag(exp(-i lambda t)) V^dagger for any t.
///
/// Building the propagator once and evaluating it on a whole time grid is the
/// hot path of the echo computations.
template <int N>
class SpectralPropagator {
 public:
  explicit SpectralPropagator(const CMat<N>& h) {
    if (!is_hermitian(h)) {
      throw NumericalError("herm_propagator: generator is not Hermitian");
    }
    // symmetrize away the rounding-level anti-Hermitian part
    const CMat<N> hs = (h + h.adjoint()) * 0.5;
    Eigen::SelfAdjointEigenSolver<CMat<N>> solver(hs);
    if (solver.info() != Eigen::Success) {
      throw NumericalError("herm_propagator: eigendecomposition failed");
    }
    values_ = solver.eigenvalues();
    vectors_ = solver.eigenvectors();
  }

  CMat<N> operator()(double t) const {
    if (!(t >= 0.0)) {
      throw NumericalError("herm_propagator: negative evolution time");
    }
    if (t == 0.0) return CMat<N>::Identity(values_.size(), values_.size());
    CVec<N> phases(values_.size());
    for (Eigen::Index k = 0; k < values_.size(); ++k) {
      phases[k] = std::polar(1.0, -values_[k] * t);
    }
    return vectors_ * phases.asDiagonal() * vectors_.adjoint();
  }

  const Eigen::Matrix<double, N, 1>& eigenvalues() const { return values_; }
  const CMat<N>& eigenvectors() const { return vectors_; }

 private:
  Eigen::Matrix<double, N, 1> values_;
  CMat<N> vectors_;
};

template <int N>
CMat<N> herm_propagator(const CMat<N>& h, double t) {
  return SpectralPropagator<N>(h)(t);
}

// Dynamic-size variant for the generic ComplexMatrix (n <= 16).
ComplexMatrix herm_propagator(const ComplexMatrix& h, double t);

/// Tensor product; result dimension is limited to 16.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace nvgeo
