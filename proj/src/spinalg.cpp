#include "nvgeo/spinalg.hpp"

#include <cmath>

namespace nvgeo {

namespace {
constexpr std::size_t kMaxDim = 16;
}

Spin1Ops spin1_ops() {
  const double r = 1.0 / std::sqrt(2.0);
  const Complex i(0.0, 1.0);
  Spin1Ops s;
  s.x << 0, r, 0,
         r, 0, r,
         0, r, 0;
  s.y << 0, -i * r, 0,
         i * r, 0, -i * r,
         0, i * r, 0;
  s.z << 1, 0, 0,
         0, 0, 0,
         0, 0, -1;
  return s;
}

SpinHalfOps spin_half_ops() {
  const Complex i(0.0, 1.0);
  SpinHalfOps s;
  s.x << 0, 0.5,
         0.5, 0;
  s.y << 0, -0.5 * i,
         0.5 * i, 0;
  s.z << 0.5, 0,
         0, -0.5;
  return s;
}

ComplexMatrix herm_propagator(const ComplexMatrix& h, double t) {
  if (h.rows() != h.cols() || static_cast<std::size_t>(h.rows()) > kMaxDim) {
    throw NumericalError("herm_propagator: expected a square matrix of dimension <= 16");
  }
  if (!is_hermitian(h)) {
    throw NumericalError("herm_propagator: generator is not Hermitian");
  }
  if (!(t >= 0.0)) {
    throw NumericalError("herm_propagator: negative evolution time");
  }
  if (t == 0.0) return ComplexMatrix::Identity(h.rows(), h.cols());
  const ComplexMatrix hs = (h + h.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hs);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("herm_propagator: eigendecomposition failed");
  }
  const Eigen::VectorXd& lambda = solver.eigenvalues();
  Eigen::VectorXcd phases(lambda.size());
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    phases[k] = std::polar(1.0, -lambda[k] * t);
  }
  return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const auto rows = a.rows() * b.rows();
  const auto cols = a.cols() * b.cols();
  if (static_cast<std::size_t>(rows) > kMaxDim || static_cast<std::size_t>(cols) > kMaxDim) {
    throw NumericalError("kron: result dimension exceeds 16");
  }
  ComplexMatrix out(rows, cols);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace nvgeo
