#pragma once
// Reference implementations that share no code with the library.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>

namespace oracle {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;

inline Mat random_hermitian(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  return 0.5 * (a + a.adjoint());
}

// exp(-iHt) by Taylor series plus scaling and squaring.
inline Mat expm_series(const Mat& h, double t, double tol = 1e-16) {
  Mat x = Complex(0.0, -t) * h;
  const double norm = x.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  x /= std::ldexp(1.0, squarings);
  Mat sum = Mat::Identity(h.rows(), h.cols());
  Mat term = sum;
  for (int k = 1; k < 60; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
    if (term.norm() < tol) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

// Integrates i d(psi)/dt = H psi with classical fourth-order Runge-Kutta.
inline Eigen::VectorXcd rk4(const Mat& h, Eigen::VectorXcd psi, double t, int steps) {
  const double dt = t / steps;
  const Complex mi(0.0, -1.0);
  for (int s = 0; s < steps; ++s) {
    const Eigen::VectorXcd k1 = mi * (h * psi);
    const Eigen::VectorXcd k2 = mi * (h * (psi + 0.5 * dt * k1));
    const Eigen::VectorXcd k3 = mi * (h * (psi + 0.5 * dt * k2));
    const Eigen::VectorXcd k4 = mi * (h * (psi + dt * k3));
    psi += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return psi;
}

inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
  q.normalize();
  return q.toRotationMatrix();
}

inline Eigen::Vector3d random_vector(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  return {g(rng), g(rng), g(rng)};
}

// |0> population of a spin 1 under (Omega/2) Sx + Delta Sz from |0>.
// The drive is a rotation by |w| t about w = (Omega/2, 0, Delta), so
// <0|R|0> = cos^2(a) + sin^2(a) cos(|w| t) with cos(a) = Delta / |w|.
inline double spin1_rotation_p0(double omega, double delta, double t) {
  const double w = std::hypot(0.5 * omega, delta);
  if (w == 0.0) return 1.0;
  const double c = delta / w;
  const double amp = c * c + (1.0 - c * c) * std::cos(w * t);
  return amp * amp;
}

// Single spin-1/2 echo (1/2) Re Tr[U- U+ U-^dag U+^dag] built from SU(2)
// quaternion products, with U = cos(a/2) - i sin(a/2) n.sigma.
inline double su2_echo(const Eigen::Vector3d& bp, const Eigen::Vector3d& bm, double gamma,
                       double tau) {
  struct Q {
    double w;
    Eigen::Vector3d v;
  };
  auto rot = [&](const Eigen::Vector3d& b, double sign) {
    const double n = b.norm();
    if (n == 0.0) return Q{1.0, Eigen::Vector3d::Zero()};
    const double a = sign * gamma * n * tau / 2.0;
    return Q{std::cos(a), std::sin(a) * b / n};
  };
  auto mul = [](const Q& a, const Q& b) {
    return Q{a.w * b.w - a.v.dot(b.v), a.w * b.v + b.w * a.v + a.v.cross(b.v)};
  };
  // (w, v) stands for w - i v.sigma
  const Q up = rot(bp, 1.0), um = rot(bm, 1.0);
  const Q upd = rot(bp, -1.0), umd = rot(bm, -1.0);
  return mul(mul(mul(um, up), umd), upd).w;
}

}  // namespace oracle
