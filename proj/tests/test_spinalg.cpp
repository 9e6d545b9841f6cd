#include <numbers>
#include <random>

#include "doctest.h"
#include "nvgeo/spinalg.hpp"
#include "oracles/oracles.hpp"

using namespace nvgeo;

namespace {

const Complex I(0.0, 1.0);

Mat4c random_h4(std::mt19937_64& rng) { return oracle::random_hermitian(4, rng); }

}  // namespace

TEST_CASE("spin-1 operators in the (+1, 0, -1) basis") {
  const auto s = spin1_ops();
  CHECK(s.z(0, 0) == Complex(1.0));
  CHECK(s.z(1, 1) == Complex(0.0));
  CHECK(s.z(2, 2) == Complex(-1.0));

  // Sx = |0><B| + |B><0|, |B> = (|+1> + |-1>)/sqrt 2
  Eigen::Vector3cd b(1.0, 0.0, 1.0);
  b /= std::sqrt(2.0);
  const Eigen::Vector3cd zero(0.0, 1.0, 0.0);
  const Mat3c expected = zero * b.adjoint() + b * zero.adjoint();
  CHECK((s.x - expected).cwiseAbs().maxCoeff() < 1e-15);

  CHECK(std::abs((s.x * s.x).trace() - 2.0) < 1e-14);
  CHECK(std::abs((s.z * s.z).trace() - 2.0) < 1e-14);
}

TEST_CASE("spin-1 commutators close su(2)") {
  const auto s = spin1_ops();
  CHECK((s.x * s.y - s.y * s.x - I * s.z).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((s.y * s.z - s.z * s.y - I * s.x).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((s.z * s.x - s.x * s.z - I * s.y).cwiseAbs().maxCoeff() < 1e-14);
  const Mat3c casimir = s.x * s.x + s.y * s.y + s.z * s.z;
  CHECK((casimir - 2.0 * Mat3c::Identity()).norm() < 1e-14);
}

TEST_CASE("spin-1/2 operators") {
  const auto s = spin_half_ops();
  Eigen::SelfAdjointEigenSolver<Mat2c> es(s.z);
  CHECK(es.eigenvalues()[0] == doctest::Approx(-0.5));
  CHECK(es.eigenvalues()[1] == doctest::Approx(0.5));
  const Mat2c casimir = s.x * s.x + s.y * s.y + s.z * s.z;
  CHECK((casimir - 0.75 * Mat2c::Identity()).norm() < 1e-15);
  CHECK((s.x * s.y - s.y * s.x - I * s.z).norm() < 1e-15);
}

TEST_CASE("herm_propagator simple cases") {
  CHECK((herm_propagator<3>(Mat3c::Zero(), 1.3) - Mat3c::Identity()).norm() < 1e-15);

  const double omega = 2.0 * std::numbers::pi * 1e6;
  const Mat2c h = omega * spin_half_ops().z;
  const Mat2c u = herm_propagator<2>(h, 2.0 * std::numbers::pi / omega);
  CHECK((u + Mat2c::Identity()).norm() < 1e-12);

  CHECK(is_unitary(herm_propagator<2>(h, 0.0)));
  CHECK_THROWS_AS(herm_propagator<2>(h, -1e-9), NumericalError);

  Mat2c bad = Mat2c::Zero();
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(herm_propagator<2>(bad, 1.0), NumericalError);
}

TEST_CASE("herm_propagator matches the series oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Mat4c h = random_h4(rng);
    const double t = 0.7;
    const Mat4c u = herm_propagator<4>(h, t);
    CHECK((u.adjoint() * u - Mat4c::Identity()).norm() < 1e-10);

    const Mat4c reference = oracle::expm_series(h, t);
    CHECK((u - reference).norm() < 1e-8);

    // spectral form
    Eigen::SelfAdjointEigenSolver<Mat4c> es(h);
    Mat4c spectral = Mat4c::Zero();
    for (int k = 0; k < 4; ++k) {
      const auto v = es.eigenvectors().col(k);
      spectral += std::polar(1.0, -es.eigenvalues()[k] * t) * v * v.adjoint();
    }
    CHECK((u - spectral).norm() < 1e-10);
  }
}

TEST_CASE("herm_propagator dynamic variant agrees with the fixed-size one") {
  std::mt19937_64 rng(5);
  const Mat3c h = oracle::random_hermitian(3, rng, 1e4);
  const ComplexMatrix dyn = herm_propagator(ComplexMatrix(h), 3e-4);
  CHECK((dyn - herm_propagator<3>(h, 3e-4)).norm() < 1e-12);
  CHECK((dyn - oracle::expm_series(h, 3e-4)).norm() < 1e-8);
  CHECK_THROWS_AS(herm_propagator(ComplexMatrix::Identity(17, 17), 1.0), NumericalError);
}

TEST_CASE("propagator composition and unit-circle spectrum") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const Mat4c h = random_h4(rng);
    std::uniform_real_distribution<double> ut(0.0, 3.0);
    const double t1 = ut(rng), t2 = ut(rng);
    const SpectralPropagator<4> prop(h);
    CHECK((prop(t1 + t2) - prop(t2) * prop(t1)).norm() < 1e-10);
    Eigen::ComplexEigenSolver<Mat4c> ces(prop(t1));
    for (int k = 0; k < 4; ++k) CHECK(std::abs(std::abs(ces.eigenvalues()[k]) - 1.0) < 1e-10);
  }
}

TEST_CASE("kron") {
  const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
  CHECK((kron(i2, i2) - ComplexMatrix::Identity(4, 4)).norm() == 0.0);

  ComplexMatrix sz(2, 2);
  sz << 1.0, 0.0, 0.0, -1.0;
  Eigen::Vector4cd diag(1.0, 1.0, -1.0, -1.0);
  CHECK((kron(sz, i2) - ComplexMatrix(diag.asDiagonal())).norm() == 0.0);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix a = oracle::random_hermitian(2, rng) + I * oracle::random_hermitian(2, rng);
    const ComplexMatrix b = oracle::random_hermitian(3, rng);
    CHECK(std::abs(kron(a, b).trace() - a.trace() * b.trace()) < 1e-12);
  }
  CHECK_THROWS_AS(kron(ComplexMatrix::Identity(4, 4), ComplexMatrix::Identity(5, 5)),
                  NumericalError);
}
