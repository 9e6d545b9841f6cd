#include <numbers>
#include <random>

#include "doctest.h"
#include "nvgeo/nvmodel.hpp"
#include "oracles/oracles.hpp"

using namespace nvgeo;

namespace {

constexpr double kPi = std::numbers::pi;

// 13C-13C prefactor at the nearest-neighbour distance, computed independently
// by tests/oracles/lattice_oracle.py.
constexpr double kCarbonPairPrefactor = 12962.687554028;

}  // namespace

TEST_CASE("NvParams defaults and validation") {
  const NvParams p;
  CHECK(p.D == doctest::Approx(2 * kPi * 2.87e9));
  CHECK(p.Az == doctest::Approx(2 * kPi * 2.175e6));
  CHECK(p.gamma_e == -1.76e11);
  CHECK(p.gamma_c == 6.73e7);
  CHECK(p.T1 == 700e-6);
  CHECK_NOTHROW(p.validate());

  NvParams bad;
  bad.D = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = NvParams{};
  bad.Ex = bad.D / 10.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = NvParams{};
  bad.gamma_c = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = NvParams{};
  bad.Az = std::nan("");
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("electron_hamiltonian") {
  NvParams p;
  const Mat3c h0 = electron_hamiltonian(p, Vector3::Zero(), 0);
  Mat3c expected = Mat3c::Zero();
  expected(0, 0) = p.D;
  expected(2, 2) = p.D;
  CHECK((h0 - expected).norm() < 1e-6);

  for (int m : {-1, 0, 1}) {
    const double bz = 3e-4;
    const Mat3c h = electron_hamiltonian(p, Vector3(0.0, 0.0, bz), m);
    const double dz = p.gamma_e * bz + p.Az * m;
    CHECK(h(0, 0).real() == doctest::Approx(p.D + dz));
    CHECK(std::abs(h(1, 1)) < 1e-6);
    CHECK(h(2, 2).real() == doctest::Approx(p.D - dz));
    CHECK(std::abs(h(0, 2)) == 0.0);
  }

  p.Ex = 2 * kPi * 1e5;
  p.Ey = 2 * kPi * 4e4;
  const Mat3c hs = electron_hamiltonian(p, Vector3::Zero(), 0);
  CHECK(std::abs(hs(0, 2) - Complex(p.Ex, -p.Ey)) < 1e-6);
  CHECK(std::abs(hs(2, 0) - Complex(p.Ex, p.Ey)) < 1e-6);
  CHECK(is_hermitian(hs));
}

TEST_CASE("qubit_eigensystem limits") {
  NvParams p;
  const auto unmixed = qubit_eigensystem(p, 0.0, 1);
  CHECK(unmixed.theta == doctest::Approx(0.0));
  CHECK(std::abs(unmixed.state_plus[0]) == doctest::Approx(1.0));
  CHECK(std::abs(unmixed.state_minus[1]) == doctest::Approx(1.0));

  p.Ex = 2 * kPi * 1e5;
  p.Ey = 2 * kPi * 1e5;
  const auto mixed = qubit_eigensystem(p, 0.0, 0);
  CHECK(mixed.theta == doctest::Approx(kPi / 2));
  CHECK(mixed.phi == doctest::Approx(kPi / 4));
  const Complex e = std::polar(1.0, mixed.phi);
  CHECK(std::abs(mixed.state_plus[0] - 1.0 / std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(mixed.state_plus[1] - e / std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(mixed.state_minus.dot(mixed.state_plus)) < 1e-12);

  const auto degenerate = qubit_eigensystem(NvParams{}, 0.0, 0);
  CHECK(degenerate.degenerate);
  CHECK(degenerate.theta == doctest::Approx(kPi / 2));
  CHECK(degenerate.phi == 0.0);
}

TEST_CASE("qubit_eigensystem at theta = pi/4") {
  NvParams p;
  p.Ex = 2 * kPi * 0.115e6;
  const double bz = p.Ex / p.gamma_e;  // gamma_e Bz = Ex with m_I = 0
  const auto es = qubit_eigensystem(p, bz, 0);
  CHECK(es.theta == doctest::Approx(kPi / 4).epsilon(1e-12));
  CHECK(es.eps_plus == doctest::Approx(2 * kPi * 0.115e6 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(es.eps_plus == doctest::Approx(2 * kPi * 0.1626e6).epsilon(1e-3));
  CHECK(es.eps_minus == doctest::Approx(-es.eps_plus));
}

TEST_CASE("qubit eigenstates diagonalize the +/-1 block") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> strain(-2 * kPi * 1e6, 2 * kPi * 1e6);
  std::uniform_real_distribution<double> field(-1e-3, 1e-3);
  std::uniform_int_distribution<int> mi(-1, 1);
  for (int trial = 0; trial < 200; ++trial) {
    NvParams p;
    p.Ex = strain(rng);
    p.Ey = strain(rng);
    const double bz = field(rng);
    const int m = mi(rng);
    const auto es = qubit_eigensystem(p, bz, m);
    const Mat3c h = electron_hamiltonian(p, Vector3(0.0, 0.0, bz), m);
    Mat2c block;
    block << h(0, 0), h(0, 2), h(2, 0), h(2, 2);
    const Eigen::Vector2cd hp = block * es.state_plus;
    const Eigen::Vector2cd hm = block * es.state_minus;
    CHECK((hp - (p.D + es.eps_plus) * es.state_plus).norm() <= 1e-8 * p.D);
    CHECK((hm - (p.D + es.eps_minus) * es.state_minus).norm() <= 1e-8 * p.D);
    CHECK(std::abs(es.state_plus.norm() - 1.0) < 1e-12);
    CHECK(std::abs(es.state_plus.dot(es.state_minus)) < 1e-12);
  }
}

TEST_CASE("hyperfine suppression grows with strain") {
  double previous = 2.0;
  for (double ratio : {0.0, 0.1, 0.5, 1.0, 3.0, 10.0, 100.0}) {
    NvParams p;
    p.Ex = ratio * p.Az;
    const double c = std::abs(qubit_eigensystem(p, 0.0, 1).cos_theta());
    CHECK(c < previous);
    previous = c;
  }
  CHECK(previous < 0.01);
}

TEST_CASE("dipolar_tensor") {
  const NvParams p;
  const double r = 2e-10;
  const Matrix3 a = dipolar_tensor(Vector3(0.0, 0.0, r), p.gamma_c, p.gamma_c, p.mu0);
  const double c = p.mu0 * p.gamma_c * p.gamma_c * kHbar / (4 * kPi * r * r * r);
  CHECK(a(0, 0) == doctest::Approx(c));
  CHECK(a(1, 1) == doctest::Approx(c));
  CHECK(a(2, 2) == doctest::Approx(-2 * c));
  CHECK(std::abs(a(0, 1)) < 1e-12 * c);

  const Matrix3 nn =
      dipolar_tensor(Vector3(0.0, 0.0, kNearestNeighbourDistance), p.gamma_c, p.gamma_c, p.mu0);
  CHECK(nn(0, 0) == doctest::Approx(kCarbonPairPrefactor).epsilon(1e-9));
  CHECK(nn(0, 0) / (2 * kPi) == doctest::Approx(2e3).epsilon(0.05));

  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    Vector3 v = oracle::random_vector(rng, 1e-9);
    if (v.norm() < 2e-10) v *= 2e-10 / v.norm() * 1.5;
    const Matrix3 t = dipolar_tensor(v, p.gamma_e, p.gamma_c, p.mu0);
    CHECK(std::abs(t.trace()) <= 1e-12 * t.norm());
    CHECK((t - t.transpose()).norm() <= 1e-15 * t.norm());
    const Matrix3 t2 = dipolar_tensor(2.0 * v, p.gamma_e, p.gamma_c, p.mu0);
    CHECK((t2 - t / 8.0).cwiseAbs().maxCoeff() <= 1e-12 * t.cwiseAbs().maxCoeff());
  }
  CHECK_THROWS_AS(dipolar_tensor(Vector3(0.0, 0.0, 1e-10), p.gamma_c, p.gamma_c, p.mu0),
                  ConfigError);
}

TEST_CASE("electron spin expectation") {
  const Vector3 up = electron_spin_expectation(Eigen::Vector3cd(1.0, 0.0, 0.0));
  CHECK((up - Vector3(0.0, 0.0, 1.0)).norm() < 1e-15);
  const Vector3 zero = electron_spin_expectation(Eigen::Vector3cd(0.0, 1.0, 0.0));
  CHECK(zero.norm() < 1e-15);

  for (double theta : {kPi / 2, kPi / 3}) {
    const Eigen::Vector2cd plus(std::cos(theta / 2), std::sin(theta / 2));
    const Vector3 s = electron_spin_expectation(plus);
    CHECK(s.z() == doctest::Approx(std::cos(theta)));
    CHECK(std::abs(s.x()) < 1e-15);
  }
  CHECK_THROWS(electron_spin_expectation(Eigen::Vector2cd(1.0, 1.0)));
}

TEST_CASE("conditional and effective fields") {
  const NvParams p;
  const Matrix3 a = dipolar_tensor(Vector3(3e-10, -1e-10, 5e-10), p.gamma_e, p.gamma_c, p.mu0);
  CHECK(conditional_hyperfine_field(a, Vector3::Zero()).norm() == 0.0);
  const Vector3 fp = conditional_hyperfine_field(a, Vector3(0, 0, 1));
  const Vector3 fm = conditional_hyperfine_field(a, Vector3(0, 0, -1));
  CHECK((fp + fm).norm() == 0.0);
  const Vector3 fs = conditional_hyperfine_field(a, Vector3(0, 0, 0.3));
  CHECK((fs - 0.3 * fp).norm() <= 1e-15 * fp.norm());

  const Vector3 bp = effective_field(Vector3::Zero(), fp, p.gamma_c);
  const Vector3 bm = effective_field(Vector3::Zero(), fm, p.gamma_c);
  CHECK((bp + bm).norm() == 0.0);

  const Vector3 b(0.0, 0.0, 1e-4);
  CHECK(effective_field(b, Vector3::Zero(), p.gamma_c) == b);
  const Vector3 an = Vector3(2e-5, 0.0, -3e-5) * p.gamma_c;
  CHECK((effective_field(b, an, p.gamma_c) - Vector3(2e-5, 0.0, 7e-5)).norm() < 1e-18);
}
