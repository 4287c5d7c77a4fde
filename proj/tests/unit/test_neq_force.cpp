#include <doctest.h>

#include "support.hpp"

#include <cmath>
#include <random>

#include "ote/errors.hpp"
#include "ote/neq_force.hpp"
#include "ote/planar.hpp"
#include "ote/validation.hpp"

using namespace ote;

namespace {

double worst(const CMat& m) { return m.cwiseAbs().maxCoeff(); }

CMat scalar(cplx x) {
  CMat m(1, 1);
  m << x;
  return m;
}

}  // namespace

TEST_CASE("thermal populations") {
  const double w = 1e14;
  CHECK(thermal_N(w, 0.0) == approx(0.5 * phys::hbar * w));
  const double T_ln2 = phys::hbar * w / (phys::k_B * std::log(2.0));
  CHECK(thermal_N(w, T_ln2) == approx(1.5 * phys::hbar * w).epsilon(1e-12));
  CHECK(thermal_N(1e9, 1000.0) == approx(phys::k_B * 1000.0).epsilon(1e-4));

  CHECK(population_diff(w, 250.0, 250.0) == 0.0);
  CHECK(population_diff(w, 400.0, 200.0) == -population_diff(w, 200.0, 400.0));
  const double w300 = phys::k_B * 300.0 / phys::hbar;
  const double a = std::exp(-0.75), b = std::exp(-1.5);  // e^{-300/400}, e^{-300/200}
  CHECK(population_diff(w300, 400.0, 200.0) == approx(a / (1 - a) - b / (1 - b)).epsilon(1e-13));
}

TEST_CASE("f_alpha projections") {
  CVec kz(3);
  kz << cplx(2.0, 0.0), cplx(1.0, 0.0), cplx(0.0, 3.0);
  const std::vector<bool> prop{true, true, false};
  const ProjectorSet p = make_projectors(kz, prop);
  const CMat zero = CMat::Zero(3, 3);
  CHECK(worst(f_alpha(zero, -1, p) - CMat(p.pw_m1.weights.asDiagonal())) == 0.0);
  CHECK(worst(f_alpha(zero, 2, p) - CMat(p.pw_2.weights.asDiagonal())) == 0.0);

  CMat unitary = CMat::Zero(3, 3);
  unitary(0, 0) = std::polar(1.0, 0.3);
  unitary(1, 1) = std::polar(1.0, -1.2);
  const CMat f = f_alpha(unitary, -1, p);
  CHECK(std::abs(f(0, 0)) < 1e-16);
  CHECK(std::abs(f(1, 1)) < 1e-16);
  CHECK_THROWS_AS(f_alpha(zero, 3, p), ContractViolation);
}

TEST_CASE("cavity operators") {
  const auto [u0, v0] = cavity_operators(CMat::Zero(4, 4), CMat::Random(4, 4));
  CHECK(worst(u0 - CMat::Identity(4, 4)) == 0.0);
  CHECK(std::abs(cavity_operators(scalar(1.0), scalar(0.5)).first(0, 0) - 2.0) < 1e-15);
  CHECK_THROWS_AS(cavity_operators(scalar(1.0), scalar(1.0)), ResonanceError);

  // Neumann series at spectral radius 0.6 has converged to 1e-9 after 40 terms
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 10; ++trial) {
    CMat a(6, 6), b(6, 6);
    for (int i = 0; i < 36; ++i) {
      a(i) = cplx(g(rng), g(rng));
      b(i) = cplx(g(rng), g(rng));
    }
    a *= std::sqrt(0.6) / Eigen::JacobiSVD<CMat>(a).singularValues()(0);
    b *= std::sqrt(0.6) / Eigen::JacobiSVD<CMat>(b).singularValues()(0);
    const CMat step = a * b;
    CMat term = CMat::Identity(6, 6), sum = term;
    for (int k = 0; k < 40; ++k) sum += (term = term * step);
    CHECK(worst(cavity_operators(a, b).first - sum) < 1e-8);
  }
}

TEST_CASE("composite reflection") {
  const CMat r1 = scalar(0.1), t = scalar(0.9), r2 = scalar(0.5), r1p = scalar(0.2);
  const CMat u21 = cavity_operators(r1p, r2).second;
  CHECK(std::abs(composite_R12(r1, t, t, u21, r2)(0, 0) - (0.1 + 0.81 * 0.5 / (1.0 - 0.1))) < 1e-15);
  CHECK(worst(composite_R12(r1, CMat::Zero(1, 1), CMat::Zero(1, 1), u21, r2) - r1) == 0.0);
  CHECK(worst(composite_R12(r1, t, t, u21, CMat::Zero(1, 1)) - r1) == 0.0);
}

TEST_CASE("non-equilibrium integrand vanishes without a population imbalance") {
  const GratingPair b = reference_gratings();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const ModeBasis basis(Frequency::real(2e13 + 2e14 * u(rng)), 3e6 * (u(rng) - 0.5), 4e6 * u(rng), 2, 1e-6);
    const ModeOperators ops = build_mode_operators(basis, b, 2e-6, 1);
    CHECK(delta_integrand(ops, {300.0, 300.0, 300.0}).value == 0.0);
    // body temperatures equal to each other and to the environment's zero point
    CHECK(delta_integrand(ops, {0.0, 0.0, 0.0}).value == 0.0);
  }
}

TEST_CASE("specular limit matches the scalar planar integrand") {
  const GratingPair b = reference_gratings(1.0);
  const SlabPair pair{planar_body(b.body1, GrooveBranch::ridge), planar_body(b.body2, GrooveBranch::ridge), 3e-6};
  const ThermalState th{200.0, 400.0, 10.0};
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    const double omega = 1e13 + 3e14 * u(rng);
    const double kx = 3e6 * (u(rng) - 0.5), ky = 5e6 * u(rng);
    const ModeBasis basis(Frequency::real(omega), kx, ky, 0, 1e-6);
    const double fmm = delta_integrand(build_mode_operators(basis, b, 3e-6, 0), th).value;
    const double planar = slab_delta_integrand(pair, th, omega, std::hypot(kx, ky)).value;
    CHECK(std::abs(fmm - planar) <= 1e-9 * std::abs(planar) + 1e-60);
  }
}

TEST_CASE("equilibrium summand") {
  const GratingPair b = reference_gratings();
  SUBCASE("vanishes at large distance") {
    const double far = eq_integrand_imagfreq(1e14, 1e5, 2e5, b, 1e-3, {2, 1}).value;
    CHECK(std::abs(far) < 1e-300);
  }
  SUBCASE("perfect mirrors give the ideal per-mode summand") {
    // single mode, r = -1 on both sides: -2 kappa e^{-2 kappa d} / (1 - e^{-2 kappa d})
    ModeOperators ops;
    ops.R1_plus = scalar(-1.0);
    const double kappa = 2e6, d = 1e-6;
    ops.R2_minus = scalar(-std::exp(-2.0 * kappa * d));
    ops.kz = CVec::Constant(1, cplx(0.0, kappa));
    ops.propagating = {false};
    const double x = std::exp(-2.0 * kappa * d);
    CHECK(eq_integrand(ops).value == approx(-2.0 * kappa * x / (1.0 - x)).epsilon(1e-13));
  }
}
