#include <doctest.h>

#include "support.hpp"

#include <cmath>
#include <random>

#include "ote/errors.hpp"
#include "ote/fmm.hpp"
#include "ote/neq_force.hpp"
#include "ote/planar.hpp"

using namespace ote;

namespace {

const Material eps4("eps4", OscillatorModel(4.0, {}));
const Material eps2("eps2", OscillatorModel(2.0, {}));
const Material eps5("eps5", OscillatorModel(5.0, {}));

GratingGeometry lamellar(const Material& ridge, const Material& groove, double f = 0.5) {
  GratingGeometry g;
  g.period = 1e-6;
  g.depth = 0.5e-6;
  g.thickness = 0.0;
  g.filling = f;
  g.ridge = ridge;
  g.groove = groove;
  g.substrate = ridge;
  return g;
}

double worst(const CMat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

double distance(const SMatrix& a, const SMatrix& b) {
  return std::max({worst(a.r_minus() - b.r_minus()), worst(a.r_plus() - b.r_plus()),
                   worst(a.t_minus() - b.t_minus()), worst(a.t_plus() - b.t_plus())});
}

SMatrix random_contraction(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  CMat m(2 * n, 2 * n);
  for (int i = 0; i < 2 * n; ++i)
    for (int j = 0; j < 2 * n; ++j) m(i, j) = cplx(g(rng), g(rng));
  m *= 0.9 / Eigen::JacobiSVD<CMat>(m).singularValues()(0);
  return SMatrix(m.topLeftCorner(n, n), m.topRightCorner(n, n), m.bottomLeftCorner(n, n), m.bottomRightCorner(n, n));
}

// Sum of reflected and transmitted efficiencies for incidence from the gap side.
double efficiency_sum(const ModeBasis& b, const SMatrix& s, int pol) {
  const int N = b.orders(), M = b.truncation();
  const int inc = pol * N + M;
  double sum = 0.0;
  for (int j = 0; j < 2 * N; ++j) {
    const int order = j % N;
    if (!b.propagating(order)) continue;
    const double w = b.kz_vacuum()(order).real() / b.kz_vacuum()(M).real();
    sum += w * (std::norm(s.r_minus()(j, inc)) + std::norm(s.t_plus()(j, inc)));
  }
  return sum;
}

}  // namespace

TEST_CASE("basis branch and zone checks") {
  const ModeBasis b(Frequency::real(1e15), 1e6, 2e6, 3, 1e-6);
  for (int i = 0; i < b.orders(); ++i) {
    const cplx kz = b.kz_vacuum()(i);
    CHECK(kz.imag() >= 0.0);
    if (kz.imag() == 0.0) CHECK(kz.real() >= 0.0);
  }
  CHECK_THROWS(ModeBasis(Frequency::real(1e15), 4e6, 0.0, 2, 1e-6));
}

TEST_CASE("Toeplitz coefficients") {
  SUBCASE("constant profile") {
    const auto t = toeplitz_eps(lamellar(eps4, eps4), Frequency::real(1e14), 3);
    CHECK(worst(t.eps - 4.0 * CMat::Identity(7, 7)) < 1e-15);
  }
  SUBCASE("half filling has no even harmonics") {
    const auto t = toeplitz_eps(lamellar(eps4, Material::vacuum()), Frequency::real(1e14), 4);
    for (int n = 2; n <= 4; n += 2) CHECK(std::abs(t.eps(4 + n, 4)) == 0.0);
  }
  SUBCASE("first harmonic in closed form") {
    GratingGeometry g = lamellar(eps5, eps2, 0.3);
    g.shift = 0.17e-6;
    const auto t = toeplitz_eps(g, Frequency::real(1e14), 2);
    // entry (n, 0) carries the n-th Fourier coefficient
    const cplx expected = 3.0 * std::sin(0.3 * phys::pi) / phys::pi * std::exp(cplx(0, -2.0 * phys::pi * g.shift / g.period));
    CHECK(std::abs(t.eps(3, 2) - expected) < 1e-14);
  }
}

TEST_CASE("FG operator") {
  SUBCASE("vacuum at normal incidence") {
    GratingGeometry g = lamellar(Material::vacuum(), Material::vacuum());
    const ModeBasis b(Frequency::real(2e15), 0.0, 0.0, 0, 1e-6);
    const FGPair fg = build_FG(b, g);
    const double k0 = 2e15 / phys::c;
    CHECK(worst(fg.FG + k0 * k0 * CMat::Identity(2, 2)) < 1e-12 * k0 * k0);
  }
  SUBCASE("uniform medium eigenvalues are -kz^2") {
    const ModeBasis b(Frequency::real(2e15), 0.7e6, 1.1e6, 2, 1e-6);
    const FGPair fg = build_FG(b, lamellar(eps4, eps4));
    const auto ev = fg.FG.eigenvalues();
    const CVec kz = b.kz(4.0);
    for (int n = 0; kz.size() > n; ++n) {
      int hits = 0;
      for (int k = 0; k < ev.size(); ++k)
        if (std::abs(ev(k) + kz(n) * kz(n)) < 1e-9 * std::norm(b.k0())) ++hits;
      CHECK(hits == 2);
    }
  }
  SUBCASE("inverse rule differs from the direct one on a two-material profile") {
    const auto t = toeplitz_eps(lamellar(eps4, Material::vacuum()), Frequency::real(1e14), 2);
    CHECK(worst(t.inv_eps.inverse() - t.eps) > 1e-3);
  }
}

TEST_CASE("eigensolve residual and branch") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Material lossy = builtin_material("silicon-model");
  for (int i = 0; i < 10; ++i) {
    const ModeBasis b(Frequency::real(1e14 * (1 + 5 * u(rng))), 3e6 * (u(rng) - 0.5), 2e6 * u(rng), 3, 1e-6);
    const FGPair fg = build_FG(b, lamellar(lossy, Material::vacuum(), 0.2 + 0.6 * u(rng)));
    const GratingEigensystem es = eigensolve(fg);
    const CMat lhs = fg.FG * es.P;
    const CMat rhs = es.P * es.D.array().square().matrix().asDiagonal();
    CHECK((lhs - rhs).norm() / fg.FG.norm() < 1e-10);
    for (int k = 0; k < es.D.size(); ++k) CHECK(es.D(k).real() <= 0.0);
  }
}

TEST_CASE("empty body scatters nothing") {
  GratingGeometry g = lamellar(Material::vacuum(), Material::vacuum());
  g.thickness = 1e-6;
  const ModeBasis b(Frequency::real(3e14), 0.4e6, 0.2e6, 2, 1e-6);
  const SMatrix s = assemble_smatrix(b, g);
  CHECK(worst(s.r_minus()) < 1e-13);
  CHECK(worst(s.r_plus()) < 1e-13);
  // amplitudes are referenced at the two outer surfaces, so transmission is free propagation across the body
  const CVec kz = b.kz_vacuum();
  CVec phase(2 * kz.size());
  phase << kz, kz;
  const CMat expected = (cplx(0.0, 1.0) * phase * (g.depth + *g.thickness)).array().exp().matrix().asDiagonal();
  CHECK(worst(s.t_plus() - expected) < 1e-12);
  CHECK(worst(s.t_minus() - expected) < 1e-12);
}

TEST_CASE("uniform body reproduces the Fabry-Perot slab") {
  GratingGeometry g = lamellar(eps4, eps4);
  g.thickness = 0.7e-6;
  const PlanarBody slab_body = slab(eps4, 1.2e-6);
  const ModeBasis b(Frequency::real(2.5e15), 2.1e6, 1.3e6, 2, 1e-6);
  const SMatrix s = assemble_smatrix(b, g);
  const int N = b.orders();
  for (int pol = 0; pol < 2; ++pol) {
    const int i = pol * N + 2;
    const PlanarResponse r = planar_response(slab_body, b.frequency(), b.kn()(2), pol ? Polarization::TM : Polarization::TE);
    CHECK(std::abs(s.r_minus()(i, i) - r.r_front) < 1e-12);
    CHECK(std::abs(s.t_plus()(i, i) - r.t_in) < 1e-12);
  }
}

TEST_CASE("lossless grating conserves energy; the tampered branch does not") {
  GratingGeometry g = lamellar(eps4, Material::vacuum());
  g.substrate = Material::vacuum();
  const double omega = 2.0 * phys::pi * phys::c / 1.5e-6;
  const ModeBasis b(Frequency::real(omega), 0.0, 0.0, 8, 1e-6);
  const SMatrix s = assemble_smatrix(b, g);
  for (int pol = 0; pol < 2; ++pol) CHECK(std::abs(efficiency_sum(b, s, pol) - 1.0) < 1e-8);

  FmmOptions bad;
  bad.branch = BranchRule::tampered;
  bool broken = false;
  try {
    const SMatrix t = assemble_smatrix(b, g, bad);
    for (int pol = 0; pol < 2; ++pol) broken = broken || !(std::abs(efficiency_sum(b, t, pol) - 1.0) < 1e-8);
  } catch (const NumericalError&) {
    broken = true;
  }
  CHECK(broken);
}

TEST_CASE("star product") {
  SUBCASE("scalar closed form") {
    CMat h(1, 1), one(1, 1), root(1, 1);
    h << 0.5;
    one << 1.0;
    root << std::sqrt(0.5);
    // r = r_a + t_a (1 - r_b r_a')^-1 r_b t_a'
    CHECK(std::abs(star_product(SMatrix(h, one, one, h), SMatrix(h, one, one, h)).r_minus()(0, 0) - 7.0 / 6.0) < 1e-15);
    CHECK(std::abs(star_product(SMatrix(h, root, root, h), SMatrix(h, one, one, h)).r_minus()(0, 0) - 5.0 / 6.0) <
          1e-15);
  }
  SUBCASE("identity and associativity on random contractions") {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 20; ++i) {
      const SMatrix a = random_contraction(rng, 4), b = random_contraction(rng, 4), c = random_contraction(rng, 4);
      CHECK(distance(star_product(a, SMatrix::identity(4)), a) < 1e-14);
      CHECK(distance(star_product(SMatrix::identity(4), a), a) < 1e-14);
      CHECK(distance(star_product(star_product(a, b), c), star_product(a, star_product(b, c))) < 1e-12);
    }
  }
}

TEST_CASE("translation") {
  std::mt19937_64 rng(3);
  const SMatrix s = random_contraction(rng, 2);
  CVec kz(2);
  kz << cplx(2e6, 0.0), cplx(0.0, 3e6);
  CHECK(distance(translate_smatrix(s, kz, 0.0), s) == 0.0);
  const double d = 0.4e-6;
  const SMatrix t = translate_smatrix(s, kz, d);
  CHECK(std::abs(t.r_minus()(1, 1)) == approx(std::abs(s.r_minus()(1, 1)) * std::exp(-2.0 * 3e6 * d)));
  CHECK(std::abs(t.r_minus()(0, 0)) == approx(std::abs(s.r_minus()(0, 0))));
  CHECK(std::arg(t.r_minus()(0, 0) / s.r_minus()(0, 0)) == approx(std::remainder(2.0 * 2e6 * d, 2 * phys::pi)));
}

TEST_CASE("half-space body") {
  const Material si = builtin_material("silica-model");
  GratingGeometry g = lamellar(si, si);
  g.thickness = std::nullopt;
  const double omega = 2e14;  // inside the absorption band of the silica model
  const ModeBasis b(Frequency::real(omega), 0.3e6, 0.1e6, 1, 1e-6);
  const SMatrix half = semi_infinite_smatrix(b, g);
  SUBCASE("Fresnel interface") {
    const int N = b.orders();
    const cplx kz = b.kz_vacuum()(1), kzs = b.kz(si.permittivity(omega))(1);
    CHECK(std::abs(half.r_minus()(1, 1) - (kz - kzs) / (kz + kzs)) < 1e-12);
    CHECK(std::abs(half.r_minus()(N + 1, N + 1) - planar_response(slab(si, std::nullopt), b.frequency(), b.kn()(1),
                                                                  Polarization::TM).r_front) < 1e-12);
  }
  SUBCASE("transmission blocks are not available") { CHECK_THROWS_AS(half.t_plus(), ContractViolation); }
  SUBCASE("a thick lossy layer approaches the half-space") {
    GratingGeometry thick = g;
    thick.thickness = 50e-6;
    CHECK(worst(assemble_smatrix(b, thick).r_minus() - half.r_minus()) < 1e-6);
  }
}
