#include <doctest.h>

#include "support.hpp"

#include <cmath>

#include "ote/errors.hpp"
#include "ote/integration.hpp"
#include "ote/planar.hpp"
#include "ote/quadrature.hpp"
#include "ote/validation.hpp"

using namespace ote;

namespace {

GratingPair silicon_slabs(double filling = 1.0) {
  GratingPair b = reference_gratings(filling);
  b.body1.ridge = b.body1.substrate = b.body2.ridge;
  return b;
}

}  // namespace

TEST_CASE("adaptive Gauss-Kronrod") {
  AdaptiveOptions o;
  o.rel_tol = 1e-12;
  const Estimate e = integrate_adaptive([](double x) { return cplx(std::exp(-x) * std::cos(3 * x), 0.0); }, 0.0, 20.0, o);
  CHECK(e.value.real() == approx((1.0 - std::exp(-20.0) * (std::cos(60.0) - 3 * std::sin(60.0))) / 10.0)
                              .epsilon(1e-11));
  o.max_panels = 3;
  CHECK_THROWS_AS(integrate_adaptive([](double x) { return cplx(1.0 / std::sqrt(x + 1e-12), 0.0); }, 0.0, 1.0, o),
                  QuadratureError);
}

TEST_CASE("separable test integrand over the mode domain") {
  QuadratureSpec spec;
  const ModeDomain dom{1e-6, 2e-6, 1};
  // exp(-(ky/a)^2) cos^2(kx D / 2) over the full zone, per dkx dky / 4pi^2
  const double a = 1e6, zone = phys::pi / dom.period;
  auto f = [&](double kx, double ky) {
    const double c = std::cos(kx * dom.period / 2.0);
    return IntegrandValue{std::exp(-ky * ky / (a * a)) * c * c, 0.0};
  };
  const QuadResult r = integrate_k_imag(f, 1e14, dom, spec, 1e-10);
  const double expected = (zone) * (a * std::sqrt(phys::pi)) / (4.0 * phys::pi * phys::pi);
  CHECK(r.value == approx(expected).epsilon(1e-8));

  // the ky fold of the real-axis integral agrees with the unfolded one
  const double omega = 4e14;
  auto g = [&](double kx, double ky) { return IntegrandValue{std::exp(-std::pow(ky - 0.3e6, 2) / (a * a)) * (1 + 0.1 * kx / zone), 0.0}; };
  auto even = [&](double kx, double ky) { return IntegrandValue{0.5 * (g(kx, ky).value + g(kx, -ky).value), 0.0}; };
  const double folded = integrate_k_real(even, omega, dom, spec, 1e-12, true).value;
  const double full = integrate_k_real(even, omega, dom, spec, 1e-12, false).value;
  CHECK(std::abs(folded - full) <= 1e-10 * std::abs(full));
}

TEST_CASE("Matsubara series") {
  QuadratureSpec spec;
  spec.tolerance = 1e-12;
  const double T = 300.0;
  const double xi1 = 2.0 * phys::pi * phys::k_B * T / phys::hbar;
  auto geometric = [&](double xi, double) {
    QuadResult r;
    r.value = std::pow(0.5, std::round(xi / xi1));
    return r;
  };
  const QuadResult s = matsubara_series(geometric, T, 1e-6, spec);
  CHECK(s.value == approx(1.5 * phys::k_B * T).epsilon(1e-10));

  // zero temperature turns the sum into hbar/2pi int dxi
  auto decay = [](double xi, double) {
    QuadResult r;
    r.value = std::exp(-xi / 1e14);
    return r;
  };
  CHECK(matsubara_series(decay, 0.0, 1e-6, spec).value ==
        approx(phys::hbar / (2.0 * phys::pi) * 1e14).epsilon(1e-9));
}

TEST_CASE("Matsubara terms decay at large distance") {
  QuadratureSpec spec;
  spec.tolerance = 1e-4;
  const GratingPair b = silicon_slabs();
  const double d = 5e-6, T = 300.0;
  const ModeDomain dom{b.body1.period, d, 0, true};
  const double xi1 = 2.0 * phys::pi * phys::k_B * T / phys::hbar;
  auto term = [&](int l) {
    auto f = [&](double kx, double ky) { return eq_integrand_imagfreq(xi1 * l, kx, ky, b, d, {0, 0}); };
    return integrate_k_imag(f, xi1 * l, dom, spec, 1e-6).value;
  };
  CHECK(std::abs(term(10) / term(1)) < 1e-3);
}

TEST_CASE("equal temperatures give an exact zero without evaluations") {
  QuadratureSpec spec;
  const QuadResult r = integrate_delta(reference_gratings(), {300.0, 300.0, 300.0}, 2e-6, {2, 1}, spec);
  CHECK(r.value == 0.0);
  CHECK(r.error == 0.0);
  CHECK(r.evaluations == 0);
  CHECK(spectral_density(reference_gratings(), {250.0, 250.0, 250.0}, 2e-6, 1e14, {1, 1}, spec).value == 0.0);
}

TEST_CASE("spectral density dies with the populations") {
  QuadratureSpec spec;
  spec.tolerance = 1e-3;
  const GratingPair b = reference_gratings(1.0);
  const ThermalState th{200.0, 400.0, 10.0};
  const double peak = std::abs(spectral_density(b, th, 4e-6, 1e14, {0, 0}, spec).value);
  const double far = std::abs(spectral_density(b, th, 4e-6, 5e15, {0, 0}, spec).value);
  CHECK(peak > 0.0);
  CHECK(far < 1e-12 * peak);
}

TEST_CASE("FMM pipeline on uniform bodies equals the planar pipeline") {
  QuadratureSpec spec;
  spec.tolerance = 1e-5;
  const GratingPair b = silicon_slabs();
  const ThermalState eq{300.0, 300.0, 300.0};
  const double fmm = pressure(b, eq, 2e-6, {0, 0}, spec).total;
  const SlabPair pair{planar_body(b.body1, GrooveBranch::ridge), planar_body(b.body2, GrooveBranch::ridge), 2e-6};
  const double planar = slab_pressure(pair, eq, spec).total;
  CHECK(fmm < 0.0);
  CHECK(fmm == approx(planar).epsilon(3e-4));
  // the orders outside the first zone close the gap
  CHECK(pressure(b, eq, 2e-6, {2, 2}, spec).total == approx(planar).epsilon(1e-8));
}

TEST_CASE("truncation scan") {
  const ThermalState th{200.0, 400.0, 10.0};
  SUBCASE("uniform bodies need no buffer orders") {
    // orders still count in the trace: they carry the wavevectors outside the first zone
    const GratingPair b = silicon_slabs();
    const Truncation t = convergence_scan(b, 2e-6, th, default_scan_samples(b, th, 2e-6), {});
    CHECK(t.M == t.mbar);
    CHECK(convergence_scan(b, 20e-6, th, default_scan_samples(b, th, 20e-6), {}).M == 0);
  }
  SUBCASE("looser accuracy never asks for more") {
    const GratingPair b = reference_gratings();
    const auto samples = default_scan_samples(b, th, 3e-6);
    ScanOptions tight, loose;
    tight.accuracy = 1e-3;
    loose.accuracy = 1e-2;
    tight.cap = loose.cap = 12;
    const Truncation a = convergence_scan(b, 3e-6, th, samples, tight);
    const Truncation c = convergence_scan(b, 3e-6, th, samples, loose);
    CHECK(c.M <= a.M);
    CHECK(c.mbar <= a.mbar);
  }
}
