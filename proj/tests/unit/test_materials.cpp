#include <doctest.h>

#include "support.hpp"

#include <cmath>

#include "ote/errors.hpp"
#include "ote/materials.hpp"

using namespace ote;

TEST_CASE("vacuum permittivity is one on both axes") {
  const Material v = Material::vacuum();
  for (double w : {1e10, 3e14, 1e17}) {
    CHECK(v.permittivity(w) == cplx(1.0, 0.0));
    CHECK(v.permittivity_imag_axis(w) == 1.0);
  }
}

TEST_CASE("oscillator static and high-frequency limits") {
  const OscillatorModel one(1.0, {{3.0, 1e14, 0.0}});
  const cplx e0 = one.eps(1e6);
  CHECK(e0.real() == approx(4.0).epsilon(1e-12));
  CHECK(std::abs(e0.imag()) < 1e-15);
  const OscillatorModel two(2.0, {{2.0, 1e14, 0.0}});
  CHECK(two.eps_imag_axis(1e22) == approx(2.0).epsilon(1e-12));
}

TEST_CASE("stand-in models are passive and monotone on the imaginary axis") {
  for (const auto& name : {"silica-model", "silicon-model"}) {
    const Material m = builtin_material(name);
    double previous = INFINITY;
    for (int i = 0; i <= 400; ++i) {
      const double w = 1e11 * std::pow(1e5, i / 400.0);
      CHECK(m.permittivity(w).imag() >= 0.0);
      const double e = m.permittivity_imag_axis(w);
      CHECK(e <= previous);
      CHECK(e >= 1.0);
      previous = e;
    }
  }
}

TEST_CASE("silica stand-in matches a direct oscillator sum") {
  const Material m = builtin_material("silica-model");
  const auto& model = std::get<OscillatorModel>(m.response());
  const double w = 2e14;
  cplx expected = model.eps_inf();
  for (const auto& o : model.oscillators())
    expected += o.strength * o.resonance * o.resonance /
                cplx(o.resonance * o.resonance - w * w, -o.damping * w);
  CHECK(std::abs(m.permittivity(w) - expected) < 1e-12 * std::abs(expected));
  // and the imaginary axis by substitution w -> i xi
  const double xi = 5e13;
  double direct = model.eps_inf();
  for (const auto& o : model.oscillators())
    direct += o.strength * o.resonance * o.resonance / (o.resonance * o.resonance + xi * xi + o.damping * xi);
  CHECK(m.permittivity_imag_axis(xi) == approx(direct).epsilon(1e-13));
}

TEST_CASE("tabulated model reaches the imaginary axis through Kramers-Kronig") {
  const OscillatorModel model(1.5, {{2.0, 1e14, 5e12}});
  const TabulatedIndex table = tabulate(model, 1e10, 1e18, 4000);
  for (double xi : {1e14, 3e13, 5e14}) {
    INFO("xi = " << xi);
    CHECK(table.eps_imag_axis(xi) == approx(model.eps_imag_axis(xi)).epsilon(1e-2));
  }
}

TEST_CASE("table parsing") {
  SUBCASE("three rows") {
    const TabulatedIndex t = parse_table("1e13 2.0 0.1\n2e13 2.5 0.2\n3e13 3.0 0.0\n");
    CHECK(t.samples().size() == 3);
    CHECK(t.eps(2e13).real() == approx(2.5));
  }
  SUBCASE("decreasing frequency") {
    CHECK_THROWS_AS(parse_table("2e13 2 0.1\n1e13 2 0.1\n"), FormatError);
  }
  SUBCASE("negative loss") {
    CHECK_THROWS_AS(parse_table("1e13 2 -0.1\n2e13 2 0.1\n"), ValidationError);
  }
  SUBCASE("comments and eV input") {
    TableOptions eV;
    eV.energy_in_ev = true;
    const TabulatedIndex t = parse_table("# energy eps' eps''\n0.1 2 0.1\n0.2 3 0.2\n", eV);
    CHECK(t.omega_min() == approx(0.1 * 1.602176634e-19 / 1.054571817e-34).epsilon(1e-9));
  }
  SUBCASE("queries outside the support") {
    const TabulatedIndex t = parse_table("1e13 2 0.1\n2e13 2 0.1\n");
    CHECK_THROWS_AS(t.eps(5e13), RangeError);
    const TabulatedIndex clamp = parse_table("1e13 2 0.1\n2e13 2 0.1\n", {false, true});
    CHECK(clamp.eps(5e13).real() == approx(2.0));
  }
}

TEST_CASE("unknown built-in material") { CHECK_THROWS(builtin_material("unobtainium")); }
