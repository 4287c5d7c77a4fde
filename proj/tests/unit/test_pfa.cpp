#include <doctest.h>

#include "support.hpp"

#include <cmath>

#include "ote/errors.hpp"
#include "ote/planar.hpp"
#include "ote/validation.hpp"

using namespace ote;

namespace {

QuadratureSpec spec_at(double tol) {
  QuadratureSpec s;
  s.tolerance = tol;
  return s;
}

}  // namespace

TEST_CASE("planar pressure basics") {
  const QuadratureSpec spec = spec_at(1e-5);
  SUBCASE("vacuum bodies") {
    const SlabPair empty{slab(Material::vacuum(), 1e-6), slab(Material::vacuum(), std::nullopt), 1e-6};
    const PressureResult p = slab_pressure(empty, {300.0, 100.0, 10.0}, spec);
    CHECK(p.total == 0.0);
  }
  SUBCASE("silica half-spaces attract at equilibrium") {
    const Material silica = builtin_material("silica-model");
    const SlabPair pair{slab(silica, std::nullopt), slab(silica, std::nullopt), 1e-6};
    const PressureResult p = slab_pressure(pair, {300.0, 300.0, 300.0}, spec);
    CHECK(p.delta_part == 0.0);
    CHECK(p.total < 0.0);
  }
  SUBCASE("a cold environment leaves a distance-independent tail") {
    const Material silica = builtin_material("silica-model");
    auto delta = [&](double d) {
      const SlabPair pair{slab(silica, 2e-6), slab(silica, 2e-6), d};
      return slab_pressure(pair, {300.0, 300.0, 0.0}, spec_at(1e-4)).delta_part;
    };
    const double a = delta(40e-6), b = delta(80e-6);
    CHECK(a != 0.0);
    CHECK(std::abs(a - b) < 0.05 * std::abs(a));
  }
  SUBCASE("invalid distance") {
    const Material silica = builtin_material("silica-model");
    const SlabPair pair{slab(silica, 1e-6), slab(silica, std::nullopt), -1e-6};
    CHECK_THROWS_AS(slab_pressure(pair, {300.0, 300.0, 300.0}, spec), ValidationError);
  }
}

TEST_CASE("proximity approximation limits") {
  const QuadratureSpec spec = spec_at(1e-4);
  const ThermalState th{200.0, 400.0, 10.0};
  const double d = 3e-6;
  SUBCASE("full filling is the slab result") {
    const GratingPair b = reference_gratings(1.0);
    const SlabPair slabs{planar_body(b.body1, GrooveBranch::ridge), planar_body(b.body2, GrooveBranch::ridge), d};
    CHECK(pfa_pressure(b.body1, b.body2, d, th, spec).total == slab_pressure(slabs, th, spec).total);
  }
  SUBCASE("empty filling widens the gap by both depths") {
    const GratingPair b = reference_gratings(0.0);
    const double h1 = b.body1.depth, h2 = b.body2.depth;
    const SlabPair thin{slab(b.body1.substrate, *b.body1.thickness), slab(b.body2.substrate, std::nullopt),
                        d + h1 + h2};
    CHECK(pfa_pressure(b.body1, b.body2, d, th, spec).total == slab_pressure(thin, th, spec).total);
  }
  SUBCASE("preconditions") {
    GratingPair b = reference_gratings();
    CHECK(pfa_applicable(b.body1, b.body2));
    b.body2.filling = 0.4;
    CHECK_FALSE(pfa_applicable(b.body1, b.body2));
    CHECK_THROWS_AS(pfa_pressure(b.body1, b.body2, d, th, spec), ValidationError);
    b.body2.filling = 0.5;
    b.body2.shift = 0.1e-6;
    CHECK_THROWS_AS(pfa_pressure(b.body1, b.body2, d, th, spec), ValidationError);
  }
}
