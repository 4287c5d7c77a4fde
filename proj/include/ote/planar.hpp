#pragma once

#include <optional>
#include <vector>

#include "ote/fmm.hpp"
#include "ote/quadrature.hpp"

namespace ote {

struct PlanarLayer {
  Material material;
  double thickness = 0.0;
};

// Layers listed from the gap outward. Without a half-space the stack ends in vacuum.
struct PlanarBody {
  std::vector<PlanarLayer> layers;
  std::optional<Material> half_space;

  bool finite() const { return !half_space.has_value(); }
};

PlanarBody slab(const Material& m, std::optional<double> thickness);

struct SlabPair {
  PlanarBody body1;  // lower, emits toward +z
  PlanarBody body2;
  double distance = 1e-6;
  void validate(bool need_body1_transmission) const;
};

enum class Polarization { TE, TM };

// Two-port response of a body, amplitudes referenced at its gap-side and far surfaces.
struct PlanarResponse {
  cplx r_front = 0.0;  // seen from the gap
  cplx r_back = 0.0;   // seen from the far side
  cplx t_in = 0.0;     // gap -> far side
  cplx t_out = 0.0;    // far side -> gap
  bool transmits = false;
};

// k is the in-plane wavevector modulus.
PlanarResponse planar_response(const PlanarBody& body, const Frequency& f, double k, Polarization p);

// z-force density on body 1 per unit of dw/2pi d^2k/(2pi)^2, summed over both polarizations.
IntegrandValue slab_delta_integrand(const SlabPair& pair, const ThermalState& thermal, double omega, double k);
// Per-mode Matsubara summand, pressure convention, both polarizations.
IntegrandValue slab_eq_integrand(const SlabPair& pair, double xi, double k);

PressureResult slab_pressure(const SlabPair& pair, const ThermalState& thermal, const QuadratureSpec& spec);

enum class GrooveBranch { ridge, groove };

// Planar body obtained by filling zone 2 of the grating with one of its materials.
PlanarBody planar_body(const GratingGeometry& g, GrooveBranch branch);

// f P(ridge-filled) + (1 - f) P(groove-filled), for aligned gratings of equal filling.
PressureResult pfa_pressure(const GratingGeometry& g1, const GratingGeometry& g2, double d,
                            const ThermalState& thermal, const QuadratureSpec& spec);

// True when the pair satisfies the PFA precondition.
bool pfa_applicable(const GratingGeometry& g1, const GratingGeometry& g2);

}  // namespace ote
