#pragma once

#include <functional>
#include <vector>

#include "ote/integration.hpp"
#include "ote/neq_force.hpp"

namespace ote {

struct QuadratureSpec {
  double tolerance = 1e-2;           // global relative target
  double inner_factor = 0.5;         // each nesting level tightens the target by this factor
  double omega_min = 1e11;           // rad/s, lower end of the real-axis grid
  double population_floor = 1e-12;   // omega_max: largest n(w, T) drops below this
  double omega_max = 0.0;            // rad/s; 0 derives it from the temperatures
  double omega_panels_per_decade = 2.0;
  double ky_decay = 20.0;            // ky range past the light cone, in units of 1/d
  int max_panels = 400;              // per one-dimensional integral
  int max_matsubara_terms = 20000;
  int workers = 1;
  FmmOptions fmm;
  void validate() const;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  double imag = 0.0;
  std::size_t evaluations = 0;
  int terms = 0;  // Matsubara terms used
};

struct PressureDiagnostics {
  double max_imag_residual = 0.0;  // |Im| / |Re| of the integrated parts
  std::size_t mode_evaluations = 0;
  int M = 0;
  int mbar = 0;
  int matsubara_terms = 0;
};

// Pressure on body 1 along +z per unit area, N/m^2. Negative = attraction.
struct PressureResult {
  double total = 0.0;
  double eq_part = 0.0;
  double delta_part = 0.0;
  double error_estimate = 0.0;
  PressureDiagnostics diagnostics;
};

// Per-mode integrand on the real axis, per unit of dw/2pi dkx/2pi dky/2pi.
using RealAxisIntegrand = std::function<IntegrandValue(double omega, double kx, double ky)>;
// Per-mode integrand at fixed imaginary frequency, per unit of dkx/2pi dky/2pi.
using ModeIntegrand = std::function<IntegrandValue(double kx, double ky)>;

struct ModeDomain {
  double period = 1e-6;
  double distance = 1e-6;
  int M = 0;  // branch points of orders |n| <= M become panel edges
  bool kx_even = false;  // integrand symmetric under kx -> -kx: integrate half the zone
};

// Mirror symmetry of the pair: relative shift a multiple of D/2.
bool kx_symmetric(const GratingPair& bodies);

double omega_cutoff(const ThermalState& thermal, const QuadratureSpec& spec);

// int dkx/2pi over the zone, int dky/2pi over the real line (folded onto ky >= 0 when
// `fold_ky`), at real frequency omega. `abs_tol` is in the units of the result.
QuadResult integrate_k_real(const ModeIntegrand& f, double omega, const ModeDomain& domain,
                            const QuadratureSpec& spec, double rel_tol, bool fold_ky = true, double abs_tol = 0.0);
// Same measure at imaginary frequency xi.
QuadResult integrate_k_imag(const ModeIntegrand& f, double xi, const ModeDomain& domain, const QuadratureSpec& spec,
                            double rel_tol, double abs_tol = 0.0);
// int dw/2pi over [omega_lo, omega_hi] of the k integral. A coarse pilot pass sets an
// absolute error budget so that weak frequencies are not resolved to full relative accuracy.
QuadResult integrate_real_axis(const RealAxisIntegrand& f, double omega_lo, double omega_hi,
                               const ModeDomain& domain, const QuadratureSpec& spec, bool fold_ky = true);

class SMatrixCache;

// Non-equilibrium part of the pressure (negative of the force term), N/m^2.
QuadResult integrate_delta(const GratingPair& bodies, const ThermalState& thermal, double d, Truncation truncation,
                           const QuadratureSpec& spec, SMatrixCache* cache = nullptr);

// Equilibrium pressure at temperature T (T = 0 integrates over xi), N/m^2.
QuadResult matsubara_sum(const GratingPair& bodies, double T, double d, Truncation truncation,
                         const QuadratureSpec& spec, SMatrixCache* cache = nullptr);

// Generic Matsubara sum of a per-mode integrand family, exposed for tests.
QuadResult matsubara_series(const std::function<QuadResult(double xi, double rel_tol)>& term, double T, double d,
                            const QuadratureSpec& spec);

PressureResult pressure(const GratingPair& bodies, const ThermalState& thermal, double d, Truncation truncation,
                        const QuadratureSpec& spec, SMatrixCache* cache = nullptr);

// k-integrated non-equilibrium density at one omega, pressure convention, N/m^2 per rad/s.
QuadResult spectral_density(const GratingPair& bodies, const ThermalState& thermal, double d, double omega,
                            Truncation truncation, const QuadratureSpec& spec, SMatrixCache* cache = nullptr);

struct ModeSample {
  Frequency frequency;
  double kx;
  double ky;
};

struct ScanOptions {
  double accuracy = 1e-2;
  int cap = 30;
  int mbar_buffer = 4;  // orders kept beyond mbar while probing the trace tail
};

// Smallest mbar whose trace tail is below `accuracy`, then the smallest M >= mbar
// whose central block is stable under M -> M + 2.
Truncation convergence_scan(const GratingPair& bodies, double d, const ThermalState& thermal,
                            const std::vector<ModeSample>& samples, const ScanOptions& options,
                            const FmmOptions& fmm = {});

// Smallest M >= mbar at which every sample's central block moves by less than
// `accuracy` (relative to the block scale) under M -> M + 2.
int stable_truncation(const GratingPair& bodies, const std::vector<ModeSample>& samples, int mbar, double accuracy,
                      int cap, const FmmOptions& fmm = {});

// A deterministic probe set: thermal-peak frequencies and the first Matsubara
// frequency, at a few (kx, ky) inside the zone.
std::vector<ModeSample> default_scan_samples(const GratingPair& bodies, const ThermalState& thermal, double d);

}  // namespace ote
