#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "ote/fmm.hpp"
#include "ote/types.hpp"

namespace ote {

struct ThermalState {
  double T1 = 300.0;  // body 1 (lower grating), K
  double T2 = 300.0;  // body 2 (upper grating), K
  double Te = 300.0;  // environment, K

  bool equilibrium() const { return T1 == T2 && T2 == Te; }
  void validate() const;
};

// Bose-Einstein occupation 1/(e^{hbar w / kT} - 1); zero at T = 0.
double occupation(double omega, double T);
// hbar w (1/2 + n)
double thermal_N(double omega, double T);
// n(w, Ti) - n(w, Tj); exactly zero when Ti == Tj
double population_diff(double omega, double Ti, double Tj);

enum class Sector { propagating, evanescent };

// Diagonal weight kz^power on the orders of one sector, zero on the others.
struct Projector {
  Sector sector;
  int power;
  CVec weights;
};

Projector make_projector(const CVec& kz, const std::vector<bool>& propagating, Sector sector, int power);

struct ProjectorSet {
  Projector pw_m1, ew_m1, pw_2, ew_2;
};

ProjectorSet make_projectors(const CVec& kz, const std::vector<bool>& propagating);

// alpha = -1 or 2
CMat f_alpha(const CMat& R, int alpha, const ProjectorSet& p);

std::pair<CMat, CMat> cavity_operators(const CMat& R1_plus, const CMat& R2_minus);

CMat composite_R12(const CMat& R1_minus, const CMat& T1_minus, const CMat& T1_plus, const CMat& U21,
                   const CMat& R2_minus);

// Body operators at one mode point, restricted to |n| <= mbar and expressed in
// the gap frame (body 2 already translated by the distance).
struct ModeOperators {
  CMat R1_plus;
  std::optional<CMat> R1_minus, T1_plus, T1_minus;  // absent for a half-space body 1
  CMat R2_minus;
  std::optional<CMat> T2_minus;                     // absent for a half-space body 2
  CVec kz;                         // vacuum kz per (polarization, order)
  std::vector<bool> propagating;   // per (polarization, order)
  double omega = 0.0;
};

struct GratingPair {
  GratingGeometry body1;  // lower body, emits toward +z
  GratingGeometry body2;  // upper body
  void validate(bool need_body1_transmission) const;
};

class SMatrixCache;

struct Truncation {
  int M = 0;
  int mbar = 0;
};

// S-matrix of one body (in its own frame) with optional caching.
SMatrix body_smatrix(const ModeBasis& basis, const GratingGeometry& g, const FmmOptions& options,
                     SMatrixCache* cache);

ModeOperators build_mode_operators(const ModeBasis& basis, const GratingPair& bodies, double d,
                                   int mbar, const FmmOptions& options = {}, SMatrixCache* cache = nullptr);

struct IntegrandValue {
  double value = 0.0;
  double imag = 0.0;  // residual imaginary part of the trace (diagnostic)
};

// -hbar tr[...] of the non-equilibrium bracket: z-force on body 1 per unit of
// dw/2pi dkx/2pi dky/2pi (N/m^2 per measure). Positive pushes body 1 toward body 2.
IntegrandValue delta_integrand(const ModeOperators& ops, const ThermalState& thermal);

// Per-mode Matsubara summand in pressure convention (negative = attraction):
//   -tr[(1 - R1 R2)^-1 R1 (K R2 + R2 K)],  K = diag(kappa)
IntegrandValue eq_integrand(const ModeOperators& ops);

IntegrandValue eq_integrand_imagfreq(double xi, double kx, double ky, const GratingPair& bodies, double d,
                                     Truncation truncation, const FmmOptions& options = {},
                                     SMatrixCache* cache = nullptr);

}  // namespace ote
