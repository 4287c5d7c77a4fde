#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "ote/frequency.hpp"
#include "ote/materials.hpp"
#include "ote/types.hpp"

namespace ote {

// One lamellar grating body. Zones from the gap side: cover (1), grating
// layer of depth h (2), underlying layer of thickness delta (3), outer medium (4).
struct GratingGeometry {
  double period = 1e-6;           // D
  double depth = 0.0;             // h
  std::optional<double> thickness = 0.0;  // delta; nullopt = semi-infinite zone 3
  double filling = 0.5;           // ridge fraction of the period
  double shift = 0.0;             // lateral position of the ridge centre
  Material cover;
  Material ridge;
  Material groove;
  Material substrate;
  Material outer;

  bool semi_infinite() const { return !thickness.has_value(); }
  // A half-space continues zone 3 below, whatever `outer` says.
  const Material& zone4() const { return semi_infinite() ? substrate : outer; }
  // True when zone 2 carries no lateral modulation.
  bool uniform_profile() const;
  // Every zone is vacuum: the body does not scatter at all.
  bool empty() const;

  void validate() const;
  std::uint64_t hash() const;
};

// Mode point (omega or i xi, kx, ky) with orders n in [-M, M].
class ModeBasis {
 public:
  ModeBasis(Frequency freq, double kx, double ky, int truncation, double period,
            bool require_first_zone = true);

  const Frequency& frequency() const { return freq_; }
  cplx k0() const { return freq_.k0(); }
  double kx() const { return kx_; }
  double ky() const { return ky_; }
  double period() const { return period_; }
  int truncation() const { return M_; }
  int orders() const { return 2 * M_ + 1; }
  int dim() const { return 2 * orders(); }

  const RVec& kxn() const { return kxn_; }
  const RVec& kn() const { return kn_; }
  // sqrt(eps k0^2 - kn^2) per order with Im >= 0 (Re >= 0 on ties)
  CVec kz(cplx eps) const;
  const CVec& kz_vacuum() const { return kz_vac_; }
  // kn < omega/c; always false on the imaginary axis
  bool propagating(int order_index) const;

  ModeBasis with_truncation(int M) const;

 private:
  Frequency freq_;
  double kx_, ky_, period_;
  int M_;
  RVec kxn_, kn_;
  CVec kz_vac_;
};

cplx kz_branch(cplx kz_squared);

enum class BranchRule {
  decaying,  // Re D <= 0, ties to Im D >= 0
  tampered,  // wrong sheet; test hook for negative controls
};

struct FmmOptions {
  BranchRule branch = BranchRule::decaying;
  double max_mode_condition = 1e14;  // cond(P) above this is an error
};

// Diagonal per-order blocks of one homogeneous zone and the field matrices
// (E_x, E_y, H_x, H_y) x (TE, TM) for outgoing/incoming amplitudes.
struct BoundaryBlocks {
  CVec ax, ay;   // kxn/kn, ky/kn
  CVec bx, by;   // c/(sqrt(eps) omega) kxn kz/kn, c/(sqrt(eps) omega) ky kz/kn
  CVec kz;
  cplx sqrt_eps;
  CMat K, Kp, L, Lp;  // K multiplies +z amplitudes (with a minus sign), K' the -z ones
};

BoundaryBlocks boundary_blocks(const ModeBasis& basis, cplx eps);

struct ToeplitzPair {
  CMat eps;      // [[eps]]
  CMat inv_eps;  // [[1/eps]]
};

ToeplitzPair toeplitz_eps(const GratingGeometry& g, const Frequency& f, int M);

struct FGPair {
  CMat F, G;
  // F G in closed form (no 1/k0^2 cancellation); eigen-solves use this one
  CMat FG;
};

FGPair build_FG(const ModeBasis& basis, const GratingGeometry& g);

struct GratingEigensystem {
  CMat P;       // eigenvectors of F G
  CVec D;       // square roots of the eigenvalues
  CMat Pprime;  // F^{-1} P D
  double condition = 0.0;
};

GratingEigensystem eigensolve(const FGPair& fg, const FmmOptions& options = {});

class SMatrix {
 public:
  SMatrix() = default;
  SMatrix(CMat r_minus, CMat t_minus, CMat t_plus, CMat r_plus);

  static SMatrix identity(int dim);

  int dim() const { return static_cast<int>(r_minus_.rows()); }
  // Reflection back into zone 1 (outgoing -z) and into zone 4 (outgoing +z).
  const CMat& r_minus() const { return r_minus_; }
  const CMat& r_plus() const { return r_plus_; }
  // Transmission zone 4 -> zone 1 and zone 1 -> zone 4.
  const CMat& t_minus() const;
  const CMat& t_plus() const;

  bool transmission_masked() const { return masked_; }
  void mask_transmission() { masked_ = true; }

  // (TE, TM) x orders |n| <= mbar of a truncation-M matrix.
  SMatrix central_block(int M, int mbar) const;

 private:
  CMat r_minus_, t_minus_, t_plus_, r_plus_;
  bool masked_ = false;
};

SMatrix star_product(const SMatrix& a, const SMatrix& b);

// Moves the zone-1 reference plane by d through vacuum: R- picks up
// e^{i(kz_n + kz_n')d}, T- the one-sided phase of its outgoing order, T+ of its
// incoming one. `kz` is the vacuum kz per (polarization, order) entry.
SMatrix translate_smatrix(const SMatrix& s, const CVec& kz, double d);
SMatrix translate_smatrix(const SMatrix& s, const ModeBasis& basis, double d);

// The three cascaded pieces: zone1|zone2, zone-2 propagation + zone2|zone3,
// zone-3 propagation + zone3|zone4.
SMatrix smatrix_top(const ModeBasis& basis, const GratingGeometry& g, const FmmOptions& o = {});
SMatrix smatrix_grating(const ModeBasis& basis, const GratingGeometry& g, const FmmOptions& o = {});
SMatrix smatrix_bottom(const ModeBasis& basis, const GratingGeometry& g);

SMatrix assemble_smatrix(const ModeBasis& basis, const GratingGeometry& g,
                         const FmmOptions& options = {});
SMatrix semi_infinite_smatrix(const ModeBasis& basis, const GratingGeometry& g,
                              const FmmOptions& options = {});

// Zero-frequency scattering from the electrostatic potential problem.
SMatrix static_smatrix(const ModeBasis& basis, const GratingGeometry& g);

// Same body seen from below (z -> -z): zone 4 becomes the entrance side.
SMatrix mirror_smatrix(const SMatrix& s);

// Number of interface solves whose estimated reciprocal condition fell below 1e-12.
std::uint64_t condition_warnings();

}  // namespace ote
