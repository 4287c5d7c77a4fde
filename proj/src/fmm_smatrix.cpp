#include <atomic>
#include <cmath>

#include <fmt/format.h>

#include "ote/errors.hpp"
#include "ote/fmm.hpp"

namespace ote {

namespace {

std::atomic<std::uint64_t> g_condition_warnings{0};

// Field matrices of one zone at an interface: rows (E_x, E_y, H_x, H_y) for
// the vector formulation or (phi, eps dphi/dz) for the static one; columns
// are the +z (plus) and -z (minus) amplitudes.
struct ZoneFields {
  CMat plus, minus;
};

ZoneFields homogeneous_fields(const BoundaryBlocks& b) {
  const int n = static_cast<int>(b.K.rows());
  ZoneFields z;
  z.plus.resize(2 * n, n);
  z.plus << -b.K, -b.L;
  z.minus.resize(2 * n, n);
  z.minus << b.Kp, b.Lp;
  return z;
}

ZoneFields grating_fields(const GratingEigensystem& e) {
  const int n = static_cast<int>(e.P.rows());
  ZoneFields z;
  z.plus.resize(2 * n, n);
  z.plus << e.P, e.Pprime;
  z.minus.resize(2 * n, n);
  z.minus << e.P, -e.Pprime;
  return z;
}

// Field continuity  L+ a_L+ + L- a_L- = R+ a_R+ + R- a_R-  solved for the outgoing
// amplitudes (a_L-, a_R+) in terms of the incoming (a_L+, a_R-).
SMatrix interface_smatrix(const ZoneFields& left, const ZoneFields& right, const char* name) {
  const int n = static_cast<int>(left.plus.cols());
  CMat lhs(2 * n, 2 * n), rhs(2 * n, 2 * n);
  lhs << left.minus, -right.plus;
  rhs << -left.plus, right.minus;
  Eigen::PartialPivLU<CMat> lu(lhs);
  const double rc = lu.rcond();
  if (!(rc > 1e-300)) throw NumericalError(fmt::format("singular boundary system at the {} interface", name));
  if (rc < 1e-12) ++g_condition_warnings;
  const CMat x = lu.solve(rhs);
  if (!x.allFinite())
    throw NumericalError(fmt::format("non-finite solution at the {} interface", name));
  return SMatrix(x.topLeftCorner(n, n), x.topRightCorner(n, n), x.bottomLeftCorner(n, n),
                 x.bottomRightCorner(n, n));
}

// diag(sigma, 1) S diag(sigma, 1): a layer of phase sigma in front of S.
SMatrix with_entrance_layer(const SMatrix& s, const CVec& sigma) {
  return SMatrix(sigma.asDiagonal() * s.r_minus() * sigma.asDiagonal(),
                 sigma.asDiagonal() * s.t_minus(), s.t_plus() * sigma.asDiagonal(), s.r_plus());
}

CVec duplicate(const CVec& v) {
  CVec out(2 * v.size());
  out << v, v;
  return out;
}

}  // namespace

SMatrix::SMatrix(CMat r_minus, CMat t_minus, CMat t_plus, CMat r_plus)
    : r_minus_(std::move(r_minus)),
      t_minus_(std::move(t_minus)),
      t_plus_(std::move(t_plus)),
      r_plus_(std::move(r_plus)) {
  const auto n = r_minus_.rows();
  for (const CMat* m : {&r_minus_, &t_minus_, &t_plus_, &r_plus_})
    if (m->rows() != n || m->cols() != n)
      throw ContractViolation("S-matrix blocks must be square and of equal size");
}

SMatrix SMatrix::identity(int dim) {
  return SMatrix(CMat::Zero(dim, dim), CMat::Identity(dim, dim), CMat::Identity(dim, dim),
                 CMat::Zero(dim, dim));
}

const CMat& SMatrix::t_minus() const {
  if (masked_) throw ContractViolation("transmission blocks of a semi-infinite body are not defined");
  return t_minus_;
}

const CMat& SMatrix::t_plus() const {
  if (masked_) throw ContractViolation("transmission blocks of a semi-infinite body are not defined");
  return t_plus_;
}

SMatrix SMatrix::central_block(int M, int mbar) const {
  const int N = 2 * M + 1;
  if (dim() != 2 * N) throw ContractViolation(fmt::format("S-matrix of dim {} is not at truncation {}", dim(), M));
  if (mbar < 0 || mbar > M) throw ContractViolation(fmt::format("central block {} exceeds truncation {}", mbar, M));
  std::vector<int> idx;
  for (int p = 0; p < 2; ++p)
    for (int n = -mbar; n <= mbar; ++n) idx.push_back(p * N + M + n);
  SMatrix out(r_minus_(idx, idx), t_minus_(idx, idx), t_plus_(idx, idx), r_plus_(idx, idx));
  out.masked_ = masked_;
  return out;
}

SMatrix star_product(const SMatrix& a, const SMatrix& b) {
  if (a.dim() != b.dim()) throw ContractViolation("star product of S-matrices with different sizes");
  const int n = a.dim();
  const CMat I = CMat::Identity(n, n);
  // a plays B, b plays C:  (1 - C11 B22)^-1 and (1 - B22 C11)^-1
  Eigen::PartialPivLU<CMat> lu1(I - b.r_minus() * a.r_plus());
  Eigen::PartialPivLU<CMat> lu2(I - a.r_plus() * b.r_minus());
  const double rc = std::min(lu1.rcond(), lu2.rcond());
  if (!(rc > 1e-300)) throw ResonanceError("star product: (1 - R R') is singular (lossless closed cavity)");
  if (rc < 1e-12) ++g_condition_warnings;

  CMat r_minus = a.r_minus() + a.t_minus() * lu1.solve(b.r_minus() * a.t_plus());
  CMat t_minus = a.t_minus() * lu1.solve(b.t_minus());
  CMat t_plus = b.t_plus() * lu2.solve(a.t_plus());
  CMat r_plus = b.r_plus() + b.t_plus() * lu2.solve(a.r_plus() * b.t_minus());
  return SMatrix(std::move(r_minus), std::move(t_minus), std::move(t_plus), std::move(r_plus));
}

SMatrix translate_smatrix(const SMatrix& s, const CVec& kz, double d) {
  if (!(d >= 0.0)) throw ValidationError(fmt::format("translation distance must be >= 0 (got {})", d));
  if (kz.size() != s.dim()) throw ContractViolation("translation phase vector has the wrong size");
  const cplx i(0.0, 1.0);
  const CVec phase = (i * d * kz).array().exp().matrix();
  CMat r_minus = phase.asDiagonal() * s.r_minus() * phase.asDiagonal();
  if (s.transmission_masked()) {
    SMatrix out(std::move(r_minus), CMat::Zero(s.dim(), s.dim()), CMat::Zero(s.dim(), s.dim()), s.r_plus());
    out.mask_transmission();
    return out;
  }
  return SMatrix(std::move(r_minus), phase.asDiagonal() * s.t_minus(), s.t_plus() * phase.asDiagonal(),
                 s.r_plus());
}

SMatrix translate_smatrix(const SMatrix& s, const ModeBasis& basis, double d) {
  return translate_smatrix(s, duplicate(basis.kz_vacuum()), d);
}

SMatrix mirror_smatrix(const SMatrix& s) {
  const int n = s.dim() / 2;
  CVec sigma(2 * n);
  sigma.head(n).setOnes();
  sigma.tail(n).setConstant(-1.0);
  auto conj = [&](const CMat& m) -> CMat { return sigma.asDiagonal() * m * sigma.asDiagonal(); };
  if (s.transmission_masked()) {
    SMatrix out(conj(s.r_plus()), CMat::Zero(s.dim(), s.dim()), CMat::Zero(s.dim(), s.dim()),
                conj(s.r_minus()));
    out.mask_transmission();
    return out;
  }
  return SMatrix(conj(s.r_plus()), conj(s.t_plus()), conj(s.t_minus()), conj(s.r_minus()));
}

SMatrix smatrix_top(const ModeBasis& basis, const GratingGeometry& g, const FmmOptions& o) {
  const auto e = eigensolve(build_FG(basis, g), o);
  const auto b1 = boundary_blocks(basis, g.cover.permittivity(basis.frequency()));
  return interface_smatrix(homogeneous_fields(b1), grating_fields(e), "zone 1 / zone 2");
}

namespace {

struct Pieces {
  SMatrix top, grating;
};

Pieces top_and_grating(const ModeBasis& basis, const GratingGeometry& g, const FmmOptions& o) {
  const Frequency& f = basis.frequency();
  const auto e = eigensolve(build_FG(basis, g), o);
  const auto z1 = homogeneous_fields(boundary_blocks(basis, g.cover.permittivity(f)));
  const auto z3 = homogeneous_fields(boundary_blocks(basis, g.substrate.permittivity(f)));
  const auto zg = grating_fields(e);
  const CVec sigma = (e.D * g.depth).array().exp().matrix();
  return {interface_smatrix(z1, zg, "zone 1 / zone 2"),
          with_entrance_layer(interface_smatrix(zg, z3, "zone 2 / zone 3"), sigma)};
}

}  // namespace

SMatrix smatrix_grating(const ModeBasis& basis, const GratingGeometry& g, const FmmOptions& o) {
  return top_and_grating(basis, g, o).grating;
}

SMatrix smatrix_bottom(const ModeBasis& basis, const GratingGeometry& g) {
  if (g.semi_infinite()) throw ContractViolation("a semi-infinite body has no bottom interface");
  const Frequency& f = basis.frequency();
  const auto b3 = boundary_blocks(basis, g.substrate.permittivity(f));
  const auto b4 = boundary_blocks(basis, g.zone4().permittivity(f));
  const cplx i(0.0, 1.0);
  const CVec sigma = duplicate((i * *g.thickness * b3.kz).array().exp().matrix());
  return with_entrance_layer(
      interface_smatrix(homogeneous_fields(b3), homogeneous_fields(b4), "zone 3 / zone 4"), sigma);
}

SMatrix assemble_smatrix(const ModeBasis& basis, const GratingGeometry& g, const FmmOptions& options) {
  g.validate();
  if (basis.frequency().is_static()) return static_smatrix(basis, g);
  if (g.semi_infinite()) return semi_infinite_smatrix(basis, g, options);
  const auto p = top_and_grating(basis, g, options);
  return star_product(star_product(p.top, p.grating), smatrix_bottom(basis, g));
}

SMatrix semi_infinite_smatrix(const ModeBasis& basis, const GratingGeometry& g, const FmmOptions& options) {
  if (!g.semi_infinite()) throw ContractViolation("semi_infinite_smatrix needs a semi-infinite geometry");
  g.validate();
  if (basis.frequency().is_static()) return static_smatrix(basis, g);
  const auto p = top_and_grating(basis, g, options);
  SMatrix s = star_product(p.top, p.grating);
  s.mask_transmission();
  return s;
}

std::uint64_t condition_warnings() { return g_condition_warnings.load(); }

// Zero frequency: E = -grad(phi) with div(eps grad phi) = 0. In the grating
// d^2 phi/dz^2 = [[eps]]^-1 (alpha [[1/eps]]^-1 alpha + beta^2 [[eps]]) phi.
// Matching phi and eps dphi/dz gives a scalar S-matrix per order; the TM block
// follows from a_TM = -(direction) phi sqrt(eps) omega / c, TE is unscattered.
SMatrix static_smatrix(const ModeBasis& basis, const GratingGeometry& g) {
  g.validate();
  const int N = basis.orders();
  const Frequency f = basis.frequency();
  const RVec& kn = basis.kn();
  if (kn.minCoeff() <= 0.0) throw NumericalError("static scattering is undefined at k = 0");

  auto homogeneous = [&](double eps) {
    ZoneFields z;
    z.plus = CMat::Zero(2 * N, N);
    z.minus = CMat::Zero(2 * N, N);
    for (int n = 0; n < N; ++n) {
      z.plus(n, n) = 1.0;
      z.plus(N + n, n) = -eps * kn(n);
      z.minus(n, n) = 1.0;
      z.minus(N + n, n) = eps * kn(n);
    }
    return z;
  };
  const double e1 = g.cover.permittivity(f).real();
  const double e3 = g.substrate.permittivity(f).real();
  const double e4 = g.zone4().permittivity(f).real();

  const auto toe = toeplitz_eps(g, f, basis.truncation());
  Eigen::PartialPivLU<CMat> lu_eps(toe.eps), lu_inv(toe.inv_eps);
  if (!(lu_eps.rcond() > 1e-300) || !(lu_inv.rcond() > 1e-300))
    throw NumericalError("singular permittivity Toeplitz matrix (unphysical material input)");
  const CMat alpha = basis.kxn().cast<cplx>().asDiagonal();
  const double beta = basis.ky();
  const CMat Et = lu_inv.solve(CMat::Identity(N, N));
  const CMat Q = lu_eps.solve(alpha * Et * alpha + beta * beta * toe.eps);
  Eigen::ComplexEigenSolver<CMat> es(Q);
  if (es.info() != Eigen::Success) throw NumericalError("static eigen-decomposition failed");
  CMat W = es.eigenvectors();
  for (int j = 0; j < N; ++j) W.col(j).normalize();
  CVec lam(N);
  for (int j = 0; j < N; ++j) {
    lam(j) = std::sqrt(es.eigenvalues()(j));
    if (lam(j).real() < 0.0) lam(j) = -lam(j);
  }
  const CMat V = toe.eps * W * lam.asDiagonal();
  ZoneFields zg;
  zg.plus.resize(2 * N, N);
  zg.plus << W, -V;
  zg.minus.resize(2 * N, N);
  zg.minus << W, V;

  const CVec sigma_h = (-g.depth * lam).array().exp().matrix();
  SMatrix pot = star_product(interface_smatrix(homogeneous(e1), zg, "static zone 1 / zone 2"),
                             with_entrance_layer(interface_smatrix(zg, homogeneous(e3), "static zone 2 / zone 3"), sigma_h));
  const double thick = g.depth + (g.semi_infinite() ? 0.0 : *g.thickness);
  if (!g.semi_infinite()) {
    const CVec sigma_d = (-*g.thickness * kn).cast<cplx>().array().exp().matrix();
    pot = star_product(pot, with_entrance_layer(interface_smatrix(homogeneous(e3), homogeneous(e4), "static zone 3 / zone 4"), sigma_d));
  }

  const int n2 = 2 * N;
  auto embed = [&](const CMat& te, const CMat& tm) {
    CMat m = CMat::Zero(n2, n2);
    m.topLeftCorner(N, N) = te;
    m.bottomRightCorner(N, N) = tm;
    return m;
  };
  const CMat zero = CMat::Zero(N, N);
  const CMat te_through = (-thick * kn).cast<cplx>().array().exp().matrix().asDiagonal();
  if (g.semi_infinite()) {
    SMatrix s(embed(zero, -pot.r_minus()), CMat::Zero(n2, n2), CMat::Zero(n2, n2), embed(zero, -pot.r_plus()));
    s.mask_transmission();
    return s;
  }
  const double ratio = std::sqrt(e4 / e1);
  return SMatrix(embed(zero, -pot.r_minus()), embed(te_through, pot.t_minus() / ratio),
                 embed(te_through, ratio * pot.t_plus()), embed(zero, -pot.r_plus()));
}

}  // namespace ote
