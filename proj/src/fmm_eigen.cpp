#include <cmath>

#include <fmt/format.h>

#include "ote/errors.hpp"
#include "ote/fmm.hpp"

namespace ote {

namespace {

CMat solve_checked(const CMat& a, const CMat& b, const char* what) {
  Eigen::PartialPivLU<CMat> lu(a);
  const double rc = lu.rcond();
  if (!(rc > 1e-300)) throw NumericalError(fmt::format("{} is singular", what));
  CMat x = lu.solve(b);
  if (!x.allFinite()) throw NumericalError(fmt::format("{} solve produced non-finite values", what));
  return x;
}

cplx pick_root(cplx lambda, BranchRule rule) {
  cplx s = std::sqrt(lambda);  // Re s >= 0
  const bool tie = std::abs(s.real()) <= 1e-12 * std::abs(s);
  if (rule == BranchRule::decaying) {
    if (tie) return s.imag() >= 0.0 ? s : -s;
    return -s;
  }
  if (tie) return s.imag() >= 0.0 ? -s : s;
  return s;
}

}  // namespace

FGPair build_FG(const ModeBasis& basis, const GratingGeometry& g) {
  if (basis.frequency().is_static())
    throw NumericalError("F and G are undefined at zero frequency; use the static solver");
  const int N = basis.orders();
  const auto toe = toeplitz_eps(g, basis.frequency(), basis.truncation());
  Eigen::PartialPivLU<CMat> lu_eps(toe.eps), lu_inv(toe.inv_eps);
  if (!(lu_eps.rcond() > 1e-300) || !(lu_inv.rcond() > 1e-300))
    throw NumericalError("singular permittivity Toeplitz matrix (unphysical material input)");
  const CMat I = CMat::Identity(N, N);
  const CMat Ei = lu_eps.solve(I);          // [[eps]]^-1
  const CMat Et = lu_inv.solve(I);          // [[1/eps]]^-1
  const CMat alpha = basis.kxn().cast<cplx>().asDiagonal();
  const double beta = basis.ky();
  const cplx k0 = basis.k0();
  const cplx i(0.0, 1.0);

  FGPair out;
  out.F.resize(2 * N, 2 * N);
  out.F.topLeftCorner(N, N) = (i * beta / k0) * alpha * Ei;
  out.F.topRightCorner(N, N) = i * k0 * I - (i / k0) * alpha * Ei * alpha;
  out.F.bottomLeftCorner(N, N) = -i * k0 * I + (i * beta * beta / k0) * Ei;
  out.F.bottomRightCorner(N, N) = -(i * beta / k0) * Ei * alpha;

  out.G.resize(2 * N, 2 * N);
  out.G.topLeftCorner(N, N) = -(i * beta / k0) * alpha;
  out.G.topRightCorner(N, N) = -i * k0 * toe.eps + (i / k0) * alpha * alpha;
  out.G.bottomLeftCorner(N, N) = i * k0 * Et - (i * beta * beta / k0) * I;
  out.G.bottomRightCorner(N, N) = (i * beta / k0) * alpha;

  // F G multiplied out by hand; the 1/k0^2 terms cancel analytically.
  const cplx k02 = k0 * k0;
  out.FG = CMat::Zero(2 * N, 2 * N);
  out.FG.topLeftCorner(N, N) = alpha * Ei * alpha * Et + (beta * beta) * I - k02 * Et;
  out.FG.bottomLeftCorner(N, N) = beta * (Ei * alpha * Et - alpha);
  out.FG.bottomRightCorner(N, N) = alpha * alpha + (beta * beta) * I - k02 * toe.eps;
  return out;
}

GratingEigensystem eigensolve(const FGPair& fg, const FmmOptions& options) {
  const CMat& A = fg.FG;
  if (!A.allFinite()) throw NumericalError("F G contains non-finite entries");
  const int n2 = static_cast<int>(A.rows());
  const int N = n2 / 2;
  const CMat X = A.topLeftCorner(N, N);
  const CMat Y = A.bottomLeftCorner(N, N);
  const CMat Z = A.bottomRightCorner(N, N);
  const double scale = std::max({X.cwiseAbs().maxCoeff(), Z.cwiseAbs().maxCoeff(), 1e-300});

  CMat P = CMat::Zero(n2, n2);
  CVec lambda(n2);
  bool full_solve = A.topRightCorner(N, N).cwiseAbs().maxCoeff() > 1e-14 * scale;

  if (!full_solve) {
    // F G is block lower-triangular: solve the two diagonal blocks and
    // recover the coupling part of the first family.
    Eigen::ComplexEigenSolver<CMat> ex(X), ez(Z);
    if (ex.info() != Eigen::Success || ez.info() != Eigen::Success)
      throw NumericalError("eigen-decomposition of F G failed");
    const CMat& Ux = ex.eigenvectors();
    const CMat& Uz = ez.eigenvectors();
    CMat W = CMat::Zero(N, N);
    if (Y.cwiseAbs().maxCoeff() > 1e-14 * scale) {
      CMat C = solve_checked(Uz, Y * Ux, "eigenvector basis");
      for (int j = 0; j < N && !full_solve; ++j)
        for (int k = 0; k < N; ++k) {
          const cplx gap = ex.eigenvalues()(j) - ez.eigenvalues()(k);
          if (std::abs(gap) < 1e-10 * scale) {
            full_solve = true;
            break;
          }
          C(k, j) /= gap;
        }
      if (!full_solve) W = Uz * C;
    }
    if (!full_solve) {
      P.topLeftCorner(N, N) = Ux;
      P.bottomLeftCorner(N, N) = W;
      P.bottomRightCorner(N, N) = Uz;
      lambda.head(N) = ex.eigenvalues();
      lambda.tail(N) = ez.eigenvalues();
    }
  }
  if (full_solve) {
    Eigen::ComplexEigenSolver<CMat> es(A);
    if (es.info() != Eigen::Success) throw NumericalError("eigen-decomposition of F G failed");
    P = es.eigenvectors();
    lambda = es.eigenvalues();
  }
  for (int j = 0; j < n2; ++j) P.col(j).normalize();

  GratingEigensystem out;
  out.P = std::move(P);
  out.D.resize(n2);
  for (int j = 0; j < n2; ++j) out.D(j) = pick_root(lambda(j), options.branch);

  Eigen::PartialPivLU<CMat> lu(out.P);
  const double rc = lu.rcond();
  out.condition = rc > 0.0 ? 1.0 / rc : INFINITY;
  if (!(out.condition <= options.max_mode_condition))
    throw NumericalError(fmt::format(
        "grating mode matrix is ill-conditioned (cond ~ {:.3g}, {} modes, eigenvalue scale {:.3g})",
        out.condition, n2, scale));

  // P' = F^-1 P D = G P D^-1, the latter avoids inverting F.
  const double dmin = out.D.cwiseAbs().minCoeff();
  if (dmin > 1e-10 * std::sqrt(scale)) {
    out.Pprime = fg.G * out.P * out.D.cwiseInverse().asDiagonal();
  } else {
    out.Pprime = solve_checked(fg.F, out.P * out.D.asDiagonal(), "F");
  }
  return out;
}

}  // namespace ote
