#include <cmath>

#include <fmt/format.h>

#include "ote/errors.hpp"
#include "ote/fmm.hpp"
#include "ote/hash.hpp"

namespace ote {

bool GratingGeometry::uniform_profile() const {
  return filling == 0.0 || filling == 1.0 || ridge.fingerprint() == groove.fingerprint();
}

bool GratingGeometry::empty() const {
  return ridge.is_vacuum() && groove.is_vacuum() && substrate.is_vacuum() && zone4().is_vacuum();
}

void GratingGeometry::validate() const {
  if (!(period > 0.0) || !std::isfinite(period))
    throw ValidationError(fmt::format("grating period must be > 0 (got {})", period));
  if (!(depth >= 0.0) || !std::isfinite(depth))
    throw ValidationError(fmt::format("corrugation depth must be >= 0 (got {})", depth));
  if (thickness && (!(*thickness >= 0.0) || !std::isfinite(*thickness)))
    throw ValidationError(fmt::format("underlying thickness must be >= 0 (got {})", *thickness));
  if (!(filling >= 0.0 && filling <= 1.0))
    throw ValidationError(fmt::format("filling factor must lie in [0, 1] (got {})", filling));
  if (!std::isfinite(shift)) throw ValidationError("lateral shift must be finite");
}

std::uint64_t GratingGeometry::hash() const {
  Fnv1a h;
  h.add(period).add(depth).add(thickness ? *thickness : -1.0).add(filling).add(shift);
  for (const Material* m : {&cover, &ridge, &groove, &substrate, &zone4()}) h.add(m->fingerprint());
  return h.value();
}

cplx kz_branch(cplx kz_squared) {
  cplx r = std::sqrt(kz_squared);
  if (r.imag() < 0.0 || (r.imag() == 0.0 && r.real() < 0.0)) r = -r;
  return r;
}

ModeBasis::ModeBasis(Frequency freq, double kx, double ky, int truncation, double period,
                     bool require_first_zone)
    : freq_(freq), kx_(kx), ky_(ky), period_(period), M_(truncation) {
  if (truncation < 0) throw ValidationError("truncation M must be >= 0");
  if (!(period > 0.0)) throw ValidationError("mode basis needs a positive period");
  if (freq.is_imaginary() ? !(freq.value() >= 0.0) : !(freq.value() > 0.0))
    throw ValidationError(fmt::format("invalid frequency {}", freq.value()));
  if (!std::isfinite(kx) || !std::isfinite(ky)) throw ValidationError("non-finite wavevector");
  const double zone = phys::pi / period;
  if (require_first_zone && std::abs(kx) > zone * (1.0 + 1e-12))
    throw ValidationError(fmt::format("kx = {} outside the first Brillouin zone [-{}, {}]", kx, zone, zone));
  const int n_orders = orders();
  kxn_.resize(n_orders);
  kn_.resize(n_orders);
  for (int i = 0; i < n_orders; ++i) {
    kxn_(i) = kx + 2.0 * phys::pi * double(i - M_) / period;
    kn_(i) = std::hypot(kxn_(i), ky);
  }
  kz_vac_ = kz(1.0);
}

CVec ModeBasis::kz(cplx eps) const {
  const cplx k02 = k0() * k0();
  CVec out(orders());
  for (int i = 0; i < orders(); ++i) out(i) = kz_branch(eps * k02 - kn_(i) * kn_(i));
  return out;
}

bool ModeBasis::propagating(int i) const {
  return !freq_.is_imaginary() && kn_(i) < freq_.value() / phys::c;
}

ModeBasis ModeBasis::with_truncation(int M) const {
  return ModeBasis(freq_, kx_, ky_, M, period_, false);
}

BoundaryBlocks boundary_blocks(const ModeBasis& basis, cplx eps) {
  const int N = basis.orders();
  BoundaryBlocks b;
  b.sqrt_eps = std::sqrt(eps);
  b.kz = basis.kz(eps);
  b.ax.resize(N);
  b.ay.resize(N);
  b.bx.resize(N);
  b.by.resize(N);
  const cplx factor = phys::c / (b.sqrt_eps * basis.frequency().omega());
  for (int i = 0; i < N; ++i) {
    const double kn = basis.kn()(i);
    // kn = 0: TE along y, TM in-plane part along x
    b.ax(i) = kn > 0.0 ? basis.kxn()(i) / kn : 1.0;
    b.ay(i) = kn > 0.0 ? basis.ky() / kn : 0.0;
    b.bx(i) = factor * b.ax(i) * b.kz(i);
    b.by(i) = factor * b.ay(i) * b.kz(i);
  }
  auto block = [N](const CVec& d11, const CVec& d12, const CVec& d21, const CVec& d22) {
    CMat m = CMat::Zero(2 * N, 2 * N);
    m.topLeftCorner(N, N).diagonal() = d11;
    m.topRightCorner(N, N).diagonal() = d12;
    m.bottomLeftCorner(N, N).diagonal() = d21;
    m.bottomRightCorner(N, N).diagonal() = d22;
    return m;
  };
  b.K = block(b.ay, -b.bx, -b.ax, -b.by);
  b.Kp = block(-b.ay, -b.bx, b.ax, -b.by);
  b.L = b.sqrt_eps * block(b.bx, b.ay, b.by, -b.ax);
  b.Lp = b.sqrt_eps * block(b.bx, -b.ay, b.by, b.ax);
  return b;
}

ToeplitzPair toeplitz_eps(const GratingGeometry& g, const Frequency& f, int M) {
  const cplx er = g.ridge.permittivity(f);
  const cplx eg = g.groove.permittivity(f);
  const int N = 2 * M + 1;
  const double fill = g.filling;
  auto coefficients = [&](cplx a_ridge, cplx a_groove) {
    std::vector<cplx> a(4 * M + 1);
    for (int n = -2 * M; n <= 2 * M; ++n) {
      if (n == 0) {
        a[n + 2 * M] = fill * a_ridge + (1.0 - fill) * a_groove;
      } else {
        // exact zeros when n f is an integer (f = 0, 1, even n at f = 1/2, ...)
        const double nf = n * fill;
        const double s = nf == std::round(nf) ? 0.0 : std::sin(phys::pi * nf) / (phys::pi * n);
        const cplx phase = std::polar(1.0, -2.0 * phys::pi * n * g.shift / g.period);
        a[n + 2 * M] = (a_ridge - a_groove) * s * phase;
      }
    }
    CMat t(N, N);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) t(i, j) = a[i - j + 2 * M];
    return t;
  };
  return {coefficients(er, eg), coefficients(1.0 / er, 1.0 / eg)};
}

}  // namespace ote
