#include "ote/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ote/errors.hpp"

namespace ote {

namespace {

constexpr double kTwoPi = 2.0 * phys::pi;

cplx pack(const IntegrandValue& v) { return {v.value, v.imag}; }

AdaptiveOptions level(const QuadratureSpec& spec, double rel_tol, int workers = 1, double abs_tol = 0.0) {
  AdaptiveOptions o;
  o.rel_tol = rel_tol;
  o.abs_tol = abs_tol;
  o.max_panels = spec.max_panels;
  o.workers = workers;
  return o;
}

// A chain of mapped segments presented to the integrator as [0, n) with
// integer breaks; segment j maps its local parameter onto [lo_j, hi_j].
enum class Map { plain, sine_both, sine_top, square_bottom };

struct Segment {
  double lo, hi;
  Map map;
};

// Returns (x, dx/dt) for t in [0, 1) of one segment.
std::pair<double, double> map_point(const Segment& s, double t) {
  const double w = s.hi - s.lo;
  switch (s.map) {
    case Map::plain:
      return {s.lo + w * t, w};
    case Map::sine_both: {
      const double th = phys::pi * (t - 0.5);
      return {0.5 * (s.lo + s.hi) + 0.5 * w * std::sin(th), 0.5 * w * phys::pi * std::cos(th)};
    }
    case Map::sine_top: {
      const double th = 0.5 * phys::pi * t;
      return {s.lo + w * std::sin(th), w * 0.5 * phys::pi * std::cos(th)};
    }
    case Map::square_bottom:
      return {s.lo + w * t * t, 2.0 * w * t};
  }
  return {0.0, 0.0};
}

Estimate integrate_segments(const std::function<Estimate(double)>& f, const std::vector<Segment>& segs,
                            const AdaptiveOptions& o) {
  std::vector<double> breaks(segs.size() + 1);
  for (std::size_t i = 0; i <= segs.size(); ++i) breaks[i] = double(i);
  auto g = [&](double t) {
    const auto j = std::min<std::size_t>(static_cast<std::size_t>(t), segs.size() - 1);
    const auto [x, jac] = map_point(segs[j], t - double(j));
    Estimate e = f(x);
    e.value *= jac;
    e.error *= std::abs(jac);
    return e;
  };
  return integrate_adaptive(g, breaks, o);
}

QuadResult to_result(const Estimate& e, double scale) {
  QuadResult r;
  r.value = scale * e.value.real();
  r.imag = scale * e.value.imag();
  r.error = std::abs(scale) * e.error;
  r.evaluations = e.evaluations;
  return r;
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(tolerance > 0.0) || !(inner_factor > 0.0 && inner_factor <= 1.0))
    throw ValidationError("quadrature tolerance must be > 0 and the inner factor in (0, 1]");
  if (!(omega_min > 0.0) || !(population_floor > 0.0 && population_floor < 1.0) || !(omega_max >= 0.0))
    throw ValidationError("invalid frequency range settings");
  if (!(omega_panels_per_decade > 0.0) || !(ky_decay > 0.0) || max_panels < 1 || max_matsubara_terms < 1 ||
      workers < 1)
    throw ValidationError("invalid quadrature panel settings");
}

double omega_cutoff(const ThermalState& thermal, const QuadratureSpec& spec) {
  if (spec.omega_max > 0.0) return spec.omega_max;
  const double tmax = std::max({thermal.T1, thermal.T2, thermal.Te});
  return std::log(1.0 / spec.population_floor) * phys::k_B * tmax / phys::hbar;
}

bool kx_symmetric(const GratingPair& bodies) {
  const double half = 0.5 * bodies.body1.period;
  const double r = std::remainder(bodies.body1.shift - bodies.body2.shift, half);
  return std::abs(r) <= 1e-12 * half;
}

QuadResult integrate_k_real(const ModeIntegrand& f, double omega, const ModeDomain& domain,
                            const QuadratureSpec& spec, double rel_tol, bool fold_ky, double abs_tol) {
  const double k0 = omega / phys::c;
  const double zone = phys::pi / domain.period;
  const double G = kTwoPi / domain.period;
  const double kmax = k0 + spec.ky_decay / domain.distance;

  const double kx_lo = domain.kx_even ? 0.0 : -zone;
  const double kx_scale = domain.kx_even ? 2.0 : 1.0;
  std::vector<double> kx_breaks{kx_lo, zone};
  for (int n = -domain.M; n <= domain.M; ++n)
    for (double s : {-k0, k0}) {
      const double x = s - G * n;
      if (x > kx_lo && x < zone) kx_breaks.push_back(x);
    }
  std::sort(kx_breaks.begin(), kx_breaks.end());
  kx_breaks.erase(std::unique(kx_breaks.begin(), kx_breaks.end()), kx_breaks.end());
  std::vector<Segment> kx_segs;
  for (std::size_t i = 0; i + 1 < kx_breaks.size(); ++i)
    kx_segs.push_back({kx_breaks[i], kx_breaks[i + 1], Map::sine_both});

  // abs_tol in raw (unscaled, unfolded) units, shared out over the kx range
  const double raw_abs = abs_tol * kTwoPi * kTwoPi / kx_scale;
  const AdaptiveOptions inner =
      level(spec, rel_tol * spec.inner_factor, 1, spec.inner_factor * raw_abs / ((zone - kx_lo) * (fold_ky ? 2.0 : 1.0)));
  auto ky_integral = [&](double kx) -> Estimate {
    std::vector<double> edges;
    for (int n = -domain.M; n <= domain.M; ++n) {
      const double kxn = kx + G * n;
      if (std::abs(kxn) < k0) edges.push_back(std::sqrt(k0 * k0 - kxn * kxn));
    }
    std::sort(edges.begin(), edges.end());
    std::vector<Segment> segs;
    if (edges.empty()) {
      segs.push_back({0.0, kmax, Map::plain});
    } else {
      segs.push_back({0.0, edges.front(), Map::sine_top});
      for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        if (edges[i + 1] > edges[i]) segs.push_back({edges[i], edges[i + 1], Map::sine_both});
      segs.push_back({edges.back(), kmax, Map::square_bottom});
    }
    auto up = [&](double ky) { return Estimate{pack(f(kx, ky)), 0.0, 1}; };
    Estimate e = integrate_segments(up, segs, inner);
    if (fold_ky) {
      e.value *= 2.0;
      e.error *= 2.0;
    } else {
      auto down = [&](double ky) { return Estimate{pack(f(kx, -ky)), 0.0, 1}; };
      const Estimate lower = integrate_segments(down, segs, inner);
      e.value += lower.value;
      e.error += lower.error;
      e.evaluations += lower.evaluations;
    }
    return e;
  };
  const Estimate total = integrate_segments(ky_integral, kx_segs, level(spec, rel_tol, 1, raw_abs));
  return to_result(total, kx_scale / (kTwoPi * kTwoPi));
}

QuadResult integrate_k_imag(const ModeIntegrand& f, double xi, const ModeDomain& domain, const QuadratureSpec& spec,
                            double rel_tol, double abs_tol) {
  const double zone = phys::pi / domain.period;
  const double G = kTwoPi / domain.period;
  const double kmax = spec.ky_decay / domain.distance;
  const double kx_scale = domain.kx_even ? 2.0 : 1.0;
  const double raw_abs = abs_tol * kTwoPi * kTwoPi / kx_scale;
  const AdaptiveOptions inner = level(spec, rel_tol * spec.inner_factor, 1, spec.inner_factor * raw_abs / (4.0 * zone));
  auto ky_integral = [&](double kx) -> Estimate {
    // ky = a sinh(u) resolves the cone at k = 0 of the static term
    double a = xi / phys::c;
    double nearest = std::abs(kx);
    for (int n = -domain.M; n <= domain.M; ++n) nearest = std::min(nearest, std::abs(kx + G * n));
    a = std::max({a, nearest, 1e-3 / domain.distance});
    const double umax = std::asinh(kmax / a);
    auto g = [&](double u) {
      const double ky = a * std::sinh(u);
      Estimate e{pack(f(kx, ky)), 0.0, 1};
      e.value *= a * std::cosh(u);
      return e;
    };
    Estimate e = integrate_adaptive(g, std::vector<double>{0.0, umax}, inner);
    e.value *= 2.0;
    e.error *= 2.0;
    return e;
  };
  const std::vector<double> breaks =
      domain.kx_even ? std::vector<double>{0.0, zone} : std::vector<double>{-zone, 0.0, zone};
  const Estimate total = integrate_adaptive(ky_integral, breaks, level(spec, rel_tol, 1, raw_abs));
  return to_result(total, kx_scale / (kTwoPi * kTwoPi));
}

QuadResult integrate_real_axis(const RealAxisIntegrand& f, double omega_lo, double omega_hi,
                               const ModeDomain& domain, const QuadratureSpec& spec, bool fold_ky) {
  if (!(omega_hi > omega_lo) || !(omega_lo > 0.0)) return {};
  const double a = std::log(omega_lo), b = std::log(omega_hi);
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / std::log(10.0) * spec.omega_panels_per_decade)));
  std::vector<double> breaks(panels + 1);
  for (int i = 0; i <= panels; ++i) breaks[i] = a + (b - a) * double(i) / double(panels);
  const double inner_tol = spec.tolerance * spec.inner_factor;
  auto k_integral = [&](double omega, double rel, double abs) {
    return integrate_k_real([&](double kx, double ky) { return f(omega, kx, ky); }, omega, domain, spec, rel,
                            fold_ky, abs);
  };

  // Pilot: panel midpoints at a loose tolerance give a scale for int |g| du.
  std::vector<double> mids(panels);
  std::vector<double> pilot(panels, 0.0);
  for (int i = 0; i < panels; ++i) mids[i] = 0.5 * (breaks[i] + breaks[i + 1]);
  std::size_t pilot_evals = 0;
#pragma omp parallel for schedule(dynamic, 1) num_threads(spec.workers) if (spec.workers > 1)
  for (int i = 0; i < panels; ++i) {
    const double omega = std::exp(mids[i]);
    const QuadResult k = k_integral(omega, std::max(0.3, spec.tolerance), 0.0);
    pilot[i] = std::abs(k.value) * omega;
#pragma omp atomic
    pilot_evals += k.evaluations;
  }
  double scale = 0.0;
  for (int i = 0; i < panels; ++i) scale += pilot[i] * (breaks[i + 1] - breaks[i]);
  const double g_abs = spec.inner_factor * spec.tolerance * scale / (b - a);

  auto g = [&](double u) -> Estimate {
    const double omega = std::exp(u);
    const QuadResult k = k_integral(omega, inner_tol, g_abs / omega);
    return {cplx(k.value, k.imag) * omega, k.error * omega, k.evaluations};
  };
  Estimate total = integrate_adaptive(g, breaks, level(spec, spec.tolerance, spec.workers));
  total.evaluations += pilot_evals;
  return to_result(total, 1.0 / kTwoPi);
}

QuadResult integrate_delta(const GratingPair& bodies, const ThermalState& thermal, double d, Truncation truncation,
                           const QuadratureSpec& spec, SMatrixCache* cache) {
  thermal.validate();
  spec.validate();
  if (thermal.equilibrium()) return {};
  bodies.validate(true);
  if (!(d > 0.0)) throw ValidationError(fmt::format("distance must be positive (got {})", d));
  const ModeDomain domain{bodies.body1.period, d, truncation.M, kx_symmetric(bodies)};
  auto f = [&](double omega, double kx, double ky) {
    const ModeBasis basis(Frequency::real(omega), kx, ky, truncation.M, domain.period);
    return delta_integrand(build_mode_operators(basis, bodies, d, truncation.mbar, spec.fmm, cache), thermal);
  };
  QuadResult r = integrate_real_axis(f, spec.omega_min, omega_cutoff(thermal, spec), domain, spec);
  // the integrand is the force on body 1; report pressure
  r.value = -r.value;
  r.imag = -r.imag;
  return r;
}

QuadResult matsubara_series(const std::function<QuadResult(double xi, double rel_tol)>& term, double T, double d,
                            const QuadratureSpec& spec) {
  const double inner_tol = spec.tolerance * spec.inner_factor;
  QuadResult out;
  if (T == 0.0) {
    // hbar/2pi int_0^inf dxi, xi = s t / (1 - t)
    const double s = phys::c / (2.0 * d);
    auto g = [&](double t) -> Estimate {
      const double xi = s * t / (1.0 - t);
      const double jac = s / ((1.0 - t) * (1.0 - t));
      const QuadResult k = term(xi, inner_tol);
      return {cplx(k.value, k.imag) * jac, k.error * jac, k.evaluations};
    };
    const Estimate e = integrate_adaptive(g, std::vector<double>{0.0, 0.5, 1.0}, level(spec, spec.tolerance));
    return to_result(e, phys::hbar / kTwoPi);
  }
  const double kT = phys::k_B * T;
  const double xi1 = kTwoPi * kT / phys::hbar;
  double previous = 0.0;
  for (int l = 0;; ++l) {
    if (l >= spec.max_matsubara_terms)
      throw QuadratureError(fmt::format("Matsubara sum not converged after {} terms", l), out.value, out.error);
    const QuadResult k = term(xi1 * l, inner_tol);
    const double w = (l == 0 ? 0.5 : 1.0) * kT;
    const double value = w * k.value;
    out.value += value;
    out.imag += w * k.imag;
    out.error += w * k.error;
    out.evaluations += k.evaluations;
    out.terms = l + 1;
    if (l >= 2) {
      const double cur = std::abs(value);
      if (cur == 0.0 && previous == 0.0) break;
      const double r = previous > 0.0 ? cur / previous : 1.0;
      if (r < 1.0) {
        const double tail = cur * r / (1.0 - r);
        if (tail <= spec.tolerance * std::abs(out.value)) {
          out.error += tail;
          break;
        }
      }
    }
    previous = std::abs(value);
  }
  return out;
}

QuadResult matsubara_sum(const GratingPair& bodies, double T, double d, Truncation truncation,
                         const QuadratureSpec& spec, SMatrixCache* cache) {
  spec.validate();
  bodies.validate(false);
  if (!(T >= 0.0) || !std::isfinite(T)) throw ValidationError(fmt::format("temperature must be >= 0 (got {})", T));
  if (!(d > 0.0)) throw ValidationError(fmt::format("distance must be positive (got {})", d));
  const ModeDomain domain{bodies.body1.period, d, truncation.M, kx_symmetric(bodies)};
  auto term = [&](double xi, double rel_tol) {
    auto f = [&](double kx, double ky) {
      return eq_integrand_imagfreq(xi, kx, ky, bodies, d, truncation, spec.fmm, cache);
    };
    return integrate_k_imag(f, xi, domain, spec, rel_tol);
  };
  return matsubara_series(term, T, d, spec);
}

PressureResult pressure(const GratingPair& bodies, const ThermalState& thermal, double d, Truncation truncation,
                        const QuadratureSpec& spec, SMatrixCache* cache) {
  thermal.validate();
  if (!(d > 0.0)) throw ValidationError(fmt::format("distance must be positive (got {})", d));
  PressureResult r;
  // nothing scatters: the integrands are pure round-off, and the answer is exactly zero
  if (bodies.body1.empty() && bodies.body2.empty()) {
    bodies.validate(false);
    return r;
  }
  const QuadResult eq = matsubara_sum(bodies, thermal.T1, d, truncation, spec, cache);
  const QuadResult delta = integrate_delta(bodies, thermal, d, truncation, spec, cache);
  r.eq_part = eq.value;
  r.delta_part = delta.value;
  r.total = r.eq_part + r.delta_part;
  r.error_estimate = eq.error + delta.error;
  auto residual = [](const QuadResult& q) { return q.value != 0.0 ? std::abs(q.imag / q.value) : std::abs(q.imag); };
  r.diagnostics.max_imag_residual = std::max(residual(eq), residual(delta));
  r.diagnostics.mode_evaluations = eq.evaluations + delta.evaluations;
  r.diagnostics.M = truncation.M;
  r.diagnostics.mbar = truncation.mbar;
  r.diagnostics.matsubara_terms = eq.terms;
  return r;
}

QuadResult spectral_density(const GratingPair& bodies, const ThermalState& thermal, double d, double omega,
                            Truncation truncation, const QuadratureSpec& spec, SMatrixCache* cache) {
  thermal.validate();
  spec.validate();
  if (!(omega > 0.0)) throw ValidationError(fmt::format("frequency must be positive (got {})", omega));
  if (thermal.equilibrium()) return {};
  bodies.validate(true);
  const ModeDomain domain{bodies.body1.period, d, truncation.M, kx_symmetric(bodies)};
  auto f = [&](double kx, double ky) {
    const ModeBasis basis(Frequency::real(omega), kx, ky, truncation.M, domain.period);
    return delta_integrand(build_mode_operators(basis, bodies, d, truncation.mbar, spec.fmm, cache), thermal);
  };
  QuadResult r = integrate_k_real(f, omega, domain, spec, spec.tolerance);
  const double scale = -1.0 / kTwoPi;
  r.value *= scale;
  r.imag *= scale;
  r.error *= std::abs(scale);
  return r;
}

}  // namespace ote
