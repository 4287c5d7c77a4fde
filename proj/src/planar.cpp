#include "ote/planar.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ote/errors.hpp"

namespace ote {

namespace {

constexpr double kTwoPi = 2.0 * phys::pi;

// Scalar two-port, same orientation as PlanarResponse.
struct Port {
  cplx rf = 0.0, rb = 0.0, tf = 1.0, tb = 1.0;
};

Port cascade(const Port& a, const Port& b) {
  const cplx den = 1.0 - a.rb * b.rf;
  if (std::abs(den) < 1e-300) throw ResonanceError("planar stack: multiple-reflection denominator vanishes");
  return {a.rf + a.tf * b.rf * a.tb / den, b.rb + b.tb * a.rb * b.tf / den, a.tf * b.tf / den, b.tb * a.tb / den};
}

cplx normal_wavenumber(cplx eps, cplx k0, double k) {
  cplx kz = std::sqrt(eps * k0 * k0 - k * k);
  if (kz.imag() < 0.0 || (kz.imag() == 0.0 && kz.real() < 0.0)) kz = -kz;
  return kz;
}

Port interface(cplx ea, cplx kza, cplx eb, cplx kzb, Polarization p) {
  Port s;
  if (p == Polarization::TE) {
    const cplx den = kza + kzb;
    s.rf = (kza - kzb) / den;
    s.tf = 2.0 * kza / den;
    s.tb = 2.0 * kzb / den;
  } else {
    const cplx den = eb * kza + ea * kzb;
    const cplx root = std::sqrt(ea) * std::sqrt(eb);
    s.rf = (eb * kza - ea * kzb) / den;
    s.tf = 2.0 * root * kza / den;
    s.tb = 2.0 * root * kzb / den;
  }
  s.rb = -s.rf;
  return s;
}

struct Mode {
  cplx kz;           // vacuum normal wavenumber
  bool propagating;  // k < omega/c on the real axis
};

struct BodyPair {
  PlanarResponse one, two;
};

void check_body(const PlanarBody& b, const char* name) {
  for (const auto& l : b.layers)
    if (!(l.thickness >= 0.0) || !std::isfinite(l.thickness))
      throw ValidationError(fmt::format("{}: layer thickness must be finite and >= 0 (got {})", name, l.thickness));
}

}  // namespace

PlanarBody slab(const Material& m, std::optional<double> thickness) {
  PlanarBody b;
  if (thickness)
    b.layers.push_back({m, *thickness});
  else
    b.half_space = m;
  return b;
}

void SlabPair::validate(bool need_body1_transmission) const {
  if (!(distance > 0.0) || !std::isfinite(distance))
    throw ValidationError(fmt::format("distance must be positive (got {})", distance));
  check_body(body1, "body 1");
  check_body(body2, "body 2");
  if (need_body1_transmission && !body1.finite())
    throw ValidationError("body 1 must have finite thickness for the non-equilibrium term");
}

PlanarResponse planar_response(const PlanarBody& body, const Frequency& f, double k, Polarization p) {
  const cplx k0 = f.k0();
  cplx eps_prev = 1.0;
  cplx kz_prev = normal_wavenumber(1.0, k0, k);
  Port total;
  for (const auto& layer : body.layers) {
    if (layer.thickness == 0.0) continue;
    const cplx eps = layer.material.permittivity(f);
    const cplx kz = normal_wavenumber(eps, k0, k);
    total = cascade(total, interface(eps_prev, kz_prev, eps, kz, p));
    const cplx phase = std::exp(cplx(0.0, 1.0) * kz * layer.thickness);
    total = cascade(total, Port{0.0, 0.0, phase, phase});
    eps_prev = eps;
    kz_prev = kz;
  }
  const cplx eps_end = body.half_space ? body.half_space->permittivity(f) : cplx(1.0);
  total = cascade(total, interface(eps_prev, kz_prev, eps_end, normal_wavenumber(eps_end, k0, k), p));
  PlanarResponse r;
  r.r_front = total.rf;
  r.transmits = body.finite();
  if (r.transmits) {
    r.r_back = total.rb;
    r.t_in = total.tf;
    r.t_out = total.tb;
  }
  return r;
}

namespace {

// Weighted "flux" combinations of a scalar reflection, by sector.
double flux_2(cplx r, const Mode& m) {
  const double kz2 = std::norm(m.kz) * (m.propagating ? 1.0 : -1.0);  // kz^2, real in both sectors
  return m.propagating ? kz2 * (1.0 + std::norm(r)) : 2.0 * kz2 * r.real();
}

double flux_m1(cplx r, const Mode& m) {
  if (m.propagating) return (1.0 - std::norm(r)) / m.kz.real();
  return 2.0 * r.imag() / m.kz.imag();
}

double polarization_delta(const PlanarResponse& b1, const PlanarResponse& b2, const Mode& m, double d, double n_e1,
                          double n_21) {
  const cplx round = std::exp(cplx(0.0, 2.0) * m.kz * d);
  const cplx r1 = b1.r_front;
  const cplx r2 = b2.r_front * round;
  const double u = 1.0 / std::norm(1.0 - r1 * r2);
  const double w = m.propagating ? 1.0 / m.kz.real() : 0.0;   // 1/kz on propagating modes
  const double w2 = m.propagating ? m.kz.real() * m.kz.real() : 0.0;
  const double t1 = std::norm(b1.t_in);
  const double t1_out = std::norm(b1.t_out);
  const double t2 = b2.transmits ? std::norm(b2.t_out * std::exp(cplx(0.0, 1.0) * m.kz * d)) : 0.0;

  const double g1 = flux_2(r1, m) - w2 * t1;
  const double g2 = flux_2(r2, m);
  const cplx r12 = b1.r_back + b1.t_in * b1.t_out * r2 / (1.0 - r1 * r2);

  double first = u * t2 * w * g1 + (u * t1_out * w - w) * g2 + (std::norm(r2) - std::norm(r12)) * w * w2;
  double second = 0.0;
  if (n_21 != 0.0) second = u * (flux_m1(r2, m) - t2 * w) * g1;
  return -phys::hbar * (n_e1 * first + n_21 * second);
}

Mode real_mode(double omega, double k) {
  const double k0 = omega / phys::c;
  Mode m;
  m.propagating = k < k0;
  m.kz = m.propagating ? cplx(std::sqrt(k0 * k0 - k * k), 0.0) : cplx(0.0, std::sqrt(k * k - k0 * k0));
  return m;
}

}  // namespace

IntegrandValue slab_delta_integrand(const SlabPair& pair, const ThermalState& thermal, double omega, double k) {
  const double n_e1 = population_diff(omega, thermal.Te, thermal.T1);
  const double n_21 = population_diff(omega, thermal.T2, thermal.T1);
  if (n_e1 == 0.0 && n_21 == 0.0) return {};
  if (!pair.body1.finite()) throw ContractViolation("the non-equilibrium term needs a finite body 1");
  const Mode m = real_mode(omega, k);
  if (m.kz == 0.0) return {};
  const Frequency f = Frequency::real(omega);
  double v = 0.0;
  for (Polarization p : {Polarization::TE, Polarization::TM})
    v += polarization_delta(planar_response(pair.body1, f, k, p), planar_response(pair.body2, f, k, p), m,
                            pair.distance, n_e1, n_21);
  return {v, 0.0};
}

IntegrandValue slab_eq_integrand(const SlabPair& pair, double xi, double k) {
  const Frequency f = Frequency::imaginary(xi);
  const double q = xi / phys::c;
  const double kappa = std::sqrt(k * k + q * q);
  const double decay = std::exp(-2.0 * kappa * pair.distance);
  cplx v = 0.0;
  for (Polarization p : {Polarization::TE, Polarization::TM}) {
    const cplx rr = planar_response(pair.body1, f, k, p).r_front * planar_response(pair.body2, f, k, p).r_front * decay;
    v -= 2.0 * kappa * rr / (1.0 - rr);
  }
  return {v.real(), v.imag()};
}

namespace {

AdaptiveOptions opts(const QuadratureSpec& spec, double rel_tol, int workers = 1) {
  AdaptiveOptions o;
  o.rel_tol = rel_tol;
  o.max_panels = spec.max_panels;
  o.workers = workers;
  return o;
}

QuadResult planar_delta(const SlabPair& pair, const ThermalState& thermal, const QuadratureSpec& spec) {
  if (thermal.equilibrium()) return {};
  const double d = pair.distance;
  const double inner = spec.tolerance * spec.inner_factor;
  // int k dk / 2pi, propagating [0, k0] with k = k0 sin(t), evanescent [k0, k0 + decay/d] with k = k0 + L v^2
  auto k_integral = [&](double omega) -> Estimate {
    const double k0 = omega / phys::c;
    const double L = spec.ky_decay / d;
    auto g = [&](double t) -> Estimate {
      double k, jac;
      if (t < 1.0) {
        const double th = 0.5 * phys::pi * t;
        k = k0 * std::sin(th);
        jac = k0 * 0.5 * phys::pi * std::cos(th);
      } else {
        const double v = t - 1.0;
        k = k0 + L * v * v;
        jac = 2.0 * L * v;
      }
      const IntegrandValue f = slab_delta_integrand(pair, thermal, omega, k);
      return {cplx(f.value, f.imag) * (k * jac / kTwoPi), 0.0, 1};
    };
    return integrate_adaptive(g, std::vector<double>{0.0, 1.0, 2.0}, opts(spec, inner * spec.inner_factor));
  };
  const double lo = std::log(spec.omega_min), hi = std::log(omega_cutoff(thermal, spec));
  if (!(hi > lo)) return {};
  const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / std::log(10.0) * spec.omega_panels_per_decade)));
  std::vector<double> breaks(panels + 1);
  for (int i = 0; i <= panels; ++i) breaks[i] = lo + (hi - lo) * double(i) / double(panels);
  auto outer = [&](double u) -> Estimate {
    const double omega = std::exp(u);
    Estimate e = k_integral(omega);
    e.value *= omega;
    e.error *= omega;
    return e;
  };
  const Estimate e = integrate_adaptive(outer, breaks, opts(spec, spec.tolerance, spec.workers));
  // force -> pressure, with the dw/2pi measure
  QuadResult r;
  r.value = -e.value.real() / kTwoPi;
  r.imag = -e.value.imag() / kTwoPi;
  r.error = e.error / kTwoPi;
  r.evaluations = e.evaluations;
  return r;
}

QuadResult planar_matsubara(const SlabPair& pair, double T, const QuadratureSpec& spec) {
  const double d = pair.distance;
  auto term = [&](double xi, double rel_tol) {
    const double a = std::max(xi / phys::c, 0.1 / d);
    const double umax = std::asinh((spec.ky_decay / d + xi / phys::c) / a);
    auto g = [&](double u) -> Estimate {
      const double k = a * std::sinh(u);
      const IntegrandValue f = slab_eq_integrand(pair, xi, k);
      return {cplx(f.value, f.imag) * (k * a * std::cosh(u) / kTwoPi), 0.0, 1};
    };
    const Estimate e = integrate_adaptive(g, std::vector<double>{0.0, umax}, opts(spec, rel_tol));
    QuadResult q;
    q.value = e.value.real();
    q.imag = e.value.imag();
    q.error = e.error;
    q.evaluations = e.evaluations;
    return q;
  };
  return matsubara_series(term, T, d, spec);
}

}  // namespace

PressureResult slab_pressure(const SlabPair& pair, const ThermalState& thermal, const QuadratureSpec& spec) {
  thermal.validate();
  spec.validate();
  pair.validate(!thermal.equilibrium());
  PressureResult r;
  auto empty = [](const PlanarBody& b) {
    return std::all_of(b.layers.begin(), b.layers.end(), [](const PlanarLayer& l) { return l.material.is_vacuum(); }) &&
           (!b.half_space || b.half_space->is_vacuum());
  };
  if (empty(pair.body1) && empty(pair.body2)) return r;
  const QuadResult eq = planar_matsubara(pair, thermal.T1, spec);
  const QuadResult delta = planar_delta(pair, thermal, spec);
  r.eq_part = eq.value;
  r.delta_part = delta.value;
  r.total = r.eq_part + r.delta_part;
  r.error_estimate = eq.error + delta.error;
  r.diagnostics.mode_evaluations = eq.evaluations + delta.evaluations;
  r.diagnostics.matsubara_terms = eq.terms;
  return r;
}

PlanarBody planar_body(const GratingGeometry& g, GrooveBranch branch) {
  PlanarBody b;
  b.layers.push_back({branch == GrooveBranch::ridge ? g.ridge : g.groove, g.depth});
  if (g.semi_infinite()) {
    b.half_space = g.substrate;
  } else {
    b.layers.push_back({g.substrate, *g.thickness});
    if (!g.outer.is_vacuum()) b.half_space = g.outer;
  }
  return b;
}

bool pfa_applicable(const GratingGeometry& g1, const GratingGeometry& g2) {
  return g1.filling == g2.filling && g1.shift == g2.shift;
}

PressureResult pfa_pressure(const GratingGeometry& g1, const GratingGeometry& g2, double d,
                            const ThermalState& thermal, const QuadratureSpec& spec) {
  g1.validate();
  g2.validate();
  if (g1.filling != g2.filling)
    throw ValidationError(
        fmt::format("PFA needs equal filling factors (got {} and {})", g1.filling, g2.filling));
  if (g1.shift != g2.shift) throw ValidationError("PFA needs aligned gratings (nonzero relative shift)");
  if (!(d > 0.0)) throw ValidationError(fmt::format("distance must be positive (got {})", d));

  const double f = g1.filling;
  PressureResult out;
  auto accumulate = [&](const PressureResult& p, double w) {
    out.total += w * p.total;
    out.eq_part += w * p.eq_part;
    out.delta_part += w * p.delta_part;
    out.error_estimate += w * p.error_estimate;
    out.diagnostics.mode_evaluations += p.diagnostics.mode_evaluations;
    out.diagnostics.matsubara_terms = std::max(out.diagnostics.matsubara_terms, p.diagnostics.matsubara_terms);
  };
  if (f > 0.0) {
    const SlabPair full{planar_body(g1, GrooveBranch::ridge), planar_body(g2, GrooveBranch::ridge), d};
    accumulate(slab_pressure(full, thermal, spec), f);
  }
  if (f < 1.0) {
    SlabPair empty{planar_body(g1, GrooveBranch::groove), planar_body(g2, GrooveBranch::groove), d};
    if (g1.groove.is_vacuum() && g2.groove.is_vacuum()) {
      // empty grooves: the corrugation depth just widens the gap
      empty.body1.layers.erase(empty.body1.layers.begin());
      empty.body2.layers.erase(empty.body2.layers.begin());
      empty.distance = d + g1.depth + g2.depth;
    }
    accumulate(slab_pressure(empty, thermal, spec), 1.0 - f);
  }
  return out;
}

}  // namespace ote
