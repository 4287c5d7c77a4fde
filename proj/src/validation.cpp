#include "ote/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <random>

#include <fmt/format.h>

#include "ote/errors.hpp"
#include "ote/planar.hpp"
#include "ote/quadrature.hpp"

namespace ote {

namespace {

using clock_type = std::chrono::steady_clock;

constexpr double um = 1e-6;

double rel_diff(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

double max_abs(const CMat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// Shared state: pressures of the reference gratings, reused between criteria.
struct Context {
  const ValidationOptions& options;
  std::map<double, PressureResult> reference;
  std::map<double, Truncation> reference_truncation;
};

struct Outcome {
  bool pass;
  std::string detail;
};

// ---------------------------------------------------------------- 1

Outcome slab_oracle(Context&) {
  QuadratureSpec spec;
  spec.tolerance = 1e-6;
  const ThermalState eq{300.0, 300.0, 300.0};
  double worst = 0.0;
  std::string detail;
  for (double filling : {1.0, 0.0}) {
    const GratingPair b = reference_gratings(filling);
    const GrooveBranch branch = filling == 1.0 ? GrooveBranch::ridge : GrooveBranch::groove;
    for (double d : {1.0 * um, 4.0 * um}) {
      const Truncation tr = d < 2.0 * um ? Truncation{4, 4} : Truncation{1, 1};
      const double fmm = pressure(b, eq, d, tr, spec).total;
      const SlabPair pair{planar_body(b.body1, branch), planar_body(b.body2, branch), d};
      const double planar = slab_pressure(pair, eq, spec).total;
      const double r = rel_diff(fmm, planar);
      worst = std::max(worst, r);
      detail += fmt::format("f={} d={}um: {:.3e} ", filling, d / um, r);
    }
  }
  return {worst < 1e-8, detail + fmt::format("(max {:.2e}, limit 1e-8)", worst)};
}

// ---------------------------------------------------------------- 2

// Gauss-Legendre nodes on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(phys::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

// Textbook Lifshitz pressure between two half-spaces:
//   P = -(kT / 8 pi d^3) sum'_l int_{r_l}^inf x^2 sum_p [e^x / (r1 r2) - 1]^-1 dx,
//   x = 2 kappa d, r_l = 2 xi_l d / c.
double lifshitz_half_spaces(const Material& m1, const Material& m2, double d, double T) {
  std::vector<double> gx, gw;
  gauss_legendre(16, gx, gw);
  const double kT = phys::k_B * T;
  const double xi1 = 2.0 * phys::pi * kT / phys::hbar;
  double sum = 0.0;
  for (int l = 0; l < 100000; ++l) {
    const double xi = xi1 * l;
    const double e1 = m1.permittivity_imag_axis(xi), e2 = m2.permittivity_imag_axis(xi);
    const double rl = 2.0 * xi * d / phys::c;
    auto f = [&](double x) {
      const double kappa = x / (2.0 * d);
      const double q2 = xi * xi / (phys::c * phys::c);
      const double k1 = std::sqrt(kappa * kappa + (e1 - 1.0) * q2), k2 = std::sqrt(kappa * kappa + (e2 - 1.0) * q2);
      const double te = (kappa - k1) / (kappa + k1) * (kappa - k2) / (kappa + k2);
      const double tm = (e1 * kappa - k1) / (e1 * kappa + k1) * (e2 * kappa - k2) / (e2 * kappa + k2);
      double v = 0.0;
      for (double rr : {te, tm})
        if (rr != 0.0) v += x * x / (std::exp(x) / rr - 1.0);
      return v;
    };
    double term = 0.0;
    for (int panel = 0; panel < 120; ++panel) {
      const double a = rl + 0.5 * panel, b = a + 0.5;
      for (int i = 0; i < 16; ++i) term += 0.25 * gw[i] * f(0.5 * (a + b) + 0.25 * gx[i]);
    }
    term *= l == 0 ? 0.5 : 1.0;
    sum += term;
    if (l > 2 && std::abs(term) < 1e-15 * std::abs(sum)) break;
  }
  return -kT / (8.0 * phys::pi * d * d * d) * sum;
}

Outcome lifshitz_oracle(Context&) {
  const Material silica = builtin_material("silica-model"), silicon = builtin_material("silicon-model");
  const double d = 1.0 * um, T = 300.0;
  QuadratureSpec spec;
  spec.tolerance = 1e-9;
  const SlabPair pair{slab(silica, std::nullopt), slab(silicon, std::nullopt), d};
  const double ours = slab_pressure(pair, {T, T, T}, spec).total;
  const double oracle = lifshitz_half_spaces(silica, silicon, d, T);
  const double r = rel_diff(ours, oracle);
  return {r < 1e-6 && ours < 0.0,
          fmt::format("slab {:.9e} vs textbook {:.9e} N/m^2, rel {:.2e}, limit 1e-6", ours, oracle, r)};
}

// ---------------------------------------------------------------- 3

Outcome equilibrium_null(Context&) {
  const GratingPair b = reference_gratings();
  const ThermalState eq{300.0, 300.0, 300.0};
  std::mt19937_64 rng(20240301);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double zone = phys::pi / b.body1.period;
  int nonzero = 0;
  for (int i = 0; i < 200; ++i) {
    const double omega = 1e12 * std::pow(1e3, u(rng));
    const ModeBasis basis(Frequency::real(omega), zone * (2.0 * u(rng) - 1.0), 5e6 * u(rng), 2, b.body1.period);
    const IntegrandValue v = delta_integrand(build_mode_operators(basis, b, 2.0 * um, 2), eq);
    if (v.value != 0.0 || v.imag != 0.0) ++nonzero;
  }
  QuadratureSpec spec;
  spec.tolerance = 1e-2;
  const PressureResult p = pressure(b, eq, 4.0 * um, {1, 0}, spec);
  const bool ok = nonzero == 0 && p.delta_part == 0.0 && p.total == p.eq_part;
  return {ok, fmt::format("{} nonzero of 200 mode points; integrated delta_part = {:g}", nonzero, p.delta_part)};
}

// ---------------------------------------------------------------- 4

Outcome energy_conservation(Context& ctx) {
  const Material lossless("eps4", OscillatorModel(4.0, {}));
  GratingGeometry g;
  g.period = 1.0 * um;
  g.depth = 0.6 * um;
  g.thickness = 0.0;
  g.filling = 0.5;
  g.ridge = lossless;
  g.groove = Material::vacuum();
  g.substrate = lossless;
  FmmOptions fmm;
  if (ctx.options.tamper_branch) fmm.branch = BranchRule::tampered;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double zone = phys::pi / g.period;
  const int M = 8;
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double omega = 2e14 * std::pow(25.0, u(rng));
    const double k0 = omega / phys::c;
    const double kx = std::min(zone, 0.95 * k0) * (2.0 * u(rng) - 1.0);
    const double ky = 0.95 * std::sqrt(k0 * k0 - kx * kx) * u(rng);
    const ModeBasis basis(Frequency::real(omega), kx, ky, M, g.period);
    const SMatrix s = assemble_smatrix(basis, g, fmm);
    const int N = basis.orders();
    for (int pol = 0; pol < 2; ++pol) {
      const int inc = pol * N + M;
      const double kz_in = basis.kz_vacuum()(M).real();
      double from_top = 0.0, from_bottom = 0.0;
      for (int j = 0; j < 2 * N; ++j) {
        const int order = j % N;
        if (!basis.propagating(order)) continue;
        const double w = basis.kz_vacuum()(order).real() / kz_in;
        from_top += w * (std::norm(s.r_minus()(j, inc)) + std::norm(s.t_plus()(j, inc)));
        from_bottom += w * (std::norm(s.r_plus()(j, inc)) + std::norm(s.t_minus()(j, inc)));
      }
      worst = std::max({worst, std::abs(from_top - 1.0), std::abs(from_bottom - 1.0)});
    }
  }
  if (!std::isfinite(worst)) worst = INFINITY;
  return {worst < 1e-8, fmt::format("max |sum of efficiencies - 1| = {:.2e} (limit 1e-8) over 50 incidences x 2 "
                                    "polarizations x 2 sides{}",
                                    worst, ctx.options.tamper_branch ? " (tampered branch)" : "")};
}

// ---------------------------------------------------------------- 5

CMat random_matrix(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

double spectral_norm(const CMat& m) { return Eigen::JacobiSVD<CMat>(m).singularValues()(0); }

SMatrix random_contraction(std::mt19937_64& rng, int n) {
  CMat full = random_matrix(rng, 2 * n);
  full *= 0.95 / spectral_norm(full);
  return SMatrix(full.topLeftCorner(n, n), full.topRightCorner(n, n), full.bottomLeftCorner(n, n),
                 full.bottomRightCorner(n, n));
}

double smatrix_distance(const SMatrix& a, const SMatrix& b) {
  return std::max({max_abs(a.r_minus() - b.r_minus()), max_abs(a.r_plus() - b.r_plus()),
                   max_abs(a.t_minus() - b.t_minus()), max_abs(a.t_plus() - b.t_plus())});
}

Outcome star_algebra(Context&) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 6;
  double identity = 0.0, assoc = 0.0, neumann = 0.0;
  for (int i = 0; i < 100; ++i) {
    const SMatrix a = random_contraction(rng, n), b = random_contraction(rng, n), c = random_contraction(rng, n);
    const SMatrix id = SMatrix::identity(2 * 0 + n);
    identity = std::max({identity, smatrix_distance(star_product(a, id), a), smatrix_distance(star_product(id, a), a)});
    assoc = std::max(assoc, smatrix_distance(star_product(star_product(a, b), c), star_product(a, star_product(b, c))));

    // U = (1 - R1 R2)^-1 against its Neumann series at spectral radius <= 0.9
    CMat r1 = random_matrix(rng, n), r2 = random_matrix(rng, n);
    const double rho = 0.5 + 0.4 * u(rng);
    r1 *= std::sqrt(rho) / spectral_norm(r1);
    r2 *= std::sqrt(rho) / spectral_norm(r2);
    const CMat U = cavity_operators(r1, r2).first;
    const CMat step = r1 * r2;
    CMat term = CMat::Identity(n, n), series = term;
    for (int k = 0; k < 2000 && max_abs(term) > 1e-18; ++k) {
      term = term * step;
      series += term;
    }
    neumann = std::max(neumann, max_abs(U - series));
  }
  const bool ok = identity < 1e-12 && assoc < 1e-12 && neumann < 1e-8;
  return {ok, fmt::format("identity {:.1e}, associativity {:.1e} (limit 1e-12); Neumann {:.1e} (limit 1e-8); 100 triples",
                          identity, assoc, neumann)};
}

// ---------------------------------------------------------------- 6

struct Deviation {
  double coefficient = 0.0;  // relative, diagonal vs planar
  double leakage = 0.0;      // largest off-diagonal magnitude
};

Deviation compare_with_planar(const GratingGeometry& g, const PlanarBody& slab_body, const ModeBasis& basis) {
  const SMatrix s = assemble_smatrix(basis, g);
  const int N = basis.orders();
  Deviation dev;
  for (int i = 0; i < 2 * N; ++i) {
    const Polarization p = i < N ? Polarization::TE : Polarization::TM;
    const PlanarResponse r = planar_response(slab_body, basis.frequency(), basis.kn()(i % N), p);
    const std::pair<cplx, cplx> pairs[] = {{s.r_minus()(i, i), r.r_front},
                                           {s.r_plus()(i, i), r.r_back},
                                           {s.t_plus()(i, i), r.t_in},
                                           {s.t_minus()(i, i), r.t_out}};
    for (const auto& [a, b] : pairs)
      dev.coefficient = std::max(dev.coefficient, std::abs(a - b) / std::max(std::abs(b), 1e-3));
    for (int j = 0; j < 2 * N; ++j)
      if (j != i)
        dev.leakage = std::max({dev.leakage, std::abs(s.r_minus()(j, i)), std::abs(s.r_plus()(j, i)),
                                std::abs(s.t_plus()(j, i)), std::abs(s.t_minus()(j, i))});
  }
  return dev;
}

Outcome reductions(Context&) {
  const Material silica = builtin_material("silica-model"), silicon = builtin_material("silicon-model");
  GratingGeometry base;
  base.period = 1.0 * um;
  base.depth = 0.8 * um;
  base.thickness = 2.0 * um;
  base.filling = 0.5;
  base.ridge = silica;
  base.groove = Material::vacuum();
  base.substrate = silicon;

  GratingGeometry full = base;
  full.filling = 1.0;
  GratingGeometry same = base;
  same.groove = silica;
  GratingGeometry flat = base;
  flat.depth = 0.0;

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double zone = phys::pi / base.period;
  Deviation worst;
  auto absorb = [&](const Deviation& d) {
    worst.coefficient = std::max(worst.coefficient, d.coefficient);
    worst.leakage = std::max(worst.leakage, d.leakage);
  };
  for (int i = 0; i < 20; ++i) {
    const bool imaginary = i % 2 == 1;
    const double f = 3e13 * std::pow(30.0, u(rng));
    const Frequency freq = imaginary ? Frequency::imaginary(f) : Frequency::real(f);
    const ModeBasis basis(freq, zone * (2.0 * u(rng) - 1.0), 3e6 * u(rng), 4, base.period);
    absorb(compare_with_planar(full, planar_body(full, GrooveBranch::ridge), basis));
    absorb(compare_with_planar(same, planar_body(same, GrooveBranch::ridge), basis));
    absorb(compare_with_planar(flat, planar_body(flat, GrooveBranch::ridge), basis));
  }
  // shallow corrugations approach the flat stack
  const ModeBasis probe(Frequency::real(1.2e14), 0.3 * zone, 1e6, 4, base.period);
  std::vector<double> approach;
  for (double h : {1e-8, 1e-9, 1e-10}) {
    GratingGeometry g = base;
    g.depth = h;
    approach.push_back(compare_with_planar(g, planar_body(flat, GrooveBranch::ridge), probe).coefficient);
  }
  const bool monotone = approach[0] > approach[1] && approach[1] > approach[2];
  const bool ok = worst.coefficient < 1e-10 && worst.leakage < 1e-12 && monotone;
  return {ok, fmt::format("coefficients {:.1e} (limit 1e-10), leakage {:.1e} (limit 1e-12), h -> 0 deviations "
                          "{:.1e} {:.1e} {:.1e}",
                          worst.coefficient, worst.leakage, approach[0], approach[1], approach[2])};
}

// ---------------------------------------------------------------- 7

Outcome truncation_convergence(Context&) {
  const GratingPair b = reference_gratings();
  const ThermalState th{200.0, 400.0, 10.0};
  const double d = 1.0 * um;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double zone = phys::pi / b.body1.period;
  std::vector<ModeSample> samples;
  for (int i = 0; i < 20; ++i) {
    const Frequency f = i % 2 == 0 ? Frequency::real(3e13 * std::pow(10.0, u(rng)))
                                   : Frequency::imaginary(2.47e14 * std::floor(1.0 + 4.0 * u(rng)));
    samples.push_back({f, zone * (2.0 * u(rng) - 1.0), 2.0 / d * u(rng)});
  }
  ScanOptions scan;
  scan.accuracy = 1e-2;
  scan.cap = 14;
  const Truncation t = convergence_scan(b, d, th, samples, scan);
  return {t.M <= 12, fmt::format("M = {}, mbar = {} at 1% for 20 modes, d = 1 um (need M <= 12)", t.M, t.mbar)};
}

// ---------------------------------------------------------------- 8, 9

const PressureResult& reference_pressure(Context& ctx, double d) {
  if (auto it = ctx.reference.find(d); it != ctx.reference.end()) return it->second;
  const GratingPair b = reference_gratings();
  const ThermalState th{200.0, 400.0, 10.0};
  ScanOptions scan;
  scan.accuracy = 1e-2;
  scan.cap = 12;
  Truncation t = convergence_scan(b, d, th, default_scan_samples(b, th, d), scan);
  t.M = std::min(t.M, 6);
  t.mbar = std::min(t.mbar, t.M);
  QuadratureSpec spec;
  spec.tolerance = 5e-2;
  spec.workers = ctx.options.workers;
  ctx.reference_truncation[d] = t;
  return ctx.reference[d] = pressure(b, th, d, t, spec);
}

Outcome pfa_gate(Context& ctx) {
  const GratingPair b = reference_gratings();
  const ThermalState th{200.0, 400.0, 10.0};
  QuadratureSpec spec;
  spec.tolerance = 5e-2;
  bool ok = true;
  std::string detail;
  for (double d : {2.0 * um, 6.0 * um}) {
    const double exact = reference_pressure(ctx, d).total;
    const double approx = pfa_pressure(b.body1, b.body2, d, th, spec).total;
    const double ratio = exact / approx;
    ok = ok && ratio >= 0.75 && ratio <= 1.25;
    const Truncation t = ctx.reference_truncation[d];
    detail += fmt::format("d={}um: exact {:.4e} pfa {:.4e} ratio {:.3f} (M={}, mbar={}); ", d / um, exact, approx,
                          ratio, t.M, t.mbar);
  }
  return {ok, detail + "need ratio in [0.75, 1.25]"};
}

Outcome noneq_physics(Context& ctx) {
  const std::vector<double> grid{1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0};
  std::vector<double> p;
  std::string detail = "P(d):";
  for (double x : grid) {
    p.push_back(reference_pressure(ctx, x * um).total);
    detail += fmt::format(" {}um {:.3e};", x, p.back());
  }
  int changes = 0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    if ((p[i] < 0.0) != (p[i + 1] < 0.0)) ++changes;
  // past the transition: repulsive out of equilibrium, attractive at either equilibrium temperature
  const double d_far = grid.back() * um;
  QuadratureSpec spec;
  spec.tolerance = 1e-2;
  const GratingPair b = reference_gratings();
  const Truncation t = ctx.reference_truncation[d_far];
  const double eq_cold = matsubara_sum(b, 200.0, d_far, t, spec).value;
  const double eq_hot = matsubara_sum(b, 400.0, d_far, t, spec).value;
  const bool ok = changes == 1 && p.back() > 0.0 && eq_cold < 0.0 && eq_hot < 0.0;
  return {ok, detail + fmt::format(" sign changes {} (need 1); at {}um equilibrium 200 K {:.3e}, 400 K {:.3e}",
                                   changes, grid.back(), eq_cold, eq_hot)};
}

// ---------------------------------------------------------------- 10

Outcome spectral_consistency(Context& ctx) {
  const GratingPair b = reference_gratings(1.0);
  const ThermalState th{200.0, 400.0, 10.0};
  const double d = 4.0 * um;
  const Truncation t{0, 0};
  QuadratureSpec spec;
  spec.tolerance = 1e-3;
  spec.workers = ctx.options.workers;
  const double total = integrate_delta(b, th, d, t, spec).value;

  const double lo = spec.omega_min, hi = omega_cutoff(th, spec);
  const int n = 1200;
  std::vector<double> omega(n), density(n);
  for (int i = 0; i < n; ++i) {
    omega[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
    density[i] = spectral_density(b, th, d, omega[i], t, spec).value;
  }
  double trap = 0.0, abs_all = 0.0, abs_high = 0.0, abs_mid = 0.0, peak = 0.0, peak_high = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    const double w = omega[i + 1] - omega[i];
    trap += 0.5 * w * (density[i] + density[i + 1]);
    const double a = 0.5 * w * (std::abs(density[i]) + std::abs(density[i + 1]));
    abs_all += a;
    if (omega[i] >= 6e14) abs_high += a;
    if (omega[i] >= 3e14) abs_mid += a;
  }
  for (int i = 0; i < n; ++i) {
    peak = std::max(peak, std::abs(density[i]));
    if (omega[i] >= 6e14) peak_high = std::max(peak_high, std::abs(density[i]));
  }
  const double r = rel_diff(trap, total);
  const bool ok = r < 1e-2 && abs_high < 0.02 * abs_all && peak_high < 0.01 * peak;
  return {ok, fmt::format("trapezoid {:.6e} vs delta_part {:.6e} (rel {:.2e}, limit 1e-2); above 6e14 rad/s: "
                          "{:.2e} of the weight (limit 0.02), peak ratio {:.2e} (limit 0.01); above 3e14 rad/s: {:.2e}",
                          trap, total, r, abs_high / abs_all, peak_high / peak, abs_mid / abs_all)};
}

struct Entry {
  int id;
  const char* name;
  double limit;  // seconds
  Outcome (*run)(Context&);
};

const Entry kCriteria[] = {
    {1, "slab oracle equivalence", 120.0, slab_oracle},
    {2, "Lifshitz oracle", 60.0, lifshitz_oracle},
    {3, "equilibrium null", 300.0, equilibrium_null},
    {4, "energy conservation", 120.0, energy_conservation},
    {5, "star-product algebra", 60.0, star_algebra},
    {6, "h -> 0 and uniform-profile reductions", 60.0, reductions},
    {7, "truncation convergence", 600.0, truncation_convergence},
    {8, "PFA gate", 7200.0, pfa_gate},
    {9, "non-equilibrium sign change", 14400.0, noneq_physics},
    {10, "spectral consistency", 3600.0, spectral_consistency},
};

}  // namespace

GratingPair reference_gratings(double filling) {
  const Material silica = builtin_material("silica-model"), silicon = builtin_material("silicon-model");
  GratingGeometry g1;
  g1.period = 1.0 * um;
  g1.depth = 1.0 * um;
  g1.thickness = 9.0 * um;
  g1.filling = filling;
  g1.ridge = silica;
  g1.groove = Material::vacuum();
  g1.substrate = silica;
  GratingGeometry g2 = g1;
  g2.ridge = silicon;
  g2.substrate = silicon;
  g2.thickness = std::nullopt;
  return {g1, g2};
}

std::vector<CriterionResult> run_acceptance(const ValidationOptions& options) {
  Context ctx{options, {}, {}};
  std::vector<CriterionResult> out;
  for (const Entry& e : kCriteria) {
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), e.id) == options.only.end())
      continue;
    CriterionResult r;
    r.id = e.id;
    r.name = e.name;
    r.limit_seconds = e.limit;
    const auto start = clock_type::now();
    try {
      const Outcome o = e.run(ctx);
      r.pass = o.pass;
      r.detail = o.detail;
    } catch (const std::exception& ex) {
      r.pass = false;
      r.detail = fmt::format("error: {}", ex.what());
    }
    r.seconds = std::chrono::duration<double>(clock_type::now() - start).count();
    if (r.seconds > r.limit_seconds) {
      r.pass = false;
      r.detail += fmt::format(" [runtime {:.0f} s exceeds {:.0f} s]", r.seconds, r.limit_seconds);
    }
    if (options.on_result) options.on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  return fmt::format("{} {:2d} {}: {} ({:.1f} s, limit {:.0f} s)", r.pass ? "PASS" : "FAIL", r.id, r.name, r.detail,
                     r.seconds, r.limit_seconds);
}

}  // namespace ote
