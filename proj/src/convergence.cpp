#include <algorithm>
#include <array>
#include <deque>
#include <cmath>

#include <fmt/format.h>

#include "ote/errors.hpp"
#include "ote/quadrature.hpp"

namespace ote {

namespace {

double block_max(const CMat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

double smatrix_diff(const SMatrix& a, const SMatrix& b) {
  double d = std::max(block_max(a.r_minus() - b.r_minus()), block_max(a.r_plus() - b.r_plus()));
  if (!a.transmission_masked() && !b.transmission_masked())
    d = std::max({d, block_max(a.t_minus() - b.t_minus()), block_max(a.t_plus() - b.t_plus())});
  return d;
}

double smatrix_scale(const SMatrix& s) {
  double m = std::max(block_max(s.r_minus()), block_max(s.r_plus()));
  if (!s.transmission_masked()) m = std::max({m, block_max(s.t_minus()), block_max(s.t_plus())});
  return m;
}

}  // namespace

int stable_truncation(const GratingPair& bodies, const std::vector<ModeSample>& samples, int mbar, double accuracy,
                      int cap, const FmmOptions& fmm) {
  const double period = bodies.body1.period;
  auto compute = [&](int M) {
    std::vector<SMatrix> out;
    for (const auto& s : samples) {
      const ModeBasis basis(s.frequency, s.kx, s.ky, M, period);
      out.push_back(assemble_smatrix(basis, bodies.body1, fmm));
      out.push_back(assemble_smatrix(basis, bodies.body2, fmm));
    }
    return out;
  };
  std::deque<std::vector<SMatrix>> by_M;  // index M - mbar; deque keeps references stable
  auto at = [&](int M) -> const std::vector<SMatrix>& {
    while (static_cast<int>(by_M.size()) <= M - mbar) by_M.push_back(compute(mbar + static_cast<int>(by_M.size())));
    return by_M[M - mbar];
  };
  for (int M = mbar; M + 2 <= cap; ++M) {
    const auto& lo = at(M);
    const auto& hi = at(M + 2);
    bool ok = true;
    for (std::size_t i = 0; i < lo.size() && ok; ++i) {
      const double scale = smatrix_scale(hi[i]);
      const double diff = smatrix_diff(lo[i].central_block(M, mbar), hi[i].central_block(M + 2, mbar));
      ok = diff <= accuracy * scale;
    }
    if (ok) return M;
  }
  throw ConvergenceError(fmt::format("no stable truncation M <= {} for mbar = {}", cap, mbar));
}

Truncation convergence_scan(const GratingPair& bodies, double d, const ThermalState& thermal,
                            const std::vector<ModeSample>& samples, const ScanOptions& options,
                            const FmmOptions& fmm) {
  if (!(options.accuracy > 0.0) || options.cap < 1 || options.mbar_buffer < 0)
    throw ValidationError("invalid truncation scan options");
  thermal.validate();
  if (bodies.body1.empty() && bodies.body2.empty()) return {0, 0};
  std::vector<ModeSample> used;
  for (const auto& s : samples) {
    if (!s.frequency.is_imaginary() && (thermal.equilibrium() || bodies.body1.semi_infinite())) continue;
    used.push_back(s);
  }
  if (used.empty()) return {0, 0};

  auto evaluate = [&](int mbar) {
    const int M = std::min(options.cap, mbar + options.mbar_buffer);
    std::vector<double> v;
    for (const auto& s : used) {
      const ModeBasis basis(s.frequency, s.kx, s.ky, M, bodies.body1.period);
      const ModeOperators ops = build_mode_operators(basis, bodies, d, mbar, fmm);
      v.push_back(s.frequency.is_imaginary() ? eq_integrand(ops).value : delta_integrand(ops, thermal).value);
    }
    return v;
  };

  std::vector<double> prev = evaluate(0);
  int mbar = -1;
  for (int m = 0; m + 1 <= options.cap; ++m) {
    const std::vector<double> next = evaluate(m + 1);
    // relative per sample, floored by the largest sample of the same kind
    double floor_real = 0.0, floor_imag = 0.0;
    for (std::size_t i = 0; i < used.size(); ++i)
      (used[i].frequency.is_imaginary() ? floor_imag : floor_real) =
          std::max(used[i].frequency.is_imaginary() ? floor_imag : floor_real, std::abs(next[i]));
    bool ok = true;
    for (std::size_t i = 0; i < used.size() && ok; ++i) {
      const double fl = 1e-6 * (used[i].frequency.is_imaginary() ? floor_imag : floor_real);
      ok = std::abs(next[i] - prev[i]) <= options.accuracy * std::max(std::abs(next[i]), fl);
    }
    if (ok) {
      mbar = m;
      break;
    }
    prev = next;
  }
  if (mbar < 0) throw ConvergenceError(fmt::format("trace truncation not converged below the cap {}", options.cap));
  return {stable_truncation(bodies, used, mbar, options.accuracy, options.cap, fmm), mbar};
}

std::vector<ModeSample> default_scan_samples(const GratingPair& bodies, const ThermalState& thermal, double d) {
  const double zone = phys::pi / bodies.body1.period;
  const std::array<std::pair<double, double>, 3> points{{{0.13, 0.3}, {0.57, 1.1}, {0.91, 0.05}}};
  std::vector<ModeSample> out;
  auto add = [&](Frequency f) {
    for (const auto& [x, y] : points) out.push_back({f, x * zone, y / d});
  };
  if (!thermal.equilibrium()) {
    const double tmax = std::max({thermal.T1, thermal.T2, thermal.Te});
    const double peak = 2.82 * phys::k_B * tmax / phys::hbar;
    for (double s : {0.5, 1.0, 2.0}) add(Frequency::real(s * peak));
  }
  const double xi1 = thermal.T1 > 0.0 ? 2.0 * phys::pi * phys::k_B * thermal.T1 / phys::hbar : phys::c / (2.0 * d);
  add(Frequency::imaginary(xi1));
  add(Frequency::imaginary(0.0));
  return out;
}

}  // namespace ote
