#include "ote/commands.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "ote/errors.hpp"
#include "ote/planar.hpp"

namespace ote {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

QuadratureSpec spec_for(const RunConfig& c, int workers) {
  QuadratureSpec s = c.quadrature;
  s.workers = std::max(1, workers);
  return s;
}

// Crossing inside [x0, x1] by linear interpolation, NaN when the sign holds.
double bracket(double x0, double p0, double x1, double p1) {
  if (!(p0 * p1 < 0.0)) return p0 == 0.0 ? x0 : kNaN;
  return x0 + (x1 - x0) * p0 / (p0 - p1);
}

std::string row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out + '\n';
}

// Runs `n` independent jobs; spreads them over workers only when there are more
// jobs than workers, otherwise each job gets all the workers internally.
template <class Job>
void run_jobs(int n, int workers, const Job& job) {
  const bool outer = workers > 1 && n > workers;
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers) if (outer)
  for (int i = 0; i < n; ++i) {
    try {
      job(i, outer ? 1 : workers);
    } catch (...) {
#pragma omp critical(ote_job_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::string format_number(double x, int precision) {
  if (std::isnan(x)) return "nan";
  if (x == 0.0) return "0";
  return fmt::format("{:.{}g}", x, precision);
}

double sign_change(const std::vector<double>& x, const std::vector<double>& p) {
  for (std::size_t i = 0; i + 1 < x.size() && i + 1 < p.size(); ++i) {
    const double b = bracket(x[i], p[i], x[i + 1], p[i + 1]);
    if (!std::isnan(b)) return b;
  }
  return kNaN;
}

Truncation resolve_truncation(const RunConfig& config, const GratingPair& bodies) {
  if (!config.truncation.automatic) return {config.truncation.M, config.truncation.mbar};
  ScanOptions scan;
  scan.accuracy = config.truncation.accuracy;
  scan.cap = config.truncation.cap;
  const auto samples = default_scan_samples(bodies, config.thermal, config.distance);
  return convergence_scan(bodies, config.distance, config.thermal, samples, scan, config.quadrature.fmm);
}

PointResult run_point(const RunConfig& config, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const GratingPair bodies = config.bodies();
  bodies.validate(!config.thermal.equilibrium());
  PointResult r;
  r.distance = config.distance;
  r.truncation = resolve_truncation(config, bodies);
  r.pressure = pressure(bodies, config.thermal, config.distance, r.truncation, spec_for(config, options.workers),
                        options.cache);
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string csv_preamble(const RunConfig& config, std::string_view command) {
  std::string out = fmt::format("# ote-casimir {}\n# command: {}\n# config:\n", OTE_VERSION, command);
  // destination and cache location are plumbing; leaving them out keeps the bytes independent of both
  RunConfig shown = config;
  shown.output.path.reset();
  shown.cache_dir.reset();
  std::istringstream lines(shown.echo());
  for (std::string line; std::getline(lines, line);) out += "# " + line + '\n';
  return out;
}

std::string cmd_pressure(const RunConfig& config, const RunOptions& options) {
  const PointResult r = run_point(config, options);
  const int p = config.output.precision;
  std::string out = csv_preamble(config, "pressure");
  out += "d,total,eq_part,delta_part,error,M,mbar,wall_time\n";
  out += row({format_number(r.distance, p), format_number(r.pressure.total, p), format_number(r.pressure.eq_part, p),
              format_number(r.pressure.delta_part, p), format_number(r.pressure.error_estimate, p),
              std::to_string(r.truncation.M), std::to_string(r.truncation.mbar),
              format_number(config.output.timing ? r.wall_time : 0.0, p)});
  return out;
}

std::string cmd_sweep(const RunConfig& config, const RunOptions& options) {
  if (!config.sweep) throw UsageError("the sweep command needs a \"sweep\" section in the configuration");
  const SweepConfig& sweep = *config.sweep;
  if (!valid_axis(sweep.axis)) throw UsageError(fmt::format("unknown sweep axis \"{}\"", sweep.axis));
  const int n = static_cast<int>(sweep.values.size());
  std::vector<RunConfig> points;
  for (double v : sweep.values) points.push_back(with_axis_value(config, sweep.axis, v));

  // PFA column only when every sample satisfies its precondition
  bool with_pfa = true;
  for (const auto& c : points) {
    const GratingPair b = c.bodies();
    with_pfa = with_pfa && pfa_applicable(b.body1, b.body2) && (c.thermal.equilibrium() || !b.body1.semi_infinite());
  }

  std::vector<PointResult> results(n);
  std::vector<double> pfa(n, kNaN);
  run_jobs(n, options.workers, [&](int i, int workers) {
    results[i] = run_point(points[i], {workers, options.cache});
    if (with_pfa) {
      const GratingPair b = points[i].bodies();
      pfa[i] = pfa_pressure(b.body1, b.body2, points[i].distance, points[i].thermal, spec_for(points[i], workers))
                   .total;
    }
  });

  const bool with_d0 = sweep.axis == "d";
  const int p = config.output.precision;
  std::string out = csv_preamble(config, "sweep");
  std::string head = sweep.axis + ",d,total,eq_part,delta_part,error,M,mbar";
  if (with_pfa) head += ",pfa";
  if (with_d0) head += ",d0";
  out += head + ",wall_time\n";
  for (int i = 0; i < n; ++i) {
    const PointResult& r = results[i];
    std::vector<std::string> cells{format_number(sweep.values[i], p),
                                   format_number(r.distance, p),
                                   format_number(r.pressure.total, p),
                                   format_number(r.pressure.eq_part, p),
                                   format_number(r.pressure.delta_part, p),
                                   format_number(r.pressure.error_estimate, p),
                                   std::to_string(r.truncation.M),
                                   std::to_string(r.truncation.mbar)};
    if (with_pfa) cells.push_back(format_number(pfa[i], p));
    if (with_d0) {
      // crossing between this sample and the next
      double d0 = kNaN;
      if (i + 1 < n) d0 = bracket(r.distance, r.pressure.total, results[i + 1].distance, results[i + 1].pressure.total);
      cells.push_back(format_number(d0, p));
    }
    cells.push_back(format_number(config.output.timing ? r.wall_time : 0.0, p));
    out += row(cells);
  }
  return out;
}

std::string cmd_spectrum(const RunConfig& config, const RunOptions& options) {
  if (config.spectrum.empty()) throw UsageError("the spectrum command needs a \"spectrum\" section in the configuration");
  const GratingPair bodies = config.bodies();
  const Truncation tr = resolve_truncation(config, bodies);
  const int n = static_cast<int>(config.spectrum.size());
  std::vector<QuadResult> values(n);
  run_jobs(n, options.workers, [&](int i, int workers) {
    values[i] = spectral_density(bodies, config.thermal, config.distance, config.spectrum[i], tr,
                                 spec_for(config, workers), options.cache);
  });
  const int p = config.output.precision;
  std::string out = csv_preamble(config, "spectrum");
  out += "omega,density,error,M,mbar\n";
  for (int i = 0; i < n; ++i)
    out += row({format_number(config.spectrum[i], p), format_number(values[i].value, p),
                format_number(values[i].error, p), std::to_string(tr.M), std::to_string(tr.mbar)});
  return out;
}

std::string cmd_pfa(const RunConfig& config, const RunOptions& options) {
  std::vector<double> distances{config.distance};
  if (config.sweep && config.sweep->axis == "d") distances = config.sweep->values;
  const int n = static_cast<int>(distances.size());
  std::vector<PointResult> exact(n);
  std::vector<PressureResult> approx(n);
  run_jobs(n, options.workers, [&](int i, int workers) {
    RunConfig c = with_axis_value(config, "d", distances[i]);
    const GratingPair b = c.bodies();
    approx[i] = pfa_pressure(b.body1, b.body2, c.distance, c.thermal, spec_for(c, workers));
    exact[i] = run_point(c, {workers, options.cache});
  });
  const int p = config.output.precision;
  std::string out = csv_preamble(config, "pfa");
  out += "d,exact,pfa,ratio,pfa_eq_part,pfa_delta_part,M,mbar\n";
  for (int i = 0; i < n; ++i) {
    const double ratio = approx[i].total != 0.0 ? exact[i].pressure.total / approx[i].total : kNaN;
    out += row({format_number(distances[i], p), format_number(exact[i].pressure.total, p),
                format_number(approx[i].total, p), format_number(ratio, p), format_number(approx[i].eq_part, p),
                format_number(approx[i].delta_part, p), std::to_string(exact[i].truncation.M),
                std::to_string(exact[i].truncation.mbar)});
  }
  return out;
}

std::string cmd_scan_truncation(const RunConfig& config, const RunOptions&) {
  const GratingPair bodies = config.bodies();
  ScanOptions scan;
  scan.accuracy = config.truncation.accuracy;
  scan.cap = config.truncation.cap;
  const auto samples = default_scan_samples(bodies, config.thermal, config.distance);
  const Truncation t =
      convergence_scan(bodies, config.distance, config.thermal, samples, scan, config.quadrature.fmm);
  const int p = config.output.precision;
  std::string out = csv_preamble(config, "scan-truncation");
  out += "d,accuracy,cap,samples,M,mbar\n";
  out += row({format_number(config.distance, p), format_number(scan.accuracy, p), std::to_string(scan.cap),
              std::to_string(samples.size()), std::to_string(t.M), std::to_string(t.mbar)});
  return out;
}

}  // namespace ote
