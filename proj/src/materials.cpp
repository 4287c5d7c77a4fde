#include "ote/materials.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "ote/errors.hpp"
#include "ote/hash.hpp"

namespace ote {

OscillatorModel::OscillatorModel(double eps_inf, std::vector<Oscillator> oscillators)
    : eps_inf_(eps_inf), oscillators_(std::move(oscillators)) {
  if (!(eps_inf_ >= 1.0) || !std::isfinite(eps_inf_))
    throw ValidationError(fmt::format("oscillator model: eps_inf must be >= 1 (got {})", eps_inf_));
  for (const auto& o : oscillators_) {
    if (!(o.strength >= 0.0) || !(o.resonance > 0.0) || !(o.damping >= 0.0) ||
        !std::isfinite(o.strength + o.resonance + o.damping))
      throw ValidationError(fmt::format(
          "oscillator model: need s >= 0, w > 0, g >= 0 (got s={}, w={}, g={})", o.strength,
          o.resonance, o.damping));
  }
}

cplx OscillatorModel::eps(double omega) const {
  cplx e = eps_inf_;
  for (const auto& o : oscillators_) {
    const double w2 = o.resonance * o.resonance;
    e += o.strength * w2 / cplx(w2 - omega * omega, -o.damping * omega);
  }
  return e;
}

double OscillatorModel::eps_imag_axis(double xi) const {
  double e = eps_inf_;
  for (const auto& o : oscillators_) {
    const double w2 = o.resonance * o.resonance;
    e += o.strength * w2 / (w2 + xi * xi + o.damping * xi);
  }
  return e;
}

TabulatedIndex::TabulatedIndex(std::vector<TableSample> samples, bool extrapolate)
    : samples_(std::move(samples)), extrapolate_(extrapolate) {
  if (samples_.size() < 2) throw FormatError("table needs at least 2 rows");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (!(s.omega > 0.0) || !std::isfinite(s.omega) || !std::isfinite(s.eps_re) ||
        !std::isfinite(s.eps_im))
      throw FormatError(fmt::format("table row {}: non-finite or non-positive frequency", i + 1));
    if (i > 0 && !(s.omega > samples_[i - 1].omega))
      throw FormatError(fmt::format("table row {}: frequencies must be strictly increasing", i + 1));
    if (s.eps_im < 0.0)
      throw ValidationError(
          fmt::format("table row {}: Im eps = {} < 0 violates passivity", i + 1, s.eps_im));
  }
  log_omega_.reserve(samples_.size());
  for (const auto& s : samples_) log_omega_.push_back(std::log(s.omega));
}

cplx TabulatedIndex::eps(double omega) const {
  if (!(omega > 0.0)) throw RangeError(fmt::format("frequency must be positive (got {})", omega));
  if (omega < omega_min() || omega > omega_max()) {
    if (!extrapolate_)
      throw RangeError(fmt::format("frequency {:.6g} rad/s outside table support [{:.6g}, {:.6g}]",
                                   omega, omega_min(), omega_max()));
    const auto& s = omega < omega_min() ? samples_.front() : samples_.back();
    return {s.eps_re, s.eps_im};
  }
  const double x = std::log(omega);
  auto it = std::upper_bound(log_omega_.begin(), log_omega_.end(), x);
  std::size_t hi = std::min<std::size_t>(it - log_omega_.begin(), samples_.size() - 1);
  std::size_t lo = hi - 1;
  const double t = (x - log_omega_[lo]) / (log_omega_[hi] - log_omega_[lo]);
  const auto& a = samples_[lo];
  const auto& b = samples_[hi];
  return {a.eps_re + t * (b.eps_re - a.eps_re), a.eps_im + t * (b.eps_im - a.eps_im)};
}

// eps(i xi) = 1 + background + (2/pi) int w^2 Im eps(w) / (w^2 + xi^2) d ln w,
// trapezoid on the table grid, zero absorption outside the support. Absorption
// above the support is represented by a constant background Re eps(w_max) - 1.
double TabulatedIndex::eps_imag_axis(double xi) const {
  if (!(xi >= 0.0)) throw RangeError(fmt::format("imaginary frequency must be >= 0 (got {})", xi));
  double sum = 0.0;
  const double xi2 = xi * xi;
  auto g = [&](std::size_t i) {
    const double w2 = samples_[i].omega * samples_[i].omega;
    return w2 * samples_[i].eps_im / (w2 + xi2);
  };
  for (std::size_t i = 1; i < samples_.size(); ++i)
    sum += 0.5 * (g(i) + g(i - 1)) * (log_omega_[i] - log_omega_[i - 1]);
  const double background = std::max(0.0, samples_.back().eps_re - 1.0);
  return 1.0 + background + 2.0 / phys::pi * sum;
}

TabulatedIndex parse_table(std::string_view text, const TableOptions& options,
                           std::string_view source) {
  std::vector<TableSample> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    TableSample s{};
    std::string extra;
    if (!(fields >> s.omega >> s.eps_re >> s.eps_im) || (fields >> extra))
      throw FormatError(fmt::format("{}:{}: expected three numeric columns", source, lineno));
    if (options.energy_in_ev) s.omega *= phys::eV / phys::hbar;
    if (!rows.empty() && !(s.omega > rows.back().omega))
      throw FormatError(fmt::format("{}:{}: frequency column is not strictly increasing", source, lineno));
    if (s.eps_im < 0.0)
      throw ValidationError(fmt::format("{}:{}: negative Im eps ({})", source, lineno, s.eps_im));
    rows.push_back(s);
  }
  if (rows.size() < 2)
    throw FormatError(fmt::format("{}: table needs at least 2 data rows (found {})", source, rows.size()));
  return TabulatedIndex(std::move(rows), options.extrapolate);
}

TabulatedIndex load_table(const std::filesystem::path& path, const TableOptions& options) {
  std::ifstream f(path);
  if (!f) throw FormatError(fmt::format("cannot open table '{}'", path.string()));
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_table(buf.str(), options, path.string());
}

TabulatedIndex tabulate(const OscillatorModel& model, double omega_lo, double omega_hi,
                        std::size_t count) {
  if (count < 2 || !(omega_lo > 0.0) || !(omega_hi > omega_lo))
    throw ValidationError("tabulate: need count >= 2 and 0 < omega_lo < omega_hi");
  std::vector<TableSample> rows(count);
  const double a = std::log(omega_lo), b = std::log(omega_hi);
  for (std::size_t i = 0; i < count; ++i) {
    const double w = std::exp(a + (b - a) * double(i) / double(count - 1));
    const cplx e = model.eps(w);
    rows[i] = {w, e.real(), std::max(0.0, e.imag())};
  }
  return TabulatedIndex(std::move(rows));
}

Material::Material(std::string id, Response response)
    : id_(std::move(id)), response_(std::move(response)) {}

cplx Material::permittivity(double omega) const {
  if (!(omega > 0.0)) throw RangeError(fmt::format("frequency must be positive (got {})", omega));
  return std::visit(
      [&](const auto& r) -> cplx {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, Vacuum>)
          return 1.0;
        else
          return r.eps(omega);
      },
      response_);
}

double Material::permittivity_imag_axis(double xi) const {
  if (!(xi >= 0.0)) throw RangeError(fmt::format("imaginary frequency must be >= 0 (got {})", xi));
  return std::visit(
      [&](const auto& r) -> double {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, Vacuum>)
          return 1.0;
        else
          return r.eps_imag_axis(xi);
      },
      response_);
}

cplx Material::permittivity(const Frequency& f) const {
  return f.is_imaginary() ? cplx(permittivity_imag_axis(f.value()), 0.0) : permittivity(f.value());
}

std::string Material::fingerprint() const {
  return std::visit(
      [](const auto& r) -> std::string {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, Vacuum>) {
          return "vacuum";
        } else if constexpr (std::is_same_v<R, OscillatorModel>) {
          std::string s = fmt::format("osc:{:.17g}", r.eps_inf());
          for (const auto& o : r.oscillators())
            s += fmt::format(";{:.17g},{:.17g},{:.17g}", o.strength, o.resonance, o.damping);
          return s;
        } else {
          Fnv1a h;
          for (const auto& s : r.samples()) h.add(s.omega).add(s.eps_re).add(s.eps_im);
          return fmt::format("table:{}:{:016x}:{}", r.samples().size(), h.value(),
                             r.extrapolates() ? 1 : 0);
        }
      },
      response_);
}

cplx permittivity(const Material& m, double omega) { return m.permittivity(omega); }
double permittivity_imag_axis(const Material& m, double xi) { return m.permittivity_imag_axis(xi); }

Material builtin_material(std::string_view name) {
  if (name == "vacuum") return Material::vacuum();
  // Two-resonance phonon model of amorphous silica (Si-O rocking and stretching bands).
  if (name == "silica-model")
    return Material("silica-model",
                    OscillatorModel(2.1, {{0.9, 8.7e13, 5.0e12}, {0.7, 2.0e14, 1.2e13}}));
  // Interband oscillator giving eps(0) ~ 11.7, plus a weak lattice absorption line.
  if (name == "silicon-model")
    return Material("silicon-model",
                    OscillatorModel(1.0, {{10.7, 6.6e15, 1.0e14}, {0.01, 1.15e14, 1.0e13}}));
  throw ValidationError(fmt::format("unknown built-in material '{}'", name));
}

std::vector<std::string> builtin_material_names() {
  return {"vacuum", "silica-model", "silicon-model"};
}

}  // namespace ote
