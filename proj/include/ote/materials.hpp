#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ote/frequency.hpp"
#include "ote/types.hpp"

namespace ote {

struct Oscillator {
  double strength;   // dimensionless
  double resonance;  // rad/s
  double damping;    // rad/s
};

// eps(w) = eps_inf + sum_j s_j w_j^2 / (w_j^2 - w^2 - i g_j w)
class OscillatorModel {
 public:
  OscillatorModel(double eps_inf, std::vector<Oscillator> oscillators);

  cplx eps(double omega) const;
  double eps_imag_axis(double xi) const;

  double eps_inf() const { return eps_inf_; }
  const std::vector<Oscillator>& oscillators() const { return oscillators_; }

 private:
  double eps_inf_;
  std::vector<Oscillator> oscillators_;
};

struct TableSample {
  double omega;  // rad/s
  double eps_re;
  double eps_im;
};

// Real-axis data, linear in log(omega) between samples. The imaginary axis
// is reached through a Kramers-Kronig integral over the table support.
class TabulatedIndex {
 public:
  explicit TabulatedIndex(std::vector<TableSample> samples, bool extrapolate = false);

  cplx eps(double omega) const;
  double eps_imag_axis(double xi) const;

  const std::vector<TableSample>& samples() const { return samples_; }
  bool extrapolates() const { return extrapolate_; }
  double omega_min() const { return samples_.front().omega; }
  double omega_max() const { return samples_.back().omega; }

 private:
  std::vector<TableSample> samples_;
  std::vector<double> log_omega_;
  bool extrapolate_;
};

struct TableOptions {
  bool energy_in_ev = false;  // first column in eV instead of rad/s
  bool extrapolate = false;   // constant extrapolation outside the support
};

TabulatedIndex load_table(const std::filesystem::path& path, const TableOptions& options = {});
TabulatedIndex parse_table(std::string_view text, const TableOptions& options = {},
                           std::string_view source = "<table>");

// Dense log-spaced sampling of an oscillator model, mostly for tests.
TabulatedIndex tabulate(const OscillatorModel& model, double omega_lo, double omega_hi,
                        std::size_t count);

struct Vacuum {};

class Material {
 public:
  using Response = std::variant<Vacuum, OscillatorModel, TabulatedIndex>;

  Material() : id_("vacuum"), response_(Vacuum{}) {}
  Material(std::string id, Response response);

  static Material vacuum() { return Material(); }

  const std::string& id() const { return id_; }
  const Response& response() const { return response_; }
  bool is_vacuum() const { return std::holds_alternative<Vacuum>(response_); }

  cplx permittivity(double omega) const;
  double permittivity_imag_axis(double xi) const;
  // Dispatches on the axis; imaginary-axis values come back as real complex numbers.
  cplx permittivity(const Frequency& f) const;

  // Canonical text form of the response, used for hashing and config echo.
  std::string fingerprint() const;

 private:
  std::string id_;
  Response response_;
};

cplx permittivity(const Material& m, double omega);
double permittivity_imag_axis(const Material& m, double xi);

// "vacuum", "silica-model", "silicon-model"
Material builtin_material(std::string_view name);
std::vector<std::string> builtin_material_names();

}  // namespace ote
