#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ote/fmm.hpp"
#include "ote/neq_force.hpp"
#include "ote/quadrature.hpp"

namespace ote {

struct BodyConfig {
  double depth = 0.0;
  std::optional<double> thickness;  // nullopt = semi-infinite
  double filling = 0.5;
  double shift = 0.0;
  std::string ridge = "vacuum";
  std::string groove = "vacuum";
  std::string substrate = "vacuum";
  std::string outer = "vacuum";
};

struct TruncationConfig {
  bool automatic = true;
  int M = 0;
  int mbar = 0;
  double accuracy = 1e-2;
  int cap = 30;
};

struct SweepConfig {
  std::string axis;
  std::vector<double> values;
};

struct OutputConfig {
  std::optional<std::string> path;
  int precision = 12;
  bool timing = false;  // wall-time column; off keeps the CSV byte-reproducible
};

struct RunConfig {
  double period = 1e-6;
  double distance = 1e-6;
  BodyConfig body1, body2;
  std::map<std::string, nlohmann::ordered_json> materials;  // user definitions, canonical form
  ThermalState thermal{300.0, 300.0, 300.0};
  QuadratureSpec quadrature;
  TruncationConfig truncation;
  std::optional<SweepConfig> sweep;
  std::vector<double> spectrum;  // omega grid, rad/s
  OutputConfig output;
  std::optional<std::string> cache_dir;

  static RunConfig parse(std::string_view text, std::string_view source = "<config>");
  static RunConfig load(const std::string& path);

  // Canonical JSON with every default spelled out; parse(echo()) reproduces the run.
  nlohmann::ordered_json to_json() const;
  std::string echo() const;

  Material material(const std::string& name) const;
  GratingGeometry geometry(int body) const;
  GratingPair bodies() const;
};

// Sweep axes: d, T1, T2, Te, Tb, f, D, h. Throws UsageError on anything else.
RunConfig with_axis_value(const RunConfig& base, const std::string& axis, double value);
bool valid_axis(const std::string& axis);

}  // namespace ote
