#pragma once

#include <string>
#include <string_view>

#include "ote/config.hpp"

namespace ote {

class SMatrixCache;

struct RunOptions {
  int workers = 1;
  SMatrixCache* cache = nullptr;
};

struct PointResult {
  double distance = 0.0;
  PressureResult pressure;
  Truncation truncation;
  double wall_time = 0.0;  // seconds
};

// Fixed truncation from the config, or a scan at the config's distance.
Truncation resolve_truncation(const RunConfig& config, const GratingPair& bodies);

PointResult run_point(const RunConfig& config, const RunOptions& options);

// '#'-prefixed block: code version, command, echoed config.
std::string csv_preamble(const RunConfig& config, std::string_view command);
std::string format_number(double x, int precision);

std::string cmd_pressure(const RunConfig& config, const RunOptions& options);
std::string cmd_sweep(const RunConfig& config, const RunOptions& options);
std::string cmd_spectrum(const RunConfig& config, const RunOptions& options);
std::string cmd_pfa(const RunConfig& config, const RunOptions& options);
std::string cmd_scan_truncation(const RunConfig& config, const RunOptions& options);

// Linear interpolation of the first sign change of `p` over `x`; NaN if none.
double sign_change(const std::vector<double>& x, const std::vector<double>& p);

}  // namespace ote
