#include <doctest.h>

#include "support.hpp"

#include <string>

#include "ote/config.hpp"
#include "ote/errors.hpp"

using namespace ote;

namespace {

const std::string minimal = R"({
  // comments are allowed
  "geometry": {
    "period": 1e-6,
    "distance": 2e-6,
    "body1": {"depth": 1e-6, "thickness": 9e-6, "ridge": "silica-model"},
    "body2": {"depth": 1e-6, "ridge": "silicon-model"}
  }
})";

std::string with(const std::string& needle, const std::string& replacement) {
  std::string s = minimal;
  s.replace(s.find(needle), needle.size(), replacement);
  return s;
}

void check_error_line(const std::string& text, int line, const std::string& fragment) {
  try {
    RunConfig::parse(text, "cfg.json");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    INFO(what);
    CHECK(what.find("cfg.json:" + std::to_string(line) + ":") == 0);
    CHECK(what.find(fragment) != std::string::npos);
  }
}

}  // namespace

TEST_CASE("defaults and echo round trip") {
  const RunConfig c = RunConfig::parse(minimal);
  CHECK(c.distance == 2e-6);
  CHECK(c.body2.thickness == std::nullopt);
  CHECK(c.body1.substrate == "silica-model");
  CHECK(c.thermal.T1 == 300.0);
  CHECK(c.truncation.automatic);
  const std::string echo = c.echo();
  CHECK(RunConfig::parse(echo).echo() == echo);
  CHECK(RunConfig::parse(echo).to_json() == c.to_json());
}

TEST_CASE("round trip keeps user materials, sweeps and spectra") {
  const std::string text = R"({
    "materials": {"glass": {"eps_inf": 2.0, "oscillators": [{"strength": 1.0, "resonance": 1e14, "damping": 1e12}]}},
    "geometry": {"period": 2e-6, "distance": 3e-6,
                 "body1": {"depth": 0.5e-6, "thickness": 1e-6, "filling": 0.3, "shift": 0.2e-6, "ridge": "glass"},
                 "body2": {"depth": 0.1e-6, "thickness": "semi-infinite", "ridge": "glass", "groove": "silica-model"}},
    "thermal": {"T1": 200, "T2": 400, "Te": 10},
    "truncation": {"mode": "fixed", "M": 5, "mbar": 2},
    "sweep": {"axis": "Te", "start": 10, "stop": 300, "count": 4},
    "spectrum": {"start": 1e12, "stop": 1e15, "count": 4, "spacing": "log"},
    "output": {"precision": 9}
  })";
  const RunConfig c = RunConfig::parse(text);
  CHECK(c.sweep->values.size() == 4);
  CHECK(c.spectrum[3] == approx(1e15));
  CHECK_FALSE(c.truncation.automatic);
  CHECK(c.geometry(1).ridge.permittivity(1e14).imag() > 0.0);
  const std::string echo = c.echo();
  CHECK(RunConfig::parse(echo).echo() == echo);
}

TEST_CASE("diagnostics carry the line of the offending entry") {
  check_error_line(with("\"distance\": 2e-6", "\"distance\": -2e-6"), 5, "/geometry/distance");
  check_error_line(with("\"ridge\": \"silicon-model\"", "\"ridge\": \"adamantium\""), 7, "adamantium");
  check_error_line(with("\"period\": 1e-6,", "\"period\": 1e-6, \"colour\": 1,"), 4, "colour");
  check_error_line(with("\"depth\": 1e-6, \"thickness\": 9e-6", "\"depth\": 1e-6, \"thickness\": 9e-6, \"filling\": 1.5"),
                   6, "filling");
  check_error_line(with("\"distance\": 2e-6,", "\"distance\": 2e-6"), 6, "");
}

TEST_CASE("sweep axes") {
  const RunConfig c = RunConfig::parse(minimal);
  CHECK(with_axis_value(c, "d", 5e-6).distance == 5e-6);
  const RunConfig tb = with_axis_value(c, "Tb", 123.0);
  CHECK(tb.thermal.T1 == 123.0);
  CHECK(tb.thermal.T2 == 123.0);
  CHECK(tb.thermal.Te == 300.0);
  CHECK(with_axis_value(c, "f", 0.2).body2.filling == 0.2);
  CHECK(with_axis_value(c, "h", 0.3e-6).body1.depth == 0.3e-6);
  CHECK(with_axis_value(c, "D", 2e-6).period == 2e-6);
  CHECK_THROWS_AS(with_axis_value(c, "lambda", 1.0), UsageError);
  CHECK_FALSE(valid_axis("x"));
}
