#include <doctest.h>

#include "support.hpp"

#include <filesystem>
#include <sstream>

#include "ote/commands.hpp"
#include "ote/config.hpp"
#include "ote/errors.hpp"
#include "ote/planar.hpp"
#include "ote/smatrix_cache.hpp"

using namespace ote;

namespace {

// Equilibrium silicon gratings: imaginary-axis work only, so these runs take seconds.
RunConfig quick(const std::string& extra = "") {
  return RunConfig::parse(R"({
    "geometry": {"period": 1e-6, "distance": 4e-6,
                 "body1": {"depth": 0.5e-6, "thickness": 2e-6, "ridge": "silicon-model"},
                 "body2": {"depth": 0.5e-6, "ridge": "silicon-model"}},
    "quadrature": {"tolerance": 1e-4},
    "truncation": {"mode": "fixed", "M": 2, "mbar": 1})" + extra + "}");
}

std::vector<std::string> data_rows(const std::string& csv) {
  std::vector<std::string> rows;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#') rows.push_back(line);
  return rows;
}

std::vector<std::string> split(const std::string& row) {
  std::vector<std::string> out;
  std::istringstream in(row);
  for (std::string cell; std::getline(in, cell, ',');) out.push_back(cell);
  return out;
}

}  // namespace

TEST_CASE("preamble carries version, command and the echoed config") {
  const RunConfig c = quick();
  const std::string csv = cmd_pressure(c, {});
  CHECK(csv.rfind(std::string("# ote-casimir ") + OTE_VERSION + "\n# command: pressure\n# config:\n", 0) == 0);
  std::string echoed;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);)
    if (line.rfind("# ", 0) == 0 && line.find("ote-casimir") == std::string::npos &&
        line.find("command:") == std::string::npos && line != "# config:")
      echoed += line.substr(2) + '\n';
  CHECK(RunConfig::parse(echoed).echo() == c.echo());
  const auto rows = data_rows(csv);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "d,total,eq_part,delta_part,error,M,mbar,wall_time");
  const auto cells = split(rows[1]);
  CHECK(cells[3] == "0");  // equal temperatures
  CHECK(std::stod(cells[1]) < 0.0);
  CHECK(cells[5] == "2");
  CHECK(cells[6] == "1");
}

TEST_CASE("vacuum bodies give a zero row") {
  const RunConfig c = RunConfig::parse(R"({"geometry": {"period": 1e-6, "distance": 4e-6,
      "body1": {"depth": 1e-6, "thickness": 9e-6}, "body2": {"depth": 1e-6}},
      "thermal": {"T1": 200, "T2": 400, "Te": 10}})");
  const auto rows = data_rows(cmd_pressure(c, {}));
  CHECK(rows[1] == "4e-06,0,0,0,0,0,0,0");
}

TEST_CASE("the S-matrix cache never changes the output") {
  const RunConfig c = quick();
  const std::string plain = cmd_pressure(c, {});
  SMatrixCache memory;
  CHECK(cmd_pressure(c, {1, &memory}) == plain);
  CHECK(memory.misses() > 0);

  const auto dir = std::filesystem::temp_directory_path() / "ote-cache-test";
  std::filesystem::remove_all(dir);
  {
    SMatrixCache disk(dir);
    CHECK(cmd_pressure(c, {1, &disk}) == plain);
    disk.flush();
  }
  SMatrixCache reloaded(dir);
  CHECK(cmd_pressure(c, {1, &reloaded}) == plain);
  CHECK(reloaded.hits() > 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("sweeps are byte-identical for any worker count") {
  const RunConfig c = quick(R"(, "sweep": {"axis": "d", "values": [3e-6, 4e-6, 5e-6]})");
  const std::string one = cmd_sweep(c, {1, nullptr});
  CHECK(cmd_sweep(c, {2, nullptr}) == one);
  CHECK(cmd_sweep(c, {4, nullptr}) == one);
  const auto rows = data_rows(one);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "d,d,total,eq_part,delta_part,error,M,mbar,pfa,d0,wall_time");
}

TEST_CASE("filling sweep endpoints are the slab results") {
  RunConfig c = quick(R"(, "sweep": {"axis": "f", "values": [0, 1]})");
  c.quadrature.tolerance = 1e-6;
  const auto rows = data_rows(cmd_sweep(c, {}));
  REQUIRE(rows.size() == 3);
  for (int i = 0; i < 2; ++i) {
    const double f = i;
    const RunConfig point = with_axis_value(c, "f", f);
    const GratingPair b = point.bodies();
    const GrooveBranch branch = f == 1.0 ? GrooveBranch::ridge : GrooveBranch::groove;
    const SlabPair pair{planar_body(b.body1, branch), planar_body(b.body2, branch), c.distance};
    const double slab_total = slab_pressure(pair, c.thermal, c.quadrature).total;
    CHECK(std::stod(split(rows[i + 1])[2]) == approx(slab_total).epsilon(1e-6));
  }
}

TEST_CASE("spectrum at equal temperatures is all zeros") {
  const RunConfig c = quick(R"(, "spectrum": {"values": [1e13, 1e14, 1e15]})");
  const auto rows = data_rows(cmd_spectrum(c, {}));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "omega,density,error,M,mbar");
  for (int i = 1; i < 4; ++i) CHECK(split(rows[i])[1] == "0");
}

TEST_CASE("usage errors") {
  RunConfig c = quick();
  CHECK_THROWS_AS(cmd_sweep(c, {}), UsageError);
  c.sweep = SweepConfig{"wavelength", {1.0}};
  CHECK_THROWS_AS(cmd_sweep(c, {}), UsageError);
}

TEST_CASE("sign change bracketing") {
  CHECK(sign_change({1, 2, 3}, {-1.0, -0.5, 0.5}) == approx(2.5));
  CHECK(std::isnan(sign_change({1, 2}, {1.0, 2.0})));
}
