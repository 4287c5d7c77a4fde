#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "ote/commands.hpp"
#include "ote/config.hpp"
#include "ote/errors.hpp"
#include "ote/smatrix_cache.hpp"
#include "ote/validation.hpp"

namespace {

enum ExitCode { ok = 0, failed = 1, usage = 2, numerical = 3 };

struct Flags {
  std::string config;
  std::string out;
  int workers = 1;
  std::string cache;
  double tolerance = 0.0;
  std::string fixed;
  std::vector<int> only;
  bool tamper = false;
};

ote::Truncation parse_truncation(const std::string& text) {
  int M = 0, mbar = 0;
  char comma = 0;
  std::istringstream in(text);
  if (!(in >> M >> comma >> mbar) || comma != ',' || !in.eof() || M < 0 || mbar < 0 || mbar > M)
    throw ote::UsageError("--fixed-truncation expects M,mbar with 0 <= mbar <= M, got '" + text + "'");
  return {M, mbar};
}

ote::RunConfig load_config(const Flags& flags) {
  if (flags.config.empty()) throw ote::UsageError("--config is required");
  ote::RunConfig c = ote::RunConfig::load(flags.config);
  if (flags.tolerance > 0.0) c.quadrature.tolerance = flags.tolerance;
  if (!flags.fixed.empty()) {
    const ote::Truncation t = parse_truncation(flags.fixed);
    c.truncation.automatic = false;
    c.truncation.M = t.M;
    c.truncation.mbar = t.mbar;
  }
  if (!flags.cache.empty()) {
    if (flags.cache == "off")
      c.cache_dir.reset();
    else
      c.cache_dir = flags.cache;
  }
  if (!flags.out.empty()) c.output.path = flags.out;
  return c;
}

void emit(const ote::RunConfig& c, const std::string& text) {
  if (!c.output.path) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream f(*c.output.path, std::ios::binary);
  if (!f) throw ote::Error("cannot write " + *c.output.path);
  f << text;
}

int run_command(const std::string& name, const Flags& flags) {
  using Command = std::string (*)(const ote::RunConfig&, const ote::RunOptions&);
  static const std::map<std::string, Command> table{{"pressure", ote::cmd_pressure},
                                                   {"sweep", ote::cmd_sweep},
                                                   {"spectrum", ote::cmd_spectrum},
                                                   {"pfa", ote::cmd_pfa},
                                                   {"scan-truncation", ote::cmd_scan_truncation}};
  const ote::RunConfig c = load_config(flags);
  std::unique_ptr<ote::SMatrixCache> cache;
  if (c.cache_dir) cache = std::make_unique<ote::SMatrixCache>(std::filesystem::path(*c.cache_dir));
  const std::string csv = table.at(name)(c, {flags.workers, cache.get()});
  if (cache) {
    cache->flush();
    spdlog::info("cache: {} hits, {} misses", cache->hits(), cache->misses());
  }
  emit(c, csv);
  return ok;
}

int run_validate(const Flags& flags) {
  ote::ValidationOptions options;
  options.only = flags.only;
  options.tamper_branch = flags.tamper;
  options.workers = flags.workers;
  std::ostringstream report;
  options.on_result = [&](const ote::CriterionResult& r) {
    const std::string line = ote::format_result(r);
    std::cout << line << std::endl;
    report << line << '\n';
  };
  const auto results = ote::run_acceptance(options);
  int passed = 0;
  for (const auto& r : results) passed += r.pass;
  const std::string summary = fmt::format("{}/{} criteria passed", passed, results.size());
  std::cout << summary << std::endl;
  if (!flags.out.empty()) {
    std::ofstream f(flags.out);
    f << report.str() << summary << '\n';
  }
  return passed == static_cast<int>(results.size()) ? ok : failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Casimir-Lifshitz pressure between two lamellar gratings out of thermal equilibrium"};
  app.set_version_flag("--version", std::string(OTE_VERSION));
  app.require_subcommand(1);
  spdlog::set_level(spdlog::level::warn);
  spdlog::set_pattern("[%l] %v");

  Flags flags;
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log progress to stderr");

  const std::vector<std::pair<std::string, std::string>> commands{
      {"pressure", "Pressure at the configured distance"},
      {"sweep", "Pressure over the configured sweep axis"},
      {"spectrum", "Spectral density of the non-equilibrium part on the configured grid"},
      {"pfa", "Exact pressure against the proximity approximation"},
      {"scan-truncation", "Smallest stable truncation (M, mbar) at the configured distance"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "CSV destination (default: stdout)");
    sub->add_option("--workers", flags.workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--cache", flags.cache, "S-matrix cache directory, or 'off'");
    sub->add_option("--tolerance", flags.tolerance, "Relative quadrature tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--fixed-truncation", flags.fixed, "Fixed truncation M,mbar (skips the scan)");
  }
  CLI::App* validate = app.add_subcommand("validate", "Run the acceptance suite");
  validate->add_option("--only", flags.only, "Criteria to run (default: all)")->delimiter(',')->check(CLI::Range(1, 10));
  validate->add_option("--out", flags.out, "Also write the report here");
  validate->add_option("--workers", flags.workers, "Worker threads")->check(CLI::PositiveNumber);
  validate->add_flag("--tamper-branch", flags.tamper, "Negative control: wrong square-root branch in the grating")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? ok : usage;
  }
  if (verbose) spdlog::set_level(spdlog::level::info);

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (sub->get_name() == "validate") return run_validate(flags);
    return run_command(sub->get_name(), flags);
  } catch (const ote::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return usage;
  } catch (const ote::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return usage;
  } catch (const ote::FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return usage;
  } catch (const ote::ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return usage;
  } catch (const ote::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return numerical;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return failed;
  }
}
