#include "ote/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "ote/errors.hpp"

namespace ote {

using nlohmann::ordered_json;

namespace {

// Maps JSON pointers to the 1-based line where the value starts. A small
// tokenizer is enough: the text has already been accepted by the JSON parser.
class LineIndex {
 public:
  explicit LineIndex(std::string_view text) : text_(text) {
    skip();
    value("");
  }
  int line(const std::string& pointer) const {
    auto it = lines_.find(pointer);
    return it == lines_.end() ? 0 : it->second;
  }

 private:
  void skip() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
        pos_ += 2;
        while (pos_ + 1 < text_.size() && !(text_[pos_] == '*' && text_[pos_ + 1] == '/')) {
          if (text_[pos_] == '\n') ++line_;
          ++pos_;
        }
        pos_ += 2;
      } else {
        break;
      }
    }
  }
  std::string string() {
    std::string out;
    ++pos_;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
        out += text_[pos_ + 1];
        pos_ += 2;
      } else {
        out += text_[pos_++];
      }
    }
    ++pos_;
    return out;
  }
  static std::string escape(const std::string& key) {
    std::string out;
    for (char c : key) {
      if (c == '~')
        out += "~0";
      else if (c == '/')
        out += "~1";
      else
        out += c;
    }
    return out;
  }
  void value(const std::string& pointer) {
    lines_[pointer] = line_;
    if (pos_ >= text_.size()) return;
    const char c = text_[pos_];
    if (c == '{') {
      ++pos_;
      skip();
      while (pos_ < text_.size() && text_[pos_] != '}') {
        const std::string key = string();
        skip();
        ++pos_;  // ':'
        skip();
        value(pointer + "/" + escape(key));
        skip();
        if (pos_ < text_.size() && text_[pos_] == ',') ++pos_;
        skip();
      }
      ++pos_;
    } else if (c == '[') {
      ++pos_;
      skip();
      int i = 0;
      while (pos_ < text_.size() && text_[pos_] != ']') {
        value(pointer + "/" + std::to_string(i++));
        skip();
        if (pos_ < text_.size() && text_[pos_] == ',') ++pos_;
        skip();
      }
      ++pos_;
    } else if (c == '"') {
      string();
    } else {
      while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != ',' &&
             text_[pos_] != '}' && text_[pos_] != ']')
        ++pos_;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::map<std::string, int> lines_;
};

class Reader {
 public:
  Reader(const LineIndex& index, std::string_view source) : index_(index), source_(source) {}

  [[noreturn]] void fail(const std::string& pointer, const std::string& what) const {
    const int line = index_.line(pointer);
    const std::string where = pointer.empty() ? std::string("/") : pointer;
    if (line > 0) throw ConfigError(fmt::format("{}:{}: {}: {}", source_, line, where, what));
    throw ConfigError(fmt::format("{}: {}: {}", source_, where, what));
  }

  const ordered_json& object(const ordered_json& parent, const std::string& ptr, const std::string& key,
                             const std::set<std::string>& allowed) const {
    static const ordered_json empty = ordered_json::object();
    if (!parent.contains(key)) return empty;
    const auto& v = parent.at(key);
    const std::string p = ptr + "/" + key;
    if (!v.is_object()) fail(p, "expected an object");
    check_keys(v, p, allowed);
    return v;
  }

  void check_keys(const ordered_json& obj, const std::string& ptr, const std::set<std::string>& allowed) const {
    for (const auto& [k, _] : obj.items())
      if (!allowed.count(k)) fail(ptr + "/" + k, "unknown key");
  }

  double number(const ordered_json& obj, const std::string& ptr, const std::string& key, double fallback) const {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) fail(ptr + "/" + key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(ptr + "/" + key, "expected a finite number");
    return x;
  }

  double required_number(const ordered_json& obj, const std::string& ptr, const std::string& key) const {
    if (!obj.contains(key)) fail(ptr, fmt::format("missing required key \"{}\"", key));
    return number(obj, ptr, key, 0.0);
  }

  int integer(const ordered_json& obj, const std::string& ptr, const std::string& key, int fallback) const {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) fail(ptr + "/" + key, "expected an integer");
    return v.get<int>();
  }

  bool boolean(const ordered_json& obj, const std::string& ptr, const std::string& key, bool fallback) const {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_boolean()) fail(ptr + "/" + key, "expected true or false");
    return v.get<bool>();
  }

  std::string text(const ordered_json& obj, const std::string& ptr, const std::string& key,
                   const std::string& fallback) const {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_string()) fail(ptr + "/" + key, "expected a string");
    return v.get<std::string>();
  }

  std::optional<std::string> optional_text(const ordered_json& obj, const std::string& ptr,
                                           const std::string& key) const {
    if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
    return text(obj, ptr, key, "");
  }

  // Either {"values": [...]} or {"start", "stop", "count", "spacing"}.
  std::vector<double> grid(const ordered_json& obj, const std::string& ptr) const {
    if (obj.contains("values")) {
      const auto& v = obj.at("values");
      if (!v.is_array() || v.empty()) fail(ptr + "/values", "expected a non-empty array of numbers");
      std::vector<double> out;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) fail(fmt::format("{}/values/{}", ptr, i), "expected a number");
        out.push_back(v[i].get<double>());
      }
      return out;
    }
    const double start = required_number(obj, ptr, "start");
    const double stop = required_number(obj, ptr, "stop");
    const int count = integer(obj, ptr, "count", 0);
    if (count < 1) fail(ptr + "/count", "expected a positive integer");
    const std::string spacing = text(obj, ptr, "spacing", "linear");
    if (spacing != "linear" && spacing != "log") fail(ptr + "/spacing", "expected \"linear\" or \"log\"");
    if (spacing == "log" && !(start > 0.0 && stop > 0.0)) fail(ptr, "log spacing needs positive bounds");
    std::vector<double> out;
    for (int i = 0; i < count; ++i) {
      const double t = count == 1 ? 0.0 : double(i) / double(count - 1);
      out.push_back(spacing == "log" ? start * std::pow(stop / start, t) : start + (stop - start) * t);
    }
    return out;
  }

 private:
  const LineIndex& index_;
  std::string source_;
};

BodyConfig read_body(const Reader& r, const ordered_json& obj, const std::string& ptr, bool semi_infinite_default) {
  r.check_keys(obj, ptr, {"depth", "thickness", "filling", "shift", "ridge", "groove", "substrate", "outer"});
  BodyConfig b;
  b.depth = r.number(obj, ptr, "depth", 0.0);
  if (obj.contains("thickness")) {
    const auto& t = obj.at("thickness");
    if (t.is_string() && t.get<std::string>() == "semi-infinite")
      b.thickness = std::nullopt;
    else if (t.is_number())
      b.thickness = t.get<double>();
    else
      r.fail(ptr + "/thickness", "expected a number or \"semi-infinite\"");
  } else if (!semi_infinite_default) {
    b.thickness = 0.0;
  }
  b.filling = r.number(obj, ptr, "filling", 0.5);
  b.shift = r.number(obj, ptr, "shift", 0.0);
  b.ridge = r.text(obj, ptr, "ridge", "vacuum");
  b.groove = r.text(obj, ptr, "groove", "vacuum");
  b.substrate = r.text(obj, ptr, "substrate", b.ridge);
  b.outer = r.text(obj, ptr, "outer", "vacuum");
  return b;
}

ordered_json body_json(const BodyConfig& b) {
  ordered_json j;
  j["depth"] = b.depth;
  if (b.thickness)
    j["thickness"] = *b.thickness;
  else
    j["thickness"] = "semi-infinite";
  j["filling"] = b.filling;
  j["shift"] = b.shift;
  j["ridge"] = b.ridge;
  j["groove"] = b.groove;
  j["substrate"] = b.substrate;
  j["outer"] = b.outer;
  return j;
}

// Canonical form of one material definition; loads tables to catch errors early.
ordered_json read_material(const Reader& r, const ordered_json& def, const std::string& ptr,
                           const std::filesystem::path& base) {
  if (!def.is_object()) r.fail(ptr, "expected an object");
  ordered_json out;
  if (def.contains("builtin")) {
    r.check_keys(def, ptr, {"builtin"});
    const std::string name = r.text(def, ptr, "builtin", "");
    try {
      builtin_material(name);
    } catch (const Error& e) {
      r.fail(ptr + "/builtin", e.what());
    }
    out["builtin"] = name;
  } else if (def.contains("oscillators")) {
    r.check_keys(def, ptr, {"eps_inf", "oscillators"});
    out["eps_inf"] = r.number(def, ptr, "eps_inf", 1.0);
    const auto& osc = def.at("oscillators");
    if (!osc.is_array()) r.fail(ptr + "/oscillators", "expected an array");
    out["oscillators"] = ordered_json::array();
    std::vector<Oscillator> list;
    for (std::size_t i = 0; i < osc.size(); ++i) {
      const std::string p = fmt::format("{}/oscillators/{}", ptr, i);
      if (!osc[i].is_object()) r.fail(p, "expected an object");
      r.check_keys(osc[i], p, {"strength", "resonance", "damping"});
      const Oscillator o{r.required_number(osc[i], p, "strength"), r.required_number(osc[i], p, "resonance"),
                         r.required_number(osc[i], p, "damping")};
      list.push_back(o);
      out["oscillators"].push_back({{"strength", o.strength}, {"resonance", o.resonance}, {"damping", o.damping}});
    }
    try {
      OscillatorModel(out["eps_inf"].get<double>(), list);
    } catch (const Error& e) {
      r.fail(ptr, e.what());
    }
  } else if (def.contains("table")) {
    r.check_keys(def, ptr, {"table", "energy_in_ev", "extrapolate"});
    std::filesystem::path path = r.text(def, ptr, "table", "");
    if (path.is_relative()) path = base / path;
    out["table"] = path.lexically_normal().string();
    out["energy_in_ev"] = r.boolean(def, ptr, "energy_in_ev", false);
    out["extrapolate"] = r.boolean(def, ptr, "extrapolate", false);
    try {
      load_table(path, {out["energy_in_ev"].get<bool>(), out["extrapolate"].get<bool>()});
    } catch (const Error& e) {
      r.fail(ptr + "/table", e.what());
    }
  } else {
    r.fail(ptr, "a material needs one of \"builtin\", \"oscillators\" or \"table\"");
  }
  return out;
}

Material resolve_material(const std::string& name, const ordered_json& def) {
  if (def.contains("builtin")) {
    const Material m = builtin_material(def.at("builtin").get<std::string>());
    return Material(name, m.response());
  }
  if (def.contains("oscillators")) {
    std::vector<Oscillator> list;
    for (const auto& o : def.at("oscillators"))
      list.push_back({o.at("strength").get<double>(), o.at("resonance").get<double>(), o.at("damping").get<double>()});
    return Material(name, OscillatorModel(def.at("eps_inf").get<double>(), std::move(list)));
  }
  return Material(name, load_table(def.at("table").get<std::string>(),
                                   {def.value("energy_in_ev", false), def.value("extrapolate", false)}));
}

RunConfig parse_impl(std::string_view text, std::string_view source, const std::filesystem::path& base) {
  ordered_json root;
  try {
    root = ordered_json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    // byte offset -> line
    const std::size_t at = std::min<std::size_t>(e.byte, text.size());
    const long line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(at > 0 ? at - 1 : 0), '\n');
    std::string what = e.what();
    if (auto p = what.find("parse error"); p != std::string::npos) what = what.substr(p);
    throw ConfigError(fmt::format("{}:{}: {}", source, line, what));
  }
  const LineIndex index(text);
  const Reader r(index, source);
  if (!root.is_object()) r.fail("", "the configuration must be a JSON object");
  r.check_keys(root, "", {"geometry", "materials", "thermal", "quadrature", "truncation", "sweep", "spectrum",
                          "output", "cache"});

  RunConfig c;
  if (root.contains("materials")) {
    const auto& mats = root.at("materials");
    if (!mats.is_object()) r.fail("/materials", "expected an object");
    for (const auto& [name, def] : mats.items()) {
      if (name.empty()) r.fail("/materials", "empty material name");
      c.materials[name] = read_material(r, def, "/materials/" + name, base);
    }
  }

  if (!root.contains("geometry")) r.fail("", "missing required section \"geometry\"");
  const auto& geo = r.object(root, "", "geometry", {"period", "distance", "body1", "body2"});
  c.period = r.required_number(geo, "/geometry", "period");
  c.distance = r.required_number(geo, "/geometry", "distance");
  for (const char* key : {"body1", "body2"})
    if (!geo.contains(key) || !geo.at(key).is_object())
      r.fail("/geometry", fmt::format("missing required object \"{}\"", key));
  c.body1 = read_body(r, geo.at("body1"), "/geometry/body1", false);
  c.body2 = read_body(r, geo.at("body2"), "/geometry/body2", true);

  const auto& th = r.object(root, "", "thermal", {"T1", "T2", "Te"});
  c.thermal.T1 = r.number(th, "/thermal", "T1", 300.0);
  c.thermal.T2 = r.number(th, "/thermal", "T2", c.thermal.T1);
  c.thermal.Te = r.number(th, "/thermal", "Te", c.thermal.T1);

  const auto& q = r.object(root, "", "quadrature",
                           {"tolerance", "inner_factor", "omega_min", "omega_max", "population_floor",
                            "panels_per_decade", "ky_decay", "max_panels", "max_matsubara_terms"});
  QuadratureSpec& s = c.quadrature;
  s.tolerance = r.number(q, "/quadrature", "tolerance", s.tolerance);
  s.inner_factor = r.number(q, "/quadrature", "inner_factor", s.inner_factor);
  s.omega_min = r.number(q, "/quadrature", "omega_min", s.omega_min);
  s.omega_max = r.number(q, "/quadrature", "omega_max", s.omega_max);
  s.population_floor = r.number(q, "/quadrature", "population_floor", s.population_floor);
  s.omega_panels_per_decade = r.number(q, "/quadrature", "panels_per_decade", s.omega_panels_per_decade);
  s.ky_decay = r.number(q, "/quadrature", "ky_decay", s.ky_decay);
  s.max_panels = r.integer(q, "/quadrature", "max_panels", s.max_panels);
  s.max_matsubara_terms = r.integer(q, "/quadrature", "max_matsubara_terms", s.max_matsubara_terms);

  const auto& t = r.object(root, "", "truncation", {"mode", "M", "mbar", "accuracy", "cap"});
  const std::string mode = r.text(t, "/truncation", "mode", "auto");
  if (mode != "auto" && mode != "fixed") r.fail("/truncation/mode", "expected \"auto\" or \"fixed\"");
  c.truncation.automatic = mode == "auto";
  c.truncation.M = r.integer(t, "/truncation", "M", 0);
  c.truncation.mbar = r.integer(t, "/truncation", "mbar", c.truncation.M);
  c.truncation.accuracy = r.number(t, "/truncation", "accuracy", c.truncation.accuracy);
  c.truncation.cap = r.integer(t, "/truncation", "cap", c.truncation.cap);
  if (!c.truncation.automatic && !(c.truncation.M >= 0 && c.truncation.mbar >= 0 && c.truncation.mbar <= c.truncation.M))
    r.fail("/truncation", "fixed truncation needs 0 <= mbar <= M");
  if (!(c.truncation.accuracy > 0.0) || c.truncation.cap < 1) r.fail("/truncation", "invalid scan settings");

  if (root.contains("sweep")) {
    const auto& sw = r.object(root, "", "sweep", {"axis", "values", "start", "stop", "count", "spacing"});
    SweepConfig sc;
    sc.axis = r.text(sw, "/sweep", "axis", "");
    if (!valid_axis(sc.axis)) r.fail("/sweep/axis", fmt::format("unknown sweep axis \"{}\"", sc.axis));
    sc.values = r.grid(sw, "/sweep");
    c.sweep = sc;
  }
  if (root.contains("spectrum")) {
    const auto& sp = r.object(root, "", "spectrum", {"values", "start", "stop", "count", "spacing"});
    c.spectrum = r.grid(sp, "/spectrum");
    for (std::size_t i = 0; i < c.spectrum.size(); ++i)
      if (!(c.spectrum[i] > 0.0)) r.fail("/spectrum", "frequencies must be positive");
  }
  const auto& out = r.object(root, "", "output", {"path", "precision", "timing"});
  c.output.path = r.optional_text(out, "/output", "path");
  c.output.precision = r.integer(out, "/output", "precision", 12);
  if (c.output.precision < 1 || c.output.precision > 17) r.fail("/output/precision", "expected 1..17");
  c.output.timing = r.boolean(out, "/output", "timing", false);
  const auto& cache = r.object(root, "", "cache", {"dir"});
  c.cache_dir = r.optional_text(cache, "/cache", "dir");

  // semantic checks, reported against the closest section
  try {
    c.quadrature.validate();
  } catch (const Error& e) {
    r.fail("/quadrature", e.what());
  }
  try {
    c.thermal.validate();
  } catch (const Error& e) {
    r.fail("/thermal", e.what());
  }
  if (!(c.distance > 0.0)) r.fail("/geometry/distance", "distance must be positive");
  for (int b : {1, 2}) {
    const BodyConfig& body = b == 1 ? c.body1 : c.body2;
    for (const std::string* name : {&body.ridge, &body.groove, &body.substrate, &body.outer})
      if (!c.materials.count(*name)) {
        try {
          builtin_material(*name);
        } catch (const Error&) {
          r.fail(fmt::format("/geometry/body{}", b), fmt::format("unknown material \"{}\"", *name));
        }
      }
    try {
      c.geometry(b).validate();
    } catch (const Error& e) {
      r.fail(fmt::format("/geometry/body{}", b), e.what());
    }
  }
  return c;
}

}  // namespace

bool valid_axis(const std::string& axis) {
  static const std::set<std::string> axes{"d", "T1", "T2", "Te", "Tb", "f", "D", "h"};
  return axes.count(axis) > 0;
}

RunConfig with_axis_value(const RunConfig& base, const std::string& axis, double value) {
  RunConfig c = base;
  if (axis == "d")
    c.distance = value;
  else if (axis == "T1")
    c.thermal.T1 = value;
  else if (axis == "T2")
    c.thermal.T2 = value;
  else if (axis == "Te")
    c.thermal.Te = value;
  else if (axis == "Tb")
    c.thermal.T1 = c.thermal.T2 = value;
  else if (axis == "f")
    c.body1.filling = c.body2.filling = value;
  else if (axis == "D")
    c.period = value;
  else if (axis == "h")
    c.body1.depth = c.body2.depth = value;
  else
    throw UsageError(fmt::format("unknown sweep axis \"{}\" (expected d, T1, T2, Te, Tb, f, D or h)", axis));
  return c;
}

RunConfig RunConfig::parse(std::string_view text, std::string_view source) {
  return parse_impl(text, source, std::filesystem::current_path());
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open configuration file {}", path));
  std::stringstream ss;
  ss << in.rdbuf();
  const auto base = std::filesystem::absolute(path).parent_path();
  return parse_impl(ss.str(), path, base);
}

ordered_json RunConfig::to_json() const {
  ordered_json j;
  j["geometry"] = {{"period", period}, {"distance", distance}, {"body1", body_json(body1)}, {"body2", body_json(body2)}};
  j["materials"] = ordered_json::object();
  for (const auto& [name, def] : materials) j["materials"][name] = def;
  j["thermal"] = {{"T1", thermal.T1}, {"T2", thermal.T2}, {"Te", thermal.Te}};
  j["quadrature"] = {{"tolerance", quadrature.tolerance},
                     {"inner_factor", quadrature.inner_factor},
                     {"omega_min", quadrature.omega_min},
                     {"omega_max", quadrature.omega_max},
                     {"population_floor", quadrature.population_floor},
                     {"panels_per_decade", quadrature.omega_panels_per_decade},
                     {"ky_decay", quadrature.ky_decay},
                     {"max_panels", quadrature.max_panels},
                     {"max_matsubara_terms", quadrature.max_matsubara_terms}};
  j["truncation"] = {{"mode", truncation.automatic ? "auto" : "fixed"},
                     {"M", truncation.M},
                     {"mbar", truncation.mbar},
                     {"accuracy", truncation.accuracy},
                     {"cap", truncation.cap}};
  if (sweep) j["sweep"] = {{"axis", sweep->axis}, {"values", sweep->values}};
  if (!spectrum.empty()) j["spectrum"] = {{"values", spectrum}};
  j["output"] = {{"path", output.path ? ordered_json(*output.path) : ordered_json(nullptr)},
                 {"precision", output.precision},
                 {"timing", output.timing}};
  j["cache"] = {{"dir", cache_dir ? ordered_json(*cache_dir) : ordered_json(nullptr)}};
  return j;
}

std::string RunConfig::echo() const { return to_json().dump(2); }

Material RunConfig::material(const std::string& name) const {
  if (auto it = materials.find(name); it != materials.end()) return resolve_material(name, it->second);
  return builtin_material(name);
}

GratingGeometry RunConfig::geometry(int body) const {
  if (body != 1 && body != 2) throw ContractViolation("body index must be 1 or 2");
  const BodyConfig& b = body == 1 ? body1 : body2;
  GratingGeometry g;
  g.period = period;
  g.depth = b.depth;
  g.thickness = b.thickness;
  g.filling = b.filling;
  g.shift = b.shift;
  g.cover = Material::vacuum();
  g.ridge = material(b.ridge);
  g.groove = material(b.groove);
  g.substrate = material(b.substrate);
  g.outer = material(b.outer);
  return g;
}

GratingPair RunConfig::bodies() const { return {geometry(1), geometry(2)}; }

}  // namespace ote
