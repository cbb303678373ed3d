#include <algorithm>
#include <cctype>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "kbec/scenario.hpp"

namespace kbec::scenario {

using nlohmann::json;

std::string to_string(const Diagnostic& d) {
  std::string out;
  if (d.line > 0) out += "line " + std::to_string(d.line) + ": ";
  if (!d.field.empty()) out += d.field + ": ";
  return out + d.message;
}

namespace {

std::string join_diagnostics(const std::vector<Diagnostic>& diagnostics) {
  std::string out = "invalid scenario config";
  for (const auto& d : diagnostics) out += "\n  " + to_string(d);
  return out;
}

std::string trim(std::string s) {
  auto blank = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), blank));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), blank).base(), s.end());
  return s;
}

/// Parses a full-string decimal number; nullopt on trailing garbage.
std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

/// "<x><unit>", "<unit>", "-<unit>" -> x; plain numbers -> nullopt.
std::optional<double> parse_multiple(std::string text, const std::string& unit) {
  text = trim(std::move(text));
  if (text.size() < unit.size() || text.compare(text.size() - unit.size(), unit.size(), unit) != 0) {
    return std::nullopt;
  }
  std::string coeff = trim(text.substr(0, text.size() - unit.size()));
  if (!coeff.empty() && coeff.back() == '*') coeff = trim(coeff.substr(0, coeff.size() - 1));
  if (coeff.empty() || coeff == "+") return 1.0;
  if (coeff == "-") return -1.0;
  return parse_number(coeff);
}

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

/// Walks the document, recording every problem instead of stopping at the first.
class Reader {
 public:
  std::vector<Diagnostic> diagnostics;

  void fail(const std::string& field, const std::string& message) { diagnostics.push_back({field, message, 0}); }

  const json* object(const json& parent, const std::string& key, const std::string& path, bool required) {
    if (!parent.contains(key)) {
      if (required) fail(path, "missing required section");
      return nullptr;
    }
    const json& v = parent.at(key);
    if (!v.is_object()) {
      fail(path, "must be an object");
      return nullptr;
    }
    return &v;
  }

  void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> known) {
    const std::set<std::string> allowed(known.begin(), known.end());
    for (const auto& item : obj.items()) {
      if (!allowed.count(item.key())) fail(join(path, item.key()), "unknown key");
    }
  }

  std::optional<double> number(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_number()) {
      fail(join(path, key), "must be a number");
      return std::nullopt;
    }
    return v.get<double>();
  }

  std::optional<long long> integer(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
      fail(join(path, key), "must be an integer");
      return std::nullopt;
    }
    return v.get<long long>();
  }

  std::optional<bool> boolean(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_boolean()) {
      fail(join(path, key), "must be true or false");
      return std::nullopt;
    }
    return v.get<bool>();
  }

  /// Number (rad) or string like "0.5pi".
  std::optional<double> angle(const json& v, const std::string& field) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      try {
        return parse_angle(v.get<std::string>());
      } catch (const std::exception&) {
      }
    }
    fail(field, "must be an angle in radians or a multiple of pi such as \"0.5pi\"");
    return std::nullopt;
  }

  /// Number (s) or a multiple of the Talbot time such as "talbot" or "0.25talbot".
  std::optional<double> duration(const json& obj, const std::string& key, const std::string& path,
                                 const PhysicalParams& physical) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      if (auto m = parse_multiple(v.get<std::string>(), "talbot")) return *m * physical.talbot_time();
    }
    fail(join(path, key), "must be seconds or a multiple of the Talbot time such as \"talbot\"");
    return std::nullopt;
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
};

void read_beta(Reader& r, const json& v, BetaSpec& beta) {
  const std::string path = "sweep.beta";
  if (v.is_number()) {
    beta.mode = BetaSpec::Mode::fixed;
    beta.values = {v.get<double>()};
  } else if (v.is_array()) {
    beta.mode = BetaSpec::Mode::fixed;
    beta.values.clear();
    for (const auto& b : v) {
      if (!b.is_number()) {
        r.fail(path, "entries must be numbers");
        return;
      }
      beta.values.push_back(b.get<double>());
    }
    if (beta.values.empty()) r.fail(path, "sweep list must not be empty");
  } else if (v.is_object()) {
    r.reject_unknown(v, path, {"mode", "count", "sigma", "seed"});
    const std::string mode = v.value("mode", std::string{});
    if (mode == "grid") {
      beta.mode = BetaSpec::Mode::grid;
    } else if (mode == "uniform") {
      beta.mode = BetaSpec::Mode::uniform;
    } else if (mode == "gaussian") {
      beta.mode = BetaSpec::Mode::gaussian;
    } else {
      r.fail(path + ".mode", "must be \"grid\", \"uniform\" or \"gaussian\"");
      return;
    }
    if (auto c = r.integer(v, "count", path)) beta.count = static_cast<int>(*c);
    else r.fail(path + ".count", "missing required field");
    if (beta.count < 1) r.fail(path + ".count", "must be >= 1");
    if (beta.mode == BetaSpec::Mode::gaussian) {
      if (auto s = r.number(v, "sigma", path)) beta.sigma = *s;
      if (!(beta.sigma > 0.0)) r.fail(path + ".sigma", "must be > 0");
    }
    if (auto s = r.integer(v, "seed", path)) {
      if (*s < 0) r.fail(path + ".seed", "must be >= 0");
      beta.seed = static_cast<std::uint64_t>(*s);
    }
  } else {
    r.fail(path, "must be a number, a list of numbers or an ensemble object");
  }
  if (beta.mode == BetaSpec::Mode::fixed) {
    for (double b : beta.values) {
      if (!(b >= -0.5 && b < 0.5)) r.fail(path, "quasimomentum must lie in [-1/2, 1/2)");
    }
  }
}

ScenarioConfig read_config(Reader& r, const json& doc) {
  ScenarioConfig cfg;
  if (!doc.is_object()) {
    r.fail("", "top level must be an object");
    return cfg;
  }
  r.reject_unknown(doc, "", {"schema_version", "name", "physical", "sequence", "sweep", "numerics", "output"});

  if (auto v = r.integer(doc, "schema_version", "")) {
    if (*v != schema_version) r.fail("schema_version", "unsupported version " + std::to_string(*v));
  } else if (!doc.contains("schema_version")) {
    r.fail("schema_version", "missing required field");
  }
  if (doc.contains("name")) {
    if (doc.at("name").is_string()) cfg.name = doc.at("name").get<std::string>();
    else r.fail("name", "must be a string");
  }

  if (const json* p = r.object(doc, "physical", "physical", false)) {
    r.reject_unknown(*p, "physical", {"recoil_freq", "lattice_wavenumber"});
    const double wr = r.number(*p, "recoil_freq", "physical").value_or(rb87_recoil_freq);
    const double kl = r.number(*p, "lattice_wavenumber", "physical").value_or(0.0);
    if (!(wr > 0.0)) r.fail("physical.recoil_freq", "must be > 0");
    else cfg.physical = PhysicalParams(wr, kl);
  }

  auto& seq = cfg.sequence;
  if (const json* s = r.object(doc, "sequence", "sequence", true)) {
    const std::string path = "sequence";
    r.reject_unknown(*s, path, {"bragg_duration", "bragg_area", "phase_delay", "kick_count", "kick_period",
                                "pulse_width", "kick_strength"});
    seq.bragg_duration = r.duration(*s, "bragg_duration", path, cfg.physical).value_or(seq.bragg_duration);
    if (s->contains("bragg_area")) {
      seq.bragg_area = r.angle(s->at("bragg_area"), "sequence.bragg_area").value_or(seq.bragg_area);
    }
    seq.phase_delay = r.duration(*s, "phase_delay", path, cfg.physical).value_or(0.0);
    if (auto k = r.integer(*s, "kick_count", path)) seq.kick_count = static_cast<int>(*k);
    else if (!s->contains("kick_count")) r.fail("sequence.kick_count", "missing required field");
    if (auto t = r.duration(*s, "kick_period", path, cfg.physical)) seq.kick_period = *t;
    else if (!s->contains("kick_period")) r.fail("sequence.kick_period", "missing required field");
    seq.pulse_width = r.duration(*s, "pulse_width", path, cfg.physical).value_or(0.0);
    if (auto k = r.number(*s, "kick_strength", path)) seq.kick_strength = *k;
    else if (!s->contains("kick_strength")) r.fail("sequence.kick_strength", "missing required field");

    if (seq.bragg_duration < 0.0) r.fail("sequence.bragg_duration", "must be >= 0");
    if (!(seq.bragg_area >= 0.0 && seq.bragg_area <= 2.0 * std::numbers::pi)) {
      r.fail("sequence.bragg_area", "must lie in [0, 2pi]");
    }
    if (seq.phase_delay < 0.0) r.fail("sequence.phase_delay", "must be >= 0");
    if (seq.kick_count < 0) r.fail("sequence.kick_count", "must be >= 0");
    if (s->contains("kick_period") && !(seq.kick_period > 0.0)) r.fail("sequence.kick_period", "must be > 0");
    if (seq.pulse_width < 0.0) r.fail("sequence.pulse_width", "must be >= 0");
    if (seq.kick_period > 0.0 && !(seq.pulse_width < seq.kick_period)) {
      r.fail("sequence.pulse_width", "pulse_width must be < kick_period");
    }
    if (!(seq.kick_strength >= 0.0)) r.fail("sequence.kick_strength", "must be >= 0");
  }

  auto& sweep = cfg.sweep;
  const json empty = json::object();
  const json* sw = r.object(doc, "sweep", "sweep", false);
  const json& sweep_obj = sw ? *sw : empty;
  r.reject_unknown(sweep_obj, "sweep", {"phi", "kicks", "include_control", "beta"});
  if (sweep_obj.contains("phi")) {
    const json& list = sweep_obj.at("phi");
    if (!list.is_array()) {
      r.fail("sweep.phi", "must be a list");
    } else {
      if (list.empty()) r.fail("sweep.phi", "sweep list must not be empty");
      for (std::size_t i = 0; i < list.size(); ++i) {
        if (auto a = r.angle(list[i], "sweep.phi[" + std::to_string(i) + "]")) sweep.phi.push_back(*a);
      }
    }
  } else {
    sweep.phi = {bragg_phase(std::max(seq.phase_delay, 0.0), cfg.physical)};
  }
  if (sweep_obj.contains("kicks")) {
    const json& list = sweep_obj.at("kicks");
    if (!list.is_array()) {
      r.fail("sweep.kicks", "must be a list");
    } else {
      if (list.empty()) r.fail("sweep.kicks", "sweep list must not be empty");
      for (const auto& k : list) {
        if (!k.is_number_integer()) {
          r.fail("sweep.kicks", "entries must be integers");
          continue;
        }
        const int t = k.get<int>();
        if (t < 0 || t > seq.kick_count) r.fail("sweep.kicks", "entries must lie in [0, sequence.kick_count]");
        sweep.kicks.push_back(t);
      }
    }
  } else {
    sweep.kicks = {seq.kick_count};
  }
  sweep.include_control = r.boolean(sweep_obj, "include_control", "sweep").value_or(false);
  if (sweep_obj.contains("beta")) read_beta(r, sweep_obj.at("beta"), sweep.beta);

  auto& num = cfg.numerics;
  if (const json* n = r.object(doc, "numerics", "numerics", false)) {
    r.reject_unknown(*n, "numerics", {"margin", "substeps", "tolerance", "fit_from", "deviation_limit"});
    num.margin = static_cast<int>(r.integer(*n, "margin", "numerics").value_or(num.margin));
    num.substeps = static_cast<int>(r.integer(*n, "substeps", "numerics").value_or(num.substeps));
    num.tolerance = r.number(*n, "tolerance", "numerics").value_or(num.tolerance);
    num.fit_from = static_cast<int>(r.integer(*n, "fit_from", "numerics").value_or(num.fit_from));
    num.deviation_limit = r.number(*n, "deviation_limit", "numerics").value_or(num.deviation_limit);
    if (num.margin < 1) r.fail("numerics.margin", "must be >= 1");
    if (num.substeps < 1) r.fail("numerics.substeps", "must be >= 1");
    if (!(num.tolerance > 0.0)) r.fail("numerics.tolerance", "tolerances must be > 0");
    if (!(num.deviation_limit > 0.0)) r.fail("numerics.deviation_limit", "tolerances must be > 0");
    if (num.fit_from < 0) r.fail("numerics.fit_from", "must be >= 0");
  }
  if (seq.kick_count - std::max(num.fit_from, 0) + 1 < 2) {
    r.fail("sequence.kick_count", "current fit needs at least two kicks from numerics.fit_from");
  }

  if (const json* o = r.object(doc, "output", "output", false)) {
    r.reject_unknown(*o, "output", {"directory", "distributions"});
    if (o->contains("directory")) {
      if (o->at("directory").is_string()) cfg.output.directory = o->at("directory").get<std::string>();
      else r.fail("output.directory", "must be a string");
    }
    cfg.output.distributions = r.boolean(*o, "distributions", "output").value_or(true);
  }
  return cfg;
}

}  // namespace

ConfigError::ConfigError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(join_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics)) {}

double parse_angle(const std::string& text) {
  if (auto m = parse_multiple(text, "pi")) return *m * std::numbers::pi;
  if (auto v = parse_number(trim(text))) return *v;
  throw std::invalid_argument("not an angle: '" + text + "'");
}

ScenarioConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({{"", e.what(), line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1)}});
  }
  Reader r;
  ScenarioConfig cfg = read_config(r, doc);
  if (!r.diagnostics.empty()) throw ConfigError(std::move(r.diagnostics));
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({{"", "cannot open " + path.string(), 0}});
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::vector<Diagnostic> validate_config(const std::filesystem::path& path) {
  try {
    load_config(path);
  } catch (const ConfigError& e) {
    return e.diagnostics();
  }
  return {};
}

}  // namespace kbec::scenario
