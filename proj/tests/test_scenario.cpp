#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "kbec/errors.hpp"
#include "kbec/scenario.hpp"

using namespace kbec::scenario;
namespace fs = std::filesystem;
constexpr double pi = std::numbers::pi;

namespace {

const fs::path presets = KBEC_PRESET_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("kbec_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string minimal(const std::string& sequence_extra, const std::string& sweep = R"("phi": ["pi"])") {
  return R"({"schema_version": 1, "sequence": {"kick_count": 5, "kick_period": "talbot", "kick_strength": 0.6)" +
         sequence_extra + R"(}, "sweep": {)" + sweep + "}}";
}

bool mentions(const ConfigError& e, const std::string& field) {
  for (const auto& d : e.diagnostics()) {
    if (d.field == field) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("parse_angle") {
  CHECK(parse_angle("0") == 0.0);
  CHECK(parse_angle("pi") == pi);
  CHECK(parse_angle("-pi") == -pi);
  CHECK(parse_angle("0.5pi") == pi / 2);
  CHECK(parse_angle(" 0.25 pi ") == pi / 4);
  CHECK(parse_angle("1.5*pi") == 1.5 * pi);
  CHECK(parse_angle("1.25") == 1.25);
  CHECK_THROWS(parse_angle("half pi"));
  CHECK_THROWS(parse_angle(""));
  CHECK(phase_label(pi / 2) == "0.5pi");
  CHECK(phase_label(pi) == "1pi");
  CHECK(phase_label(0.0) == "0pi");
}

TEST_CASE("shipped presets validate") {
  for (const char* name : {"figure2", "figure4", "dephasing"}) {
    CHECK_MESSAGE(validate_config(presets / (std::string(name) + ".json")).empty(), name);
  }
  const auto cfg = load_config(presets / "figure2.json");
  CHECK(cfg.sequence.kick_strength == 0.6);
  CHECK(cfg.sequence.kick_count == 100);
  CHECK(scaled_period(cfg.sequence.kick_period, cfg.physical) == 4 * pi);
  CHECK(cfg.sweep.phi == std::vector<double>{pi / 2, pi});
  CHECK(cfg.sweep.kicks == std::vector<int>{5, 100});
}

TEST_CASE("config diagnostics") {
  SUBCASE("negative kick strength names the field") {
    try {
      parse_config(minimal("").replace(minimal("").find("0.6"), 3, "-0.6"));
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(mentions(e, "sequence.kick_strength"));
    }
  }
  SUBCASE("pulse at least as long as the period") {
    try {
      parse_config(minimal(R"(, "pulse_width": "talbot")"));
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(mentions(e, "sequence.pulse_width"));
      CHECK(std::string(e.what()).find("pulse_width must be < kick_period") != std::string::npos);
    }
  }
  SUBCASE("empty sweep lists") {
    CHECK_THROWS_AS(parse_config(minimal("", R"("phi": [])")), ConfigError);
    CHECK_THROWS_AS(parse_config(minimal("", R"("phi": [0], "kicks": [])")), ConfigError);
    CHECK_THROWS_AS(parse_config(minimal("", R"("phi": [0], "beta": [])")), ConfigError);
  }
  SUBCASE("unknown keys, bad types, wrong version") {
    try {
      parse_config(R"({"schema_version": 2, "sequence": {"kick_count": "5", "kick_period": "talbot",
                      "kick_strength": 0.6, "kick_strenght": 1}, "sweep": {"phi": ["half"]}})");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(mentions(e, "schema_version"));
      CHECK(mentions(e, "sequence.kick_count"));
      CHECK(mentions(e, "sequence.kick_strenght"));
      CHECK(mentions(e, "sweep.phi[0]"));
    }
  }
  SUBCASE("syntax errors report the line") {
    try {
      parse_config("{\n  \"schema_version\": 1,\n  \"sequence\": {,\n}");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      REQUIRE(e.diagnostics().size() == 1);
      CHECK(e.diagnostics()[0].line == 3);
    }
  }
  SUBCASE("snapshot kicks beyond the run") {
    CHECK_THROWS_AS(parse_config(minimal("", R"("phi": [0], "kicks": [6])")), ConfigError);
  }
  SUBCASE("beta ensembles") {
    const auto cfg = parse_config(minimal("", R"("phi": [0], "beta": {"mode": "gaussian", "count": 5, "sigma": 0.01, "seed": 3})"));
    CHECK(cfg.sweep.beta.samples().size() == 5);
    CHECK_THROWS_AS(parse_config(minimal("", R"("phi": [0], "beta": 0.5)")), ConfigError);
    CHECK_THROWS_AS(parse_config(minimal("", R"("phi": [0], "beta": {"mode": "gaussian", "count": 5})")), ConfigError);
  }
  SUBCASE("phase from the delay when no phi list") {
    const auto cfg = parse_config(R"({"schema_version": 1, "sequence": {"kick_count": 5, "kick_period": "talbot",
                                     "kick_strength": 0.6, "phase_delay": "0.5talbot"}})");
    REQUIRE(cfg.sweep.phi.size() == 1);
    CHECK(cfg.sweep.phi[0] == doctest::Approx(pi).epsilon(1e-15));
  }
}

TEST_CASE("figure2 preset reproduces the closed form") {
  const auto dir = scratch("figure2");
  const auto summary = run_scenario(load_config(presets / "figure2.json"), dir);
  REQUIRE(summary.max_abs_deviation.has_value());
  CHECK(*summary.max_abs_deviation < 1e-10);
  REQUIRE(summary.fits.size() == 2);
  CHECK(std::abs(summary.fits[0].slope) < 1e-10);
  CHECK(std::abs(summary.fits[1].slope - 0.3) < 1e-10);

  const auto header = slurp(dir / "distributions.csv").substr(0, 28);
  CHECK(header == "phi,kick,n,beta,probability\n");
  CHECK(slurp(dir / "series.csv").rfind("phi,kick,mean_p\n", 0) == 0);
  const auto doc = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(doc.contains("slopes"));
  CHECK(doc.contains("max_abs_deviation"));
  CHECK(doc.contains("runtime_s"));
  CHECK(doc["slopes"]["1pi"].get<double>() == doctest::Approx(0.3).epsilon(1e-10));
  CHECK_FALSE(fs::exists(dir / "summary.json.tmp"));
}

TEST_CASE("figure4 preset: slope table {-K/2, 0, +K/2, 0}") {
  const auto dir = scratch("figure4");
  const auto summary = run_scenario(load_config(presets / "figure4.json"), dir);
  REQUIRE(summary.fits.size() == 4);
  const double expected[] = {-0.3, 0.0, 0.3, 0.0};
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(summary.fits[i].slope - expected[i]) < 1e-10);
  CHECK(summary.fits[3].label == "control");
  CHECK(*summary.max_abs_deviation < 1e-10);
  // control sits at <p> = 0, Bragg-prepared runs start at -1/2
  const auto series = slurp(dir / "series.csv");
  CHECK(series.find("control,0,0\n") != std::string::npos);
  const auto row = series.find("1.5707963267948966,3,");
  REQUIRE(row != std::string::npos);
  CHECK(std::stod(series.substr(row + 21)) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("runs are byte-for-byte deterministic") {
  auto cfg = load_config(presets / "figure4.json");
  cfg.sweep.beta.mode = BetaSpec::Mode::gaussian;
  cfg.sweep.beta.count = 9;
  cfg.sweep.beta.sigma = 0.05;
  cfg.sweep.beta.seed = 42;
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  run_scenario(cfg, a);
  run_scenario(cfg, b);
  for (const char* f : {"distributions.csv", "series.csv", "fits.csv"}) CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("finite pulses and detuning run without an analytic reference") {
  auto cfg = parse_config(minimal(R"(, "pulse_width": 5e-6)", R"("phi": ["pi"], "kicks": [5])"));
  const auto summary = run_scenario(cfg, scratch("finite"));
  CHECK_FALSE(summary.max_abs_deviation.has_value());
  REQUIRE(summary.fits.size() == 1);
  CHECK(summary.fits[0].slope > 0.2);
  CHECK(summary.fits[0].slope < 0.3);
}

TEST_CASE("truncation failures surface as TruncationError") {
  auto cfg = load_config(presets / "figure2.json");
  cfg.numerics.margin = 1;
  CHECK_THROWS_AS(run_scenario(cfg, scratch("narrow")), kbec::TruncationError);
}
