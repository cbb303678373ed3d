#pragma once

// Scenario runner: JSON config in, CSV tables and a JSON summary out.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kbec/units.hpp"

namespace kbec::scenario {

inline constexpr int schema_version = 1;

struct Diagnostic {
  std::string field;  // dotted path, e.g. "sequence.kick_strength"
  std::string message;
  int line = 0;  // 1-based, 0 when unknown
};

std::string to_string(const Diagnostic& d);

/// Invalid configuration; carries every problem found.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

struct BetaSpec {
  enum class Mode { fixed, grid, uniform, gaussian };
  Mode mode = Mode::fixed;
  std::vector<double> values{0.0};  // fixed
  int count = 1;  // grid / uniform / gaussian
  double sigma = 0.0;  // gaussian
  std::uint64_t seed = 0;  // uniform / gaussian

  std::vector<double> samples() const;
};

struct SweepSpec {
  std::vector<double> phi;  // rad
  std::vector<int> kicks;  // snapshot kicks for distributions
  bool include_control = false;  // extra run from |0> with no Bragg pulse
  BetaSpec beta;
};

struct NumericsSpec {
  int margin = 60;
  int substeps = 8;
  double tolerance = 1e-10;
  int fit_from = 1;
  double deviation_limit = 1e-10;
};

struct OutputSpec {
  std::filesystem::path directory = "out";
  bool distributions = true;
};

struct ScenarioConfig {
  std::string name;
  PhysicalParams physical;
  ExperimentSequence sequence;
  SweepSpec sweep;
  NumericsSpec numerics;
  OutputSpec output;
};

/// Parses "0.5pi", "pi", "-pi", "1.25" (radians) or a bare JSON number.
double parse_angle(const std::string& text);

/// Parses and checks a config document. Throws ConfigError.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Empty when the file is a valid config.
std::vector<Diagnostic> validate_config(const std::filesystem::path& path);

struct FitRow {
  std::string label;  // "0.5pi" or "control"
  double phi = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  int points_used = 0;
  std::optional<double> analytic_slope;
};

struct RunSummary {
  std::vector<FitRow> fits;
  std::optional<double> max_abs_deviation;  // analytic vs numeric, when comparable
  double runtime_s = 0.0;
};

/// Runs every sweep point and writes distributions.csv, series.csv,
/// fits.csv and summary.json into out_dir. Throws TruncationError or
/// ConvergenceError on numerical failure.
RunSummary run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir);

/// Label used for phases in the summary: phi / pi formatted as "<x>pi".
std::string phase_label(double phi);

}  // namespace kbec::scenario
