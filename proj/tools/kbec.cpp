// kbec: run kicked-condensate ratchet scenarios from JSON configs.
//
//   kbec simulate <config> [--out DIR] [--fit-from N]
//   kbec validate <config>
//   kbec preset <figure2|figure4|dephasing> --out DIR
//
// Exit codes: 0 success, 2 config error, 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "kbec/errors.hpp"
#include "kbec/scenario.hpp"

namespace {

constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

namespace sc = kbec::scenario;

void print_summary(const sc::ScenarioConfig& cfg, const sc::RunSummary& s, const std::filesystem::path& out) {
  std::cout << (cfg.name.empty() ? std::string("scenario") : cfg.name) << ": wrote " << out.string() << "\n";
  for (const auto& f : s.fits) {
    std::printf("  phi=%-10s slope=% .12f  residual=%.3g", f.label.c_str(), f.slope, f.residual_rms);
    if (f.analytic_slope) std::printf("  analytic=% .12f", *f.analytic_slope);
    std::printf("\n");
  }
  if (s.max_abs_deviation) std::printf("  max |analytic - numeric| = %.3e\n", *s.max_abs_deviation);
  std::printf("  runtime %.3f s\n", s.runtime_s);
}

int run(sc::ScenarioConfig cfg, const std::optional<std::filesystem::path>& out, std::optional<int> fit_from,
        bool check_deviation) {
  if (fit_from) cfg.numerics.fit_from = *fit_from;
  const auto dir = out.value_or(cfg.output.directory);
  try {
    const auto summary = sc::run_scenario(cfg, dir);
    print_summary(cfg, summary, dir);
    if (check_deviation) {
      if (!summary.max_abs_deviation) {
        std::cerr << "error: preset has no analytically comparable sweep point\n";
        return exit_numerical;
      }
      if (*summary.max_abs_deviation > cfg.numerics.deviation_limit) {
        std::cerr << "error: analytic/numeric deviation " << *summary.max_abs_deviation << " exceeds "
                  << cfg.numerics.deviation_limit << "\n";
        return exit_numerical;
      }
    }
  } catch (const kbec::TruncationError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  } catch (const kbec::ConvergenceError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum-resonance ratchet simulator for a Bragg-prepared kicked condensate"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::filesystem::path> out_dir;
  std::optional<int> fit_from;

  auto* simulate = app.add_subcommand("simulate", "Run a scenario config");
  simulate->add_option("config", config_path, "Scenario JSON file")->required();
  simulate->add_option("--out", out_dir, "Output directory (overrides output.directory)");
  simulate->add_option("--fit-from", fit_from, "First kick used in current fits (e.g. 3 to skip t <= 2)");

  auto* validate = app.add_subcommand("validate", "Check a scenario config without running it");
  validate->add_option("config", config_path, "Scenario JSON file")->required();

  std::string preset_name;
  std::filesystem::path preset_dir = KBEC_PRESET_DIR;
  auto* preset = app.add_subcommand("preset", "Run a shipped preset and check it against the closed form");
  preset->add_option("name", preset_name, "Preset name")
      ->required()
      ->check(CLI::IsMember({"figure2", "figure4", "dephasing"}));
  preset->add_option("--out", out_dir, "Output directory")->required();
  preset->add_option("--fit-from", fit_from, "First kick used in current fits");
  preset->add_option("--preset-dir", preset_dir, "Directory holding preset JSON files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }

  try {
    if (*validate) {
      const auto diagnostics = sc::validate_config(config_path);
      if (diagnostics.empty()) {
        std::cout << config_path << ": ok\n";
        return 0;
      }
      for (const auto& d : diagnostics) std::cerr << config_path << ": " << sc::to_string(d) << "\n";
      return exit_config;
    }
    if (*simulate) return run(sc::load_config(config_path), out_dir, fit_from, false);
    const auto path = preset_dir / (preset_name + ".json");
    return run(sc::load_config(path), out_dir, fit_from, true);
  } catch (const sc::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return exit_config;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
