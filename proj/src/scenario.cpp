#include "kbec/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>

#include <json.hpp>

#include "kbec/analytic.hpp"
#include "kbec/observables.hpp"
#include "kbec/prep.hpp"
#include "kbec/propagator.hpp"

namespace kbec::scenario {

namespace {

using State = LadderState<double>;

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomically(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

struct Member {
  std::string label;
  std::string csv_phi;
  double phi = 0.0;
  bool control = false;
};

/// Closed-form amplitudes for the member after t resonant kicks.
State closed_form(const Member& m, double K, int t, int margin) {
  if (!m.control) return qr_state(K, t, m.phi, margin);
  const double x = K * t;
  const int half = bessel_truncation_order(x, margin);
  const BesselTable<double> j(x, half);
  State::Amplitudes amps(2 * half + 1);
  for (int n = -half; n <= half; ++n) amps[n + half] = detail::minus_i_power<double>(n) * j(n);
  return State(-half, half, 0.0, std::move(amps));
}

double max_deviation(const State& numeric, const State& exact) {
  const int lo = std::min(numeric.n_min(), exact.n_min());
  const int hi = std::max(numeric.n_max(), exact.n_max());
  double worst = 0.0;
  for (int n = lo; n <= hi; ++n) {
    const auto a = numeric[n];
    const auto b = exact[n];
    worst = std::max({worst, std::abs(a - b), std::abs(std::norm(a) - std::norm(b))});
  }
  return worst;
}

}  // namespace

std::vector<double> BetaSpec::samples() const {
  switch (mode) {
    case Mode::fixed: return values;
    case Mode::grid: return beta_grid<double>(count);
    case Mode::uniform: return beta_uniform<double>(count, seed);
    case Mode::gaussian: return beta_gaussian<double>(count, sigma, seed);
  }
  return values;
}

std::string phase_label(double phi) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10gpi", phi / std::numbers::pi);
  return buf;
}

RunSummary run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir) {
  const auto started = std::chrono::steady_clock::now();
  const auto& seq = config.sequence;
  const auto& num = config.numerics;
  const double K = seq.kick_strength;
  const int total = seq.kick_count;
  const double tau = scaled_period(seq.kick_period, config.physical);
  const double width = seq.pulse_width > 0.0 ? scaled_period(seq.pulse_width, config.physical) : 0.0;
  const std::vector<double> betas = config.sweep.beta.samples();
  const std::set<int> snapshots(config.sweep.kicks.begin(), config.sweep.kicks.end());

  const bool resonant = tau == resonant_period<double> && width == 0.0;
  const bool ideal_bragg = std::abs(seq.bragg_area - std::numbers::pi / 2) <= 1e-15;

  std::vector<Member> members;
  for (double phi : config.sweep.phi) members.push_back({phase_label(phi), format_number(phi), phi, false});
  if (config.sweep.include_control) members.push_back({"control", "control", 0.0, true});

  std::string distributions = "phi,kick,n,beta,probability\n";
  std::string series_csv = "phi,kick,mean_p\n";
  std::string fits_csv = "phi,label,slope,intercept,residual_rms,points_used,analytic_slope\n";

  RunSummary summary;
  double deviation = 0.0;
  bool compared = false;

  for (const Member& member : members) {
    const bool comparable_member = resonant && (member.control || ideal_bragg);
    std::vector<double> member_series(static_cast<std::size_t>(betas.size()) * (total + 1));

    for (std::size_t j = 0; j < betas.size(); ++j) {
      const double beta = betas[j];
      State start = new_ladder_state<double>(-1, 0, beta, 0);
      if (!member.control) start = accumulate_phase(apply_bragg(start, BraggPulse<double>{seq.bragg_area, 0.0, 0}), member.phi);
      start = widen_if_needed(start, K, total, num.margin);
      const bool exact_available = comparable_member && beta == 0.0;

      auto visit = [&](int t, const State& s) {
        const auto dist = distribution_of(s);
        const double p = mean_momentum(dist);
        member_series[static_cast<std::size_t>(t) * betas.size() + j] = p;
        if (exact_available) {
          const double law = member.control ? 0.0 : mean_momentum_qr(K, t, member.phi);
          deviation = std::max(deviation, std::abs(p - law));
          compared = true;
        }
        if (!snapshots.count(t)) return;
        if (exact_available) deviation = std::max(deviation, max_deviation(s, closed_form(member, K, t, num.margin)));
        if (config.output.distributions) {
          const std::string prefix = member.csv_phi + "," + std::to_string(t) + ",";
          const std::string beta_text = "," + format_number(beta) + ",";
          for (int n = dist.n_min; n <= dist.n_max(); ++n) {
            distributions += prefix + std::to_string(n) + beta_text + format_number(dist[n]) + "\n";
          }
        }
      };

      if (width == 0.0) {
        for_each_kick(start, K, tau, total, visit);
      } else {
        const auto profile = PulseProfile<double>::rectangular(width, num.substeps);
        State s = start;
        visit(0, s);
        int m = num.substeps;
        for (int t = 1; t <= total; ++t) {
          auto step_profile = profile;
          step_profile.substeps = std::max(num.substeps, m / 2);
          auto r = evolve_finite_pulse(s, K, tau, step_profile, 1, num.tolerance);
          m = r.substeps;
          s = std::move(r.state);
          visit(t, s);
        }
      }
    }

    std::vector<double> averaged(static_cast<std::size_t>(total) + 1);
    for (int t = 0; t <= total; ++t) {
      const auto row = std::span<const double>(member_series).subspan(static_cast<std::size_t>(t) * betas.size(), betas.size());
      averaged[static_cast<std::size_t>(t)] = pairwise_sum(row) / static_cast<double>(betas.size());
      series_csv += member.csv_phi + "," + std::to_string(t) + "," + format_number(averaged[static_cast<std::size_t>(t)]) + "\n";
    }

    const auto fit = fit_current(std::span<const double>(averaged), num.fit_from);
    FitRow row{member.label, member.phi, fit.slope, fit.intercept, fit.residual_rms, fit.points_used, std::nullopt};
    if (comparable_member) row.analytic_slope = member.control ? 0.0 : current_qr(K, member.phi);
    fits_csv += member.csv_phi + "," + row.label + "," + format_number(row.slope) + "," + format_number(row.intercept) +
                "," + format_number(row.residual_rms) + "," + std::to_string(row.points_used) + "," +
                (row.analytic_slope ? format_number(*row.analytic_slope) : std::string{}) + "\n";
    summary.fits.push_back(std::move(row));
  }
  if (compared) summary.max_abs_deviation = deviation;

  std::filesystem::create_directories(out_dir);
  if (config.output.distributions) write_atomically(out_dir / "distributions.csv", distributions);
  write_atomically(out_dir / "series.csv", series_csv);
  write_atomically(out_dir / "fits.csv", fits_csv);

  summary.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  nlohmann::ordered_json doc;
  doc["schema_version"] = schema_version;
  doc["name"] = config.name;
  doc["kick_strength"] = K;
  doc["scaled_period"] = tau;
  doc["kick_count"] = total;
  doc["quasimomentum_samples"] = betas.size();
  nlohmann::ordered_json slopes = nlohmann::ordered_json::object();
  nlohmann::ordered_json fits = nlohmann::ordered_json::array();
  for (const auto& f : summary.fits) {
    slopes[f.label] = f.slope;
    nlohmann::ordered_json item;
    item["phi"] = f.label;
    item["slope"] = f.slope;
    item["intercept"] = f.intercept;
    item["residual_rms"] = f.residual_rms;
    item["points_used"] = f.points_used;
    item["analytic_slope"] = f.analytic_slope ? nlohmann::ordered_json(*f.analytic_slope) : nullptr;
    fits.push_back(std::move(item));
  }
  doc["slopes"] = std::move(slopes);
  doc["fits"] = std::move(fits);
  doc["analytic_comparable"] = summary.max_abs_deviation.has_value();
  doc["max_abs_deviation"] = summary.max_abs_deviation ? nlohmann::ordered_json(*summary.max_abs_deviation) : nullptr;
  doc["runtime_s"] = summary.runtime_s;
  write_atomically(out_dir / "summary.json", doc.dump(2) + "\n");
  return summary;
}

}  // namespace kbec::scenario
