#pragma once

// Momentum distributions, moments, current fits and quasimomentum ensembles.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "kbec/errors.hpp"
#include "kbec/ladder_state.hpp"
#include "kbec/prep.hpp"
#include "kbec/propagator.hpp"

namespace kbec {

/// P(n) = |psi_n|^2 on a ladder with quasimomentum beta.
template <class Real = double>
struct MomentumDistribution {
  Real beta = Real(0);
  int n_min = 0;
  Eigen::Matrix<Real, Eigen::Dynamic, 1> probabilities;

  int n_max() const { return n_min + static_cast<int>(probabilities.size()) - 1; }
  Real operator[](int n) const {
    return (n < n_min || n > n_max()) ? Real(0) : probabilities[n - n_min];
  }
};

/// Straight line <p>(t) = intercept + slope * t.
template <class Real = double>
struct CurrentFit {
  Real slope = 0;  // 2 hbar k_l per kick
  Real intercept = 0;
  Real residual_rms = 0;
  int points_used = 0;
};

/// Sum by recursive halving; the result depends only on the order of
/// `values`, not on how the caller produced them.
template <class Real>
Real pairwise_sum(std::span<const Real> values) {
  if (values.size() <= 8) {
    Real s = 0;
    for (Real v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

template <class Real>
MomentumDistribution<Real> distribution_of(const LadderState<Real>& state) {
  return {state.beta(), state.n_min(), state.amplitudes().cwiseAbs2()};
}

/// Momenta n + beta for every slot of the distribution.
template <class Real>
Eigen::Matrix<Real, Eigen::Dynamic, 1> ladder_momenta(const MomentumDistribution<Real>& dist) {
  using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
  return Vec::LinSpaced(dist.probabilities.size(), Real(dist.n_min), Real(dist.n_max())).array() + dist.beta;
}

/// <p> = sum (n + beta) P(n), in units of 2 hbar k_l.
template <class Real>
Real mean_momentum(const MomentumDistribution<Real>& dist) {
  return ladder_momenta(dist).dot(dist.probabilities);
}

/// <p^2>/2 in scaled units.
template <class Real>
Real kinetic_energy(const MomentumDistribution<Real>& dist) {
  return ladder_momenta(dist).array().square().matrix().dot(dist.probabilities) / Real(2);
}

/// Ordinary least squares through (kick, <p>) pairs. Needs two distinct kicks.
template <class Real>
CurrentFit<Real> fit_current(std::span<const std::pair<int, Real>> series) {
  const auto count = static_cast<Real>(series.size());
  if (series.size() < 2) throw FitError("current fit needs at least two points");
  Real t_mean = 0;
  Real p_mean = 0;
  for (const auto& [t, p] : series) {
    t_mean += Real(t);
    p_mean += p;
  }
  t_mean /= count;
  p_mean /= count;
  Real stt = 0;
  Real stp = 0;
  for (const auto& [t, p] : series) {
    stt += (Real(t) - t_mean) * (Real(t) - t_mean);
    stp += (Real(t) - t_mean) * (p - p_mean);
  }
  if (stt == Real(0)) throw FitError("current fit needs at least two distinct kick numbers");

  CurrentFit<Real> fit;
  fit.slope = stp / stt;
  fit.intercept = p_mean - fit.slope * t_mean;
  Real ss = 0;
  for (const auto& [t, p] : series) {
    const Real r = p - (fit.intercept + fit.slope * Real(t));
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / count);
  fit.points_used = static_cast<int>(series.size());
  return fit;
}

template <class Real>
CurrentFit<Real> fit_current(const std::vector<std::pair<int, Real>>& series) {
  return fit_current(std::span<const std::pair<int, Real>>(series));
}

/// Fits <p>(t) for t = first..series.size()-1 where series[t] is <p> after t kicks.
template <class Real>
CurrentFit<Real> fit_current(std::span<const Real> series, int first = 1) {
  std::vector<std::pair<int, Real>> points;
  for (int t = std::max(first, 0); t < static_cast<int>(series.size()); ++t) {
    points.emplace_back(t, series[static_cast<std::size_t>(t)]);
  }
  return fit_current(std::span<const std::pair<int, Real>>(points));
}

/// <p> after t = 0..kicks periods starting from `state`. The ladder must
/// already be wide enough (see widen_if_needed).
template <class Real>
std::vector<Real> mean_momentum_series(const LadderState<Real>& state, Real K, Real tau, int kicks) {
  std::vector<Real> out;
  out.reserve(static_cast<std::size_t>(std::max(kicks, 0)) + 1);
  for_each_kick(state, K, tau, kicks,
                [&](int, const LadderState<Real>& s) { out.push_back(mean_momentum(distribution_of(s))); });
  return out;
}

// Quasimomentum samples ------------------------------------------------------

/// Folds beta into [-1/2, 1/2).
template <class Real>
Real wrap_quasimomentum(Real beta) {
  Real b = beta - std::floor(beta + Real(0.5));
  return b >= Real(0.5) ? b - Real(1) : b;
}

/// Midpoint grid beta_j = -1/2 + (j + 1/2)/count. Odd counts include 0.
template <class Real = double>
std::vector<Real> beta_grid(int count) {
  if (count < 1) throw DomainError("beta grid needs at least one point");
  std::vector<Real> out(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    out[static_cast<std::size_t>(j)] = Real(-0.5) + (Real(j) + Real(0.5)) / Real(count);
  }
  return out;
}

template <class Real = double>
std::vector<Real> beta_uniform(int count, std::uint64_t seed) {
  if (count < 1) throw DomainError("beta sample count must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<Real> dist(Real(-0.5), Real(0.5));
  std::vector<Real> out(static_cast<std::size_t>(count));
  for (Real& b : out) b = wrap_quasimomentum(dist(rng));
  return out;
}

/// Normal(0, sigma) draws folded into [-1/2, 1/2).
template <class Real = double>
std::vector<Real> beta_gaussian(int count, Real sigma, std::uint64_t seed) {
  if (count < 1) throw DomainError("beta sample count must be >= 1");
  if (!(sigma > Real(0))) throw DomainError("beta sigma must be > 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<Real> dist(Real(0), sigma);
  std::vector<Real> out(static_cast<std::size_t>(count));
  for (Real& b : out) b = wrap_quasimomentum(dist(rng));
  return out;
}

/// Ensemble-averaged <p>(t), t = 0..kicks, over independent quasimomentum
/// ladders. Each member starts from the Bragg-prepared state with phase phi
/// and its <p> includes its own beta. Members are averaged with pairwise
/// summation in sample order.
template <class Real>
std::vector<Real> ensemble_current(Real K, Real tau, Real phi, int kicks, std::span<const Real> beta_samples,
                                   int margin = 60) {
  if (beta_samples.empty()) throw DomainError("ensemble needs at least one quasimomentum sample");
  if (kicks < 0) throw DomainError("kick count must be >= 0");
  for (Real b : beta_samples) {
    if (!(b >= Real(-0.5) && b < Real(0.5))) throw DomainError("quasimomentum sample outside [-1/2, 1/2)");
  }
  const std::size_t members = beta_samples.size();
  const std::size_t steps = static_cast<std::size_t>(kicks) + 1;
  // member-major: series[t * members + j]
  std::vector<Real> series(steps * members);
  for (std::size_t j = 0; j < members; ++j) {
    const auto start = widen_if_needed(prepare_initial_state<Real>(phi, -1, 0, beta_samples[j]), K, kicks, margin);
    const auto p = mean_momentum_series(start, K, tau, kicks);
    for (std::size_t t = 0; t < steps; ++t) series[t * members + j] = p[t];
  }
  std::vector<Real> mean(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    mean[t] = pairwise_sum(std::span<const Real>(series).subspan(t * members, members)) / Real(members);
  }
  return mean;
}

template <class Real>
std::vector<Real> ensemble_current(Real K, Real tau, Real phi, int kicks, const std::vector<Real>& beta_samples,
                                   int margin = 60) {
  return ensemble_current(K, tau, phi, kicks, std::span<const Real>(beta_samples), margin);
}

}  // namespace kbec
