#pragma once

// Time evolution of ladder states under the kicked-rotor Hamiltonian
//
//   H = p^2/2 + K cos(theta) sum_t delta(t' - t tau),
//
// with momentum p = n + beta in units of 2 hbar k_l and theta = 2 k_l x.
// One period is a kick followed by free evolution for tau. The kick matrix
// element is <n| exp(-i K cos theta) |n'> = (-i)^{n-n'} J_{n-n'}(K), the
// Jacobi-Anger expansion, applied as a banded convolution on the ladder.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "kbec/analytic.hpp"
#include "kbec/bessel.hpp"
#include "kbec/errors.hpp"
#include "kbec/ladder_state.hpp"

namespace kbec {

/// Leaked amplitude, relative to the largest amplitude kept, above which a
/// kick refuses to truncate the ladder.
inline constexpr double default_leak_tolerance = 1e-12;

/// Convolution kernel c_k = (-i)^k J_k(K), |k| <= bandwidth.
template <class Real = double>
class KickKernel {
 public:
  using Complex = std::complex<Real>;

  explicit KickKernel(Real K, int margin = 60) : strength_(K) {
    const int order = bessel_truncation_order(static_cast<double>(K), margin);
    const BesselTable<Real> j(K, order);
    // Drop the far tail that cannot affect a unit-norm state.
    int band = order;
    while (band > 0 && std::abs(j(band)) < Real(1e-20)) --band;
    bandwidth_ = band;
    coefficients_.resize(static_cast<std::size_t>(2 * band + 1));
    for (int k = -band; k <= band; ++k) {
      coefficients_[static_cast<std::size_t>(k + band)] = detail::minus_i_power<Real>(k) * j(k);
    }
  }

  Real strength() const { return strength_; }
  int bandwidth() const { return bandwidth_; }

  /// (-i)^k J_k(K); zero outside the band.
  Complex coefficient(int k) const {
    if (k < -bandwidth_ || k > bandwidth_) return Complex(0);
    return coefficients_[static_cast<std::size_t>(k + bandwidth_)];
  }

  /// psi'_n = sum_k c_k psi_{n-k}. Throws TruncationError when amplitude
  /// pushed past the ladder ends exceeds leak_tolerance times the largest
  /// amplitude kept.
  LadderState<Real> apply(const LadderState<Real>& state, Real leak_tolerance = Real(default_leak_tolerance)) const {
    const int lo = state.n_min();
    const int hi = state.n_max();
    const auto& in = state.amplitudes();
    typename LadderState<Real>::Amplitudes out(in.size());
    Real leaked = 0;
    for (int n = lo - bandwidth_; n <= hi + bandwidth_; ++n) {
      const int k_min = std::max(-bandwidth_, n - hi);
      const int k_max = std::min(bandwidth_, n - lo);
      Complex acc(0);
      for (int k = k_min; k <= k_max; ++k) {
        acc += coefficients_[static_cast<std::size_t>(k + bandwidth_)] * in[n - k - lo];
      }
      if (n < lo || n > hi) {
        leaked += std::norm(acc);
      } else {
        out[n - lo] = acc;
      }
    }
    if (leaked > Real(0)) {
      const Real kept_max = out.cwiseAbs().maxCoeff();
      if (std::sqrt(leaked) > leak_tolerance * kept_max) {
        throw TruncationError("kick of strength " + std::to_string(static_cast<double>(strength_)) +
                              " pushes amplitude past ladder [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "]; widen the ladder (widen_if_needed)");
      }
    }
    return LadderState<Real>(lo, hi, state.beta(), std::move(out));
  }

 private:
  Real strength_;
  int bandwidth_ = 0;
  std::vector<Complex> coefficients_;
};

/// Single kick exp(-i K cos theta).
template <class Real>
LadderState<Real> apply_kick(const LadderState<Real>& state, Real K) {
  if (K == Real(0)) return state;
  return KickKernel<Real>(K).apply(state);
}

/// exp(-i tau (n + beta)^2 / 2) for every ladder slot of `state`.
/// Phases are reduced in cycles before exponentiation so that resonant
/// periods give exactly unit factors.
template <class Real>
typename LadderState<Real>::Amplitudes free_phases(int n_min, int n_max, Real beta, Real tau) {
  auto wrap = [](Real c) { return c - std::round(c); };
  const Real rate = tau / (Real(4) * std::numbers::pi_v<Real>);  // cycles per unit (n+beta)^2
  typename LadderState<Real>::Amplitudes phases(n_max - n_min + 1);
  for (int n = n_min; n <= n_max; ++n) {
    const Real nn = Real(n);
    const Real cycles = wrap(rate * nn * nn) + wrap(Real(2) * rate * nn * beta) + wrap(rate * beta * beta);
    phases[n - n_min] = std::polar(Real(1), -Real(2) * std::numbers::pi_v<Real> * cycles);
  }
  return phases;
}

/// Free evolution for scaled time tau.
template <class Real>
LadderState<Real> free_evolve(const LadderState<Real>& state, Real tau) {
  const auto phases = free_phases(state.n_min(), state.n_max(), state.beta(), tau);
  return LadderState<Real>(state.n_min(), state.n_max(), state.beta(),
                           phases.cwiseProduct(state.amplitudes()));
}

/// Evolves `kicks` periods and calls visit(t, state) for t = 0..kicks.
template <class Real, class Visitor>
LadderState<Real> for_each_kick(LadderState<Real> state, Real K, Real tau, int kicks, Visitor&& visit) {
  if (kicks < 0) throw DomainError("kick count must be >= 0");
  visit(0, static_cast<const LadderState<Real>&>(state));
  if (kicks == 0) return state;
  const KickKernel<Real> kernel(K);
  const auto phases = free_phases(state.n_min(), state.n_max(), state.beta(), tau);
  for (int t = 1; t <= kicks; ++t) {
    state = kernel.apply(state);
    state.amplitudes() = phases.cwiseProduct(state.amplitudes());
    visit(t, static_cast<const LadderState<Real>&>(state));
  }
  return state;
}

/// `kicks` periods of kick + free evolution.
template <class Real>
LadderState<Real> evolve_kicked(const LadderState<Real>& state, Real K, Real tau, int kicks) {
  return for_each_kick(state, K, tau, kicks, [](int, const LadderState<Real>&) {});
}

/// Widens the ladder to cover ceil(K kicks) + margin sites beyond the
/// occupied support (|psi_n| > 1e-15 max|psi|). Never shrinks.
template <class Real>
LadderState<Real> widen_if_needed(const LadderState<Real>& state, Real K, int kicks, int margin = 60) {
  if (K == Real(0) || kicks <= 0) return state;
  const auto& a = state.amplitudes();
  const Real floor = Real(1e-15) * a.cwiseAbs().maxCoeff();
  int first = state.n_max();
  int last = state.n_min();
  for (int n = state.n_min(); n <= state.n_max(); ++n) {
    if (std::abs(a[n - state.n_min()]) > floor) {
      first = std::min(first, n);
      last = std::max(last, n);
    }
  }
  if (first > last) return state;  // empty
  const int reach = bessel_truncation_order(static_cast<double>(std::abs(K)) * kicks, margin);
  const int lo = std::min(state.n_min(), first - reach);
  const int hi = std::max(state.n_max(), last + reach);
  if (lo == state.n_min() && hi == state.n_max()) return state;
  return resize_ladder(state, lo, hi);
}

/// Shape of a single kick in time.
template <class Real = double>
struct PulseProfile {
  enum class Shape { delta, rectangular };

  Shape shape = Shape::delta;
  Real scaled_width = Real(0);  // tau_p, 0 for delta
  int substeps = 1;  // initial Strang substep count M

  static PulseProfile delta() { return {}; }
  static PulseProfile rectangular(Real width, int substeps = 8) {
    return {Shape::rectangular, width, substeps};
  }
};

template <class Real = double>
struct FinitePulseResult {
  LadderState<Real> state;
  int substeps;  // M actually used
  Real last_change;  // max amplitude change between M/2 and M
};

namespace detail {

/// One run at fixed substep count M: per period, M Strang steps of
/// H = p^2/2 + (K/tau_p) cos theta over tau_p, then free evolution tau - tau_p.
template <class Real>
LadderState<Real> finite_pulse_run(LadderState<Real> state, Real K, Real tau, Real width, int substeps, int kicks) {
  const Real dt = width / Real(substeps);
  const KickKernel<Real> kernel(K / Real(substeps));
  const int lo = state.n_min();
  const int hi = state.n_max();
  const Real beta = state.beta();
  const auto half = free_phases(lo, hi, beta, dt / Real(2));
  const auto full = free_phases(lo, hi, beta, dt);
  const auto tail = free_phases(lo, hi, beta, dt / Real(2) + (tau - width));
  for (int t = 0; t < kicks; ++t) {
    state.amplitudes() = half.cwiseProduct(state.amplitudes());
    for (int s = 0; s < substeps; ++s) {
      state = kernel.apply(state);
      const auto& phase = (s + 1 < substeps) ? full : tail;
      state.amplitudes() = phase.cwiseProduct(state.amplitudes());
    }
  }
  return state;
}

}  // namespace detail

/// Finite-width kicks. Rectangular pulses of scaled width tau_p carry the
/// same area K, so the result tends to evolve_kicked as tau_p -> 0. The
/// substep count starts at profile.substeps and doubles until no amplitude
/// changes by more than `tolerance`; ConvergenceError past max_substeps.
template <class Real>
FinitePulseResult<Real> evolve_finite_pulse(const LadderState<Real>& state, Real K, Real tau,
                                            const PulseProfile<Real>& profile, int kicks,
                                            Real tolerance = Real(1e-10), int max_substeps = 1 << 20) {
  using Shape = typename PulseProfile<Real>::Shape;
  if (kicks < 0) throw DomainError("kick count must be >= 0");
  if (profile.shape == Shape::delta || profile.scaled_width == Real(0)) {
    if (profile.scaled_width != Real(0)) throw DomainError("delta pulse must have zero width");
    return {evolve_kicked(state, K, tau, kicks), 0, Real(0)};
  }
  if (!(profile.scaled_width > Real(0) && profile.scaled_width < tau)) {
    throw DomainError("rectangular pulse width must lie in (0, tau)");
  }
  if (profile.substeps < 1) throw DomainError("substeps must be >= 1");
  if (kicks == 0) return {state, profile.substeps, Real(0)};

  int m = profile.substeps;
  auto previous = detail::finite_pulse_run(state, K, tau, profile.scaled_width, m, kicks);
  while (2 * m <= max_substeps) {
    m *= 2;
    auto next = detail::finite_pulse_run(state, K, tau, profile.scaled_width, m, kicks);
    const Real change = (next.amplitudes() - previous.amplitudes()).cwiseAbs().maxCoeff();
    if (change <= tolerance) return {std::move(next), m, change};
    previous = std::move(next);
  }
  throw ConvergenceError("finite-pulse integration did not reach tolerance with " +
                         std::to_string(m) + " substeps");
}

}  // namespace kbec
