#pragma once

// Initial-state preparation: an ideal Bragg rotation between the 0 and
// -2 hbar k_l ladder sites, then a relative phase phi on the -2 hbar k_l arm.

#include <cmath>
#include <complex>
#include <numbers>

#include "kbec/errors.hpp"
#include "kbec/ladder_state.hpp"

namespace kbec {

/// Two-mode rotation of area Theta and coupling phase chi between ladder
/// sites `upper` and `upper - 1`.
template <class Real = double>
struct BraggPulse {
  Real area = std::numbers::pi_v<Real> / 2;
  Real coupling_phase = Real(0);
  int upper = 0;

  int lower() const { return upper - 1; }
};

/// a0' = cos(T/2) a0 - i e^{i chi} sin(T/2) a1
/// a1' = -i e^{-i chi} sin(T/2) a0 + cos(T/2) a1
/// where a0 is the upper site and a1 the lower one. Throws DomainError if
/// the state has more than 1e-12 probability outside the pair.
template <class Real>
LadderState<Real> apply_bragg(const LadderState<Real>& state, const BraggPulse<Real>& pulse) {
  using Complex = std::complex<Real>;
  if (!(pulse.area >= Real(0) && pulse.area <= Real(2) * std::numbers::pi_v<Real>)) {
    throw DomainError("Bragg pulse area must lie in [0, 2pi]");
  }
  if (!state.contains(pulse.upper) || !state.contains(pulse.lower())) {
    throw std::out_of_range("Bragg pair outside ladder");
  }
  const Complex a0 = state[pulse.upper];
  const Complex a1 = state[pulse.lower()];
  const Real outside = state.norm_squared() - std::norm(a0) - std::norm(a1);
  if (outside > Real(1e-12)) {
    throw DomainError("Bragg pulse requires a state supported on its two target sites");
  }
  const Real c = std::cos(pulse.area / 2);
  const Real s = std::sin(pulse.area / 2);
  const Complex minus_i(0, -1);
  const Complex up = std::polar(Real(1), pulse.coupling_phase);

  LadderState<Real> out = state;
  out.at(pulse.upper) = c * a0 + minus_i * up * s * a1;
  out.at(pulse.lower()) = minus_i * std::conj(up) * s * a0 + c * a1;
  return out;
}

/// Multiplies the amplitude at `site` (default -1) by e^{i phi}. Physical
/// free evolution for the corresponding delay differs only by a global phase.
template <class Real>
LadderState<Real> accumulate_phase(const LadderState<Real>& state, Real phi, int site = -1) {
  LadderState<Real> out = state;
  if (out.contains(site)) out.at(site) *= std::polar(Real(1), phi);
  return out;
}

/// (|0> - i e^{i phi} |-1>) / sqrt(2) on the ladder [n_min, n_max].
template <class Real>
LadderState<Real> prepare_initial_state(Real phi, int n_min = -1, int n_max = 0, Real beta = Real(0)) {
  if (n_min > -1 || n_max < 0) throw std::out_of_range("ladder must contain sites -1 and 0");
  const auto seed = new_ladder_state<Real>(n_min, n_max, beta, 0);
  return accumulate_phase(apply_bragg(seed, BraggPulse<Real>{}), phi);
}

}  // namespace kbec
