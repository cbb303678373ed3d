#pragma once

// Closed-form solution at quantum resonance (tau = 4pi, beta = 0) for the
// Bragg-prepared state (|0> - i e^{i phi} |-1>)/sqrt(2) after t kicks of
// strength K:
//
//   psi(m) = (-i)^m / sqrt(2) * (J_m(Kt) - e^{i phi} J_{m+1}(Kt))
//   P(m)   = (J_m^2 + J_{m+1}^2 - 2 cos(phi) J_m J_{m+1}) / 2
//   <p>    = -1/2 - cos(phi) K t / 2
//
// These serve as the oracle for the numerical propagator.

#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Core>

#include "kbec/bessel.hpp"
#include "kbec/errors.hpp"
#include "kbec/ladder_state.hpp"

namespace kbec {

/// Ladder half-width needed to hold a Bessel spread of argument x:
/// ceil(|x|) + margin. Beyond it |J_n(x)| < 1e-15 for margin >= 60.
inline int bessel_truncation_order(double x, int margin = 60) {
  return static_cast<int>(std::ceil(std::abs(x))) + margin;
}

namespace detail {

inline void require_kicks(int t) {
  if (t < 0) throw DomainError("kick count must be >= 0");
}

/// (-i)^m, exact.
template <class Real>
std::complex<Real> minus_i_power(int m) {
  switch (((m % 4) + 4) % 4) {
    case 0: return {Real(1), Real(0)};
    case 1: return {Real(0), Real(-1)};
    case 2: return {Real(-1), Real(0)};
    default: return {Real(0), Real(1)};
  }
}

}  // namespace detail

/// Output amplitude at ladder index m after t resonant kicks.
template <class Real>
std::complex<Real> psi_qr(int m, Real K, int t, Real phi) {
  detail::require_kicks(t);
  const Real x = K * Real(t);
  const BesselTable<Real> j(x, std::max(std::abs(m), std::abs(m + 1)));
  const std::complex<Real> e_phi = std::polar(Real(1), phi);
  return detail::minus_i_power<Real>(m) / std::numbers::sqrt2_v<Real> * (j(m) - e_phi * j(m + 1));
}

/// Momentum probability at ladder index m after t resonant kicks.
template <class Real>
Real p_qr(int m, Real K, int t, Real phi) {
  detail::require_kicks(t);
  const Real x = K * Real(t);
  const BesselTable<Real> j(x, std::max(std::abs(m), std::abs(m + 1)));
  const Real a = j(m);
  const Real b = j(m + 1);
  return Real(0.5) * (a * a + b * b - Real(2) * std::cos(phi) * a * b);
}

/// <p> = -1/2 - cos(phi) K t / 2 in units of 2 hbar k_l.
template <class Real>
Real mean_momentum_qr(Real K, int t, Real phi) {
  detail::require_kicks(t);
  return Real(-0.5) - std::cos(phi) * K * Real(t) / Real(2);
}

/// Resonant ratchet current d<p>/dt = -cos(phi) K / 2 per kick.
template <class Real>
Real current_qr(Real K, Real phi) {
  return -std::cos(phi) * K / Real(2);
}

/// Whole closed-form output state on the ladder [-L, L],
/// L = bessel_truncation_order(K t). Throws TruncationError if the tail
/// outside the ladder carries more than 1e-12 probability.
template <class Real>
LadderState<Real> qr_state(Real K, int t, Real phi, int margin = 60) {
  detail::require_kicks(t);
  const Real x = K * Real(t);
  const int half = bessel_truncation_order(static_cast<double>(x), margin);
  const BesselTable<Real> j(x, half + 1);
  const std::complex<Real> e_phi = std::polar(Real(1), phi);

  using State = LadderState<Real>;
  typename State::Amplitudes amps(2 * half + 1);
  for (int m = -half; m <= half; ++m) {
    amps[m + half] = detail::minus_i_power<Real>(m) / std::numbers::sqrt2_v<Real> * (j(m) - e_phi * j(m + 1));
  }
  State out(-half, half, Real(0), std::move(amps));
  if (std::abs(out.norm_squared() - Real(1)) > Real(1e-12)) {
    throw TruncationError("closed-form ladder misses probability; increase margin");
  }
  return out;
}

/// Closed-form P(m) for m = n_min..n_max, evaluated from the Bessel
/// products directly (not via |psi|^2).
template <class Real>
Eigen::Matrix<Real, Eigen::Dynamic, 1> qr_probabilities(Real K, int t, Real phi, int n_min, int n_max) {
  detail::require_kicks(t);
  const Real x = K * Real(t);
  const BesselTable<Real> j(x, std::max(std::abs(n_min), std::abs(n_max) + 1));
  const Real c = std::cos(phi);
  Eigen::Matrix<Real, Eigen::Dynamic, 1> p(n_max - n_min + 1);
  for (int m = n_min; m <= n_max; ++m) {
    const Real a = j(m);
    const Real b = j(m + 1);
    p[m - n_min] = Real(0.5) * (a * a + b * b - Real(2) * c * a * b);
  }
  return p;
}

}  // namespace kbec
