#pragma once

// Physical <-> scaled parameter conversion.
//
// All dynamics run in dimensionless units: momentum in 2*hbar*k_l, angle
// theta = 2*k_l*x, one kick period per step with scaled period
// tau = 4*pi*T/T_T. Physical units only appear here.

#include <cmath>
#include <numbers>
#include <string>

#include "kbec/errors.hpp"

namespace kbec {

/// Scaled period of a kick train at quantum resonance (T = T_T).
template <class Real = double>
inline constexpr Real resonant_period = Real(4) * std::numbers::pi_v<Real>;

/// Recoil frequency of 87Rb on the 780 nm line, rad/s.
inline constexpr double rb87_recoil_freq = 2.37e4;

/// Species/lattice constants. The Talbot time is derived from the recoil
/// frequency and cannot be set on its own.
class PhysicalParams {
 public:
  explicit PhysicalParams(double recoil_freq = rb87_recoil_freq,
                          double lattice_wavenumber = 0.0)
      : recoil_freq_(recoil_freq), lattice_wavenumber_(lattice_wavenumber) {
    if (!(recoil_freq > 0.0) || !std::isfinite(recoil_freq)) {
      throw DomainError("recoil_freq must be positive and finite");
    }
  }

  double recoil_freq() const { return recoil_freq_; }
  double lattice_wavenumber() const { return lattice_wavenumber_; }
  /// T_T = pi / (2 omega_r).
  double talbot_time() const { return std::numbers::pi / (2.0 * recoil_freq_); }

 private:
  double recoil_freq_;
  double lattice_wavenumber_;
};

/// Dimensionless kick strength K, scaled period tau and quasimomentum beta.
template <class Real = double>
class ScaledParams {
 public:
  ScaledParams(Real kick_strength, Real scaled_period, Real quasimomentum = Real(0))
      : kick_strength_(kick_strength), scaled_period_(scaled_period), quasimomentum_(quasimomentum) {
    if (!(kick_strength >= Real(0))) throw DomainError("kick_strength must be >= 0");
    if (!(scaled_period > Real(0))) throw DomainError("scaled_period must be > 0");
    if (!(quasimomentum >= Real(-0.5) && quasimomentum < Real(0.5))) {
      throw DomainError("quasimomentum must lie in [-1/2, 1/2)");
    }
  }

  Real kick_strength() const { return kick_strength_; }
  Real scaled_period() const { return scaled_period_; }
  Real quasimomentum() const { return quasimomentum_; }

 private:
  Real kick_strength_;
  Real scaled_period_;
  Real quasimomentum_;
};

/// Physical timeline: Bragg pulse, free phase evolution, kick train.
struct ExperimentSequence {
  double bragg_duration = 60e-6;  // s
  double bragg_area = std::numbers::pi / 2;  // rad
  double phase_delay = 0.0;  // s
  int kick_count = 0;
  double kick_period = 0.0;  // s
  double pulse_width = 0.0;  // s, 0 means delta kicks
  double kick_strength = 0.0;  // K = V0 * T_p / hbar
};

/// Throws DomainError naming the offending field.
inline void validate(const ExperimentSequence& seq) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw DomainError(what);
  };
  require(seq.bragg_duration >= 0.0, "bragg_duration must be >= 0");
  require(seq.bragg_area >= 0.0 && seq.bragg_area <= 2.0 * std::numbers::pi,
          "bragg_area must lie in [0, 2pi]");
  require(seq.phase_delay >= 0.0, "phase_delay must be >= 0");
  require(seq.kick_count >= 0, "kick_count must be >= 0");
  require(seq.kick_period > 0.0, "kick_period must be > 0");
  require(seq.pulse_width >= 0.0, "pulse_width must be >= 0");
  require(seq.pulse_width < seq.kick_period, "pulse_width must be < kick_period");
  require(seq.kick_strength >= 0.0, "kick_strength must be >= 0");
}

/// tau = 4 pi T / T_T.
inline double scaled_period(double period, const PhysicalParams& params) {
  if (!(period > 0.0)) throw DomainError("period must be > 0");
  return resonant_period<double> * (period / params.talbot_time());
}

/// Inverse of scaled_period.
inline double physical_period(double tau, const PhysicalParams& params) {
  if (!(tau > 0.0)) throw DomainError("scaled period must be > 0");
  return (tau / resonant_period<double>) * params.talbot_time();
}

/// Reduces an angle to [0, 2pi).
inline double wrap_phase(double phi) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(phi, two_pi);
  if (r < 0.0) r += two_pi;
  return r >= two_pi ? 0.0 : r;
}

/// Relative phase phi = 4 omega_r Delta_phi picked up by the -2hbar k_l
/// component during free evolution, reduced to [0, 2pi).
inline double bragg_phase(double delay, const PhysicalParams& params) {
  if (!(delay >= 0.0)) throw DomainError("phase delay must be >= 0");
  // 4 omega_r Delta = 2pi * Delta / T_T; reducing in units of T_T keeps
  // Delta = k * T_T exactly on 0.
  const double cycles = delay / params.talbot_time();
  const double frac = cycles - std::floor(cycles);
  return wrap_phase(2.0 * std::numbers::pi * frac);
}

}  // namespace kbec
