#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "kbec/errors.hpp"

namespace kbec {

/// Complex amplitudes on the momentum ladder {(n + beta) * 2 hbar k_l},
/// n = n_min..n_max. The ladder always contains n = 0.
template <class Real = double>
class LadderState {
 public:
  using Scalar = Real;
  using Complex = std::complex<Real>;
  using Amplitudes = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

  LadderState(int n_min, int n_max, Real beta, Amplitudes amplitudes)
      : n_min_(n_min), n_max_(n_max), beta_(beta), amplitudes_(std::move(amplitudes)) {
    if (n_min > 0 || n_max < 0) {
      throw std::out_of_range("ladder bounds must satisfy n_min <= 0 <= n_max");
    }
    if (amplitudes_.size() != Eigen::Index(n_max) - n_min + 1) {
      throw std::invalid_argument("amplitude count does not match ladder bounds");
    }
    if (!(beta >= Real(-0.5) && beta < Real(0.5))) {
      throw DomainError("quasimomentum must lie in [-1/2, 1/2)");
    }
  }

  int n_min() const { return n_min_; }
  int n_max() const { return n_max_; }
  Real beta() const { return beta_; }
  Eigen::Index size() const { return amplitudes_.size(); }

  bool contains(int n) const { return n >= n_min_ && n <= n_max_; }

  /// Amplitude at ladder index n; zero outside the stored range.
  Complex operator[](int n) const {
    return contains(n) ? amplitudes_[n - n_min_] : Complex(0);
  }

  Complex& at(int n) {
    if (!contains(n)) throw std::out_of_range("ladder index " + std::to_string(n) + " out of range");
    return amplitudes_[n - n_min_];
  }

  /// Momentum of index n in units of 2 hbar k_l.
  Real momentum(int n) const { return Real(n) + beta_; }

  const Amplitudes& amplitudes() const { return amplitudes_; }
  Amplitudes& amplitudes() { return amplitudes_; }

  Real norm_squared() const { return amplitudes_.squaredNorm(); }

 private:
  int n_min_;
  int n_max_;
  Real beta_;
  Amplitudes amplitudes_;
};

/// Unit amplitude at seed_index, zero elsewhere.
template <class Real = double>
LadderState<Real> new_ladder_state(int n_min, int n_max, Real beta, int seed_index) {
  if (seed_index < n_min || seed_index > n_max) {
    throw std::out_of_range("seed index " + std::to_string(seed_index) + " outside ladder");
  }
  using State = LadderState<Real>;
  typename State::Amplitudes amps = State::Amplitudes::Zero(Eigen::Index(n_max) - n_min + 1);
  amps[seed_index - n_min] = typename State::Complex(1);
  return State(n_min, n_max, beta, std::move(amps));
}

/// Copies `state` onto the wider ladder [n_min, n_max], zero-filling new slots.
template <class Real>
LadderState<Real> resize_ladder(const LadderState<Real>& state, int n_min, int n_max) {
  if (n_min > state.n_min() || n_max < state.n_max()) {
    throw std::out_of_range("resize_ladder only widens");
  }
  using State = LadderState<Real>;
  typename State::Amplitudes amps = State::Amplitudes::Zero(Eigen::Index(n_max) - n_min + 1);
  amps.segment(state.n_min() - n_min, state.size()) = state.amplitudes();
  return State(n_min, n_max, state.beta(), std::move(amps));
}

}  // namespace kbec
