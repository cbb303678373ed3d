#pragma once

// Integer-order Bessel functions of the first kind by Miller's downward
// recurrence, normalized with J_0(x) + 2 sum_{k>=1} J_{2k}(x) = 1.
// One recurrence yields the whole table J_0..J_N, which is how the kick
// kernels and the closed-form ladder amplitudes consume it.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <vector>

namespace kbec {

namespace detail {

/// Order at which the downward recurrence starts for argument x >= 0 when
/// orders up to max_order are wanted. Always even.
inline int miller_start_order(double x, int max_order) {
  const double extra = std::max(30.0, 10.0 * std::cbrt(x));
  int start = std::max(max_order, static_cast<int>(std::ceil(x))) + static_cast<int>(std::ceil(extra));
  return start + (start & 1);
}

}  // namespace detail

/// J_0(x)..J_max_order(x) for x >= 0.
template <class Real>
std::vector<Real> bessel_j_sequence(Real x, int max_order) {
  std::vector<Real> out(static_cast<std::size_t>(max_order) + 1, Real(0));
  if (x == Real(0)) {
    out[0] = Real(1);
    return out;
  }
  const int start = detail::miller_start_order(static_cast<double>(x), max_order);

  // Rescale threshold well inside the range of Real.
  const Real big = std::sqrt(std::numeric_limits<Real>::max()) * Real(1e-10);
  const Real inv_big = Real(1) / big;

  Real upper = Real(0);     // f_{k+1}
  Real current = Real(1e-30);  // f_k
  Real norm = Real(0);
  for (int k = start; k >= 1; --k) {
    const Real lower = Real(2 * k) / x * current - upper;  // f_{k-1}
    upper = current;
    current = lower;
    const int order = k - 1;
    if (order <= max_order) out[static_cast<std::size_t>(order)] = current;
    if (order > 0 && order % 2 == 0) norm += Real(2) * current;
    if (std::abs(current) > big) {
      current *= inv_big;
      upper *= inv_big;
      norm *= inv_big;
      for (int j = order; j <= max_order; ++j) out[static_cast<std::size_t>(j)] *= inv_big;
    }
  }
  norm += current;  // f_0
  for (Real& v : out) v /= norm;
  return out;
}

/// Table of J_n(x) for |n| <= max_order at a fixed argument. Negative orders
/// and negative arguments use the reflection J_{-n}(x) = J_n(-x) = (-1)^n J_n(x).
template <class Real = double>
class BesselTable {
 public:
  BesselTable(Real x, int max_order)
      : argument_(x), max_order_(max_order), values_(bessel_j_sequence(std::abs(x), max_order)) {
    if (x < Real(0)) {
      for (std::size_t n = 1; n < values_.size(); n += 2) values_[n] = -values_[n];
    }
  }

  Real argument() const { return argument_; }
  int max_order() const { return max_order_; }

  /// J_n(x); zero for |n| > max_order.
  Real operator()(int n) const {
    const int m = std::abs(n);
    if (m > max_order_) return Real(0);
    const Real v = values_[static_cast<std::size_t>(m)];
    return (n < 0 && (m & 1)) ? -v : v;
  }

  /// Non-negative orders 0..max_order.
  const std::vector<Real>& values() const { return values_; }

 private:
  Real argument_;
  int max_order_;
  std::vector<Real> values_;
};

/// J_n(x) for integer n and real x.
template <class Real>
Real bessel_j(int n, Real x) {
  return BesselTable<Real>(x, std::abs(n))(n);
}

}  // namespace kbec
