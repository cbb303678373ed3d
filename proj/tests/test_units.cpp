#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kbec/ladder_state.hpp"
#include "kbec/units.hpp"

using namespace kbec;
constexpr double pi = std::numbers::pi;

TEST_CASE("Talbot time is derived from the recoil frequency") {
  const PhysicalParams rb;
  CHECK(rb.recoil_freq() == 2.37e4);
  CHECK(rb.talbot_time() == pi / (2.0 * 2.37e4));
  // ~66.3 us for 87Rb
  CHECK(rb.talbot_time() == doctest::Approx(66.3e-6).epsilon(1e-3));
  CHECK_THROWS_AS(PhysicalParams(0.0), DomainError);
  CHECK_THROWS_AS(PhysicalParams(-1.0), DomainError);
}

TEST_CASE("scaled_period") {
  const PhysicalParams rb;
  const double tt = rb.talbot_time();

  SUBCASE("kicking at the Talbot time is exactly resonant") { CHECK(scaled_period(tt, rb) == 4.0 * pi); }
  SUBCASE("half the Talbot time") { CHECK(scaled_period(tt / 2, rb) == doctest::Approx(2.0 * pi).epsilon(1e-15)); }
  SUBCASE("physical 33.15 us") {
    // tau = 4 pi T / (pi / 2 w_r) = 8 T w_r
    const double oracle = 8.0 * 33.15e-6 * 2.37e4;
    CHECK(oracle == doctest::Approx(6.285240).epsilon(1e-12));
    CHECK(scaled_period(33.15e-6, rb) == doctest::Approx(oracle).epsilon(1e-14));
  }
  SUBCASE("non-positive period") {
    CHECK_THROWS_AS(scaled_period(0.0, rb), DomainError);
    CHECK_THROWS_AS(scaled_period(-1e-6, rb), DomainError);
  }
  SUBCASE("round trip") {
    for (double t : {1e-7, 5e-6, 33.15e-6, 66.3e-6, 1e-3, 0.7}) {
      CHECK(std::abs(physical_period(scaled_period(t, rb), rb) - t) <= 1e-14 * t);
    }
    const PhysicalParams other(1.5e4);
    CHECK(std::abs(physical_period(scaled_period(2e-5, other), other) - 2e-5) <= 1e-14 * 2e-5);
  }
}

TEST_CASE("bragg_phase") {
  const PhysicalParams rb;
  const double tt = rb.talbot_time();
  CHECK(bragg_phase(0.0, rb) == 0.0);
  CHECK(bragg_phase(tt, rb) == 0.0);
  CHECK(bragg_phase(tt / 4, rb) == doctest::Approx(pi / 2).epsilon(1e-15));
  CHECK(bragg_phase(tt / 2, rb) == doctest::Approx(pi).epsilon(1e-15));
  CHECK_THROWS_AS(bragg_phase(-1e-9, rb), DomainError);

  SUBCASE("phi = 4 w_r Delta before reduction") {
    const double delay = 3.1e-6;
    CHECK(bragg_phase(delay, rb) == doctest::Approx(4.0 * rb.recoil_freq() * delay).epsilon(1e-13));
  }
  SUBCASE("periodic in the Talbot time") {
    for (double d : {0.0, 1e-6, 17e-6, 40e-6, 65e-6}) {
      for (int k : {1, 2, 7}) {
        const double a = bragg_phase(d, rb);
        const double b = bragg_phase(d + k * tt, rb);
        const double diff = std::remainder(a - b, 2 * pi);
        CHECK(std::abs(diff) < 1e-12);
        CHECK(b >= 0.0);
        CHECK(b < 2 * pi);
      }
    }
  }
}

TEST_CASE("ScaledParams invariants") {
  CHECK_NOTHROW(ScaledParams<double>(0.6, 4 * pi, 0.0));
  CHECK_NOTHROW(ScaledParams<double>(0.0, 1.0, -0.5));
  CHECK_THROWS_AS(ScaledParams<double>(-0.1, 4 * pi), DomainError);
  CHECK_THROWS_AS(ScaledParams<double>(0.6, 0.0), DomainError);
  CHECK_THROWS_AS(ScaledParams<double>(0.6, 4 * pi, 0.5), DomainError);
}

TEST_CASE("ExperimentSequence validation") {
  ExperimentSequence seq;
  seq.kick_count = 5;
  seq.kick_period = 66.3e-6;
  seq.pulse_width = 5e-6;
  seq.kick_strength = 0.6;
  CHECK_NOTHROW(validate(seq));

  auto bad = seq;
  bad.pulse_width = bad.kick_period;
  CHECK_THROWS_WITH_AS(validate(bad), "pulse_width must be < kick_period", DomainError);
  bad = seq;
  bad.kick_count = -1;
  CHECK_THROWS_AS(validate(bad), DomainError);
  bad = seq;
  bad.phase_delay = -1e-6;
  CHECK_THROWS_AS(validate(bad), DomainError);
  bad = seq;
  bad.kick_strength = -0.6;
  CHECK_THROWS_AS(validate(bad), DomainError);
}

TEST_CASE("new_ladder_state") {
  SUBCASE("|0> analogue") {
    const auto s = new_ladder_state<double>(-32, 32, 0.0, 0);
    CHECK(s.size() == 65);
    CHECK(s[0] == std::complex<double>(1.0));
    CHECK(s.norm_squared() == 1.0);
  }
  SUBCASE("|-2 hbar k> analogue") {
    const auto s = new_ladder_state<double>(-32, 32, 0.0, -1);
    CHECK(s[-1] == std::complex<double>(1.0));
    CHECK(s[0] == std::complex<double>(0.0));
    CHECK(s.norm_squared() == 1.0);
  }
  SUBCASE("non-zero quasimomentum") {
    const auto s = new_ladder_state<double>(-4, 4, 0.25, 0);
    CHECK(s.beta() == 0.25);
    CHECK(s.momentum(0) == 0.25);
    CHECK(s.momentum(-3) == -2.75);
    CHECK(s.norm_squared() == 1.0);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(new_ladder_state<double>(-4, 4, 0.0, 5), std::out_of_range);
    CHECK_THROWS_AS(new_ladder_state<double>(1, 4, 0.0, 2), std::out_of_range);
    CHECK_THROWS_AS(new_ladder_state<double>(-4, 4, 0.5, 0), DomainError);
  }
  SUBCASE("extended precision instantiation") {
    const auto s = new_ladder_state<long double>(-2, 2, 0.0L, 1);
    CHECK(s.norm_squared() == 1.0L);
  }
}

TEST_CASE("resize_ladder keeps amplitudes") {
  auto s = new_ladder_state<double>(-2, 2, 0.1, 1);
  s.at(-2) = {0.0, 0.5};
  const auto w = resize_ladder(s, -10, 7);
  CHECK(w.n_min() == -10);
  CHECK(w.n_max() == 7);
  CHECK(w[1] == s[1]);
  CHECK(w[-2] == s[-2]);
  CHECK(w[5] == std::complex<double>(0.0));
  CHECK(w.beta() == 0.1);
  CHECK_THROWS_AS(resize_ladder(s, -1, 7), std::out_of_range);
}
