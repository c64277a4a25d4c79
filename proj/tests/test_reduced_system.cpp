#include "blowup/reduced_system.hpp"

#include "doctest.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace blowup;

TEST_CASE("trajectories are deterministic") {
  ReducedConfig c;
  c.c_nu = 52.3;
  c.stop_log_l = std::log(1e-60);
  const auto a = integrate_reduced(c);
  const auto b = integrate_reduced(c);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].a == b.samples[i].a);
    CHECK(a.samples[i].b == b.samples[i].b);
    CHECK(a.samples[i].log_remaining == b.samples[i].log_remaining);
  }
}

TEST_CASE("frozen b with the adiabatic start keeps a constant") {
  ReducedConfig c;
  c.c_nu = 0.0;
  c.b0 = 0.04;
  c.tau_max = 50.0;
  const auto tr = integrate_reduced(c);
  for (const auto& s : tr.samples) {
    CHECK(s.a == doctest::Approx(0.2).epsilon(1e-13));
    CHECK(s.log_l == doctest::Approx(-0.2 * s.tau).epsilon(1e-10));
  }
  // T - t = int_tau^inf e^{-2 a tau'} = L^2 / (2a)
  const auto& first = tr.samples.front();
  CHECK(first.log_remaining == doctest::Approx(-std::log(0.4)).epsilon(1e-6));
}

TEST_CASE("frozen b from a = 0 follows the tanh solution") {
  ReducedConfig c;
  c.c_nu = 0.0;
  c.b0 = 0.09;
  c.start = ReducedStart::Zero;
  c.tau_max = 30.0;
  const auto tr = integrate_reduced(c);
  for (const auto& s : tr.samples) CHECK(s.a == doctest::Approx(0.3 * std::tanh(0.3 * s.tau)).epsilon(1e-12));
}

TEST_CASE("b decreases monotonically") {
  ReducedConfig c;
  c.c_nu = 52.3;
  c.stop_log_l = std::log(1e-40);
  const auto tr = integrate_reduced(c);
  CHECK(tr.stop_reason == "focusing");
  for (std::size_t i = 1; i < tr.samples.size(); ++i) CHECK(tr.samples[i].b <= tr.samples[i - 1].b);
}

TEST_CASE("scale helpers") {
  CHECK(loglog_b(std::exp(2.0)) == doctest::Approx(std::numbers::pi * std::numbers::pi / 4));
  const double s = 1e-20;
  CHECK(std::exp(log_loglog_scale(std::log(s))) ==
        doctest::Approx(std::sqrt(2 * std::numbers::pi * s / std::log(std::log(1 / s)))));
}

TEST_CASE("invalid configurations") {
  ReducedConfig c;
  c.b0 = 0.0;
  CHECK_THROWS_AS(integrate_reduced(c), std::invalid_argument);
  c.b0 = 0.1;
  c.c_nu = -1.0;
  CHECK_THROWS_AS(integrate_reduced(c), std::invalid_argument);
  CHECK_THROWS_AS(recover_scale({0.0, 1.0}, {0.1}, 0.0), std::invalid_argument);
}
