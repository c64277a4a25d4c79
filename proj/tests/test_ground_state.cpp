#include "blowup/ground_state.hpp"

#include "doctest.h"

#include <cmath>
#include <stdexcept>

using namespace blowup;

namespace {

// Gradient and nonlinear integrals for the two identities
//   int |Q'|^2 + int Q^2 = int Q^{p+1},
//   (d-2)/2 int |Q'|^2 + d/2 int Q^2 = d/(p+1) int Q^{p+1}.
struct Integrals {
  double grad, mass, pot;
};

Integrals integrals(const GroundStateProfile& g) {
  const Vec grad2 = g.qr_vals.cwiseProduct(g.qr_vals);
  const Vec pot = g.q_vals.array().pow(g.power + 1.0).matrix();
  return {weighted_quadrature(g.grid, grad2, g.dim), g.mass, weighted_quadrature(g.grid, pot, g.dim)};
}

}  // namespace

TEST_CASE("d = 1 matches the closed form") {
  const auto g = compute_ground_state(1);
  CHECK(explicit_profile_error(g) < 1e-8);
}

TEST_CASE("d = 4 mass") {
  const auto g = compute_ground_state(4);
  CHECK(g.mass == doctest::Approx(20.7129).epsilon(5e-3));
  CHECK(g.power == doctest::Approx(2.0));
}

TEST_CASE("energy and Pohozaev identities hold") {
  for (int d : {2, 3, 6, 10}) {
    CAPTURE(d);
    const auto g = compute_ground_state(d);
    const auto I = integrals(g);
    CHECK(I.grad + I.mass == doctest::Approx(I.pot).epsilon(1e-8));
    CHECK(0.5 * (d - 2) * I.grad + 0.5 * d * I.mass == doctest::Approx(d / (g.power + 1.0) * I.pot).epsilon(1e-8));
  }
}

TEST_CASE("derived fields are consistent") {
  const auto g = compute_ground_state(5);
  CHECK((g.v1_vals - g.power * g.v2_vals).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((g.v2_vals.array() <= 1e-14).all());
  CHECK(g.q_vals(0) == doctest::Approx(g.q_vals.maxCoeff()));
  CHECK(g.nu0 > 0);
  CHECK(g.c_nu > 0);
}

TEST_CASE("weighted and direct solves agree") {
  const auto g = compute_ground_state(6);
  CHECK(weighted_profile_gap(g) < 1e-7);
}

TEST_CASE("supercritical exponent is accepted") {
  GroundStateOptions o;
  o.power = 3.0;
  const auto g = compute_ground_state(3, o);
  CHECK(g.power == 3.0);
  const auto I = integrals(g);
  CHECK(I.grad + I.mass == doctest::Approx(I.pot).epsilon(1e-8));
}

TEST_CASE("bad input is rejected") {
  CHECK_THROWS_AS(compute_ground_state(0), std::invalid_argument);
  CHECK_THROWS_AS(compute_ground_state(13), std::invalid_argument);
  const auto grid = build_interval_grid(16, 10.0);
  Vec p = Vec::Ones(grid.size());
  p(3) = -1.0;
  CHECK_THROWS_AS(derive_fields(grid, p, 4), std::domain_error);
  const auto g4 = compute_ground_state(4, {}, 256, 40.0);
  CHECK_THROWS_AS(explicit_profile_error(g4), std::invalid_argument);
}

TEST_CASE("monotone_beyond detects a turn") {
  const auto g = compute_ground_state(3, {}, 256, 40.0);
  CHECK(monotone_beyond(g, g.q_vals, 0.0));
  Vec bump = (g.grid.xi.array() - 20.0).square().matrix();
  CHECK_FALSE(monotone_beyond(g, bump, 0.0));
  CHECK(monotone_beyond(g, bump, 21.0));
}
