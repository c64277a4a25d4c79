#include "blowup/spectral_property.hpp"

#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <numbers>

using namespace blowup;

namespace {

// Zero-energy bound states of a d = 3 square well of depth c and radius R.
int well_count(double c, double radius) { return int(std::floor(std::sqrt(c) * radius / std::numbers::pi + 0.5)); }

RadialPotential well(double c, double radius) {
  return RadialPotential([c, radius](double r) { return r < radius ? -c : 0.0; }, radius + 1.0);
}

}  // namespace

TEST_CASE("square well index matches the closed-form count") {
  for (auto [c, radius] : {std::pair{4.0, 5.0}, {1.0, 2.0}, {9.0, 4.0}, {0.2, 1.0}}) {
    CAPTURE(c);
    CAPTURE(radius);
    const auto v = well(c, radius);
    const auto res = count_index(v, 3, 0, OperatorKind::L1);
    CHECK(res.zero_count == well_count(c, radius));
    CHECK(sturm_count(v, 3, 0, 0.0, 4000, 100.0) == well_count(c, radius));
  }
}

TEST_CASE("free operator has no negative direction") {
  const RadialPotential zero(0.0);
  for (int k = 0; k < 3; ++k) {
    const auto res = count_index(zero, 5, k, OperatorKind::L1);
    CHECK(res.zero_count == 0);
    CHECK(fd_spectrum(zero, 5, k).negative_count == 0);
  }
}

TEST_CASE("higher harmonics bind fewer states") {
  const auto v = well(25.0, 3.0);
  int previous = 1 << 20;
  for (int k = 0; k < 5; ++k) {
    const int n = count_index(v, 4, k, OperatorKind::L1).zero_count;
    CHECK(n <= previous);
    CHECK(sturm_count(v, 4, k, 0.0) == n);
    previous = n;
  }
}

TEST_CASE("finite-difference lowest eigenvalue of a deep well") {
  // d = 3, k = 0: the lowest level solves sqrt(c - E') cot(sqrt(c - E') R) = -sqrt(E'), E' = -lambda.
  const double c = 4.0, radius = 5.0;
  const auto fd = fd_spectrum(well(c, radius), 3, 0);
  const double e = -fd.lowest;
  const double q = std::sqrt(c - e);
  CHECK(q / std::tan(q * radius) == doctest::Approx(-std::sqrt(e)).epsilon(2e-3));
}

TEST_CASE("free tail constants are exact for the model tail") {
  const auto [c1, c2] = free_tail_constants(10.0, 3.0 + 2.0 / 1000.0, 20.0, 3.0 + 2.0 / 8000.0, 3.0);
  CHECK(c1 == doctest::Approx(2.0));
  CHECK(c2 == doctest::Approx(3.0));
}

TEST_CASE("manufactured BVP solutions are recovered") {
  const auto g = build_interval_grid(128, 20.0);
  const int d = 5;
  Vec pot(g.size()), u0(g.size()), f0(g.size()), u1(g.size()), f1(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g.xi(i), e = std::exp(-r * r);
    pot(i) = -3.0 * std::exp(-r * r / 2);
    u0(i) = e;
    f0(i) = (2.0 * d - 4 * r * r) * e + pot(i) * u0(i);
    u1(i) = r * e;
    f1(i) = r * (2.0 * d + 4 - 4 * r * r) * e + pot(i) * u1(i);
  }
  const auto s0 = solve_radial_bvp(g, d, 0, pot, f0);
  CHECK((s0.u - u0).cwiseAbs().maxCoeff() < 1e-7);
  const auto s1 = solve_radial_bvp(g, d, 1, pot, f1);
  CHECK((s1.u - u1).cwiseAbs().maxCoeff() < 1e-7);
  BvpOptions neumann;
  neumann.outer = OuterCondition::Neumann;
  CHECK((solve_radial_bvp(g, d, 0, pot, f0, neumann).u - u0).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("ill-conditioned solves are refused") {
  const auto g = build_interval_grid(64, 20.0);
  Vec pot = Vec::Zero(g.size()), f = Vec::Ones(g.size());
  BvpOptions strict;
  strict.max_condition = 10.0;
  CHECK_THROWS_AS(solve_radial_bvp(g, 4, 0, pot, f, strict), SolverError);
}

TEST_CASE("forms of a ground state are symmetric") {
  const auto prof = compute_ground_state(5);
  const auto f = bilinear_matrix(prof);
  CHECK(f.k.sym_residual() < 1e-8);
  CHECK(f.j.sym_residual() < 1e-8);
  CHECK(f.k.m11 < 0);
  CHECK(f.k.m22 < 0);
  CHECK(f.k.det() > 0);
  CHECK(f.j.det() < 0);
}

TEST_CASE("radial indices at d = 5") {
  const auto prof = compute_ground_state(5);
  const auto l1 = count_index(prof, 0, OperatorKind::L1);
  const auto l2 = count_index(prof, 0, OperatorKind::L2);
  CHECK(l1.zero_count == 2);
  CHECK(l2.zero_count == 1);
  CHECK(l1.stop == StopRule::Positivity);
  REQUIRE(l1.positivity);
  CHECK(l1.positivity->sign_product > 0);
}
