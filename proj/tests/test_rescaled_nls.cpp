#include "blowup/rescaled_nls.hpp"

#include "doctest.h"

#include <cmath>

using namespace blowup;

namespace {

NlsConfig small(double dtau) {
  NlsConfig c;
  c.dim = 4;
  c.amplitude = 3.0;
  c.nodes = 64;
  c.kappa = 8.0;
  c.dtau = dtau;
  return c;
}

CVec advance(double dtau, double horizon) {
  RescaledSolver s(small(dtau));
  const long steps = std::lround(horizon / dtau);
  for (long i = 0; i < steps; ++i) s.step();
  return s.state().v;
}

}  // namespace

TEST_CASE("Gaussian datum mass matches the closed form") {
  for (int d : {2, 4, 7}) {
    const auto g = build_grid(256, 32.0);
    const auto datum = gaussian_datum(g, d, 2.5);
    CHECK(datum.u0_mass == doctest::Approx(gaussian_mass(d, 2.5)).epsilon(1e-10));
    CHECK(std::abs(datum.v(0)) == doctest::Approx(1.0));
  }
}

TEST_CASE("predictor-corrector stepper is second order") {
  // h = 0.02 over a short horizon is still pre-asymptotic (ratio ~3.5)
  const double h = 0.01, horizon = 2.0;
  const CVec a = advance(h, horizon), b = advance(h / 2, horizon), c = advance(h / 4, horizon);
  const double ratio = (a - b).cwiseAbs().maxCoeff() / (b - c).cwiseAbs().maxCoeff();
  CAPTURE(ratio);
  CHECK(std::abs(ratio - 4.0) <= 0.5);
}

TEST_CASE("max-norm normalization holds |v(0)| = 1 and conserves mass") {
  RescaledSolver s(small(2e-3));
  const double m0 = s.mass(s.state().v);
  for (int i = 0; i < 500; ++i) s.step();
  CHECK(std::abs(s.state().v(0)) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(s.mass(s.state().v) == doctest::Approx(m0).epsilon(1e-6));
  CHECK(s.state().a > 0);
}

TEST_CASE("short run to a modest focusing level") {
  NlsConfig c;
  c.dim = 4;
  c.amplitude = 5.0;
  c.stop_focusing = 1e-3;
  c.checkpoint_levels = {10.0, 100.0, 500.0};
  c.sample_every = 50;
  const auto tr = run_until(c);
  CHECK(tr.stopped_on_focusing);
  REQUIRE(tr.checkpoints.size() == 3);
  CHECK(tr.checkpoints[0].time_to_blowup > tr.checkpoints[1].time_to_blowup);
  CHECK(tr.blowup_time > tr.forward_time);
  CHECK(tr.max_norm_error < 1e-6);
  CHECK(tr.final_state.size() == tr.xi.size());
}

TEST_CASE("profile deviation of the rescaled ground state itself is zero") {
  const auto prof = compute_ground_state(4, {}, 512, 60.0);
  const auto g = build_grid(128, 8.0);
  const double s = std::pow(prof.q_vals(0), -0.5);
  Vec mod(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double arg = s * g.xi(i);
    mod(i) = arg > 60.0 ? 0.0
                        : prof.grid.interpolate(std::span<const double>(prof.q_vals.data(), prof.q_vals.size()), arg) /
                              prof.q_vals(0);
  }
  const auto dev = profile_deviation(prof, g.xi, mod);
  CHECK(dev.sup_error < 1e-12);
  CHECK(dev.points > 10);
  mod(0) += 0.01;
  CHECK(profile_deviation(prof, g.xi, mod).sup_error == doctest::Approx(0.01));
}
