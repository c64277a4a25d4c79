#include "blowup/spectral_grid.hpp"

#include "doctest.h"

#include <cmath>

using namespace blowup;

TEST_CASE("interval grid differentiates polynomials exactly") {
  const auto g = build_interval_grid(32, 10.0);
  Vec f(g.size()), df(g.size()), d2f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g.xi(i);
    f(i) = std::pow(r, 7) - 3 * r * r + 1;
    df(i) = 7 * std::pow(r, 6) - 6 * r;
    d2f(i) = 42 * std::pow(r, 5) - 6;
  }
  CHECK((g.d1 * f - df).cwiseAbs().maxCoeff() <= 1e-8 * df.cwiseAbs().maxCoeff());
  CHECK((g.d2 * f - d2f).cwiseAbs().maxCoeff() <= 1e-8 * d2f.cwiseAbs().maxCoeff());
}

TEST_CASE("weighted quadrature is exact for polynomials on an interval") {
  const auto g = build_interval_grid(40, 2.0);
  for (int d = 1; d <= 12; ++d) {
    Vec f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) f(i) = g.xi(i) * g.xi(i);
    const double exact = std::pow(2.0, d + 2) / (d + 2);
    CHECK(weighted_quadrature(g, f, d) == doctest::Approx(exact).epsilon(1e-13));
  }
}

TEST_CASE("half-line quadrature of Gaussian moments") {
  const auto g = build_grid(256, 256.0);
  for (int d = 2; d <= 12; ++d) {
    Vec f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) f(i) = g.xi(i) * g.xi(i) * std::exp(-g.xi(i) * g.xi(i));
    const double exact = std::tgamma((d + 2) / 2.0) / 2.0;
    CHECK(weighted_quadrature(g, f, d) == doctest::Approx(exact).epsilon(1e-10));
  }
}

TEST_CASE("rational map derivative of a rational function") {
  const auto g = build_grid(32, 1.0, false);
  Vec f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) f(i) = std::isinf(g.xi(i)) ? 1.0 : g.xi(i) / (1 + g.xi(i));
  const Vec df = g.d1 * f;
  for (std::size_t i = 0; i + 1 < g.size(); ++i)
    CHECK(df(i) == doctest::Approx(1 / ((1 + g.xi(i)) * (1 + g.xi(i)))).epsilon(1e-10));
}

TEST_CASE("radial Laplacian of a Gaussian in d = 3") {
  const auto g = build_grid(256, 8.0);
  const auto lap = radial_laplacian(g, 3, 0);
  Vec v(g.size()), exact(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.xi(i);
    v(i) = std::exp(-x * x);
    exact(i) = (4 * x * x - 6) * std::exp(-x * x);
  }
  CHECK((lap.matrix * v - exact).cwiseAbs().maxCoeff() < 1e-7);  // roundoff in d2 at n = 256
}

TEST_CASE("radial Laplacian of r^2 is 2d") {
  const auto g = build_interval_grid(64, 10.0);
  for (int d : {1, 4, 9}) {
    const auto lap = radial_laplacian(g, d, 0);
    Vec q = g.xi.array().square();
    CHECK(((lap.matrix * q).array() - 2.0 * d).abs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("Chebyshev coefficients recover T_3") {
  const auto g = build_interval_grid(32, 2.0);
  Vec t3(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) t3(i) = 4 * std::pow(g.z(i), 3) - 3 * g.z(i);
  const Vec c = chebyshev_coefficients(t3);
  CHECK(c(3) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(std::abs(c(1)) < 1e-13);
  CHECK(coefficient_tail(c) < 1e-13);
}

TEST_CASE("barycentric interpolation is exact for polynomials") {
  const auto g = build_interval_grid(24, 5.0);
  Vec f = g.xi.array().cube();
  CHECK(g.interpolate(std::span<const double>(f.data(), std::size_t(f.size())), 1.2345) ==
        doctest::Approx(std::pow(1.2345, 3)).epsilon(1e-12));
}

TEST_CASE("grid construction rejects bad arguments") {
  CHECK_THROWS_AS(build_grid(4, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(64, -1.0), std::invalid_argument);
}
