#include "blowup/io.hpp"
#include "blowup/rate_fitting.hpp"

#include "doctest.h"

#include <cmath>
#include <stdexcept>

using namespace blowup;

namespace {

// Points on 1/L = (F(s)/s)^{1/2} at geometrically spaced s.
std::vector<RatePoint> synthetic(const CorrectionForm& f, double scale = 1.0) {
  std::vector<RatePoint> pts;
  for (int i = 0; i < 12; ++i) {
    const double s = 1e-3 * std::pow(1e-3, i);
    pts.push_back({scale * std::sqrt(s / f(s)), s});
  }
  return pts;
}

}  // namespace

TEST_CASE("rho is exactly 1/2 for data generated by the same form") {
  for (const auto& f : default_catalogue()) {
    CAPTURE(f.label());
    for (double rho : fit_rho(synthetic(f), f)) CHECK(rho == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("rho is invariant under scaling L") {
  const auto f = CorrectionForm::log_log();
  const auto a = fit_rho(synthetic(CorrectionForm::power_log(0.3)), f);
  const auto b = fit_rho(synthetic(CorrectionForm::power_log(0.3), 37.5), f);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("a mismatched form drifts and loses the drift ranking") {
  const auto rep = fitting_report(synthetic(CorrectionForm::log_log()));
  CHECK(rep.most_stable == "loglog");
  for (const auto& f : rep.forms)
    if (f.form.kind == CorrectionForm::Kind::Constant) CHECK(f.rows.front().rho > 0.5);
}

TEST_CASE("discrepancy") {
  const std::vector<double> rho{0.5, 0.49, 0.51, 0.5};
  CHECK(discrepancy(rho, 0, 3) == doctest::Approx(std::sqrt(2e-4 / 4)));
  CHECK(discrepancy(rho, 3, 3) == 0.0);
  CHECK_THROWS_AS(discrepancy(rho, 2, 1), std::invalid_argument);
}

TEST_CASE("slope of a pure power law") {
  std::vector<RatePoint> pts;
  for (int i = 0; i < 20; ++i) {
    const double s = std::pow(10.0, -i);
    pts.push_back({3.0 * std::pow(s, 0.503), s});
  }
  CHECK(rate_slope(pts) == doctest::Approx(0.503).epsilon(1e-12));
}

TEST_CASE("form parsing") {
  CHECK(parse_form("1").kind == CorrectionForm::Kind::Constant);
  CHECK(parse_form("loglog").kind == CorrectionForm::Kind::LogLog);
  CHECK(parse_form("0.25").gamma == 0.25);
  CHECK_THROWS(parse_form("banana"));
  CHECK_THROWS_AS(CorrectionForm::log_log()(0.9), std::domain_error);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(fit_rho({{1.0, 1e-3}}, CorrectionForm::constant()), std::invalid_argument);
  CHECK_THROWS_AS(fit_rho({{1.0, 1e-3}, {0.5, 1e-2}}, CorrectionForm::constant()), std::invalid_argument);
}

TEST_CASE("points from a table") {
  Table t;
  t.header = {"L", "T_minus_t"};
  t.columns = {{1.0, 0.5, 0.25}, {1e-2, 1e-3, 0.0}};
  const auto pts = rate_points(t);
  REQUIRE(pts.size() == 2);
  CHECK(pts[1].scale == 0.5);
}
