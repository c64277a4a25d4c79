#include "blowup/golden.hpp"
#include "blowup/io.hpp"
#include "blowup/report.hpp"

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>

using namespace blowup;

TEST_CASE("printed values carry their resolution") {
  auto p = parse_printed("-42.3114");
  CHECK(p.value == -42.3114);
  CHECK(p.half_unit == doctest::Approx(5e-5));
  p = parse_printed("2.69e-4");
  CHECK(p.half_unit == doctest::Approx(5e-7));
  p = parse_printed("52218994506811");
  CHECK(p.half_unit == doctest::Approx(0.5));
  CHECK_THROWS(parse_printed("12abc"));
}

TEST_CASE("comparison uses the looser of tier and printed digits") {
  CHECK(compare_printed(1.0485, "1.04846", 0.0).pass == false);
  CHECK(compare_printed(1.048462, "1.04846", 0.0).pass);
  CHECK(compare_printed(-42.5, "-42.3114", 5e-3).pass);
  CHECK_FALSE(compare_printed(-42.6, "-42.3114", 5e-3).pass);
  CHECK_FALSE(compare_printed(NAN, "1", 1.0).pass);
}

TEST_CASE("tolerance tiers come from the data file") {
  CHECK(tier_tolerance(5) == 5e-3);
  CHECK(tier_tolerance(8) == 5e-3);
  CHECK(tier_tolerance(9) == 2e-2);
  CHECK(golden_data().at("version").get<int>() >= 1);
}

TEST_CASE("csv round trip") {
  const auto path = std::filesystem::temp_directory_path() / "blowup_io_test" / "t.csv";
  Table t;
  t.header = {"a", "b"};
  t.columns = {{1.0, 0.1}, {1e-300, -2.5}};
  write_csv(path, t);
  const auto back = read_csv(path);
  CHECK(back.header == t.header);
  CHECK(back.column("a")[1] == 0.1);
  CHECK(back.column("b")[0] == 1e-300);
  CHECK_THROWS(back.column("c"));
}

TEST_CASE("unknown report names are rejected") {
  ReportContext ctx;
  CHECK_THROWS_AS(run_report("table-99", ctx), std::invalid_argument);
  const auto names = report_names();
  CHECK(std::find(names.begin(), names.end(), "table-8") != names.end());
}

TEST_CASE("summaries need a run") {
  CHECK_THROWS_AS(summarize_run(std::filesystem::temp_directory_path() / "blowup_no_such_run"), std::runtime_error);
}
