#pragma once

// Reference values shipped in data/golden.json and the comparison rule used
// against them. Values are stored as printed strings so that their
// resolution is known.

#include "blowup/io.hpp"

#include <string>

namespace blowup {

// Loads golden.json from $BLOWUP_DATA_DIR, falling back to the build-time path.
const Json& golden_data();

// Relative tier from the "tolerance" block (0.5% up to d = 8, 2% above).
double tier_tolerance(int dim);

struct PrintedValue {
  double value = 0.0;
  double half_unit = 0.0;  // half of the last printed digit
};
PrintedValue parse_printed(const std::string& text);

struct Comparison {
  double expected = 0.0;
  double actual = 0.0;
  double allowed = 0.0;  // absolute
  bool pass = false;
};

// |actual - expected| <= max(rel * |expected|, half_unit).
Comparison compare_printed(double actual, const std::string& expected, double rel);

}  // namespace blowup
