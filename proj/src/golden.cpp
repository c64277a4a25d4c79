#include "blowup/golden.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <stdexcept>

namespace blowup {

const Json& golden_data() {
  static const Json data = [] {
    const char* env = std::getenv("BLOWUP_DATA_DIR");
    const std::filesystem::path dir = env && *env ? env : BLOWUP_DATA_DIR;
    return read_json((dir / "golden.json").string());
  }();
  return data;
}

double tier_tolerance(int dim) {
  const auto& t = golden_data().at("tolerance");
  return dim <= t.at("tight_max_dim").get<int>() ? t.at("tight").get<double>() : t.at("loose").get<double>();
}

PrintedValue parse_printed(const std::string& text) {
  PrintedValue p;
  std::size_t used = 0;
  p.value = std::stod(text, &used);
  if (used != text.size()) throw std::invalid_argument("not a number: " + text);
  std::string mant = text;
  int exp10 = 0;
  if (const auto e = text.find_first_of("eE"); e != std::string::npos) {
    mant = text.substr(0, e);
    exp10 = std::stoi(text.substr(e + 1));
  }
  int decimals = 0;
  if (const auto dot = mant.find('.'); dot != std::string::npos) decimals = int(mant.size() - dot - 1);
  p.half_unit = 0.5 * std::pow(10.0, exp10 - decimals);
  return p;
}

Comparison compare_printed(double actual, const std::string& expected, double rel) {
  const auto p = parse_printed(expected);
  Comparison c;
  c.expected = p.value;
  c.actual = actual;
  c.allowed = std::max(rel * std::abs(p.value), p.half_unit);
  c.pass = std::isfinite(actual) && std::abs(actual - p.value) <= c.allowed;
  return c;
}

}  // namespace blowup
