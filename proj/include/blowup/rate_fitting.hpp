#pragma once

// Functional-form tests for the blow-up rate correction
//   1/L ~ (F(T-t)/(T-t))^{1/2}
// through the local exponents rho_i between consecutive checkpoints.

#include <string>
#include <vector>

namespace blowup {

struct CorrectionForm {
  enum class Kind { Constant, PowerLog, LogLog };
  Kind kind = Kind::Constant;
  double gamma = 0.0;

  double operator()(double s) const;  // F(s); throws std::domain_error outside its range
  std::string label() const;

  static CorrectionForm constant() { return {Kind::Constant, 0.0}; }
  static CorrectionForm power_log(double g) { return {Kind::PowerLog, g}; }
  static CorrectionForm log_log() { return {Kind::LogLog, 0.0}; }
};

struct RatePoint {
  double scale = 0.0;           // L(t_i)
  double time_to_blowup = 0.0;  // T - t_i
};

// Least-squares slope of ln L against ln(T - t) over all points with s > 0.
double rate_slope(const std::vector<RatePoint>& pts);

// Points from a table with columns "L" and "T_minus_t" (rows with s <= 0 dropped).
struct Table;
std::vector<RatePoint> rate_points(const Table& t);

// Constant, (ln 1/s)^g for g in {1, 0.6, 0.5, 0.4, 0.3, 0.25, 0.2, 0.15, 0.1}, ln ln 1/s.
std::vector<CorrectionForm> default_catalogue();
CorrectionForm parse_form(const std::string& text);  // "1", "0.25", "loglog"

// rho_i = ln(L_i/L_{i+1}) / ln( (F_{i+1}/s_{i+1}) / (F_i/s_i) ),  s = T - t.
// Throws std::invalid_argument for fewer than 2 points or non-decreasing s.
std::vector<double> fit_rho(const std::vector<RatePoint>& pts, const CorrectionForm& form);

// [ (1/(i-j0+1)) sum_{j=j0}^{i} (1/2 - rho_j)^2 ]^{1/2}
double discrepancy(const std::vector<double>& rho, std::size_t j0, std::size_t i);

struct FitRow {
  std::size_t i = 0;
  double focus_from = 0.0;  // 1/L_i
  double focus_to = 0.0;    // 1/L_{i+1}
  double rho = 0.0;
  double eps_cumulative = 0.0;
};

struct FitReport {
  CorrectionForm form;
  std::vector<FitRow> rows;
  double eps_window = 0.0;
  double drift = 0.0;  // max - min of rho over the stabilization window
};

struct ComparativeReport {
  std::vector<FitReport> forms;
  std::size_t eps_window_start = 7;
  std::size_t drift_window = 5;
  std::string most_stable;  // label of the form with the smallest drift
  std::vector<std::string> warnings;
};

ComparativeReport fitting_report(const std::vector<RatePoint>& pts,
                                 const std::vector<CorrectionForm>& forms = default_catalogue(),
                                 std::size_t eps_window_start = 7, std::size_t drift_window = 5);

// One CSV per form plus summary.json in `dir`.
void export_report(const ComparativeReport& rep, const std::string& dir);

}  // namespace blowup
