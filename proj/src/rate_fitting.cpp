#include "blowup/rate_fitting.hpp"

#include "blowup/io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <stdexcept>

namespace blowup {

double CorrectionForm::operator()(double s) const {
  switch (kind) {
    case Kind::Constant:
      return 1.0;
    case Kind::PowerLog:
      if (!(s > 0 && s < 1)) throw std::domain_error("power-log form needs 0 < s < 1");
      return std::pow(std::log(1.0 / s), gamma);
    case Kind::LogLog: {
      const double inner = std::log(1.0 / s);
      if (!(inner > 1.0)) throw std::domain_error("log-log form needs s < 1/e");
      return std::log(inner);
    }
  }
  return 1.0;
}

std::string CorrectionForm::label() const {
  switch (kind) {
    case Kind::Constant:
      return "1";
    case Kind::PowerLog: {
      std::ostringstream os;
      os << "ln^" << gamma;
      return os.str();
    }
    case Kind::LogLog:
      return "loglog";
  }
  return "?";
}

std::vector<CorrectionForm> default_catalogue() {
  std::vector<CorrectionForm> out{CorrectionForm::constant()};
  for (double g : {1.0, 0.6, 0.5, 0.4, 0.3, 0.25, 0.2, 0.15, 0.1}) out.push_back(CorrectionForm::power_log(g));
  out.push_back(CorrectionForm::log_log());
  return out;
}

CorrectionForm parse_form(const std::string& text) {
  if (text == "loglog" || text == "log-log") return CorrectionForm::log_log();
  if (text == "1" || text == "const" || text == "constant") return CorrectionForm::constant();
  const std::string body = text.rfind("ln^", 0) == 0 ? text.substr(3) : text;
  std::size_t used = 0;
  const double g = std::stod(body, &used);
  if (used != body.size()) throw std::invalid_argument("cannot parse form " + text);
  if (g == 0.0) return CorrectionForm::constant();
  if (!(g > 0 && g <= 1)) throw std::invalid_argument("power-log exponent must be in (0,1]");
  return CorrectionForm::power_log(g);
}

std::vector<double> fit_rho(const std::vector<RatePoint>& pts, const CorrectionForm& form) {
  if (pts.size() < 2) throw std::invalid_argument("need at least two checkpoints");
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    if (!(pts[i + 1].time_to_blowup < pts[i].time_to_blowup))
      throw std::invalid_argument("T - t must be strictly decreasing");
  std::vector<double> rho;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto& p = pts[i];
    const auto& q = pts[i + 1];
    const double num = std::log(p.scale / q.scale);
    const double den = std::log(form(q.time_to_blowup) / form(p.time_to_blowup)) -
                       std::log(q.time_to_blowup / p.time_to_blowup);
    rho.push_back(num / den);
  }
  return rho;
}

double rate_slope(const std::vector<RatePoint>& pts) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& p : pts) {
    if (!(p.time_to_blowup > 0 && p.scale > 0)) continue;
    const double x = std::log(p.time_to_blowup), y = std::log(p.scale);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw std::invalid_argument("need at least two points for a slope");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<RatePoint> rate_points(const Table& t) {
  const auto& l = t.column("L");
  const auto& s = t.column("T_minus_t");
  std::vector<RatePoint> out;
  for (std::size_t i = 0; i < l.size(); ++i)
    if (s[i] > 0) out.push_back({l[i], s[i]});
  return out;
}

double discrepancy(const std::vector<double>& rho, std::size_t j0, std::size_t i) {
  if (rho.empty() || j0 > i || i >= rho.size()) throw std::invalid_argument("empty discrepancy window");
  double sum = 0.0;
  for (std::size_t j = j0; j <= i; ++j) sum += (0.5 - rho[j]) * (0.5 - rho[j]);
  return std::sqrt(sum / double(i - j0 + 1));
}

ComparativeReport fitting_report(const std::vector<RatePoint>& pts, const std::vector<CorrectionForm>& forms,
                                 std::size_t eps_window_start, std::size_t drift_window) {
  ComparativeReport rep;
  rep.eps_window_start = eps_window_start;
  rep.drift_window = drift_window;
  if (pts.size() < 2) {
    rep.warnings.push_back("fewer than two checkpoints; no fit");
    return rep;
  }
  if (1.0 / pts.back().scale < 1e15) rep.warnings.push_back("focusing below 1e15; report is partial");
  const std::size_t nrows = pts.size() - 1;
  if (eps_window_start >= nrows) {
    rep.warnings.push_back("window start beyond last row; using last row");
    rep.eps_window_start = nrows - 1;
  }
  const std::size_t drift_from = nrows > drift_window ? nrows - drift_window : 0;

  double best = INFINITY;
  for (const auto& form : forms) {
    FitReport fr;
    fr.form = form;
    const auto rho = fit_rho(pts, form);
    for (std::size_t i = 0; i < rho.size(); ++i)
      fr.rows.push_back({i, 1.0 / pts[i].scale, 1.0 / pts[i + 1].scale, rho[i], discrepancy(rho, 0, i)});
    fr.eps_window = discrepancy(rho, rep.eps_window_start, rho.size() - 1);
    const auto [lo, hi] = std::minmax_element(rho.begin() + long(drift_from), rho.end());
    fr.drift = *hi - *lo;
    if (fr.drift < best) {
      best = fr.drift;
      rep.most_stable = form.label();
    }
    rep.forms.push_back(std::move(fr));
  }
  return rep;
}

void export_report(const ComparativeReport& rep, const std::string& dir) {
  namespace fs = std::filesystem;
  Json summary;
  summary["most_stable"] = rep.most_stable;
  summary["eps_window_start"] = rep.eps_window_start;
  summary["drift_window"] = rep.drift_window;
  summary["warnings"] = rep.warnings;
  for (const auto& fr : rep.forms) {
    Table t;
    t.header = {"i", "focus_from", "focus_to", "rho", "eps_cumulative"};
    t.columns.resize(5);
    for (const auto& r : fr.rows) {
      t.columns[0].push_back(double(r.i));
      t.columns[1].push_back(r.focus_from);
      t.columns[2].push_back(r.focus_to);
      t.columns[3].push_back(r.rho);
      t.columns[4].push_back(r.eps_cumulative);
    }
    write_csv(fs::path(dir) / ("rho_" + fr.form.label() + ".csv"), t);
    summary["forms"].push_back({{"form", fr.form.label()}, {"eps_window", fr.eps_window}, {"drift", fr.drift},
                                {"final_rho", fr.rows.empty() ? 0.0 : fr.rows.back().rho}});
  }
  write_json(fs::path(dir) / "summary.json", summary);
}

}  // namespace blowup
