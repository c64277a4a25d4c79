// Acceptance runner: one PASS/FAIL line per criterion. Simulations are cached
// under the output directory, so later criteria reuse earlier runs.
//
//   acceptance [--criterion N]... [--out DIR] [--jobs N]

#include "blowup/golden.hpp"
#include "blowup/rate_fitting.hpp"
#include "blowup/reduced_system.hpp"
#include "blowup/report.hpp"
#include "blowup/rescaled_nls.hpp"
#include "blowup/spectral_property.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

using namespace blowup;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

ReportContext context;

std::string failures(const ReportResult& r, std::size_t limit = 6) {
  std::ostringstream os;
  std::size_t shown = 0, total = 0;
  for (const auto& l : r.lines) {
    if (l.pass) continue;
    ++total;
    if (shown++ < limit) {
      os << " [" << r.table << " d=" << l.dim << " " << l.item << ": ";
      if (l.actual_text.empty())
        os << l.actual;
      else
        os << l.actual_text;
      if (!l.expected.empty()) os << " vs " << l.expected;
      os << "]";
    }
  }
  if (total > shown) os << " (+" << total - shown << " more)";
  return os.str();
}

// Runs the named reports and folds them into one outcome.
Outcome reports(std::initializer_list<const char*> names) {
  Outcome o{true, ""};
  std::size_t lines = 0, failed = 0;
  for (const char* n : names) {
    const auto r = run_report(n, context);
    export_report_result(r, context.out / "acceptance");
    std::cerr << format_report(r);
    lines += r.lines.size();
    for (const auto& l : r.lines) failed += !l.pass;
    if (!r.pass()) {
      o.pass = false;
      o.detail += failures(r);
    }
  }
  o.detail = std::to_string(lines - failed) + "/" + std::to_string(lines) + " checks pass" + o.detail;
  return o;
}

Outcome reduced_structure() {
  ReducedConfig c;
  c.b0 = 0.1;
  c.log_l0 = 0.0;
  c.c_nu = cached_ground_state(4, context.profile_nodes, context.domain_length).c_nu;
  c.stop_log_l = std::log(1e-250);
  const auto tr = integrate_reduced(c);
  double first = NAN, last = NAN, prev = -INFINITY;
  long decreases = 0, outside = 0, below = 0, checked = 0;
  for (const auto& s : tr.samples) {
    if (s.log_remaining < -1.0) {
      const double ratio = std::exp(s.log_l - log_loglog_scale(s.log_remaining));
      if (std::isnan(first)) first = ratio;
      if (ratio < prev * (1 - 1e-12)) ++decreases;
      prev = last = ratio;
    }
    if (s.tau > 1.0) {
      const double ll = loglog_b(s.tau);
      ++checked;
      if (s.b < std::min(c.b0, ll) || s.b > std::max(c.b0, ll)) ++outside;
      if (s.b < ll) ++below;
    }
  }
  const bool toward_one = std::abs(1 - last) < std::abs(1 - first) && last <= 1.0;
  std::ostringstream os;
  os << "c_nu " << c.c_nu << ", stop " << tr.stop_reason << ", L/L_loglog " << first << " -> " << last << ", "
     << decreases << " decreases; b outside [pi^2/ln^2 tau, b0] at " << outside << "/" << checked
     << " samples (below the log-log curve at " << below << ")";
  return {tr.stop_reason == "focusing" && decreases == 0 && toward_one && outside == 0, os.str()};
}

Outcome property_suites() {
  std::vector<std::string> bad;
  std::ostringstream os;
  {  // quadrature and differentiation exactness
    const auto g = build_interval_grid(40, 2.0);
    double qerr = 0, derr = 0;
    for (int d = 1; d <= 12; ++d) {
      Vec f = g.xi.array().square();
      qerr = std::max(qerr, std::abs(weighted_quadrature(g, f, d) / (std::pow(2.0, d + 2) / (d + 2)) - 1));
    }
    Vec p = g.xi.array().pow(7), dp = 7 * g.xi.array().pow(6);
    derr = (g.d1 * p - dp).cwiseAbs().maxCoeff() / dp.cwiseAbs().maxCoeff();
    os << "quadrature " << qerr << ", derivative " << derr;
    if (qerr > 1e-13) bad.push_back("quadrature");
    if (derr > 1e-10) bad.push_back("differentiation");
  }
  {  // rho invariance under L -> c L
    std::vector<RatePoint> a, b;
    for (int i = 0; i < 10; ++i) {
      const double s = std::pow(10.0, -3 - 2 * i), l = std::sqrt(s / std::pow(std::log(1 / s), 0.3));
      a.push_back({l, s});
      b.push_back({17.0 * l, s});
    }
    const auto ra = fit_rho(a, CorrectionForm::log_log()), rb = fit_rho(b, CorrectionForm::log_log());
    double err = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) err = std::max(err, std::abs(ra[i] - rb[i]));
    os << ", rho scaling " << err;
    if (err > 1e-12) bad.push_back("rho invariance");
  }
  {  // manufactured solution
    const auto g = build_interval_grid(128, 20.0);
    const int d = 6;
    Vec pot(g.size()), u(g.size()), f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double r = g.xi(i), e = std::exp(-r * r);
      pot(i) = -3.0 * std::exp(-r * r / 2);
      u(i) = e;
      f(i) = (2.0 * d - 4 * r * r) * e + pot(i) * e;
    }
    const double err = (solve_radial_bvp(g, d, 0, pot, f).u - u).cwiseAbs().maxCoeff();
    os << ", BVP " << err;
    if (err > 1e-7) bad.push_back("BVP recovery");
  }
  {  // second order under halving
    const auto run = [](double h) {
      NlsConfig c;
      c.dim = 4;
      c.amplitude = 3.0;
      c.nodes = 64;
      c.kappa = 8.0;
      c.dtau = h;
      RescaledSolver s(c);
      for (long i = 0, n = std::lround(2.0 / h); i < n; ++i) s.step();
      return CVec(s.state().v);
    };
    const CVec a = run(0.01), b = run(0.005), c = run(0.0025);
    const double ratio = (a - b).cwiseAbs().maxCoeff() / (b - c).cwiseAbs().maxCoeff();
    os << ", stepper ratio " << ratio;
    if (std::abs(ratio - 4) > 0.5) bad.push_back("stepper order");
  }
  {  // determinism
    ReducedConfig c;
    c.c_nu = 52.3;
    c.stop_log_l = std::log(1e-80);
    const auto x = integrate_reduced(c), y = integrate_reduced(c);
    bool same = x.samples.size() == y.samples.size();
    for (std::size_t i = 0; same && i < x.samples.size(); ++i)
      same = x.samples[i].a == y.samples[i].a && x.samples[i].log_remaining == y.samples[i].log_remaining;
    os << ", reduced runs " << (same ? "identical" : "differ");
    if (!same) bad.push_back("determinism");
  }
  for (const auto& b : bad) os << "; failed: " << b;
  return {bad.empty(), os.str()};
}

struct Criterion {
  int id;
  const char* title;
  Outcome (*run)();
};

const Criterion criteria[] = {
    {1, "ground-state masses and d=1 closed form", [] { return reports({"table-1"}); }},
    {2, "weighted-profile consistency", [] { return reports({"table-18"}); }},
    {3, "conservation of max|v| over full runs", [] { return reports({"table-2"}); }},
    {4, "rate exponent and late-time profile", [] { return reports({"rate"}); }},
    {5, "fitting tables and drift ranking", [] { return reports({"table-3", "table-5", "loglog-final"}); }},
    {6, "reduced system structure", reduced_structure},
    {7, "indices and finite-difference counts", [] { return reports({"indices"}); }},
    {8, "bilinear forms", [] { return reports({"table-8", "table-9", "table-10", "table-11", "table-12", "table-13"}); }},
    {9, "spectral property verdicts", [] { return reports({"verdicts"}); }},
    {10, "cubic and boundary-condition cross-checks", [] { return reports({"table-19", "table-6"}); }},
    {11, "property suites", property_suites},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only;
  std::string out = "acceptance_runs";
  unsigned jobs = 1;
  app.add_option("--criterion", only, "criteria to run (default: all)");
  app.add_option("--out", out, "cache and output directory");
  app.add_option("--jobs", jobs, "worker threads");
  CLI11_PARSE(app, argc, argv);

  context.out = out;
  context.workers = jobs;
  context.log = [](const std::string& m) { std::cerr << m << std::endl; };

  bool all = true;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %s  %s: %s (%.0f s)\n", c.id, o.pass ? "PASS" : "FAIL", c.title, o.detail.c_str(), secs);
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
