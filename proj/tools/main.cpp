// blowup: command-line driver for the ground state, rescaled simulations,
// rate fitting, the reduced system, spectral checks and table regeneration.

#include "blowup/golden.hpp"
#include "blowup/ground_state.hpp"
#include "blowup/io.hpp"
#include "blowup/pool.hpp"
#include "blowup/rate_fitting.hpp"
#include "blowup/reduced_system.hpp"
#include "blowup/report.hpp"
#include "blowup/rescaled_nls.hpp"
#include "blowup/verdict.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace blowup;

namespace {

// Exit codes: 0 success, 1 failed computation or golden mismatch, 2 usage error.
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string out = "out";
  unsigned jobs = 1;
  bool quiet = false;

  std::vector<int> dims;
  int dim = 4;
  double amp = 0.0;
  std::size_t nodes = 256;
  double kappa = 256.0;
  double dtau = 2e-3;
  double stop_focusing = 1e-17;
  double max_tau = 1e9;
  std::string normalization = "max";
  std::string stepper = "pc";

  std::size_t profile_nodes = 1024;
  double domain_length = 100.0;
  double power = 0.0;
  bool check_weighted = false;

  std::string trace;
  std::vector<std::string> forms;

  double b0 = 0.1;
  std::string start = "adiabatic";
  double c_nu = 0.0;
  double reduced_stop = 1e-250;
  double tau_max = 1e300;

  std::vector<std::string> tables;
};

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

void manifest(const CLI::App& app, const CLI::App& sub, const Options& o, const std::vector<std::string>& argv) {
  Json j;
  j["command"] = sub.get_name();
  j["argv"] = argv;
  j["config"] = app.config_to_str(true, false);
  j["out"] = o.out;
  j["jobs"] = o.jobs;
  j["golden_version"] = golden_data().value("version", 0);
  j["timestamp"] = timestamp();
  write_json(fs::path(o.out) / (sub.get_name() + "_manifest.json"), j);
}

void note(const Options& o, const std::string& msg) {
  if (!o.quiet) std::cerr << msg << std::endl;
}

NlsConfig nls_config(const Options& o) {
  NlsConfig c;
  c.dim = o.dim;
  c.amplitude = o.amp;
  c.nodes = o.nodes;
  c.kappa = o.kappa;
  c.dtau = o.dtau;
  c.stop_focusing = o.stop_focusing;
  c.max_tau = o.max_tau;
  if (o.normalization == "max")
    c.normalization = Normalization::MaxNorm;
  else if (o.normalization == "gradient")
    c.normalization = Normalization::GradientNorm;
  else
    throw UsageError("--normalization must be max or gradient");
  if (o.stepper == "pc")
    c.stepper = Stepper::PredictorCorrector;
  else if (o.stepper == "cnab")
    c.stepper = Stepper::CNAB;
  else
    throw UsageError("--stepper must be pc or cnab");
  return c;
}

int cmd_ground_state(const Options& o) {
  if (o.dims.empty()) throw UsageError("--dim is required");
  const fs::path dir = fs::path(o.out) / "ground_state";
  fs::create_directories(dir);
  Table constants;
  constants.header = {"dim", "power", "mass", "nc", "m_const", "nu0", "c_nu", "residual"};
  constants.columns.resize(constants.header.size());
  int status = 0;
  for (int d : o.dims) {
    GroundStateOptions opts;
    opts.power = o.power;
    try {
      const auto prof = compute_ground_state(d, opts, o.profile_nodes, o.domain_length);
      export_profile(prof, (dir / ("profile_d" + std::to_string(d))).string());
      const double row[] = {double(d), prof.power, prof.mass, prof.nc, prof.m_const, prof.nu0, prof.c_nu,
                            prof.report.scaled_residual};
      for (std::size_t j = 0; j < constants.columns.size(); ++j) constants.columns[j].push_back(row[j]);
      std::printf("d=%d  mass %.10g  nu0 %.6g  c_nu %.6g\n", d, prof.mass, prof.nu0, prof.c_nu);
      if (d == 1 && std::abs(prof.power - 5.0) < 1e-14)
        std::printf("d=1  sup |Q - 3^(1/4) sech^(1/2)(2r)| = %.3e\n", explicit_profile_error(prof));
      if (o.check_weighted) std::printf("d=%d  sup |Q - P e^-r| = %.3e\n", d, weighted_profile_gap(prof));
    } catch (const SolverError& e) {
      std::fprintf(stderr, "d=%d: %s (residual %.3e)\n", d, e.what(), e.residual);
      status = kFail;
    }
  }
  write_csv(dir / "constants.csv", constants);
  return status;
}

int cmd_simulate(const Options& o) {
  auto cfg = nls_config(o);
  if (cfg.amplitude <= 0) cfg.amplitude = tabulated_amplitude(cfg.dim);
  const fs::path dir = fs::path(o.out) / ("sim_d" + std::to_string(cfg.dim));
  note(o, "simulating d=" + std::to_string(cfg.dim) + " into " + dir.string());
  long last = 0;
  const auto trace = run_until(cfg, [&](const RescaledField& s) {
    if (!o.quiet && s.step - last >= 20000) {
      last = s.step;
      std::fprintf(stderr, "  step %ld  tau %.1f  1/L %.3e\n", s.step, s.tau, std::exp(-s.log_l));
    }
  });
  export_trace(trace, dir.string());
  std::printf("d=%d  steps %ld  final 1/L %.3e  max|v| drift %.3e  T %.17g\n", cfg.dim, trace.steps,
              std::exp(-trace.final_log_l), trace.max_norm_error, trace.blowup_time);
  for (const auto& w : trace.warnings) std::printf("warning: %s\n", w.c_str());
  return trace.stopped_on_focusing ? 0 : kFail;
}

int cmd_fit(const Options& o) {
  const fs::path dir = o.trace.empty() ? fs::path(o.out) / ("sim_d" + std::to_string(o.dim)) : fs::path(o.trace);
  const fs::path file = fs::is_directory(dir) ? dir / "checkpoints.csv" : dir;
  if (!fs::exists(file)) throw UsageError("no checkpoints at " + file.string() + " (run simulate first)");
  const auto pts = rate_points(read_csv(file));
  if (pts.size() < 3) throw UsageError("trace " + file.string() + " has fewer than 3 usable checkpoints");
  std::vector<CorrectionForm> forms;
  for (const auto& f : o.forms) forms.push_back(parse_form(f));
  if (forms.empty()) forms = default_catalogue();
  const auto rep = fitting_report(pts, forms);
  export_report(rep, (file.parent_path() / "fit").string());
  for (const auto& f : rep.forms) {
    std::printf("%-8s", f.form.label().c_str());
    for (const auto& r : f.rows) std::printf(" %.4f", r.rho);
    std::printf("  | eps %.3e  drift %.3e\n", f.eps_window, f.drift);
  }
  std::printf("slope %.5f\n", rate_slope(pts));
  std::printf("most stable: %s\n", rep.most_stable.c_str());
  for (const auto& w : rep.warnings) std::printf("warning: %s\n", w.c_str());
  return 0;
}

int cmd_reduced(const Options& o) {
  ReducedConfig cfg;
  cfg.b0 = o.b0;
  if (o.start == "zero")
    cfg.start = ReducedStart::Zero;
  else if (o.start == "adiabatic")
    cfg.start = ReducedStart::Adiabatic;
  else
    throw UsageError("--start must be zero or adiabatic");
  cfg.c_nu = o.c_nu > 0 ? o.c_nu : cached_ground_state(o.dim, o.profile_nodes, o.domain_length).c_nu;
  cfg.stop_log_l = std::log(o.reduced_stop);
  cfg.tau_max = o.tau_max;
  const auto tr = integrate_reduced(cfg);
  const fs::path dir = fs::path(o.out) / "reduced";
  export_reduced(tr, (dir / "reduced.csv").string());
  Json j{{"b0", cfg.b0}, {"c_nu", cfg.c_nu}, {"start", o.start}, {"a_start", tr.a_start},
         {"sign_changes", tr.sign_changes}, {"stop_reason", tr.stop_reason}, {"samples", tr.samples.size()}};
  if (!tr.samples.empty()) {
    j["final_tau"] = tr.samples.back().tau;
    j["final_lnL"] = tr.samples.back().log_l;
    j["final_b"] = tr.samples.back().b;
  }
  write_json(dir / "reduced.json", j);
  std::printf("c_nu %.6g  steps %zu  stop: %s  final ln L %.6g\n", cfg.c_nu, tr.samples.size(),
              tr.stop_reason.c_str(), tr.samples.empty() ? 0.0 : tr.samples.back().log_l);
  return 0;
}

int cmd_spectral(const Options& o) {
  std::vector<int> dims = o.dims;
  if (dims.empty())
    for (int d = 5; d <= 12; ++d) dims.push_back(d);
  const fs::path dir = fs::path(o.out) / "spectral";
  int status = 0;
  for (int d : dims) {
    try {
      note(o, "analyzing d=" + std::to_string(d));
      const auto rep = analyze_dimension(cached_ground_state(d, o.profile_nodes, o.domain_length), o.jobs);
      export_spectral(rep, dir.string());
      std::printf("d=%d  property 1: %s  property 2: %s\n", d, to_string(rep.verdict.property1.verdict).c_str(),
                  to_string(rep.verdict.property2.verdict).c_str());
      for (const auto& c : rep.channels)
        std::printf("    %s^(%d)  index %d  fd %d\n", to_string(c.ivp.op).c_str(), c.ivp.harmonic, c.ivp.zero_count,
                    c.fd.negative_count);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "d=%d: %s\n", d, e.what());
      status = kFail;
    }
  }
  return status;
}

int cmd_report(const Options& o) {
  ReportContext ctx;
  ctx.out = o.out;
  ctx.dims = o.dims;
  ctx.workers = o.jobs;
  ctx.amplitude = o.amp;
  ctx.nls = nls_config(o);
  ctx.profile_nodes = o.profile_nodes;
  ctx.domain_length = o.domain_length;
  if (!o.quiet) ctx.log = [](const std::string& m) { std::cerr << m << std::endl; };
  const auto names = report_names();
  for (const auto& t : o.tables)
    if (std::find(names.begin(), names.end(), t) == names.end()) throw UsageError("unknown table: " + t);
  bool ok = true;
  for (const auto& t : o.tables) {
    const auto rep = run_report(t, ctx);
    export_report_result(rep, fs::path(o.out) / "report");
    std::fputs(format_report(rep).c_str(), stdout);
    ok = ok && rep.pass();
  }
  return ok ? 0 : kFail;
}

void simulation_flags(CLI::App* s, Options& o) {
  s->add_option("--amp", o.amp, "initial amplitude A0 (0: tabulated value)");
  s->add_option("--nodes", o.nodes, "Chebyshev degree of the simulation grid")->capture_default_str();
  s->add_option("--kappa", o.kappa, "rational map scale")->capture_default_str();
  s->add_option("--dtau", o.dtau, "rescaled time step")->capture_default_str();
  s->add_option("--stop-focusing", o.stop_focusing, "stop once L drops below this")->capture_default_str();
  s->add_option("--max-tau", o.max_tau, "stop at this rescaled time")->capture_default_str();
  s->add_option("--normalization", o.normalization, "max or gradient")->capture_default_str();
  s->add_option("--stepper", o.stepper, "pc or cnab")->capture_default_str();
}

void profile_flags(CLI::App* s, Options& o) {
  s->add_option("--profile-nodes", o.profile_nodes, "Chebyshev degree of the ground-state grid")->capture_default_str();
  s->add_option("--domain-length", o.domain_length, "ground-state domain [0, L]")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for L2-critical NLS blow-up"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file with any of the flags");
  Options o;
  app.add_option("--out", o.out, "output directory")->envname("BLOWUP_OUT")->capture_default_str();
  app.add_option("--jobs", o.jobs, "worker threads (0: all cores)")->capture_default_str();
  app.add_flag("--quiet", o.quiet, "no progress messages");

  auto* gs = app.add_subcommand("ground-state", "solve for Q and write profiles and constants");
  gs->add_option("--dim", o.dims, "dimensions")->delimiter(',')->required();
  gs->add_option("--nodes", o.profile_nodes, "Chebyshev degree")->capture_default_str();
  gs->add_option("--domain-length", o.domain_length, "domain [0, L]")->capture_default_str();
  gs->add_option("--power", o.power, "nonlinearity exponent (0: 1 + 4/d)");
  gs->add_flag("--check-weighted", o.check_weighted, "compare with a direct solve for Q");

  auto* sim = app.add_subcommand("simulate", "run the rescaled equation to a focusing level");
  sim->add_option("--dim", o.dim, "dimension")->required();
  simulation_flags(sim, o);

  auto* fit = app.add_subcommand("fit", "local-exponent tables for a simulation");
  fit->add_option("--trace", o.trace, "simulation directory or checkpoints CSV");
  fit->add_option("--dim", o.dim, "dimension (locates <out>/sim_d<dim> when --trace is absent)");
  fit->add_option("--forms", o.forms, "correction forms: 1, a power such as 0.25, or loglog");

  auto* red = app.add_subcommand("reduced", "integrate the reduced system");
  red->add_option("--b0", o.b0, "initial b")->capture_default_str();
  red->add_option("--start", o.start, "initial a: zero or adiabatic")->capture_default_str();
  red->add_option("--dim", o.dim, "dimension supplying c_nu")->capture_default_str();
  red->add_option("--c-nu", o.c_nu, "override c_nu");
  red->add_option("--stop-focusing", o.reduced_stop, "stop once L drops below this")->capture_default_str();
  red->add_option("--tau-max", o.tau_max, "stop at this time")->capture_default_str();
  profile_flags(red, o);

  auto* spec = app.add_subcommand("spectral", "indices, forms and verdicts per dimension");
  spec->add_option("--dim", o.dims, "dimensions (default 5..12)")->delimiter(',');
  profile_flags(spec, o);

  auto* rep = app.add_subcommand("report", "regenerate named tables and compare with stored values");
  rep->add_option("table", o.tables, "table names; see --list")->required();
  rep->add_option("--dim", o.dims, "restrict to these dimensions")->delimiter(',');
  simulation_flags(rep, o);
  profile_flags(rep, o);
  auto* list = app.add_subcommand("list-tables", "print the table names known to report");

  std::vector<std::string> args(argv, argv + argc);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }
  if (o.jobs == 0) o.jobs = std::max(1u, std::thread::hardware_concurrency());

  try {
    if (list->parsed()) {
      for (const auto& n : report_names()) std::puts(n.c_str());
      return 0;
    }
    if (fit->parsed() && o.trace.empty() && fit->count("--dim") == 0) throw UsageError("fit needs --trace or --dim");
    for (auto* sub : app.get_subcommands()) manifest(app, *sub, o, args);
    if (gs->parsed()) return cmd_ground_state(o);
    if (sim->parsed()) return cmd_simulate(o);
    if (fit->parsed()) return cmd_fit(o);
    if (red->parsed()) return cmd_reduced(o);
    if (spec->parsed()) return cmd_spectral(o);
    if (rep->parsed()) return cmd_report(o);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFail;
  }
  return kUsage;
}
