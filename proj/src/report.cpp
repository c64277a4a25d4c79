#include "blowup/report.hpp"

#include "blowup/golden.hpp"
#include "blowup/pool.hpp"
#include "blowup/spectral_property.hpp"
#include "blowup/verdict.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace blowup {

namespace fs = std::filesystem;

bool ReportResult::pass() const {
  return !lines.empty() && std::all_of(lines.begin(), lines.end(), [](const ReportLine& l) { return l.pass; });
}

namespace {

double tol(const char* key) { return golden_data().at("tolerance").at(key).get<double>(); }

const Json& gold(const char* key) { return golden_data().at(key); }

std::string text(const Json& j) { return j.is_string() ? j.get<std::string>() : j.dump(); }

std::string num(double v, int digits = 6) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

ReportLine printed(const std::string& item, int dim, double actual, const std::string& expected, double rel) {
  const auto c = compare_printed(actual, expected, rel);
  ReportLine l{item, dim, actual, "", expected, c.allowed, "", c.pass};
  l.rule = rel > 0 ? "rel " + num(rel, 3) + " or printed digits" : "printed digits";
  return l;
}

ReportLine absolute(const std::string& item, int dim, double actual, const std::string& expected, double tol_abs) {
  const double e = parse_printed(expected).value;
  return {item, dim, actual, "", expected, tol_abs, "abs " + num(tol_abs, 3),
          std::isfinite(actual) && std::abs(actual - e) <= tol_abs};
}

ReportLine upper(const std::string& item, int dim, double actual, double limit, const std::string& reference) {
  return {item, dim, actual, "", reference, limit, "<= " + num(limit, 3), std::isfinite(actual) && actual <= limit};
}

ReportLine flag(const std::string& item, int dim, bool ok, const std::string& actual, const std::string& expected) {
  ReportLine l{item, dim, NAN, actual, expected, 0.0, "exact", ok};
  return l;
}

ReportLine failure(const std::string& item, int dim, const std::string& what) {
  return {item, dim, NAN, "error: " + what, "", 0.0, "", false};
}

std::vector<int> pick(const ReportContext& ctx, std::vector<int> defaults) {
  if (ctx.dims.empty()) return defaults;
  std::vector<int> out;
  for (int d : ctx.dims)
    if (std::find(defaults.begin(), defaults.end(), d) != defaults.end()) out.push_back(d);
  return out;
}

std::vector<int> range(int lo, int hi) {
  std::vector<int> v;
  for (int d = lo; d <= hi; ++d) v.push_back(d);
  return v;
}

void say(const ReportContext& ctx, const std::string& msg) {
  if (ctx.log) ctx.log(msg);
}

// Runs fn(d) for each dimension on the pool and concatenates the lines in order.
template <class Fn>
std::vector<ReportLine> per_dim(const ReportContext& ctx, const std::vector<int>& dims, Fn fn) {
  std::vector<std::vector<ReportLine>> parts(dims.size());
  parallel_for(dims.size(), ctx.workers, [&](std::size_t i) {
    try {
      parts[i] = fn(dims[i]);
    } catch (const std::exception& e) {
      parts[i] = {failure("computation", dims[i], e.what())};
    }
  });
  std::vector<ReportLine> out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

const GroundStateProfile& profile(const ReportContext& ctx, int d) {
  return cached_ground_state(d, ctx.profile_nodes, ctx.domain_length);
}

std::string key(int d) { return std::to_string(d); }

// Final-row and drift lines of the log-log fit for one run.
std::vector<ReportLine> loglog_final_lines(const ReportContext& ctx, int d) {
  const auto sim = load_or_simulate(d, ctx);
  const auto rep = fitting_report(sim.checkpoints);
  std::vector<ReportLine> out;
  for (const auto& f : rep.forms) {
    if (f.form.kind != CorrectionForm::Kind::LogLog || f.rows.empty()) continue;
    out.push_back(absolute("loglog rho, final row i=" + std::to_string(f.rows.back().i), d, f.rows.back().rho,
                           text(gold("loglog_rho_final").at(key(d))), tol("rho_abs_final")));
  }
  out.push_back(flag("smallest drift over last rows", d, rep.most_stable == "loglog", rep.most_stable, "loglog"));
  return out;
}

std::vector<ReportLine> form_lines(const char* table, const FormMatrix& m, const Json& g, int d) {
  const double rel = tier_tolerance(d);
  const bool is_k = std::string(table) == "K";
  const std::string a = is_k ? "K" : "J";
  std::vector<ReportLine> out;
  out.push_back(printed(a + "11", d, m.m11, text(g.at(a + "11")), rel));
  out.push_back(printed(a + "12", d, m.m12, text(g.at(a + "12")), rel));
  out.push_back(printed(a + "22", d, m.m22, text(g.at(a + "22")), rel));
  out.push_back(printed(a + a, d, m.det(), text(g.at(a + a)), rel));
  out.push_back(upper("|" + a + "12/" + a + "21 - 1|", d, m.sym_residual(), rel, text(g.at("sym"))));
  return out;
}

ReportResult build(const std::string& name, const ReportContext& ctx) {
  ReportResult r;
  r.table = name;
  if (name == "table-1") {
    r.title = "ground-state mass";
    std::vector<int> dims = pick(ctx, range(4, 12));
    r.lines = per_dim(ctx, dims, [&](int d) {
      return std::vector{printed("mass", d, profile(ctx, d).mass, text(gold("mass").at(key(d))), tier_tolerance(d))};
    });
    if (ctx.dims.empty() || std::count(ctx.dims.begin(), ctx.dims.end(), 1))
      r.lines.push_back(upper("sup |Q - explicit|", 1, explicit_profile_error(profile(ctx, 1)), tol("explicit_1d"), "0"));
  } else if (name == "table-2") {
    r.title = "conservation of max |v|";
    r.lines = per_dim(ctx, pick(ctx, range(4, 12)), [&](int d) {
      const auto sim = load_or_simulate(d, ctx);
      return std::vector{upper("max|v| - min|v|", d, sim.max_norm_error, tol("conservation"),
                               text(gold("conservation").at(key(d))))};
    });
  } else if (name == "rate") {
    r.title = "rate exponent and late-time profile";
    r.lines = per_dim(ctx, pick(ctx, range(4, 12)), [&](int d) {
      const auto sim = load_or_simulate(d, ctx);
      const auto& ref = gold("slope_reference");
      const std::string expected = text(ref.contains(key(d)) ? ref.at(key(d)) : ref.at("default"));
      return std::vector{absolute("slope of ln L on ln(T-t)", d, sim.slope, expected, tol("slope_abs")),
                         upper("sup ||v| - Q_rescaled| on core", d, sim.profile_error, tol("profile_sup"), "0")};
    });
  } else if (name == "table-3") {
    r.title = "d=4 local exponents, log-log column";
    if (!pick(ctx, {4}).empty()) {
      r.lines = per_dim(ctx, {4}, [&](int d) {
        const auto sim = load_or_simulate(d, ctx);
        const auto rep = fitting_report(sim.checkpoints);
        std::vector<ReportLine> out;
        for (const auto& f : rep.forms) {
          if (f.form.kind != CorrectionForm::Kind::LogLog) continue;
          for (const auto& [row, expected] : gold("loglog_rho_d4").items()) {
            const auto i = std::stoul(row);
            if (i < f.rows.size())
              out.push_back(absolute("loglog rho i=" + row, d, f.rows[i].rho, text(expected), tol("rho_abs_d4")));
            else
              out.push_back(failure("loglog rho i=" + row, d, "run has only " + std::to_string(f.rows.size()) + " rows"));
          }
        }
        out.push_back(flag("smallest drift over last rows", d, rep.most_stable == "loglog", rep.most_stable, "loglog"));
        return out;
      });
    }
  } else if (name == "table-5") {
    r.title = "d=4 windowed discrepancy, log-log";
    if (!pick(ctx, {4}).empty()) {
      r.lines = per_dim(ctx, {4}, [&](int d) {
        const auto rep = fitting_report(load_or_simulate(d, ctx).checkpoints);
        std::vector<ReportLine> out;
        const std::string expected = text(gold("loglog_eps_window_d4"));
        const double e = parse_printed(expected).value, f = tol("eps_factor");
        for (const auto& fr : rep.forms)
          if (fr.form.kind == CorrectionForm::Kind::LogLog)
            out.push_back({"loglog eps window", d, fr.eps_window, "", expected, e * (f - 1.0),
                           "within factor " + num(f, 3), fr.eps_window >= e / f && fr.eps_window <= e * f});
        return out;
      });
    }
  } else if (name == "loglog-final" || (name.rfind("table-", 0) == 0 && name.size() == 8 && name[6] == '2' &&
                                        name[7] >= '0' && name[7] <= '6')) {
    // table-20 .. table-26 hold d = 6 .. 12
    std::vector<int> dims = range(5, 12);
    if (name != "loglog-final") dims = {6 + (name[7] - '0')};
    r.title = "final-row log-log exponent";
    r.lines = per_dim(ctx, pick(ctx, dims), [&](int d) { return loglog_final_lines(ctx, d); });
  } else if (name == "table-6") {
    r.title = "d=5 outer boundary condition comparison";
    if (!pick(ctx, {5}).empty()) {
      const auto& prof = profile(ctx, 5);
      const double rel = tol("bc_rel");
      const auto decay = bilinear_matrix(prof).j;
      const auto& jd = gold("J").at("5");
      r.lines.push_back(printed("J11 decay", 5, decay.m11, text(jd.at("J11")), rel));
      r.lines.push_back(printed("J22 decay", 5, decay.m22, text(jd.at("J22")), rel));
      try {
        BvpOptions opts;
        opts.outer = OuterCondition::Neumann;
        opts.max_condition = 1e300;
        const auto neu = bilinear_matrix(prof, opts).j;
        const auto& jn = gold("neumann_d5");
        r.lines.push_back(printed("J11 Neumann", 5, neu.m11, text(jn.at("J11")), rel));
        r.lines.push_back(printed("J12 Neumann", 5, neu.m12, text(jn.at("J12")), rel));
        r.lines.push_back(printed("J22 Neumann", 5, neu.m22, text(jn.at("J22")), rel));
        r.lines.push_back(flag("sign of J11 flips", 5, (decay.m11 > 0) != (neu.m11 > 0),
                               (decay.m11 > 0) != (neu.m11 > 0) ? "yes" : "no", "yes"));
      } catch (const std::exception& e) {
        r.lines.push_back(failure("Neumann solve", 5, e.what()));
      }
    }
  } else if (name == "table-7") {
    r.title = "positivity data at r0";
    const double r0 = gold("positivity_r0").get<double>();
    r.lines = per_dim(ctx, pick(ctx, range(5, 12)), [&](int d) {
      const auto& prof = profile(ctx, d);
      IvpOptions opts;
      opts.use_positivity = false;
      const RadialPotential v1(prof, OperatorKind::L1);
      const auto ev = positivity_criterion(count_index(v1, d, 0, OperatorKind::L1, opts), v1, d, r0);
      const double rel = tier_tolerance(d);
      std::vector<ReportLine> out;
      out.push_back(printed("u'(r0) u(r0)", d, ev.sign_product, text(gold("positivity_product").at(key(d))), rel));
      out.push_back(printed("-V1(r0) - (d-2)^2/(4 r0)", d, ev.printed_column,
                            text(gold("positivity_column").at(key(d))), rel));
      out.push_back(upper("max over r >= r0 of V+ - (d-2)^2/(4r^2)", d, ev.worst_margin, 0.0, "<= 0"));
      return out;
    });
  } else if (name == "table-8" || name == "table-9") {
    const bool k = name == "table-8";
    r.title = k ? "radial forms of L1" : "radial forms of L2";
    r.lines = per_dim(ctx, pick(ctx, range(5, 12)), [&](int d) {
      const auto f = bilinear_matrix(profile(ctx, d));
      return form_lines(k ? "K" : "J", k ? f.k : f.j, gold(k ? "K" : "J").at(key(d)), d);
    });
  } else if (name == "table-10") {
    r.title = "<L2 Z, Z> with L2 Z = Q";
    r.lines = per_dim(ctx, pick(ctx, range(3, 12)), [&](int d) {
      return std::vector{printed("<L2 Z, Z>", d, property2_form(profile(ctx, d)), text(gold("l2z").at(key(d))),
                                 tier_tolerance(d))};
    });
  } else if (name == "table-11" || name == "table-12" || name == "table-13") {
    const char* field = name == "table-11" ? "K11_1" : name == "table-12" ? "J11_1" : "K11_2";
    r.title = std::string("first-harmonic forms, ") + field;
    std::vector<int> dims;
    for (const auto& [d, v] : gold(field).items()) dims.push_back(std::stoi(d));
    std::sort(dims.begin(), dims.end());
    r.lines = per_dim(ctx, pick(ctx, dims), [&](int d) {
      const auto h = harmonic_forms(profile(ctx, d), name == "table-13");
      const double actual = name == "table-11" ? h.k11_1 : name == "table-12" ? h.j11_1 : h.k11_2.value_or(NAN);
      return std::vector{printed(field, d, actual, text(gold(field).at(key(d))), tier_tolerance(d))};
    });
  } else if (name == "table-18") {
    r.title = "direct versus weighted ground state";
    r.lines = per_dim(ctx, pick(ctx, range(5, 9)), [&](int d) {
      const auto& prof = profile(ctx, d);
      std::vector<ReportLine> out{upper("sup |Q - P e^-r|", d, weighted_profile_gap(prof), tol("weighted_gap"),
                                        text(gold("weighted_profile_gap").at(key(d))))};
      if (d == 8) {
        const bool mono = monotone_beyond(prof, prof.v2_vals, 40.0);
        out.push_back(flag("V2 monotone for r >= 40", d, mono, mono ? "yes" : "no", "yes"));
      }
      return out;
    });
  } else if (name == "table-19") {
    r.title = "cubic d=3 cross-check";
    if (!pick(ctx, {3}).empty()) {
      const auto c = supercritical_crosscheck(ctx.profile_nodes, ctx.domain_length);
      r.lines.push_back(printed("K11", 3, c.k11, text(gold("cubic_d3").at("K11")), 0.0));
      r.lines.push_back(printed("J11", 3, c.j11, text(gold("cubic_d3").at("J11")), 0.0));
    }
  } else if (name == "indices") {
    r.title = "indices by channel and finite-difference counts";
    r.lines = per_dim(ctx, pick(ctx, range(5, 12)), [&](int d) {
      const auto& prof = profile(ctx, d);
      const auto& idx = gold("indices").contains(key(d)) ? gold("indices").at(key(d)) : gold("indices").at("default");
      std::vector<ReportLine> out;
      for (const auto op : {OperatorKind::L1, OperatorKind::L2}) {
        const auto& list = idx.at(to_string(op));
        for (std::size_t k = 0; k < list.size(); ++k) {
          const int expected = list[k].get<int>();
          const auto ivp = count_index(prof, int(k), op);
          const auto fd = fd_spectrum(RadialPotential(prof, op), d, int(k));
          const std::string ch = to_string(op) + "^(" + std::to_string(k) + ")";
          out.push_back(flag("ind " + ch, d, ivp.zero_count == expected, std::to_string(ivp.zero_count),
                             std::to_string(expected)));
          out.push_back(flag("FD count " + ch, d, fd.negative_count == ivp.zero_count,
                             std::to_string(fd.negative_count), std::to_string(ivp.zero_count)));
          if (op == OperatorKind::L2 && k == 1 && gold("fd_lowest_L2_k1").contains(key(d)))
            out.push_back(printed("lowest eigenvalue " + ch, d, fd.lowest, text(gold("fd_lowest_L2_k1").at(key(d))),
                                  tol("fd_lowest_rel")));
        }
      }
      return out;
    });
  } else if (name == "verdicts") {
    r.title = "spectral property verdicts";
    const std::vector<int> dims = pick(ctx, range(5, 12));
    for (int d : dims) {
      try {
        say(ctx, "analyzing d=" + std::to_string(d));
        const auto rep = analyze_dimension(profile(ctx, d), ctx.workers);
        export_spectral(rep, (ctx.out / "spectral").string());
        const std::string expected = text(gold("verdict").at(key(d)));
        const auto p1 = to_string(rep.verdict.property1.verdict), p2 = to_string(rep.verdict.property2.verdict);
        r.lines.push_back(flag("property 1", d, p1 == expected, p1, expected));
        r.lines.push_back(flag("property 2", d, p2 == expected, p2, expected));
      } catch (const std::exception& e) {
        r.lines.push_back(failure("analysis", d, e.what()));
      }
    }
  } else {
    throw std::invalid_argument("unknown table: " + name);
  }
  return r;
}

}  // namespace

std::vector<std::string> report_names() {
  std::vector<std::string> names{"table-1",  "table-2",  "table-3",  "table-5",  "table-6",  "table-7",
                                 "table-8",  "table-9",  "table-10", "table-11", "table-12", "table-13",
                                 "table-18", "table-19"};
  for (int i = 20; i <= 26; ++i) names.push_back("table-" + std::to_string(i));
  for (const char* extra : {"loglog-final", "rate", "indices", "verdicts"}) names.emplace_back(extra);
  return names;
}

ReportResult run_report(const std::string& name, const ReportContext& ctx) {
  const auto names = report_names();
  if (std::find(names.begin(), names.end(), name) == names.end())
    throw std::invalid_argument("unknown table: " + name);
  return build(name, ctx);
}

std::string format_report(const ReportResult& rep) {
  std::ostringstream os;
  os << rep.table << ": " << rep.title << "\n";
  for (const auto& l : rep.lines) {
    os << (l.pass ? "  PASS " : "  FAIL ") << "d=" << l.dim << "  " << l.item << "  actual="
       << (l.actual_text.empty() ? num(l.actual, 10) : l.actual_text);
    if (!l.expected.empty()) os << "  expected=" << l.expected;
    if (!l.rule.empty()) os << "  [" << l.rule << (l.allowed > 0 ? ", allowed " + num(l.allowed, 3) : "") << "]";
    os << "\n";
  }
  os << rep.table << (rep.pass() ? " PASS" : " FAIL") << "\n";
  return os.str();
}

void export_report_result(const ReportResult& rep, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream csv(dir / (rep.table + ".csv"));
  csv.precision(17);
  csv << "dim,item,actual,expected,allowed,rule,pass\n";
  Json j;
  j["table"] = rep.table;
  j["title"] = rep.title;
  j["pass"] = rep.pass();
  for (const auto& l : rep.lines) {
    const std::string actual = l.actual_text.empty() ? num(l.actual, 17) : l.actual_text;
    csv << l.dim << ",\"" << l.item << "\"," << actual << "," << l.expected << "," << l.allowed << ",\"" << l.rule
        << "\"," << (l.pass ? 1 : 0) << "\n";
    Json row{{"dim", l.dim}, {"item", l.item}, {"expected", l.expected}, {"allowed", l.allowed},
             {"rule", l.rule}, {"pass", l.pass}};
    if (l.actual_text.empty())
      row["actual"] = std::isfinite(l.actual) ? Json(l.actual) : Json(nullptr);
    else
      row["actual"] = l.actual_text;
    j["lines"].push_back(row);
  }
  write_json(dir / (rep.table + ".json"), j);
}

const GroundStateProfile& cached_ground_state(int dim, std::size_t nodes, double length) {
  struct Entry {
    std::once_flag once;
    GroundStateProfile prof;
  };
  static std::mutex mutex;
  static std::map<std::tuple<int, std::size_t, double>, std::unique_ptr<Entry>> cache;
  Entry* e;
  {
    std::lock_guard lock(mutex);
    auto& slot = cache[{dim, nodes, length}];
    if (!slot) slot = std::make_unique<Entry>();
    e = slot.get();
  }
  std::call_once(e->once, [&] { e->prof = compute_ground_state(dim, {}, nodes, length); });
  return e->prof;
}

double tabulated_amplitude(int dim) {
  const auto& a = gold("amplitude");
  if (!a.contains(key(dim))) throw std::invalid_argument("no tabulated amplitude for d=" + key(dim));
  return a.at(key(dim)).get<double>();
}

SimulationSummary summarize_run(const fs::path& dir) {
  if (!fs::exists(dir / "run.json") || !fs::exists(dir / "checkpoints.csv"))
    throw std::runtime_error("no simulation output in " + dir.string());
  const auto run = read_json(dir / "run.json");
  SimulationSummary s;
  s.dir = dir;
  s.dim = run.at("dim").get<int>();
  s.amplitude = run.at("amplitude").get<double>();
  s.max_norm_error = run.at("max_norm_error").get<double>();
  s.checkpoints = rate_points(read_csv(dir / "checkpoints.csv"));
  if (s.checkpoints.size() < 2) throw std::runtime_error("fewer than two checkpoints in " + dir.string());
  s.slope = rate_slope(rate_points(read_csv(dir / "trace.csv")));
  if (fs::exists(dir / "snapshot_final.csv")) {
    const auto snap = read_csv(dir / "snapshot_final.csv");
    const auto& xi = snap.column("xi");
    const auto& mod = snap.column("abs");
    const auto dev = profile_deviation(cached_ground_state(s.dim), Eigen::Map<const Vec>(xi.data(), Eigen::Index(xi.size())),
                                       Eigen::Map<const Vec>(mod.data(), Eigen::Index(mod.size())));
    s.profile_error = dev.sup_error;
    s.profile_core = dev.core_radius;
  } else {
    s.profile_error = NAN;
  }
  return s;
}

SimulationSummary load_or_simulate(int dim, const ReportContext& ctx) {
  NlsConfig cfg = ctx.nls;
  cfg.dim = dim;
  cfg.amplitude = ctx.amplitude > 0 ? ctx.amplitude : tabulated_amplitude(dim);
  const fs::path dir = ctx.out / ("sim_d" + std::to_string(dim));
  if (fs::exists(dir / "run.json")) {
    const auto run = read_json(dir / "run.json");
    const bool same = run.value("dim", 0) == cfg.dim && run.value("amplitude", 0.0) == cfg.amplitude &&
                      run.value("nodes", std::size_t(0)) == cfg.nodes && run.value("kappa", 0.0) == cfg.kappa &&
                      run.value("dtau", 0.0) == cfg.dtau && run.value("stop_focusing", 0.0) == cfg.stop_focusing &&
                      run.value("normalization", std::string()) == to_string(cfg.normalization) &&
                      run.value("stepper", std::string()) == to_string(cfg.stepper);
    if (same) {
      say(ctx, "reusing " + dir.string());
      return summarize_run(dir);
    }
  }
  say(ctx, "simulating d=" + std::to_string(dim) + " into " + dir.string());
  export_trace(run_until(cfg), dir.string());
  return summarize_run(dir);
}

}  // namespace blowup
