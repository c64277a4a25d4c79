#pragma once

// Regeneration of the reference tables by name, with a pass/fail line for
// each stored value. Simulation-backed tables reuse runs cached under
// <out>/sim_d<d> when their configuration matches.

#include "blowup/ground_state.hpp"
#include "blowup/io.hpp"
#include "blowup/rate_fitting.hpp"
#include "blowup/rescaled_nls.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace blowup {

struct ReportContext {
  std::filesystem::path out = "out";
  std::vector<int> dims;            // empty: the table's own dimension range
  unsigned workers = 1;
  double amplitude = 0.0;           // 0: the tabulated amplitude for each d
  NlsConfig nls;                    // nodes, kappa, dtau, stop_focusing
  std::size_t profile_nodes = 1024;
  double domain_length = 100.0;
  std::function<void(const std::string&)> log;
};

struct ReportLine {
  std::string item;
  int dim = 0;
  double actual = 0.0;
  std::string actual_text;  // for non-numeric items
  std::string expected;
  double allowed = 0.0;
  std::string rule;
  bool pass = false;
};

struct ReportResult {
  std::string table;
  std::string title;
  std::vector<ReportLine> lines;
  bool pass() const;
};

std::vector<std::string> report_names();

// Throws std::invalid_argument for an unknown name.
ReportResult run_report(const std::string& name, const ReportContext& ctx);

// <dir>/<table>.csv and <dir>/<table>.json
void export_report_result(const ReportResult& rep, const std::filesystem::path& dir);
std::string format_report(const ReportResult& rep);

// Ground state on the context's interval grid, computed once per dimension.
const GroundStateProfile& cached_ground_state(int dim, std::size_t nodes = 1024, double length = 100.0);

struct SimulationSummary {
  int dim = 0;
  double amplitude = 0.0;
  double max_norm_error = 0.0;
  double slope = 0.0;
  double profile_error = 0.0;
  double profile_core = 0.0;
  std::vector<RatePoint> checkpoints;
  std::filesystem::path dir;
};

// Reads <dir>/run.json, trace.csv, checkpoints.csv, snapshot_final.csv.
// Throws std::runtime_error if the run is missing or has no checkpoints.
SimulationSummary summarize_run(const std::filesystem::path& dir);

// Runs (or reuses) the simulation for d with the context's settings.
SimulationSummary load_or_simulate(int dim, const ReportContext& ctx);

// Amplitude used for d when none is given.
double tabulated_amplitude(int dim);

}  // namespace blowup
