#include "blowup/rescaled_nls.hpp"

#include "blowup/io.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <limits>
#include <span>
#include <sstream>

namespace blowup {

namespace {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};

// out = A v for real A and complex v, with A supplied transposed.
CVec apply_real(const Mat& a_t, const CVec& v) {
  const auto n = v.size();
  CVec out(n);
  Eigen::Map<const Mat> vin(reinterpret_cast<const double*>(v.data()), 2, n);
  Eigen::Map<Mat> vout(reinterpret_cast<double*>(out.data()), 2, n);
  vout.noalias() = vin * a_t;
  return out;
}

double max_abs(const CVec& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace

std::string to_string(Normalization n) {
  return n == Normalization::MaxNorm ? "max-norm" : "gradient-norm";
}

std::string to_string(Stepper s) { return s == Stepper::CNAB ? "cnab" : "predictor-corrector"; }

std::vector<double> default_checkpoint_levels() {
  return {1e4, 3e5, 7e6, 1e8, 2e9, 4e10, 6e11, 8e12, 1e14, 1e15, 2e16};
}

double gaussian_mass(int dim, double amplitude) {
  const double h = 0.5 * dim;
  return amplitude * amplitude * std::tgamma(h) * std::pow(h, h) / 2.0;
}

InitialDatum gaussian_datum(const ChebyshevGrid& grid, int dim, double amplitude) {
  if (!(amplitude > 0)) throw std::invalid_argument("amplitude must be positive");
  const double sigma = 2.0 / dim;
  // L(0) = A0^{-sigma} makes v0(0) = L0^{1/sigma} u0(0) = 1.
  const double log_l0 = -sigma * std::log(amplitude);
  const double l0_sq = std::exp(2.0 * log_l0);
  InitialDatum out;
  out.v = CVec(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    out.v(i) = std::exp(-l0_sq * grid.xi(i) * grid.xi(i) / dim);
  out.log_l0 = log_l0;
  out.u0_mass = gaussian_mass(dim, amplitude);
  return out;
}

RescaledSolver::RescaledSolver(const NlsConfig& cfg) : cfg_(cfg) {
  if (cfg.dim < 1 || cfg.dim > 12) throw std::invalid_argument("dimension must be in 1..12");
  if (!(cfg.dtau > 0)) throw std::invalid_argument("dtau must be positive");
  grid_ = build_grid(cfg.nodes, cfg.kappa, true);
  const Mat lap = radial_laplacian(grid_, cfg.dim).matrix;
  lap_t_ = lap.transpose();
  d1_t_ = grid_.d1.transpose();
  lap_row0_ = lap.row(0).transpose();

  CMat m = 0.5 * lap.cast<cd>();
  m.diagonal().array() += kI / cfg.dtau;
  m.row(0) = grid_.d1.row(0).cast<cd>();
  m_inv_ = m.partialPivLu().inverse();

  state_.dim = cfg.dim;
  state_.sigma = 2.0 / cfg.dim;
  state_.dtau = cfg.dtau;
  const auto datum = gaussian_datum(grid_, cfg.dim, cfg.amplitude);
  state_.log_l = datum.log_l0;
  if (cfg.ground_mass > 0 && datum.u0_mass <= cfg.ground_mass * (1.0 + 1e-9)) {
    state_.below_threshold = true;
    state_.warnings.push_back("global-existence regime expected: mass of u0 does not exceed mass of Q");
  }
  reset(datum.v);
}

void RescaledSolver::reset(const CVec& v) {
  state_.v = v;
  v0_origin_sq_ = std::norm(v(0));
  const CVec dv = apply_real(d1_t_, v);
  Vec g(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) g(i) = std::norm(dv(i));
  grad_norm0_ = weighted_quadrature(grid_, g, cfg_.dim);
  lap_cur_ = laplacian(v);
  state_.a = rate(v);
  n_cur_ = nonlinear(v, state_.a);
  have_prev_ = false;
}

CVec RescaledSolver::laplacian(const CVec& v) const { return apply_real(lap_t_, v); }

CVec RescaledSolver::nonlinear(const CVec& v, double a) const {
  const double sigma = state_.sigma;
  const CVec dv = apply_real(d1_t_, v);
  CVec out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mod = std::abs(v(i));
    out(i) = kI * a * (grid_.xi(i) * dv(i) + v(i) / sigma) + std::pow(mod, 2.0 * sigma) * v(i);
  }
  return out;
}

double RescaledSolver::rate_max_norm(const CVec& v) const {
  const cd lap0 = lap_row0_.cast<cd>().dot(v);  // dot conjugates the first argument (real here)
  return -state_.sigma * std::imag(std::conj(v(0)) * lap0) / v0_origin_sq_;
}

double RescaledSolver::rate_gradient(const CVec& v) const {
  // a = -(2 / (p ||grad v0||^2)) Im int |v|^{2 sigma} conj(v) Lap v xi^{d-1},  p = 2 + 2/sigma - d
  const double sigma = state_.sigma;
  const double p = 2.0 + 2.0 / sigma - cfg_.dim;
  const CVec lap = laplacian(v);
  Vec f(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    f(i) = std::pow(std::abs(v(i)), 2.0 * sigma) * std::imag(std::conj(v(i)) * lap(i));
  return -2.0 / (p * grad_norm0_) * weighted_quadrature(grid_, f, cfg_.dim);
}

double RescaledSolver::rate(const CVec& v) const {
  return cfg_.normalization == Normalization::MaxNorm ? rate_max_norm(v) : rate_gradient(v);
}

double RescaledSolver::mass(const CVec& v) const {
  return weighted_quadrature(grid_, v.cwiseAbs2(), cfg_.dim);
}

double RescaledSolver::energy(const CVec& v) const {
  const double sigma = state_.sigma;
  const CVec dv = apply_real(d1_t_, v);
  Vec f(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    f(i) = 0.5 * std::norm(dv(i)) - std::pow(std::abs(v(i)), 2.0 * sigma + 2.0) / (2.0 * sigma + 2.0);
  return weighted_quadrature(grid_, f, cfg_.dim);
}

CVec RescaledSolver::solve_m(CVec rhs) const {
  rhs(0) = 0.0;
  return m_inv_ * rhs;
}

CVec RescaledSolver::explicit_part(const CVec& v, const CVec& lap_v) const {
  return (kI / cfg_.dtau) * v - 0.5 * lap_v;
}

void RescaledSolver::step() {
  const CVec base = explicit_part(state_.v, lap_cur_);
  CVec next;
  if (!have_prev_ || cfg_.stepper == Stepper::PredictorCorrector) {
    // Predictor: AB2 extrapolation, or a forward step on the very first call.
    const CVec n_pred_src = have_prev_ ? CVec(3.0 * n_cur_ - n_prev_) : CVec(2.0 * n_cur_);
    const CVec pred = solve_m(base - 0.5 * n_pred_src);
    const CVec n_pred = nonlinear(pred, rate(pred));
    next = solve_m(base - 0.5 * (n_pred + n_cur_));
  } else {
    next = solve_m(base - 0.5 * (3.0 * n_cur_ - n_prev_));
  }

  const double norm = max_abs(next);
  if (!std::isfinite(norm)) throw NlsError("non-finite field", state_.step + 1);
  if (cfg_.normalization == Normalization::MaxNorm) {
    if (std::abs(norm - std::sqrt(v0_origin_sq_)) > cfg_.max_norm_drift)
      throw NlsError("max-norm drift beyond threshold", state_.step + 1);
  } else if (norm > 1e3 * std::sqrt(v0_origin_sq_)) {
    throw NlsError("field growth beyond threshold", state_.step + 1);
  }

  const double a_old = state_.a;
  n_prev_ = std::move(n_cur_);
  have_prev_ = true;
  state_.v = std::move(next);
  lap_cur_ = laplacian(state_.v);
  state_.a = rate(state_.v);
  n_cur_ = nonlinear(state_.v, state_.a);
  state_.log_l -= 0.5 * cfg_.dtau * (a_old + state_.a);
  state_.tau += cfg_.dtau;
  ++state_.step;
}

void RescaledSolver::step_linear() {
  state_.v = solve_m(explicit_part(state_.v, lap_cur_));
  lap_cur_ = laplacian(state_.v);
  state_.tau += cfg_.dtau;
  ++state_.step;
}

SimulationTrace run_until(const NlsConfig& cfg, const std::function<void(const RescaledField&)>& progress) {
  RescaledSolver solver(cfg);
  SimulationTrace trace;
  trace.config = cfg;
  trace.xi = solver.grid().xi;
  trace.warnings = solver.state().warnings;

  std::vector<double> levels = cfg.checkpoint_levels.empty() ? default_checkpoint_levels() : cfg.checkpoint_levels;
  std::sort(levels.begin(), levels.end());
  std::vector<double> snaps = cfg.snapshot_taus;
  std::sort(snaps.begin(), snaps.end());
  std::size_t next_level = 0;
  std::size_t next_snap = 0;

  // dt of every step, for the backward partial sums of T - t.
  std::vector<double> dts{0.0};
  std::vector<long> sample_steps;
  double norm_min = std::numeric_limits<double>::infinity();
  double norm_max = 0.0;
  const double stop_log = std::log(cfg.stop_focusing);

  auto record = [&](const RescaledField& s) {
    TraceSample t;
    t.step = s.step;
    t.tau = s.tau;
    t.log_l = s.log_l;
    t.a = s.a;
    t.dt = dts.back();
    t.mass = solver.mass(s.v);
    t.energy = solver.energy(s.v) * std::exp(-2.0 * s.log_l);
    t.max_norm = max_abs(s.v);
    return t;
  };

  auto observe = [&](const RescaledField& s) {
    const double norm = max_abs(s.v);
    norm_min = std::min(norm_min, norm);
    norm_max = std::max(norm_max, norm);
    if (s.step % cfg.sample_every == 0) {
      trace.samples.push_back(record(s));
      if (progress) progress(s);
    }
    while (next_level < levels.size() && -s.log_l >= std::log(levels[next_level])) {
      trace.checkpoints.push_back(record(s));
      ++next_level;
    }
    while (next_snap < snaps.size() && s.tau >= snaps[next_snap] - 0.5 * cfg.dtau) {
      trace.snapshots.push_back({s.tau, s.v});
      ++next_snap;
    }
  };

  observe(solver.state());
  while (true) {
    const auto& s = solver.state();
    if (s.log_l < stop_log) {
      trace.stopped_on_focusing = true;
      break;
    }
    if (s.tau >= cfg.max_tau) break;
    solver.step();
    dts.push_back(cfg.dtau * std::exp(2.0 * solver.state().log_l));
    trace.forward_time += dts.back();
    observe(solver.state());
  }
  const auto& fin = solver.state();
  if (fin.step % cfg.sample_every != 0) trace.samples.push_back(record(fin));
  trace.final_state = fin.v;

  // T - t_i = sum_{j > i} dt_j, accumulated from the smallest terms upward.
  std::vector<double> remaining(dts.size(), 0.0);
  if (cfg.include_tail && fin.a > 0) remaining.back() = 0.5 * std::exp(2.0 * fin.log_l) / fin.a;
  trace.tail_time = remaining.back();
  for (std::size_t i = dts.size() - 1; i-- > 0;) remaining[i] = remaining[i + 1] + dts[i + 1];
  trace.blowup_time = remaining[0];
  for (auto* list : {&trace.samples, &trace.checkpoints})
    for (auto& t : *list) t.time_to_blowup = remaining[static_cast<std::size_t>(t.step)];

  trace.max_norm_error = norm_max - norm_min;
  trace.final_tau = fin.tau;
  trace.final_log_l = fin.log_l;
  trace.steps = fin.step;
  return trace;
}

void export_trace(const SimulationTrace& trace, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto to_table = [](const std::vector<TraceSample>& list) {
    Table t;
    t.header = {"i", "tau", "L", "lnL", "a", "dt", "T_minus_t", "mass", "energy", "max_norm"};
    t.columns.resize(t.header.size());
    for (const auto& s : list) {
      const double vals[] = {double(s.step), s.tau, std::exp(s.log_l), s.log_l, s.a, s.dt,
                             s.time_to_blowup, s.mass, s.energy, s.max_norm};
      for (std::size_t j = 0; j < t.columns.size(); ++j) t.columns[j].push_back(vals[j]);
    }
    return t;
  };
  write_csv(fs::path(dir) / "trace.csv", to_table(trace.samples));
  write_csv(fs::path(dir) / "checkpoints.csv", to_table(trace.checkpoints));
  for (const auto& snap : trace.snapshots) {
    Table t;
    t.header = {"xi", "re", "im", "abs"};
    t.columns.resize(4);
    for (Eigen::Index i = 0; i < snap.v.size(); ++i) {
      t.columns[0].push_back(trace.xi(i));
      t.columns[1].push_back(snap.v(i).real());
      t.columns[2].push_back(snap.v(i).imag());
      t.columns[3].push_back(std::abs(snap.v(i)));
    }
    std::ostringstream name;
    name << "snapshot_tau" << std::lround(snap.tau) << ".csv";
    write_csv(fs::path(dir) / name.str(), t);
  }
  {
    Table t;
    t.header = {"xi", "re", "im", "abs"};
    t.columns.resize(4);
    for (Eigen::Index i = 0; i < trace.final_state.size(); ++i) {
      t.columns[0].push_back(trace.xi(i));
      t.columns[1].push_back(trace.final_state(i).real());
      t.columns[2].push_back(trace.final_state(i).imag());
      t.columns[3].push_back(std::abs(trace.final_state(i)));
    }
    write_csv(fs::path(dir) / "snapshot_final.csv", t);
  }
  const auto& c = trace.config;
  Json j;
  j["dim"] = c.dim;
  j["amplitude"] = c.amplitude;
  j["nodes"] = c.nodes;
  j["kappa"] = c.kappa;
  j["dtau"] = c.dtau;
  j["stop_focusing"] = c.stop_focusing;
  j["normalization"] = to_string(c.normalization);
  j["stepper"] = to_string(c.stepper);
  j["include_tail"] = c.include_tail;
  j["blowup_time"] = trace.blowup_time;
  j["tail_time"] = trace.tail_time;
  j["max_norm_error"] = trace.max_norm_error;
  j["final_tau"] = trace.final_tau;
  j["final_L"] = std::exp(trace.final_log_l);
  j["steps"] = trace.steps;
  j["stopped_on_focusing"] = trace.stopped_on_focusing;
  j["warnings"] = trace.warnings;
  write_json(fs::path(dir) / "run.json", j);
}

}  // namespace blowup

namespace blowup {

ProfileDeviation profile_deviation(const GroundStateProfile& prof, const Vec& xi, const Vec& modulus,
                                   double core_level) {
  ProfileDeviation out;
  const double q0 = prof.q_vals(0);
  const double stretch = std::pow(q0, -2.0 / prof.dim);  // v(xi) ~ Q(stretch xi) / Q(0)
  const std::span<const double> q(prof.q_vals.data(), std::size_t(prof.q_vals.size()));
  for (Eigen::Index i = 0; i < xi.size(); ++i) {
    const double arg = stretch * xi(i);
    if (arg > prof.grid.length()) break;
    const double target = prof.grid.interpolate(q, arg) / q0;
    if (target < core_level) break;
    out.core_radius = xi(i);
    out.sup_error = std::max(out.sup_error, std::abs(modulus(i) - target));
    ++out.points;
  }
  return out;
}

}  // namespace blowup
