#include "blowup/ground_state.hpp"

#include "blowup/io.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace blowup {

namespace {

// B u + w |u|^{p-1} u = 0 with boundary rows already placed in B (w=0 there).
struct SemilinearProblem {
  Mat linear;
  Vec weight;
  Vec ip_weight;  // quadrature weight for the stabilizing functional
  double power = 0.0;
};

Vec nonlinear_term(const SemilinearProblem& prob, const Vec& u) {
  Vec out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i)
    out(i) = prob.weight(i) * std::pow(std::abs(u(i)), prob.power - 1.0) * u(i);
  return out;
}

Vec residual(const SemilinearProblem& prob, const Vec& u) {
  return prob.linear * u + nonlinear_term(prob, u);
}

double scaled_residual(const SemilinearProblem& prob, const Vec& u) {
  const Vec res = residual(prob, u);
  const Vec mag = prob.linear.cwiseAbs() * u.cwiseAbs() + nonlinear_term(prob, u).cwiseAbs();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i)
    if (mag(i) > 0) worst = std::max(worst, std::abs(res(i)) / mag(i));
  return worst;
}

// Petviashvili iteration on  (-B) u = N(u), followed by Newton polish.
Vec solve_semilinear(const SemilinearProblem& prob, Vec u, const GroundStateOptions& opts,
                     SolveReport& rep) {
  const double p = prob.power;
  const double gamma = p / (p - 1.0);
  const Eigen::PartialPivLU<Mat> neg_lin(-prob.linear);

  for (int it = 0; it < opts.max_fixed_point; ++it) {
    const Vec nl = nonlinear_term(prob, u);
    const Vec au = -(prob.linear * u);
    const double num = (prob.ip_weight.array() * au.array() * u.array()).sum();
    const double den = (prob.ip_weight.array() * nl.array() * u.array()).sum();
    if (!(den > 0) || !(num > 0)) throw SolverError("stabilizing factor lost positivity", den);
    const double s = std::pow(num / den, gamma);
    Vec next = s * neg_lin.solve(nl);
    const double change = (next - u).cwiseAbs().maxCoeff() / next.cwiseAbs().maxCoeff();
    u = std::move(next);
    rep.fixed_point_iterations = it + 1;
    if (change < 1e-9) break;
  }
  if (u.cwiseAbs().maxCoeff() < 1e-8) throw SolverError("collapsed to the zero solution", 0.0);

  for (int it = 0; it < opts.max_newton; ++it) {
    Mat jac = prob.linear;
    for (Eigen::Index i = 0; i < u.size(); ++i)
      jac(i, i) += p * prob.weight(i) * std::pow(std::abs(u(i)), p - 1.0);
    const Vec step = jac.partialPivLu().solve(-residual(prob, u));
    u += step;
    rep.newton_iterations = it + 1;
    rep.last_step = step.cwiseAbs().maxCoeff() / u.cwiseAbs().maxCoeff();
    if (rep.last_step < opts.tol) break;
  }
  rep.residual = residual(prob, u).cwiseAbs().maxCoeff();
  rep.scaled_residual = scaled_residual(prob, u);
  if (!(rep.last_step < 1e3 * opts.tol))
    throw SolverError("Newton iteration did not converge", rep.residual);
  if (u.cwiseAbs().maxCoeff() < 1e-8) throw SolverError("collapsed to the zero solution", rep.residual);
  return u;
}

double resolve_power(int dim, double power) { return power > 0 ? power : critical_power(dim); }

void check_dim(int dim) {
  if (dim < 1 || dim > 12) throw std::invalid_argument("dimension must be in 1..12");
}

Vec gaussian_seed(const ChebyshevGrid& g, int dim, double amp) {
  Vec q(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) q(i) = amp * std::exp(-g.xi(i) * g.xi(i) / (2.0 * dim));
  return q;
}

double default_seed_amplitude(int dim, double p) {
  return std::pow((p + 1.0) / 2.0, 1.0 / (p - 1.0)) * (1.0 + 0.1 * dim);
}

}  // namespace

double critical_power(int dim) { return 1.0 + 4.0 / double(dim); }

Vec solve_weighted_profile(int dim, const ChebyshevGrid& grid, const GroundStateOptions& opts,
                           SolveReport* report) {
  check_dim(dim);
  if (grid.map != GridMap::Interval) throw std::invalid_argument("weighted profile needs an interval grid");
  const double p = resolve_power(dim, opts.power);
  const auto n = static_cast<Eigen::Index>(grid.size());
  const Eigen::Index last = n - 1;
  const Vec& r = grid.xi;
  const double len = grid.length();

  SemilinearProblem prob;
  prob.power = p;
  prob.linear = grid.d2 - 2.0 * grid.d1;
  prob.weight = Vec::Zero(n);
  prob.ip_weight = Vec::Zero(n);
  for (Eigen::Index i = 1; i < last; ++i) {
    prob.linear.row(i) += (dim - 1) / r(i) * grid.d1.row(i);
    prob.linear(i, i) -= (dim - 1) / r(i);
    prob.weight(i) = std::exp(-(p - 1.0) * r(i));
  }
  prob.linear.row(0) = grid.d1.row(0);
  prob.linear(0, 0) -= 1.0;
  prob.linear.row(last) = 2.0 * len * grid.d1.row(last);
  prob.linear(last, last) += dim - 1;
  if (dim == 1) prob.linear.row(last) = grid.d1.row(last);
  for (Eigen::Index i = 0; i < n; ++i)
    prob.ip_weight(i) = grid.quad_weights(i) * std::pow(r(i), dim - 1) * std::exp(-2.0 * r(i));

  const double amp = opts.seed_amplitude > 0 ? opts.seed_amplitude : default_seed_amplitude(dim, p);
  Vec seed = gaussian_seed(grid, dim, amp);
  for (Eigen::Index i = 0; i < n; ++i) seed(i) *= std::exp(r(i));

  SolveReport rep;
  Vec u = solve_semilinear(prob, seed, opts, rep);
  if (report) *report = rep;
  return u;
}

Vec solve_direct_profile(int dim, const ChebyshevGrid& grid, const GroundStateOptions& opts,
                         SolveReport* report) {
  check_dim(dim);
  const double p = resolve_power(dim, opts.power);
  const auto n = static_cast<Eigen::Index>(grid.size());
  const Eigen::Index last = n - 1;
  const Vec& r = grid.xi;

  SemilinearProblem prob;
  prob.power = p;
  prob.linear = grid.d2 - Mat::Identity(n, n);
  prob.weight = Vec::Ones(n);
  for (Eigen::Index i = 1; i < last; ++i) prob.linear.row(i) += (dim - 1) / r(i) * grid.d1.row(i);
  prob.linear.row(0) = grid.d1.row(0);
  prob.weight(0) = 0.0;
  prob.linear.row(last).setZero();
  prob.linear(last, last) = 1.0;
  prob.weight(last) = 0.0;
  prob.ip_weight = Vec(n);
  for (Eigen::Index i = 0; i < n; ++i) prob.ip_weight(i) = grid.quad_weights(i) * std::pow(r(i), dim - 1);

  const double amp = opts.seed_amplitude > 0 ? opts.seed_amplitude : default_seed_amplitude(dim, p);
  SolveReport rep;
  Vec u = solve_semilinear(prob, gaussian_seed(grid, dim, amp), opts, rep);
  if (report) *report = rep;
  return u;
}

GroundStateProfile derive_fields(const ChebyshevGrid& grid, const Vec& p_vals, int dim, double power) {
  check_dim(dim);
  if ((p_vals.array() <= 0.0).any()) throw std::domain_error("weighted profile is not positive");
  const double p = resolve_power(dim, power);
  const double sigma = (p - 1.0) / 2.0;
  const double half_d = 0.5 * dim;
  const auto n = p_vals.size();
  const Vec& r = grid.xi;
  const Vec pr = grid.d1 * p_vals;
  const Vec prr = grid.d2 * p_vals;

  GroundStateProfile g;
  g.dim = dim;
  g.power = p;
  g.grid = grid;
  g.p_vals = p_vals;
  g.q_vals.resize(n);
  g.qr_vals.resize(n);
  g.q1_vals.resize(n);
  g.q2_vals.resize(n);
  g.v1_vals.resize(n);
  g.v2_vals.resize(n);
  g.qpow_vals.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = std::exp(-r(i));
    const double q = p_vals(i) * e;
    const double qr = (pr(i) - p_vals(i)) * e;
    const double qrr = (prr(i) - 2.0 * pr(i) + p_vals(i)) * e;
    g.q_vals(i) = q;
    g.qr_vals(i) = qr;
    g.q1_vals(i) = half_d * q + r(i) * qr;
    g.q2_vals(i) = half_d * g.q1_vals(i) + r(i) * ((half_d + 1.0) * qr + r(i) * qrr);
    // Q^{p-2} r Q' = P^{p-1} r (P'/P - 1) e^{-(p-1) r}
    const double pw = std::pow(p_vals(i), p - 1.0) * std::exp(-(p - 1.0) * r(i));
    g.qpow_vals(i) = pw;
    g.v2_vals(i) = sigma * pw * r(i) * (pr(i) / p_vals(i) - 1.0);
    g.v1_vals(i) = p * g.v2_vals(i);
  }
  const Vec q2 = g.q_vals.cwiseProduct(g.q_vals);
  g.mass = weighted_quadrature(grid, q2, dim);
  const auto c = derived_constants(g);
  g.nc = c.nc;
  g.m_const = c.m_const;
  g.nu0 = c.nu0;
  g.c_nu = c.c_nu;
  return g;
}

double fit_tail_amplitude(const GroundStateProfile& prof, double r_lo, double r_hi) {
  const Vec& r = prof.grid.xi;
  if (r_hi > r(r.size() - 1) || r_lo <= 0 || r_hi <= r_lo)
    throw std::invalid_argument("tail window outside the resolved region");
  const double order = 0.5 * prof.dim - 1.0;
  double sum = 0.0;
  int count = 0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    if (r(i) < r_lo || r(i) > r_hi) continue;
    // Q e^r / (r^{1-d/2} K(r) e^r)
    const double k_scaled = std::cyl_bessel_k(std::abs(order), r(i)) * std::exp(r(i));
    sum += prof.p_vals(i) / (std::pow(r(i), -order) * k_scaled);
    ++count;
  }
  if (count < 3) throw std::invalid_argument("tail window holds fewer than three nodes");
  return sum / count * std::sqrt(std::numbers::pi / 2.0);
}

std::pair<double, double> tail_window(const GroundStateProfile& prof) {
  // Start where the nonlinear potential is negligible against the linear tail.
  const Vec& r = prof.grid.xi;
  const double cap = 0.8 * prof.grid.length();
  double lo = 10.0;
  for (Eigen::Index i = 0; i < r.size(); ++i)
    if (r(i) > lo && prof.qpow_vals(i) < 1e-10 * prof.qpow_vals(0)) {
      lo = r(i);
      break;
    }
  lo = std::min(lo, cap - 10.0);
  return {lo, std::min(lo + 20.0, cap)};
}

DerivedConstants derived_constants(const GroundStateProfile& prof) {
  DerivedConstants c;
  const Vec& r = prof.grid.xi;
  const Vec q2 = prof.q_vals.cwiseProduct(prof.q_vals);
  c.nc = weighted_quadrature(prof.grid, q2, prof.dim);
  c.m_const = 0.25 * weighted_quadrature(prof.grid, q2.cwiseProduct(r.cwiseProduct(r)), prof.dim);
  const auto [lo, hi] = tail_window(prof);
  c.nu0 = fit_tail_amplitude(prof, lo, hi);
  c.c_nu = 2.0 * c.nu0 * c.nu0 / c.m_const;
  return c;
}

GroundStateProfile compute_ground_state(int dim, const GroundStateOptions& opts, std::size_t n,
                                        double length) {
  const auto grid = build_interval_grid(n, length);
  SolveReport rep;
  const Vec p = solve_weighted_profile(dim, grid, opts, &rep);
  auto prof = derive_fields(grid, p, dim, opts.power);
  prof.report = rep;
  return prof;
}

void export_profile(const GroundStateProfile& prof, const std::string& stem) {
  auto col = [](const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  Table t;
  t.header = {"r", "Q", "Q1", "Q2", "V1", "V2"};
  t.columns = {col(prof.grid.xi), col(prof.q_vals), col(prof.q1_vals),
               col(prof.q2_vals), col(prof.v1_vals), col(prof.v2_vals)};
  write_csv(stem + ".csv", t);
  Json j;
  j["dim"] = prof.dim;
  j["power"] = prof.power;
  j["grid"] = {{"map", "interval"}, {"n", prof.grid.n}, {"length", prof.grid.length()}};
  j["mass"] = prof.mass;
  j["nc"] = prof.nc;
  j["m_const"] = prof.m_const;
  j["nu0"] = prof.nu0;
  j["c_nu"] = prof.c_nu;
  j["solver"] = {{"fixed_point_iterations", prof.report.fixed_point_iterations},
                 {"newton_iterations", prof.report.newton_iterations},
                 {"residual", prof.report.residual},
                 {"scaled_residual", prof.report.scaled_residual}};
  write_json(stem + ".json", j);
}

}  // namespace blowup

namespace blowup {

double weighted_profile_gap(const GroundStateProfile& prof) {
  GroundStateOptions opts;
  opts.power = prof.power;
  const Vec direct = solve_direct_profile(prof.dim, prof.grid, opts);
  return (direct - prof.q_vals).cwiseAbs().maxCoeff();
}

double explicit_profile_error(const GroundStateProfile& prof) {
  if (prof.dim != 1 || std::abs(prof.power - 5.0) > 1e-14)
    throw std::invalid_argument("closed form only for d = 1, p = 5");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < prof.q_vals.size(); ++i) {
    const double exact = std::pow(3.0, 0.25) / std::sqrt(std::cosh(2.0 * prof.grid.xi(i)));
    worst = std::max(worst, std::abs(prof.q_vals(i) - exact));
  }
  return worst;
}

bool monotone_beyond(const GroundStateProfile& prof, const Vec& values, double r_from) {
  int direction = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (prof.grid.xi(i - 1) < r_from) continue;
    const double step = values(i) - values(i - 1);
    const int s = (step > 0) - (step < 0);
    if (s == 0) continue;
    if (direction == 0) direction = s;
    if (s != direction) return false;
  }
  return true;
}

}  // namespace blowup
