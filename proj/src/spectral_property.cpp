#include "blowup/spectral_property.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace blowup {

namespace odeint = boost::numeric::odeint;

std::string to_string(OperatorKind op) { return op == OperatorKind::L1 ? "L1" : "L2"; }

std::string to_string(TailKind t) {
  switch (t) {
    case TailKind::Constant:
      return "converges-to-constant";
    case TailKind::Growth:
      return "polynomial-growth";
    case TailKind::Decay:
      return "polynomial-decay";
    case TailKind::Unresolved:
      return "unresolved";
  }
  return "?";
}

std::string to_string(StopRule s) {
  switch (s) {
    case StopRule::Positivity:
      return "positivity-criterion";
    case StopRule::TailStabilized:
      return "tail-stabilized";
    case StopRule::MaxRadius:
      return "max-radius";
    case StopRule::StepFailure:
      return "step-failure";
  }
  return "?";
}

RadialPotential::RadialPotential(const GroundStateProfile& prof, OperatorKind op)
    : grid_(&prof.grid), vals_(op == OperatorKind::L1 ? prof.v1_vals : prof.v2_vals), domain_(prof.grid.xi.maxCoeff()) {}

RadialPotential::RadialPotential(double constant) : constant_(constant), domain_(INFINITY) {}

RadialPotential::RadialPotential(std::function<double(double)> f, double domain) : fn_(std::move(f)), domain_(domain) {}

double RadialPotential::operator()(double r) const {
  if (fn_) return r > domain_ ? 0.0 : fn_(r);
  if (!grid_) return constant_;
  if (r > domain_) return 0.0;
  return grid_->interpolate(std::span<const double>(vals_.data(), std::size_t(vals_.size())), r);
}

namespace {

// Largest radius (scanning down from the domain end) where pred fails; the
// returned radius is just above it.
template <class Pred>
double last_failure(const RadialPotential& v, double lo, Pred ok) {
  const double hi = std::isfinite(v.domain()) ? v.domain() : 200.0;
  const double h = 0.01;
  for (double r = hi; r >= lo; r -= h)
    if (!ok(r, v(r))) return std::min(hi, r + h);
  return lo;
}

using State = std::array<double, 2>;

}  // namespace

std::pair<double, double> free_tail_constants(double r0, double u0, double r1, double u1, double exponent) {
  const double a0 = std::pow(r0, -exponent), a1 = std::pow(r1, -exponent);
  const double c1 = (u0 - u1) / (a0 - a1);
  return {c1, u1 - c1 * a1};
}

TailFit classify_tail(const std::vector<double>& r, const std::vector<double>& u, int dim, int harmonic) {
  TailFit fit;
  const std::size_t n = r.size();
  if (n < 3 || u.size() != n) return fit;
  const double e = double(dim - 2 + 2 * harmonic);
  const auto w = [&](std::size_t i) { return u[i] / std::pow(r[i], harmonic); };

  std::vector<double> c2;
  for (std::size_t i = 1; i < n; ++i) {
    const auto [a, b] = e > 0 ? free_tail_constants(r[i - 1], w(i - 1), r[i], w(i), e)
                              : std::pair<double, double>{0.0, w(i)};
    c2.push_back(b);
    fit.c1 = a;
    fit.c2 = b;
  }
  const std::size_t span = std::min<std::size_t>(20, c2.size());
  const auto [lo, hi] = std::minmax_element(c2.end() - long(span), c2.end());
  fit.stabilized = span >= 20 && (*hi - *lo) < 1e-6 * std::abs(fit.c2);

  const std::size_t k0 = n > 20 ? n - 20 : 0;
  const double du = std::log(std::abs(u[n - 1])) - std::log(std::abs(u[k0]));
  fit.slope = du / (std::log(r[n - 1]) - std::log(r[k0]));

  const double grow = double(harmonic), decay = double(2 - dim - harmonic);
  if (harmonic == 0) {
    if (fit.stabilized && fit.c2 != 0.0)
      fit.kind = TailKind::Constant;
    else if (std::abs(fit.slope - decay) < 0.1)
      fit.kind = TailKind::Decay;
  } else {
    fit.kind = std::abs(fit.slope - grow) < std::abs(fit.slope - decay) ? TailKind::Growth : TailKind::Decay;
  }
  return fit;
}

double potential_bound_radius(const RadialPotential& v, int dim) {
  const double c = 0.25 * double(dim - 2) * double(dim - 2);
  return last_failure(v, 1.0, [&](double r, double val) { return std::max(-val, 0.0) <= c / (r * r); });
}

IndexResult count_index(const RadialPotential& v, int dim, int harmonic, OperatorKind op, const IvpOptions& opts) {
  if (dim < 1) throw std::invalid_argument("count_index: dimension must be positive");
  if (harmonic < 0) throw std::invalid_argument("count_index: harmonic must be >= 0");
  IndexResult res;
  res.dim = dim;
  res.harmonic = harmonic;
  res.op = op;

  const double m1 = double(dim - 1 + 2 * harmonic);
  const auto rhs = [&](const State& x, State& dx, double r) {
    dx[0] = x[1];
    dx[1] = -m1 / r * x[1] + v(r) * x[0];
  };

  const bool positivity = opts.use_positivity && op == OperatorKind::L1 && harmonic == 0 && dim >= 3;
  const double bound_radius = positivity ? potential_bound_radius(v, dim) : INFINITY;
  const double free_radius =
      last_failure(v, 0.0, [&](double, double val) { return std::abs(val) < opts.free_threshold; });

  // Series start: W = 1 + V(0) r^2 / (2 (m1 + 1)).
  const double v0 = v(0.0);
  double r = opts.r_start;
  State x{1.0 + v0 * r * r / (2.0 * (m1 + 1.0)), v0 * r / (m1 + 1.0)};
  auto stepper = odeint::make_dense_output(opts.abs_tol, opts.rel_tol, odeint::runge_kutta_dopri5<State>());
  stepper.initialize(x, r, 1e-4);

  std::vector<double> free_r, free_u;
  std::vector<double> du;
  double next_sample = opts.sample_step;
  double prev_w = x[0];
  res.stop = StopRule::MaxRadius;
  try {
    while (stepper.current_time() < opts.r_max) {
      const auto [t0, t1] = stepper.do_step(rhs);
      if (!std::isfinite(stepper.current_state()[0])) throw std::runtime_error("non-finite state");
      const double w1 = stepper.current_state()[0];
      if (w1 == 0.0) res.notes.push_back("solution touches zero at r=" + std::to_string(t1));
      if (prev_w * w1 < 0) {
        double a = t0, b = t1;
        State s;
        while (b - a > 1e-10) {
          const double mid = 0.5 * (a + b);
          stepper.calc_state(mid, s);
          (s[0] * prev_w > 0 ? a : b) = mid;
        }
        res.zeros.push_back(0.5 * (a + b));
      }
      if (w1 != 0.0) prev_w = w1;

      while (next_sample <= std::min(t1, opts.r_max)) {
        State s;
        stepper.calc_state(next_sample, s);
        const double rk = std::pow(next_sample, harmonic);
        const double u = rk * s[0];
        const double dudr = rk * s[1] + (harmonic ? harmonic * rk / next_sample * s[0] : 0.0);
        res.r.push_back(next_sample);
        res.u.push_back(u);
        du.push_back(dudr);
        if (next_sample >= free_radius) {
          free_r.push_back(next_sample);
          free_u.push_back(u);
        }
        next_sample += opts.sample_step;
      }

      const State& cur = stepper.current_state();
      if (positivity && t1 >= bound_radius && t1 > 1.0 && cur[0] * cur[1] > 0) {
        res.stop = StopRule::Positivity;
        break;
      }
      if (free_r.size() >= 21) {
        const TailFit tf = classify_tail(free_r, free_u, dim, harmonic);
        if (tf.stabilized) {
          res.stop = StopRule::TailStabilized;
          break;
        }
      }
    }
  } catch (const std::exception& e) {
    res.stop = StopRule::StepFailure;
    res.notes.push_back(std::string("integration failed: ") + e.what());
  }
  res.termination_radius = stepper.current_time();
  res.zero_count = int(res.zeros.size());
  if (free_r.size() >= 3) res.tail = classify_tail(free_r, free_u, dim, harmonic);
  if (res.stop == StopRule::Positivity) {
    const State& cur = stepper.current_state();
    PositivityEvidence ev;
    ev.r0 = res.termination_radius;
    ev.sign_product = cur[0] * cur[1];
    ev.printed_column = -v(ev.r0) - double((dim - 2) * (dim - 2)) / (4.0 * ev.r0);
    ev.worst_margin = 0.0;  // bound_radius guarantees the potential condition
    ev.holds = true;
    res.positivity = ev;
  }
  res.du = std::move(du);
  return res;
}

IndexResult count_index(const GroundStateProfile& prof, int harmonic, OperatorKind op, const IvpOptions& opts) {
  return count_index(RadialPotential(prof, op), prof.dim, harmonic, op, opts);
}

PositivityEvidence positivity_criterion(const IndexResult& ivp, const RadialPotential& v, int dim, double r0) {
  if (dim < 2) throw std::invalid_argument("positivity criterion needs d >= 2");
  if (ivp.r.empty() || ivp.r.back() < r0) throw std::invalid_argument("solution does not reach r0");
  const auto it = std::lower_bound(ivp.r.begin(), ivp.r.end(), r0 - 1e-12);
  std::size_t i = std::size_t(it - ivp.r.begin());
  double u, du;
  if (std::abs(ivp.r[i] - r0) < 1e-9 || i == 0) {
    u = ivp.u[i];
    du = ivp.du[i];
  } else {
    const double t = (r0 - ivp.r[i - 1]) / (ivp.r[i] - ivp.r[i - 1]);
    u = (1 - t) * ivp.u[i - 1] + t * ivp.u[i];
    du = (1 - t) * ivp.du[i - 1] + t * ivp.du[i];
  }
  PositivityEvidence ev;
  ev.r0 = r0;
  ev.sign_product = u * du;
  ev.printed_column = -v(r0) - double((dim - 2) * (dim - 2)) / (4.0 * r0);

  const double hi = std::isfinite(v.domain()) ? v.domain() : std::max(200.0, r0);
  ev.worst_margin = -INFINITY;
  if (dim >= 3) {
    const double c = 0.25 * double(dim - 2) * double(dim - 2);
    for (double r = r0; r <= hi; r += 0.01) {
      const double m = std::max(-v(r), 0.0) - c / (r * r);
      if (m > ev.worst_margin) {
        ev.worst_margin = m;
        ev.failing_radius = r;
      }
    }
    ev.holds = ev.sign_product > 0 && ev.worst_margin <= 0;
  } else {
    // d = 2: V+ <= 1/(4 r^2 ln^2 r) and u'/u >= (2/r0) int_{r0}^inf V+ r dr.
    double integral = 0.0;
    const double h = 0.01;
    for (double r = r0; r <= hi; r += h) {
      const double vp = std::max(-v(r), 0.0);
      const double lr = std::log(r);
      const double m = vp - 1.0 / (4.0 * r * r * lr * lr);
      if (m > ev.worst_margin) {
        ev.worst_margin = m;
        ev.failing_radius = r;
      }
      integral += vp * r * h;
    }
    ev.holds = r0 > 1.0 && ev.sign_product > 0 && ev.worst_margin <= 0 && du / u >= 2.0 / r0 * integral;
  }
  if (ev.holds) ev.failing_radius = 0.0;
  return ev;
}

namespace {

struct Tridiagonal {
  std::vector<double> diag;  // scaled by the weight
  std::vector<double> off;
};

Tridiagonal fd_matrix(const RadialPotential& v, int dim, int harmonic, int cells, double length) {
  if (cells < 10) throw std::invalid_argument("fd_matrix: too few cells");
  const double h = length / cells;
  const double m1 = double(dim - 1 + 2 * harmonic);
  Tridiagonal t;
  t.diag.resize(std::size_t(cells));
  t.off.resize(std::size_t(cells - 1));
  std::vector<double> wc(static_cast<std::size_t>(cells));
  // Work with weights relative to the outer face to keep magnitudes tame.
  const auto face = [&](int i) { return std::pow(double(i) * h / length, m1); };
  for (int i = 0; i < cells; ++i) wc[std::size_t(i)] = std::pow((i + 0.5) * h / length, m1);
  for (int i = 0; i < cells; ++i) {
    const double right = i + 1 < cells ? face(i + 1) : 2.0 * face(cells);
    const double a = (face(i) + right) / (h * h);
    t.diag[std::size_t(i)] = a / wc[std::size_t(i)] + v((i + 0.5) * h);
    if (i + 1 < cells)
      t.off[std::size_t(i)] = -face(i + 1) / (h * h) / std::sqrt(wc[std::size_t(i)] * wc[std::size_t(i + 1)]);
  }
  return t;
}

int count_below(const Tridiagonal& t, double shift) {
  int neg = 0;
  double q = t.diag[0] - shift;
  for (std::size_t i = 0;; ++i) {
    if (q == 0.0) q = 1e-300;
    if (q < 0) ++neg;
    if (i + 1 >= t.diag.size()) break;
    q = t.diag[i + 1] - shift - t.off[i] * t.off[i] / q;
  }
  return neg;
}

}  // namespace

int sturm_count(const RadialPotential& v, int dim, int harmonic, double shift, int cells, double length) {
  return count_below(fd_matrix(v, dim, harmonic, cells, length), shift);
}

FiniteDifferenceSpectrum fd_spectrum(const RadialPotential& v, int dim, int harmonic, int cells, double length) {
  const auto t = fd_matrix(v, dim, harmonic, cells, length);
  FiniteDifferenceSpectrum out;
  out.negative_count = count_below(t, 0.0);
  if (out.negative_count == 0) return out;
  double lo = 0.0;
  for (std::size_t i = 0; i < t.diag.size(); ++i) {
    double g = t.diag[i];
    if (i > 0) g -= std::abs(t.off[i - 1]);
    if (i < t.off.size()) g -= std::abs(t.off[i]);
    lo = std::min(lo, g);
  }
  double hi = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (count_below(t, mid) >= 1 ? hi : lo) = mid;
  }
  out.lowest = 0.5 * (lo + hi);
  return out;
}

BvpSolution solve_radial_bvp(const ChebyshevGrid& grid, int dim, int harmonic, const Vec& potential, const Vec& rhs,
                             const BvpOptions& opts) {
  if (grid.map != GridMap::Interval) throw std::invalid_argument("BVP needs an interval grid");
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (potential.size() != n || rhs.size() != n) throw std::invalid_argument("BVP: size mismatch");
  const bool reduced = opts.reduced_form && harmonic > 0;
  const int eff_dim = reduced ? dim + 2 * harmonic : dim;
  const int eff_k = reduced ? 0 : harmonic;

  Mat a = -radial_laplacian(grid, eff_dim, eff_k).matrix;
  a.diagonal() += potential;
  Vec f = rhs;
  if (reduced)
    for (Eigen::Index i = 1; i < n; ++i) f(i) /= std::pow(grid.xi(i), harmonic);

  const Mat a_op = a;
  const Vec f_op = f;
  if (eff_k == 0) {
    a.row(0) = grid.d1.row(0);
  } else {
    a.row(0).setZero();
    a(0, 0) = 1.0;
  }
  f(0) = 0.0;
  const double length = grid.xi(n - 1);
  if (opts.outer == OuterCondition::Decay) {
    const double e = reduced ? double(dim - 2 + 2 * harmonic) : double(dim - 2 + harmonic);
    if (!(e > 0)) throw std::invalid_argument("decay condition needs d - 2 + k > 0");
    a.row(n - 1) = (length / e) * grid.d1.row(n - 1);
    a(n - 1, n - 1) += 1.0;
  } else {
    a.row(n - 1) = grid.d1.row(n - 1);
  }
  f(n - 1) = 0.0;

  Vec scale = a.cwiseAbs().rowwise().maxCoeff().cwiseInverse();
  const Mat as = scale.asDiagonal() * a;
  const Eigen::PartialPivLU<Mat> lu(as);
  BvpSolution sol;
  sol.condition = 1.0 / lu.rcond();
  if (!(sol.condition < opts.max_condition))
    throw SolverError("BVP matrix ill-conditioned; refine the grid or shorten the domain", sol.condition);
  Vec u = lu.solve(scale.asDiagonal() * f);

  const Vec res = a_op * u - f_op;
  sol.residual = res.segment(1, n - 2).cwiseAbs().maxCoeff();
  sol.rel_residual = sol.residual / std::max(f_op.segment(1, n - 2).cwiseAbs().maxCoeff(), 1e-300);
  if (reduced)
    for (Eigen::Index i = 0; i < n; ++i) u(i) *= std::pow(grid.xi(i), harmonic);
  sol.u = std::move(u);
  return sol;
}

BvpSolution solve_operator_bvp(const GroundStateProfile& prof, int harmonic, OperatorKind op, const Vec& rhs,
                               const BvpOptions& opts) {
  return solve_radial_bvp(prof.grid, prof.dim, harmonic, op == OperatorKind::L1 ? prof.v1_vals : prof.v2_vals, rhs,
                          opts);
}

BilinearForms bilinear_matrix(const GroundStateProfile& prof, const BvpOptions& opts) {
  const auto& g = prof.grid;
  const int d = prof.dim;
  BilinearForms out;
  const auto u1 = solve_operator_bvp(prof, 0, OperatorKind::L1, prof.q_vals, opts);
  const auto u2 = solve_operator_bvp(prof, 0, OperatorKind::L1, prof.q1_vals, opts);
  const auto z1 = solve_operator_bvp(prof, 0, OperatorKind::L2, prof.q1_vals, opts);
  const auto z2 = solve_operator_bvp(prof, 0, OperatorKind::L2, prof.q2_vals, opts);
  out.k = {inner(g, prof.q_vals, u1.u, d), inner(g, prof.q_vals, u2.u, d), inner(g, prof.q1_vals, u1.u, d),
           inner(g, prof.q1_vals, u2.u, d)};
  out.j = {inner(g, prof.q1_vals, z1.u, d), inner(g, prof.q1_vals, z2.u, d), inner(g, prof.q2_vals, z1.u, d),
           inner(g, prof.q2_vals, z2.u, d)};
  out.max_residual = std::max({u1.rel_residual, u2.rel_residual, z1.rel_residual, z2.rel_residual});
  return out;
}

double property2_form(const GroundStateProfile& prof, const BvpOptions& opts) {
  const auto z = solve_operator_bvp(prof, 0, OperatorKind::L2, prof.q_vals, opts);
  return inner(prof.grid, prof.q_vals, z.u, prof.dim);
}

HarmonicForms harmonic_forms(const GroundStateProfile& prof, bool with_second, const BvpOptions& opts) {
  const auto& g = prof.grid;
  const Vec rq = g.xi.cwiseProduct(prof.q_vals);
  HarmonicForms out;
  const auto u = solve_operator_bvp(prof, 1, OperatorKind::L1, rq, opts);
  out.k11_1 = inner(g, rq, u.u, prof.dim);
  const auto z = solve_operator_bvp(prof, 1, OperatorKind::L2, prof.qr_vals, opts);
  out.j11_1 = inner(g, prof.qr_vals, z.u, prof.dim);
  if (with_second) {
    const auto u2 = solve_operator_bvp(prof, 2, OperatorKind::L1, rq, opts);
    out.k11_2 = inner(g, rq, u2.u, prof.dim);
  }
  return out;
}

CubicCheck supercritical_crosscheck(std::size_t n, double length) {
  GroundStateOptions o;
  o.power = 3.0;
  const auto prof = compute_ground_state(3, o, n, length);
  const Vec rhs2 = prof.q_vals + prof.grid.xi.cwiseProduct(prof.qr_vals);
  CubicCheck out;
  const auto u = solve_operator_bvp(prof, 0, OperatorKind::L1, prof.q_vals);
  out.k11 = inner(prof.grid, prof.q_vals, u.u, 3);
  const auto z = solve_operator_bvp(prof, 0, OperatorKind::L2, rhs2);
  out.j11 = inner(prof.grid, rhs2, z.u, 3);
  return out;
}

Json to_json(const IndexResult& r) {
  Json j;
  j["dim"] = r.dim;
  j["harmonic"] = r.harmonic;
  j["operator"] = to_string(r.op);
  j["zero_count"] = r.zero_count;
  j["zeros"] = r.zeros;
  j["tail"] = {{"kind", to_string(r.tail.kind)}, {"c1", r.tail.c1},         {"c2", r.tail.c2},
               {"slope", r.tail.slope},          {"stabilized", r.tail.stabilized}};
  j["termination_radius"] = r.termination_radius;
  j["stop"] = to_string(r.stop);
  if (r.positivity)
    j["positivity"] = {{"r0", r.positivity->r0},
                       {"sign_product", r.positivity->sign_product},
                       {"printed_column", r.positivity->printed_column}};
  j["notes"] = r.notes;
  return j;
}

Json to_json(const BilinearForms& f) {
  const auto block = [](const FormMatrix& m) {
    return Json{{"m11", m.m11}, {"m12", m.m12}, {"m21", m.m21}, {"m22", m.m22},
                {"det", m.det()}, {"sym_residual", m.sym_residual()}};
  };
  return Json{{"K", block(f.k)}, {"J", block(f.j)}, {"max_rel_residual", f.max_residual}};
}

Json to_json(const HarmonicForms& h) {
  Json j{{"K11_1", h.k11_1}, {"J11_1", h.j11_1}};
  if (h.k11_2) j["K11_2"] = *h.k11_2;
  return j;
}

}  // namespace blowup
