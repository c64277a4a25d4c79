#include "blowup/reduced_system.hpp"

#include "blowup/io.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace blowup {

namespace {

constexpr double kPi = std::numbers::pi;

double log_add(double x, double y) {
  if (x < y) std::swap(x, y);
  if (y == -INFINITY) return x;
  return x + std::log1p(std::exp(y - x));
}

// Riccati a' = b - a^2 with b frozen, exact over a step h.
double riccati_step(double a, double b, double h) {
  const double s = std::sqrt(b);
  if (s == 0.0) return a / (1.0 + a * h);
  const double t = std::tanh(s * h);
  return s * (a + s * t) / (s + a * t);
}

}  // namespace

ReducedTrajectory integrate_reduced(const ReducedConfig& cfg) {
  if (!(cfg.b0 > 0)) throw std::invalid_argument("b0 must be positive");
  if (cfg.c_nu < 0) throw std::invalid_argument("c_nu must be non-negative");
  ReducedTrajectory tr;
  tr.config = cfg;
  double a = cfg.start == ReducedStart::Zero ? 0.0
             : cfg.start == ReducedStart::Adiabatic ? std::sqrt(cfg.b0)
                                                    : cfg.a0;
  tr.a_start = a;

  // beta = pi / sqrt(b); y = e^beta obeys y' = c_nu beta^3 / (2 pi^2), which is
  // not stiff, so Heun's method is applied to y written through log1p.
  double beta = kPi / std::sqrt(cfg.b0);
  const double rate = cfg.c_nu / (2.0 * kPi * kPi);
  double tau = 0.0;
  std::vector<double> taus{0.0}, as{a}, bs{cfg.b0};
  double log_l = cfg.log_l0;
  int last_sign = (a * a - cfg.b0 > 0) - (a * a - cfg.b0 < 0);

  tr.stop_reason = "tau_max";
  while (tau < cfg.tau_max) {
    const double h = std::min(std::max(cfg.min_step, cfg.step_ratio * tau), cfg.tau_max - tau);
    const double k1 = rate * beta * beta * beta;
    const double beta_pred = beta + std::log1p(h * k1 * std::exp(-beta));
    const double k2 = rate * beta_pred * beta_pred * beta_pred;
    const double beta_next = beta + std::log1p(0.5 * h * (k1 + k2) * std::exp(-beta));
    const double beta_mid = 0.5 * (beta + beta_next);
    const double a_next = riccati_step(a, kPi * kPi / (beta_mid * beta_mid), h);
    log_l -= 0.5 * h * (a + a_next);
    beta = beta_next;
    a = a_next;
    tau += h;
    const double b = kPi * kPi / (beta * beta);
    taus.push_back(tau);
    as.push_back(a);
    bs.push_back(b);
    const int sign = (a * a - b > 0) - (a * a - b < 0);
    if (sign != 0 && last_sign != 0 && sign != last_sign) ++tr.sign_changes;
    if (sign != 0) last_sign = sign;
    if (!std::isfinite(a) || !std::isfinite(beta)) {
      tr.stop_reason = "non-finite state";
      break;
    }
    if (log_l < cfg.stop_log_l) {
      tr.stop_reason = "focusing";
      break;
    }
  }

  const auto rec = recover_scale(taus, as, cfg.log_l0);
  tr.samples.reserve(taus.size());
  for (std::size_t i = 0; i < taus.size(); ++i)
    tr.samples.push_back({taus[i], as[i], bs[i], rec.log_l[i], rec.log_remaining[i]});
  return tr;
}

ScaleRecovery recover_scale(const std::vector<double>& tau, const std::vector<double>& a, double log_l0) {
  if (tau.size() != a.size() || tau.empty()) throw std::invalid_argument("tau/a size mismatch");
  const std::size_t n = tau.size();
  ScaleRecovery out;
  out.log_l.assign(n, log_l0);
  for (std::size_t i = 1; i < n; ++i)
    out.log_l[i] = out.log_l[i - 1] - 0.5 * (tau[i] - tau[i - 1]) * (a[i] + a[i - 1]);

  out.log_remaining.assign(n, -INFINITY);
  if (a.back() > 0) out.log_remaining[n - 1] = 2.0 * out.log_l[n - 1] - std::log(2.0 * a.back());
  for (std::size_t i = n - 1; i-- > 0;) {
    // int_{tau_i}^{tau_{i+1}} L^2 with ln L^2 linear across the step.
    const double h = tau[i + 1] - tau[i];
    const double drop = 2.0 * (out.log_l[i] - out.log_l[i + 1]);  // = 2 abar h
    double log_piece;
    if (std::abs(drop) < 1e-8) {
      log_piece = std::log(h) + 2.0 * out.log_l[i] - 0.5 * drop;
    } else {
      // L_i^2 h (1 - e^{-drop}) / drop
      const double factor = drop > 0 ? -std::expm1(-drop) / drop : std::expm1(-drop) / -drop;
      log_piece = std::log(h) + 2.0 * out.log_l[i] + std::log(factor);
    }
    out.log_remaining[i] = log_add(out.log_remaining[i + 1], log_piece);
  }
  return out;
}

double log_loglog_scale(double log_remaining) {
  // s < 1/e is needed for ln ln(1/s) > 0.
  return 0.5 * (std::log(2.0 * kPi) + log_remaining - std::log(std::log(-log_remaining)));
}

double loglog_b(double tau) {
  const double l = std::log(tau);
  return kPi * kPi / (l * l);
}

std::vector<std::size_t> log_spaced_indices(const ReducedTrajectory& tr, double lo, double hi, std::size_t count) {
  std::vector<std::size_t> idx;
  if (tr.samples.empty() || count == 0) return idx;
  std::size_t j = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double target = count == 1 ? lo : lo * std::pow(hi / lo, double(k) / double(count - 1));
    while (j < tr.samples.size() && tr.samples[j].tau < target) ++j;
    if (j >= tr.samples.size()) break;
    if (idx.empty() || idx.back() != j) idx.push_back(j);
  }
  return idx;
}

void export_reduced(const ReducedTrajectory& tr, const std::string& path, std::size_t count) {
  Table t;
  t.header = {"tau", "a", "b", "lnL", "ln_T_minus_t", "b_adiabatic", "b_loglog", "ratio_loglog"};
  t.columns.resize(t.header.size());
  const std::size_t stride = std::max<std::size_t>(1, tr.samples.size() / std::max<std::size_t>(count, 1));
  for (std::size_t i = 0; i < tr.samples.size(); i += stride) {
    const auto& s = tr.samples[i];
    const double bl = s.tau > 1.0 ? loglog_b(s.tau) : NAN;
    const double ratio = s.log_remaining < -1.0 ? std::exp(s.log_l - log_loglog_scale(s.log_remaining)) : NAN;
    const double row[] = {s.tau, s.a, s.b, s.log_l, s.log_remaining, tr.config.b0, bl, ratio};
    for (std::size_t j = 0; j < t.columns.size(); ++j) t.columns[j].push_back(row[j]);
  }
  write_csv(path, t);
}

}  // namespace blowup
