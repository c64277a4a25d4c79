#pragma once

// Reduced blow-up dynamics
//   b' = -c_nu exp(-pi/sqrt(b)),   a' = b - a^2,   (ln L)' = -a,   T - t = int_tau^inf L^2,
// integrated over hundreds of decades of focusing. L and T - t are only ever
// held as logarithms.

#include <string>
#include <vector>

namespace blowup {

enum class ReducedStart { Zero, Adiabatic, Given };

struct ReducedConfig {
  double b0 = 0.1;
  ReducedStart start = ReducedStart::Adiabatic;  // a(0) = 0, sqrt(b0) or a0
  double a0 = 0.0;
  double c_nu = 53.11;
  double log_l0 = 0.0;
  double tau_max = 1e100;
  double stop_log_l = -1e300;   // stop once ln L drops below this
  double min_step = 1e-3;       // dtau = max(min_step, step_ratio * tau)
  double step_ratio = 1e-3;
};

struct ReducedSample {
  double tau = 0.0;
  double a = 0.0;
  double b = 0.0;
  double log_l = 0.0;
  double log_remaining = 0.0;  // ln(T - t)
};

struct ReducedTrajectory {
  ReducedConfig config;
  std::vector<ReducedSample> samples;  // every step
  double a_start = 0.0;
  int sign_changes = 0;                // of a^2 - b along the run
  std::string stop_reason;
};

ReducedTrajectory integrate_reduced(const ReducedConfig& cfg);

// ln L by trapezoidal quadrature of -a, and ln(T - t) with L^2 taken piecewise
// exponential between samples plus the constant-rate tail L_end^2/(2 a_end).
struct ScaleRecovery {
  std::vector<double> log_l;
  std::vector<double> log_remaining;
};
ScaleRecovery recover_scale(const std::vector<double>& tau, const std::vector<double>& a, double log_l0);

// L_loglog = (2 pi s / ln ln(1/s))^{1/2} as a logarithm, s = T - t.
double log_loglog_scale(double log_remaining);

// Reference curves for plots: adiabatic b = b0 and log-log b = pi^2 / ln^2 tau.
double loglog_b(double tau);

// Indices of samples with tau in [lo, hi] on a log grid of `count` points.
std::vector<std::size_t> log_spaced_indices(const ReducedTrajectory& tr, double lo, double hi, std::size_t count);

// CSV (tau, a, b, lnL, ln_T_minus_t, b_adiabatic, b_loglog, ratio_loglog) thinned to `count` rows.
void export_reduced(const ReducedTrajectory& tr, const std::string& path, std::size_t count = 2000);

}  // namespace blowup
