#pragma once

// Dynamically rescaled radial NLS
//
//   i v_tau + i a(tau) (xi v_xi + v/sigma) + Lap v + |v|^{2 sigma} v = 0,
//   u(r,t) = L^{-1/sigma} v(r/L, tau),  a = -d ln L / d tau,  sigma = 2/d,
//
// discretized on the trimmed rational Chebyshev grid and marched with a
// Crank-Nicolson treatment of the Laplacian.

#include "blowup/ground_state.hpp"
#include "blowup/spectral_grid.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace blowup {

enum class Normalization { MaxNorm, GradientNorm };
enum class Stepper { CNAB, PredictorCorrector };

std::string to_string(Normalization n);
std::string to_string(Stepper s);

struct NlsConfig {
  int dim = 4;
  double amplitude = 5.0;          // u0 = A0 exp(-r^2/d)
  std::size_t nodes = 256;
  double kappa = 256.0;
  double dtau = 2e-3;
  Normalization normalization = Normalization::MaxNorm;
  Stepper stepper = Stepper::PredictorCorrector;
  double stop_focusing = 1e-17;    // stop once L < stop_focusing
  double max_tau = 1e9;
  int sample_every = 100;          // steps between trace samples
  std::vector<double> snapshot_taus{2.0, 40.0, 400.0};
  std::vector<double> checkpoint_levels;  // values of 1/L; empty selects the default ladder
  double ground_mass = 0.0;        // if > 0, used for the threshold flag
  double max_norm_drift = 1e-3;    // instability abort
  bool include_tail = true;        // add L^2/(2a) at the final step to T
};

// Focusing levels 1/L from 1e4 to 2e16, about a factor 15-30 apart.
std::vector<double> default_checkpoint_levels();

struct RescaledField {
  int dim = 0;
  double sigma = 0.0;
  double dtau = 0.0;
  CVec v;
  double tau = 0.0;
  double a = 0.0;
  double log_l = 0.0;
  long step = 0;
  std::vector<std::string> warnings;
  bool below_threshold = false;
};

struct TraceSample {
  long step = 0;
  double tau = 0.0;
  double log_l = 0.0;
  double a = 0.0;
  double dt = 0.0;              // dtau * L^2
  double time_to_blowup = 0.0;  // T - t, filled by run_until
  double mass = 0.0;            // of the reconstructed u
  double energy = 0.0;          // of the reconstructed u
  double max_norm = 0.0;        // ||v||_inf
};

struct Snapshot {
  double tau = 0.0;
  CVec v;
};

struct SimulationTrace {
  NlsConfig config;
  std::vector<TraceSample> samples;
  std::vector<TraceSample> checkpoints;
  std::vector<Snapshot> snapshots;
  CVec final_state;
  Vec xi;                         // grid nodes for snapshots
  double blowup_time = 0.0;       // T = sum of dt over the run (+ tail)
  double tail_time = 0.0;         // L_end^2 / (2 a_end), or 0
  double forward_time = 0.0;      // sum of dt accumulated forward, without tail
  double max_norm_error = 0.0;    // max ||v||_inf - min ||v||_inf
  double final_tau = 0.0;
  double final_log_l = 0.0;
  long steps = 0;
  bool stopped_on_focusing = false;
  std::vector<std::string> warnings;
};

struct NlsError : std::runtime_error {
  NlsError(const std::string& what, long at_step) : std::runtime_error(what), step(at_step) {}
  long step;
};

class RescaledSolver {
 public:
  explicit RescaledSolver(const NlsConfig& cfg);

  const RescaledField& state() const { return state_; }
  const ChebyshevGrid& grid() const { return grid_; }
  const NlsConfig& config() const { return cfg_; }

  // Nonlinear part N(v) = i a (xi v_xi + v/sigma) + |v|^{2 sigma} v for a given a.
  CVec nonlinear(const CVec& v, double a) const;
  CVec laplacian(const CVec& v) const;
  double rate(const CVec& v) const;  // a(v) under the configured normalization
  double rate_max_norm(const CVec& v) const;
  double rate_gradient(const CVec& v) const;

  double mass(const CVec& v) const;         // int |v|^2 xi^{d-1}
  double energy(const CVec& v) const;       // 1/2 int |v'|^2 - 1/(2 sigma+2) int |v|^{2 sigma+2}

  // One advance by dtau; the first call uses the second-order start-up step.
  void step();
  // Linear-only advance (nonlinearity and a-term off), used for oracle checks.
  void step_linear();

  // Replace the state, e.g. with a gauge-rotated or custom datum. Resets history.
  void reset(const CVec& v);

 private:
  CVec solve_m(CVec rhs) const;
  CVec explicit_part(const CVec& v, const CVec& lap_v) const;

  NlsConfig cfg_;
  ChebyshevGrid grid_;
  Mat lap_t_;   // transposed Laplacian (applied to interleaved re/im data)
  Mat d1_t_;
  Vec lap_row0_;
  CMat m_inv_;
  double v0_origin_sq_ = 1.0;
  double grad_norm0_ = 1.0;
  RescaledField state_;
  CVec lap_cur_;
  CVec n_cur_;
  CVec n_prev_;
  bool have_prev_ = false;
};

// Runs from the configured Gaussian datum until L < stop_focusing or tau > max_tau.
// `progress` (optional) is called with the state every sample.
SimulationTrace run_until(const NlsConfig& cfg,
                          const std::function<void(const RescaledField&)>& progress = {});

// Initial datum v0 with v0(0)=1 and the matching ln L(0) = -sigma ln A0.
struct InitialDatum {
  CVec v;
  double log_l0 = 0.0;
  double u0_mass = 0.0;
};
InitialDatum gaussian_datum(const ChebyshevGrid& grid, int dim, double amplitude);

// Mass of A0 exp(-r^2/d), in closed form: A0^2 Gamma(d/2) (d/2)^{d/2} / 2.
double gaussian_mass(int dim, double amplitude);

// Sup of ||v| - Q(s xi)/Q(0)| with s = Q(0)^{-sigma}, over the core where the
// rescaled ground state stays above core_level (it equals 1 at the origin).
struct ProfileDeviation {
  double sup_error = 0.0;
  double core_radius = 0.0;
  int points = 0;
};
ProfileDeviation profile_deviation(const GroundStateProfile& prof, const Vec& xi, const Vec& modulus,
                                   double core_level = 1e-2);

// Trace CSV, checkpoints CSV, snapshots (including snapshot_final.csv) and run.json.
void export_trace(const SimulationTrace& trace, const std::string& dir);

}  // namespace blowup
