#pragma once

// Positive radial ground state of  -Delta Q + Q - Q^p = 0  on [0, L].
//
// The solver works with the weighted profile P = Q e^r, which stays O(1) in
// the tail, so the far field is resolved to relative rather than absolute
// precision. The default exponent is the L2-critical one, p = 1 + 4/d.

#include "blowup/spectral_grid.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace blowup {

struct SolverError : std::runtime_error {
  SolverError(const std::string& what, double last_residual)
      : std::runtime_error(what), residual(last_residual) {}
  double residual;
};

double critical_power(int dim);

struct GroundStateOptions {
  double power = 0.0;        // 0 selects 1 + 4/d
  double tol = 1e-13;        // Newton step, relative to max |P|
  int max_newton = 60;
  int max_fixed_point = 400;
  double seed_amplitude = 0.0;  // 0 selects a dimension-dependent default
};

struct SolveReport {
  int fixed_point_iterations = 0;
  int newton_iterations = 0;
  double residual = 0.0;         // sup-norm of the discrete equation
  double scaled_residual = 0.0;  // residual divided by row magnitudes
  double last_step = 0.0;
};

// Newton on the weighted equation
//   P'' - 2P' + (d-1)/r (P' - P) + P^p e^{-(p-1) r} = 0,
//   P'(0) = P(0),   (d-1) P(L) + 2L P'(L) = 0.
// For d = 1 the outer condition reduces to P'(L) = 0.
// Throws SolverError on non-convergence or collapse to zero.
Vec solve_weighted_profile(int dim, const ChebyshevGrid& grid,
                           const GroundStateOptions& opts = {},
                           SolveReport* report = nullptr);

// Same problem posed directly for Q with Q'(0)=0, Q(L)=0. Used as a cross-check.
Vec solve_direct_profile(int dim, const ChebyshevGrid& grid,
                         const GroundStateOptions& opts = {},
                         SolveReport* report = nullptr);

struct GroundStateProfile {
  int dim = 0;
  double power = 0.0;
  ChebyshevGrid grid;
  Vec p_vals;
  Vec q_vals;
  Vec qr_vals;
  Vec q1_vals;   // (d/2) Q + r Q'
  Vec q2_vals;   // (d/2) Q1 + r Q1'
  Vec v1_vals;   // p * v2
  Vec v2_vals;   // ((p-1)/2) Q^{p-2} r Q'
  Vec qpow_vals; // Q^{p-1}
  double mass = 0.0;
  double nc = 0.0;
  double m_const = 0.0;
  double nu0 = 0.0;
  double c_nu = 0.0;
  SolveReport report;
};

// Builds all derived fields from P. Throws std::domain_error if P <= 0 somewhere.
GroundStateProfile derive_fields(const ChebyshevGrid& grid, const Vec& p_vals, int dim,
                                 double power = 0.0);

// Amplitude of Q ~ nu0 r^{-(d-1)/2} e^{-r}, fitted on [r_lo, r_hi]. The fit
// divides out the exact linear tail r^{1-d/2} K_{d/2-1}(r) so that the
// window needs no large-r extrapolation.
double fit_tail_amplitude(const GroundStateProfile& prof, double r_lo, double r_hi);

// Window used by derived_constants: starts once Q^{p-1} has fallen by 1e-10.
std::pair<double, double> tail_window(const GroundStateProfile& prof);

struct DerivedConstants {
  double nc = 0.0;
  double m_const = 0.0;
  double nu0 = 0.0;
  double c_nu = 0.0;
};
DerivedConstants derived_constants(const GroundStateProfile& prof);

// Default setup: interval grid n=1024, L=100.
GroundStateProfile compute_ground_state(int dim, const GroundStateOptions& opts = {},
                                        std::size_t n = 1024, double length = 100.0);

// sup |Q_direct - P e^{-r}| with Q_direct from solve_direct_profile on the same grid.
double weighted_profile_gap(const GroundStateProfile& prof);

// sup |Q - 3^{1/4} sech^{1/2}(2r)|, d = 1 only (throws otherwise).
double explicit_profile_error(const GroundStateProfile& prof);

// True if `values` (on the profile grid) is monotone for r >= r_from.
bool monotone_beyond(const GroundStateProfile& prof, const Vec& values, double r_from);

// Writes <stem>.csv (r, Q, Q1, Q2, V1, V2) and <stem>.json (constants, grid).
void export_profile(const GroundStateProfile& prof, const std::string& stem);

}  // namespace blowup
