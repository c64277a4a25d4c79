#pragma once

// Index counting and bilinear forms for the operators
//   L_i^(k) = -d_rr - (d-1)/r d_r + V_i(r) + k(k+d-2)/r^2,   i = 1, 2,
// where V_1, V_2 are the ground-state potentials (V_1 = p V_2 < 0).
//
// Indices come from zero counts of the zero-energy IVP in the reduced
// variable U = r^k W:
//   -W'' - (d-1+2k)/r W' + V W = 0,   W(0) = 1, W'(0) = 0,
// cross-checked by a Sturm count of a finite-difference discretization.
// Forms come from dense Chebyshev collocation solves of L u = f on [0, L]
// with an artificial outer condition standing in for u(inf) = 0.

#include "blowup/ground_state.hpp"
#include "blowup/io.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace blowup {

enum class OperatorKind { L1, L2 };
std::string to_string(OperatorKind op);

// V_1 or V_2 from the profile; zero beyond the profile domain.
class RadialPotential {
 public:
  RadialPotential(const GroundStateProfile& prof, OperatorKind op);
  explicit RadialPotential(double constant);  // V = constant everywhere (tests)
  RadialPotential(std::function<double(double)> f, double domain);  // f on [0, domain], zero beyond
  double operator()(double r) const;
  double domain() const { return domain_; }

 private:
  const ChebyshevGrid* grid_ = nullptr;
  Vec vals_;
  std::function<double(double)> fn_;
  double constant_ = 0.0;
  double domain_ = 0.0;
};

enum class TailKind { Constant, Growth, Decay, Unresolved };
std::string to_string(TailKind t);

// Tail data for U = r^k W with W ~ A + B r^{-(d-2+2k)} in the free region.
struct TailFit {
  TailKind kind = TailKind::Unresolved;
  double c1 = 0.0;      // coefficient of the decaying piece (k=0: of r^{2-d})
  double c2 = 0.0;      // the constant (k=0) or the r^k coefficient
  double slope = 0.0;   // d ln|U| / d ln r over the last samples
  bool stabilized = false;
};

// (C1, C2) with C1/r^e + C2 = U at two radii.
std::pair<double, double> free_tail_constants(double r0, double u0, double r1, double u1, double exponent);

// Classifies U samples (increasing r, free region) for channel k in dimension d.
// k = 0: C2 from consecutive pairs, stabilized when C2 over the last 20
// samples varies by less than 1e-6 relative. k > 0: log-log slope of |U|
// compared with +k and 2-d-k.
TailFit classify_tail(const std::vector<double>& r, const std::vector<double>& u, int dim, int harmonic);

enum class StopRule { Positivity, TailStabilized, MaxRadius, StepFailure };
std::string to_string(StopRule s);

struct PositivityEvidence {
  double r0 = 0.0;
  double sign_product = 0.0;   // u'(r0) u(r0)
  double worst_margin = 0.0;   // max over r >= r0 of V+(r) - (d-2)^2/(4 r^2)
  double failing_radius = 0.0; // where worst_margin is attained, if positive
  double printed_column = 0.0; // -V1(r0) - (d-2)^2/(4 r0), the tabulated quantity
  bool holds = false;
};

struct IvpOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  double r_start = 1e-4;
  double r_max = 200.0;
  double sample_step = 0.25;
  double free_threshold = 1e-12;  // |V| below this counts as free
  bool use_positivity = true;     // L1, k = 0, d >= 3
};

struct IndexResult {
  int dim = 0;
  int harmonic = 0;
  OperatorKind op = OperatorKind::L1;
  int zero_count = 0;
  std::vector<double> zeros;
  TailFit tail;
  double termination_radius = 0.0;
  StopRule stop = StopRule::MaxRadius;
  std::optional<PositivityEvidence> positivity;
  std::vector<double> r;  // samples of U = r^k W
  std::vector<double> u;
  std::vector<double> du;
  std::vector<std::string> notes;
};

IndexResult count_index(const RadialPotential& v, int dim, int harmonic, OperatorKind op,
                        const IvpOptions& opts = {});
IndexResult count_index(const GroundStateProfile& prof, int harmonic, OperatorKind op,
                        const IvpOptions& opts = {});

// Criterion evaluated on an integrated solution at r0. The potential bound
// uses the sign convention -u'' - (d-1)/r u' - V u = 0, so V+ = max(-V1, 0).
PositivityEvidence positivity_criterion(const IndexResult& ivp, const RadialPotential& v, int dim, double r0);

// Smallest radius beyond which V+(r) <= (d-2)^2/(4r^2) everywhere (d >= 3).
double potential_bound_radius(const RadialPotential& v, int dim);

// Second-order cell-centred discretization of the reduced operator on [0, L]
// with weight r^{d-1+2k} and Dirichlet data at L.
struct FiniteDifferenceSpectrum {
  int negative_count = 0;
  double lowest = 0.0;  // lowest eigenvalue if negative_count > 0
};
int sturm_count(const RadialPotential& v, int dim, int harmonic, double shift, int cells = 4000, double length = 100.0);
FiniteDifferenceSpectrum fd_spectrum(const RadialPotential& v, int dim, int harmonic, int cells = 4000,
                                     double length = 100.0);

enum class OuterCondition { Decay, Neumann };

struct BvpOptions {
  OuterCondition outer = OuterCondition::Decay;
  bool reduced_form = false;    // solve for W = u / r^k instead of u
  double max_condition = 1e14;
};

struct BvpSolution {
  Vec u;
  double residual = 0.0;       // sup over interior rows of |L u - f|
  double rel_residual = 0.0;   // residual / max |f|
  double condition = 0.0;      // estimate after row equilibration
};

// Solves (-Delta_k + V) u = f on the grid nodes. Origin row: u'(0)=0 for k=0,
// u(0)=0 for k>0 (W'(0)=0 in reduced form). Outer row: u + L/(d-2+k) u' = 0
// (W + L/(d-2+2k) W' = 0 in reduced form) or u'(L) = 0.
// Throws SolverError when the equilibrated condition estimate exceeds the limit.
BvpSolution solve_radial_bvp(const ChebyshevGrid& grid, int dim, int harmonic, const Vec& potential,
                             const Vec& rhs, const BvpOptions& opts = {});
BvpSolution solve_operator_bvp(const GroundStateProfile& prof, int harmonic, OperatorKind op, const Vec& rhs,
                               const BvpOptions& opts = {});

struct FormMatrix {
  double m11 = 0.0, m12 = 0.0, m21 = 0.0, m22 = 0.0;
  double det() const { return m11 * m22 - m12 * m21; }
  double sym_residual() const { return std::abs(m12 / m21 - 1.0); }
};

struct BilinearForms {
  FormMatrix k;  // L1 U = Q, L1 U = Q1
  FormMatrix j;  // L2 Z = Q1, L2 Z = Q2
  double max_residual = 0.0;
};
BilinearForms bilinear_matrix(const GroundStateProfile& prof, const BvpOptions& opts = {});

// <L2 Z, Z> with L2 Z = Q.
double property2_form(const GroundStateProfile& prof, const BvpOptions& opts = {});

struct HarmonicForms {
  double k11_1 = 0.0;                // L1^(1) U = rQ
  double j11_1 = 0.0;                // L2^(1) Z = Q_r
  std::optional<double> k11_2;       // L1^(2) U = rQ
};
HarmonicForms harmonic_forms(const GroundStateProfile& prof, bool with_second, const BvpOptions& opts = {});

// Cubic d=3 check: K11 = <Q, U> with L1 U = Q and J11 = <Q + rQ_r, Z> with
// L2 Z = Q + rQ_r, on the p = 3 ground state.
struct CubicCheck {
  double k11 = 0.0;
  double j11 = 0.0;
};
CubicCheck supercritical_crosscheck(std::size_t n = 1024, double length = 100.0);

Json to_json(const IndexResult& r);
Json to_json(const BilinearForms& f);
Json to_json(const HarmonicForms& h);

}  // namespace blowup
