#pragma once

// Chebyshev Gauss-Lobatto collocation for radial problems.
//
// Two maps are supported:
//   * Rational: xi = kappa (1+z)/(1-z) takes [-1,1) onto the half-line [0,inf).
//     Half of the nodes land in [0,kappa]. The node at z=1 (xi=inf) is removed
//     so that functions vanishing at infinity are represented by N values.
//   * Interval: r = length (1+z)/2 takes [-1,1] onto [0,length]; all N+1 nodes
//     are kept and boundary rows are substituted by the consumer.
//
// Nodes are stored in increasing radius, so index 0 is always the origin.

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace blowup {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

enum class GridMap { Rational, Interval };

struct ChebyshevGrid {
  std::size_t n = 0;        // polynomial degree N (N+1 Gauss-Lobatto points)
  GridMap map = GridMap::Rational;
  double scale = 0.0;       // kappa for Rational, domain length for Interval
  bool trim_last = false;   // node at xi=inf removed

  Vec z;                    // retained nodes in z, increasing
  Vec xi;                   // retained nodes in xi, increasing, xi[0]=0
  Mat d1;                   // d/dxi on retained nodes
  Mat d2;                   // d^2/dxi^2 on retained nodes
  Vec quad_weights;         // Clenshaw-Curtis weights times dxi/dz

  std::size_t size() const { return static_cast<std::size_t>(xi.size()); }
  double kappa() const { return scale; }
  double length() const { return scale; }

  // Barycentric interpolation of nodal values at an arbitrary point inside
  // the mapped domain (finite nodes only).
  double interpolate(std::span<const double> values, double x) const;
  Vec interpolate(const Vec& values, const Vec& points) const;

 private:
  friend ChebyshevGrid build_grid(std::size_t, double, bool);
  friend ChebyshevGrid build_interval_grid(std::size_t, double);
  Vec bary_w_;
  Vec z_full_;
};

// Gauss-Lobatto points cos(j pi / N), j=0..N (decreasing from 1 to -1).
Vec gauss_lobatto_points(std::size_t n);

// Differentiation matrix on the points above, negative-sum-trick diagonal.
Mat chebyshev_diff_matrix(std::size_t n);

// Clenshaw-Curtis weights on the points above.
Vec clenshaw_curtis_weights(std::size_t n);

// Half-line grid. Throws std::invalid_argument for n < 8 or kappa <= 0.
ChebyshevGrid build_grid(std::size_t n, double kappa, bool trim = true);

// Finite interval [0, length] with all N+1 nodes.
ChebyshevGrid build_interval_grid(std::size_t n, double length);

// Discretized radial operator restricted to the degree-k spherical harmonic:
//   matrix = d2 + (d-1)/xi d1 - k(k+d-2)/xi^2.
// At xi=0 the (d-1)/xi d1 term is replaced by (d-1) d2 (L'Hopital), so the
// origin row is d * d2 row. The centrifugal term is omitted in the origin row;
// consumers with k>0 substitute that row by a boundary condition.
struct RadialOperator {
  Mat matrix;
  int dim = 0;
  int harmonic = 0;
  bool origin_lhopital = true;
};

RadialOperator radial_laplacian(const ChebyshevGrid& grid, int dim, int harmonic = 0);

// Chebyshev coefficients c_n with f(z) = sum c_n T_n(z) from values on all
// N+1 Gauss-Lobatto nodes ordered by increasing z. For a trimmed grid pass the
// N retained values; the node at infinity is padded with 0.
Vec chebyshev_coefficients(const Vec& values);
Vec chebyshev_coefficients(const ChebyshevGrid& grid, const Vec& values);

// Evaluate sum c_n T_n(z).
double chebyshev_synthesis(const Vec& coeffs, double z);

// Max |c_n| over the last `fraction` of indices.
double coefficient_tail(const Vec& coeffs, double fraction = 0.1);

// Integral of f(xi) xi^{d-1} over the grid's domain. Angular measure omitted.
double weighted_quadrature(const ChebyshevGrid& grid, const Vec& values, int dim);

struct QuadratureCheck {
  double value = 0.0;
  bool decayed = true;  // |integrand| at the last node <= 1e-10 * max
};
QuadratureCheck weighted_quadrature_checked(const ChebyshevGrid& grid, const Vec& values, int dim);

// Inner product <f,g> = int f g xi^{d-1} dxi.
double inner(const ChebyshevGrid& grid, const Vec& f, const Vec& g, int dim);

}  // namespace blowup
