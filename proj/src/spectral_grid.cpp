#include "blowup/spectral_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace blowup {

namespace {

constexpr double kPi = std::numbers::pi;

// Reverse row and column order: standard (decreasing z) -> increasing z.
Mat flip(const Mat& m) { return m.reverse(); }

Vec barycentric_weights(std::size_t n) {
  Vec w(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    w(j) = (j % 2 == 0) ? 1.0 : -1.0;
    if (j == 0 || j == n) w(j) *= 0.5;
  }
  return w;
}

double map_to_z(const ChebyshevGrid& g, double x) {
  if (g.map == GridMap::Rational) return (x - g.scale) / (x + g.scale);
  return 2.0 * x / g.scale - 1.0;
}

}  // namespace

Vec gauss_lobatto_points(std::size_t n) {
  Vec x(n + 1);
  for (std::size_t j = 0; j <= n; ++j) x(j) = std::cos(kPi * double(j) / double(n));
  // Exact symmetry.
  for (std::size_t j = 0; j <= n / 2; ++j) {
    x(n - j) = -x(j);
  }
  if (n % 2 == 0) x(n / 2) = 0.0;
  return x;
}

Mat chebyshev_diff_matrix(std::size_t n) {
  const auto N = static_cast<Eigen::Index>(n);
  Mat d = Mat::Zero(N + 1, N + 1);
  auto c = [&](Eigen::Index i) { return (i == 0 || i == N) ? 2.0 : 1.0; };
  for (Eigen::Index i = 0; i <= N; ++i) {
    for (Eigen::Index j = 0; j <= N; ++j) {
      if (i == j) continue;
      // x_i - x_j written with sines for accuracy near the endpoints.
      const double diff = 2.0 * std::sin(kPi * double(i + j) / (2.0 * double(n))) *
                          std::sin(kPi * double(j - i) / (2.0 * double(n)));
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      d(i, j) = sign * c(i) / (c(j) * diff);
    }
  }
  for (Eigen::Index i = 0; i <= N; ++i) d(i, i) = -d.row(i).sum();
  return d;
}

Vec clenshaw_curtis_weights(std::size_t n) {
  const auto N = static_cast<Eigen::Index>(n);
  Vec w = Vec::Zero(N + 1);
  Vec v = Vec::Ones(N - 1);
  const double nn = double(n);
  auto theta = [&](Eigen::Index i) { return kPi * double(i) / nn; };
  if (n % 2 == 0) {
    w(0) = 1.0 / (nn * nn - 1.0);
    w(N) = w(0);
    for (Eigen::Index k = 1; k < N / 2; ++k)
      for (Eigen::Index i = 1; i < N; ++i)
        v(i - 1) -= 2.0 * std::cos(2.0 * double(k) * theta(i)) / (4.0 * double(k * k) - 1.0);
    for (Eigen::Index i = 1; i < N; ++i) v(i - 1) -= std::cos(nn * theta(i)) / (nn * nn - 1.0);
  } else {
    w(0) = 1.0 / (nn * nn);
    w(N) = w(0);
    for (Eigen::Index k = 1; k <= (N - 1) / 2; ++k)
      for (Eigen::Index i = 1; i < N; ++i)
        v(i - 1) -= 2.0 * std::cos(2.0 * double(k) * theta(i)) / (4.0 * double(k * k) - 1.0);
  }
  for (Eigen::Index i = 1; i < N; ++i) w(i) = 2.0 * v(i - 1) / nn;
  return w;
}

ChebyshevGrid build_grid(std::size_t n, double kappa, bool trim) {
  if (n < 8) throw std::invalid_argument("build_grid: need n >= 8 collocation intervals");
  if (!(kappa > 0.0)) throw std::invalid_argument("build_grid: kappa must be positive");

  const auto N = static_cast<Eigen::Index>(n);
  const Vec zf = gauss_lobatto_points(n).reverse();
  const Mat dz = flip(chebyshev_diff_matrix(n));
  Mat dz2 = dz * dz;
  for (Eigen::Index i = 0; i <= N; ++i) {
    dz2(i, i) = 0.0;
    dz2(i, i) = -dz2.row(i).sum();
  }
  const Vec cc = clenshaw_curtis_weights(n).reverse();

  // z' = dz/dxi = 2k/(xi+k)^2 = (1-z)^2/(2k), z'' = -(1-z)^3/(2k^2).
  Vec zp(N + 1), zpp(N + 1), xif(N + 1), jac(N + 1);
  for (Eigen::Index i = 0; i <= N; ++i) {
    const double om = 1.0 - zf(i);
    zp(i) = om * om / (2.0 * kappa);
    zpp(i) = -om * om * om / (2.0 * kappa * kappa);
    xif(i) = (i == N) ? std::numeric_limits<double>::infinity() : kappa * (1.0 + zf(i)) / om;
    jac(i) = (i == N) ? 0.0 : 2.0 * kappa / (om * om);
  }
  xif(0) = 0.0;

  const Mat d1f = zp.asDiagonal() * dz;
  const Mat d2f = (zp.array().square()).matrix().asDiagonal() * dz2 + zpp.asDiagonal() * dz;

  ChebyshevGrid g;
  g.n = n;
  g.map = GridMap::Rational;
  g.scale = kappa;
  g.trim_last = trim;
  g.bary_w_ = barycentric_weights(n).reverse();
  g.z_full_ = zf;
  const Eigen::Index m = trim ? N : N + 1;
  g.z = zf.head(m);
  g.xi = xif.head(m);
  g.d1 = d1f.topLeftCorner(m, m);
  g.d2 = d2f.topLeftCorner(m, m);
  g.quad_weights = (cc.array() * jac.array()).matrix().head(m);
  return g;
}

ChebyshevGrid build_interval_grid(std::size_t n, double length) {
  if (n < 8) throw std::invalid_argument("build_interval_grid: need n >= 8 collocation intervals");
  if (!(length > 0.0)) throw std::invalid_argument("build_interval_grid: length must be positive");
  const auto N = static_cast<Eigen::Index>(n);
  const Vec zf = gauss_lobatto_points(n).reverse();
  const Mat dz = flip(chebyshev_diff_matrix(n));
  Mat dz2 = dz * dz;
  for (Eigen::Index i = 0; i <= N; ++i) {
    dz2(i, i) = 0.0;
    dz2(i, i) = -dz2.row(i).sum();
  }
  const double s = 2.0 / length;

  ChebyshevGrid g;
  g.n = n;
  g.map = GridMap::Interval;
  g.scale = length;
  g.trim_last = false;
  g.bary_w_ = barycentric_weights(n).reverse();
  g.z_full_ = zf;
  g.z = zf;
  g.xi = (length * 0.5) * (zf.array() + 1.0).matrix();
  g.xi(0) = 0.0;
  g.xi(N) = length;
  g.d1 = s * dz;
  g.d2 = (s * s) * dz2;
  g.quad_weights = (length * 0.5) * clenshaw_curtis_weights(n).reverse();
  return g;
}

double ChebyshevGrid::interpolate(std::span<const double> values, double x) const {
  const double zx = map_to_z(*this, x);
  const auto total = static_cast<Eigen::Index>(n) + 1;
  const Vec& zf = z_full_;
  double num = 0.0, den = 0.0;
  for (Eigen::Index j = 0; j < total; ++j) {
    const double fj = (j < static_cast<Eigen::Index>(values.size())) ? values[j] : 0.0;
    const double diff = zx - zf(j);
    if (diff == 0.0) return fj;
    const double t = bary_w_(j) / diff;
    num += t * fj;
    den += t;
  }
  return num / den;
}

Vec ChebyshevGrid::interpolate(const Vec& values, const Vec& points) const {
  const Vec& zf = z_full_;
  const auto total = static_cast<Eigen::Index>(n) + 1;
  Vec out(points.size());
  for (Eigen::Index p = 0; p < points.size(); ++p) {
    const double zx = map_to_z(*this, points(p));
    double num = 0.0, den = 0.0;
    bool hit = false;
    for (Eigen::Index j = 0; j < total; ++j) {
      const double fj = (j < values.size()) ? values(j) : 0.0;
      const double diff = zx - zf(j);
      if (diff == 0.0) {
        out(p) = fj;
        hit = true;
        break;
      }
      const double t = bary_w_(j) / diff;
      num += t * fj;
      den += t;
    }
    if (!hit) out(p) = num / den;
  }
  return out;
}

RadialOperator radial_laplacian(const ChebyshevGrid& grid, int dim, int harmonic) {
  // dim may exceed 12: reduced harmonic problems use d + 2k.
  if (dim < 1 || dim > 64) throw std::invalid_argument("radial_laplacian: dimension must be in 1..64");
  if (harmonic < 0) throw std::invalid_argument("radial_laplacian: harmonic must be >= 0");
  const auto m = static_cast<Eigen::Index>(grid.size());
  RadialOperator op;
  op.dim = dim;
  op.harmonic = harmonic;
  op.matrix = grid.d2;
  const double centrifugal = double(harmonic) * double(harmonic + dim - 2);
  for (Eigen::Index i = 1; i < m; ++i) {
    const double x = grid.xi(i);
    op.matrix.row(i) += (double(dim - 1) / x) * grid.d1.row(i);
    op.matrix(i, i) -= centrifugal / (x * x);
  }
  op.matrix.row(0) = double(dim) * grid.d2.row(0);
  return op;
}

Vec chebyshev_coefficients(const Vec& values) {
  const Eigen::Index n = values.size() - 1;
  if (n < 1) throw std::invalid_argument("chebyshev_coefficients: need at least two samples");
  const double nn = double(n);
  Vec c = Vec::Zero(n + 1);
  for (Eigen::Index k = 0; k <= n; ++k) {
    double s = 0.0;
    for (Eigen::Index j = 0; j <= n; ++j) {
      // increasing z_j = cos((N-j) pi / N)
      double term = values(j) * std::cos(double(k) * kPi * double(n - j) / nn);
      if (j == 0 || j == n) term *= 0.5;
      s += term;
    }
    c(k) = 2.0 * s / nn;
    if (k == 0 || k == n) c(k) *= 0.5;
  }
  return c;
}

Vec chebyshev_coefficients(const ChebyshevGrid& grid, const Vec& values) {
  if (!grid.trim_last) return chebyshev_coefficients(values);
  Vec padded = Vec::Zero(values.size() + 1);
  padded.head(values.size()) = values;
  return chebyshev_coefficients(padded);
}

double chebyshev_synthesis(const Vec& coeffs, double z) {
  // Clenshaw recurrence.
  double b1 = 0.0, b2 = 0.0;
  for (Eigen::Index k = coeffs.size() - 1; k >= 1; --k) {
    const double b0 = coeffs(k) + 2.0 * z * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return coeffs(0) + z * b1 - b2;
}

double coefficient_tail(const Vec& coeffs, double fraction) {
  const auto m = coeffs.size();
  const auto start = std::max<Eigen::Index>(0, m - std::max<Eigen::Index>(1, Eigen::Index(double(m) * fraction)));
  return coeffs.tail(m - start).cwiseAbs().maxCoeff();
}

double weighted_quadrature(const ChebyshevGrid& grid, const Vec& values, int dim) {
  return weighted_quadrature_checked(grid, values, dim).value;
}

QuadratureCheck weighted_quadrature_checked(const ChebyshevGrid& grid, const Vec& values, int dim) {
  if (values.size() != grid.xi.size())
    throw std::invalid_argument("weighted_quadrature: value count does not match grid");
  QuadratureCheck out;
  const auto m = values.size();
  double biggest = 0.0;
  double last = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double x = grid.xi(i);
    if (!std::isfinite(x)) continue;
    const double integrand = values(i) * std::pow(x, dim - 1);
    out.value += grid.quad_weights(i) * integrand;
    biggest = std::max(biggest, std::abs(integrand));
    last = std::abs(integrand);
  }
  out.decayed = !(last > 1e-10 * biggest);
  return out;
}

double inner(const ChebyshevGrid& grid, const Vec& f, const Vec& g, int dim) {
  return weighted_quadrature(grid, f.cwiseProduct(g), dim);
}

}  // namespace blowup
