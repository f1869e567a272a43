#pragma once
// Univariate polynomial machinery: probabilists' Hermite polynomials (plain
// and orthonormal), Gaussian moments, Chebyshev representations with Clenshaw
// evaluation, Chebyshev interpolation, and Hermite expansions of polynomials.

#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace sparselab {

inline constexpr double kPi = 3.14159265358979323846;

// Degree guards keep every path in double precision with certified
// tolerances. Unnormalized Hermite values leave the comfortable double range
// past degree ~64; Chebyshev evaluation is certified stable up to 1e4.
inline constexpr int kMaxHermiteDegree = 64;
inline constexpr int kMaxChebyshevDegree = 10000;
inline constexpr int kMaxAbsMomentOrder = 128;

namespace detail {

inline void check_hermite_degree(int n, const char* fn) {
  if (n < 0) throw std::domain_error(std::string(fn) + ": negative degree");
  if (n > kMaxHermiteDegree) {
    throw std::domain_error(std::string(fn) + ": degree " + std::to_string(n) +
                            " exceeds the supported limit " +
                            std::to_string(kMaxHermiteDegree));
  }
}

}  // namespace detail

// He_n(x) from the three-term recurrence He_{n+1} = x·He_n − n·He_{n−1},
// He_0 = 1, He_1 = x.
inline double hermite_he(int n, double x) {
  detail::check_hermite_degree(n, "hermite_he");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int k = 1; k < n; ++k) {
    const double next = x * cur - static_cast<double>(k) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

// Orthonormal Hermite polynomial H_n = He_n / sqrt(n!). The normalization is
// folded into the recurrence, H_{n+1} = (x·H_n − sqrt(n)·H_{n−1}) / sqrt(n+1),
// so no factorial is ever materialized.
inline double hermite_normalized(int n, double x) {
  detail::check_hermite_degree(n, "hermite_normalized");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int k = 1; k < n; ++k) {
    const double next =
        (x * cur - std::sqrt(static_cast<double>(k)) * prev) /
        std::sqrt(static_cast<double>(k + 1));
    prev = cur;
    cur = next;
  }
  return cur;
}

// H_0(x)..H_n(x) in one sweep of the recurrence.
inline void hermite_normalized_all(int n, double x, std::vector<double>& out) {
  detail::check_hermite_degree(n, "hermite_normalized_all");
  out.resize(static_cast<std::size_t>(n) + 1);
  out[0] = 1.0;
  if (n == 0) return;
  out[1] = x;
  for (int k = 1; k < n; ++k) {
    out[k + 1] = (x * out[k] - std::sqrt(static_cast<double>(k)) * out[k - 1]) /
                 std::sqrt(static_cast<double>(k + 1));
  }
}

// E[N(0, s^2)^p]: s^p (p−1)!! for even p, 0 for odd p.
inline double gaussian_moment(int p, double s) {
  if (p < 0 || p > kMaxAbsMomentOrder) {
    throw std::domain_error("gaussian_moment: order out of range");
  }
  if (p % 2 == 1) return 0.0;
  double dd = 1.0;
  for (int j = p - 1; j > 1; j -= 2) dd *= static_cast<double>(j);
  return std::pow(s, p) * dd;
}

// E[|N(0, s^2)|^j]: s^j (j−1)!! for even j,
// s^j 2^{(j−1)/2} ((j−1)/2)! sqrt(2/pi) for odd j.
inline double gaussian_abs_moment(int j, double s) {
  if (j < 0 || j > kMaxAbsMomentOrder) {
    throw std::domain_error("gaussian_abs_moment: order out of range");
  }
  if (j % 2 == 0) return gaussian_moment(j, s);
  const int h = (j - 1) / 2;
  double fact = 1.0;
  for (int t = 2; t <= h; ++t) fact *= static_cast<double>(t);
  return std::pow(s, j) * std::pow(2.0, h) * fact * std::sqrt(2.0 / kPi);
}

enum class PolyBasis { Monomial, Chebyshev };

// A univariate polynomial in a declared basis. Chebyshev coefficients refer
// to T_k of the affine map of [a, b] onto [-1, 1]; evaluation outside [a, b]
// is well defined but is extrapolation (see in_domain).
struct Polynomial {
  PolyBasis basis = PolyBasis::Monomial;
  double a = -1.0;
  double b = 1.0;
  std::vector<double> coeffs{0.0};

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }

  bool in_domain(double x) const {
    return basis == PolyBasis::Monomial || (x >= a && x <= b);
  }

  static Polynomial monomial(std::vector<double> c) {
    Polynomial p;
    p.basis = PolyBasis::Monomial;
    p.coeffs = normalized(std::move(c));
    return p;
  }

  static Polynomial chebyshev(std::vector<double> c, double a, double b) {
    if (!(a < b)) throw std::invalid_argument("Polynomial: requires a < b");
    Polynomial p;
    p.basis = PolyBasis::Chebyshev;
    p.a = a;
    p.b = b;
    p.coeffs = normalized(std::move(c));
    return p;
  }

 private:
  // Trailing coefficient may be zero only at degree 0.
  static std::vector<double> normalized(std::vector<double> c) {
    if (c.empty()) c.push_back(0.0);
    while (c.size() > 1 && c.back() == 0.0) c.pop_back();
    return c;
  }
};

// Horner for the monomial basis, Clenshaw for Chebyshev.
inline double poly_eval(const Polynomial& p, double x) {
  const int d = p.degree();
  if (p.basis == PolyBasis::Monomial) {
    double acc = p.coeffs[d];
    for (int k = d - 1; k >= 0; --k) acc = acc * x + p.coeffs[k];
    return acc;
  }
  // a + b computed once; for symmetric intervals this keeps the map exactly
  // odd, which the soft-threshold construction relies on.
  const double t = (2.0 * x - (p.a + p.b)) / (p.b - p.a);
  double b1 = 0.0, b2 = 0.0;
  for (int k = d; k >= 1; --k) {
    const double next = p.coeffs[k] + 2.0 * t * b1 - b2;
    b2 = b1;
    b1 = next;
  }
  return p.coeffs[0] + t * b1 - b2;
}

// Chebyshev interpolant of f at the d+1 Chebyshev points of [a, b]
// (near-minimax: within a 1 + (2/pi)log(d+1) factor of the best degree-d
// approximation). Coefficients come from the standard cosine-sum formula;
// the O(d^2) direct summation is fine at the supported degrees.
inline Polynomial cheb_project(const std::function<double(double)>& f, int d,
                               double a, double b) {
  if (d < 0) throw std::invalid_argument("cheb_project: negative degree");
  if (d > kMaxChebyshevDegree) {
    throw std::invalid_argument("cheb_project: degree " + std::to_string(d) +
                                " exceeds the supported limit " +
                                std::to_string(kMaxChebyshevDegree));
  }
  if (!(a < b)) throw std::invalid_argument("cheb_project: requires a < b");
  const int n = d + 1;
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::vector<double> theta(n), fx(n);
  for (int j = 0; j < n; ++j) {
    theta[j] = kPi * (j + 0.5) / n;
    const double x = mid + half * std::cos(theta[j]);
    fx[j] = f(x);
    if (!std::isfinite(fx[j])) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g", x);
      throw std::runtime_error(
          std::string("cheb_project: non-finite function value at node x=") +
          buf);
    }
  }
  std::vector<double> c(n, 0.0);
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += fx[j] * std::cos(k * theta[j]);
    c[k] = 2.0 * acc / n;
  }
  c[0] *= 0.5;
  return Polynomial::chebyshev(std::move(c), a, b);
}

// f(x) = sum_k coeffs[k] H_k(x / scale); orthonormal for x ~ N(0, scale^2),
// so sum coeffs^2 = E[f(X)^2] (Plancherel).
struct HermiteExpansion {
  double scale = 1.0;
  std::vector<double> coeffs{0.0};

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

// Gauss–Hermite rule for the standard normal weight via Golub–Welsch:
// eigenvalues of the Jacobi matrix (diag 0, off-diagonal sqrt(k)) are the
// nodes, squared first eigenvector components the weights. Exact for
// polynomials of degree <= 2n−1.
inline std::pair<std::vector<double>, std::vector<double>> gauss_hermite(
    int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: need n >= 1");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double off = std::sqrt(static_cast<double>(k));
    jacobi(k, k - 1) = off;
    jacobi(k - 1, k) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  std::vector<double> nodes(n), weights(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    weights[i] = v0 * v0;
  }
  return {std::move(nodes), std::move(weights)};
}

inline double hermite_expansion_eval(const HermiteExpansion& h, double x) {
  const double u = x / h.scale;
  const int d = h.degree();
  double prev = 1.0;
  double acc = h.coeffs[0];
  if (d == 0) return acc;
  double cur = u;
  acc += h.coeffs[1] * cur;
  for (int k = 1; k < d; ++k) {
    const double next =
        (u * cur - std::sqrt(static_cast<double>(k)) * prev) /
        std::sqrt(static_cast<double>(k + 1));
    prev = cur;
    cur = next;
    acc += h.coeffs[k + 1] * cur;
  }
  return acc;
}

// Coefficients of p in the orthonormal Hermite basis at the given scale:
// coeffs[k] = E[p(X) H_k(X/scale)], X ~ N(0, scale^2). The quadrature order
// makes every integral exact for polynomial p.
inline HermiteExpansion hermite_expand(const Polynomial& p, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("hermite_expand: scale > 0");
  const int d = p.degree();
  detail::check_hermite_degree(d, "hermite_expand");
  const auto [nodes, weights] = gauss_hermite(d + 1);
  HermiteExpansion h;
  h.scale = scale;
  h.coeffs.assign(static_cast<std::size_t>(d) + 1, 0.0);
  std::vector<double> basis;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double px = poly_eval(p, scale * nodes[i]);
    hermite_normalized_all(d, nodes[i], basis);
    for (int k = 0; k <= d; ++k) h.coeffs[k] += weights[i] * px * basis[k];
  }
  return h;
}

}  // namespace sparselab
