#pragma once
// Low-degree polynomial approximations to ReLU and to the soft-threshold
// nonlinearity. The pipeline: anneal ReLU into the softplus g_beta (analytic
// on a Bernstein ellipse whose size is controlled by beta), Chebyshev-
// interpolate it, then shift and rescale. Accuracy is certified by a
// post-construction grid check against the closed-form error bounds; it is
// never assumed.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "polybasis.hpp"

namespace sparselab {

// (1/beta) log(1 + e^{beta x}): monotone, 1-Lipschitz, overflow-free over the
// whole double range.
inline double softplus_annealed(double beta, double x) {
  if (!(beta > 0.0)) {
    throw std::domain_error("softplus_annealed: requires beta > 0");
  }
  if (x > 0.0) return x + std::log1p(std::exp(-beta * x)) / beta;
  return std::log1p(std::exp(beta * x)) / beta;
}

// Parameter of the largest Bernstein ellipse (semi-minor axis pi/2beta) on
// which g_beta stays analytic with a usable bound.
inline double bernstein_rho1(double beta) {
  return (std::sqrt(4.0 * beta * beta + kPi * kPi) + kPi) / (2.0 * beta);
}

// Best-approximation error bound for g_beta on [-1, 1]:
// E_d(g_beta) <= (12 beta / pi) (1 + pi/2beta)^{-d}. Valid for beta > pi.
inline double bernstein_bound(double beta, int d) {
  if (!(beta > kPi)) {
    throw std::domain_error(
        "bernstein_bound: requires beta > pi (ellipse bound breaks down)");
  }
  if (d < 0) throw std::domain_error("bernstein_bound: negative degree");
  return (12.0 * beta / kPi) * std::pow(1.0 + kPi / (2.0 * beta), -d);
}

// Degree, transition width tau in (0, 1/2), half-range R, and the annealing
// schedule beta = sqrt(pi d / 4 tau). d >= 7 guarantees beta > pi for every
// admissible tau.
struct ReluPolySpec {
  int d = 7;
  double tau = 0.25;
  double R = 1.0;
  double beta = 0.0;

  static ReluPolySpec make(int d, double tau, double R) {
    if (d < 7) {
      throw std::invalid_argument(
          "relu poly spec: degree d >= 7 is required (got " +
          std::to_string(d) + ")");
    }
    if (!(tau > 0.0 && tau < 0.5)) {
      throw std::invalid_argument("relu poly spec: tau must lie in (0, 1/2)");
    }
    if (!(R > 0.0)) {
      throw std::invalid_argument("relu poly spec: R must be positive");
    }
    ReluPolySpec s;
    s.d = d;
    s.tau = tau;
    s.R = R;
    s.beta = std::sqrt(kPi * d / (4.0 * tau));
    return s;
  }
};

// Closed-form error envelopes for the construction below, one per region:
//   on [-R, 0]:  14 R sqrt(d / tau pi) e^{-sqrt(pi tau d / 4)}
//   on [0, R]:   2 R tau + 2 R sqrt(4 tau / pi d) + 12 R sqrt(d / tau pi) e^{...}
// The grid certification allows a factor 2 on top, absorbing the gap between
// Chebyshev interpolation and the best approximation.
struct ReluPolyErrorBounds {
  double neg = 0.0;
  double pos = 0.0;
};

inline constexpr double kInterpolationSlack = 2.0;

inline ReluPolyErrorBounds relu_poly_error_bounds(const ReluPolySpec& s) {
  const double decay = std::exp(-std::sqrt(kPi * s.tau * s.d / 4.0));
  const double root = std::sqrt(s.d / (s.tau * kPi));
  ReluPolyErrorBounds b;
  b.neg = 14.0 * s.R * root * decay;
  b.pos = 2.0 * s.R * s.tau + 2.0 * s.R * std::sqrt(4.0 * s.tau / (kPi * s.d)) +
          12.0 * s.R * root * decay;
  return b;
}

// Max |p - target| split into the negative part, positive part and a
// +-band neighborhood of zero, with the maximizing abscissas.
struct SupErrorReport {
  double err_neg = 0.0, arg_neg = 0.0;
  double err_pos = 0.0, arg_pos = 0.0;
  double err_band = 0.0, arg_band = 0.0;
};

inline SupErrorReport sup_error_profile(
    const Polynomial& p, const std::function<double(double)>& target, double a,
    double b, int gridsize, double band = 0.0) {
  if (gridsize < 2) throw std::invalid_argument("sup_error_profile: gridsize >= 2");
  if (!(a < b)) throw std::invalid_argument("sup_error_profile: requires a < b");
  SupErrorReport rep;
  rep.arg_neg = a;
  rep.arg_pos = b;
  auto scan = [&](double lo, double hi, double& err, double& arg) {
    for (int i = 0; i < gridsize; ++i) {
      const double x = lo + (hi - lo) * i / (gridsize - 1);
      const double e = std::abs(poly_eval(p, x) - target(x));
      if (e > err) {
        err = e;
        arg = x;
      }
    }
  };
  const double mid = std::clamp(0.0, a, b);
  if (a < mid) scan(a, mid, rep.err_neg, rep.arg_neg);
  if (mid < b) scan(mid, b, rep.err_pos, rep.arg_pos);
  const double blo = std::max(a, -band), bhi = std::min(b, band);
  if (blo <= bhi) scan(blo, bhi, rep.err_band, rep.arg_band);
  return rep;
}

inline constexpr int kCertificationGridSize = 10000;

// ReLU approximant on [-R, R]: flat to exponential accuracy on the negative
// side at the cost of an O(R tau) offset on the positive side.
//
// Construction: g~ = Chebyshev interpolant of g_beta on [-1, 1] at degree d,
// then p(x) = 2R g~(x/2R - tau). Shift and dilation are absorbed into the
// representation interval, so the interpolant's coefficients are reused
// verbatim and evaluation anywhere in [-R, R] stays an interior Clenshaw.
inline Polynomial build_relu_poly(const ReluPolySpec& spec) {
  const double beta = spec.beta;
  const Polynomial base = cheb_project(
      [beta](double u) { return softplus_annealed(beta, u); }, spec.d, -1.0,
      1.0);
  std::vector<double> scaled(base.coeffs);
  for (double& c : scaled) c *= 2.0 * spec.R;
  Polynomial p = Polynomial::chebyshev(
      std::move(scaled), 2.0 * spec.R * (spec.tau - 1.0),
      2.0 * spec.R * (spec.tau + 1.0));

  const auto bounds = relu_poly_error_bounds(spec);
  const auto rep = sup_error_profile(
      p, [](double x) { return std::max(x, 0.0); }, -spec.R, spec.R,
      kCertificationGridSize);
  if (rep.err_neg > kInterpolationSlack * bounds.neg ||
      rep.err_pos > kInterpolationSlack * bounds.pos) {
    throw std::runtime_error(
        "build_relu_poly: certification grid check failed (err_neg=" +
        std::to_string(rep.err_neg) + ", err_pos=" + std::to_string(rep.err_pos) +
        ")");
  }
  return p;
}

// Parameters of the polynomial soft threshold: statistical threshold tau,
// 1-norm cap M on the latent, padded range M_tau = M + 2 tau, and the
// flatness target eps on [-tau, tau].
struct SoftThresholdPolySpec {
  int d = 0;
  double tau = 0.0;
  double M = 0.0;
  double M_tau = 0.0;
  double eps = 0.0;

  static SoftThresholdPolySpec make(int d, double tau, double M, double eps) {
    if (!(tau > 0.0)) throw std::invalid_argument("soft threshold spec: tau > 0");
    if (!(eps > 0.0)) throw std::invalid_argument("soft threshold spec: eps > 0");
    if (!(M >= 1.0)) throw std::invalid_argument("soft threshold spec: M >= 1");
    if (!(tau <= M)) {
      // Keeps both shifted copies of the ReLU approximant inside its
      // representation interval; the relevant statistical regime always has
      // tau well below M.
      throw std::invalid_argument("soft threshold spec: tau <= M required");
    }
    if (d < 7) throw std::invalid_argument("soft threshold spec: d >= 7");
    SoftThresholdPolySpec s;
    s.d = d;
    s.tau = tau;
    s.M = M;
    s.M_tau = M + 2.0 * tau;
    s.eps = eps;
    return s;
  }
};

struct SoftThresholdPoly {
  SoftThresholdPolySpec spec;
  Polynomial poly;
  // Set when spec.d is below the calibrated minimum degree; construction
  // still succeeds but the flatness/linearity contract is not guaranteed.
  bool degree_warning = false;
};

namespace detail {

// rho~(x) = p(x - tau) - p(-x - tau) with p the ReLU approximant at
// transition width tau/M_tau and half-range M_tau. The difference is
// re-interpolated on the symmetric interval [-L, L], L = 2 M_tau - 3 tau
// (the largest interval on which both shifted arguments stay interior).
// Interpolation of a degree-d polynomial at d+1 nodes is exact; the even
// coefficients of the result are rounding noise (the function is odd by
// construction) and are zeroed so that rho~(-x) = -rho~(x) holds exactly.
inline SoftThresholdPoly build_soft_threshold_unchecked(
    const SoftThresholdPolySpec& spec) {
  const Polynomial p = build_relu_poly(
      ReluPolySpec::make(spec.d, spec.tau / spec.M_tau, spec.M_tau));
  const double L = 2.0 * spec.M_tau - 3.0 * spec.tau;
  const double tau = spec.tau;
  Polynomial combined = cheb_project(
      [&p, tau](double x) {
        return poly_eval(p, x - tau) - poly_eval(p, -x - tau);
      },
      spec.d, -L, L);
  for (std::size_t k = 0; k < combined.coeffs.size(); k += 2) {
    combined.coeffs[k] = 0.0;
  }
  SoftThresholdPoly out;
  out.spec = spec;
  out.poly = Polynomial::chebyshev(std::move(combined.coeffs), -L, L);
  return out;
}

}  // namespace detail

// Grid verification of the soft-threshold contract:
//   |rho~(x)| <= eps               for |x| <= tau
//   |rho~(x) - x| <= 3 tau + eps   for tau < |x| < M_tau
struct SoftThresholdContractReport {
  double flatness = 0.0;
  double flatness_bound = 0.0;
  double linearity = 0.0;
  double linearity_bound = 0.0;
  bool pass = false;
};

inline SoftThresholdContractReport check_soft_threshold_contract(
    const SoftThresholdPoly& st) {
  const auto& s = st.spec;
  SoftThresholdContractReport rep;
  rep.flatness_bound = s.eps;
  rep.linearity_bound = 3.0 * s.tau + s.eps;
  for (int i = 0; i <= kCertificationGridSize; ++i) {
    const double x = -s.tau + 2.0 * s.tau * i / kCertificationGridSize;
    rep.flatness = std::max(rep.flatness, std::abs(poly_eval(st.poly, x)));
  }
  for (int i = 1; i <= kCertificationGridSize; ++i) {
    const double x = s.tau + (s.M_tau - s.tau) * i / kCertificationGridSize;
    const double e = std::abs(poly_eval(st.poly, x) - x);
    // rho~ is odd, so the negative branch tracks automatically.
    rep.linearity = std::max(rep.linearity, e);
  }
  rep.pass = rep.flatness <= rep.flatness_bound &&
             rep.linearity <= rep.linearity_bound;
  return rep;
}

// Minimum-degree schedule d0 = ceil(C (M_tau/tau) log^2(M_tau/(eps tau))).
// The analysis fixes only the order; the constant C is calibrated once per
// process by doubling search over a fixed suite of (tau, M, eps) cases.
inline int soft_threshold_degree_for_constant(int C, double tau, double M,
                                              double eps) {
  const double mt = M + 2.0 * tau;
  const double lg = std::log(mt / (eps * tau));
  const int d = static_cast<int>(std::ceil(C * (mt / tau) * lg * lg));
  return std::max(d, 7);
}

inline int calibrated_soft_threshold_constant() {
  static const int cal = [] {
    struct Case {
      double tau, M, eps;
    };
    const Case suite[] = {
        {1.0, 10.0, 0.01},
        {2.0 * std::sqrt(std::log(256.0)), 60.0,
         2.0 * std::sqrt(std::log(256.0)) / 256.0},
    };
    for (int C = 1; C <= 64; C *= 2) {
      bool ok = true;
      for (const auto& c : suite) {
        const int d = soft_threshold_degree_for_constant(C, c.tau, c.M, c.eps);
        const auto st = detail::build_soft_threshold_unchecked(
            SoftThresholdPolySpec::make(d, c.tau, c.M, c.eps));
        if (!check_soft_threshold_contract(st).pass) {
          ok = false;
          break;
        }
      }
      if (ok) return C;
    }
    throw std::runtime_error(
        "soft threshold calibration: no constant up to 64 satisfies the "
        "contract suite");
  }();
  return cal;
}

inline int soft_threshold_min_degree(double tau, double M, double eps) {
  return soft_threshold_degree_for_constant(calibrated_soft_threshold_constant(),
                                            tau, M, eps);
}

inline SoftThresholdPoly build_poly_soft_threshold(
    const SoftThresholdPolySpec& spec) {
  SoftThresholdPoly out = detail::build_soft_threshold_unchecked(spec);
  out.degree_warning =
      spec.d < soft_threshold_min_degree(spec.tau, spec.M, spec.eps);
  return out;
}

}  // namespace sparselab
