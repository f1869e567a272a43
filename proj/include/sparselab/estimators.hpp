#pragma once
// The estimator zoo: soft-threshold network, its polynomial surrogate, the
// optimal linear predictor with closed-form risk, the Bayes posterior mean
// for the orthogonal spike-Gaussian instance, the exact best degree-d
// univariate polynomial oracle, and the matching population-risk lower
// bound for low-degree polynomials.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "model.hpp"
#include "polybasis.hpp"
#include "relu_approx.hpp"

namespace sparselab {

// sgn(x) max(0, |x| - tau): zero on [-tau, tau], shrinks by tau outside.
inline double soft_threshold(double tau, double x) {
  if (!(tau > 0.0)) throw std::domain_error("soft_threshold: tau > 0");
  if (x > tau) return x - tau;
  if (x < -tau) return x + tau;
  return 0.0;
}

// Default threshold rule tau = c sigma sqrt((1+mu) log m) + 2 mu M. The
// theory fixes only the order; c is a config knob with default 2.
inline double default_threshold(const ModelParams& params, double mu,
                                double c = 2.0) {
  return c * params.sigma * std::sqrt((1.0 + mu) * std::log(std::max(params.m, 2))) +
         2.0 * mu * params.latent_l1_cap();
}

struct NnEstimate {
  Eigen::VectorXd z_hat;
  double y_hat = 0.0;
};

// Z^ = soft threshold applied coordinatewise to A^T X, Y^ = <w, Z^>.
inline NnEstimate estimate_nn_from_xprime(const Eigen::VectorXd& w, double tau,
                                          const Eigen::VectorXd& xprime) {
  if (w.size() != xprime.size()) {
    throw std::invalid_argument("estimate_nn: w and A^T X length mismatch");
  }
  NnEstimate e;
  e.z_hat.resize(xprime.size());
  for (Eigen::Index i = 0; i < xprime.size(); ++i) {
    e.z_hat(i) = soft_threshold(tau, xprime(i));
  }
  e.y_hat = w.dot(e.z_hat);
  return e;
}

inline NnEstimate estimate_nn(const Dictionary& dict, const Eigen::VectorXd& w,
                              double tau, const Eigen::VectorXd& X) {
  return estimate_nn_from_xprime(w, tau, dict.apply_transpose(X));
}

struct PolyEstimate {
  Eigen::VectorXd z_hat;
  double y_hat = 0.0;
  // Some |(A^T X)_i| exceeded M_tau: the polynomial was evaluated beyond its
  // certified range and the recovery guarantee is void there.
  bool out_of_range = false;
};

inline PolyEstimate estimate_poly_from_xprime(const Eigen::VectorXd& w,
                                              const SoftThresholdPoly& st,
                                              const Eigen::VectorXd& xprime) {
  if (w.size() != xprime.size()) {
    throw std::invalid_argument("estimate_poly: w and A^T X length mismatch");
  }
  PolyEstimate e;
  e.z_hat.resize(xprime.size());
  for (Eigen::Index i = 0; i < xprime.size(); ++i) {
    if (std::abs(xprime(i)) > st.spec.M_tau) e.out_of_range = true;
    e.z_hat(i) = poly_eval(st.poly, xprime(i));
  }
  e.y_hat = w.dot(e.z_hat);
  return e;
}

inline PolyEstimate estimate_poly(const Dictionary& dict,
                                  const Eigen::VectorXd& w,
                                  const SoftThresholdPoly& st,
                                  const Eigen::VectorXd& X) {
  return estimate_poly_from_xprime(w, st, dict.apply_transpose(X));
}

namespace detail {

inline void require_orthogonal_spike(const ModelParams& params,
                                     const char* fn) {
  params.validate();
  if (params.latent_mode != LatentMode::SpikeGaussian) {
    throw std::invalid_argument(std::string(fn) +
                                ": requires the spike-Gaussian latent mode");
  }
}

}  // namespace detail

// Best linear predictor x -> <wtilde, x> for the orthogonal spike-Gaussian
// instance. Minimizing over each radius R = ||wtilde|| and then over R gives
// wtilde = (R / ||w||) A w with R = gamma^2 (k/n) ||w|| / (gamma^2 (k/n) + sigma^2).
struct LinearPredictor {
  Eigen::VectorXd wtilde;
  double R = 0.0;
};

inline double optimal_linear_risk(const ModelParams& params) {
  const double snr = params.gamma * params.gamma * params.spike_probability();
  const double s2 = params.sigma * params.sigma;
  if (snr + s2 == 0.0) return 0.0;
  return snr * s2 * params.w.squaredNorm() / (snr + s2);
}

inline LinearPredictor optimal_linear(const ModelParams& params,
                                      const Dictionary& dict) {
  detail::require_orthogonal_spike(params, "optimal_linear");
  if (!dict.orthogonal()) {
    throw std::invalid_argument(
        "optimal_linear: unsupported configuration (requires an orthogonal "
        "dictionary)");
  }
  const double snr = params.gamma * params.gamma * params.spike_probability();
  const double s2 = params.sigma * params.sigma;
  const double wnorm = params.w.norm();
  LinearPredictor lp;
  lp.R = (snr + s2 == 0.0) ? 0.0 : snr * wnorm / (snr + s2);
  lp.wtilde = (wnorm == 0.0)
                  ? Eigen::VectorXd::Zero(params.n).eval()
                  : (lp.R / wnorm * dict.apply(params.w)).eval();
  return lp;
}

// E[Z | X' = x] for the two-component scale mixture X' = Z + noise:
// posterior spike probability times the Wiener-filter slope. Stabilized in
// the log domain; exact in the k = n (always-on) and k = 0 limits.
inline double bayes_posterior_mean(const ModelParams& params, double xprime) {
  detail::require_orthogonal_spike(params, "bayes_posterior_mean");
  const double p = params.spike_probability();
  const double g2 = params.gamma * params.gamma;
  const double s2 = params.sigma * params.sigma;
  if (g2 == 0.0 || p == 0.0) return 0.0;
  const double slope = g2 / (g2 + s2);
  if (params.sigma == 0.0) return xprime;  // noiseless: X' = Z exactly
  const double total = std::sqrt(g2 + s2);
  // log odds of the pure-noise component against the spike component
  const double log_odds = std::log1p(-p) - std::log(p) +
                          std::log(total / params.sigma) -
                          0.5 * xprime * xprime * (1.0 / s2 - 1.0 / (g2 + s2));
  const double pi1 = 1.0 / (1.0 + std::exp(log_odds));
  return pi1 * slope * xprime;
}

// Exact second-order data for the univariate regression of Z on X' in the
// orthonormal Hermite basis at scale sqrt(gamma^2 + sigma^2): Gram matrix
// G_ij = E[H_i(X'/s) H_j(X'/s)], cross moments b_i = E[H_i(X'/s) Z], and
// c = E[Z^2]. Assembled from closed-form mixture moments
//   E[X'^p]   = (1 - k/n) m_p(sigma) + (k/n) m_p(s)
//   E[X'^p Z] = (k/n) sum_i C(p, i) E[Z^{i+1}] E[xi^{p-i}]
// The Hermite basis keeps the conditioning manageable up to degree 16 where
// the monomial normal equations would already be numerically singular.
struct MomentOracle {
  int d = 0;
  Eigen::MatrixXd G;
  Eigen::VectorXd b;
  double c = 0.0;
};

inline constexpr int kMaxOracleDegree = 16;

inline MomentOracle build_moment_oracle(const ModelParams& params, int d) {
  detail::require_orthogonal_spike(params, "build_moment_oracle");
  if (d < 0 || d > kMaxOracleDegree) {
    throw std::invalid_argument("moment oracle: degree must lie in [0, " +
                                std::to_string(kMaxOracleDegree) + "]");
  }
  const double p = params.spike_probability();
  const double s = std::sqrt(params.gamma * params.gamma +
                             params.sigma * params.sigma);
  // Monomial coefficient table of H_k(x/s) via the normalized recurrence.
  std::vector<std::vector<double>> h(d + 1, std::vector<double>(d + 1, 0.0));
  h[0][0] = 1.0;
  if (d >= 1) h[1][1] = (s > 0.0) ? 1.0 / s : 0.0;
  for (int k = 1; k < d; ++k) {
    for (int j = 1; j <= k + 1; ++j) h[k + 1][j] = h[k][j - 1] / s;
    const double rk = std::sqrt(static_cast<double>(k));
    for (int j = 0; j <= k; ++j) h[k + 1][j] -= rk * h[k - 1][j];
    const double rk1 = std::sqrt(static_cast<double>(k + 1));
    for (int j = 0; j <= k + 1; ++j) h[k + 1][j] /= rk1;
  }

  std::vector<double> mom(2 * d + 1);
  for (int q = 0; q <= 2 * d; ++q) {
    mom[q] = (1.0 - p) * gaussian_moment(q, params.sigma) +
             p * gaussian_moment(q, s);
  }
  std::vector<double> cross(d + 1);
  for (int q = 0; q <= d; ++q) {
    double acc = 0.0;
    double binom = 1.0;
    for (int i = 0; i <= q; ++i) {
      acc += binom * gaussian_moment(i + 1, params.gamma) *
             gaussian_moment(q - i, params.sigma);
      binom = binom * (q - i) / (i + 1.0);
    }
    cross[q] = p * acc;
  }

  MomentOracle mo;
  mo.d = d;
  mo.G.resize(d + 1, d + 1);
  mo.b.resize(d + 1);
  for (int i = 0; i <= d; ++i) {
    for (int j = i; j <= d; ++j) {
      double acc = 0.0;
      for (int pi = 0; pi <= i; ++pi) {
        if (h[i][pi] == 0.0) continue;
        for (int qj = 0; qj <= j; ++qj) {
          if (h[j][qj] == 0.0) continue;
          acc += h[i][pi] * h[j][qj] * mom[pi + qj];
        }
      }
      mo.G(i, j) = acc;
      mo.G(j, i) = acc;
    }
    double acc = 0.0;
    for (int pi = 0; pi <= i; ++pi) acc += h[i][pi] * cross[pi];
    mo.b(i) = acc;
  }
  mo.c = params.gamma * params.gamma * p;
  return mo;
}

// Exact best degree-d polynomial estimator of Y from X' = A^T X, and its
// population risk. The optimum has no mixed monomials, so it reduces to the
// shared univariate coefficient solve; the per-coordinate risk c - b^T G^-1 b
// is weighted by w_i^2.
struct BestPolyOracle {
  HermiteExpansion coeffs;  // shared univariate component, scale sqrt(g^2+s^2)
  double risk = 0.0;
};

inline BestPolyOracle best_poly_oracle(const ModelParams& params, int d) {
  const MomentOracle mo = build_moment_oracle(params, d);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mo.G);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  if (!(lmin > 0.0) || lmax / lmin > 1e12) {
    throw std::domain_error(
        "best_poly_oracle: normal equations numerically singular at degree " +
        std::to_string(d) + " (condition > 1e12); reduce the degree");
  }
  const Eigen::VectorXd a = es.eigenvectors() *
                            (es.eigenvectors().transpose() * mo.b).cwiseQuotient(
                                es.eigenvalues());
  const double per = std::max(0.0, mo.c - mo.b.dot(a));
  BestPolyOracle out;
  out.coeffs.scale = std::sqrt(params.gamma * params.gamma +
                               params.sigma * params.sigma);
  out.coeffs.coeffs.assign(a.data(), a.data() + a.size());
  out.risk = per * params.w.squaredNorm();
  return out;
}

// Population-risk floor for any multivariate degree-d polynomial estimator on
// the orthogonal spike-Gaussian instance:
//   (1/4) gamma^2 k / (1 + sqrt(k/n) (d+1)^{3d+2} (1 + (gamma/sigma)^d))^2
// evaluated in the log domain so the (d+1)^{3d+2} factor cannot overflow.
inline double polynomial_risk_lower_bound(const ModelParams& params, int d) {
  detail::require_orthogonal_spike(params, "polynomial_risk_lower_bound");
  if (!(params.k < params.n / 2.0)) {
    throw std::invalid_argument(
        "polynomial_risk_lower_bound: requires k < n/2");
  }
  if (d < 0) throw std::invalid_argument("polynomial_risk_lower_bound: d >= 0");
  const double num = 0.25 * params.gamma * params.gamma * params.k;
  if (params.sigma == 0.0) return 0.0;  // ratio term degenerates
  const double lr = d * std::log(params.gamma / params.sigma);
  const double log1p_ratio = lr > 40.0 ? lr : std::log1p(std::exp(lr));
  const double logD = 0.5 * std::log(params.spike_probability()) +
                      (3.0 * d + 2.0) * std::log(d + 1.0) + log1p_ratio;
  if (logD > 350.0) return num * std::exp(-2.0 * logD);
  const double denom = 1.0 + std::exp(logD);
  return num / (denom * denom);
}

}  // namespace sparselab
