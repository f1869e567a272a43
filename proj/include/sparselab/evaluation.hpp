#pragma once
// Risk measurement: Monte Carlo squared loss with confidence intervals and
// per-trial RNG streams (bitwise independent of the thread count), exact
// population risks for expansion-based estimators, and the Hermite
// variance-bound check.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "estimators.hpp"
#include "model.hpp"
#include "polybasis.hpp"
#include "rng.hpp"

namespace sparselab {

// Compensated (Kahan) sum in index order: the reported mean is identical no
// matter how the trial loop was partitioned across threads.
inline double kahan_sum(const std::vector<double>& v) {
  double sum = 0.0, comp = 0.0;
  for (double x : v) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

inline std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

// Canonical digest of the experiment instance (model scalars, label vector,
// dictionary reference) used to tie result rows to their configuration.
inline std::string params_digest(const ModelParams& params,
                                 const Dictionary& dict) {
  std::string s;
  s.reserve(256 + 18 * params.w.size());
  char buf[64];
  auto add = [&](const char* k, double v) {
    std::snprintf(buf, sizeof(buf), "%s=%.17g;", k, v);
    s += buf;
  };
  add("n", params.n);
  add("m", params.m);
  add("k", params.k);
  add("sigma", params.sigma);
  add("gamma", params.gamma);
  add("M", params.M);
  s += to_string(params.latent_mode);
  s += ';';
  s += to_string(dict.kind());
  std::snprintf(buf, sizeof(buf), ";%llu;",
                static_cast<unsigned long long>(dict.seed()));
  s += buf;
  for (Eigen::Index i = 0; i < params.w.size(); ++i) add("w", params.w(i));
  return fnv1a_hex(s);
}

struct Estimator {
  std::string id;
  std::function<double(const Sample&)> predict;
  bool warning = false;  // carried into the result row (e.g. degree too low)
};

struct RiskReport {
  std::string estimator_id;
  std::string params_digest;
  long trials = 0;
  double mean_loss = 0.0;
  double stderr_ = 0.0;  // sample std / sqrt(trials)
  double ci_lo = 0.0, ci_hi = 0.0;  // mean +- 1.96 stderr
  std::uint64_t seed = 0;
  double wallclock_s = 0.0;
  bool warning = false;
};

// Squared-loss Monte Carlo over shared per-trial samples (paired comparison
// across estimators). Deterministic given the seed; the trial loop is split
// across threads while the reduction stays in trial order.
inline std::vector<RiskReport> mc_risk_paired(
    const std::vector<Estimator>& estimators, const ModelParams& params,
    const Dictionary& dict, long trials, std::uint64_t seed, int threads = 1) {
  if (trials < 100) throw std::invalid_argument("mc_risk: trials >= 100");
  if (estimators.empty()) throw std::invalid_argument("mc_risk: no estimators");
  if (dict.cols() != params.m || dict.rows() != params.n) {
    throw std::invalid_argument("mc_risk: dictionary/model shape mismatch");
  }
  params.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t ne = estimators.size();
  std::vector<std::vector<double>> losses(ne,
                                          std::vector<double>(trials, 0.0));

  auto worker = [&](long lo, long hi) {
    for (long t = lo; t < hi; ++t) {
      Rng rng = Rng::for_trial(seed, static_cast<std::uint64_t>(t));
      const Sample s = sample_pair(params, dict, rng);
      for (std::size_t e = 0; e < ne; ++e) {
        const double d = estimators[e].predict(s) - s.Y;
        losses[e][t] = d * d;
      }
    }
  };

  const int nthreads =
      static_cast<int>(std::max<long>(1, std::min<long>(threads, trials)));
  if (nthreads == 1) {
    worker(0, trials);
  } else {
    std::vector<std::thread> pool;
    const long chunk = (trials + nthreads - 1) / nthreads;
    for (int i = 0; i < nthreads; ++i) {
      const long lo = i * chunk;
      const long hi = std::min<long>(trials, lo + chunk);
      if (lo < hi) pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  const double wallclock =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  const std::string digest = params_digest(params, dict);
  std::vector<RiskReport> reports;
  reports.reserve(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    RiskReport r;
    r.estimator_id = estimators[e].id;
    r.params_digest = digest;
    r.trials = trials;
    r.seed = seed;
    r.warning = estimators[e].warning;
    r.mean_loss = kahan_sum(losses[e]) / trials;
    std::vector<double> sq(losses[e].size());
    for (std::size_t t = 0; t < sq.size(); ++t) {
      const double d = losses[e][t] - r.mean_loss;
      sq[t] = d * d;
    }
    const double var = kahan_sum(sq) / (trials - 1.0);
    r.stderr_ = std::sqrt(var / trials);
    r.ci_lo = r.mean_loss - 1.96 * r.stderr_;
    r.ci_hi = r.mean_loss + 1.96 * r.stderr_;
    r.wallclock_s = wallclock;
    reports.push_back(std::move(r));
  }
  return reports;
}

inline RiskReport mc_risk(const Estimator& estimator, const ModelParams& params,
                          const Dictionary& dict, long trials,
                          std::uint64_t seed, int threads = 1) {
  return mc_risk_paired({estimator}, params, dict, trials, seed, threads)[0];
}

namespace detail {

// Quadrature-exact Gaussian expectation of g evaluated through a Hermite
// expansion of degree d.
inline double expansion_gauss_expect(
    const HermiteExpansion& h, double s,
    const std::function<double(double)>& transform, int extra_degree = 0) {
  const int nodes_needed = h.degree() + 2 + extra_degree;
  const auto [x, w] = gauss_hermite(nodes_needed);
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    acc += w[i] * transform(hermite_expansion_eval(h, s * x[i]));
  }
  return acc;
}

}  // namespace detail

// Exact population risk of the coordinatewise estimator
// f(X') = sum_i w_i f_uni(X'_i), with f_uni given as a Hermite expansion.
// Every moment is an exact Gauss-Hermite integral against the relevant
// mixture component: E[(f - Z)^2] per coordinate, plus the cross-coordinate
// mean term (sum w)^2 - ||w||^2 times E[f]^2 (nonzero only off the optimum).
inline double exact_univariate_risk(const HermiteExpansion& h,
                                    const ModelParams& params) {
  detail::require_orthogonal_spike(params, "exact_univariate_risk");
  if (h.degree() > kMaxOracleDegree) {
    throw std::invalid_argument("exact_univariate_risk: degree must be <= " +
                                std::to_string(kMaxOracleDegree));
  }
  const double p = params.spike_probability();
  const double smix = std::sqrt(params.gamma * params.gamma +
                                params.sigma * params.sigma);
  auto ident = [](double v) { return v; };
  auto square = [](double v) { return v * v; };
  const double ef = (1.0 - p) *
                        detail::expansion_gauss_expect(h, params.sigma, ident) +
                    p * detail::expansion_gauss_expect(h, smix, ident);
  const double ef2 =
      (1.0 - p) * detail::expansion_gauss_expect(h, params.sigma, square,
                                                 h.degree()) +
      p * detail::expansion_gauss_expect(h, smix, square, h.degree());

  // E[f(Z + xi) Z] over the spike component, tensor Gauss-Hermite.
  const int nz = h.degree() / 2 + 2;
  const auto [zx, zw] = gauss_hermite(nz);
  const auto [ex, ew] = gauss_hermite(nz);
  double efz = 0.0;
  for (std::size_t a = 0; a < zx.size(); ++a) {
    const double z = params.gamma * zx[a];
    double inner = 0.0;
    for (std::size_t b = 0; b < ex.size(); ++b) {
      inner += ew[b] * hermite_expansion_eval(h, z + params.sigma * ex[b]);
    }
    efz += zw[a] * z * inner;
  }
  efz *= p;

  const double c = params.gamma * params.gamma * p;
  const double per = ef2 - 2.0 * efz + c;
  const double wsum = params.w.sum();
  const double wsq = params.w.squaredNorm();
  return wsq * per + (wsum * wsum - wsq) * ef * ef;
}

struct VarianceBoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

// Variance-side floor in the Hermite basis at the noise scale sigma:
// population risk >= (1 - k/n) ||w||^2 sum_{k >= 1} fhat(k)^2, where fhat are
// the coefficients of f_uni in H_k(x / sigma). Expansions at other scales are
// re-expanded exactly by quadrature first.
inline VarianceBoundReport variance_bound_check(const HermiteExpansion& h,
                                                const ModelParams& params) {
  detail::require_orthogonal_spike(params, "variance_bound_check");
  if (!(params.sigma > 0.0)) {
    throw std::invalid_argument("variance_bound_check: requires sigma > 0");
  }
  std::vector<double> coeffs(h.coeffs);
  if (h.scale != params.sigma) {
    const int d = h.degree();
    const auto [x, w] = gauss_hermite(d + 2);
    std::vector<double> basis;
    coeffs.assign(static_cast<std::size_t>(d) + 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double fx = hermite_expansion_eval(h, params.sigma * x[i]);
      hermite_normalized_all(d, x[i], basis);
      for (int k = 0; k <= d; ++k) coeffs[k] += w[i] * fx * basis[k];
    }
  }
  double tail = 0.0;
  for (std::size_t k = 1; k < coeffs.size(); ++k) tail += coeffs[k] * coeffs[k];
  VarianceBoundReport rep;
  rep.rhs = (1.0 - params.spike_probability()) * params.w.squaredNorm() * tail;
  rep.lhs = exact_univariate_risk(h, params);
  rep.pass = rep.lhs >= rep.rhs - 1e-9;
  return rep;
}

// Ready-made estimator closures over the cached X' = A^T X.
inline Estimator make_trivial_estimator() {
  return {"trivial", [](const Sample&) { return 0.0; }, false};
}

inline Estimator make_nn_estimator(const ModelParams& params, double tau,
                                   std::string id = "nn") {
  const Eigen::VectorXd w = params.w;
  return {std::move(id),
          [w, tau](const Sample& s) {
            return estimate_nn_from_xprime(w, tau, s.Xprime).y_hat;
          },
          false};
}

inline Estimator make_poly_estimator(const ModelParams& params,
                                     SoftThresholdPoly st,
                                     std::string id = "poly") {
  const Eigen::VectorXd w = params.w;
  const bool warn = st.degree_warning;
  return {std::move(id),
          [w, st = std::move(st)](const Sample& s) {
            return estimate_poly_from_xprime(w, st, s.Xprime).y_hat;
          },
          warn};
}

inline Estimator make_linear_estimator(const ModelParams& params,
                                       const Dictionary& dict,
                                       std::string id = "linear") {
  const LinearPredictor lp = optimal_linear(params, dict);
  return {std::move(id),
          [lp](const Sample& s) { return lp.wtilde.dot(s.X); },
          false};
}

inline Estimator make_bayes_estimator(const ModelParams& params,
                                      std::string id = "bayes") {
  const ModelParams p = params;
  return {std::move(id),
          [p](const Sample& s) {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < s.Xprime.size(); ++i) {
              acc += p.w(i) * bayes_posterior_mean(p, s.Xprime(i));
            }
            return acc;
          },
          false};
}

inline Estimator make_oracle_estimator(const ModelParams& params, int d,
                                       std::string id = "") {
  const BestPolyOracle o = best_poly_oracle(params, d);
  const Eigen::VectorXd w = params.w;
  if (id.empty()) id = "oracle_d" + std::to_string(d);
  return {std::move(id),
          [w, coeffs = o.coeffs](const Sample& s) {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < s.Xprime.size(); ++i) {
              acc += w(i) * hermite_expansion_eval(coeffs, s.Xprime(i));
            }
            return acc;
          },
          false};
}

}  // namespace sparselab
