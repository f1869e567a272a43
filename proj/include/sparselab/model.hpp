#pragma once
// Generative process for the sparse-latent regression task: sparse latent
// vectors, dictionaries with certified incoherence, Gaussian observation
// noise, and linear labels Y = <w, Z>.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/QR>

#include "rng.hpp"

namespace sparselab {

enum class LatentMode { SpikeGaussian, ExactKSupport };

inline const char* to_string(LatentMode m) {
  return m == LatentMode::SpikeGaussian ? "spike_gaussian" : "exact_k_support";
}

// All generative-model scalars plus the label vector w (||w||_inf = 1).
//
// SpikeGaussian: each coordinate is 0 w.p. 1 - k/n, else N(0, gamma^2);
// support size is k only in expectation. ExactKSupport: uniformly random
// k-subset support, resampled until ||Z||_1 <= M.
struct ModelParams {
  int n = 0;            // ambient dimension
  int m = 0;            // latent dimension
  int k = 0;            // sparsity (expected or exact, depending on mode)
  double sigma = 1.0;   // noise std
  double gamma = 1.0;   // on-support latent std
  double M = 0.0;       // 1-norm cap for Z; <= 0 selects the default below
  Eigen::VectorXd w;    // label vector, length m
  LatentMode latent_mode = LatentMode::SpikeGaussian;

  double spike_probability() const {
    return static_cast<double>(k) / static_cast<double>(n);
  }

  // Default cap 3 gamma (k + sqrt(k log m)) holds with overwhelming
  // probability, so resampling in ExactKSupport is rare.
  double latent_l1_cap() const {
    if (M > 0.0) return M;
    return 3.0 * gamma *
           (k + std::sqrt(static_cast<double>(k) * std::log(std::max(m, 2))));
  }

  void validate() const {
    if (n < 1 || m < 1) throw std::invalid_argument("model: n, m >= 1");
    if (k < 0 || k > n) throw std::invalid_argument("model: 0 <= k <= n");
    if (!(sigma >= 0.0) || !(gamma >= 0.0)) {
      throw std::invalid_argument("model: sigma, gamma >= 0");
    }
    if (w.size() != m) throw std::invalid_argument("model: w must have length m");
    if (latent_mode == LatentMode::SpikeGaussian && m != n) {
      throw std::invalid_argument("model: spike_gaussian requires m = n");
    }
    if (w.size() > 0 && std::abs(w.cwiseAbs().maxCoeff() - 1.0) > 1e-12) {
      throw std::invalid_argument("model: requires ||w||_inf = 1");
    }
  }
};

enum class DictionaryKind { Identity, HaarOrthogonal, RandomSign };

inline const char* to_string(DictionaryKind k) {
  switch (k) {
    case DictionaryKind::Identity: return "identity";
    case DictionaryKind::HaarOrthogonal: return "haar_orthogonal";
    default: return "random_sign";
  }
}

// Entrywise max norm of A^T A - I. (The bias estimate
// |(A^T A z)_i - z_i| <= mu ||z||_1 forces the entrywise reading.)
inline double incoherence(const Eigen::MatrixXd& A) {
  const Eigen::Index m = A.cols();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(A.transpose());
  double mu = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = j; i < m; ++i) {
      const double v = std::abs(gram(i, j) - (i == j ? 1.0 : 0.0));
      if (v > mu) mu = v;
    }
  }
  return mu;
}

// Dictionary A (n x m) with its certified incoherence mu. The identity kind
// never materializes a matrix, which keeps large orthogonal instances cheap.
class Dictionary {
 public:
  static Dictionary build(DictionaryKind kind, int n, int m,
                          std::uint64_t seed) {
    if (n < 1 || m < 1) throw std::invalid_argument("dictionary: n, m >= 1");
    Dictionary d;
    d.kind_ = kind;
    d.n_ = n;
    d.m_ = m;
    d.seed_ = seed;
    switch (kind) {
      case DictionaryKind::Identity:
        if (n != m) throw std::invalid_argument("dictionary: identity requires n = m");
        d.mu_ = 0.0;
        break;
      case DictionaryKind::HaarOrthogonal: {
        if (n != m) {
          throw std::invalid_argument("dictionary: haar_orthogonal requires n = m");
        }
        Rng rng(splitmix1(seed));
        Eigen::MatrixXd g(n, n);
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i) g(i, j) = rng.normal();
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
        Eigen::MatrixXd q = qr.householderQ();
        const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
        // Sign fix makes the distribution Haar rather than QR-convention
        // dependent.
        for (int j = 0; j < n; ++j) {
          if (r(j, j) < 0.0) q.col(j) *= -1.0;
        }
        d.A_ = std::move(q);
        d.mu_ = incoherence(*d.A_);
        break;
      }
      case DictionaryKind::RandomSign: {
        Rng rng(splitmix1(seed));
        const double v = 1.0 / std::sqrt(static_cast<double>(n));
        Eigen::MatrixXd a(n, m);
        for (int j = 0; j < m; ++j) {
          for (int i = 0; i < n; ++i) {
            a(i, j) = rng.uniform() < 0.5 ? -v : v;
          }
        }
        d.A_ = std::move(a);
        d.mu_ = incoherence(*d.A_);
        break;
      }
    }
    return d;
  }

  DictionaryKind kind() const { return kind_; }
  int rows() const { return n_; }
  int cols() const { return m_; }
  std::uint64_t seed() const { return seed_; }
  double mu() const { return mu_; }
  bool orthogonal() const { return kind_ != DictionaryKind::RandomSign; }

  Eigen::VectorXd apply(const Eigen::VectorXd& z) const {
    if (z.size() != m_) throw std::invalid_argument("dictionary: size mismatch in A z");
    if (kind_ == DictionaryKind::Identity) return z;
    return (*A_) * z;
  }

  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& x) const {
    if (x.size() != n_) throw std::invalid_argument("dictionary: size mismatch in A^T x");
    if (kind_ == DictionaryKind::Identity) return x;
    return A_->transpose() * x;
  }

  // Materialized matrix; identity is synthesized on demand (small n only).
  Eigen::MatrixXd matrix() const {
    if (kind_ == DictionaryKind::Identity) {
      return Eigen::MatrixXd::Identity(n_, n_);
    }
    return *A_;
  }

 private:
  static std::uint64_t splitmix1(std::uint64_t s) { return splitmix64(s); }

  DictionaryKind kind_ = DictionaryKind::Identity;
  int n_ = 0, m_ = 0;
  std::uint64_t seed_ = 0;
  double mu_ = 0.0;
  std::optional<Eigen::MatrixXd> A_;
};

// One draw from the generative process, with X' = A^T X cached.
struct Sample {
  Eigen::VectorXd Z;
  Eigen::VectorXd xi;
  Eigen::VectorXd X;
  Eigen::VectorXd Xprime;
  double Y = 0.0;
  std::vector<int> support;
};

inline Eigen::VectorXd sample_latent(const ModelParams& params, Rng& rng) {
  params.validate();
  Eigen::VectorXd z = Eigen::VectorXd::Zero(params.m);
  if (params.latent_mode == LatentMode::SpikeGaussian) {
    const double p = params.spike_probability();
    for (int i = 0; i < params.m; ++i) {
      if (rng.uniform() < p) z(i) = rng.normal(params.gamma);
    }
    return z;
  }
  const double cap = params.latent_l1_cap();
  for (int attempt = 0; attempt < 1000; ++attempt) {
    z.setZero();
    // Uniform k-subset by partial Fisher-Yates over indices.
    std::vector<int> idx(params.m);
    for (int i = 0; i < params.m; ++i) idx[i] = i;
    double l1 = 0.0;
    for (int j = 0; j < params.k; ++j) {
      const int pick = j + static_cast<int>(rng.uniform() * (params.m - j));
      std::swap(idx[j], idx[pick]);
      const double v = rng.normal(params.gamma);
      z(idx[j]) = v;
      l1 += std::abs(v);
    }
    if (l1 <= cap) return z;
  }
  throw std::invalid_argument(
      "sample_latent: 1000 resampling attempts exceeded; the 1-norm cap M=" +
      std::to_string(cap) + " is too tight for these parameters");
}

inline Sample sample_pair(const ModelParams& params, const Dictionary& dict,
                          Rng& rng) {
  if (dict.cols() != params.m || dict.rows() != params.n) {
    throw std::invalid_argument("sample_pair: dictionary/model shape mismatch");
  }
  Sample s;
  s.Z = sample_latent(params, rng);
  s.xi.resize(params.n);
  for (int i = 0; i < params.n; ++i) s.xi(i) = rng.normal(params.sigma);
  s.X = dict.apply(s.Z) + s.xi;
  s.Xprime = dict.apply_transpose(s.X);
  s.Y = params.w.dot(s.Z);
  for (int i = 0; i < params.m; ++i) {
    if (s.Z(i) != 0.0) s.support.push_back(i);
  }
  return s;
}

}  // namespace sparselab
