#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <sparselab/evaluation.hpp>

using namespace sparselab;
using Catch::Approx;

static ModelParams spike_params(int n, int k, double sigma, double gamma,
                                std::uint64_t wseed = 0) {
  ModelParams p;
  p.n = n;
  p.m = n;
  p.k = k;
  p.sigma = sigma;
  p.gamma = gamma;
  p.latent_mode = LatentMode::SpikeGaussian;
  p.w = Eigen::VectorXd::Ones(n);
  if (wseed != 0) {
    Rng rng(wseed);
    for (int i = 0; i < n; ++i) p.w(i) = rng.uniform() < 0.5 ? -1.0 : 1.0;
  }
  return p;
}

TEST_CASE("mc_risk: the trivial estimator recovers E[Y^2]") {
  auto params = spike_params(256, 8, 1.0, 3.0);
  const auto dict = Dictionary::build(DictionaryKind::Identity, 256, 256, 1);
  const auto rep =
      mc_risk(make_trivial_estimator(), params, dict, 2000, 424242);
  const double expect = 9.0 * 8.0;  // gamma^2 k for an all-ones label vector
  REQUIRE(std::abs(rep.mean_loss - expect) <= 3.0 * rep.stderr_);
  REQUIRE(rep.trials == 2000);
  REQUIRE(rep.ci_lo == Approx(rep.mean_loss - 1.96 * rep.stderr_));
  REQUIRE(rep.ci_hi == Approx(rep.mean_loss + 1.96 * rep.stderr_));
}

TEST_CASE("mc_risk: optimal linear matches its closed form") {
  auto params = spike_params(256, 8, 1.0, 3.0);
  const auto dict = Dictionary::build(DictionaryKind::Identity, 256, 256, 1);
  const auto rep = mc_risk(make_linear_estimator(params, dict), params, dict,
                           2000, 9090);
  REQUIRE(std::abs(rep.mean_loss - optimal_linear_risk(params)) <=
          3.0 * rep.stderr_);
}

TEST_CASE("mc_risk: determinism and thread independence") {
  auto params = spike_params(64, 4, 1.0, 2.0);
  const auto dict = Dictionary::build(DictionaryKind::Identity, 64, 64, 1);
  const auto est = make_nn_estimator(params, 2.0);
  const auto a = mc_risk(est, params, dict, 500, 77, 1);
  const auto b = mc_risk(est, params, dict, 500, 77, 1);
  REQUIRE(a.mean_loss == b.mean_loss);
  REQUIRE(a.stderr_ == b.stderr_);
  REQUIRE(a.params_digest == b.params_digest);

  const auto c = mc_risk(est, params, dict, 500, 77, 3);
  REQUIRE(a.mean_loss == c.mean_loss);
  REQUIRE(a.stderr_ == c.stderr_);

  const auto d = mc_risk(est, params, dict, 500, 78, 1);
  REQUIRE(a.mean_loss != d.mean_loss);
}

TEST_CASE("mc_risk: input validation") {
  auto params = spike_params(64, 4, 1.0, 2.0);
  const auto dict = Dictionary::build(DictionaryKind::Identity, 64, 64, 1);
  REQUIRE_THROWS_AS(
      mc_risk(make_trivial_estimator(), params, dict, 99, 1),
      std::invalid_argument);
  const auto small = Dictionary::build(DictionaryKind::Identity, 32, 32, 1);
  REQUIRE_THROWS_AS(
      mc_risk(make_trivial_estimator(), params, small, 500, 1),
      std::invalid_argument);
}

TEST_CASE("exact_univariate_risk") {
  auto params = spike_params(1024, 8, 1.0, 4.0);

  SECTION("zero estimator risk is gamma^2 k") {
    HermiteExpansion zero;
    zero.scale = params.sigma;
    zero.coeffs = {0.0};
    REQUIRE(exact_univariate_risk(zero, params) ==
            Approx(128.0).epsilon(1e-12));
  }

  SECTION("oracle coefficients reproduce the oracle risk") {
    for (int d : {1, 3, 6, 8}) {
      const auto o = best_poly_oracle(params, d);
      REQUIRE(exact_univariate_risk(o.coeffs, params) ==
              Approx(o.risk).epsilon(1e-10));
    }
  }

  SECTION("identity map costs sigma^2 per coordinate and beats nothing") {
    HermiteExpansion ident;
    ident.scale = 2.5;
    ident.coeffs = {0.0, 2.5};  // f(x) = x
    const double risk = exact_univariate_risk(ident, params);
    REQUIRE(risk == Approx(1024.0).epsilon(1e-10));  // sigma^2 n
    REQUIRE(risk > optimal_linear_risk(params));
  }
}

TEST_CASE("variance bound check") {
  auto params = spike_params(1024, 8, 1.0, 4.0);

  SECTION("zero polynomial: vacuous bound") {
    HermiteExpansion zero;
    zero.scale = params.sigma;
    zero.coeffs = {0.0};
    const auto rep = variance_bound_check(zero, params);
    REQUIRE(rep.rhs == 0.0);
    REQUIRE(rep.pass);
  }

  SECTION("single-coefficient expansion") {
    HermiteExpansion h;
    h.scale = params.sigma;
    h.coeffs = {0.0, 1.0};
    const auto rep = variance_bound_check(h, params);
    REQUIRE(rep.rhs ==
            Approx((1.0 - 8.0 / 1024.0) * 1024.0).epsilon(1e-12));
    REQUIRE(rep.pass);
  }

  SECTION("property sweep over random expansions at the noise scale") {
    Rng rng(5150);
    for (int rep_i = 0; rep_i < 100; ++rep_i) {
      const int d = 1 + static_cast<int>(rng.uniform() * 6.0);
      HermiteExpansion h;
      h.scale = params.sigma;
      h.coeffs.resize(d + 1);
      for (auto& c : h.coeffs) c = rng.uniform(-1.0, 1.0);
      const auto rep = variance_bound_check(h, params);
      REQUIRE(rep.pass);
    }
  }

  SECTION("expansions at other scales are re-expanded before the check") {
    const auto o = best_poly_oracle(params, 6);
    REQUIRE(o.coeffs.scale != params.sigma);
    const auto rep = variance_bound_check(o.coeffs, params);
    REQUIRE(rep.pass);
    REQUIRE(rep.lhs == Approx(o.risk).epsilon(1e-9));
  }
}

TEST_CASE("closed-form risks sit inside Monte Carlo error bars") {
  // Ten parameter points; each estimator with an exact risk formula must
  // land within 3 standard errors of its Monte Carlo estimate.
  const std::uint64_t seed = 1234321;
  int point = 0;
  for (int k : {2, 8}) {
    for (double gamma : {2.0, 3.0, 4.0, 8.0, 16.0}) {
      auto params = spike_params(128, k, 1.0, gamma, 17 + point);
      const auto dict =
          Dictionary::build(DictionaryKind::Identity, 128, 128, 1);
      const std::vector<Estimator> ests = {
          make_trivial_estimator(),
          make_linear_estimator(params, dict),
          make_oracle_estimator(params, 4),
      };
      const auto reps = mc_risk_paired(ests, params, dict, 2000, seed + point);
      const double trivial_exact =
          gamma * gamma * params.spike_probability() * params.w.squaredNorm();
      REQUIRE(std::abs(reps[0].mean_loss - trivial_exact) <=
              3.0 * reps[0].stderr_);
      REQUIRE(std::abs(reps[1].mean_loss - optimal_linear_risk(params)) <=
              3.0 * reps[1].stderr_);
      const double oracle_exact = best_poly_oracle(params, 4).risk;
      REQUIRE(std::abs(reps[2].mean_loss - oracle_exact) <=
              3.0 * reps[2].stderr_);
      ++point;
    }
  }
}

TEST_CASE("estimator ordering under shared samples") {
  auto params = spike_params(256, 4, 1.0, 4.0, 33);
  const auto dict = Dictionary::build(DictionaryKind::Identity, 256, 256, 1);
  const std::vector<Estimator> ests = {
      make_bayes_estimator(params),           // 0
      make_oracle_estimator(params, 8),       // 1
      make_oracle_estimator(params, 1),       // 2
      make_linear_estimator(params, dict),    // 3
      make_trivial_estimator(),               // 4
  };
  const auto reps = mc_risk_paired(ests, params, dict, 2000, 50001, 2);
  auto le = [&](int i, int j) {
    REQUIRE(reps[i].mean_loss <=
            reps[j].mean_loss + 3.0 * std::max(reps[i].stderr_, reps[j].stderr_));
  };
  le(0, 1);  // Bayes <= degree-8 oracle
  le(1, 2);  // degree-8 <= degree-1
  le(2, 4);  // degree-1 <= trivial
  le(3, 4);  // linear <= trivial

  // Degree-1 oracle and the optimal linear predictor are the same function.
  REQUIRE(reps[2].mean_loss ==
          Approx(reps[3].mean_loss).margin(3.0 * reps[2].stderr_ * 1e-6 + 1e-9));

  // Closed forms inside the 95% intervals.
  const double trivial_exact = 16.0 * params.spike_probability() * 256.0;
  REQUIRE(reps[4].ci_lo <= trivial_exact);
  REQUIRE(trivial_exact <= reps[4].ci_hi);
  const double linear_exact = optimal_linear_risk(params);
  REQUIRE(reps[3].ci_lo <= linear_exact);
  REQUIRE(linear_exact <= reps[3].ci_hi);
  const double oracle_exact = best_poly_oracle(params, 8).risk;
  REQUIRE(reps[1].ci_lo <= oracle_exact);
  REQUIRE(oracle_exact <= reps[1].ci_hi);
}

TEST_CASE("kahan_sum compensates ordering noise") {
  std::vector<double> v;
  Rng rng(8);
  for (int i = 0; i < 10000; ++i) v.push_back(rng.uniform(-1.0, 1.0) * 1e8);
  v.push_back(1e-8);
  const double s1 = kahan_sum(v);
  std::vector<double> rev(v.rbegin(), v.rend());
  const double s2 = kahan_sum(rev);
  REQUIRE(std::abs(s1 - s2) <= 1e-12 * std::abs(s1));
}
