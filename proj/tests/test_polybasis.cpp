#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <sparselab/polybasis.hpp>
#include <sparselab/rng.hpp>

#include "test_util.hpp"

using namespace sparselab;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("hermite_he matches closed forms and the rational-arithmetic oracle") {
  REQUIRE(hermite_he(2, 1.0) == 0.0);          // He_2 = x^2 - 1
  REQUIRE(hermite_he(3, 2.0) == Approx(2.0));  // He_3 = x^3 - 3x
  REQUIRE(hermite_he(0, 123.4) == 1.0);
  REQUIRE(hermite_he(1, -0.25) == -0.25);
  // Recurrence expanded symbolically and evaluated at x = 7/10 in exact
  // rational arithmetic: He_10(7/10) = 6854879570749 / 10^10.
  REQUIRE(hermite_he(10, 0.7) ==
          Approx(6854879570749.0 / 1e10).epsilon(1e-13));
  REQUIRE_THROWS_WITH(hermite_he(65, 0.0), ContainsSubstring("limit"));
}

TEST_CASE("hermite_normalized: closed forms, oracle value, degree guard") {
  REQUIRE(hermite_normalized(2, 0.0) ==
          Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-14));
  REQUIRE(hermite_normalized(0, 5.3) == 1.0);
  // He_8(11/10) = -14319911919 / 10^8 exactly; H_8 = He_8 / sqrt(8!).
  REQUIRE(hermite_normalized(8, 1.1) ==
          Approx(-14319911919.0 / 1e8 / std::sqrt(40320.0)).epsilon(1e-13));
  REQUIRE_THROWS_WITH(hermite_normalized(100, 1.0), ContainsSubstring("limit"));
}

TEST_CASE("hermite recurrence consistency on a grid") {
  for (int n = 1; n <= 30; ++n) {
    for (double x = -4.0; x <= 4.0; x += 0.25) {
      const double lhs = hermite_he(n + 1, x);
      const double rhs = x * hermite_he(n, x) - n * hermite_he(n - 1, x);
      const double scale = std::max({std::abs(lhs), std::abs(rhs), 1.0});
      REQUIRE(std::abs(lhs - rhs) <= 1e-9 * scale);
    }
  }
}

TEST_CASE("hermite_normalized_all agrees with single evaluations") {
  std::vector<double> vals;
  hermite_normalized_all(12, 0.83, vals);
  REQUIRE(vals.size() == 13);
  for (int k = 0; k <= 12; ++k) {
    REQUIRE(vals[k] == Approx(hermite_normalized(k, 0.83)).margin(1e-15));
  }
}

TEST_CASE("orthonormality of H_k under the standard normal (quadrature)") {
  // Deterministic check: Gauss-Hermite with 20 nodes integrates H_i H_j
  // (degree <= 16) exactly.
  const auto [nodes, weights] = gauss_hermite(20);
  std::vector<double> h;
  for (int i = 0; i <= 8; ++i) {
    for (int j = i; j <= 8; ++j) {
      double acc = 0.0;
      for (std::size_t q = 0; q < nodes.size(); ++q) {
        hermite_normalized_all(8, nodes[q], h);
        acc += weights[q] * h[i] * h[j];
      }
      const double expect = (i == j) ? 1.0 : 0.0;
      REQUIRE(std::abs(acc - expect) <= 1e-12);
    }
  }
}

TEST_CASE("orthonormality of H_k, Monte Carlo smoke check at low degree") {
  // E[(H_i H_j)^2] grows steeply with degree (about 2.15e6 already for
  // i = j = 8), so a 1e6-sample mean only resolves the low-degree pairs at
  // the 0.02 level. High degrees are covered by the quadrature test above.
  constexpr int kMaxIdx = 3;
  constexpr int kSamples = 1'000'000;
  Rng rng(20240901);
  std::vector<double> h;
  double acc[kMaxIdx + 1][kMaxIdx + 1] = {};
  for (int t = 0; t < kSamples; ++t) {
    const double x = rng.normal();
    hermite_normalized_all(kMaxIdx, x, h);
    for (int i = 0; i <= kMaxIdx; ++i)
      for (int j = i; j <= kMaxIdx; ++j) acc[i][j] += h[i] * h[j];
  }
  for (int i = 0; i <= kMaxIdx; ++i) {
    for (int j = i; j <= kMaxIdx; ++j) {
      const double expect = (i == j) ? 1.0 : 0.0;
      REQUIRE(std::abs(acc[i][j] / kSamples - expect) <= 0.02);
    }
  }
}

TEST_CASE("gaussian moments") {
  REQUIRE(gaussian_moment(0, 3.0) == 1.0);
  REQUIRE(gaussian_moment(1, 3.0) == 0.0);
  REQUIRE(gaussian_abs_moment(2, 1.0) == Approx(1.0));
  REQUIRE(gaussian_abs_moment(4, 1.0) == Approx(3.0));
  // Independent oracle: high-resolution quadrature of |x|^3 against N(0, 4).
  const double quad = testutil::simpson(
      [](double x) {
        return std::pow(std::abs(x), 3) * testutil::normal_pdf(x, 2.0);
      },
      -30.0, 30.0, 60000);
  REQUIRE(gaussian_abs_moment(3, 2.0) == Approx(quad).epsilon(1e-10));
  REQUIRE_THROWS_AS(gaussian_abs_moment(129, 1.0), std::domain_error);
}

TEST_CASE("poly_eval: monomial Horner and Chebyshev Clenshaw") {
  const auto mono = Polynomial::monomial({1.0, 2.0, 3.0});
  REQUIRE(poly_eval(mono, 2.0) == Approx(17.0));

  const auto t1 = Polynomial::chebyshev({0.0, 1.0}, -1.0, 1.0);
  REQUIRE(poly_eval(t1, 0.3) == Approx(0.3));

  const auto t2 = Polynomial::chebyshev({0.0, 0.0, 1.0}, -1.0, 1.0);
  REQUIRE(poly_eval(t2, 0.5) == Approx(-0.5));  // T_2 = 2x^2 - 1

  REQUIRE(t2.in_domain(0.5));
  REQUIRE_FALSE(t2.in_domain(1.5));
  REQUIRE(mono.in_domain(1e9));
}

TEST_CASE("Polynomial invariants and serial plumbing") {
  const auto p = Polynomial::monomial({1.0, 2.0, 0.0, 0.0});
  REQUIRE(p.degree() == 1);  // trailing zeros trimmed
  const auto z = Polynomial::monomial({});
  REQUIRE(z.degree() == 0);
  REQUIRE_THROWS_AS(Polynomial::chebyshev({1.0}, 2.0, 2.0),
                    std::invalid_argument);
}

// Reference evaluation by direct basis summation, T_k(t) = cos(k acos t).
static double cheb_naive(const Polynomial& p, double x) {
  const double t = (2.0 * x - (p.a + p.b)) / (p.b - p.a);
  double acc = 0.0;
  for (int k = 0; k <= p.degree(); ++k) {
    acc += p.coeffs[k] * std::cos(k * std::acos(t));
  }
  return acc;
}

TEST_CASE("Clenshaw agrees with naive basis summation up to degree 200") {
  Rng rng(7);
  std::vector<double> c(201);
  for (auto& v : c) v = rng.uniform(-1.0, 1.0);
  const auto p = Polynomial::chebyshev(c, -2.0, 3.0);
  double scale = 1.0;
  std::vector<double> xs, naive;
  for (double x = -2.0; x <= 3.0; x += 0.01) {
    xs.push_back(x);
    naive.push_back(cheb_naive(p, x));
    scale = std::max(scale, std::abs(naive.back()));
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    REQUIRE(std::abs(poly_eval(p, xs[i]) - naive[i]) <= 1e-10 * scale);
  }
}

TEST_CASE("Clenshaw stays stable at degree 10^4") {
  Rng rng(99);
  std::vector<double> c(10001);
  for (auto& v : c) v = rng.uniform(-10.0, 10.0);
  const auto p = Polynomial::chebyshev(c, -1.0, 1.0);
  double scale = 1.0;
  std::vector<double> xs, naive;
  for (int i = 0; i <= 200; ++i) {
    const double x = -1.0 + 2.0 * i / 200.0;
    xs.push_back(x);
    naive.push_back(cheb_naive(p, x));
    scale = std::max(scale, std::abs(naive.back()));
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    REQUIRE(std::abs(poly_eval(p, xs[i]) - naive[i]) <= 1e-10 * scale);
  }
}

TEST_CASE("cheb_project reproduces low-degree polynomials exactly") {
  const auto sq = cheb_project([](double x) { return x * x; }, 2, -1.0, 1.0);
  for (double x = -1.0; x <= 1.0; x += 0.01) {
    REQUIRE(poly_eval(sq, x) == Approx(x * x).margin(1e-12));
  }
  const auto con = cheb_project([](double) { return 4.25; }, 7, -3.0, 2.0);
  REQUIRE(con.coeffs[0] == Approx(4.25).margin(1e-13));
  for (int k = 1; k <= con.degree(); ++k) {
    REQUIRE(std::abs(con.coeffs[k]) <= 1e-13);
  }
}

TEST_CASE("cheb_project reports the offending node for non-finite values") {
  REQUIRE_THROWS_WITH(
      cheb_project([](double x) { return 1.0 / (x - x); }, 3, -1.0, 1.0),
      ContainsSubstring("node x="));
}

TEST_CASE("hermite_expand fixed points") {
  const double sigma = 2.7;
  const auto ident = Polynomial::monomial({0.0, 1.0});
  const auto hx = hermite_expand(ident, sigma);
  REQUIRE(hx.coeffs.size() == 2);
  REQUIRE(hx.coeffs[0] == Approx(0.0).margin(1e-13));
  REQUIRE(hx.coeffs[1] == Approx(sigma).epsilon(1e-13));

  const auto one = hermite_expand(Polynomial::monomial({1.0}), 1.0);
  REQUIRE(one.coeffs.size() == 1);
  REQUIRE(one.coeffs[0] == Approx(1.0));

  // x^2 = H_0 + sqrt(2) H_2 at unit scale; cross-checked by quadrature of
  // E[p(X) H_k(X)] below.
  const auto sq = hermite_expand(Polynomial::monomial({0.0, 0.0, 1.0}), 1.0);
  REQUIRE(sq.coeffs[0] == Approx(1.0).epsilon(1e-12));
  REQUIRE(sq.coeffs[1] == Approx(0.0).margin(1e-12));
  REQUIRE(sq.coeffs[2] == Approx(std::sqrt(2.0)).epsilon(1e-12));
  for (int k = 0; k <= 2; ++k) {
    const double quad = testutil::gaussian_expect(
        [&](double x) { return x * x * hermite_normalized(k, x); }, 1.0);
    REQUIRE(sq.coeffs[k] == Approx(quad).margin(1e-9));
  }
}

TEST_CASE("hermite_expand round-trips through synthesis") {
  // Relative to the polynomial's magnitude on the grid: the coefficient
  // representation magnifies like scale^degree, so pointwise-relative
  // accuracy near roots is not a meaningful ask.
  Rng rng(314);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> c(11);
    for (auto& v : c) v = rng.uniform(-2.0, 2.0);
    const auto p = Polynomial::monomial(c);
    const double scale = rng.uniform(0.5, 2.0);
    const auto h = hermite_expand(p, scale);
    double grid_scale = 1.0;
    for (double x = -3.0; x <= 3.0; x += 0.37) {
      grid_scale = std::max(grid_scale, std::abs(poly_eval(p, x)));
    }
    for (double x = -3.0; x <= 3.0; x += 0.37) {
      const double direct = poly_eval(p, x);
      const double synth = hermite_expansion_eval(h, x);
      REQUIRE(std::abs(direct - synth) <= 1e-9 * grid_scale);
    }
  }
}

TEST_CASE("Plancherel: sum of squared coefficients equals E[p(X)^2]") {
  Rng rng(2718);
  for (int rep = 0; rep < 100; ++rep) {
    const int deg = 1 + static_cast<int>(rng.uniform() * 10.0);
    std::vector<double> c(deg + 1);
    for (auto& v : c) v = rng.uniform(-1.0, 1.0);
    const auto p = Polynomial::monomial(c);
    const double scale = rng.uniform(0.5, 2.0);
    const auto h = hermite_expand(p, scale);
    double sumsq = 0.0;
    for (double v : h.coeffs) sumsq += v * v;
    const double quad = testutil::gaussian_expect(
        [&](double x) {
          const double px = poly_eval(p, x);
          return px * px;
        },
        scale);
    REQUIRE(sumsq == Approx(quad).epsilon(1e-6));
  }
}

TEST_CASE("gauss_hermite integrates polynomial moments exactly") {
  const auto [nodes, weights] = gauss_hermite(12);
  for (int p = 0; p <= 23; ++p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      acc += weights[i] * std::pow(nodes[i], p);
    }
    // Odd moments vanish by symmetry; judge them against the scale of the
    // neighboring even moment.
    const double scale = gaussian_moment(p % 2 == 0 ? p : p + 1, 1.0);
    REQUIRE(std::abs(acc - gaussian_moment(p, 1.0)) <= 1e-12 * scale);
  }
}
