#include <catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "suffstat/regression.hpp"

using namespace suffstat;

TEST_CASE("ols worked values") {
  const std::vector<double> x{1, 2, 3}, y{1, 2, 2};
  const auto fit = ols_fit(x, y);
  CHECK(std::abs(fit.slope - 0.5) < 1e-12);
  CHECK(std::abs(fit.intercept - 2.0 / 3.0) < 1e-12);

  const std::vector<double> line{3, 5, 7, 9};
  const std::vector<double> xs{1, 2, 3, 4};
  const auto exact = ols_fit(xs, line);
  CHECK(std::abs(exact.slope - 2.0) < 1e-12);
  CHECK(std::abs(exact.intercept - 1.0) < 1e-12);
  CHECK(exact.residual_sse < 1e-24);

  const std::vector<double> flat{4, 4, 4, 4};
  const auto f = ols_fit(xs, flat);
  CHECK(f.slope == 0.0);
  CHECK(f.intercept == 4.0);

  try {
    ols_fit(flat, xs);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::zero_variance);
  }
}

TEST_CASE("r squared worked values") {
  const std::vector<double> x{1, 2, 3}, y{1, 2, 2};
  CHECK(std::abs(r_squared(x, y) - 0.75) < 1e-12);
  std::vector<double> lin;
  for (double v : x) lin.push_back(-3 * v + 7);
  CHECK(std::abs(r_squared(x, lin) - 1.0) < 1e-12);

  const std::vector<double> flat{2, 2, 2};
  const auto c = correlation(x, flat);
  CHECK(c.zero_variance);
  CHECK(c.r_squared == 0.0);

  Rng rng(99);
  std::vector<double> a(10000), b(10000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = rng.normal();
    b[i] = rng.normal();
  }
  CHECK(r_squared(a, b) < 0.01);
}

TEST_CASE("summaries need three points and report zero variance") {
  const std::vector<double> two{1, 2};
  try {
    summarize(two, two);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::insufficient_points);
  }
  const std::vector<double> x{0.1, 0.2, 0.3}, y{0.8, 0.8, 0.8};
  const auto s = summarize(x, y);
  CHECK(s.zero_variance);
  CHECK(s.r_squared == 0.0);
  CHECK(s.n_points == 3);
  const auto flat_x = summarize(y, x);
  CHECK(flat_x.zero_variance);
  CHECK(flat_x.slope == 0.0);
}

TEST_CASE("regression agrees with brute-force oracles") {
  Rng rng(31337);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 3 + rng.below(10);
    const auto x = oracle::random_values(rng, n);
    const auto y = oracle::random_values(rng, n);
    const auto fit = ols_fit(x, y);
    const auto want = oracle::ols(x, y);
    CHECK(oracle::close(fit.slope, want.slope, 1e-12));
    CHECK(oracle::close(fit.intercept, want.intercept, 1e-12));
    CHECK(std::abs(r_squared(x, y) - oracle::r_squared(x, y)) < 1e-12);
  }
}

TEST_CASE("regression invariants on random inputs") {
  Rng rng(4242);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 3 + rng.below(10);
    const auto x = oracle::random_values(rng, n);
    const auto y = oracle::random_values(rng, n);
    const auto c = correlation(x, y);
    CHECK(c.r_squared >= 0.0);
    CHECK(c.r_squared <= 1.0);
    CHECK(std::abs(c.r_squared - c.pearson_r * c.pearson_r) < 1e-12);
    CHECK(std::abs(r_squared(x, y) - r_squared(y, x)) < 1e-12);

    const double a = rng.uniform(0.5, 3.0) * (rng.bernoulli(0.5) ? 1 : -1);
    const double cc = rng.uniform(0.5, 3.0) * (rng.bernoulli(0.5) ? 1 : -1);
    std::vector<double> xa(x), yc(y);
    for (double& v : xa) v = a * v + 4.0;
    for (double& v : yc) v = cc * v - 2.0;
    CHECK(std::abs(r_squared(xa, yc) - c.r_squared) < 1e-9);

    // Normal equations: residuals sum to zero and are orthogonal to x.
    const auto fit = ols_fit(x, y);
    double sr = 0, srx = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      sr += r;
      srx += r * x[i];
    }
    CHECK(std::abs(sr) < 1e-9);
    CHECK(std::abs(srx) < 1e-9);

    // R² equals 1 - SSE/SST of the fitted line.
    const double my = static_cast<double>(oracle::mean(y));
    double sst = 0;
    for (double v : y) sst += (v - my) * (v - my);
    CHECK(std::abs(c.r_squared - (1.0 - fit.residual_sse / sst)) < 1e-12);
  }
}
