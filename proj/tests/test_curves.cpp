#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "suffstat/curves.hpp"
#include "suffstat/synth.hpp"

using namespace suffstat;

namespace {

LearningCurve make_curve(std::vector<std::size_t> n, std::vector<double> train, std::vector<double> valid) {
  LearningCurve c;
  for (std::size_t i = 0; i < n.size(); ++i) c.points.push_back({n[i], train[i], valid[i]});
  return c;
}

struct Fixture {
  Dataset ds;
  SplitPair split;
};

Fixture fixture(std::size_t n = 500, std::uint64_t seed = 1) {
  SynthSpec spec;
  spec.n_rows = n;
  spec.balance = 0.3;
  spec.seed = seed;
  spec.features = {{ColumnKind::numeric, 0.8}, {ColumnKind::numeric, 0.2}, {ColumnKind::categorical, 3.0}};
  Fixture f;
  f.ds = synth_dataset(spec);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  f.split = stratified_split(idx, f.ds.labels, 0.8, 9);
  return f;
}

}  // namespace

TEST_CASE("curve sizes on a 400-row training side") {
  const auto grid = default_fraction_grid();
  const auto sizes = curve_sizes(grid, 400);
  CHECK(sizes == std::vector<std::size_t>{40, 80, 120, 160, 200, 240, 280, 320, 360, 400});
  const std::vector<double> bad{0.5, 0.5};
  CHECK_THROWS_AS(curve_sizes(bad, 10), Error);
}

TEST_CASE("learning curve on a 400/100 split") {
  const auto f = fixture();
  REQUIRE(f.split.train_indices.size() == 400);
  const auto grid = default_fraction_grid();
  const auto curve = compute_learning_curve(LearnerSpec::defaults(Family::logistic), f.ds.features, f.ds.labels,
                                            f.split, grid, 5);
  REQUIRE(curve.points.size() == 10);
  for (std::size_t k = 0; k < 10; ++k) {
    CHECK(curve.points[k].n_train == 40 * (k + 1));
    CHECK(curve.points[k].train_error >= 0.0);
    CHECK(curve.points[k].valid_error <= 1.0);
  }
  CHECK(curve.valid_indices == f.split.valid_indices);

  // Nested training slices drawn from the training side only.
  std::vector<std::size_t> order(curve.training_order);
  std::sort(order.begin(), order.end());
  CHECK(order == f.split.train_indices);

  const auto again = compute_learning_curve(LearnerSpec::defaults(Family::logistic), f.ds.features, f.ds.labels,
                                            f.split, grid, 5);
  for (std::size_t k = 0; k < 10; ++k) {
    CHECK(again.points[k].train_error == curve.points[k].train_error);
    CHECK(again.points[k].valid_error == curve.points[k].valid_error);
  }
}

TEST_CASE("prefixes keep the class ratio") {
  std::vector<std::size_t> idx(400);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<int> labels(400);
  for (std::size_t i = 0; i < 400; ++i) labels[i] = i < 100 ? 1 : 0;
  const auto order = stratified_order(idx, labels, 3);
  for (std::size_t n = 40; n <= 400; n += 40) {
    std::size_t pos = 0;
    for (std::size_t k = 0; k < n; ++k) pos += static_cast<std::size_t>(labels[order[k]]);
    CHECK(pos == n / 4);
  }
}

TEST_CASE("memorizing tree has zero training error") {
  const auto f = fixture(300, 4);
  TreeParams p;
  p.max_depth = std::nullopt;
  const auto curve = compute_learning_curve(LearnerSpec{p, "tree"}, f.ds.features, f.ds.labels, f.split,
                                            default_fraction_grid(), 2);
  for (const auto& pt : curve.points) CHECK(pt.train_error == 0.0);
}

TEST_CASE("too few fractions is an insufficient curve") {
  const auto f = fixture(100, 2);
  const std::vector<double> one{1.0};
  try {
    compute_learning_curve(LearnerSpec::defaults(Family::logistic), f.ds.features, f.ds.labels, f.split, one, 1);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::insufficient_curve);
  }
  // Tiny fractions collapse to slices below two rows or with one class and are skipped.
  Diagnostics diag;
  const std::vector<double> grid{0.001, 0.002, 0.5, 0.75, 1.0};
  const auto c = compute_learning_curve(LearnerSpec::defaults(Family::logistic), f.ds.features, f.ds.labels,
                                        f.split, grid, 1, &diag);
  CHECK(c.points.size() == 3);
  CHECK(diag.size() == 2);
}

TEST_CASE("log fit worked values") {
  std::vector<std::size_t> n{10, 20, 50, 100, 400};
  std::vector<double> e, zeros(n.size(), 0.0);
  for (auto k : n) e.push_back(0.5 - 0.04 * std::log(static_cast<double>(k)));
  const auto fit = fit_log_model(make_curve(n, zeros, e));
  CHECK(std::abs(fit.a - 0.5) < 1e-9);
  CHECK(std::abs(fit.b + 0.04) < 1e-9);
  CHECK(fit.residual_sse < 1e-18);

  const auto flat = fit_log_model(make_curve(n, zeros, std::vector<double>(n.size(), 0.2)));
  CHECK(std::abs(flat.a - 0.2) < 1e-12);
  CHECK(std::abs(flat.b) < 1e-12);

  const auto three = fit_log_model(make_curve({10, 100, 1000}, {0, 0, 0}, {0.3, 0.2, 0.1}));
  CHECK(std::abs(three.b + 0.1 / std::log(10.0)) < 1e-12);
  CHECK(std::abs(three.b + 0.04343) < 1e-5);
}

TEST_CASE("gap fit worked values") {
  const auto same = fit_gap_slope(make_curve({10, 20, 30}, {0.1, 0.2, 0.3}, {0.1, 0.2, 0.3}));
  CHECK(same.slope == 0.0);
  CHECK(same.intercept == 0.0);

  std::vector<std::size_t> n{40, 80, 120, 160};
  std::vector<double> train(n.size(), 0.05), valid;
  for (auto k : n) valid.push_back(0.05 + 0.5 - 0.001 * static_cast<double>(k));
  const auto exact = fit_gap_slope(make_curve(n, train, valid));
  CHECK(std::abs(exact.slope + 0.001) < 1e-12);
  CHECK(exact.residual_sse < 1e-18);

  const auto three = fit_gap_slope(make_curve({40, 80, 120}, {0, 0, 0}, {0.30, 0.25, 0.23}));
  CHECK(std::abs(three.slope + 8.75e-4) < 1e-12);

  try {
    fit_gap_slope(make_curve({10, 20}, {0, 0}, {0, 0}));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::insufficient_curve);
  }
  try {
    fit_gap_slope(make_curve({10, 10, 10}, {0, 0, 0}, {0.1, 0.2, 0.3}));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::singular_design);
  }
}

TEST_CASE("curve fits satisfy the normal equations") {
  Rng rng(55);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::size_t> n;
    std::size_t at = 2;
    const std::size_t k = 3 + rng.below(8);
    for (std::size_t i = 0; i < k; ++i) {
      at += 1 + rng.below(60);
      n.push_back(at);
    }
    std::vector<double> tr(k), va(k);
    for (std::size_t i = 0; i < k; ++i) {
      tr[i] = rng.uniform(0.0, 0.3);
      va[i] = rng.uniform(0.1, 0.5);
    }
    const auto c = make_curve(n, tr, va);
    const auto lf = fit_log_model(c);
    const auto gf = fit_gap_slope(c);
    double s1 = 0, s2 = 0, g1 = 0, g2 = 0;
    for (std::size_t i = 0; i < k; ++i) {
      const double ln = std::log(static_cast<double>(n[i]));
      const double r = va[i] - lf.a - lf.b * ln;
      s1 += r;
      s2 += r * ln;
      const double x = static_cast<double>(n[i]);
      const double rg = (va[i] - tr[i]) - gf.intercept - gf.slope * x;
      g1 += rg;
      g2 += rg * x;
    }
    CHECK(std::abs(s1) < 1e-9);
    CHECK(std::abs(s2) < 1e-9);
    CHECK(std::abs(g1) < 1e-9);
    CHECK(std::abs(g2) < 1e-9 * std::max(1.0, static_cast<double>(at)));
  }
}
