#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "suffstat/learners.hpp"
#include "suffstat/synth.hpp"

using namespace suffstat;

namespace {

struct Split {
  Matrix xt, xv;
  Labels yt, yv;
};

Split halves(const Dataset& ds, double train_fraction = 0.8) {
  std::vector<std::size_t> idx(ds.rows());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const auto s = stratified_split(idx, ds.labels, train_fraction, 17);
  return {ds.features.select_rows(s.train_indices), ds.features.select_rows(s.valid_indices),
          select(ds.labels, s.train_indices), select(ds.labels, s.valid_indices)};
}

// Largest relative gap between the analytic gradient and central differences.
double gradient_check(const MlpModel& m, const Matrix& x, const Labels& y) {
  std::vector<std::size_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  const auto g = mlp_loss_gradient(m, x, y, rows);
  const double h = 1e-6;
  double worst = 0.0;
  auto probe = [&](auto member, std::size_t k, double analytic) {
    MlpModel plus = m, minus = m;
    (plus.*member)[k] += h;
    (minus.*member)[k] -= h;
    const double numeric = (mlp_loss(plus, x, y, rows) - mlp_loss(minus, x, y, rows)) / (2 * h);
    const double denom = std::max(1e-7, std::abs(numeric) + std::abs(analytic));
    worst = std::max(worst, std::abs(numeric - analytic) / denom);
  };
  for (std::size_t k = 0; k < m.w1.size(); ++k) probe(&MlpModel::w1, k, g.grad.w1[k]);
  for (std::size_t k = 0; k < m.b1.size(); ++k) probe(&MlpModel::b1, k, g.grad.b1[k]);
  for (std::size_t k = 0; k < m.w2.size(); ++k) probe(&MlpModel::w2, k, g.grad.w2[k]);
  MlpModel plus = m, minus = m;
  plus.b2 += h;
  minus.b2 -= h;
  const double numeric = (mlp_loss(plus, x, y, rows) - mlp_loss(minus, x, y, rows)) / (2 * h);
  worst = std::max(worst, std::abs(numeric - g.grad.b2) / std::max(1e-7, std::abs(numeric) + std::abs(g.grad.b2)));
  return worst;
}

}  // namespace

TEST_CASE("every family separates separable data") {
  const auto ds = synth_separable(1000, 1.0, 2024);
  const auto s = halves(ds);
  for (Family f : kAllFamilies) {
    const auto model = train(LearnerSpec::defaults(f), s.xt, s.yt, 5);
    INFO(to_string(f));
    CHECK(evaluate(model, s.xv, s.yv).accuracy >= 0.95);
  }
}

TEST_CASE("training is deterministic per seed") {
  const auto ds = synth_separable(200, 0.5, 3, 3);
  for (Family f : kAllFamilies) {
    const auto spec = LearnerSpec::defaults(f);
    const auto a = train(spec, ds.features, ds.labels, 99);
    const auto b = train(spec, ds.features, ds.labels, 99);
    INFO(to_string(f));
    CHECK(serialize(a) == serialize(b));
    CHECK(predict(a, ds.features) == predict(b, ds.features));
    const auto back = deserialize(serialize(a));
    CHECK(serialize(back) == serialize(a));
    CHECK(predict(back, ds.features) == predict(a, ds.features));
  }
  CHECK_THROWS_AS(deserialize("{\"format\":\"other\"}"), std::exception);
}

TEST_CASE("predict and evaluate") {
  TrainedModel zero;
  zero.params = LogisticModel{{0.0, 0.0}, 0.0};
  zero.width = 2;
  const Matrix x = Matrix::from_rows({{1, 2}, {-3, 4}, {0, 0}});
  CHECK(predict(zero, x) == Labels{1, 1, 1});
  const Matrix narrow = Matrix::from_rows({{1}});
  try {
    predict(zero, narrow);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::shape);
  }

  const Labels y{1, 0, 1, 1};
  CHECK(score_predictions(y, y).accuracy == 1.0);
  CHECK(score_predictions(y, y).error == 0.0);
  const Labels comp{0, 1, 0, 0};
  CHECK(score_predictions(comp, y).accuracy == 0.0);
  const Labels three{1, 0, 1, 0};
  const auto r = score_predictions(three, y);
  CHECK(r.accuracy == 0.75);
  CHECK(r.error == 1.0 - r.accuracy);
  const Labels none;
  try {
    score_predictions(none, none);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::empty_evaluation);
  }
}

TEST_CASE("training rejects bad input") {
  const Matrix x = Matrix::from_rows({{1}, {2}});
  const Labels same{1, 1};
  for (Family f : kAllFamilies) {
    try {
      train(LearnerSpec::defaults(f), x, same, 1);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::degenerate_label);
    }
  }
  const Matrix bad = Matrix::from_rows({{1}, {std::nan("")}});
  const Labels y{1, 0};
  try {
    train(LearnerSpec::defaults(Family::logistic), bad, y, 1);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::validation);
  }
}

TEST_CASE("unlimited tree memorizes distinct rows") {
  Rng rng(12);
  Matrix x(300, 3);
  Labels y(300);
  for (std::size_t i = 0; i < 300; ++i) {
    for (std::size_t j = 0; j < 3; ++j) x(i, j) = rng.normal();
    y[i] = rng.bernoulli(0.5) ? 1 : 0;
  }
  y[0] = 0;
  y[1] = 1;
  TreeParams p;
  p.max_depth = std::nullopt;
  const auto tree = train_tree(x, y, p);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) correct += tree.predict(x.row(i)) == y[i] ? 1 : 0;
  CHECK(correct == x.rows());

  TreeParams stump;
  stump.max_depth = 1;
  CHECK(train_tree(x, y, stump).depth() <= 1);
}

TEST_CASE("one-tree forest without bootstrap equals the tree") {
  Rng rng(44);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix x(150, 4);
    Labels y(150);
    for (std::size_t i = 0; i < 150; ++i) {
      for (std::size_t j = 0; j < 4; ++j) x(i, j) = rng.normal();
      y[i] = x(i, 0) + 0.5 * rng.normal() > 0 ? 1 : 0;
    }
    ForestParams fp;
    fp.n_trees = 1;
    fp.bootstrap = false;
    fp.max_features = 4;
    const auto forest = train_forest(x, y, fp, 123);
    const auto tree = train_tree(x, y, fp.tree);
    for (std::size_t i = 0; i < x.rows(); ++i) CHECK(forest.predict(x.row(i)) == tree.predict(x.row(i)));
  }
}

TEST_CASE("logistic loss never increases") {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 20 + rng.below(80), p = 1 + rng.below(5);
    Matrix x(n, p);
    Labels y(n);
    const double scale = trial % 2 ? 1.0 : 40.0;  // unscaled codes included
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p; ++j) x(i, j) = scale * rng.normal();
      y[i] = rng.bernoulli(0.4) ? 1 : 0;
    }
    y[0] = 0;
    y[1] = 1;
    LogisticTrace trace;
    train_logistic(x, y, LogisticParams{}, &trace);
    REQUIRE(trace.losses.size() >= 2);
    for (std::size_t k = 1; k < trace.losses.size(); ++k) CHECK(trace.losses[k] <= trace.losses[k - 1]);
  }
}

TEST_CASE("mlp gradients match central differences") {
  Rng rng(101);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix x(6, 3);
    Labels y(6);
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 3; ++j) x(i, j) = rng.normal();
      y[i] = static_cast<int>(i % 2);
    }
    Rng init(static_cast<std::uint64_t>(trial));
    auto m = init_mlp(3, 4, init);
    for (double& b : m.b1) b = init.uniform(-0.5, 0.5);
    m.b2 = init.uniform(-0.5, 0.5);
    CHECK(gradient_check(m, x, y) < 1e-4);
  }
}

TEST_CASE("learner spec validation") {
  LearnerSpec bad = LearnerSpec::defaults(Family::mlp);
  std::get<MlpParams>(bad.params).hidden = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  LearnerSpec tree = LearnerSpec::defaults(Family::tree);
  std::get<TreeParams>(tree.params).min_samples_split = 1;
  CHECK_THROWS_AS(tree.validate(), Error);
  CHECK(parse_family("forest") == Family::forest);
  CHECK_THROWS_AS(parse_family("svm"), Error);
}
