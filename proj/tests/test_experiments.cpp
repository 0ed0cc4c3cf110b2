#include <catch_amalgamated.hpp>

#include <cmath>

#include "suffstat/experiments.hpp"
#include "suffstat/synth.hpp"

using namespace suffstat;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.subsets = 6;
  c.subset_size = 120;
  c.seed = 3;
  ForestParams fp;
  fp.n_trees = 10;
  MlpParams mp;
  mp.epochs = 15;
  c.learners = {LearnerSpec{LogisticParams{}, "logistic"}, LearnerSpec{TreeParams{}, "tree"},
                LearnerSpec{fp, "forest"}, LearnerSpec{mp, "mlp"}};
  return c;
}

Dataset mixed_data(std::size_t n = 800, std::uint64_t seed = 10) {
  SynthSpec spec;
  spec.n_rows = n;
  spec.balance = 0.35;
  spec.seed = seed;
  spec.features = {{ColumnKind::numeric, 0.6}, {ColumnKind::numeric, 0.1}, {ColumnKind::categorical, 2.5},
                   {ColumnKind::numeric, 0.0}};
  return synth_dataset(spec);
}

bool same_records(const std::vector<ScatterRecord>& a, const std::vector<ScatterRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].id != b[i].id || a[i].model != b[i].model || a[i].effect_size != b[i].effect_size ||
        a[i].outcome != b[i].outcome || a[i].note != b[i].note) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("subset experiment record counts and determinism") {
  const auto cfg = small_config();
  const auto data = mixed_data();
  const auto r = run_subset_experiment(cfg, data, 1);
  CHECK(r.series.averaged.size() == 6);
  CHECK(r.series.per_model.size() == 24);
  CHECK(r.series.primary == Granularity::model_averaged);
  CHECK(r.summary.primary_summary().n_points == 6);
  for (const auto& rec : r.series.per_model) {
    CHECK(rec.outcome >= 0.0);
    CHECK(rec.outcome <= 1.0);
    CHECK(rec.effect_size >= 0.0);
  }
  // Averaged outcome is the mean over learners of the same subset.
  for (std::size_t s = 0; s < 6; ++s) {
    double sum = 0;
    for (std::size_t f = 0; f < 4; ++f) sum += r.series.per_model[s * 4 + f].outcome;
    CHECK(std::abs(r.series.averaged[s].outcome - sum / 4) < 1e-15);
  }
  const auto parallel = run_subset_experiment(cfg, data, 3);
  CHECK(same_records(r.series.per_model, parallel.series.per_model));
  CHECK(same_records(r.series.averaged, parallel.series.averaged));
  CHECK(r.summary.averaged.r_squared == parallel.summary.averaged.r_squared);

  const auto s = r.summary.averaged;
  CHECK(std::abs(s.r_squared - s.pearson_r * s.pearson_r) < 1e-12);
}

TEST_CASE("per-model granularity makes per-model records primary") {
  auto cfg = small_config();
  cfg.granularity = Granularity::per_model;
  const auto r = run_subset_experiment(cfg, mixed_data(), 2);
  CHECK(r.series.primary_records().size() == 24);
  CHECK(r.summary.primary_summary().n_points == 24);
}

TEST_CASE("degenerate subsets are skipped and logged") {
  auto data = mixed_data(600, 4);
  // Force the first subset's rows to one class by relabelling everything the
  // partition puts there.
  auto cfg = small_config();
  cfg.subsets = 4;
  cfg.subset_size = 100;
  const auto parts = partition_subsets(data.rows(), 4, 100, derive_seed(cfg.seed, "partition"));
  for (auto i : parts.subsets[0]) data.labels[i] = 0;
  const auto r = run_subset_experiment(cfg, data, 1);
  CHECK(r.series.averaged.size() == 3);
  REQUIRE(r.diagnostics.size() >= 1);
  CHECK(r.diagnostics[0].find("subset 0") != std::string::npos);
}

TEST_CASE("constant outcome reports zero variance") {
  auto ds = synth_separable(400, 4.0, 12, 2);
  ExperimentConfig cfg;
  cfg.subsets = 4;
  cfg.subset_size = 100;
  cfg.learners = {LearnerSpec::defaults(Family::logistic), LearnerSpec::defaults(Family::tree)};
  const auto r = run_subset_experiment(cfg, ds, 1);
  for (const auto& rec : r.series.averaged) CHECK(rec.outcome == 1.0);
  CHECK(r.summary.averaged.zero_variance);
  CHECK(r.summary.averaged.r_squared == 0.0);
}

TEST_CASE("ablation emits one point per feature") {
  auto cfg = small_config();
  cfg.subsets = 5;
  cfg.subset_size = 100;
  const auto data = mixed_data(600, 6);
  const auto r = run_ablation_experiment(cfg, data, 1);
  REQUIRE(r.series.averaged.size() == 4);
  CHECK(r.series.per_model.size() == 16);
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(r.series.averaged[j].id == j);
    CHECK(r.series.averaged[j].note == data.columns[j].name);
    const auto expected = average_effect_size(data.select_rows([&] {
      const auto parts = partition_subsets(data.rows(), 5, 100, derive_seed(cfg.seed, "partition"));
      std::vector<std::size_t> rows;
      for (const auto& p : parts.subsets) rows.insert(rows.end(), p.begin(), p.end());
      return rows;
    }()).drop_feature(j)).average;
    CHECK(r.series.averaged[j].effect_size == expected);
  }
  const auto parallel = run_ablation_experiment(cfg, data, 4);
  CHECK(same_records(r.series.per_model, parallel.series.per_model));

  SynthSpec two;
  two.n_rows = 300;
  two.features = {{ColumnKind::numeric, 0.5}, {ColumnKind::numeric, 0.2}};
  cfg.subsets = 2;
  try {
    run_ablation_experiment(cfg, synth_dataset(two), 1);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::insufficient_points);
  }
}

TEST_CASE("curve experiment") {
  auto cfg = small_config();
  cfg.subsets = 4;
  cfg.subset_size = 150;
  const auto data = mixed_data(700, 8);
  const auto r = run_curve_experiment(cfg, data, 1);
  CHECK(r.curves.size() == 16);
  CHECK(r.series.log_slope.per_model.size() == 16);
  CHECK(r.series.gap_slope.averaged.size() == 4);
  CHECK(r.series.log_slope.primary == Granularity::per_model);
  CHECK(r.log_summary.abs_per_model.has_value());
  for (std::size_t i = 0; i < r.curves.size(); ++i) {
    CHECK(r.series.log_slope.per_model[i].outcome == fit_log_model(r.curves[i].curve).b);
    CHECK(r.series.gap_slope.per_model[i].outcome == fit_gap_slope(r.curves[i].curve).slope);
  }
  const auto parallel = run_curve_experiment(cfg, data, 3);
  CHECK(same_records(r.series.log_slope.per_model, parallel.series.log_slope.per_model));
  CHECK(same_records(r.series.gap_slope.per_model, parallel.series.gap_slope.per_model));
}

TEST_CASE("slopes proportional to effect size correlate perfectly") {
  std::vector<SubsetCurve> curves;
  for (std::size_t s = 0; s < 12; ++s) {
    const double effect = 0.1 + 0.05 * static_cast<double>(s);
    for (Family f : kAllFamilies) {
      SubsetCurve c;
      c.subset_id = s;
      c.effect_size = effect;
      c.curve.family = f;
      const double b = -0.02 * effect;
      for (std::size_t n = 40; n <= 400; n += 40) {
        const double valid = 0.5 + b * std::log(static_cast<double>(n));
        c.curve.points.push_back({n, 0.0, valid});
      }
      curves.push_back(c);
    }
  }
  const auto series = curve_records(curves, Granularity::per_model);
  const auto log_s = summarize_series(series.log_slope);
  const auto gap_s = summarize_series(series.gap_slope);
  CHECK(std::abs(log_s.per_model.r_squared - 1.0) < 1e-9);
  CHECK(std::abs(log_s.averaged.r_squared - 1.0) < 1e-9);
  CHECK(std::abs(gap_s.per_model.r_squared - 1.0) < 1e-9);
}

TEST_CASE("config validation") {
  ExperimentConfig c;
  c.split_fraction = 1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = ExperimentConfig{};
  c.fractions = {0.5, 0.3};
  CHECK_THROWS_AS(c.validate(), Error);
  c = ExperimentConfig{};
  c.learners.clear();
  CHECK_THROWS_AS(c.validate(), Error);
  CHECK(parse_granularity("per-model") == Granularity::per_model);
  CHECK_THROWS_AS(parse_granularity("sometimes"), Error);

  const auto data = mixed_data(100, 1);
  ExperimentConfig big;
  try {
    run_subset_experiment(big, data, 1);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::insufficient_rows);
  }
}
