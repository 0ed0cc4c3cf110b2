#pragma once

// Experiment runners: effect size against validation accuracy over row subsets
// and over single-feature ablations, and effect size against learning-curve
// slopes. Every stochastic step draws its seed from (master seed, experiment,
// subset, family), and results land in per-item slots, so the worker count
// never changes the output.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "suffstat/curves.hpp"
#include "suffstat/effects.hpp"
#include "suffstat/error.hpp"
#include "suffstat/ingest.hpp"
#include "suffstat/learners.hpp"
#include "suffstat/parallel.hpp"
#include "suffstat/regression.hpp"

namespace suffstat {

enum class Granularity { automatic, per_model, model_averaged };

inline std::string_view to_string(Granularity g) {
  switch (g) {
    case Granularity::automatic: return "auto";
    case Granularity::per_model: return "per-model";
    case Granularity::model_averaged: return "model-averaged";
  }
  return "?";
}

inline Granularity parse_granularity(std::string_view s) {
  if (s == "auto") return Granularity::automatic;
  if (s == "per-model") return Granularity::per_model;
  if (s == "model-averaged") return Granularity::model_averaged;
  throw Error(ErrorCode::validation, "granularity must be auto, per-model or model-averaged");
}

inline std::vector<LearnerSpec> default_learners() {
  std::vector<LearnerSpec> out;
  for (Family f : kAllFamilies) out.push_back(LearnerSpec::defaults(f));
  return out;
}

struct ExperimentConfig {
  std::string label = "income";
  std::string positive = ">50K";
  std::size_t subsets = 66;
  std::size_t subset_size = 500;
  double split_fraction = 0.8;
  std::vector<double> fractions = default_fraction_grid();
  std::vector<LearnerSpec> learners = default_learners();
  std::uint64_t seed = 7;
  Granularity granularity = Granularity::automatic;
  EffectOptions effects;

  void validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::validation, what); };
    if (label.empty()) fail("label: must name a column");
    if (subsets == 0) fail("subsets: must be positive");
    if (subset_size < 2) fail("subset_size: must be at least 2");
    if (!(split_fraction > 0.0 && split_fraction < 1.0)) fail("split_fraction: must lie in (0, 1)");
    if (fractions.empty()) fail("fractions: at least one fraction is required");
    for (std::size_t i = 0; i < fractions.size(); ++i) {
      if (!(fractions[i] > 0.0 && fractions[i] <= 1.0)) fail("fractions: values must lie in (0, 1]");
      if (i > 0 && !(fractions[i] > fractions[i - 1])) fail("fractions: must be strictly increasing");
    }
    if (learners.empty()) fail("learners: at least one learner is required");
    for (const auto& l : learners) l.validate();
    if (!(effects.magnitude_cap > 0.0)) fail("effect_cap: must be positive");
  }
};

inline constexpr std::string_view kAveragedModel = "averaged";

struct ScatterRecord {
  std::size_t id = 0;       // subset id, or dropped-feature index for ablations
  std::string model;        // family name, or "averaged"
  double effect_size = 0.0;
  double outcome = 0.0;
  std::string note;         // dropped feature name for ablations
};

struct ScatterSeries {
  std::string outcome_name;
  std::vector<ScatterRecord> per_model;
  std::vector<ScatterRecord> averaged;
  Granularity primary = Granularity::model_averaged;
  bool has_abs = false;  // slopes also carry |outcome| summaries

  const std::vector<ScatterRecord>& primary_records() const {
    return primary == Granularity::per_model ? per_model : averaged;
  }
};

struct SeriesSummary {
  CorrelationSummary per_model;
  CorrelationSummary averaged;
  std::optional<CorrelationSummary> abs_per_model;
  std::optional<CorrelationSummary> abs_averaged;
  Granularity primary = Granularity::model_averaged;

  const CorrelationSummary& primary_summary() const {
    return primary == Granularity::per_model ? per_model : averaged;
  }
};

inline CorrelationSummary summarize_records(std::span<const ScatterRecord> records, bool absolute = false) {
  std::vector<double> x, y;
  for (const auto& r : records) {
    x.push_back(r.effect_size);
    y.push_back(absolute ? std::abs(r.outcome) : r.outcome);
  }
  return summarize(x, y);
}

// Both granularities; throws when either has fewer than three points.
inline SeriesSummary summarize_series(const ScatterSeries& s) {
  SeriesSummary out;
  out.primary = s.primary;
  out.per_model = summarize_records(s.per_model);
  out.averaged = summarize_records(s.averaged);
  if (s.has_abs) {
    out.abs_per_model = summarize_records(s.per_model, true);
    out.abs_averaged = summarize_records(s.averaged, true);
  }
  return out;
}

struct ExperimentResult {
  std::string experiment;
  ScatterSeries series;
  SeriesSummary summary;
  Diagnostics diagnostics;
};

namespace detail {

inline Granularity resolve(Granularity g, Granularity automatic) {
  return g == Granularity::automatic ? automatic : g;
}

inline std::vector<std::size_t> iota_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

// Everything a subset contributes before any model is trained.
struct PreparedSubset {
  std::size_t id = 0;
  double effect_size = 0.0;
  Matrix x;  // standardized over the whole subset
  Labels y;
  SplitPair split;
};

inline std::optional<PreparedSubset> prepare_subset(const ExperimentConfig& config, const Dataset& data,
                                                    std::size_t id, std::span<const std::size_t> rows,
                                                    Diagnostics& diagnostics) {
  const Dataset sub = data.select_rows(rows);
  try {
    PreparedSubset p;
    p.id = id;
    p.effect_size = average_effect_size(sub, config.effects).average;
    const auto kinds = sub.kinds();
    p.x = standardize_features(sub.features, kinds);
    p.y = sub.labels;
    p.split = stratified_split(iota_indices(sub.rows()), p.y, config.split_fraction,
                               derive_seed(config.seed, "split", id));
    return p;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::degenerate_label && e.code() != ErrorCode::insufficient_group &&
        e.code() != ErrorCode::validation) {
      throw;
    }
    diagnostics.push_back("subset " + std::to_string(id) + " skipped: " + e.what());
    return std::nullopt;
  }
}

inline double validation_accuracy(const LearnerSpec& spec, const Matrix& x, std::span<const int> y,
                                  const SplitPair& split, std::uint64_t seed) {
  const Matrix xt = x.select_rows(split.train_indices);
  const Labels yt = select(y, split.train_indices);
  const Matrix xv = x.select_rows(split.valid_indices);
  const Labels yv = select(y, split.valid_indices);
  return evaluate(train(spec, xt, yt, seed), xv, yv).accuracy;
}

inline std::vector<std::vector<std::size_t>> partition_for(const ExperimentConfig& config,
                                                           const Dataset& data) {
  return partition_subsets(data.rows(), config.subsets, config.subset_size,
                           derive_seed(config.seed, "partition"))
      .subsets;
}

inline void append_averaged(ScatterSeries& s, std::size_t id, double effect, std::span<const double> outcomes,
                            std::string note = {}) {
  if (outcomes.empty()) return;
  double sum = 0.0;
  for (double o : outcomes) sum += o;
  s.averaged.push_back({id, std::string(kAveragedModel), effect, sum / static_cast<double>(outcomes.size()),
                        std::move(note)});
}

}  // namespace detail

// Row subsets with a fixed feature set: per subset, the average effect size
// against validation accuracy of each learner.
inline ScatterSeries subset_records(const ExperimentConfig& config, const Dataset& data, std::size_t jobs,
                                    Diagnostics& diagnostics) {
  config.validate();
  const auto parts = detail::partition_for(config, data);
  const std::size_t families = config.learners.size();

  struct Slot {
    std::optional<detail::PreparedSubset> prepared;
    std::vector<double> accuracy;
    Diagnostics notes;
  };
  std::vector<Slot> slots(parts.size());
  parallel_for(parts.size(), jobs, [&](std::size_t s) {
    auto& slot = slots[s];
    slot.prepared = detail::prepare_subset(config, data, s, parts[s], slot.notes);
    if (!slot.prepared) return;
    const auto& p = *slot.prepared;
    for (std::size_t f = 0; f < families; ++f) {
      const auto& spec = config.learners[f];
      slot.accuracy.push_back(detail::validation_accuracy(
          spec, p.x, p.y, p.split, derive_seed(config.seed, "exp1-subsets", s, static_cast<int>(f))));
    }
    slot.prepared->x = Matrix();
  });

  ScatterSeries series;
  series.outcome_name = "accuracy";
  series.primary = detail::resolve(config.granularity, Granularity::model_averaged);
  for (std::size_t s = 0; s < slots.size(); ++s) {
    const auto& slot = slots[s];
    diagnostics.insert(diagnostics.end(), slot.notes.begin(), slot.notes.end());
    if (!slot.prepared) continue;
    for (std::size_t f = 0; f < families; ++f) {
      series.per_model.push_back({s, std::string(to_string(config.learners[f].family())),
                                  slot.prepared->effect_size, slot.accuracy[f], {}});
    }
    detail::append_averaged(series, s, slot.prepared->effect_size, slot.accuracy);
  }
  return series;
}

inline ExperimentResult run_subset_experiment(const ExperimentConfig& config, const Dataset& data,
                                              std::size_t jobs = 1) {
  ExperimentResult r;
  r.experiment = "exp1-subsets";
  r.series = subset_records(config, data, jobs, r.diagnostics);
  r.summary = summarize_series(r.series);
  return r;
}

// Drop one feature at a time from the working set (the union of the
// partitioned subsets), recompute the average effect size on the remaining
// features, and train every learner on one fixed stratified split.
inline ScatterSeries ablation_records(const ExperimentConfig& config, const Dataset& data, std::size_t jobs,
                                      Diagnostics& diagnostics) {
  config.validate();
  if (data.width() < 2) throw Error(ErrorCode::validation, "ablation needs at least two features");
  const auto parts = detail::partition_for(config, data);
  std::vector<std::size_t> rows;
  for (const auto& p : parts) rows.insert(rows.end(), p.begin(), p.end());
  const Dataset working = data.select_rows(rows);
  const Matrix standardized = standardize_features(working.features, working.kinds());
  const SplitPair split = stratified_split(detail::iota_indices(working.rows()), working.labels,
                                           config.split_fraction, derive_seed(config.seed, "ablation-split"));

  const std::size_t p = working.width();
  const std::size_t families = config.learners.size();
  std::vector<std::optional<double>> effect(p);
  std::vector<std::string> effect_notes(p);
  parallel_for(p, jobs, [&](std::size_t j) {
    try {
      effect[j] = average_effect_size(working.drop_feature(j), config.effects).average;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::degenerate_label && e.code() != ErrorCode::insufficient_group &&
          e.code() != ErrorCode::validation) {
        throw;
      }
      effect_notes[j] = "ablation of '" + working.columns[j].name + "' skipped: " + e.what();
    }
  });

  std::vector<double> accuracy(p * families, 0.0);
  parallel_for(p * families, jobs, [&](std::size_t item) {
    const std::size_t j = item / families;
    const std::size_t f = item % families;
    if (!effect[j]) return;
    const auto& spec = config.learners[f];
    accuracy[item] = detail::validation_accuracy(spec, standardized.drop_column(j), working.labels, split,
                                                 derive_seed(config.seed, "exp1-ablation", j, static_cast<int>(f)));
  });

  ScatterSeries series;
  series.outcome_name = "accuracy";
  series.primary = detail::resolve(config.granularity, Granularity::model_averaged);
  for (std::size_t j = 0; j < p; ++j) {
    if (!effect[j]) {
      diagnostics.push_back(effect_notes[j]);
      continue;
    }
    const std::string& dropped = working.columns[j].name;
    const std::span<const double> acc(accuracy.data() + j * families, families);
    for (std::size_t f = 0; f < families; ++f) {
      series.per_model.push_back({j, std::string(to_string(config.learners[f].family())), *effect[j], acc[f], dropped});
    }
    detail::append_averaged(series, j, *effect[j], acc, dropped);
  }
  return series;
}

inline ExperimentResult run_ablation_experiment(const ExperimentConfig& config, const Dataset& data,
                                                std::size_t jobs = 1) {
  ExperimentResult r;
  r.experiment = "exp1-ablation";
  r.series = ablation_records(config, data, jobs, r.diagnostics);
  r.summary = summarize_series(r.series);
  return r;
}

// A fitted learning curve tagged with the subset it came from.
struct SubsetCurve {
  std::size_t subset_id = 0;
  double effect_size = 0.0;
  LearningCurve curve;
};

struct CurveSeries {
  ScatterSeries log_slope;
  ScatterSeries gap_slope;
};

// Log-slope b and gap slope per curve, plus per-subset means over learners.
// Curves must arrive ordered by (subset, learner).
inline CurveSeries curve_records(std::span<const SubsetCurve> curves, Granularity primary) {
  CurveSeries out;
  out.log_slope.outcome_name = "log_slope";
  out.gap_slope.outcome_name = "gap_slope";
  for (auto* s : {&out.log_slope, &out.gap_slope}) {
    s->primary = primary;
    s->has_abs = true;
  }
  std::vector<double> logs, gaps;
  auto flush = [&](std::size_t id, double effect) {
    detail::append_averaged(out.log_slope, id, effect, logs);
    detail::append_averaged(out.gap_slope, id, effect, gaps);
    logs.clear();
    gaps.clear();
  };
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& c = curves[i];
    const double b = fit_log_model(c.curve).b;
    const double g = fit_gap_slope(c.curve).slope;
    const std::string model(to_string(c.curve.family));
    out.log_slope.per_model.push_back({c.subset_id, model, c.effect_size, b, {}});
    out.gap_slope.per_model.push_back({c.subset_id, model, c.effect_size, g, {}});
    logs.push_back(b);
    gaps.push_back(g);
    if (i + 1 == curves.size() || curves[i + 1].subset_id != c.subset_id) flush(c.subset_id, c.effect_size);
  }
  return out;
}

struct CurveExperimentResult {
  std::vector<SubsetCurve> curves;
  CurveSeries series;
  SeriesSummary log_summary;
  SeriesSummary gap_summary;
  Diagnostics diagnostics;
};

inline std::vector<SubsetCurve> subset_curves(const ExperimentConfig& config, const Dataset& data,
                                              std::size_t jobs, Diagnostics& diagnostics) {
  config.validate();
  const auto parts = detail::partition_for(config, data);
  const std::size_t families = config.learners.size();

  std::vector<std::optional<detail::PreparedSubset>> prepared(parts.size());
  std::vector<Diagnostics> prep_notes(parts.size());
  parallel_for(parts.size(), jobs, [&](std::size_t s) {
    prepared[s] = detail::prepare_subset(config, data, s, parts[s], prep_notes[s]);
  });

  std::vector<std::optional<SubsetCurve>> slots(parts.size() * families);
  std::vector<Diagnostics> notes(slots.size());
  parallel_for(slots.size(), jobs, [&](std::size_t item) {
    const std::size_t s = item / families;
    const std::size_t f = item % families;
    if (!prepared[s]) return;
    const auto& p = *prepared[s];
    const auto& spec = config.learners[f];
    try {
      SubsetCurve sc;
      sc.subset_id = s;
      sc.effect_size = p.effect_size;
      sc.curve = compute_learning_curve(spec, p.x, p.y, p.split, config.fractions,
                                        derive_seed(config.seed, "exp2", s, static_cast<int>(f)), &notes[item]);
      sc.curve.subset_id = s;
      slots[item] = std::move(sc);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::insufficient_curve && e.code() != ErrorCode::degenerate_label) throw;
      notes[item].push_back("subset " + std::to_string(s) + " " + std::string(to_string(spec.family())) +
                            " curve skipped: " + e.what());
    }
  });

  std::vector<SubsetCurve> curves;
  for (std::size_t s = 0; s < parts.size(); ++s) {
    diagnostics.insert(diagnostics.end(), prep_notes[s].begin(), prep_notes[s].end());
    for (std::size_t f = 0; f < families; ++f) {
      const std::size_t item = s * families + f;
      for (auto& n : notes[item]) diagnostics.push_back("subset " + std::to_string(s) + ": " + n);
      if (slots[item]) curves.push_back(std::move(*slots[item]));
    }
  }
  return curves;
}

inline CurveExperimentResult run_curve_experiment(const ExperimentConfig& config, const Dataset& data,
                                                  std::size_t jobs = 1) {
  CurveExperimentResult r;
  r.curves = subset_curves(config, data, jobs, r.diagnostics);
  r.series = curve_records(r.curves, detail::resolve(config.granularity, Granularity::per_model));
  r.log_summary = summarize_series(r.series.log_slope);
  r.gap_summary = summarize_series(r.series.gap_slope);
  return r;
}

}  // namespace suffstat
