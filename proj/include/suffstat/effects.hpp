#pragma once

// Effect-size statistics: Cohen's d with the pooled (n-1 weighted) standard
// deviation, odds and odds ratios, and the dataset-level average effect size.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "suffstat/error.hpp"
#include "suffstat/ingest.hpp"

namespace suffstat {

struct GroupStats {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation
  std::size_t n = 0;

  static GroupStats of(std::span<const double> values) {
    GroupStats g;
    g.n = values.size();
    if (g.n == 0) return g;
    for (double v : values) g.mean += v;
    g.mean /= static_cast<double>(g.n);
    const bool constant = std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); });
    if (g.n >= 2 && !constant) {
      double ss = 0.0;
      for (double v : values) ss += (v - g.mean) * (v - g.mean);
      g.sd = std::sqrt(ss / static_cast<double>(g.n - 1));
    }
    return g;
  }
};

inline double pooled_sd(const GroupStats& g1, const GroupStats& g2) {
  if (g1.n + g2.n <= 2) {
    throw Error(ErrorCode::undefined, "pooled sd needs more than two observations in total");
  }
  const double n1 = static_cast<double>(g1.n);
  const double n2 = static_cast<double>(g2.n);
  const double num = (n1 - 1.0) * g1.sd * g1.sd + (n2 - 1.0) * g2.sd * g2.sd;
  return std::sqrt(num / (n1 + n2 - 2.0));
}

// Standardized mean difference. Zero pooled sd yields 0 for equal means and a
// signed infinity otherwise; callers decide how to clamp.
inline double cohens_d(std::span<const double> group1, std::span<const double> group2) {
  if (group1.size() < 2 || group2.size() < 2) {
    throw Error(ErrorCode::insufficient_group, "each group needs at least two values (got " +
                                                   std::to_string(group1.size()) + " and " +
                                                   std::to_string(group2.size()) + ")");
  }
  const auto g1 = GroupStats::of(group1);
  const auto g2 = GroupStats::of(group2);
  const double sd = pooled_sd(g1, g2);
  const double diff = g1.mean - g2.mean;
  if (sd == 0.0) {
    if (diff == 0.0) return 0.0;
    return diff > 0 ? std::numeric_limits<double>::infinity()
                    : -std::numeric_limits<double>::infinity();
  }
  return diff / sd;
}

inline double odds(double p) {
  if (p == 1.0) throw Error(ErrorCode::infinite_odds, "probability 1 has infinite odds");
  if (!(p >= 0.0 && p < 1.0)) throw Error(ErrorCode::domain, "probability must lie in [0, 1)");
  return p / (1.0 - p);
}

// 2x2 counts. Rows are label groups (row 0 = group 1), columns are category
// present / absent.
struct ContingencyTable {
  std::array<std::array<double, 2>, 2> cells{};
  bool correction_applied = false;

  bool has_zero() const {
    for (const auto& r : cells) {
      for (double c : r) {
        if (c == 0.0) return true;
      }
    }
    return false;
  }

  // Haldane-Anscombe: +0.5 to every cell when any cell is zero.
  ContingencyTable corrected() const {
    ContingencyTable out = *this;
    if (has_zero()) {
      for (auto& r : out.cells) {
        for (double& c : r) c += 0.5;
      }
      out.correction_applied = true;
    }
    return out;
  }
};

inline double odds_ratio(const ContingencyTable& table) {
  for (const auto& r : table.cells) {
    for (double c : r) {
      if (!(c >= 0.0) || !std::isfinite(c)) {
        throw Error(ErrorCode::domain, "contingency counts must be finite and non-negative");
      }
    }
  }
  const auto t = table.corrected();
  const auto& [a, b] = t.cells[0];
  const auto& [c, d] = t.cells[1];
  return (a * d) / (b * c);
}

// Factor mapping ln(OR) onto the Cohen's d scale (logistic distribution sd).
inline constexpr double kLogOddsToD = 1.7320508075688772 / std::numbers::pi;

inline bool has_both_classes(std::span<const int> labels) {
  bool zero = false, one = false;
  for (int y : labels) (y ? one : zero) = true;
  return zero && one;
}

struct CategoricalEffect {
  double mean_abs_log_or = 0.0;
  double magnitude = 0.0;  // d-scale
  std::size_t levels = 0;
  bool corrected = false;  // some level's table needed the zero-cell correction
};

// One-vs-rest 2x2 table per level present, |ln OR| averaged over levels and
// converted to the d scale.
inline CategoricalEffect categorical_effect(std::span<const int> codes, std::span<const int> labels) {
  if (codes.size() != labels.size()) throw Error(ErrorCode::shape, "codes and labels differ in length");
  if (!has_both_classes(labels)) {
    throw Error(ErrorCode::degenerate_label, "labels hold a single class");
  }
  const std::set<int> levels(codes.begin(), codes.end());
  CategoricalEffect out;
  out.levels = levels.size();
  if (levels.size() < 2) return out;
  double sum = 0.0;
  for (int level : levels) {
    ContingencyTable t;
    for (std::size_t i = 0; i < codes.size(); ++i) {
      const std::size_t row = labels[i] ? 0 : 1;
      const std::size_t col = codes[i] == level ? 0 : 1;
      t.cells[row][col] += 1.0;
    }
    out.corrected = out.corrected || t.has_zero();
    sum += std::abs(std::log(odds_ratio(t)));
  }
  out.mean_abs_log_or = sum / static_cast<double>(levels.size());
  out.magnitude = kLogOddsToD * out.mean_abs_log_or;
  return out;
}

inline double categorical_effect_magnitude(std::span<const int> codes, std::span<const int> labels) {
  return categorical_effect(codes, labels).magnitude;
}

struct FeatureEffect {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  double raw = 0.0;        // signed d for numeric, mean |ln OR| for categorical
  double magnitude = 0.0;  // non-negative, d scale
  bool clamped = false;
  bool corrected = false;
};

struct ExcludedFeature {
  std::string name;
  std::string reason;
};

struct EffectReport {
  std::vector<FeatureEffect> per_feature;
  std::vector<ExcludedFeature> excluded;
  double average = 0.0;
  std::string label_name;
};

struct EffectOptions {
  double magnitude_cap = 10.0;  // applied to infinite d
};

// Per-feature magnitudes and their arithmetic mean. Numeric features use |d|
// (class 1 vs class 0); categorical features use the d-scaled log odds ratio.
// A categorical column with a single level in the data has no contrast and is
// excluded.
inline EffectReport average_effect_size(const Matrix& x, std::span<const Column> columns,
                                        std::span<const int> labels, std::string label_name = {},
                                        const EffectOptions& options = {}) {
  if (x.cols() == 0) throw Error(ErrorCode::validation, "no feature columns");
  if (x.cols() != columns.size()) throw Error(ErrorCode::shape, "column metadata does not match matrix");
  if (x.rows() != labels.size()) throw Error(ErrorCode::shape, "labels do not match matrix rows");
  if (!has_both_classes(labels)) throw Error(ErrorCode::degenerate_label, "labels hold a single class");

  EffectReport report;
  report.label_name = std::move(label_name);
  std::vector<double> pos, neg;
  std::vector<int> codes(x.rows());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    FeatureEffect fe{columns[j].name, columns[j].kind};
    if (columns[j].kind == ColumnKind::numeric) {
      pos.clear();
      neg.clear();
      for (std::size_t i = 0; i < x.rows(); ++i) (labels[i] ? pos : neg).push_back(x(i, j));
      fe.raw = cohens_d(pos, neg);
      fe.magnitude = std::abs(fe.raw);
      if (!std::isfinite(fe.magnitude)) {
        fe.magnitude = options.magnitude_cap;
        fe.clamped = true;
      }
    } else {
      for (std::size_t i = 0; i < x.rows(); ++i) codes[i] = static_cast<int>(x(i, j));
      const auto ce = categorical_effect(codes, labels);
      if (ce.levels < 2) {
        report.excluded.push_back({columns[j].name, "single level"});
        continue;
      }
      fe.raw = ce.mean_abs_log_or;
      fe.magnitude = ce.magnitude;
      fe.corrected = ce.corrected;
    }
    report.per_feature.push_back(std::move(fe));
  }
  if (report.per_feature.empty()) {
    throw Error(ErrorCode::validation, "every feature was excluded from the effect average");
  }
  double sum = 0.0;
  for (const auto& fe : report.per_feature) sum += fe.magnitude;
  report.average = sum / static_cast<double>(report.per_feature.size());
  return report;
}

inline EffectReport average_effect_size(const Dataset& ds, const EffectOptions& options = {}) {
  return average_effect_size(ds.features, ds.columns, ds.labels, ds.label_name, options);
}

}  // namespace suffstat
