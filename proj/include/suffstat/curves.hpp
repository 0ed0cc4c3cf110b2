#pragma once

// Learning curves over nested training prefixes and the two slope statistics
// extracted from them.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "suffstat/error.hpp"
#include "suffstat/ingest.hpp"
#include "suffstat/learners.hpp"
#include "suffstat/regression.hpp"

namespace suffstat {

struct CurvePoint {
  std::size_t n_train = 0;
  double train_error = 0.0;
  double valid_error = 0.0;
};

struct LearningCurve {
  std::vector<CurvePoint> points;
  Family family = Family::logistic;
  std::size_t subset_id = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> training_order;  // point k trains on the first points[k].n_train rows
  std::vector<std::size_t> valid_indices;

  // Checks the shape every fit relies on: >= 3 points, strictly increasing sizes.
  void validate() const {
    if (points.size() < 3) {
      throw Error(ErrorCode::insufficient_curve,
                  "a curve needs at least 3 points, has " + std::to_string(points.size()));
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (points[i].n_train < 2) throw Error(ErrorCode::validation, "curve point with fewer than 2 rows");
      if (i > 0 && points[i].n_train <= points[i - 1].n_train) {
        throw Error(ErrorCode::validation, "curve sizes must be strictly increasing");
      }
    }
  }
};

inline std::vector<double> default_fraction_grid() {
  std::vector<double> out;
  for (int i = 1; i <= 10; ++i) out.push_back(i / 10.0);
  return out;
}

// Each class shuffled, then interleaved by proportional position so that every
// prefix holds close to the class ratio of the whole.
inline std::vector<std::size_t> stratified_order(std::span<const std::size_t> indices,
                                                 std::span<const int> labels, std::uint64_t seed) {
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < indices.size(); ++i) by_class[labels[i] ? 1 : 0].push_back(indices[i]);
  Rng rng(seed);
  rng.shuffle(by_class[1]);
  rng.shuffle(by_class[0]);
  struct Keyed {
    double key;
    int cls;
    std::size_t index;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(indices.size());
  for (int c : {1, 0}) {
    const double n = static_cast<double>(by_class[c].size());
    for (std::size_t j = 0; j < by_class[c].size(); ++j) {
      keyed.push_back({(static_cast<double>(j) + 0.5) / n, c, by_class[c][j]});
    }
  }
  std::stable_sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    if (a.key != b.key) return a.key < b.key;
    return a.cls > b.cls;
  });
  std::vector<std::size_t> out;
  out.reserve(keyed.size());
  for (const auto& k : keyed) out.push_back(k.index);
  return out;
}

// Training sizes ceil(f * n_train) for a strictly increasing grid in (0, 1].
inline std::vector<std::size_t> curve_sizes(std::span<const double> fractions, std::size_t n_train) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    const double f = fractions[i];
    if (!(f > 0.0 && f <= 1.0)) throw Error(ErrorCode::validation, "curve fractions must lie in (0, 1]");
    if (i > 0 && !(f > fractions[i - 1])) {
      throw Error(ErrorCode::validation, "curve fractions must be strictly increasing");
    }
    out.push_back(std::min(n_train, detail::ceil_count(f * static_cast<double>(n_train))));
  }
  return out;
}

// Rows of `x` indexed by `split` train the learner on nested prefixes of one
// seeded stratified ordering; each point reports error on its own slice and
// on the fixed validation side.
inline LearningCurve compute_learning_curve(const LearnerSpec& spec, const Matrix& x,
                                            std::span<const int> y, const SplitPair& split,
                                            std::span<const double> fractions, std::uint64_t seed,
                                            Diagnostics* diagnostics = nullptr) {
  if (x.rows() != y.size()) throw Error(ErrorCode::shape, "X and y differ in length");
  LearningCurve curve;
  curve.family = spec.family();
  curve.seed = seed;
  curve.valid_indices = split.valid_indices;
  const auto train_labels = select(std::span<const int>(y), split.train_indices);
  curve.training_order = stratified_order(split.train_indices, train_labels, derive_seed(seed, "order"));

  const Matrix x_valid = x.select_rows(split.valid_indices);
  const Labels y_valid = select(std::span<const int>(y), split.valid_indices);
  const auto sizes = curve_sizes(fractions, curve.training_order.size());

  std::size_t last = 0;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    const std::size_t n = sizes[k];
    auto note = [&](const std::string& why) {
      if (diagnostics) {
        diagnostics->push_back("curve " + std::string(to_string(spec.family())) + ": fraction " +
                               std::to_string(fractions[k]) + " skipped (" + why + ")");
      }
    };
    if (n < 2) {
      note("fewer than 2 training rows");
      continue;
    }
    if (n <= last) {
      note("training size does not grow");
      continue;
    }
    const std::span<const std::size_t> slice(curve.training_order.data(), n);
    const Labels y_slice = select(std::span<const int>(y), slice);
    if (!has_both_classes(y_slice)) {
      note("single label class in slice");
      continue;
    }
    const Matrix x_slice = x.select_rows(slice);
    const auto model = train(spec, x_slice, y_slice, derive_seed(seed, "point", k));
    curve.points.push_back(
        {n, evaluate(model, x_slice, y_slice).error, evaluate(model, x_valid, y_valid).error});
    last = n;
  }
  curve.validate();
  return curve;
}

struct LogFit {
  double a = 0.0;  // intercept
  double b = 0.0;  // coefficient of ln(n)
  double residual_sse = 0.0;
};

struct GapFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_sse = 0.0;
};

namespace detail {
inline LineFit fit_curve_line(std::span<const double> x, std::span<const double> y) {
  try {
    return ols_fit(x, y);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::zero_variance) {
      throw Error(ErrorCode::singular_design, "all curve points share one training size");
    }
    throw;
  }
}
}  // namespace detail

// valid_error ~ a + b * ln(n_train)
inline LogFit fit_log_model(const LearningCurve& curve) {
  if (curve.points.size() < 3) throw Error(ErrorCode::insufficient_curve, "log fit needs 3 points");
  std::vector<double> ln_n, err;
  for (const auto& p : curve.points) {
    ln_n.push_back(std::log(static_cast<double>(p.n_train)));
    err.push_back(p.valid_error);
  }
  const auto fit = detail::fit_curve_line(ln_n, err);
  return {fit.intercept, fit.slope, fit.residual_sse};
}

// (valid_error - train_error) ~ intercept + slope * n_train
inline GapFit fit_gap_slope(const LearningCurve& curve) {
  if (curve.points.size() < 3) throw Error(ErrorCode::insufficient_curve, "gap fit needs 3 points");
  std::vector<double> n, gap;
  for (const auto& p : curve.points) {
    n.push_back(static_cast<double>(p.n_train));
    gap.push_back(p.valid_error - p.train_error);
  }
  const auto fit = detail::fit_curve_line(n, gap);
  return {fit.slope, fit.intercept, fit.residual_sse};
}

}  // namespace suffstat
