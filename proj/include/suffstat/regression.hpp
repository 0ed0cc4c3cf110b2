#pragma once

#include <cmath>
#include <span>
#include <string>

#include "suffstat/error.hpp"

namespace suffstat {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_sse = 0.0;
};

namespace detail {

struct Moments {
  double mean_x = 0.0, mean_y = 0.0;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
};

// Exact test; the centered sums of a constant series can keep rounding residue.
inline bool constant(std::span<const double> v) {
  for (double e : v) {
    if (e != v.front()) return false;
  }
  return true;
}

// Centered second moments; two passes for accuracy.
inline Moments moments(std::span<const double> x, std::span<const double> y) {
  Moments m;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    m.mean_x += x[i];
    m.mean_y += y[i];
  }
  m.mean_x /= n;
  m.mean_y /= n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - m.mean_x;
    const double dy = y[i] - m.mean_y;
    m.sxx += dx * dx;
    m.syy += dy * dy;
    m.sxy += dx * dy;
  }
  return m;
}

inline void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::shape, "x and y differ in length");
  if (x.size() < 2) throw Error(ErrorCode::insufficient_points, "need at least two points");
}

}  // namespace detail

// Least-squares line of y on x.
inline LineFit ols_fit(std::span<const double> x, std::span<const double> y) {
  detail::check_pair(x, y);
  const auto m = detail::moments(x, y);
  if (m.sxx == 0.0 || detail::constant(x)) throw Error(ErrorCode::zero_variance, "x has zero variance");
  LineFit fit;
  fit.slope = m.sxy / m.sxx;
  fit.intercept = m.mean_y - fit.slope * m.mean_x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    fit.residual_sse += r * r;
  }
  return fit;
}

struct Correlation {
  double pearson_r = 0.0;
  double r_squared = 0.0;
  bool zero_variance = false;
};

// Pearson r and its square; zero variance on either side gives 0 and a flag.
inline Correlation correlation(std::span<const double> x, std::span<const double> y) {
  detail::check_pair(x, y);
  const auto m = detail::moments(x, y);
  Correlation c;
  if (m.sxx == 0.0 || m.syy == 0.0 || detail::constant(x) || detail::constant(y)) {
    c.zero_variance = true;
    return c;
  }
  c.pearson_r = m.sxy / std::sqrt(m.sxx * m.syy);
  if (c.pearson_r > 1.0) c.pearson_r = 1.0;
  if (c.pearson_r < -1.0) c.pearson_r = -1.0;
  c.r_squared = c.pearson_r * c.pearson_r;
  return c;
}

inline double r_squared(std::span<const double> x, std::span<const double> y) {
  return correlation(x, y).r_squared;
}

struct CorrelationSummary {
  std::size_t n_points = 0;
  double slope = 0.0;
  double intercept = 0.0;
  double pearson_r = 0.0;
  double r_squared = 0.0;
  bool zero_variance = false;
};

// Trend line and R² of outcome against effect size. Fewer than three points is
// an error; degenerate variance is reported, not raised.
inline CorrelationSummary summarize(std::span<const double> effect, std::span<const double> outcome) {
  detail::check_pair(effect, outcome);
  if (effect.size() < 3) {
    throw Error(ErrorCode::insufficient_points,
                "a correlation summary needs at least 3 points, got " + std::to_string(effect.size()));
  }
  CorrelationSummary s;
  s.n_points = effect.size();
  const auto c = correlation(effect, outcome);
  s.pearson_r = c.pearson_r;
  s.r_squared = c.r_squared;
  s.zero_variance = c.zero_variance;
  const auto m = detail::moments(effect, outcome);
  if (m.sxx == 0.0 || detail::constant(effect)) {
    s.intercept = m.mean_y;
  } else {
    const auto fit = ols_fit(effect, outcome);
    s.slope = fit.slope;
    s.intercept = fit.intercept;
  }
  return s;
}

}  // namespace suffstat
