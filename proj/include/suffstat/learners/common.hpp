#pragma once

#include <cmath>
#include <span>
#include <string>

#include "suffstat/effects.hpp"
#include "suffstat/error.hpp"
#include "suffstat/matrix.hpp"

namespace suffstat::detail {

inline void check_training_data(const Matrix& x, std::span<const int> y) {
  if (x.rows() != y.size()) {
    throw Error(ErrorCode::shape, "X has " + std::to_string(x.rows()) + " rows but y has " +
                                      std::to_string(y.size()));
  }
  if (x.rows() < 2) throw Error(ErrorCode::validation, "training needs at least two rows");
  for (int v : y) {
    if (v != 0 && v != 1) throw Error(ErrorCode::validation, "labels must be 0 or 1");
  }
  if (!has_both_classes(y)) throw Error(ErrorCode::degenerate_label, "training labels hold a single class");
  for (double v : x.data()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::validation, "non-finite value in X");
  }
}

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Cross-entropy of label y against logit z, computed without overflow.
inline double logit_loss(double z, int y) {
  const double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  return softplus - (y ? z : 0.0);
}

}  // namespace suffstat::detail
