#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "suffstat/learners/common.hpp"

namespace suffstat {

struct LogisticParams {
  double learning_rate = 0.1;
  int max_iterations = 1000;
  double tolerance = 1e-6;  // stop once the loss moves less than this

  friend bool operator==(const LogisticParams&, const LogisticParams&) = default;
};

struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;

  double logit(std::span<const double> row) const {
    double z = bias;
    for (std::size_t j = 0; j < weights.size(); ++j) z += weights[j] * row[j];
    return z;
  }

  friend bool operator==(const LogisticModel&, const LogisticModel&) = default;
};

struct LogisticTrace {
  std::vector<double> losses;  // loss before the first step, then after each accepted step
  int iterations = 0;
  bool converged = false;
};

inline double logistic_loss(const LogisticModel& m, const Matrix& x, std::span<const int> y) {
  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) loss += detail::logit_loss(m.logit(x.row(i)), y[i]);
  return loss / static_cast<double>(x.rows());
}

// Full-batch gradient descent on mean cross-entropy from zero weights. A step
// that would raise the loss is retried at half the rate, so the recorded loss
// sequence never increases.
inline LogisticModel train_logistic(const Matrix& x, std::span<const int> y,
                                    const LogisticParams& params, LogisticTrace* trace = nullptr) {
  detail::check_training_data(x, y);
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  LogisticModel model{std::vector<double>(p, 0.0), 0.0};
  LogisticTrace local;
  LogisticTrace& t = trace ? *trace : local;
  t = {};

  double loss = logistic_loss(model, x, y);
  t.losses.push_back(loss);
  std::vector<double> grad(p);
  for (int iter = 0; iter < params.max_iterations; ++iter) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = x.row(i);
      const double r = detail::sigmoid(model.logit(row)) - y[i];
      for (std::size_t j = 0; j < p; ++j) grad[j] += r * row[j];
      grad_b += r;
    }
    for (double& g : grad) g /= static_cast<double>(n);
    grad_b /= static_cast<double>(n);

    double rate = params.learning_rate;
    LogisticModel next = model;
    double next_loss = loss;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving) {
      for (std::size_t j = 0; j < p; ++j) next.weights[j] = model.weights[j] - rate * grad[j];
      next.bias = model.bias - rate * grad_b;
      next_loss = logistic_loss(next, x, y);
      if (next_loss <= loss) {
        accepted = true;
        break;
      }
      rate *= 0.5;
    }
    t.iterations = iter + 1;
    if (!accepted) {
      t.converged = true;
      break;
    }
    const double change = loss - next_loss;
    model = std::move(next);
    loss = next_loss;
    t.losses.push_back(loss);
    if (change < params.tolerance) {
      t.converged = true;
      break;
    }
  }
  return model;
}

}  // namespace suffstat
