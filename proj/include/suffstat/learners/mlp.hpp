#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "suffstat/learners/common.hpp"
#include "suffstat/random.hpp"

namespace suffstat {

struct MlpParams {
  int hidden = 32;
  int epochs = 200;
  int batch_size = 32;
  double learning_rate = 0.01;

  friend bool operator==(const MlpParams&, const MlpParams&) = default;
};

// One ReLU hidden layer feeding a single sigmoid output.
struct MlpModel {
  std::size_t inputs = 0;
  std::size_t hidden = 0;
  std::vector<double> w1;  // hidden x inputs, row-major
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // hidden
  double b2 = 0.0;

  // Output logit; fills `activations` with the hidden ReLU outputs when given.
  double logit(std::span<const double> row, std::vector<double>* activations = nullptr) const {
    double z = b2;
    if (activations) activations->resize(hidden);
    for (std::size_t h = 0; h < hidden; ++h) {
      double a = b1[h];
      const double* w = w1.data() + h * inputs;
      for (std::size_t j = 0; j < inputs; ++j) a += w[j] * row[j];
      a = a > 0.0 ? a : 0.0;
      if (activations) (*activations)[h] = a;
      z += w2[h] * a;
    }
    return z;
  }

  friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases.
inline MlpModel init_mlp(std::size_t inputs, std::size_t hidden, Rng& rng) {
  MlpModel m;
  m.inputs = inputs;
  m.hidden = hidden;
  const double s1 = 1.0 / std::sqrt(static_cast<double>(inputs));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  m.w1.resize(hidden * inputs);
  for (double& w : m.w1) w = rng.uniform(-s1, s1);
  m.b1.assign(hidden, 0.0);
  m.w2.resize(hidden);
  for (double& w : m.w2) w = rng.uniform(-s2, s2);
  return m;
}

struct MlpGradient {
  double loss = 0.0;  // mean cross-entropy over the batch
  MlpModel grad;      // same layout as the model
};

// Mean loss and its analytic gradient over `rows` by backpropagation.
inline MlpGradient mlp_loss_gradient(const MlpModel& m, const Matrix& x, std::span<const int> y,
                                     std::span<const std::size_t> rows) {
  MlpGradient out;
  out.grad.inputs = m.inputs;
  out.grad.hidden = m.hidden;
  out.grad.w1.assign(m.w1.size(), 0.0);
  out.grad.b1.assign(m.hidden, 0.0);
  out.grad.w2.assign(m.hidden, 0.0);
  std::vector<double> act;
  for (std::size_t r : rows) {
    const auto row = x.row(r);
    const double z = m.logit(row, &act);
    out.loss += detail::logit_loss(z, y[r]);
    const double dz = detail::sigmoid(z) - y[r];
    out.grad.b2 += dz;
    for (std::size_t h = 0; h < m.hidden; ++h) {
      out.grad.w2[h] += dz * act[h];
      if (act[h] <= 0.0) continue;
      const double da = dz * m.w2[h];
      out.grad.b1[h] += da;
      double* g = out.grad.w1.data() + h * m.inputs;
      for (std::size_t j = 0; j < m.inputs; ++j) g[j] += da * row[j];
    }
  }
  const double scale = 1.0 / static_cast<double>(rows.size());
  out.loss *= scale;
  for (double& g : out.grad.w1) g *= scale;
  for (double& g : out.grad.b1) g *= scale;
  for (double& g : out.grad.w2) g *= scale;
  out.grad.b2 *= scale;
  return out;
}

inline double mlp_loss(const MlpModel& m, const Matrix& x, std::span<const int> y,
                       std::span<const std::size_t> rows) {
  double loss = 0.0;
  for (std::size_t r : rows) loss += detail::logit_loss(m.logit(x.row(r)), y[r]);
  return loss / static_cast<double>(rows.size());
}

// Mini-batch gradient descent; the row order is reshuffled every epoch.
inline MlpModel train_mlp(const Matrix& x, std::span<const int> y, const MlpParams& params,
                          std::uint64_t seed) {
  detail::check_training_data(x, y);
  Rng rng(seed);
  MlpModel model = init_mlp(x.cols(), static_cast<std::size_t>(params.hidden), rng);
  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t batch = static_cast<std::size_t>(params.batch_size);
  const double lr = params.learning_rate;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t len = std::min(batch, order.size() - start);
      const auto g = mlp_loss_gradient(model, x, y, std::span(order).subspan(start, len));
      for (std::size_t i = 0; i < model.w1.size(); ++i) model.w1[i] -= lr * g.grad.w1[i];
      for (std::size_t h = 0; h < model.hidden; ++h) {
        model.b1[h] -= lr * g.grad.b1[h];
        model.w2[h] -= lr * g.grad.w2[h];
      }
      model.b2 -= lr * g.grad.b2;
    }
  }
  return model;
}

}  // namespace suffstat
