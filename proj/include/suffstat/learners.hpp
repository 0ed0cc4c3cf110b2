#pragma once

// The four classifier families behind one train / predict / evaluate contract.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "suffstat/error.hpp"
#include "suffstat/learners/forest.hpp"
#include "suffstat/learners/logistic.hpp"
#include "suffstat/learners/mlp.hpp"
#include "suffstat/learners/tree.hpp"
#include "suffstat/matrix.hpp"

namespace suffstat {

enum class Family { logistic = 0, tree = 1, forest = 2, mlp = 3 };

inline constexpr std::array<Family, 4> kAllFamilies{Family::logistic, Family::tree, Family::forest,
                                                    Family::mlp};

inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::logistic: return "logistic";
    case Family::tree: return "tree";
    case Family::forest: return "forest";
    case Family::mlp: return "mlp";
  }
  return "?";
}

inline Family parse_family(std::string_view name) {
  for (Family f : kAllFamilies) {
    if (to_string(f) == name) return f;
  }
  throw Error(ErrorCode::validation, "unknown learner family '" + std::string(name) + "'");
}

using Hyperparameters = std::variant<LogisticParams, TreeParams, ForestParams, MlpParams>;

struct LearnerSpec {
  Hyperparameters params;
  std::string seed_label;

  Family family() const { return static_cast<Family>(params.index()); }

  static LearnerSpec defaults(Family f) {
    switch (f) {
      case Family::logistic: return {LogisticParams{}, "logistic"};
      case Family::tree: return {TreeParams{}, "tree"};
      case Family::forest: return {ForestParams{}, "forest"};
      case Family::mlp: return {MlpParams{}, "mlp"};
    }
    throw Error(ErrorCode::validation, "unknown family");
  }

  void validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::validation, what); };
    auto check_tree = [&](const TreeParams& t, std::string_view who) {
      if (t.max_depth && *t.max_depth < 1) fail(std::string(who) + ": max_depth must be >= 1 or unlimited");
      if (t.min_samples_split < 2) fail(std::string(who) + ": min_samples_split must be >= 2");
    };
    std::visit(
        [&](const auto& p) {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, LogisticParams>) {
            if (!(p.learning_rate > 0)) fail("logistic: learning_rate must be > 0");
            if (p.max_iterations < 1) fail("logistic: max_iterations must be >= 1");
            if (!(p.tolerance >= 0)) fail("logistic: tolerance must be >= 0");
          } else if constexpr (std::is_same_v<P, TreeParams>) {
            check_tree(p, "tree");
          } else if constexpr (std::is_same_v<P, ForestParams>) {
            if (p.n_trees < 1) fail("forest: n_trees must be >= 1");
            if (p.max_features < 0) fail("forest: max_features must be >= 0");
            check_tree(p.tree, "forest");
          } else {
            if (p.hidden < 1) fail("mlp: hidden must be >= 1");
            if (p.epochs < 1) fail("mlp: epochs must be >= 1");
            if (p.batch_size < 1) fail("mlp: batch_size must be >= 1");
            if (!(p.learning_rate > 0)) fail("mlp: learning_rate must be > 0");
          }
        },
        params);
  }
};

struct TrainedModel {
  std::variant<LogisticModel, TreeModel, ForestModel, MlpModel> params;
  std::size_t width = 0;
  int iterations = 0;
  bool converged = false;

  Family family() const { return static_cast<Family>(params.index()); }

  int predict_row(std::span<const double> row) const {
    return std::visit(
        [&](const auto& m) -> int {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, LogisticModel>) {
            return m.logit(row) >= 0.0 ? 1 : 0;  // p >= 0.5
          } else if constexpr (std::is_same_v<M, MlpModel>) {
            return m.logit(row) >= 0.0 ? 1 : 0;
          } else {
            return m.predict(row);
          }
        },
        params);
  }
};

inline TrainedModel train(const LearnerSpec& spec, const Matrix& x, std::span<const int> y,
                          std::uint64_t seed) {
  spec.validate();
  TrainedModel out;
  out.width = x.cols();
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, LogisticParams>) {
          LogisticTrace trace;
          out.params = train_logistic(x, y, p, &trace);
          out.iterations = trace.iterations;
          out.converged = trace.converged;
        } else if constexpr (std::is_same_v<P, TreeParams>) {
          out.params = train_tree(x, y, p);
          out.iterations = 1;
          out.converged = true;
        } else if constexpr (std::is_same_v<P, ForestParams>) {
          out.params = train_forest(x, y, p, seed);
          out.iterations = p.n_trees;
          out.converged = true;
        } else {
          out.params = train_mlp(x, y, p, seed);
          out.iterations = p.epochs;
          out.converged = true;
        }
      },
      spec.params);
  return out;
}

inline Labels predict(const TrainedModel& model, const Matrix& x) {
  if (x.cols() != model.width) {
    throw Error(ErrorCode::shape, "model expects " + std::to_string(model.width) +
                                      " columns, got " + std::to_string(x.cols()));
  }
  Labels out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = model.predict_row(x.row(i));
  return out;
}

struct EvalResult {
  double accuracy = 0.0;
  double error = 1.0;
  std::size_t n = 0;
};

inline EvalResult score_predictions(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) throw Error(ErrorCode::shape, "prediction and label counts differ");
  if (truth.empty()) throw Error(ErrorCode::empty_evaluation, "nothing to evaluate");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += predicted[i] == truth[i] ? 1 : 0;
  EvalResult r;
  r.n = truth.size();
  r.accuracy = static_cast<double>(correct) / static_cast<double>(r.n);
  r.error = 1.0 - r.accuracy;
  return r;
}

inline EvalResult evaluate(const TrainedModel& model, const Matrix& x, std::span<const int> y) {
  if (x.rows() != y.size()) throw Error(ErrorCode::shape, "X and y differ in length");
  if (y.empty()) throw Error(ErrorCode::empty_evaluation, "nothing to evaluate");
  const auto predicted = predict(model, x);
  return score_predictions(predicted, y);
}

// Versioned JSON form of a fitted model. Doubles are written in shortest
// round-trip form, so equal models serialize to equal bytes.
inline constexpr int kModelFormatVersion = 1;

inline nlohmann::ordered_json to_json(const TrainedModel& model) {
  using J = nlohmann::ordered_json;
  J j;
  j["format"] = "suffstat-model";
  j["version"] = kModelFormatVersion;
  j["family"] = std::string(to_string(model.family()));
  j["width"] = model.width;
  j["iterations"] = model.iterations;
  j["converged"] = model.converged;
  auto tree_json = [](const TreeModel& t) {
    J nodes = J::array();
    for (const auto& n : t.nodes) nodes.push_back(J::array({n.feature, n.threshold, n.left, n.right, n.label}));
    return nodes;
  };
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, LogisticModel>) {
          j["params"] = {{"weights", m.weights}, {"bias", m.bias}};
        } else if constexpr (std::is_same_v<M, TreeModel>) {
          j["params"] = {{"nodes", tree_json(m)}};
        } else if constexpr (std::is_same_v<M, ForestModel>) {
          J trees = J::array();
          for (const auto& t : m.trees) trees.push_back(tree_json(t));
          j["params"] = {{"trees", trees}};
        } else {
          j["params"] = {{"inputs", m.inputs}, {"hidden", m.hidden}, {"w1", m.w1},
                         {"b1", m.b1},         {"w2", m.w2},         {"b2", m.b2}};
        }
      },
      model.params);
  return j;
}

inline std::string serialize(const TrainedModel& model) { return to_json(model).dump(); }

inline TrainedModel model_from_json(const nlohmann::ordered_json& j) {
  if (j.value("format", "") != "suffstat-model" || j.value("version", 0) != kModelFormatVersion) {
    throw Error(ErrorCode::parse, "not a version " + std::to_string(kModelFormatVersion) + " model");
  }
  TrainedModel model;
  model.width = j.at("width").get<std::size_t>();
  model.iterations = j.at("iterations").get<int>();
  model.converged = j.at("converged").get<bool>();
  const auto& p = j.at("params");
  auto read_tree = [](const nlohmann::ordered_json& nodes) {
    TreeModel t;
    for (const auto& n : nodes) {
      t.nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(),
                         n.at(3).get<int>(), n.at(4).get<int>()});
    }
    return t;
  };
  switch (parse_family(j.at("family").get<std::string>())) {
    case Family::logistic:
      model.params = LogisticModel{p.at("weights").get<std::vector<double>>(), p.at("bias").get<double>()};
      break;
    case Family::tree:
      model.params = read_tree(p.at("nodes"));
      break;
    case Family::forest: {
      ForestModel f;
      for (const auto& t : p.at("trees")) f.trees.push_back(read_tree(t));
      model.params = std::move(f);
      break;
    }
    case Family::mlp: {
      MlpModel m;
      m.inputs = p.at("inputs").get<std::size_t>();
      m.hidden = p.at("hidden").get<std::size_t>();
      m.w1 = p.at("w1").get<std::vector<double>>();
      m.b1 = p.at("b1").get<std::vector<double>>();
      m.w2 = p.at("w2").get<std::vector<double>>();
      m.b2 = p.at("b2").get<double>();
      model.params = std::move(m);
      break;
    }
  }
  return model;
}

inline TrainedModel deserialize(std::string_view text) {
  try {
    return model_from_json(nlohmann::ordered_json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, std::string("malformed model: ") + e.what());
  }
}

}  // namespace suffstat
