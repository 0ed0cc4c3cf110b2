#pragma once

// Flat `key=value` experiment configuration. The snapshot written by
// config_text() parses back to an identical configuration.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "suffstat/error.hpp"
#include "suffstat/experiments.hpp"
#include "suffstat/format.hpp"
#include "suffstat/ingest.hpp"

namespace suffstat {

using KeyValues = std::map<std::string, std::string, std::less<>>;

inline KeyValues parse_key_values(std::string_view text) {
  KeyValues out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::validation, "config line " + std::to_string(line_no) + ": expected key=value");
    }
    out[std::string(trim(line.substr(0, eq)))] = std::string(trim(line.substr(eq + 1)));
  }
  return out;
}

namespace detail {

inline double to_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::validation, key + ": '" + v + "' is not a number");
}

inline long long to_integer(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used == v.size()) return i;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::validation, key + ": '" + v + "' is not an integer");
}

inline std::uint64_t to_seed(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v.front() != '-') {
      const auto s = std::stoull(v, &used);
      if (used == v.size()) return s;
    }
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::validation, key + ": '" + v + "' is not an unsigned integer");
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error(ErrorCode::validation, key + ": '" + v + "' is not a boolean");
}

inline std::vector<std::string> split_list(std::string_view v) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    std::size_t comma = v.find(',', start);
    if (comma == std::string_view::npos) comma = v.size();
    const auto item = trim(v.substr(start, comma - start));
    if (!item.empty()) out.emplace_back(item);
    start = comma + 1;
  }
  return out;
}

inline std::optional<int> to_depth(const std::string& key, const std::string& v) {
  if (v == "none" || v == "unlimited") return std::nullopt;
  return static_cast<int>(to_integer(key, v));
}

template <typename P>
P* params_of(ExperimentConfig& config) {
  for (auto& l : config.learners) {
    if (auto* p = std::get_if<P>(&l.params)) return p;
  }
  return nullptr;
}

}  // namespace detail

// Applies `values` on top of `config`. Hyperparameter keys for a family that
// is not in the learner list are accepted and ignored.
inline ExperimentConfig apply_config(ExperimentConfig config, const KeyValues& values) {
  using namespace detail;
  if (auto it = values.find("learners"); it != values.end()) {
    std::vector<LearnerSpec> learners;
    for (const auto& name : split_list(it->second)) {
      const Family f = parse_family(name);
      for (const auto& l : learners) {
        if (l.family() == f) throw Error(ErrorCode::validation, "learners: '" + name + "' listed twice");
      }
      learners.push_back(LearnerSpec::defaults(f));
    }
    config.learners = std::move(learners);
  }
  auto* logistic = params_of<LogisticParams>(config);
  auto* tree = params_of<TreeParams>(config);
  auto* forest = params_of<ForestParams>(config);
  auto* mlp = params_of<MlpParams>(config);
  LogisticParams logistic_sink;
  TreeParams tree_sink;
  ForestParams forest_sink;
  MlpParams mlp_sink;
  if (!logistic) logistic = &logistic_sink;
  if (!tree) tree = &tree_sink;
  if (!forest) forest = &forest_sink;
  if (!mlp) mlp = &mlp_sink;

  for (const auto& [key, v] : values) {
    if (key == "learners") continue;
    if (key == "label") config.label = v;
    else if (key == "positive") config.positive = v;
    else if (key == "subsets") config.subsets = static_cast<std::size_t>(std::max(0LL, to_integer(key, v)));
    else if (key == "subset_size") config.subset_size = static_cast<std::size_t>(std::max(0LL, to_integer(key, v)));
    else if (key == "split_fraction") config.split_fraction = to_real(key, v);
    else if (key == "fractions") {
      config.fractions.clear();
      for (const auto& f : split_list(v)) config.fractions.push_back(to_real(key, f));
    }
    else if (key == "seed") config.seed = to_seed(key, v);
    else if (key == "granularity") config.granularity = parse_granularity(v);
    else if (key == "effect_cap") config.effects.magnitude_cap = to_real(key, v);
    else if (key == "logistic.learning_rate") logistic->learning_rate = to_real(key, v);
    else if (key == "logistic.max_iterations") logistic->max_iterations = static_cast<int>(to_integer(key, v));
    else if (key == "logistic.tolerance") logistic->tolerance = to_real(key, v);
    else if (key == "tree.max_depth") tree->max_depth = to_depth(key, v);
    else if (key == "tree.min_samples_split") tree->min_samples_split = static_cast<int>(to_integer(key, v));
    else if (key == "forest.n_trees") forest->n_trees = static_cast<int>(to_integer(key, v));
    else if (key == "forest.bootstrap") forest->bootstrap = to_bool(key, v);
    else if (key == "forest.max_features") forest->max_features = static_cast<int>(to_integer(key, v));
    else if (key == "forest.max_depth") forest->tree.max_depth = to_depth(key, v);
    else if (key == "forest.min_samples_split") forest->tree.min_samples_split = static_cast<int>(to_integer(key, v));
    else if (key == "mlp.hidden") mlp->hidden = static_cast<int>(to_integer(key, v));
    else if (key == "mlp.epochs") mlp->epochs = static_cast<int>(to_integer(key, v));
    else if (key == "mlp.batch_size") mlp->batch_size = static_cast<int>(to_integer(key, v));
    else if (key == "mlp.learning_rate") mlp->learning_rate = to_real(key, v);
    else throw Error(ErrorCode::validation, "unknown config key '" + key + "'");
  }
  config.validate();
  return config;
}

inline ExperimentConfig parse_experiment_config(std::string_view text, ExperimentConfig base = {}) {
  return apply_config(std::move(base), parse_key_values(text));
}

// Every setting in a fixed order, reals at 17 significant digits.
inline std::string config_text(const ExperimentConfig& c) {
  auto real = [](double v) { return format_double(v, 17); };
  auto depth = [](const std::optional<int>& d) { return d ? std::to_string(*d) : std::string("none"); };
  std::string out;
  auto line = [&](std::string_view k, const std::string& v) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  };
  line("label", c.label);
  line("positive", c.positive);
  line("subsets", std::to_string(c.subsets));
  line("subset_size", std::to_string(c.subset_size));
  line("split_fraction", real(c.split_fraction));
  std::string fr;
  for (std::size_t i = 0; i < c.fractions.size(); ++i) fr += (i ? "," : "") + real(c.fractions[i]);
  line("fractions", fr);
  line("seed", std::to_string(c.seed));
  line("granularity", std::string(to_string(c.granularity)));
  line("effect_cap", real(c.effects.magnitude_cap));
  std::string names;
  for (std::size_t i = 0; i < c.learners.size(); ++i) {
    names += (i ? "," : "") + std::string(to_string(c.learners[i].family()));
  }
  line("learners", names);
  for (const auto& l : c.learners) {
    std::visit(
        [&](const auto& p) {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, LogisticParams>) {
            line("logistic.learning_rate", real(p.learning_rate));
            line("logistic.max_iterations", std::to_string(p.max_iterations));
            line("logistic.tolerance", real(p.tolerance));
          } else if constexpr (std::is_same_v<P, TreeParams>) {
            line("tree.max_depth", depth(p.max_depth));
            line("tree.min_samples_split", std::to_string(p.min_samples_split));
          } else if constexpr (std::is_same_v<P, ForestParams>) {
            line("forest.n_trees", std::to_string(p.n_trees));
            line("forest.bootstrap", p.bootstrap ? "true" : "false");
            line("forest.max_features", std::to_string(p.max_features));
            line("forest.max_depth", depth(p.tree.max_depth));
            line("forest.min_samples_split", std::to_string(p.tree.min_samples_split));
          } else {
            line("mlp.hidden", std::to_string(p.hidden));
            line("mlp.epochs", std::to_string(p.epochs));
            line("mlp.batch_size", std::to_string(p.batch_size));
            line("mlp.learning_rate", real(p.learning_rate));
          }
        },
        l.params);
  }
  return out;
}

}  // namespace suffstat
