#pragma once

// Synthetic binary-classification data with controlled per-feature effect
// sizes. Numeric features are unit-variance Gaussians shifted by the target d
// for class 1; categorical features are binary with presence probability 0.5
// in class 0 and OR/(1+OR) in class 1, so the population odds ratio is the
// target.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "suffstat/error.hpp"
#include "suffstat/format.hpp"
#include "suffstat/ingest.hpp"
#include "suffstat/random.hpp"

namespace suffstat {

struct SynthFeature {
  ColumnKind kind = ColumnKind::numeric;
  double target = 0.0;  // Cohen's d for numeric, odds ratio for categorical
};

struct SynthSpec {
  std::size_t n_rows = 1000;
  double balance = 0.5;  // fraction of label-1 rows
  std::vector<SynthFeature> features;
  std::uint64_t seed = 0;

  void validate() const {
    if (n_rows < 2) throw Error(ErrorCode::validation, "n_rows: must be at least 2");
    if (!(balance > 0.0 && balance < 1.0)) throw Error(ErrorCode::validation, "balance: must lie in (0, 1)");
    if (features.empty()) throw Error(ErrorCode::validation, "features: at least one feature is required");
    for (std::size_t j = 0; j < features.size(); ++j) {
      const auto& f = features[j];
      const std::string where = "feature " + std::to_string(j) + ": ";
      if (!std::isfinite(f.target)) throw Error(ErrorCode::validation, where + "target must be finite");
      if (f.kind == ColumnKind::categorical && !(f.target > 0.0)) {
        throw Error(ErrorCode::validation, where + "odds-ratio target must be > 0");
      }
    }
  }
};

struct SynthColumn {
  std::vector<double> values;
  Labels labels;
};

// n1 label-1 rows followed by n0 label-0 rows.
inline SynthColumn synth_numeric_feature(double d_target, std::size_t n1, std::size_t n0,
                                         std::uint64_t seed) {
  Rng rng(seed);
  SynthColumn out;
  out.values.reserve(n1 + n0);
  for (std::size_t i = 0; i < n1; ++i) out.values.push_back(rng.normal(d_target, 1.0));
  for (std::size_t i = 0; i < n0; ++i) out.values.push_back(rng.normal(0.0, 1.0));
  out.labels.assign(n1, 1);
  out.labels.resize(n1 + n0, 0);
  return out;
}

inline double presence_probability(double or_target) { return or_target / (1.0 + or_target); }

// Codes are 1 (present) / 0 (absent); n1 label-1 rows followed by n0 label-0 rows.
inline SynthColumn synth_categorical_feature(double or_target, std::size_t n1, std::size_t n0,
                                             std::uint64_t seed) {
  if (!(or_target > 0.0)) throw Error(ErrorCode::validation, "odds-ratio target must be > 0");
  Rng rng(seed);
  const double p1 = presence_probability(or_target);
  SynthColumn out;
  out.values.reserve(n1 + n0);
  for (std::size_t i = 0; i < n1; ++i) out.values.push_back(rng.bernoulli(p1) ? 1.0 : 0.0);
  for (std::size_t i = 0; i < n0; ++i) out.values.push_back(rng.bernoulli(0.5) ? 1.0 : 0.0);
  out.labels.assign(n1, 1);
  out.labels.resize(n1 + n0, 0);
  return out;
}

// Exactly round(balance * n_rows) positives in seeded random positions; each
// feature drawn independently given the label.
inline Dataset synth_dataset(const SynthSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n_rows;
  std::size_t n1 = static_cast<std::size_t>(std::llround(spec.balance * static_cast<double>(n)));
  n1 = std::clamp<std::size_t>(n1, 1, n - 1);

  Dataset ds;
  ds.label_name = "label";
  ds.positive_token = "1";
  ds.labels.assign(n1, 1);
  ds.labels.resize(n, 0);
  Rng(derive_seed(spec.seed, "labels")).shuffle(ds.labels);

  ds.features = Matrix(n, spec.features.size());
  for (std::size_t j = 0; j < spec.features.size(); ++j) {
    const auto& f = spec.features[j];
    ds.columns.push_back({"x" + std::to_string(j), f.kind});
    Rng rng(derive_seed(spec.seed, "feature", j));
    const double p1 = f.kind == ColumnKind::categorical ? presence_probability(f.target) : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool positive = ds.labels[i] == 1;
      if (f.kind == ColumnKind::numeric) {
        ds.features(i, j) = rng.normal(positive ? f.target : 0.0, 1.0);
      } else {
        ds.features(i, j) = rng.bernoulli(positive ? p1 : 0.5) ? 1.0 : 0.0;
      }
    }
  }
  return ds;
}

// Linearly separable data: class 1 has x0 >= margin/2, class 0 has
// x0 <= -margin/2; any extra columns are pure noise.
inline Dataset synth_separable(std::size_t n, double margin, std::uint64_t seed, std::size_t width = 1) {
  Rng rng(seed);
  Dataset ds;
  ds.label_name = "label";
  ds.positive_token = "1";
  ds.features = Matrix(n, width);
  for (std::size_t j = 0; j < width; ++j) ds.columns.push_back({"x" + std::to_string(j), ColumnKind::numeric});
  ds.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = i % 2 == 0 ? 1 : 0;
    ds.labels[i] = y;
    const double offset = margin / 2.0 + std::abs(rng.normal());
    ds.features(i, 0) = y ? offset : -offset;
    for (std::size_t j = 1; j < width; ++j) ds.features(i, j) = rng.normal();
  }
  return ds;
}

// CSV with a header row; categorical cells become `level<code>` tokens and the
// label column is written as 1 / 0.
inline std::string to_csv(const Dataset& ds) {
  std::string out;
  for (const auto& c : ds.columns) out += c.name + ",";
  out += ds.label_name + "\n";
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    for (std::size_t j = 0; j < ds.width(); ++j) {
      if (ds.columns[j].kind == ColumnKind::numeric) {
        out += format_double(ds.features(i, j), 17);
      } else {
        out += "level" + std::to_string(static_cast<long long>(ds.features(i, j)));
      }
      out += ",";
    }
    out += ds.labels[i] ? "1\n" : "0\n";
  }
  return out;
}

inline std::string schema_sidecar(const Dataset& ds) {
  std::string out;
  for (const auto& c : ds.columns) out += c.name + "=" + std::string(to_string(c.kind)) + "\n";
  out += ds.label_name + "=categorical\n";
  return out;
}

// Spec file: `n_rows=`, `balance=`, `seed=`, and one `feature=numeric:<d>` or
// `feature=categorical:<OR>` line per column, in order.
inline SynthSpec parse_synth_spec(std::string_view text) {
  SynthSpec spec;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto number = [&](std::string_view v, const std::string& field) {
    try {
      std::size_t used = 0;
      const std::string s(v);
      const double d = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return d;
    } catch (const std::exception&) {
      throw Error(ErrorCode::validation, field + ": '" + std::string(v) + "' is not a number");
    }
  };
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::validation, "line " + std::to_string(line_no) + ": expected key=value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "n_rows") {
      const double v = number(value, "n_rows");
      if (v < 0 || v != std::floor(v)) throw Error(ErrorCode::validation, "n_rows: must be a whole number");
      spec.n_rows = static_cast<std::size_t>(v);
    } else if (key == "balance") {
      spec.balance = number(value, "balance");
    } else if (key == "seed") {
      try {
        std::size_t used = 0;
        spec.seed = std::stoull(std::string(value), &used);
        if (used != value.size()) throw std::invalid_argument("seed");
      } catch (const std::exception&) {
        throw Error(ErrorCode::validation, "seed: '" + std::string(value) + "' is not an unsigned integer");
      }
    } else if (key == "feature") {
      const auto colon = value.find(':');
      if (colon == std::string_view::npos) {
        throw Error(ErrorCode::validation, "feature: expected kind:target, got '" + std::string(value) + "'");
      }
      SynthFeature f;
      try {
        f.kind = parse_column_kind(trim(value.substr(0, colon)));
      } catch (const Error& e) {
        throw Error(ErrorCode::validation, std::string("feature: ") + e.what());
      }
      f.target = number(trim(value.substr(colon + 1)), "feature target");
      spec.features.push_back(f);
    } else {
      throw Error(ErrorCode::validation, "unknown key '" + std::string(key) + "'");
    }
  }
  spec.validate();
  return spec;
}

}  // namespace suffstat
