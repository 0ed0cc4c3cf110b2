#pragma once

// Loading, cleaning, encoding, standardizing and partitioning tabular data.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "suffstat/error.hpp"
#include "suffstat/matrix.hpp"
#include "suffstat/random.hpp"

namespace suffstat {

enum class ColumnKind { numeric, categorical };
enum class ColumnRole { feature, label };

inline std::string_view to_string(ColumnKind kind) {
  return kind == ColumnKind::numeric ? "numeric" : "categorical";
}

inline ColumnKind parse_column_kind(std::string_view text) {
  if (text == "numeric" || text == "numerical") return ColumnKind::numeric;
  if (text == "categorical") return ColumnKind::categorical;
  throw Error(ErrorCode::schema, "unknown column kind '" + std::string(text) + "'");
}

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  ColumnRole role = ColumnRole::feature;

  friend bool operator==(const Column&, const Column&) = default;
};

struct FeatureSchema {
  std::vector<Column> columns;

  std::optional<std::size_t> find(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i].name == name) return i;
    }
    return std::nullopt;
  }

  std::size_t index_of(std::string_view name) const {
    if (auto i = find(name)) return *i;
    throw Error(ErrorCode::schema, "no column named '" + std::string(name) + "'");
  }

  // Unique names; at most one label, and a label must be categorical.
  void validate() const {
    std::unordered_set<std::string> seen;
    std::size_t labels = 0;
    for (const auto& c : columns) {
      if (c.name.empty()) throw Error(ErrorCode::schema, "empty column name");
      if (!seen.insert(c.name).second) {
        throw Error(ErrorCode::schema, "duplicate column name '" + c.name + "'");
      }
      if (c.role == ColumnRole::label) {
        ++labels;
        if (c.kind != ColumnKind::categorical) {
          throw Error(ErrorCode::schema, "label column '" + c.name + "' must be categorical");
        }
      }
    }
    if (labels > 1) throw Error(ErrorCode::schema, "more than one label column");
  }

  // Copy with `name` as the single label column; every other column becomes a feature.
  FeatureSchema with_label(std::string_view name) const {
    FeatureSchema out = *this;
    const std::size_t idx = index_of(name);
    for (auto& c : out.columns) c.role = ColumnRole::feature;
    out.columns[idx].role = ColumnRole::label;
    out.validate();
    return out;
  }

  std::optional<std::size_t> label_index() const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i].role == ColumnRole::label) return i;
    }
    return std::nullopt;
  }
};

// The census income schema: 14 features plus the income label, header-less file.
inline FeatureSchema adult_schema() {
  using K = ColumnKind;
  FeatureSchema s{{
      {"age", K::numeric},
      {"workclass", K::categorical},
      {"fnlwgt", K::numeric},
      {"education", K::categorical},
      {"education-num", K::numeric},
      {"marital-status", K::categorical},
      {"occupation", K::categorical},
      {"relationship", K::categorical},
      {"race", K::categorical},
      {"sex", K::categorical},
      {"capital-gain", K::numeric},
      {"capital-loss", K::numeric},
      {"hours-per-week", K::numeric},
      {"native-country", K::categorical},
      {"income", K::categorical, ColumnRole::label},
  }};
  return s;
}

inline std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Sidecar format: one `name=kind` per line; blank lines and `#` comments ignored.
inline FeatureSchema parse_schema_sidecar(std::string_view text) {
  FeatureSchema schema;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::schema, "line " + std::to_string(line_no) + ": expected name=kind");
    }
    schema.columns.push_back(
        {std::string(trim(line.substr(0, eq))), parse_column_kind(trim(line.substr(eq + 1)))});
  }
  if (schema.columns.empty()) throw Error(ErrorCode::schema, "schema declares no columns");
  schema.validate();
  return schema;
}

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string null_token = "?";

  std::size_t column_index(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw Error(ErrorCode::schema, "no column named '" + std::string(name) + "'");
  }

  std::vector<std::string> column(std::size_t c) const {
    std::vector<std::string> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
  }
};

struct ParseOptions {
  bool has_header = true;
  std::string null_token = "?";
  char delimiter = ',';
};

// Comma-separated text, cells trimmed. Blank lines are skipped; line numbers in
// errors are 1-based positions in the input.
inline RawTable parse_table(std::string_view text, const ParseOptions& options = {}) {
  RawTable table;
  table.null_token = options.null_token;

  std::size_t expected = 0;
  bool have_width = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (trim(line).empty()) continue;

    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(options.delimiter, start);
      const auto cell = line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                           : comma - start);
      cells.emplace_back(trim(cell));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }

    if (!have_width) {
      expected = cells.size();
      have_width = true;
      if (options.has_header) {
        table.header = std::move(cells);
        continue;
      }
      for (std::size_t i = 0; i < expected; ++i) table.header.push_back("col" + std::to_string(i));
    }
    if (cells.size() != expected) {
      throw Error(ErrorCode::parse, "line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(expected) + " cells, found " +
                                        std::to_string(cells.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  if (!have_width) throw Error(ErrorCode::empty_input, "no data in input");
  return table;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline RawTable drop_incomplete_rows(const RawTable& table) {
  RawTable out;
  out.header = table.header;
  out.null_token = table.null_token;
  for (const auto& row : table.rows) {
    bool complete = true;
    for (const auto& cell : row) {
      if (cell.empty() || cell == table.null_token) {
        complete = false;
        break;
      }
    }
    if (complete) out.rows.push_back(row);
  }
  return out;
}

// Removes a trailing `suffix` from every cell of one column (e.g. the "." that
// ends income tokens in the census test split).
inline void strip_suffix(RawTable& table, std::size_t column, std::string_view suffix) {
  if (suffix.empty()) return;
  for (auto& row : table.rows) {
    auto& cell = row[column];
    if (cell.size() >= suffix.size() &&
        std::string_view(cell).substr(cell.size() - suffix.size()) == suffix) {
      cell.resize(cell.size() - suffix.size());
    }
  }
}

struct CategoryEncoding {
  std::vector<int> codes;
  std::vector<std::string> tokens;  // tokens[code]

  int code_of(std::string_view token) const {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (tokens[i] == token) return static_cast<int>(i);
    }
    return -1;
  }

  std::vector<std::string> decode() const {
    std::vector<std::string> out;
    out.reserve(codes.size());
    for (int c : codes) out.push_back(tokens[static_cast<std::size_t>(c)]);
    return out;
  }
};

// Codes follow first-appearance order starting at 0.
inline CategoryEncoding encode_categorical(std::span<const std::string> column) {
  CategoryEncoding enc;
  std::unordered_map<std::string, int> lookup;
  enc.codes.reserve(column.size());
  for (const auto& token : column) {
    auto [it, inserted] = lookup.try_emplace(token, static_cast<int>(enc.tokens.size()));
    if (inserted) enc.tokens.push_back(token);
    enc.codes.push_back(it->second);
  }
  return enc;
}

struct StandardizationParams {
  double mean = 0.0;
  double sd = 1.0;  // 0 marks a constant column

  friend bool operator==(const StandardizationParams&, const StandardizationParams&) = default;
};

struct Standardized {
  std::vector<double> z;
  StandardizationParams params;
};

// z = (v - mean) / sd with population sd. Constant columns map to zeros.
inline Standardized standardize_column(std::span<const double> values,
                                       std::optional<StandardizationParams> fit = std::nullopt) {
  StandardizationParams params;
  if (fit) {
    params = *fit;
  } else {
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    params = {mean, std::sqrt(ss / n)};
    // Rounding can leave a tiny spread on a constant column.
    bool constant = true;
    for (double v : values) constant = constant && v == values.front();
    if (constant) params.sd = 0.0;
  }
  Standardized out{std::vector<double>(values.size(), 0.0), params};
  if (params.sd != 0.0) {
    for (std::size_t i = 0; i < values.size(); ++i) out.z[i] = (values[i] - params.mean) / params.sd;
  }
  return out;
}

struct EncodedMatrix {
  Matrix values;  // n x p, one column per schema column
  FeatureSchema schema;
  std::vector<std::optional<CategoryEncoding>> category_maps;  // per column; set for categorical
  std::vector<std::optional<StandardizationParams>> standardization;  // per column; set once standardized
};

inline double parse_number(const std::string& cell, std::size_t row, const std::string& column) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != cell.size() || cell.empty() || !std::isfinite(v)) {
    throw Error(ErrorCode::parse, "row " + std::to_string(row + 1) + ", column '" + column +
                                      "': '" + cell + "' is not a finite number");
  }
  return v;
}

// Encodes every schema column of a cleaned table. Table header must match the
// schema names in order.
inline EncodedMatrix encode_table(const RawTable& table, const FeatureSchema& schema) {
  schema.validate();
  if (table.header.size() != schema.columns.size()) {
    throw Error(ErrorCode::schema, "table has " + std::to_string(table.header.size()) +
                                       " columns, schema declares " +
                                       std::to_string(schema.columns.size()));
  }
  for (std::size_t j = 0; j < schema.columns.size(); ++j) {
    if (table.header[j] != schema.columns[j].name) {
      throw Error(ErrorCode::schema, "column " + std::to_string(j) + " is '" + table.header[j] +
                                         "', schema expects '" + schema.columns[j].name + "'");
    }
  }
  EncodedMatrix out;
  out.schema = schema;
  out.values = Matrix(table.rows.size(), schema.columns.size());
  out.category_maps.resize(schema.columns.size());
  out.standardization.resize(schema.columns.size());
  for (std::size_t j = 0; j < schema.columns.size(); ++j) {
    const auto& col = schema.columns[j];
    if (col.kind == ColumnKind::categorical) {
      const auto cells = table.column(j);
      auto enc = encode_categorical(cells);
      for (std::size_t i = 0; i < enc.codes.size(); ++i) out.values(i, j) = enc.codes[i];
      out.category_maps[j] = std::move(enc);
    } else {
      for (std::size_t i = 0; i < table.rows.size(); ++i) {
        out.values(i, j) = parse_number(table.rows[i][j], i, col.name);
      }
    }
  }
  return out;
}

// 1 where the cell equals `positive_token`, else 0.
inline Labels binarize_label(std::span<const std::string> column, std::string_view positive_token,
                             Diagnostics* diagnostics = nullptr) {
  Labels out;
  out.reserve(column.size());
  bool seen = false;
  for (const auto& cell : column) {
    const bool hit = cell == positive_token;
    seen = seen || hit;
    out.push_back(hit ? 1 : 0);
  }
  if (!seen && diagnostics) {
    diagnostics->push_back("warning: positive token '" + std::string(positive_token) +
                           "' never occurs in the label column");
  }
  return out;
}

// Feature matrix (encoded, unstandardized) plus binary labels.
struct Dataset {
  Matrix features;
  std::vector<Column> columns;  // one per feature column
  Labels labels;
  std::string label_name;
  std::string positive_token;

  std::size_t rows() const { return features.rows(); }
  std::size_t width() const { return features.cols(); }

  std::vector<ColumnKind> kinds() const {
    std::vector<ColumnKind> out;
    for (const auto& c : columns) out.push_back(c.kind);
    return out;
  }

  Dataset select_rows(std::span<const std::size_t> indices) const {
    return {features.select_rows(indices), columns, select(labels, indices), label_name,
            positive_token};
  }

  Dataset drop_feature(std::size_t j) const {
    Dataset out{features.drop_column(j), columns, labels, label_name, positive_token};
    out.columns.erase(out.columns.begin() + static_cast<std::ptrdiff_t>(j));
    return out;
  }
};

// Splits an encoded cleaned table into features and a binarized label column.
inline Dataset make_dataset(const RawTable& cleaned, const FeatureSchema& schema,
                            std::string_view label, std::string_view positive_token,
                            Diagnostics* diagnostics = nullptr) {
  const FeatureSchema labelled = schema.with_label(label);
  const std::size_t label_col = *labelled.label_index();
  const EncodedMatrix encoded = encode_table(cleaned, labelled);

  Dataset ds;
  ds.label_name = std::string(label);
  ds.positive_token = std::string(positive_token);
  ds.features = encoded.values.drop_column(label_col);
  for (const auto& c : labelled.columns) {
    if (c.role == ColumnRole::feature) ds.columns.push_back(c);
  }
  ds.labels = binarize_label(cleaned.column(label_col), positive_token, diagnostics);
  return ds;
}

// Standardizes numeric columns on the rows given, leaving categorical codes as is.
inline Matrix standardize_features(const Matrix& x, std::span<const ColumnKind> kinds,
                                   std::vector<std::optional<StandardizationParams>>* params = nullptr) {
  Matrix out = x;
  if (params) params->assign(x.cols(), std::nullopt);
  for (std::size_t j = 0; j < x.cols(); ++j) {
    if (kinds[j] != ColumnKind::numeric) continue;
    const auto col = x.column(j);
    const auto s = standardize_column(col);
    for (std::size_t i = 0; i < x.rows(); ++i) out(i, j) = s.z[i];
    if (params) (*params)[j] = s.params;
  }
  return out;
}

struct SubsetPartition {
  std::vector<std::vector<std::size_t>> subsets;
  std::size_t subset_size = 0;
  std::uint64_t seed = 0;
};

// Seeded permutation of all rows, then the first k*m chopped into k blocks of m.
inline SubsetPartition partition_subsets(std::size_t n_rows, std::size_t k, std::size_t m,
                                         std::uint64_t seed) {
  if (k == 0 || m == 0) throw Error(ErrorCode::validation, "subset count and size must be positive");
  if (k * m > n_rows) {
    throw Error(ErrorCode::insufficient_rows, std::to_string(k) + " subsets of " +
                                                  std::to_string(m) + " rows need " +
                                                  std::to_string(k * m) + ", have " +
                                                  std::to_string(n_rows));
  }
  std::vector<std::size_t> order(n_rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order);

  SubsetPartition out;
  out.subset_size = m;
  out.seed = seed;
  out.subsets.reserve(k);
  for (std::size_t b = 0; b < k; ++b) {
    out.subsets.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(b * m),
                             order.begin() + static_cast<std::ptrdiff_t>((b + 1) * m));
  }
  return out;
}

struct SplitPair {
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> valid_indices;
  double fraction = 0.8;
  bool stratified = true;
};

namespace detail {

// ceil(x) tolerant of products like 0.7 * 400 landing a hair above an integer.
inline std::size_t ceil_count(double x) {
  return static_cast<std::size_t>(std::ceil(x - 1e-9));
}

// Per-class training counts summing to ceil(fraction * n): floors of the
// per-class quotas topped up by largest remainder (label 1 first on ties).
// A class with two or more members keeps at least one row on each side.
inline std::array<std::size_t, 2> allocate_train_counts(std::array<std::size_t, 2> counts,
                                                        double fraction) {
  const std::size_t n = counts[0] + counts[1];
  std::size_t total = std::min(ceil_count(fraction * static_cast<double>(n)), n);
  if (n >= 2) total = std::clamp<std::size_t>(total, 1, n - 1);

  std::array<std::size_t, 2> train{};
  std::array<double, 2> remainder{};
  std::size_t assigned = 0;
  for (int c = 0; c < 2; ++c) {
    const double quota = fraction * static_cast<double>(counts[c]);
    train[c] = std::min(static_cast<std::size_t>(std::floor(quota + 1e-9)), counts[c]);
    remainder[c] = quota - static_cast<double>(train[c]);
    assigned += train[c];
  }
  const std::array<int, 2> order = remainder[1] >= remainder[0] ? std::array<int, 2>{1, 0}
                                                                  : std::array<int, 2>{0, 1};
  while (assigned < total) {
    for (int c : order) {
      if (assigned < total && train[c] < counts[c]) {
        ++train[c];
        ++assigned;
      }
    }
  }
  while (assigned > total) {
    const int c = train[1] > train[0] ? 1 : 0;
    --train[c];
    --assigned;
  }

  for (int c = 0; c < 2; ++c) {
    if (counts[c] < 2) continue;
    const int other = 1 - c;
    if (train[c] == counts[c]) {
      --train[c];
      const std::size_t cap = counts[other] >= 2 ? counts[other] - 1 : counts[other];
      if (train[other] < cap) ++train[other];
    } else if (train[c] == 0) {
      ++train[c];
      const std::size_t floor_other = counts[other] >= 2 ? 1 : 0;
      if (train[other] > floor_other) --train[other];
    }
  }
  return train;
}

}  // namespace detail

// Stratified train/validation split of `indices`; `labels` is aligned to `indices`.
inline SplitPair stratified_split(std::span<const std::size_t> indices, std::span<const int> labels,
                                  double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw Error(ErrorCode::validation, "split fraction must lie in (0, 1)");
  }
  if (indices.size() != labels.size()) {
    throw Error(ErrorCode::shape, "labels are not aligned with indices");
  }
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < indices.size(); ++i) by_class[labels[i] ? 1 : 0].push_back(indices[i]);
  if (by_class[0].empty() || by_class[1].empty()) {
    throw Error(ErrorCode::degenerate_label,
                "subset holds a single label class (" + std::to_string(indices.size()) + " rows)");
  }

  const auto train_counts = detail::allocate_train_counts({by_class[0].size(), by_class[1].size()},
                                                          fraction);
  Rng rng(seed);
  SplitPair out;
  out.fraction = fraction;
  out.stratified = true;
  for (int c : {1, 0}) {
    auto& members = by_class[c];
    rng.shuffle(members);
    const auto cut = static_cast<std::ptrdiff_t>(train_counts[c]);
    out.train_indices.insert(out.train_indices.end(), members.begin(), members.begin() + cut);
    out.valid_indices.insert(out.valid_indices.end(), members.begin() + cut, members.end());
  }
  std::sort(out.train_indices.begin(), out.train_indices.end());
  std::sort(out.valid_indices.begin(), out.valid_indices.end());
  return out;
}

// Options describing how to turn a CSV file into a cleaned table.
struct LoadOptions {
  bool adult_mode = false;
  std::optional<FeatureSchema> schema;
  ParseOptions parse;
};

struct LoadedTable {
  RawTable cleaned;
  FeatureSchema schema;
  std::size_t raw_rows = 0;
};

// Parse, attach schema names, normalize census label tokens, drop incomplete rows.
inline LoadedTable load_table(std::string_view text, LoadOptions options) {
  FeatureSchema schema;
  if (options.adult_mode) {
    schema = adult_schema();
    options.parse.has_header = false;
  } else if (options.schema) {
    schema = *options.schema;
  } else {
    throw Error(ErrorCode::schema, "a schema file or census mode is required");
  }
  RawTable raw = parse_table(text, options.parse);
  if (raw.header.size() != schema.columns.size()) {
    throw Error(ErrorCode::schema, "input has " + std::to_string(raw.header.size()) +
                                       " columns, schema declares " +
                                       std::to_string(schema.columns.size()));
  }
  if (options.parse.has_header) {
    for (std::size_t j = 0; j < raw.header.size(); ++j) {
      if (raw.header[j] != schema.columns[j].name) {
        throw Error(ErrorCode::schema, "header column " + std::to_string(j) + " is '" +
                                           raw.header[j] + "', schema expects '" +
                                           schema.columns[j].name + "'");
      }
    }
  } else {
    for (std::size_t j = 0; j < raw.header.size(); ++j) raw.header[j] = schema.columns[j].name;
  }
  if (options.adult_mode) strip_suffix(raw, raw.column_index("income"), ".");

  LoadedTable out;
  out.raw_rows = raw.rows.size();
  out.cleaned = drop_incomplete_rows(raw);
  out.schema = std::move(schema);
  return out;
}

}  // namespace suffstat
