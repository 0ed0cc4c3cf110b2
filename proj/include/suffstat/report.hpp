#pragma once

// Report files: CSV point records, JSON summaries with 12-significant-digit
// reals and insertion-ordered keys, and standalone SVG plots.
//
// Record CSV columns, in order:
//   experiment,id,model,note,effect_size,outcome[,abs_outcome]
// Effect CSV columns:
//   feature,kind,raw,magnitude,flags
// Curve CSV columns:
//   subset,model,n_train,train_error,valid_error

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "json.hpp"
#include "suffstat/curves.hpp"
#include "suffstat/effects.hpp"
#include "suffstat/experiments.hpp"
#include "suffstat/format.hpp"

namespace suffstat {

using Json = nlohmann::ordered_json;

inline constexpr int kReportDigits = 12;

namespace detail {

inline void write_json(const Json& j, std::string& out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        write_json(it.value(), out, indent, depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        write_json(j[i], out, indent, depth + 1);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v, kReportDigits) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace detail

inline std::string dump_json(const Json& j) {
  std::string out;
  detail::write_json(j, out, 2, 0);
  out += '\n';
  return out;
}

inline std::string csv_real(double v) { return format_double(v, kReportDigits); }

// Quotes a CSV cell when it holds a delimiter, quote or newline.
inline std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string feature_flags(const FeatureEffect& f) {
  std::string flags;
  if (f.clamped) flags += "clamped";
  if (f.corrected) flags += std::string(flags.empty() ? "" : ";") + "zero-cell-corrected";
  return flags;
}

inline Json effect_report_json(const EffectReport& r) {
  Json j;
  j["label"] = r.label_name;
  j["average"] = r.average;
  j["n_features"] = r.per_feature.size();
  Json features = Json::array();
  for (const auto& f : r.per_feature) {
    Json e;
    e["feature"] = f.name;
    e["kind"] = std::string(to_string(f.kind));
    e["raw"] = f.raw;
    e["magnitude"] = f.magnitude;
    e["flags"] = feature_flags(f);
    features.push_back(e);
  }
  j["features"] = features;
  Json excluded = Json::array();
  for (const auto& x : r.excluded) excluded.push_back({{"feature", x.name}, {"reason", x.reason}});
  j["excluded"] = excluded;
  return j;
}

// One row per feature, then a final `average` row.
inline std::string effect_report_csv(const EffectReport& r) {
  std::string out = "feature,kind,raw,magnitude,flags\n";
  for (const auto& f : r.per_feature) {
    out += csv_cell(f.name) + "," + std::string(to_string(f.kind)) + "," + csv_real(f.raw) + "," +
           csv_real(f.magnitude) + "," + feature_flags(f) + "\n";
  }
  for (const auto& x : r.excluded) out += csv_cell(x.name) + ",excluded,,," + csv_cell(x.reason) + "\n";
  out += "average,,," + csv_real(r.average) + ",\n";
  return out;
}

inline std::string records_csv(const std::string& experiment, const ScatterSeries& s) {
  std::string out = "experiment,id,model,note,effect_size,outcome";
  out += s.has_abs ? ",abs_outcome\n" : "\n";
  auto emit = [&](const std::vector<ScatterRecord>& records) {
    for (const auto& r : records) {
      out += experiment + "," + std::to_string(r.id) + "," + r.model + "," + csv_cell(r.note) + "," +
             csv_real(r.effect_size) + "," + csv_real(r.outcome);
      if (s.has_abs) out += "," + csv_real(std::abs(r.outcome));
      out += "\n";
    }
  };
  emit(s.per_model);
  emit(s.averaged);
  return out;
}

inline Json summary_json(const CorrelationSummary& s) {
  Json j;
  j["n_points"] = s.n_points;
  j["slope"] = s.slope;
  j["intercept"] = s.intercept;
  j["pearson_r"] = s.pearson_r;
  j["r_squared"] = s.r_squared;
  j["zero_variance"] = s.zero_variance;
  return j;
}

inline Json series_summary_json(const std::string& experiment, const ScatterSeries& series,
                                const SeriesSummary& summary) {
  Json j;
  j["experiment"] = experiment;
  j["outcome"] = series.outcome_name;
  j["primary"] = std::string(to_string(summary.primary));
  j["r_squared"] = summary.primary_summary().r_squared;
  j["n_points"] = summary.primary_summary().n_points;
  j["model_averaged"] = summary_json(summary.averaged);
  j["per_model"] = summary_json(summary.per_model);
  if (summary.abs_averaged) j["abs_model_averaged"] = summary_json(*summary.abs_averaged);
  if (summary.abs_per_model) j["abs_per_model"] = summary_json(*summary.abs_per_model);
  return j;
}

inline std::string curves_csv(std::span<const SubsetCurve> curves) {
  std::string out = "subset,model,n_train,train_error,valid_error\n";
  for (const auto& c : curves) {
    for (const auto& p : c.curve.points) {
      out += std::to_string(c.subset_id) + "," + std::string(to_string(c.curve.family)) + "," +
             std::to_string(p.n_train) + "," + csv_real(p.train_error) + "," + csv_real(p.valid_error) + "\n";
    }
  }
  return out;
}

namespace svg {

inline std::string num(double v) { return format_double(v, 6); }

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = 0.0, hi = 1.0;

  static Range of(std::span<const double> v) {
    Range r;
    if (v.empty()) return r;
    r.lo = *std::min_element(v.begin(), v.end());
    r.hi = *std::max_element(v.begin(), v.end());
    if (r.hi - r.lo < 1e-12) {
      const double pad = std::max(1e-3, std::abs(r.lo) * 0.05);
      r.lo -= pad;
      r.hi += pad;
    } else {
      const double pad = (r.hi - r.lo) * 0.05;
      r.lo -= pad;
      r.hi += pad;
    }
    return r;
  }
};

// Plot frame with axes, five ticks per axis, and axis titles.
class Canvas {
 public:
  static constexpr double kWidth = 640, kHeight = 480, kLeft = 80, kRight = 20, kTop = 40, kBottom = 60;

  Canvas(Range x, Range y, const std::string& title, const std::string& x_label, const std::string& y_label)
      : x_(x), y_(y) {
    body_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n";
    body_ += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
    body_ += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
             escape(title) + "</text>\n";
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    body_ += "<g stroke=\"black\" stroke-width=\"1\">\n";
    body_ += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x1) + "\" y2=\"" + num(y0) + "\"/>\n";
    body_ += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x0) + "\" y2=\"" + num(y1) + "\"/>\n";
    body_ += "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (int t = 0; t <= 4; ++t) {
      const double xv = x_.lo + (x_.hi - x_.lo) * t / 4.0;
      const double yv = y_.lo + (y_.hi - y_.lo) * t / 4.0;
      body_ += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(y0 + 18) + "\" text-anchor=\"middle\">" +
               num(xv) + "</text>\n";
      body_ += "<text x=\"" + num(x0 - 6) + "\" y=\"" + num(py(yv) + 4) + "\" text-anchor=\"end\">" + num(yv) +
               "</text>\n";
    }
    body_ += "</g>\n";
    body_ += "<text x=\"" + num((x0 + x1) / 2) + "\" y=\"" + num(kHeight - 16) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + escape(x_label) + "</text>\n";
    body_ += "<text x=\"18\" y=\"" + num((y0 + y1) / 2) + "\" transform=\"rotate(-90 18 " + num((y0 + y1) / 2) +
             ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + escape(y_label) +
             "</text>\n";
  }

  double px(double x) const { return kLeft + (x - x_.lo) / (x_.hi - x_.lo) * (kWidth - kLeft - kRight); }
  double py(double y) const {
    return kHeight - kBottom - (y - y_.lo) / (y_.hi - y_.lo) * (kHeight - kTop - kBottom);
  }

  void point(double x, double y, const std::string& color) {
    body_ += "<circle cx=\"" + num(px(x)) + "\" cy=\"" + num(py(y)) + "\" r=\"3\" fill=\"" + color +
             "\" fill-opacity=\"0.8\"/>\n";
  }

  void polyline(std::span<const double> xs, std::span<const double> ys, const std::string& color) {
    body_ += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) body_ += (i ? " " : "") + num(px(xs[i])) + "," + num(py(ys[i]));
    body_ += "\"/>\n";
  }

  void raw(const std::string& s) { body_ += s; }

  std::string finish() { return body_ + "</svg>\n"; }

 private:
  Range x_, y_;
  std::string body_;
};

}  // namespace svg

// Scatter of the records with the summary's least-squares line and its R².
// The R² also sits in a data attribute at the JSON summary's precision.
inline std::string scatter_svg(std::span<const ScatterRecord> records, const CorrelationSummary& summary,
                               const std::string& title, const std::string& y_label) {
  std::vector<double> xs, ys;
  for (const auto& r : records) {
    xs.push_back(r.effect_size);
    ys.push_back(r.outcome);
  }
  const auto xr = svg::Range::of(xs);
  auto yr = svg::Range::of(ys);
  const double line_lo = summary.intercept + summary.slope * xr.lo;
  const double line_hi = summary.intercept + summary.slope * xr.hi;
  yr.lo = std::min({yr.lo, line_lo, line_hi});
  yr.hi = std::max({yr.hi, line_lo, line_hi});
  svg::Canvas canvas(xr, yr, title, "average effect size", y_label);
  for (std::size_t i = 0; i < xs.size(); ++i) canvas.point(xs[i], ys[i], "#1f77b4");
  const double lx[] = {xr.lo, xr.hi};
  const double ly[] = {line_lo, line_hi};
  canvas.polyline(lx, ly, "#d62728");
  char r2[32];
  std::snprintf(r2, sizeof r2, "%.4f", summary.r_squared);
  canvas.raw("<text x=\"" + svg::num(svg::Canvas::kWidth - svg::Canvas::kRight - 8) +
             "\" y=\"60\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"14\" data-r-squared=\"" +
             format_double(summary.r_squared, kReportDigits) + "\">R\xC2\xB2 = " + r2 + "</text>\n");
  return canvas.finish();
}

inline std::string curve_svg(const SubsetCurve& c) {
  std::vector<double> n, train_err, valid_err, all;
  for (const auto& p : c.curve.points) {
    n.push_back(static_cast<double>(p.n_train));
    train_err.push_back(p.train_error);
    valid_err.push_back(p.valid_error);
    all.push_back(p.train_error);
    all.push_back(p.valid_error);
  }
  const std::string title = "subset " + std::to_string(c.subset_id) + " " +
                            std::string(to_string(c.curve.family)) + " (effect size " +
                            format_double(c.effect_size, 4) + ")";
  svg::Canvas canvas(svg::Range::of(n), svg::Range::of(all), title, "training rows", "error rate");
  canvas.polyline(n, train_err, "#2ca02c");
  canvas.polyline(n, valid_err, "#1f77b4");
  for (std::size_t i = 0; i < n.size(); ++i) {
    canvas.point(n[i], train_err[i], "#2ca02c");
    canvas.point(n[i], valid_err[i], "#1f77b4");
  }
  canvas.raw("<text x=\"540\" y=\"60\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#2ca02c\">training</text>\n");
  canvas.raw("<text x=\"540\" y=\"76\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#1f77b4\">validation</text>\n");
  return canvas.finish();
}

}  // namespace suffstat
