// suffstat: effect-size profiling and data-sufficiency experiments.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "suffstat/suffstat.hpp"

namespace fs = std::filesystem;
using namespace suffstat;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct CommonOptions {
  std::string input;
  std::string schema_path;
  bool adult = false;
  bool no_header = false;
  std::string null_token = "?";
  std::optional<std::string> label;
  std::optional<std::string> positive;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::string format = "both";
  std::size_t jobs = default_jobs();
  std::string config_path;
};

void add_input_options(CLI::App& cmd, CommonOptions& o) {
  cmd.add_option("--input", o.input, "CSV data file")->required();
  cmd.add_option("--schema", o.schema_path, "schema sidecar (name=kind per line)");
  cmd.add_flag("--adult", o.adult, "header-less census income file with the built-in schema");
  cmd.add_flag("--no-header", o.no_header, "the CSV has no header line (schema mode)");
  cmd.add_option("--null-token", o.null_token, "cell value marking a missing entry");
  cmd.add_option("--label", o.label, "label column");
  cmd.add_option("--positive", o.positive, "label token treated as class 1");
}

void add_run_options(CLI::App& cmd, CommonOptions& o) {
  cmd.add_option("--seed", o.seed, "master seed (falls back to SUFFSTAT_SEED)");
  cmd.add_option("--out-dir", o.out_dir, "directory for report files");
  cmd.add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
  cmd.add_option("--config", o.config_path, "key=value experiment configuration");
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

class OutputDir {
 public:
  explicit OutputDir(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec || !fs::is_directory(root_)) {
      throw Error(ErrorCode::io, "cannot create output directory '" + root_.string() + "'");
    }
  }

  void write(const std::string& relative, const std::string& content) {
    const fs::path path = root_ / relative;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
    out.close();
    if (!out) throw Error(ErrorCode::io, "cannot write '" + path.string() + "'");
    files_.push_back(relative);
  }

  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path root_;
  std::vector<std::string> files_;
};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct LoadedInput {
  LoadedTable table;
  std::string digest;
};

LoadedInput load_input(const CommonOptions& o) {
  if (!o.adult && o.schema_path.empty()) {
    throw Error(ErrorCode::validation, "pass --adult or --schema <file>");
  }
  const std::string text = read_file(o.input);
  LoadOptions lo;
  lo.adult_mode = o.adult;
  if (!o.adult) lo.schema = parse_schema_sidecar(read_file(o.schema_path));
  lo.parse.has_header = !o.no_header;
  lo.parse.null_token = o.null_token;
  return {load_table(text, lo), "fnv1a64:" + hex64(fnv1a64(text))};
}

std::string default_positive(const CommonOptions& o, const std::string& label) {
  if (o.adult && label == "income") return ">50K";
  if (o.adult && label == "sex") return "Male";
  return "1";
}

// Seed precedence: --seed, then the config file, then SUFFSTAT_SEED, then the default.
ExperimentConfig resolve_config(const CommonOptions& o) {
  ExperimentConfig config;
  KeyValues kv;
  if (!o.config_path.empty()) kv = parse_key_values(read_file(o.config_path));
  if (!kv.contains("seed")) {
    if (const char* env = std::getenv("SUFFSTAT_SEED"); env && *env) kv["seed"] = env;
  }
  if (o.seed) kv["seed"] = std::to_string(*o.seed);
  if (o.label) kv["label"] = *o.label;
  const std::string label = kv.contains("label") ? kv["label"] : config.label;
  if (o.positive) {
    kv["positive"] = *o.positive;
  } else if (!kv.contains("positive")) {
    kv["positive"] = default_positive(o, label);
  }
  return apply_config(config, kv);
}

Json manifest_json(const std::string& command, const CommonOptions& o, const LoadedInput& in,
                   const ExperimentConfig& config, const std::vector<std::string>& outputs) {
  Json m;
  m["toolkit"] = "suffstat";
  m["version"] = kVersion;
  m["command"] = command;
  m["seed"] = config.seed;
  m["input"] = o.input;
  m["input_digest"] = in.digest;
  m["input_rows"] = in.table.raw_rows;
  m["cleaned_rows"] = in.table.cleaned.rows.size();
  Json snapshot;
  for (const auto& [k, v] : parse_key_values(config_text(config))) snapshot[k] = v;
  m["config"] = snapshot;
  m["outputs"] = outputs;
  m["timings"] = "timings.txt";
  return m;
}

void finish_run(OutputDir& out, const std::string& command, const CommonOptions& o, const LoadedInput& in,
                const ExperimentConfig& config, const Diagnostics& diagnostics,
                const std::vector<std::pair<std::string, double>>& timings) {
  std::string diag;
  for (const auto& d : diagnostics) diag += d + "\n";
  out.write("diagnostics.txt", diag);
  std::string t;
  for (const auto& [stage, secs] : timings) t += stage + " " + format_double(secs, 6) + "s\n";
  out.write("timings.txt", t);
  auto outputs = out.files();
  outputs.push_back("manifest.json");
  out.write("manifest.json", dump_json(manifest_json(command, o, in, config, outputs)));
}

Dataset dataset_for(const LoadedInput& in, const ExperimentConfig& config, Diagnostics& diagnostics) {
  Dataset ds = make_dataset(in.table.cleaned, in.table.schema, config.label, config.positive, &diagnostics);
  diagnostics.push_back("input rows " + std::to_string(in.table.raw_rows) + ", rows after dropping incomplete " +
                        std::to_string(ds.rows()) + ", rows used " +
                        std::to_string(std::min(ds.rows(), config.subsets * config.subset_size)));
  return ds;
}

int cmd_profile(const CommonOptions& o) {
  Timer timer;
  const auto in = load_input(o);
  const ExperimentConfig config = resolve_config(o);
  Diagnostics diagnostics;
  const Dataset ds = make_dataset(in.table.cleaned, in.table.schema, config.label, config.positive, &diagnostics);
  const EffectReport report = average_effect_size(ds, config.effects);
  OutputDir out(o.out_dir);
  if (o.format == "json" || o.format == "both") out.write("effects.json", dump_json(effect_report_json(report)));
  if (o.format == "csv" || o.format == "both") out.write("effects.csv", effect_report_csv(report));
  for (const auto& d : diagnostics) std::cerr << d << "\n";
  finish_run(out, "profile", o, in, config, diagnostics, {{"total", timer.seconds()}});
  std::cout << "average effect size " << format_double(report.average, kReportDigits) << " over "
            << report.per_feature.size() << " features\n";
  return 0;
}

std::string label_title(const ExperimentConfig& c) { return c.label + " label"; }

int cmd_exp1(const CommonOptions& o, bool ablation) {
  Timer timer;
  const std::string command = ablation ? "exp1-ablation" : "exp1-subsets";
  const auto in = load_input(o);
  const ExperimentConfig config = resolve_config(o);
  Diagnostics diagnostics;
  const Dataset ds = dataset_for(in, config, diagnostics);
  OutputDir out(o.out_dir);
  const double t_load = timer.seconds();

  ExperimentResult r = ablation ? run_ablation_experiment(config, ds, o.jobs) : run_subset_experiment(config, ds, o.jobs);
  diagnostics.insert(diagnostics.end(), r.diagnostics.begin(), r.diagnostics.end());
  out.write("records.csv", records_csv(command, r.series));
  out.write("summary.json", dump_json(series_summary_json(command, r.series, r.summary)));
  out.write("scatter.svg", scatter_svg(r.series.primary_records(), r.summary.primary_summary(),
                                       command + " (" + label_title(config) + ")", "validation accuracy"));
  finish_run(out, command, o, in, config, diagnostics, {{"load", t_load}, {"total", timer.seconds()}});
  std::cout << command << ": " << r.summary.primary_summary().n_points << " points, R^2 = "
            << format_double(r.summary.primary_summary().r_squared, kReportDigits) << "\n";
  return 0;
}

int cmd_exp2(const CommonOptions& o) {
  Timer timer;
  const auto in = load_input(o);
  const ExperimentConfig config = resolve_config(o);
  Diagnostics diagnostics;
  const Dataset ds = dataset_for(in, config, diagnostics);
  OutputDir out(o.out_dir);
  const double t_load = timer.seconds();

  const CurveExperimentResult r = run_curve_experiment(config, ds, o.jobs);
  diagnostics.insert(diagnostics.end(), r.diagnostics.begin(), r.diagnostics.end());
  out.write("log_slope_records.csv", records_csv("exp2-log-slope", r.series.log_slope));
  out.write("gap_slope_records.csv", records_csv("exp2-gap-slope", r.series.gap_slope));
  Json summary;
  summary["experiment"] = "exp2";
  summary["log_slope"] = series_summary_json("exp2-log-slope", r.series.log_slope, r.log_summary);
  summary["gap_slope"] = series_summary_json("exp2-gap-slope", r.series.gap_slope, r.gap_summary);
  out.write("summary.json", dump_json(summary));
  out.write("log_slope_scatter.svg",
            scatter_svg(r.series.log_slope.primary_records(), r.log_summary.primary_summary(),
                        "exp2 log-slope (" + label_title(config) + ")", "validation log-slope b"));
  out.write("gap_slope_scatter.svg",
            scatter_svg(r.series.gap_slope.primary_records(), r.gap_summary.primary_summary(),
                        "exp2 gap slope (" + label_title(config) + ")", "error-gap slope"));
  out.write("curves.csv", curves_csv(r.curves));
  for (const auto& c : r.curves) {
    char name[96];
    std::snprintf(name, sizeof name, "curves/subset%03zu_%s.svg", c.subset_id,
                  std::string(to_string(c.curve.family)).c_str());
    out.write(name, curve_svg(c));
  }
  finish_run(out, "exp2", o, in, config, diagnostics, {{"load", t_load}, {"total", timer.seconds()}});
  std::cout << "exp2: log-slope R^2 = " << format_double(r.log_summary.primary_summary().r_squared, kReportDigits)
            << ", gap-slope R^2 = " << format_double(r.gap_summary.primary_summary().r_squared, kReportDigits)
            << " over " << r.log_summary.primary_summary().n_points << " points\n";
  return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& output) {
  const SynthSpec spec = parse_synth_spec(read_file(spec_path));
  const Dataset ds = synth_dataset(spec);
  const fs::path path(output);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  for (const auto& [file, content] : {std::pair{path.string(), to_csv(ds)},
                                      std::pair{path.string() + ".schema", schema_sidecar(ds)}}) {
    std::ofstream f(file, std::ios::binary);
    f << content;
    f.close();
    if (!f) throw Error(ErrorCode::io, "cannot write '" + file + "'");
  }
  std::cout << "wrote " << ds.rows() << " rows to " << output << "\n";
  return 0;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::schema:
    case ErrorCode::validation:
    case ErrorCode::degenerate_label:
    case ErrorCode::insufficient_rows:
      return kExitUsage;
    default:
      return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Effect-size profiling and data-sufficiency experiments"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonOptions profile_opts, subsets_opts, ablation_opts, exp2_opts;
  auto* profile = app.add_subcommand("profile", "per-feature and average effect size of a dataset");
  add_input_options(*profile, profile_opts);
  add_run_options(*profile, profile_opts);
  profile->add_option("--format", profile_opts.format, "report format")
      ->check(CLI::IsMember({"json", "csv", "both"}));

  auto* subsets = app.add_subcommand("exp1-subsets", "effect size vs accuracy over row subsets");
  add_input_options(*subsets, subsets_opts);
  add_run_options(*subsets, subsets_opts);
  auto* ablation = app.add_subcommand("exp1-ablation", "effect size vs accuracy over single-feature ablations");
  add_input_options(*ablation, ablation_opts);
  add_run_options(*ablation, ablation_opts);
  auto* exp2 = app.add_subcommand("exp2", "effect size vs learning-curve slopes");
  add_input_options(*exp2, exp2_opts);
  add_run_options(*exp2, exp2_opts);

  std::string spec_path, synth_out;
  auto* synth = app.add_subcommand("synth", "generate a dataset with controlled effect sizes");
  synth->add_option("--spec", spec_path, "synthetic dataset spec")->required();
  synth->add_option("--output", synth_out, "CSV path (schema written next to it)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*profile) return cmd_profile(profile_opts);
    if (*subsets) return cmd_exp1(subsets_opts, false);
    if (*ablation) return cmd_exp1(ablation_opts, true);
    if (*exp2) return cmd_exp2(exp2_opts);
    if (*synth) return cmd_synth(spec_path, synth_out);
  } catch (const Error& e) {
    std::cerr << "suffstat: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "suffstat: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
