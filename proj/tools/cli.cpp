#include "cli.hpp"

#include "trendlab/discretizer.hpp"
#include "trendlab/experiment.hpp"
#include "trendlab/indicators.hpp"
#include "trendlab/market_data.hpp"
#include "trendlab/synthetic.hpp"
#include "trendlab/version.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace trendlab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
  std::string input;
  std::string validation;
  std::string mode = "continuous";
  std::string grid = "smoke";
  std::optional<json> grid_document;
  std::string out = "out";
  std::string config;
  std::string t_test = "paired";
  double train_frac = 0.75;
  std::uint64_t seed = 42;
  int jobs = 1;
  bool full = false;
  IndicatorConfig indicators;
  // synth only
  Index bars = 1000;
  std::string start = "2015-01-01";
  double autocorrelation = SyntheticConfig{}.autocorrelation;
  double volatility = SyntheticConfig{}.volatility;
  double drift = SyntheticConfig{}.regimes.front().drift;
  Index regime_length = SyntheticConfig{}.regimes.front().length;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw InputError(fmt::format("{}: invalid JSON: {}", path.string(), e.what()));
  }
}

void write_file(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw Error(fmt::format("write failed for '{}'", path.string()));
}

void write_json(const fs::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

std::vector<DataMode> modes_of(const std::string& mode) {
  if (mode == "both") return {DataMode::Continuous, DataMode::Discrete};
  if (auto m = parse_mode(mode)) return {*m};
  throw InputError(fmt::format("unknown mode '{}' (expected continuous, discrete or both)", mode));
}

bool given(const CLI::App* sub, const std::string& flag) { return sub->count(flag) > 0; }

// Values from --config fill every option that was not given on the command line.
void apply_config(const CLI::App* sub, Options& o) {
  if (o.config.empty()) return;
  const json cfg = read_json(o.config);
  if (!cfg.is_object()) throw InputError(fmt::format("{}: config must be a JSON object", o.config));
  try {
    auto take = [&](const char* key, const std::string& flag, auto& target) {
      if (cfg.contains(key) && !given(sub, flag)) cfg.at(key).get_to(target);
    };
    take("input", "--input", o.input);
    take("validation", "--validation", o.validation);
    take("mode", "--mode", o.mode);
    take("train_frac", "--train-frac", o.train_frac);
    take("seed", "--seed", o.seed);
    take("out", "--out", o.out);
    take("jobs", "--jobs", o.jobs);
    take("full", "--full", o.full);
    take("t_test", "--t-test", o.t_test);
    if (cfg.contains("grid") && !given(sub, "--grid")) {
      if (cfg.at("grid").is_object()) {
        o.grid_document = cfg.at("grid");
      } else {
        o.grid = cfg.at("grid").get<std::string>();
      }
    }
    if (cfg.contains("indicators")) {
      const auto& ind = cfg.at("indicators");
      auto take_ind = [&](const char* key, const std::string& flag, Index& target) {
        if (ind.contains(key) && !given(sub, flag)) ind.at(key).get_to(target);
      };
      take_ind("ma_window", "--ma-window", o.indicators.ma_window);
      take_ind("wma_window", "--wma-window", o.indicators.wma_window);
      take_ind("n", "--n", o.indicators.n);
      take_ind("ema_short", "--ema-short", o.indicators.ema_short);
      take_ind("ema_long", "--ema-long", o.indicators.ema_long);
      take_ind("macd_signal_n", "--macd-signal", o.indicators.macd_signal_n);
    }
  } catch (const json::exception& e) {
    throw InputError(fmt::format("{}: bad config value: {}", o.config, e.what()));
  }
}

// A --grid value naming an existing file (or ending in .json) is an inline grid.
void resolve_grid(Options& o) {
  if (o.grid_document) return;
  if (o.grid.ends_with(".json") || fs::is_regular_file(o.grid)) o.grid_document = read_json(o.grid);
}

void add_indicator_flags(CLI::App* sub, Options& o) {
  sub->add_option("--ma-window", o.indicators.ma_window, "Simple moving average window")->capture_default_str();
  sub->add_option("--wma-window", o.indicators.wma_window, "Weighted moving average window")->capture_default_str();
  sub->add_option("--n", o.indicators.n, "Lookback for momentum, K%, D%, RSI and LW")->capture_default_str();
  sub->add_option("--ema-short", o.indicators.ema_short, "Short EMA span of MACD")->capture_default_str();
  sub->add_option("--ema-long", o.indicators.ema_long, "Long EMA span of MACD")->capture_default_str();
  sub->add_option("--macd-signal", o.indicators.macd_signal_n, "MACD signal smoothing span")->capture_default_str();
}

void add_common_flags(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "JSON config file; command-line flags take precedence");
  sub->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  sub->add_option("--out", o.out, "Output directory")->capture_default_str();
}

void check_mode_flag(CLI::Option* opt) { opt->check(CLI::IsMember({"continuous", "discrete", "both"})); }

int cmd_features(Options& o, std::ostream& out) {
  if (o.input.empty()) throw InputError("--input is required");
  const auto modes = modes_of(o.mode);
  const PriceSeries series = load_csv_file(o.input);
  const FeatureMatrix features = compute_features(series, o.indicators);
  fs::create_directories(o.out);
  {
    std::ostringstream csv;
    write_features_csv(csv, features);
    write_file(fs::path(o.out) / "features.csv", csv.str());
  }
  out << fmt::format("warmup: dropped {} of {} bars, wrote {} feature rows to {}\n", warmup_bars(o.indicators),
                     series.size(), features.rows(), (fs::path(o.out) / "features.csv").string());
  if (std::find(modes.begin(), modes.end(), DataMode::Discrete) != modes.end()) {
    const SignMatrix signs = discretize(features, series);
    std::ostringstream csv;
    write_signs_csv(csv, signs);
    write_file(fs::path(o.out) / "signs.csv", csv.str());
    out << fmt::format("wrote {} sign rows to {}\n", signs.rows(), (fs::path(o.out) / "signs.csv").string());
  }
  return kExitOk;
}

ExperimentConfig experiment_config(const Options& o) {
  if (!(o.train_frac > 0.0 && o.train_frac < 1.0)) {
    throw InputError(fmt::format("--train-frac {} outside (0, 1)", o.train_frac));
  }
  if (o.jobs < 1) throw InputError("--jobs must be at least 1");
  if (o.t_test != "paired" && o.t_test != "independent") {
    throw InputError(fmt::format("unknown t test '{}' (expected paired or independent)", o.t_test));
  }
  o.indicators.validate();
  ExperimentConfig cfg;
  cfg.indicators = o.indicators;
  cfg.modes = modes_of(o.mode);
  cfg.grid = o.grid;
  cfg.grid_document = o.grid_document;
  cfg.full = o.full;
  cfg.train_fraction = o.train_frac;
  cfg.seed = o.seed;
  cfg.jobs = o.jobs;
  cfg.independent_test = o.t_test == "independent";
  if (!cfg.grid_document) preset_grids(cfg.grid, cfg.modes.front(), cfg.full);  // reject unknown names early
  return cfg;
}

void print_summary(const json& report, std::ostream& out) {
  for (const auto& cmp : report.at("comparison")) {
    out << fmt::format("{}:\n", cmp.at("mode").get<std::string>());
    for (const auto& r : cmp.at("rows")) {
      const auto rank = r.at("rank").is_string() ? r.at("rank").get<std::string>() : r.at("rank").dump();
      out << fmt::format("  {:<4} acc {:.4f}  F {:.4f}  rank {:<12} {}\n", r.at("family").get<std::string>(),
                         r.at("accuracy").get<double>(), r.at("f_weighted").get<double>(), rank,
                         r.at("params").get<std::string>());
    }
  }
}

int cmd_run(Options& o, std::ostream& out) {
  if (o.input.empty()) throw InputError("--input is required");
  resolve_grid(o);
  const ExperimentConfig cfg = experiment_config(o);
  const std::string bytes = read_file(o.input);
  const PriceSeries series = load_csv_file(o.input);
  std::optional<PriceSeries> validation;
  if (!o.validation.empty()) validation = load_csv_file(o.validation);

  const fs::path dir(o.out);
  fs::create_directories(dir);
  const fs::path marker = dir / "FAILED";
  fs::remove(marker);
  try {
    const ExperimentResult result =
        run_experiment(cfg, series, fingerprint(bytes), validation ? &*validation : nullptr);
    for (const auto& art : result.artifacts) {
      const fs::path models = dir / "models" / std::string(mode_name(art.mode));
      fs::remove_all(models);
      for (const auto& model : art.best_models) {
        write_json(models / fmt::format("{}.json", family_name(model.family())), model_to_json(model));
      }
      if (art.normalizer) write_json(models / "normalizer.json", normalizer_to_json(*art.normalizer));
    }
    json run_cfg = config_to_json(cfg);
    run_cfg["input"] = o.input;
    write_json(dir / "run.json", run_cfg);
    write_json(dir / "report.json", result.report);
    write_file(dir / "report.md", render_markdown(result.report));
    print_summary(result.report, out);
    out << fmt::format("report written to {}\n", (dir / "report.json").string());
  } catch (const std::exception& e) {
    write_file(marker, fmt::format("run failed: {}\nfiles in this directory may be incomplete or stale\n", e.what()));
    throw;
  }
  return kExitOk;
}

IndicatorConfig indicators_from_json(const json& j) {
  IndicatorConfig c;
  c.ma_window = j.at("ma_window").get<Index>();
  c.wma_window = j.at("wma_window").get<Index>();
  c.n = j.at("n").get<Index>();
  c.ema_short = j.at("ema_short").get<Index>();
  c.ema_long = j.at("ema_long").get<Index>();
  c.macd_signal_n = j.at("macd_signal_n").get<Index>();
  return c;
}

int cmd_validate(Options& o, const CLI::App* sub, std::ostream& out) {
  if (o.validation.empty()) throw InputError("--validation is required");
  const fs::path dir(o.out);
  const fs::path run_path = dir / "run.json";
  if (!fs::exists(run_path)) {
    throw InputError(fmt::format("missing run artifacts: '{}' not found (run `trendlab run` first)", run_path.string()));
  }
  const json run_cfg = read_json(run_path);
  IndicatorConfig indicators;
  std::vector<DataMode> modes;
  bool independent = false;
  try {
    indicators = indicators_from_json(run_cfg.at("indicators"));
    for (const auto& m : run_cfg.at("modes")) modes.push_back(*parse_mode(m.get<std::string>()));
    independent = run_cfg.value("t_test", "paired") == "independent";
  } catch (const std::exception& e) {
    throw InputError(fmt::format("{}: unreadable run config: {}", run_path.string(), e.what()));
  }
  if (given(sub, "--mode")) modes = modes_of(o.mode);
  if (given(sub, "--t-test")) independent = o.t_test == "independent";
  const PriceSeries series = load_csv_file(o.validation);

  json results = json::array();
  std::string md;
  for (const auto mode : modes) {
    const fs::path models_dir = dir / "models" / std::string(mode_name(mode));
    if (!fs::is_directory(models_dir)) {
      throw InputError(fmt::format("missing model artifacts: '{}' not found", models_dir.string()));
    }
    std::vector<TrainedModel> models;
    for (const auto family : kAllFamilies) {
      const fs::path p = models_dir / fmt::format("{}.json", family_name(family));
      if (fs::exists(p)) models.push_back(model_from_json(read_json(p)));
    }
    std::optional<NormalizationParams> normalizer;
    if (mode == DataMode::Continuous) {
      const fs::path p = models_dir / "normalizer.json";
      if (!fs::exists(p)) throw InputError(fmt::format("missing normalizer: '{}' not found", p.string()));
      normalizer = normalizer_from_json(read_json(p));
    }
    const ValidationOutcome v = run_validation(models, series, mode, indicators, normalizer, independent);
    const json vj = validation_to_json(v);
    const std::string table = render_validation_table(vj);
    out << fmt::format("{} ({} usable rows, last {} used, {} folds of {}):\n{}", mode_name(mode), v.usable_rows,
                       kValidationRows, v.folds, v.fold_size, table);
    md += fmt::format("## {}\n\n{}\nt is computed as model minus benchmark.\n\n", mode_name(mode), table);
    results.push_back(vj);
  }
  write_json(dir / "validation.json", json{{"versions", {{"report", kReportVersion}, {"tool", kVersion}}},
                                           {"validation", results}});
  write_file(dir / "validation.md", "# Validation t tests\n\n" + md);
  return kExitOk;
}

int cmd_report(Options& o, std::ostream& out) {
  const fs::path path = o.input.empty() ? fs::path(o.out) / "report.json" : fs::path(o.input);
  const json report = read_json(path);
  if (!report.contains("versions") || !report.at("versions").contains("report")) {
    throw InputError(fmt::format("{}: not a trendlab report", path.string()));
  }
  std::string md;
  try {
    md = render_markdown(report);
  } catch (const json::exception& e) {
    throw InputError(fmt::format("{}: malformed report: {}", path.string(), e.what()));
  }
  write_file(path.parent_path() / "report.md", md);
  out << md;
  return kExitOk;
}

int cmd_synth(Options& o, std::ostream& out) {
  SyntheticConfig cfg;
  cfg.bars = o.bars;
  cfg.seed = o.seed;
  cfg.autocorrelation = o.autocorrelation;
  cfg.volatility = o.volatility;
  if (o.regime_length < 1) throw InputError("--regime-length must be at least 1");
  cfg.regimes = {{o.regime_length, o.drift}, {o.regime_length, -o.drift}};
  const auto start = parse_date(o.start);
  if (!start) throw InputError(fmt::format("--start: unparseable date '{}'", o.start));
  cfg.start_date = *start;
  if (cfg.bars < 2) throw InputError("--bars must be at least 2");
  const PriceSeries series = generate_synthetic(cfg);
  std::ostringstream csv;
  write_price_csv(csv, series);
  write_file(o.out, csv.str());
  out << fmt::format("wrote {} bars to {}\n", series.size(), o.out);
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Next-day direction forecasting lab for OHLC price series", "trendlab"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Options o;

  auto* features = app.add_subcommand("features", "Write the indicator feature CSV (and sign CSV)");
  features->add_option("--input", o.input, "OHLC CSV file");
  check_mode_flag(features->add_option("--mode", o.mode, "continuous, discrete or both")->capture_default_str());
  add_indicator_flags(features, o);
  add_common_flags(features, o);

  auto* run_cmd = app.add_subcommand("run", "Grid search, best-model comparison and report");
  run_cmd->add_option("--input", o.input, "OHLC CSV file");
  run_cmd->add_option("--validation", o.validation, "Separate OHLC CSV for the t-test validation");
  check_mode_flag(run_cmd->add_option("--mode", o.mode, "continuous, discrete or both")->capture_default_str());
  run_cmd->add_option("--grid", o.grid, "Preset (smoke, paper-full) or grid JSON file")->capture_default_str();
  run_cmd->add_option("--train-frac", o.train_frac, "Chronological training fraction")->capture_default_str();
  run_cmd->add_option("--jobs", o.jobs, "Worker threads per grid")->capture_default_str();
  run_cmd->add_flag("--full", o.full, "Lift the paper-full ANN and RF caps");
  run_cmd->add_option("--t-test", o.t_test, "paired or independent")->capture_default_str();
  add_indicator_flags(run_cmd, o);
  add_common_flags(run_cmd, o);

  auto* validate = app.add_subcommand("validate", "t tests of saved best models against LR on a validation CSV");
  validate->add_option("--validation", o.validation, "OHLC CSV with at least 100 usable rows");
  check_mode_flag(validate->add_option("--mode", o.mode, "Restrict to one mode (default: modes of the run)"));
  validate->add_option("--t-test", o.t_test, "paired or independent (default: as in the run)");
  add_common_flags(validate, o);

  auto* report = app.add_subcommand("report", "Re-render report.md from report.json");
  report->add_option("--input", o.input, "report.json (default: <out>/report.json)");
  add_common_flags(report, o);

  auto* synth = app.add_subcommand("synth", "Write a seeded synthetic OHLC CSV");
  synth->add_option("--bars", o.bars, "Number of bars")->capture_default_str();
  synth->add_option("--start", o.start, "First date, YYYY-MM-DD")->capture_default_str();
  synth->add_option("--seed", o.seed, "Generator seed")->capture_default_str();
  synth->add_option("--autocorrelation", o.autocorrelation, "AR(1) coefficient of daily log-returns")
      ->capture_default_str();
  synth->add_option("--volatility", o.volatility, "Daily shock standard deviation")->capture_default_str();
  synth->add_option("--drift", o.drift, "Daily log-drift of up regimes (down regimes use its negative)")
      ->capture_default_str();
  synth->add_option("--regime-length", o.regime_length, "Bars per regime")->capture_default_str();
  synth->add_option("--out", o.out, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*features) {
      apply_config(features, o);
      return cmd_features(o, out);
    }
    if (*run_cmd) {
      apply_config(run_cmd, o);
      return cmd_run(o, out);
    }
    if (*validate) {
      apply_config(validate, o);
      return cmd_validate(o, validate, out);
    }
    if (*report) return cmd_report(o, out);
    if (*synth) return cmd_synth(o, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace trendlab::cli
