#include "trendlab/experiment.hpp"

#include "trendlab/random.hpp"
#include "trendlab/version.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <map>
#include <thread>

namespace trendlab {

using nlohmann::json;

std::string_view mode_name(DataMode m) { return m == DataMode::Continuous ? "continuous" : "discrete"; }

std::optional<DataMode> parse_mode(std::string_view name) {
  if (name == "continuous") return DataMode::Continuous;
  if (name == "discrete") return DataMode::Discrete;
  return std::nullopt;
}

// ---------------------------------------------------------------- grids

GridSpec ann_grid(const std::vector<Index>& hidden, const std::vector<int>& epochs,
                  const std::vector<double>& momentum, const std::vector<double>& learning_rate) {
  GridSpec g;
  g.family = Family::Ann;
  for (const auto n : hidden)
    for (const auto ep : epochs)
      for (const auto mc : momentum)
        for (const auto lr : learning_rate) g.combinations.emplace_back(MlpParams{n, ep, mc, lr, 0});
  return g;
}

GridSpec svm_grid(const std::vector<int>& poly_degrees, const std::vector<double>& poly_c,
                  const std::vector<double>& rbf_gamma, const std::vector<double>& rbf_c) {
  GridSpec g;
  g.family = Family::Svm;
  for (const auto d : poly_degrees)
    for (const auto c : poly_c) g.combinations.emplace_back(SvmParams{PolynomialKernel{d}, c});
  for (const auto gamma : rbf_gamma)
    for (const auto c : rbf_c) g.combinations.emplace_back(SvmParams{RbfKernel{gamma}, c});
  return g;
}

GridSpec nb_grid(const std::vector<NbVariant>& variants) {
  GridSpec g;
  g.family = Family::Nb;
  for (const auto v : variants) g.combinations.emplace_back(NbParams{v});
  return g;
}

GridSpec rf_grid(const std::vector<Index>& mtry, const std::vector<Index>& trees) {
  GridSpec g;
  g.family = Family::Rf;
  for (const auto m : mtry)
    for (const auto t : trees) g.combinations.emplace_back(RfParams{m, t, 0});
  return g;
}

GridSpec lr_grid() {
  GridSpec g;
  g.family = Family::Lr;
  g.combinations.emplace_back(LrParams{});
  return g;
}

namespace {

template <typename T>
std::vector<T> range(T first, T last, T step) {
  std::vector<T> out;
  for (T v = first; v <= last; v += step) out.push_back(v);
  return out;
}

std::vector<double> tenths(int first, int last) {
  std::vector<double> out;
  for (int k = first; k <= last; ++k) out.push_back(k / 10.0);
  return out;
}

std::vector<NbVariant> nb_variants(DataMode mode) {
  if (mode == DataMode::Discrete) return {NbVariant::Gaussian, NbVariant::Bernoulli};
  return {NbVariant::Gaussian};
}

void stamp(std::vector<GridSpec>& grids, std::string_view preset) {
  for (auto& g : grids) g.preset = preset;
}

}  // namespace

std::vector<GridSpec> preset_grids(std::string_view name, DataMode mode, bool full) {
  std::vector<GridSpec> grids;
  if (name == "smoke") {
    grids.push_back(ann_grid({5, 10}, {250}, {0.2, 0.5}, {0.1, 0.3}));
    grids.push_back(svm_grid({1, 2}, {1, 10}, {0.5, 2.0}, {1, 10}));
    grids.push_back(nb_grid(nb_variants(mode)));
    grids.push_back(rf_grid({3, 9}, {25, 100}));
    grids.push_back(lr_grid());
  } else if (name == "paper-full") {
    // C levels shared by both kernels: 1, 10, 20, 30, 40, 100.
    const std::vector<double> c_levels = {1, 10, 20, 30, 40, 100};
    if (full) {
      grids.push_back(ann_grid(range<Index>(5, 50, 1), range(250, 2000, 250), tenths(1, 9), tenths(1, 3)));
    } else {
      grids.push_back(ann_grid(range<Index>(5, 20, 1), {250, 500}, tenths(1, 9), tenths(1, 3)));
      grids.back().note = "truncated: hidden 5..20, epochs {250, 500} (pass --full for 5..50 x 250..2000)";
    }
    grids.push_back(svm_grid({1, 2, 3, 4}, c_levels, tenths(0, 50), c_levels));
    grids.push_back(nb_grid(nb_variants(mode)));
    if (full) {
      grids.push_back(rf_grid(range<Index>(1, 9, 1), range<Index>(3, 300, 1)));
    } else {
      std::vector<Index> trees = {3};
      for (Index t = 25; t <= 300; t += 25) trees.push_back(t);
      grids.push_back(rf_grid(range<Index>(1, 9, 1), trees));
      grids.back().note = "truncated: trees {3, 25, 50, ..., 300} (pass --full for every count 3..300)";
    }
    grids.push_back(lr_grid());
  } else {
    throw InputError(fmt::format("unknown grid preset '{}' (expected smoke or paper-full)", name));
  }
  stamp(grids, name);
  return grids;
}

std::vector<GridSpec> grids_from_json(const json& doc, [[maybe_unused]] DataMode mode) {
  if (!doc.is_object()) throw InputError("grid document must be a JSON object");
  std::vector<GridSpec> grids;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (!parse_family(key)) throw InputError(fmt::format("grid document: unknown family '{}'", key));
    }
    if (doc.contains("ANN")) {
      const auto& a = doc.at("ANN");
      grids.push_back(ann_grid(a.at("hidden").get<std::vector<Index>>(), a.at("epochs").get<std::vector<int>>(),
                               a.at("momentum").get<std::vector<double>>(),
                               a.at("learning_rate").get<std::vector<double>>()));
    }
    if (doc.contains("SVM")) {
      const auto& s = doc.at("SVM");
      std::vector<int> degrees;
      std::vector<double> poly_c, gammas, rbf_c;
      if (s.contains("polynomial")) {
        degrees = s.at("polynomial").at("degree").get<std::vector<int>>();
        poly_c = s.at("polynomial").at("c").get<std::vector<double>>();
      }
      if (s.contains("rbf")) {
        gammas = s.at("rbf").at("gamma").get<std::vector<double>>();
        rbf_c = s.at("rbf").at("c").get<std::vector<double>>();
      }
      grids.push_back(svm_grid(degrees, poly_c, gammas, rbf_c));
    }
    if (doc.contains("NB")) {
      std::vector<NbVariant> variants;
      for (const auto& v : doc.at("NB").value("variant", std::vector<std::string>{"gaussian"})) {
        if (v == "gaussian") variants.push_back(NbVariant::Gaussian);
        else if (v == "bernoulli") variants.push_back(NbVariant::Bernoulli);
        else throw InputError(fmt::format("grid document: unknown NB variant '{}'", v));
      }
      grids.push_back(nb_grid(variants));
    }
    if (doc.contains("RF")) {
      const auto& r = doc.at("RF");
      grids.push_back(rf_grid(r.at("mtry").get<std::vector<Index>>(), r.at("trees").get<std::vector<Index>>()));
    }
    GridSpec lr = lr_grid();
    if (doc.contains("LR")) {
      lr.combinations.clear();
      for (const double l2 : doc.at("LR").value("l2", std::vector<double>{0.0})) {
        LrParams p;
        p.l2 = l2;
        lr.combinations.emplace_back(p);
      }
    }
    grids.push_back(lr);
  } catch (const json::exception& e) {
    throw InputError(fmt::format("malformed grid document: {}", e.what()));
  }
  for (const auto& g : grids) {
    if (g.combinations.empty()) {
      throw InputError(fmt::format("grid document: {} grid is empty", family_name(g.family)));
    }
  }
  stamp(grids, "inline");
  return grids;
}

// ---------------------------------------------------------------- grid runs

std::uint64_t combination_seed(std::uint64_t master_seed, Family family, Index index) {
  return derive_seed(master_seed, 100 + static_cast<std::uint64_t>(family), static_cast<std::uint64_t>(index));
}

Leaderboard run_grid(const GridSpec& grid, const DatasetSplit& split, DataMode mode, std::uint64_t master_seed,
                     int jobs) {
  if (grid.combinations.empty()) throw Error(fmt::format("{} grid is empty", family_name(grid.family)));
  const double prior = split.train.positive_fraction();
  std::vector<LeaderboardRow> rows(grid.combinations.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      auto& row = rows[i];
      row.family = grid.family;
      row.combination = static_cast<Index>(i);
      row.seed = combination_seed(master_seed, grid.family, row.combination);
      row.spec = with_seed(grid.combinations[i], row.seed);
      try {
        if (family_of(row.spec) != grid.family) throw Error("combination belongs to another family");
        const TrainedModel model = train(row.spec, split.train.features, split.train.labels);
        row.metrics = evaluate(model.predict_proba_rows(split.test.features), split.test.labels, prior);
      } catch (const std::exception& e) {
        row.metrics.reset();
        row.failure = e.what();
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::clamp<int>(jobs, 1, static_cast<int>(rows.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const LeaderboardRow& a, const LeaderboardRow& b) { return a.accuracy() > b.accuracy(); });
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].rank = static_cast<Index>(i + 1);
  return {grid.family, mode, grid.preset, grid.note, std::move(rows)};
}

const LeaderboardRow& select_best(const Leaderboard& board) {
  if (board.rows.empty()) throw Error("select_best: empty leaderboard");
  return board.rows.front();
}

TrainedModel refit_best(const Leaderboard& board, const DatasetSplit& split) {
  const auto& best = select_best(board);
  if (best.failed()) {
    throw Error(fmt::format("every {} combination failed: {}", family_name(board.family), best.failure));
  }
  return train(best.spec, split.train.features, split.train.labels);
}

// ---------------------------------------------------------------- data

namespace {

LabeledDataset labeled_rows(const PriceSeries& series, const IndicatorConfig& cfg, DataMode mode) {
  const FeatureMatrix features = compute_features(series, cfg);
  if (mode == DataMode::Continuous) return make_labels(series, features.dates, features.values);
  const SignMatrix signs = discretize(features, series);
  return make_labels(series, signs.dates, signs.as_real());
}

}  // namespace

PreparedData prepare_data(const PriceSeries& series, const IndicatorConfig& cfg, DataMode mode,
                          double train_fraction) {
  PreparedData out;
  out.mode = mode;
  out.split = chronological_split(labeled_rows(series, cfg, mode), train_fraction);
  if (mode == DataMode::Continuous) {
    out.normalizer = fit_normalizer(out.split.train.features);
    out.split.train.features = apply_normalizer(*out.normalizer, out.split.train.features);
    out.split.test.features = apply_normalizer(*out.normalizer, out.split.test.features);
  }
  return out;
}

LabeledDataset model_inputs(const PriceSeries& series, const IndicatorConfig& cfg, DataMode mode,
                            const std::optional<NormalizationParams>& normalizer) {
  LabeledDataset rows = labeled_rows(series, cfg, mode);
  if (mode == DataMode::Continuous) {
    if (!normalizer) throw Error("continuous inputs need the training normalizer");
    rows.features = apply_normalizer(*normalizer, rows.features);
  }
  return rows;
}

// ---------------------------------------------------------------- comparison

std::vector<ComparisonRow> compare_best(const std::vector<Leaderboard>& boards) {
  std::vector<ComparisonRow> rows;
  for (const auto& board : boards) {
    const auto& best = select_best(board);
    if (best.failed()) continue;
    rows.push_back({board.family, describe(best.spec), *best.metrics, std::nullopt});
  }
  std::vector<ComparisonRow*> ranked;
  for (auto& r : rows) {
    if (r.family != Family::Lr) ranked.push_back(&r);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const ComparisonRow* a, const ComparisonRow* b) {
    return a->metrics.core.f_weighted > b->metrics.core.f_weighted;
  });
  for (std::size_t i = 0; i < ranked.size(); ++i) ranked[i]->rank = static_cast<int>(i + 1);
  return rows;
}

// ---------------------------------------------------------------- validation

ValidationOutcome validate_rows(const std::vector<TrainedModel>& models, const LabeledDataset& rows, DataMode mode,
                                bool independent_test) {
  const auto benchmark = std::find_if(models.begin(), models.end(),
                                      [](const TrainedModel& m) { return m.family() == Family::Lr; });
  if (benchmark == models.end()) throw InputError("validation requires the LR benchmark model");
  if (rows.rows() < kValidationRows) {
    throw InputError(fmt::format("validation series yields {} usable rows, {} required", rows.rows(),
                                 kValidationRows));
  }
  const LabeledDataset tail = slice_rows(rows, rows.rows() - kValidationRows, kValidationRows);
  const Index fold_size = kValidationRows / kValidationFolds;

  ValidationOutcome out;
  out.mode = mode;
  out.usable_rows = rows.rows();
  out.independent_test = independent_test;

  auto fold_accuracies = [&](const TrainedModel& model) {
    const Labels pred = model.predict_rows(tail.features);
    std::vector<double> acc;
    for (Index f = 0; f < kValidationFolds; ++f) {
      const Index hits = (pred.segment(f * fold_size, fold_size).array() ==
                          tail.labels.segment(f * fold_size, fold_size).array())
                             .count();
      acc.push_back(static_cast<double>(hits) / static_cast<double>(fold_size));
    }
    return acc;
  };

  const std::vector<double> base = fold_accuracies(*benchmark);
  auto summary = [](Family family, std::vector<double> acc) {
    ValidationModelResult r;
    r.family = family;
    std::tie(r.mean, r.std) = mean_and_std(acc);
    r.fold_accuracy = std::move(acc);
    return r;
  };
  out.models.push_back(summary(Family::Lr, base));
  for (const auto& model : models) {
    if (model.family() == Family::Lr) continue;
    auto r = summary(model.family(), fold_accuracies(model));
    r.versus_benchmark = independent_test ? independent_t_test(r.fold_accuracy, base)
                                          : paired_t_test(r.fold_accuracy, base);
    out.models.push_back(std::move(r));
  }
  return out;
}

ValidationOutcome run_validation(const std::vector<TrainedModel>& models, const PriceSeries& validation,
                                 DataMode mode, const IndicatorConfig& cfg,
                                 const std::optional<NormalizationParams>& normalizer, bool independent_test) {
  return validate_rows(models, model_inputs(validation, cfg, mode, normalizer), mode, independent_test);
}

// ---------------------------------------------------------------- JSON

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json metrics_to_json(const MetricsReport& m) {
  return {{"tp", m.confusion.tp},
          {"fp", m.confusion.fp},
          {"tn", m.confusion.tn},
          {"fn", m.confusion.fn},
          {"accuracy", m.core.accuracy},
          {"precision_pos", m.core.precision_pos},
          {"precision_neg", m.core.precision_neg},
          {"recall_pos", m.core.recall_pos},
          {"recall_neg", m.core.recall_neg},
          {"f_pos", m.core.f_pos},
          {"f_neg", m.core.f_neg},
          {"f_weighted", m.core.f_weighted},
          {"tp_rate", m.core.tp_rate_weighted},
          {"fp_rate", m.core.fp_rate_weighted},
          {"undefined_ratio", m.core.undefined_ratio},
          {"mae", m.mae},
          {"rmse", m.rmse},
          {"rae", optional_number(m.rae)},
          {"auc", optional_number(m.auc)}};
}

json ttest_to_json(const TTestResult& t) {
  return {{"t", optional_number(t.t)},
          {"df", t.df},
          {"p_value", optional_number(t.p_value)},
          {"degenerate", t.degenerate},
          {"significant_05", t.significant_05},
          {"significant_01", t.significant_01}};
}

}  // namespace

json leaderboard_to_json(const Leaderboard& board) {
  json rows = json::array();
  for (const auto& r : board.rows) {
    json row{{"rank", r.rank},
             {"combination", r.combination},
             {"params", spec_to_json(r.spec)},
             {"description", describe(r.spec)},
             {"seed", r.seed},
             {"failed", r.failed()}};
    if (r.metrics) {
      row["metrics"] = metrics_to_json(*r.metrics);
    } else {
      row["error"] = r.failure;
    }
    rows.push_back(std::move(row));
  }
  json out{{"mode", mode_name(board.mode)},
           {"family", family_name(board.family)},
           {"preset", board.preset},
           {"combinations", board.rows.size()},
           {"rows", std::move(rows)}};
  if (!board.note.empty()) out["note"] = board.note;
  return out;
}

json comparison_to_json(DataMode mode, const std::vector<ComparisonRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"family", family_name(r.family)},
                   {"params", r.params},
                   {"benchmark", !r.rank.has_value()},
                   {"rank", r.rank ? json(*r.rank) : json("(Benchmark)")},
                   {"tp_rate", r.metrics.core.tp_rate_weighted},
                   {"fp_rate", r.metrics.core.fp_rate_weighted},
                   {"auc", optional_number(r.metrics.auc)},
                   {"f_weighted", r.metrics.core.f_weighted},
                   {"accuracy", r.metrics.core.accuracy}});
  }
  return {{"mode", mode_name(mode)}, {"rows", std::move(out)}};
}

json validation_to_json(const ValidationOutcome& v) {
  json models = json::array();
  for (const auto& m : v.models) {
    json row{{"family", family_name(m.family)},
             {"benchmark", m.family == Family::Lr},
             {"n", m.fold_accuracy.size()},
             {"fold_accuracy", m.fold_accuracy},
             {"mean", m.mean},
             {"std", m.std}};
    if (m.versus_benchmark) row["test"] = ttest_to_json(*m.versus_benchmark);
    models.push_back(std::move(row));
  }
  return {{"mode", mode_name(v.mode)},
          {"usable_rows", v.usable_rows},
          {"rows_used", kValidationRows},
          {"folds", v.folds},
          {"fold_size", v.fold_size},
          {"test", v.independent_test ? "independent" : "paired"},
          {"t_convention", "model minus benchmark"},
          {"models", std::move(models)}};
}

json normalizer_to_json(const NormalizationParams& p) {
  return {{"min", std::vector<double>(p.min.data(), p.min.data() + p.min.size())},
          {"max", std::vector<double>(p.max.data(), p.max.data() + p.max.size())}};
}

NormalizationParams normalizer_from_json(const json& j) {
  const auto lo = j.at("min").get<std::vector<double>>();
  const auto hi = j.at("max").get<std::vector<double>>();
  if (lo.size() != hi.size()) throw InputError("normalizer: min/max length mismatch");
  NormalizationParams p;
  p.min = Eigen::Map<const VectorXd>(lo.data(), static_cast<Index>(lo.size()));
  p.max = Eigen::Map<const VectorXd>(hi.data(), static_cast<Index>(hi.size()));
  return p;
}

json config_to_json(const ExperimentConfig& cfg) {
  json modes = json::array();
  for (const auto m : cfg.modes) modes.push_back(mode_name(m));
  json out{{"indicators",
            {{"ma_window", cfg.indicators.ma_window},
             {"wma_window", cfg.indicators.wma_window},
             {"n", cfg.indicators.n},
             {"ema_short", cfg.indicators.ema_short},
             {"ema_long", cfg.indicators.ema_long},
             {"macd_signal_n", cfg.indicators.macd_signal_n}}},
           {"modes", std::move(modes)},
           {"grid", cfg.grid_document ? "inline" : cfg.grid},
           {"full", cfg.full},
           {"train_fraction", cfg.train_fraction},
           {"seed", cfg.seed},
           {"t_test", cfg.independent_test ? "independent" : "paired"}};
  if (cfg.grid_document) out["grid_document"] = *cfg.grid_document;
  return out;
}

std::string fingerprint(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("fnv1a64:{:016x}", h);
}

// ---------------------------------------------------------------- experiment

ExperimentResult run_experiment(const ExperimentConfig& cfg, const PriceSeries& series,
                                const std::string& data_fingerprint, const PriceSeries* validation) {
  if (cfg.modes.empty()) throw InputError("no data mode requested");
  ExperimentResult result;
  json& report = result.report;
  report["versions"] = {{"report", kReportVersion}, {"model_format", kModelFormatVersion}, {"tool", kVersion}};
  report["config"] = config_to_json(cfg);
  report["data_fingerprint"] = data_fingerprint;
  report["datasets"] = json::array();
  report["leaderboards"] = json::array();
  report["comparison"] = json::array();
  json validations = json::array();
  json artifacts = json::object();
  std::map<DataMode, std::map<Family, double>> best_f;

  for (const auto mode : cfg.modes) {
    const PreparedData data = prepare_data(series, cfg.indicators, mode, cfg.train_fraction);
    const auto& split = data.split;
    const double test_pos = split.test.positive_fraction();
    report["datasets"].push_back({{"mode", mode_name(mode)},
                                  {"rows", split.train.rows() + split.test.rows()},
                                  {"train_rows", split.train.rows()},
                                  {"test_rows", split.test.rows()},
                                  {"first_date", format_date(split.train.dates.front())},
                                  {"last_date", format_date(split.test.dates.back())},
                                  {"train_positive_fraction", split.train.positive_fraction()},
                                  {"test_majority_baseline", std::max(test_pos, 1.0 - test_pos)}});

    const auto grids = cfg.grid_document ? grids_from_json(*cfg.grid_document, mode)
                                         : preset_grids(cfg.grid, mode, cfg.full);
    std::vector<Leaderboard> boards;
    ModeArtifacts art;
    art.mode = mode;
    art.normalizer = data.normalizer;
    for (const auto& grid : grids) {
      boards.push_back(run_grid(grid, split, mode, cfg.seed, cfg.jobs));
      report["leaderboards"].push_back(leaderboard_to_json(boards.back()));
      if (!select_best(boards.back()).failed()) {
        art.best_models.push_back(refit_best(boards.back(), split));
        artifacts[fmt::format("{}/{}", mode_name(mode), family_name(grid.family))] =
            fingerprint(model_to_json(art.best_models.back()).dump());
      }
    }
    const auto comparison = compare_best(boards);
    for (const auto& row : comparison) best_f[mode][row.family] = row.metrics.core.f_weighted;
    report["comparison"].push_back(comparison_to_json(mode, comparison));

    if (validation) {
      validations.push_back(validation_to_json(
          run_validation(art.best_models, *validation, mode, cfg.indicators, data.normalizer, cfg.independent_test)));
    }
    result.artifacts.push_back(std::move(art));
  }

  if (validation) {
    report["validation"] = std::move(validations);
  } else {
    report["validation_note"] = "no validation series supplied; t-test section omitted";
  }

  if (best_f.contains(DataMode::Continuous) && best_f.contains(DataMode::Discrete)) {
    json rows = json::array();
    bool all_improved = true;
    for (const auto family : kAllFamilies) {
      const auto& cont = best_f[DataMode::Continuous];
      const auto& disc = best_f[DataMode::Discrete];
      if (!cont.contains(family) || !disc.contains(family)) continue;
      const bool improved = disc.at(family) > cont.at(family);
      all_improved = all_improved && improved;
      rows.push_back({{"family", family_name(family)},
                      {"f_continuous", cont.at(family)},
                      {"f_discrete", disc.at(family)},
                      {"discrete_improves", improved}});
    }
    report["mode_comparison"] = {{"rows", std::move(rows)}, {"discrete_improves_all", all_improved}};
  }
  report["artifacts"] = std::move(artifacts);
  return result;
}

// ---------------------------------------------------------------- markdown

namespace {

std::string num(const json& v) {
  if (v.is_null()) return "-";
  return fmt::format("{:.4f}", v.get<double>());
}

}  // namespace

std::string render_validation_table(const json& validation) {
  std::string out;
  out += fmt::format("| Model | Mean (Accuracy) | N | Std. Dev. | t | p | Significance |\n");
  out += "|---|---|---|---|---|---|---|\n";
  for (const auto& m : validation.at("models")) {
    const bool bench = m.at("benchmark").get<bool>();
    std::string t = "", p = "", sig = "";
    if (m.contains("test")) {
      const auto& test = m.at("test");
      if (test.at("degenerate").get<bool>()) {
        t = "degenerate";
      } else {
        t = num(test.at("t"));
        p = num(test.at("p_value"));
        sig = test.at("significant_01").get<bool>() ? "0.01" : test.at("significant_05").get<bool>() ? "0.05" : "n.s.";
      }
    }
    out += fmt::format("| {}{} | {} | {} | {} | {} | {} | {} |\n", m.at("family").get<std::string>(),
                       bench ? " (Benchmark)" : "", num(m.at("mean")), m.at("n").get<int>(), num(m.at("std")), t, p,
                       sig);
  }
  return out;
}

std::string render_markdown(const json& report) {
  std::string out = "# Direction forecasting report\n\n";
  const auto& cfg = report.at("config");
  out += fmt::format("- grid: {}\n- seed: {}\n- train fraction: {}\n- data: {}\n\n", cfg.at("grid").get<std::string>(),
                     cfg.at("seed").dump(), cfg.at("train_fraction").dump(),
                     report.at("data_fingerprint").get<std::string>());
  for (const auto& ds : report.at("datasets")) {
    const auto mode = ds.at("mode").get<std::string>();
    out += fmt::format("## {} dataset\n\n", mode);
    out += fmt::format("{} labeled rows, {} train / {} test, majority baseline {}\n\n", ds.at("rows").get<Index>(),
                       ds.at("train_rows").get<Index>(), ds.at("test_rows").get<Index>(),
                       num(ds.at("test_majority_baseline")));
    for (const auto& board : report.at("leaderboards")) {
      if (board.at("mode") != mode) continue;
      out += fmt::format("### {}: best parameter combinations\n\n", board.at("family").get<std::string>());
      if (board.contains("note")) out += fmt::format("_{}_\n\n", board.at("note").get<std::string>());
      out += "| # | Parameters | Accuracy | MAE | RMSE | RAE |\n|---|---|---|---|---|---|\n";
      int shown = 0;
      for (const auto& row : board.at("rows")) {
        if (shown++ == 3) break;
        if (row.at("failed").get<bool>()) {
          out += fmt::format("| {} | {} | failed: {} | | | |\n", row.at("rank").get<Index>(),
                             row.at("description").get<std::string>(), row.at("error").get<std::string>());
          continue;
        }
        const auto& m = row.at("metrics");
        out += fmt::format("| {} | {} | {} | {} | {} | {} |\n", row.at("rank").get<Index>(),
                           row.at("description").get<std::string>(), num(m.at("accuracy")), num(m.at("mae")),
                           num(m.at("rmse")), num(m.at("rae")));
      }
      out += "\n";
    }
    for (const auto& cmp : report.at("comparison")) {
      if (cmp.at("mode") != mode) continue;
      out += "### Comparison of the best models\n\n| Model | TP | FP | ROC | F-Stat. | Rank |\n|---|---|---|---|---|---|\n";
      for (const auto& r : cmp.at("rows")) {
        const auto rank = r.at("rank").is_string() ? r.at("rank").get<std::string>() : r.at("rank").dump();
        out += fmt::format("| {} | {} | {} | {} | {} | {} |\n", r.at("family").get<std::string>(), num(r.at("tp_rate")),
                           num(r.at("fp_rate")), num(r.at("auc")), num(r.at("f_weighted")), rank);
      }
      out += "\n";
    }
    if (report.contains("validation")) {
      for (const auto& v : report.at("validation")) {
        if (v.at("mode") != mode) continue;
        out += fmt::format("### t tests against the benchmark ({} test, {} folds of {})\n\n",
                           v.at("test").get<std::string>(), v.at("folds").get<int>(), v.at("fold_size").get<int>());
        out += render_validation_table(v);
        out += "\nt is computed as model minus benchmark.\n\n";
      }
    }
  }
  if (report.contains("validation_note")) {
    out += fmt::format("Validation: {}.\n\n", report.at("validation_note").get<std::string>());
  }
  if (report.contains("mode_comparison")) {
    const auto& mc = report.at("mode_comparison");
    out += "## F statistic, continuous vs discrete\n\n| Model | Continuous | Discrete | Discrete better |\n|---|---|---|---|\n";
    for (const auto& r : mc.at("rows")) {
      out += fmt::format("| {} | {} | {} | {} |\n", r.at("family").get<std::string>(), num(r.at("f_continuous")),
                         num(r.at("f_discrete")), r.at("discrete_improves").get<bool>() ? "yes" : "no");
    }
    out += fmt::format("\nDiscrete data improves every model: {}\n",
                       mc.at("discrete_improves_all").get<bool>() ? "yes" : "no");
  }
  return out;
}

}  // namespace trendlab
