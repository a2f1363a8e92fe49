#include "support.hpp"

#include "trendlab/experiment.hpp"
#include "trendlab/synthetic.hpp"

#include <doctest.h>

using namespace trendlab;

namespace {

PriceSeries small_series(Index bars = 300, std::uint64_t seed = 6) {
  SyntheticConfig cfg;
  cfg.bars = bars;
  cfg.seed = seed;
  return generate_synthetic(cfg);
}

LabeledDataset sign_rows(Index n) {
  LabeledDataset d;
  d.features.resize(n, 1);
  d.labels.resize(n);
  for (Index i = 0; i < n; ++i) {
    d.labels(i) = i % 3 == 0 ? -1 : 1;
    d.features(i, 0) = d.labels(i);
    d.dates.push_back(testing::day(static_cast<int>(i)));
  }
  return d;
}

// Hand-set one-feature models: the ANN echoes the feature, LR inverts it.
TrainedModel echo_ann() {
  MlpModel m;
  m.w_hidden = MatrixXd::Constant(1, 1, 10.0);
  m.b_hidden = VectorXd::Zero(1);
  m.w_out = VectorXd::Constant(1, 10.0);
  return TrainedModel(m, MlpParams{1, 1, 0.2, 0.3, 1}, 1);
}

TrainedModel lr_with(double coefficient) {
  LrModel m;
  m.coefficients = VectorXd::Constant(1, coefficient);
  m.converged = true;
  return TrainedModel(m, LrParams{}, 1);
}

LeaderboardRow row_with(double accuracy, Index combination) {
  LeaderboardRow r;
  r.combination = combination;
  MetricsReport m;
  m.core.accuracy = accuracy;
  r.metrics = m;
  return r;
}

}  // namespace

TEST_CASE("preset grid sizes") {
  const auto smoke = preset_grids("smoke", DataMode::Continuous, false);
  REQUIRE(smoke.size() == 5);
  CHECK(smoke[0].combinations.size() == 8);
  CHECK(smoke[1].combinations.size() == 8);
  CHECK(smoke[2].combinations.size() == 1);
  CHECK(smoke[3].combinations.size() == 4);
  CHECK(smoke[4].combinations.size() == 1);
  CHECK(preset_grids("smoke", DataMode::Discrete, false)[2].combinations.size() == 2);

  const auto capped = preset_grids("paper-full", DataMode::Continuous, false);
  CHECK(capped[0].combinations.size() == 16 * 2 * 9 * 3);
  CHECK_FALSE(capped[0].note.empty());
  CHECK(capped[1].combinations.size() == 4 * 6 + 51 * 6);
  CHECK(capped[3].combinations.size() == 9 * 13);
  const auto full = preset_grids("paper-full", DataMode::Continuous, true);
  CHECK(full[0].combinations.size() == 46 * 8 * 9 * 3);
  CHECK(full[0].note.empty());
  CHECK(full[3].combinations.size() == 9 * 298);
  CHECK_THROWS_AS(preset_grids("huge", DataMode::Continuous, false), InputError);
}

TEST_CASE("inline grid documents") {
  const auto doc = nlohmann::json::parse(R"({
    "ANN": {"hidden": [4], "epochs": [10, 20], "momentum": [0.2], "learning_rate": [0.3]},
    "SVM": {"rbf": {"gamma": [0.5], "c": [1, 10]}},
    "RF": {"mtry": [2], "trees": [5]}
  })");
  const auto grids = grids_from_json(doc, DataMode::Continuous);
  REQUIRE(grids.size() == 4);
  CHECK(grids[0].combinations.size() == 2);
  CHECK(grids[1].combinations.size() == 2);
  CHECK(grids.back().family == Family::Lr);
  CHECK_THROWS_AS(grids_from_json(nlohmann::json::parse(R"({"GBM": {}})"), DataMode::Continuous), InputError);
  CHECK_THROWS_AS(grids_from_json(nlohmann::json::parse(R"({"RF": {"mtry": [], "trees": [3]}})"), DataMode::Continuous),
                  InputError);
  CHECK_THROWS_AS(grids_from_json(nlohmann::json::parse(R"({"RF": {"mtry": "x"}})"), DataMode::Continuous),
                  InputError);
}

TEST_CASE("run_grid is deterministic and schedule independent") {
  const auto data = prepare_data(small_series(), IndicatorConfig{}, DataMode::Continuous, 0.75);
  for (const auto& grid : preset_grids("smoke", DataMode::Continuous, false)) {
    const auto a = leaderboard_to_json(run_grid(grid, data.split, DataMode::Continuous, 42, 1));
    const auto b = leaderboard_to_json(run_grid(grid, data.split, DataMode::Continuous, 42, 1));
    const auto c = leaderboard_to_json(run_grid(grid, data.split, DataMode::Continuous, 42, 3));
    CHECK(a == b);
    CHECK(a == c);
    CHECK(a.at("rows").size() == grid.combinations.size());
  }
}

TEST_CASE("singleton grids, ties and failures") {
  const auto data = prepare_data(small_series(), IndicatorConfig{}, DataMode::Continuous, 0.75);
  const auto one = run_grid(lr_grid(), data.split, DataMode::Continuous, 1);
  REQUIRE(one.rows.size() == 1);
  CHECK(one.rows[0].rank == 1);

  // Identical combinations tie; enumeration order decides.
  auto twins = nb_grid({NbVariant::Gaussian, NbVariant::Gaussian});
  const auto tie = run_grid(twins, data.split, DataMode::Continuous, 1);
  CHECK(tie.rows[0].accuracy() == tie.rows[1].accuracy());
  CHECK(tie.rows[0].combination == 0);
  CHECK(select_best(tie).combination == 0);

  // Bernoulli NB needs sign data, mtry 20 exceeds the 9 features.
  const auto nb = run_grid(nb_grid({NbVariant::Bernoulli, NbVariant::Gaussian}), data.split, DataMode::Continuous, 1);
  CHECK_FALSE(nb.rows[0].failed());
  CHECK(nb.rows[1].failed());
  CHECK_FALSE(nb.rows[1].failure.empty());
  CHECK(nb.rows[1].rank == 2);
  const auto rf = run_grid(rf_grid({20}, {3}), data.split, DataMode::Continuous, 1);
  CHECK(rf.rows[0].failed());
  CHECK_THROWS(refit_best(rf, data.split));
  CHECK_THROWS(run_grid(GridSpec{}, data.split, DataMode::Continuous, 1));
}

TEST_CASE("select_best takes the first row") {
  Leaderboard board;
  board.rows = {row_with(0.88, 2), row_with(0.84, 0), row_with(0.81, 1)};
  CHECK(select_best(board).combination == 2);
  board.rows = {row_with(0.7, 0), row_with(0.7, 1), row_with(0.7, 2)};
  CHECK(select_best(board).combination == 0);
  board.rows = {row_with(0.5, 0)};
  CHECK(select_best(board).combination == 0);
  board.rows.clear();
  CHECK_THROWS(select_best(board));
}

TEST_CASE("refit reproduces the leaderboard winner") {
  const auto data = prepare_data(small_series(), IndicatorConfig{}, DataMode::Discrete, 0.75);
  const auto board = run_grid(preset_grids("smoke", DataMode::Discrete, false)[0], data.split, DataMode::Discrete, 9);
  const auto model = refit_best(board, data.split);
  const auto again = evaluate(model.predict_proba_rows(data.split.test.features), data.split.test.labels,
                              data.split.train.positive_fraction());
  CHECK(again.core.accuracy == board.rows[0].accuracy());
}

TEST_CASE("normalizer and models depend on the training partition only") {
  const auto series = small_series(300);
  const auto data = prepare_data(series, IndicatorConfig{}, DataMode::Continuous, 0.75);
  // Refit on the raw training rows alone.
  const auto raw = compute_features(series);
  const Index train_rows = data.split.train.rows();
  const auto refit = fit_normalizer(raw.values.topRows(train_rows));
  CHECK(refit.min == data.normalizer->min);
  CHECK(refit.max == data.normalizer->max);

  // Rewriting every bar after the last training label leaves training untouched.
  auto bars = series.bars();
  const Index last_label_bar = raw.first_bar + train_rows;
  for (Index i = last_label_bar + 1; i < static_cast<Index>(bars.size()); ++i) {
    auto& b = bars[static_cast<std::size_t>(i)];
    b.close *= 1.5;
    b.high = std::max(b.high * 1.5, b.close);
    b.low *= 1.5;
  }
  const auto altered = prepare_data(PriceSeries(bars), IndicatorConfig{}, DataMode::Continuous, 0.75);
  CHECK(altered.normalizer->min == data.normalizer->min);
  CHECK(altered.split.train.features == data.split.train.features);
  CHECK(altered.split.train.labels == data.split.train.labels);
  CHECK(altered.split.test.features != data.split.test.features);
  const auto m1 = train(LrParams{}, data.split.train.features, data.split.train.labels);
  const auto m2 = train(LrParams{}, altered.split.train.features, altered.split.train.labels);
  CHECK(model_to_json(m1) == model_to_json(m2));
}

TEST_CASE("comparison ranks by weighted F with LR as benchmark") {
  const auto data = prepare_data(small_series(), IndicatorConfig{}, DataMode::Continuous, 0.75);
  std::vector<Leaderboard> boards;
  for (const auto& g : preset_grids("smoke", DataMode::Continuous, false)) {
    boards.push_back(run_grid(g, data.split, DataMode::Continuous, 3));
  }
  const auto rows = compare_best(boards);
  REQUIRE(rows.size() == 5);
  std::vector<const ComparisonRow*> ranked(4);
  for (const auto& r : rows) {
    if (r.family == Family::Lr) {
      CHECK_FALSE(r.rank.has_value());
    } else {
      REQUIRE(r.rank.has_value());
      ranked[static_cast<std::size_t>(*r.rank - 1)] = &r;
    }
  }
  for (std::size_t i = 1; i < ranked.size(); ++i) {
    CHECK(ranked[i - 1]->metrics.core.f_weighted >= ranked[i]->metrics.core.f_weighted);
  }
  const auto j = comparison_to_json(DataMode::Continuous, rows);
  CHECK(j.at("rows").back().at("rank") == "(Benchmark)");
}

TEST_CASE("validation folds and t tests") {
  const auto rows = sign_rows(130);
  const auto v = validate_rows({echo_ann(), lr_with(-10.0)}, rows, DataMode::Discrete);
  CHECK(v.usable_rows == 130);
  CHECK(v.folds == 10);
  CHECK(v.fold_size == 10);
  REQUIRE(v.models.size() == 2);
  CHECK(v.models[0].family == Family::Lr);
  CHECK(v.models[0].mean == 0.0);
  CHECK(v.models[1].mean == 1.0);
  CHECK(v.models[1].fold_accuracy.size() == 10);
  REQUIRE(v.models[1].versus_benchmark.has_value());
  CHECK(v.models[1].versus_benchmark->degenerate);
  CHECK(v.models[1].versus_benchmark->mean_a - v.models[1].versus_benchmark->mean_b == 1.0);

  // The ANN and an LR echoing the feature make identical calls.
  const auto tied = validate_rows({echo_ann(), lr_with(10.0)}, rows, DataMode::Discrete);
  CHECK(tied.models[1].versus_benchmark->degenerate);

  const auto table = validation_to_json(v);
  CHECK(table.at("models").size() == 2);
  CHECK(render_validation_table(table).find("LR (Benchmark)") != std::string::npos);
}

TEST_CASE("validation preconditions") {
  try {
    validate_rows({echo_ann(), lr_with(1.0)}, sign_rows(90), DataMode::Discrete);
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("90") != std::string::npos);
  }
  try {
    validate_rows({echo_ann()}, sign_rows(120), DataMode::Discrete);
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("LR") != std::string::npos);
  }
}

TEST_CASE("validation on a price series with exactly 100 usable rows") {
  const auto main = small_series(300);
  const auto data = prepare_data(main, IndicatorConfig{}, DataMode::Continuous, 0.75);
  std::vector<TrainedModel> models;
  for (const ModelSpec& spec : std::vector<ModelSpec>{NbParams{}, LrParams{}}) {
    models.push_back(train(spec, data.split.train.features, data.split.train.labels));
  }
  // 25 warmup bars plus one bar without a successor.
  const auto val = small_series(126, 99);
  const auto v = run_validation(models, val, DataMode::Continuous, IndicatorConfig{}, data.normalizer);
  CHECK(v.usable_rows == 100);
  CHECK(v.models.size() == 2);
  CHECK_THROWS_AS(run_validation(models, small_series(125, 99), DataMode::Continuous, IndicatorConfig{},
                                 data.normalizer),
                  InputError);
}

TEST_CASE("experiment report") {
  ExperimentConfig cfg;
  cfg.modes = {DataMode::Continuous, DataMode::Discrete};
  const auto series = small_series(300);
  const auto a = run_experiment(cfg, series, "fp");
  const auto b = run_experiment(cfg, series, "fp");
  CHECK(a.report.dump() == b.report.dump());

  const auto& r = a.report;
  CHECK(r.at("versions").at("report") == kReportVersion);
  CHECK(r.at("leaderboards").size() == 10);
  CHECK(r.at("comparison").size() == 2);
  CHECK(r.contains("mode_comparison"));
  CHECK(r.at("mode_comparison").at("rows").size() == 5);
  CHECK_FALSE(r.contains("validation"));
  CHECK(r.contains("validation_note"));
  CHECK(r.at("artifacts").size() == 10);
  const auto md = render_markdown(r);
  CHECK(md.find("t tests") == std::string::npos);
  CHECK(md.find("(Benchmark)") != std::string::npos);
  CHECK(md.find("continuous vs discrete") != std::string::npos);

  cfg.modes = {DataMode::Discrete};
  cfg.jobs = 2;
  const auto val = small_series(160, 77);
  const auto c = run_experiment(cfg, series, "fp", &val);
  CHECK(c.report.contains("validation"));
  CHECK_FALSE(c.report.contains("mode_comparison"));
  CHECK(render_markdown(c.report).find("LR (Benchmark)") != std::string::npos);
  CHECK(c.report.at("config").at("seed") == 42);
  CHECK_FALSE(c.report.at("config").contains("jobs"));
}

TEST_CASE("seeds and fingerprints") {
  CHECK(combination_seed(1, Family::Ann, 0) != combination_seed(1, Family::Ann, 1));
  CHECK(combination_seed(1, Family::Ann, 0) != combination_seed(1, Family::Rf, 0));
  CHECK(combination_seed(1, Family::Ann, 0) == combination_seed(1, Family::Ann, 0));
  CHECK(fingerprint("") == "fnv1a64:cbf29ce484222325");
  CHECK(fingerprint("a") == "fnv1a64:af63dc4c8601ec8c");
  NormalizationParams p{VectorXd::Constant(2, -1.5), VectorXd::Constant(2, 3.25)};
  const auto back = normalizer_from_json(normalizer_to_json(p));
  CHECK(back.min == p.min);
  CHECK(back.max == p.max);
}
