#pragma once

// Grid search, best-model selection, the 10 x 10 validation protocol and
// report assembly.

#include "trendlab/discretizer.hpp"
#include "trendlab/evaluation.hpp"
#include "trendlab/indicators.hpp"
#include "trendlab/market_data.hpp"
#include "trendlab/model.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace trendlab {

enum class DataMode { Continuous, Discrete };

std::string_view mode_name(DataMode m);
std::optional<DataMode> parse_mode(std::string_view name);

/// Parameter combinations of one family, in enumeration order.
struct GridSpec {
  Family family = Family::Lr;
  std::vector<ModelSpec> combinations;
  std::string preset;
  std::string note;  // e.g. truncation stamp
};

// Cartesian products; loops nest in argument order, last argument fastest.
GridSpec ann_grid(const std::vector<Index>& hidden, const std::vector<int>& epochs,
                  const std::vector<double>& momentum, const std::vector<double>& learning_rate);
GridSpec svm_grid(const std::vector<int>& poly_degrees, const std::vector<double>& poly_c,
                  const std::vector<double>& rbf_gamma, const std::vector<double>& rbf_c);
GridSpec nb_grid(const std::vector<NbVariant>& variants);
GridSpec rf_grid(const std::vector<Index>& mtry, const std::vector<Index>& trees);
GridSpec lr_grid();

/// "paper-full" or "smoke", one GridSpec per family. Bernoulli NB needs
/// sign data, so it joins the NB grid only in discrete mode. Without
/// `full`, paper-full caps the ANN and RF grids (stamped in `note`).
std::vector<GridSpec> preset_grids(std::string_view name, DataMode mode, bool full);

/// Inline grid document, see docs/grid-format.md. A missing LR entry is
/// filled with the default benchmark.
std::vector<GridSpec> grids_from_json(const nlohmann::json& doc, DataMode mode);

struct LeaderboardRow {
  Family family = Family::Lr;
  Index combination = 0;  // enumeration index
  ModelSpec spec;
  std::uint64_t seed = 0;
  std::optional<MetricsReport> metrics;
  std::string failure;
  Index rank = 0;

  [[nodiscard]] bool failed() const noexcept { return !metrics.has_value(); }
  [[nodiscard]] double accuracy() const noexcept { return metrics ? metrics->core.accuracy : -1.0; }
};

struct Leaderboard {
  Family family = Family::Lr;
  DataMode mode = DataMode::Continuous;
  std::string preset;
  std::string note;
  std::vector<LeaderboardRow> rows;  // rank order
};

/// Seed of combination `index` of `family` under `master_seed`.
std::uint64_t combination_seed(std::uint64_t master_seed, Family family, Index index);

/// Trains and scores every combination on the test partition. Failures
/// become marked rows. Results do not depend on `jobs`.
Leaderboard run_grid(const GridSpec& grid, const DatasetSplit& split, DataMode mode, std::uint64_t master_seed,
                     int jobs = 1);

const LeaderboardRow& select_best(const Leaderboard& board);

/// Retrains the rank-1 combination with its recorded seed.
TrainedModel refit_best(const Leaderboard& board, const DatasetSplit& split);

struct PreparedData {
  DataMode mode = DataMode::Continuous;
  DatasetSplit split;
  std::optional<NormalizationParams> normalizer;  // continuous only
};

/// Features (and signs in discrete mode) -> labels -> chronological split
/// -> normalizer fitted on train rows.
PreparedData prepare_data(const PriceSeries& series, const IndicatorConfig& cfg, DataMode mode,
                          double train_fraction);

/// Labeled rows of `series` in the model input space of `mode`, using a
/// normalizer fitted elsewhere.
LabeledDataset model_inputs(const PriceSeries& series, const IndicatorConfig& cfg, DataMode mode,
                            const std::optional<NormalizationParams>& normalizer);

struct ComparisonRow {
  Family family = Family::Lr;
  std::string params;
  MetricsReport metrics;
  std::optional<int> rank;  // empty for the benchmark
};

/// Best row of each family ranked by weighted F, LR kept as benchmark.
std::vector<ComparisonRow> compare_best(const std::vector<Leaderboard>& boards);

inline constexpr Index kValidationRows = 100;
inline constexpr Index kValidationFolds = 10;

struct ValidationModelResult {
  Family family = Family::Lr;
  std::vector<double> fold_accuracy;
  double mean = 0.0;
  double std = 0.0;
  std::optional<TTestResult> versus_benchmark;  // empty for LR itself
};

struct ValidationOutcome {
  DataMode mode = DataMode::Continuous;
  Index usable_rows = 0;
  Index folds = kValidationFolds;
  Index fold_size = kValidationRows / kValidationFolds;
  bool independent_test = false;
  std::vector<ValidationModelResult> models;
};

/// Folds the last 100 rows of `rows` into 10 consecutive folds of 10 and
/// t-tests every model against LR, which must be present.
ValidationOutcome validate_rows(const std::vector<TrainedModel>& models, const LabeledDataset& rows, DataMode mode,
                                bool independent_test = false);

ValidationOutcome run_validation(const std::vector<TrainedModel>& models, const PriceSeries& validation,
                                 DataMode mode, const IndicatorConfig& cfg,
                                 const std::optional<NormalizationParams>& normalizer, bool independent_test = false);

struct ExperimentConfig {
  IndicatorConfig indicators;
  std::vector<DataMode> modes = {DataMode::Continuous};
  std::string grid = "smoke";
  std::optional<nlohmann::json> grid_document;  // overrides the preset
  bool full = false;
  double train_fraction = 0.75;
  std::uint64_t seed = 42;
  int jobs = 1;
  bool independent_test = false;
};

nlohmann::json config_to_json(const ExperimentConfig& cfg);

struct ModeArtifacts {
  DataMode mode = DataMode::Continuous;
  std::vector<TrainedModel> best_models;
  std::optional<NormalizationParams> normalizer;
};

struct ExperimentResult {
  nlohmann::json report;
  std::vector<ModeArtifacts> artifacts;
};

inline constexpr int kReportVersion = 1;

/// Runs every requested mode end to end. `validation` is optional; when
/// absent the report says why the t-test block is missing.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const PriceSeries& series,
                                const std::string& data_fingerprint, const PriceSeries* validation = nullptr);

nlohmann::json leaderboard_to_json(const Leaderboard& board);
nlohmann::json comparison_to_json(DataMode mode, const std::vector<ComparisonRow>& rows);
nlohmann::json validation_to_json(const ValidationOutcome& v);
nlohmann::json normalizer_to_json(const NormalizationParams& p);
NormalizationParams normalizer_from_json(const nlohmann::json& j);

/// Markdown tables rendered from a report document.
std::string render_markdown(const nlohmann::json& report);
std::string render_validation_table(const nlohmann::json& validation);

/// 64-bit FNV-1a, hex encoded.
std::string fingerprint(std::string_view bytes);

}  // namespace trendlab
