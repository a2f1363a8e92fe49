#pragma once

// Uniform contract over the five model families plus the versioned JSON
// model format.

#include "trendlab/logistic.hpp"
#include "trendlab/mlp.hpp"
#include "trendlab/naive_bayes.hpp"
#include "trendlab/random_forest.hpp"
#include "trendlab/svm.hpp"

#include <json.hpp>

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace trendlab {

enum class Family { Ann, Svm, Nb, Rf, Lr };

inline constexpr std::array<Family, 5> kAllFamilies = {Family::Ann, Family::Svm, Family::Nb, Family::Rf,
                                                       Family::Lr};

std::string_view family_name(Family f);
std::optional<Family> parse_family(std::string_view name);

/// One parameter combination of any family.
using ModelSpec = std::variant<MlpParams, SvmParams, NbParams, RfParams, LrParams>;

Family family_of(const ModelSpec& spec);
/// Replaces the seed of seeded families (ANN, RF); others unchanged.
ModelSpec with_seed(ModelSpec spec, std::uint64_t seed);
/// Short human-readable rendering, e.g. "n=6 ep=500 mc=0.2 lr=0.3".
std::string describe(const ModelSpec& spec);

inline constexpr int kModelFormatVersion = 1;

class TrainedModel {
 public:
  using Fitted = std::variant<MlpModel, SvmModel, NbModel, RfModel, LrModel>;

  TrainedModel(Fitted fitted, ModelSpec spec, Index feature_count);

  [[nodiscard]] Family family() const noexcept { return family_of(spec_); }
  [[nodiscard]] Index feature_count() const noexcept { return feature_count_; }
  [[nodiscard]] const ModelSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] const Fitted& fitted() const noexcept { return fitted_; }

  /// P(up | x) in [0, 1].
  [[nodiscard]] double predict_proba(const Eigen::Ref<const VectorXd>& x) const;
  /// +1 iff predict_proba(x) >= 0.5.
  [[nodiscard]] int predict(const Eigen::Ref<const VectorXd>& x) const;

  [[nodiscard]] VectorXd predict_proba_rows(const MatrixXd& X) const;
  [[nodiscard]] Labels predict_rows(const MatrixXd& X) const;

 private:
  Fitted fitted_;
  ModelSpec spec_;
  Index feature_count_;
};

/// Threshold rule shared by every family.
inline int label_from_probability(double p) { return p >= 0.5 ? 1 : -1; }

TrainedModel train(const ModelSpec& spec, const MatrixXd& X, const Labels& y);

nlohmann::json spec_to_json(const ModelSpec& spec);
ModelSpec spec_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& j);

}  // namespace trendlab
