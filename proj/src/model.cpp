#include "trendlab/model.hpp"

#include "trendlab/checks.hpp"

#include <fmt/format.h>

namespace trendlab {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

json matrix_to_json(const MatrixXd& m) {
  json data = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Index>();
  const auto cols = j.at("cols").get<Index>();
  const auto& data = j.at("data");
  if (static_cast<Index>(data.size()) != rows * cols) throw InputError("model file: matrix size mismatch");
  MatrixXd m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) m(r, c) = data.at(static_cast<std::size_t>(r * cols + c)).get<double>();
  }
  return m;
}

json vector_to_json(const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

VectorXd vector_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const VectorXd>(values.data(), static_cast<Index>(values.size()));
}

const char* variant_name(NbVariant v) { return v == NbVariant::Gaussian ? "gaussian" : "bernoulli"; }

NbVariant parse_variant(const std::string& s) {
  if (s == "gaussian") return NbVariant::Gaussian;
  if (s == "bernoulli") return NbVariant::Bernoulli;
  throw InputError(fmt::format("unknown naive bayes variant '{}'", s));
}

json kernel_to_json(const Kernel& k) {
  return std::visit(overloaded{[](const PolynomialKernel& p) { return json{{"kernel", "polynomial"}, {"degree", p.degree}}; },
                               [](const RbfKernel& r) { return json{{"kernel", "rbf"}, {"gamma", r.gamma}}; }},
                    k);
}

Kernel kernel_from_json(const json& j) {
  const auto name = j.at("kernel").get<std::string>();
  if (name == "polynomial") return PolynomialKernel{j.at("degree").get<int>()};
  if (name == "rbf") return RbfKernel{j.at("gamma").get<double>()};
  throw InputError(fmt::format("unknown kernel '{}'", name));
}

}  // namespace

std::string_view family_name(Family f) {
  switch (f) {
    case Family::Ann: return "ANN";
    case Family::Svm: return "SVM";
    case Family::Nb: return "NB";
    case Family::Rf: return "RF";
    case Family::Lr: return "LR";
  }
  return "?";
}

std::optional<Family> parse_family(std::string_view name) {
  for (const auto f : kAllFamilies) {
    if (family_name(f) == name) return f;
  }
  return std::nullopt;
}

Family family_of(const ModelSpec& spec) {
  return std::visit(overloaded{[](const MlpParams&) { return Family::Ann; }, [](const SvmParams&) { return Family::Svm; },
                               [](const NbParams&) { return Family::Nb; }, [](const RfParams&) { return Family::Rf; },
                               [](const LrParams&) { return Family::Lr; }},
                    spec);
}

ModelSpec with_seed(ModelSpec spec, std::uint64_t seed) {
  if (auto* p = std::get_if<MlpParams>(&spec)) p->seed = seed;
  if (auto* p = std::get_if<RfParams>(&spec)) p->seed = seed;
  return spec;
}

std::string describe(const ModelSpec& spec) {
  return std::visit(
      overloaded{
          [](const MlpParams& p) {
            return fmt::format("n={} ep={} mc={} lr={}", p.hidden, p.epochs, p.momentum, p.learning_rate);
          },
          [](const SvmParams& p) {
            return std::visit(overloaded{[&](const PolynomialKernel& k) { return fmt::format("poly d={} c={}", k.degree, p.c); },
                                         [&](const RbfKernel& k) { return fmt::format("rbf gamma={} c={}", k.gamma, p.c); }},
                              p.kernel);
          },
          [](const NbParams& p) { return std::string(variant_name(p.variant)); },
          [](const RfParams& p) { return fmt::format("mtry={} trees={}", p.mtry, p.n_trees); },
          [](const LrParams& p) { return p.l2 > 0.0 ? fmt::format("irls l2={}", p.l2) : std::string("irls"); }},
      spec);
}

TrainedModel::TrainedModel(Fitted fitted, ModelSpec spec, Index feature_count)
    : fitted_(std::move(fitted)), spec_(std::move(spec)), feature_count_(feature_count) {
  if (fitted_.index() != spec_.index()) throw Error("fitted model and parameters belong to different families");
}

double TrainedModel::predict_proba(const Eigen::Ref<const VectorXd>& x) const {
  detail::check_query(x, feature_count_, family_name(family()));
  const double p = std::visit([&](const auto& m) { return m.predict_proba(x); }, fitted_);
  return std::clamp(p, 0.0, 1.0);
}

int TrainedModel::predict(const Eigen::Ref<const VectorXd>& x) const {
  return label_from_probability(predict_proba(x));
}

VectorXd TrainedModel::predict_proba_rows(const MatrixXd& X) const {
  const MatrixXd Xt = X.transpose();
  VectorXd out(X.rows());
  for (Index i = 0; i < X.rows(); ++i) out(i) = predict_proba(Xt.col(i));
  return out;
}

Labels TrainedModel::predict_rows(const MatrixXd& X) const {
  const VectorXd p = predict_proba_rows(X);
  Labels out(p.size());
  for (Index i = 0; i < p.size(); ++i) out(i) = label_from_probability(p(i));
  return out;
}

TrainedModel train(const ModelSpec& spec, const MatrixXd& X, const Labels& y) {
  auto fitted = std::visit(
      overloaded{[&](const MlpParams& p) -> TrainedModel::Fitted { return train_mlp(X, y, p); },
                 [&](const SvmParams& p) -> TrainedModel::Fitted { return train_smo(X, y, p); },
                 [&](const NbParams& p) -> TrainedModel::Fitted { return train_nb(X, y, p); },
                 [&](const RfParams& p) -> TrainedModel::Fitted { return train_rf(X, y, p); },
                 [&](const LrParams& p) -> TrainedModel::Fitted { return train_lr(X, y, p); }},
      spec);
  return TrainedModel(std::move(fitted), spec, X.cols());
}

json spec_to_json(const ModelSpec& spec) {
  json j = std::visit(
      overloaded{[](const MlpParams& p) {
                   return json{{"hidden", p.hidden},
                               {"epochs", p.epochs},
                               {"momentum", p.momentum},
                               {"learning_rate", p.learning_rate},
                               {"seed", p.seed}};
                 },
                 [](const SvmParams& p) {
                   json k = kernel_to_json(p.kernel);
                   k["c"] = p.c;
                   k["tolerance"] = p.tolerance;
                   k["max_passes"] = p.max_passes;
                   return k;
                 },
                 [](const NbParams& p) {
                   return json{{"variant", variant_name(p.variant)}, {"variance_floor", p.variance_floor}, {"alpha", p.alpha}};
                 },
                 [](const RfParams& p) { return json{{"mtry", p.mtry}, {"n_trees", p.n_trees}, {"seed", p.seed}}; },
                 [](const LrParams& p) {
                   return json{{"max_iterations", p.max_iterations}, {"tolerance", p.tolerance}, {"l2", p.l2}};
                 }},
      spec);
  j["family"] = family_name(family_of(spec));
  return j;
}

ModelSpec spec_from_json(const json& j) {
  const auto name = j.at("family").get<std::string>();
  const auto family = parse_family(name);
  if (!family) throw InputError(fmt::format("unknown model family '{}'", name));
  switch (*family) {
    case Family::Ann:
      return MlpParams{j.at("hidden").get<Index>(), j.at("epochs").get<int>(), j.at("momentum").get<double>(),
                       j.at("learning_rate").get<double>(), j.at("seed").get<std::uint64_t>()};
    case Family::Svm:
      return SvmParams{kernel_from_json(j), j.at("c").get<double>(), j.at("tolerance").get<double>(),
                       j.at("max_passes").get<int>()};
    case Family::Nb:
      return NbParams{parse_variant(j.at("variant").get<std::string>()), j.at("variance_floor").get<double>(),
                      j.at("alpha").get<double>()};
    case Family::Rf:
      return RfParams{j.at("mtry").get<Index>(), j.at("n_trees").get<Index>(), j.at("seed").get<std::uint64_t>()};
    case Family::Lr:
      return LrParams{j.at("max_iterations").get<int>(), j.at("tolerance").get<double>(), j.at("l2").get<double>()};
  }
  throw InputError("unreachable family");
}

json model_to_json(const TrainedModel& model) {
  json fitted = std::visit(
      overloaded{[](const MlpModel& m) {
                   return json{{"w_hidden", matrix_to_json(m.w_hidden)},
                               {"b_hidden", vector_to_json(m.b_hidden)},
                               {"w_out", vector_to_json(m.w_out)},
                               {"b_out", m.b_out}};
                 },
                 [](const SvmModel& m) {
                   json k = kernel_to_json(m.kernel);
                   return json{{"kernel", std::move(k)},
                               {"support_vectors", matrix_to_json(m.support_vectors)},
                               {"dual_coef", vector_to_json(m.dual_coef)},
                               {"bias", m.bias},
                               {"converged", m.converged},
                               {"passes", m.passes}};
                 },
                 [](const NbModel& m) {
                   json j{{"variant", variant_name(m.variant)}, {"class_prior", {m.class_prior(0), m.class_prior(1)}}};
                   if (m.variant == NbVariant::Gaussian) {
                     j["mean"] = matrix_to_json(m.mean);
                     j["variance"] = matrix_to_json(m.variance);
                   } else {
                     j["theta"] = matrix_to_json(m.theta);
                   }
                   return j;
                 },
                 [](const RfModel& m) {
                   json trees = json::array();
                   for (const auto& t : m.trees) {
                     json feature = json::array(), threshold = json::array(), left = json::array(),
                          right = json::array(), label = json::array();
                     for (const auto& node : t.nodes) {
                       feature.push_back(node.feature);
                       threshold.push_back(node.threshold);
                       left.push_back(node.left);
                       right.push_back(node.right);
                       label.push_back(node.label);
                     }
                     trees.push_back({{"feature", std::move(feature)},
                                      {"threshold", std::move(threshold)},
                                      {"left", std::move(left)},
                                      {"right", std::move(right)},
                                      {"label", std::move(label)}});
                   }
                   return json{{"feature_count", m.feature_count}, {"trees", std::move(trees)}};
                 },
                 [](const LrModel& m) {
                   return json{{"coefficients", vector_to_json(m.coefficients)},
                               {"intercept", m.intercept},
                               {"converged", m.converged},
                               {"iterations", m.iterations}};
                 }},
      model.fitted());
  return {{"format", "trendlab-model"},
          {"format_version", kModelFormatVersion},
          {"family", family_name(model.family())},
          {"feature_count", model.feature_count()},
          {"params", spec_to_json(model.spec())},
          {"fitted", std::move(fitted)}};
}

TrainedModel model_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != "trendlab-model") throw InputError("not a trendlab model document");
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      throw InputError(fmt::format("unsupported model format version {}", version));
    }
    const ModelSpec spec = spec_from_json(j.at("params"));
    const auto feature_count = j.at("feature_count").get<Index>();
    const auto& f = j.at("fitted");
    TrainedModel::Fitted fitted = [&]() -> TrainedModel::Fitted {
      switch (family_of(spec)) {
        case Family::Ann: {
          MlpModel m;
          m.w_hidden = matrix_from_json(f.at("w_hidden"));
          m.b_hidden = vector_from_json(f.at("b_hidden"));
          m.w_out = vector_from_json(f.at("w_out"));
          m.b_out = f.at("b_out").get<double>();
          return m;
        }
        case Family::Svm: {
          SvmModel m;
          m.kernel = kernel_from_json(f.at("kernel"));
          m.support_vectors = matrix_from_json(f.at("support_vectors"));
          m.dual_coef = vector_from_json(f.at("dual_coef"));
          m.bias = f.at("bias").get<double>();
          m.converged = f.at("converged").get<bool>();
          m.passes = f.at("passes").get<int>();
          return m;
        }
        case Family::Nb: {
          NbModel m;
          m.variant = parse_variant(f.at("variant").get<std::string>());
          m.class_prior << f.at("class_prior").at(0).get<double>(), f.at("class_prior").at(1).get<double>();
          if (m.variant == NbVariant::Gaussian) {
            m.mean = matrix_from_json(f.at("mean"));
            m.variance = matrix_from_json(f.at("variance"));
          } else {
            m.theta = matrix_from_json(f.at("theta"));
          }
          return m;
        }
        case Family::Rf: {
          RfModel m;
          m.feature_count = f.at("feature_count").get<Index>();
          for (const auto& t : f.at("trees")) {
            DecisionTree tree;
            const auto& feature = t.at("feature");
            for (std::size_t i = 0; i < feature.size(); ++i) {
              tree.nodes.push_back({feature.at(i).get<int>(), t.at("threshold").at(i).get<double>(),
                                    t.at("left").at(i).get<int>(), t.at("right").at(i).get<int>(),
                                    t.at("label").at(i).get<int>()});
            }
            m.trees.push_back(std::move(tree));
          }
          return m;
        }
        case Family::Lr: {
          LrModel m;
          m.coefficients = vector_from_json(f.at("coefficients"));
          m.intercept = f.at("intercept").get<double>();
          m.converged = f.at("converged").get<bool>();
          m.iterations = f.at("iterations").get<int>();
          return m;
        }
      }
      throw InputError("unreachable family");
    }();
    return TrainedModel(std::move(fitted), spec, feature_count);
  } catch (const json::exception& e) {
    throw InputError(fmt::format("malformed model document: {}", e.what()));
  }
}

}  // namespace trendlab
