#include "trendlab/mlp.hpp"

#include "trendlab/checks.hpp"
#include "trendlab/random.hpp"

#include <numeric>

namespace trendlab {

namespace {

struct Forward {
  VectorXd hidden;
  double output;
};

Forward forward(const MlpModel& m, const Eigen::Ref<const VectorXd>& x) {
  Forward f;
  f.hidden = (m.w_hidden * x + m.b_hidden).array().tanh().matrix();
  f.output = detail::logistic(m.w_out.dot(f.hidden) + m.b_out);
  return f;
}

void gradient_into(const MlpModel& m, const Eigen::Ref<const VectorXd>& x, double target, MlpGradient& g) {
  const Forward f = forward(m, x);
  const double delta_out = (f.output - target) * f.output * (1.0 - f.output);
  const VectorXd delta_hidden = (delta_out * m.w_out.array() * (1.0 - f.hidden.array().square())).matrix();
  g.w_out = delta_out * f.hidden;
  g.b_out = delta_out;
  g.w_hidden.noalias() = delta_hidden * x.transpose();
  g.b_hidden = delta_hidden;
}

}  // namespace

double MlpModel::predict_proba(const Eigen::Ref<const VectorXd>& x) const { return forward(*this, x).output; }

double mlp_sample_loss(const MlpModel& model, const Eigen::Ref<const VectorXd>& x, double target) {
  const double diff = model.predict_proba(x) - target;
  return 0.5 * diff * diff;
}

MlpGradient mlp_sample_gradient(const MlpModel& model, const Eigen::Ref<const VectorXd>& x, double target) {
  MlpGradient g;
  gradient_into(model, x, target, g);
  return g;
}

MlpModel init_mlp(Index inputs, Index hidden, std::uint64_t seed) {
  Rng rng(seed);
  MlpModel m;
  m.w_hidden.resize(hidden, inputs);
  m.b_hidden.resize(hidden);
  m.w_out.resize(hidden);
  for (Index r = 0; r < hidden; ++r) {
    for (Index c = 0; c < inputs; ++c) m.w_hidden(r, c) = uniform(rng, -0.5, 0.5);
  }
  for (Index r = 0; r < hidden; ++r) m.b_hidden(r) = uniform(rng, -0.5, 0.5);
  for (Index r = 0; r < hidden; ++r) m.w_out(r) = uniform(rng, -0.5, 0.5);
  m.b_out = uniform(rng, -0.5, 0.5);
  return m;
}

MlpModel train_mlp(const MatrixXd& X, const Labels& y, const MlpParams& params) {
  detail::check_training_data(X, y, "train_mlp");
  if (params.hidden < 1 || params.epochs < 1 || !(params.learning_rate > 0.0) || params.momentum < 0.0) {
    throw Error("train_mlp: hidden, epochs and learning rate must be positive, momentum non-negative");
  }
  // Stream 0 initializes, stream 1 shuffles.
  MlpModel m = init_mlp(X.cols(), params.hidden, derive_seed(params.seed, 0, 0));
  Rng order_rng(derive_seed(params.seed, 1, 0));

  MlpModel velocity;
  velocity.w_hidden = MatrixXd::Zero(m.w_hidden.rows(), m.w_hidden.cols());
  velocity.b_hidden = VectorXd::Zero(m.b_hidden.size());
  velocity.w_out = VectorXd::Zero(m.w_out.size());
  velocity.b_out = 0.0;

  const MatrixXd Xt = X.transpose();  // column per sample
  std::vector<Index> order(static_cast<std::size_t>(X.rows()));
  std::iota(order.begin(), order.end(), Index{0});
  MlpGradient g;
  const double lr = params.learning_rate;
  const double mc = params.momentum;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    shuffle(std::span<Index>(order), order_rng);
    for (const Index i : order) {
      gradient_into(m, Xt.col(i), detail::target01(y(i)), g);
      velocity.w_hidden = mc * velocity.w_hidden - lr * g.w_hidden;
      velocity.b_hidden = mc * velocity.b_hidden - lr * g.b_hidden;
      velocity.w_out = mc * velocity.w_out - lr * g.w_out;
      velocity.b_out = mc * velocity.b_out - lr * g.b_out;
      m.w_hidden += velocity.w_hidden;
      m.b_hidden += velocity.b_hidden;
      m.w_out += velocity.w_out;
      m.b_out += velocity.b_out;
    }
  }
  return m;
}

}  // namespace trendlab
