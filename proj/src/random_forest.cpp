#include "trendlab/random_forest.hpp"

#include "trendlab/checks.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

namespace trendlab {

namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  // Sum over children of (pos^2 + neg^2) / size; larger means purer.
  double score = -1.0;
};

int majority(Index pos, Index neg) { return pos >= neg ? 1 : -1; }

// Best threshold on one feature. Strict improvement keeps the lowest
// threshold among equal scores.
void scan_feature(const MatrixXd& X, const Labels& y, std::span<const Index> rows, int feature,
                  std::vector<std::pair<double, int>>& scratch, Split& best) {
  scratch.clear();
  for (const Index r : rows) scratch.emplace_back(X(r, feature), y(r));
  std::sort(scratch.begin(), scratch.end());
  Index total_pos = 0;
  for (const auto& [v, label] : scratch) total_pos += label > 0 ? 1 : 0;
  const auto n = static_cast<Index>(scratch.size());
  const Index total_neg = n - total_pos;
  Index left_pos = 0;
  for (Index i = 0; i + 1 < n; ++i) {
    left_pos += scratch[static_cast<std::size_t>(i)].second > 0 ? 1 : 0;
    const double a = scratch[static_cast<std::size_t>(i)].first;
    const double b = scratch[static_cast<std::size_t>(i + 1)].first;
    if (!(a < b)) continue;
    const Index left_n = i + 1;
    const Index left_neg = left_n - left_pos;
    const Index right_pos = total_pos - left_pos;
    const Index right_neg = total_neg - left_neg;
    const Index right_n = n - left_n;
    const double score =
        static_cast<double>(left_pos * left_pos + left_neg * left_neg) / static_cast<double>(left_n) +
        static_cast<double>(right_pos * right_pos + right_neg * right_neg) / static_cast<double>(right_n);
    if (score > best.score) {
      double mid = a + (b - a) / 2.0;
      if (!(mid < b)) mid = a;
      best = {feature, mid, score};
    }
  }
}

}  // namespace

int DecisionTree::predict(const Eigen::Ref<const VectorXd>& x) const {
  std::size_t at = 0;
  while (nodes[at].feature >= 0) {
    const auto& node = nodes[at];
    at = static_cast<std::size_t>(x(node.feature) <= node.threshold ? node.left : node.right);
  }
  return nodes[at].label;
}

Index DecisionTree::depth() const {
  std::vector<std::pair<int, Index>> stack{{0, 1}};
  Index deepest = 0;
  while (!stack.empty()) {
    const auto [at, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    const auto& node = nodes[static_cast<std::size_t>(at)];
    if (node.feature >= 0) {
      stack.emplace_back(node.left, d + 1);
      stack.emplace_back(node.right, d + 1);
    }
  }
  return deepest;
}

DecisionTree grow_tree(const MatrixXd& X, const Labels& y, std::span<const Index> rows, Index mtry, Rng& rng) {
  if (rows.empty()) throw Error("grow_tree: no rows");
  if (mtry < 1 || mtry > X.cols()) throw Error("grow_tree: mtry out of range");

  struct Pending {
    int node;
    std::vector<Index> rows;
  };
  DecisionTree tree;
  tree.nodes.emplace_back();
  std::vector<Pending> stack;
  stack.push_back({0, std::vector<Index>(rows.begin(), rows.end())});
  std::vector<int> features(static_cast<std::size_t>(X.cols()));
  std::vector<std::pair<double, int>> scratch;

  while (!stack.empty()) {
    Pending job = std::move(stack.back());
    stack.pop_back();
    Index pos = 0;
    for (const Index r : job.rows) pos += y(r) > 0 ? 1 : 0;
    const Index neg = static_cast<Index>(job.rows.size()) - pos;
    tree.nodes[static_cast<std::size_t>(job.node)].label = majority(pos, neg);
    if (pos == 0 || neg == 0) continue;

    // Random feature order; the first mtry are the candidates. Should none
    // of them separate the node, later features are tried in the same order.
    std::iota(features.begin(), features.end(), 0);
    shuffle(std::span<int>(features), rng);
    Split best;
    for (Index start = 0; start < X.cols() && best.feature < 0; start += mtry) {
      const Index stop = std::min<Index>(start + mtry, X.cols());
      std::vector<int> batch(features.begin() + start, features.begin() + stop);
      std::sort(batch.begin(), batch.end());
      for (const int f : batch) scan_feature(X, y, job.rows, f, scratch, best);
    }
    if (best.feature < 0) continue;

    std::vector<Index> left_rows;
    std::vector<Index> right_rows;
    for (const Index r : job.rows) (X(r, best.feature) <= best.threshold ? left_rows : right_rows).push_back(r);
    const int left = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    const int right = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    auto& node = tree.nodes[static_cast<std::size_t>(job.node)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = left;
    node.right = right;
    stack.push_back({right, std::move(right_rows)});
    stack.push_back({left, std::move(left_rows)});
  }
  return tree;
}

double RfModel::predict_proba(const Eigen::Ref<const VectorXd>& x) const {
  detail::check_query(x, feature_count, "random forest");
  Index up = 0;
  for (const auto& t : trees) up += t.predict(x) > 0 ? 1 : 0;
  return static_cast<double>(up) / static_cast<double>(trees.size());
}

RfModel train_rf(const MatrixXd& X, const Labels& y, const RfParams& params) {
  detail::check_training_data(X, y, "train_rf");
  if (X.rows() < 2) throw Error("train_rf: need at least 2 rows");
  if (params.mtry < 1 || params.mtry > X.cols()) {
    throw Error(fmt::format("train_rf: mtry {} outside 1..{}", params.mtry, X.cols()));
  }
  if (params.n_trees < 1) throw Error("train_rf: n_trees must be >= 1");

  RfModel model;
  model.feature_count = X.cols();
  model.trees.reserve(static_cast<std::size_t>(params.n_trees));
  const auto n = static_cast<std::uint64_t>(X.rows());
  std::vector<Index> sample(static_cast<std::size_t>(n));
  for (Index t = 0; t < params.n_trees; ++t) {
    Rng rng(derive_seed(params.seed, 2, static_cast<std::uint64_t>(t)));
    for (auto& s : sample) s = static_cast<Index>(uniform_index(rng, n));
    model.trees.push_back(grow_tree(X, y, sample, params.mtry, rng));
  }
  return model;
}

}  // namespace trendlab
