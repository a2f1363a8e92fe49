#include "trendlab/svm.hpp"

#include "trendlab/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace trendlab {

double kernel_eval(const Kernel& k, const Eigen::Ref<const VectorXd>& x, const Eigen::Ref<const VectorXd>& z) {
  if (x.size() != z.size()) throw Error(fmt::format("kernel: dimension mismatch {} vs {}", x.size(), z.size()));
  return std::visit(
      [&](const auto& kernel) -> double {
        using K = std::decay_t<decltype(kernel)>;
        if constexpr (std::is_same_v<K, PolynomialKernel>) {
          return std::pow(x.dot(z) + 1.0, kernel.degree);
        } else {
          return std::exp(-kernel.gamma * (x - z).squaredNorm());
        }
      },
      k);
}

MatrixXd kernel_matrix(const Kernel& k, const MatrixXd& X) {
  const Index n = X.rows();
  const MatrixXd Xt = X.transpose();
  MatrixXd K(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = j; i < n; ++i) {
      K(i, j) = kernel_eval(k, Xt.col(i), Xt.col(j));
      K(j, i) = K(i, j);
    }
  }
  return K;
}

double svm_dual_objective(const VectorXd& alpha, const Labels& y, const MatrixXd& K) {
  const VectorXd ay = alpha.cwiseProduct(y.cast<double>());
  return alpha.sum() - 0.5 * ay.dot(K * ay);
}

double SvmModel::decision_function(const Eigen::Ref<const VectorXd>& x) const {
  detail::check_query(x, inputs(), "svm");
  double f = bias;
  for (Index i = 0; i < support_vectors.rows(); ++i) {
    f += dual_coef(i) * kernel_eval(kernel, support_vectors.row(i).transpose(), x);
  }
  return f;
}

double SvmModel::predict_proba(const Eigen::Ref<const VectorXd>& x) const {
  return detail::logistic(decision_function(x));
}

namespace {

constexpr double kStepEps = 1e-10;
constexpr double kBoundEps = 1e-12;

// Working state of one SMO run. Errors E_i = f(x_i) - y_i are kept for
// every sample, f including the bias.
class SmoSolver {
 public:
  SmoSolver(const MatrixXd& K, const Labels& y, const SvmParams& p, SmoDiagnostics* diag)
      : K_(K), y_(y.cast<double>()), c_(p.c), tol_(p.tolerance), n_(K.rows()), diag_(diag) {
    alpha_ = VectorXd::Zero(n_);
    error_ = -y_;
    if (diag_ && diag_->record_objective) {
      diag_->objective.clear();
      ay_k_ = VectorXd::Zero(n_);
    }
  }

  // Returns {converged, passes}.
  std::pair<bool, int> run(int max_passes) {
    bool examine_all = true;
    int passes = 0;
    while (passes < max_passes) {
      int changed = 0;
      for (Index i = 0; i < n_; ++i) {
        if (examine_all || is_free(i)) changed += examine(i);
      }
      ++passes;
      if (examine_all) {
        if (changed == 0) return {true, passes};
        examine_all = false;
      } else if (changed == 0) {
        examine_all = true;
      }
    }
    return {false, passes};
  }

  const VectorXd& alpha() const { return alpha_; }

  // With no free multiplier the pairwise b updates can stop outside the
  // interval the KKT conditions allow, so take that interval's midpoint.
  double bias() const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    double lo = -inf, hi = inf;
    for (Index i = 0; i < n_; ++i) {
      if (is_free(i)) return b_;
      const double g = error_(i) + y_(i) - b_;  // f_i without the bias
      const bool at_upper = alpha_(i) >= c_;
      if ((y_(i) > 0) != at_upper) {
        lo = std::max(lo, y_(i) - g);
      } else {
        hi = std::min(hi, y_(i) - g);
      }
    }
    if (std::isinf(lo) && std::isinf(hi)) return b_;
    if (std::isinf(lo)) return std::min(b_, hi);
    if (std::isinf(hi)) return std::max(b_, lo);
    return 0.5 * (lo + hi);
  }

 private:
  bool is_free(Index i) const { return alpha_(i) > 0.0 && alpha_(i) < c_; }

  int examine(Index i2) {
    const double r2 = error_(i2) * y_(i2);
    const double a2 = alpha_(i2);
    if (!((r2 < -tol_ && a2 < c_) || (r2 > tol_ && a2 > 0.0))) return 0;

    // Second-choice heuristic: free sample with the largest |E1 - E2|,
    // lowest index on ties.
    Index best = -1;
    double best_gap = -1.0;
    Index free_count = 0;
    for (Index i = 0; i < n_; ++i) {
      if (!is_free(i)) continue;
      ++free_count;
      const double gap = std::abs(error_(i) - error_(i2));
      if (gap > best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    if (free_count > 1 && best >= 0 && take_step(best, i2)) return 1;
    for (Index i = 0; i < n_; ++i) {
      if (is_free(i) && take_step(i, i2)) return 1;
    }
    for (Index i = 0; i < n_; ++i) {
      if (take_step(i, i2)) return 1;
    }
    return 0;
  }

  // Dual objective restricted to the (a1, a2) line, up to a constant.
  double pair_objective(Index i1, Index i2, double a1, double a2) const {
    const double y1 = y_(i1), y2 = y_(i2);
    const double k11 = K_(i1, i1), k22 = K_(i2, i2), k12 = K_(i1, i2);
    // v_i = sum over other samples of alpha_j y_j K_ij = f_i - b - (own terms)
    const double f1 = error_(i1) + y1 - b_;
    const double f2 = error_(i2) + y2 - b_;
    const double v1 = f1 - alpha_(i1) * y1 * k11 - alpha_(i2) * y2 * k12;
    const double v2 = f2 - alpha_(i1) * y1 * k12 - alpha_(i2) * y2 * k22;
    return a1 + a2 - 0.5 * k11 * a1 * a1 - 0.5 * k22 * a2 * a2 - y1 * y2 * k12 * a1 * a2 - y1 * a1 * v1 -
           y2 * a2 * v2;
  }

  bool take_step(Index i1, Index i2) {
    if (i1 == i2) return false;
    const double a1 = alpha_(i1), a2 = alpha_(i2);
    const double y1 = y_(i1), y2 = y_(i2);
    const double e1 = error_(i1), e2 = error_(i2);
    const double s = y1 * y2;
    double lo, hi;
    if (s < 0) {
      lo = std::max(0.0, a2 - a1);
      hi = std::min(c_, c_ + a2 - a1);
    } else {
      lo = std::max(0.0, a1 + a2 - c_);
      hi = std::min(c_, a1 + a2);
    }
    if (!(lo < hi)) return false;
    const double k11 = K_(i1, i1), k22 = K_(i2, i2), k12 = K_(i1, i2);
    const double eta = k11 + k22 - 2.0 * k12;
    double a2_new;
    if (eta > 0.0) {
      a2_new = std::clamp(a2 + y2 * (e1 - e2) / eta, lo, hi);
    } else {
      const double obj_lo = pair_objective(i1, i2, a1 + s * (a2 - lo), lo);
      const double obj_hi = pair_objective(i1, i2, a1 + s * (a2 - hi), hi);
      if (obj_lo > obj_hi + kStepEps) {
        a2_new = lo;
      } else if (obj_hi > obj_lo + kStepEps) {
        a2_new = hi;
      } else {
        return false;
      }
    }
    if (std::abs(a2_new - a2) < kStepEps * (a2_new + a2 + kStepEps)) return false;
    // Values within round-off of a bound are put on it, otherwise a
    // multiplier at 0.99999999999999989 C would count as free.
    const double snap = kBoundEps * c_;
    if (a2_new < snap) {
      a2_new = 0.0;
    } else if (a2_new > c_ - snap) {
      a2_new = c_;
    }
    double a1_new = a1 + s * (a2 - a2_new);
    if (a1_new < snap) {
      a2_new += s * a1_new;
      a1_new = 0.0;
    } else if (a1_new > c_ - snap) {
      a2_new += s * (a1_new - c_);
      a1_new = c_;
    }
    a2_new = std::clamp(a2_new, 0.0, c_);

    const double d1 = y1 * (a1_new - a1);
    const double d2 = y2 * (a2_new - a2);
    const double b1 = b_ - e1 - d1 * k11 - d2 * k12;
    const double b2 = b_ - e2 - d1 * k12 - d2 * k22;
    double b_new;
    if (a1_new > 0.0 && a1_new < c_) {
      b_new = b1;
    } else if (a2_new > 0.0 && a2_new < c_) {
      b_new = b2;
    } else {
      b_new = 0.5 * (b1 + b2);
    }
    const double db = b_new - b_;
    error_ += d1 * K_.col(i1) + d2 * K_.col(i2);
    error_.array() += db;
    alpha_(i1) = a1_new;
    alpha_(i2) = a2_new;
    b_ = b_new;

    if (diag_) {
      ++diag_->steps;
      if (diag_->record_objective) {
        ay_k_ += d1 * K_.col(i1) + d2 * K_.col(i2);
        diag_->objective.push_back(alpha_.sum() - 0.5 * alpha_.cwiseProduct(y_).dot(ay_k_));
      }
    }
    return true;
  }

  const MatrixXd& K_;
  VectorXd y_;
  double c_;
  double tol_;
  Index n_;
  SmoDiagnostics* diag_;
  VectorXd alpha_;
  VectorXd error_;
  VectorXd ay_k_;  // K * (alpha .* y), only when recording the objective
  double b_ = 0.0;
};

}  // namespace

SvmModel train_smo(const MatrixXd& X, const Labels& y, const SvmParams& params, SmoDiagnostics* diag) {
  detail::check_training_data(X, y, "train_smo");
  if (X.rows() < 2) throw Error("train_smo: need at least 2 rows");
  if ((y.array() > 0).all() || (y.array() < 0).all()) throw Error("train_smo: both classes must be present");
  if (!(params.c > 0.0) || !(params.tolerance > 0.0) || params.max_passes < 1) {
    throw Error("train_smo: C and tolerance must be positive, max_passes >= 1");
  }
  std::visit(
      [](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, PolynomialKernel>) {
          if (k.degree < 1) throw Error("polynomial kernel degree must be >= 1");
        } else {
          if (!(k.gamma >= 0.0)) throw Error("rbf gamma must be >= 0");
        }
      },
      params.kernel);

  const MatrixXd K = kernel_matrix(params.kernel, X);
  SmoSolver solver(K, y, params, diag);
  const auto [converged, passes] = solver.run(params.max_passes);

  SvmModel model;
  model.kernel = params.kernel;
  model.bias = solver.bias();
  model.converged = converged;
  model.passes = passes;
  const VectorXd& alpha = solver.alpha();
  const Index sv_count = (alpha.array() > 0.0).count();
  model.support_vectors.resize(sv_count, X.cols());
  model.dual_coef.resize(sv_count);
  for (Index i = 0, k = 0; i < alpha.size(); ++i) {
    if (alpha(i) > 0.0) {
      model.support_vectors.row(k) = X.row(i);
      model.dual_coef(k) = alpha(i) * y(i);
      ++k;
    }
  }
  if (diag) diag->alpha = alpha;
  return model;
}

}  // namespace trendlab
