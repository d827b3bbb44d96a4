#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "sentitree/errors.hpp"
#include "sentitree/rng.hpp"

namespace sentitree {

struct BoostConfig {
  double learning_rate = 0.1;
  int tree_depth = 6;
  int iterations = 100;
  double leaf_lambda = 1.0;  // Newton-step regularizer
  std::uint64_t seed = 0;
};

// Ordered target statistic under one seeded permutation: each item is encoded
// from the targets of same-category items that precede it in the permutation,
// blended with the global mean under prior weight a. Later items never leak in.
inline std::vector<double> encode_categorical(const std::vector<std::string>& values,
                                              const std::vector<double>& targets,
                                              double a, std::uint64_t seed) {
  if (values.size() != targets.size())
    throw DataError("categorical encoding: values/targets length mismatch");
  const std::size_t n = values.size();
  std::vector<double> out(n, 0.0);
  if (n == 0) return out;
  double p = 0.0;
  for (double t : targets) p += t;
  p /= static_cast<double>(n);

  Rng rng(seed);
  auto perm = rng.permutation(n);
  std::unordered_map<std::string, std::pair<double, long long>> running;  // sum, count
  for (std::size_t pos = 0; pos < n; ++pos) {
    std::size_t i = perm[pos];
    auto& [sum, count] = running[values[i]];
    out[i] = (sum + a * p) / (static_cast<double>(count) + a);
    sum += targets[i];
    count += 1;
  }
  return out;
}

struct RegTreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct RegTree {
  std::vector<RegTreeNode> nodes;

  double predict(const std::vector<double>& x) const {
    int i = 0;
    while (nodes[i].feature >= 0)
      i = x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
    return nodes[i].value;
  }
};

struct BoostModel {
  std::vector<int> classes;  // original labels, sorted
  std::size_t n_features = 0;
  std::vector<double> base_score;            // log prior per class
  std::vector<std::vector<RegTree>> trees;   // [iteration][class]
  std::vector<double> loss_curve;            // train log-loss, index 0 = prior-only

  std::vector<double> scores(const std::vector<double>& x) const {
    if (x.size() != n_features)
      throw WidthMismatchError(n_features, x.size());
    std::vector<double> s = base_score;
    for (const auto& iter : trees)
      for (std::size_t c = 0; c < iter.size(); ++c) s[c] += iter[c].predict(x);
    return s;
  }

  std::vector<double> predict_proba(const std::vector<double>& x) const {
    std::vector<double> s = scores(x);
    double mx = *std::max_element(s.begin(), s.end());
    double total = 0.0;
    for (double& v : s) {
      v = std::exp(v - mx);
      total += v;
    }
    for (double& v : s) v /= total;
    return s;
  }

  // ties break toward the earlier class in the sorted class list
  int predict(const std::vector<double>& x) const {
    auto p = predict_proba(x);
    std::size_t best = 0;
    for (std::size_t c = 1; c < p.size(); ++c)
      if (p[c] > p[best]) best = c;
    return classes[best];
  }
};

namespace detail {

// Greedy regression tree on residuals with Newton leaf values. Split gain is
// the squared-error reduction of the residual fit; equal gains resolve to the
// lower feature index, then the earlier sorted position, so the choice
// depends only on feature order statistics.
class TreeBuilder {
 public:
  TreeBuilder(const std::vector<std::vector<double>>& X, const std::vector<double>& grad,
              const std::vector<double>& hess, int max_depth, double lambda)
      : X_(X), grad_(grad), hess_(hess), max_depth_(max_depth), lambda_(lambda) {}

  RegTree build() {
    RegTree tree;
    std::vector<std::size_t> all(X_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    grow(tree, all, 0);
    return tree;
  }

 private:
  int grow(RegTree& tree, const std::vector<std::size_t>& rows, int depth) {
    int self = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    double g = 0.0, h = 0.0;
    for (auto i : rows) {
      g += grad_[i];
      h += hess_[i];
    }
    tree.nodes[self].value = -g / (h + lambda_);

    if (depth >= max_depth_ || rows.size() < 2) return self;

    const std::size_t n_feat = X_.empty() ? 0 : X_[0].size();
    double best_gain = 1e-12;
    int best_feat = -1;
    std::size_t best_pos = 0;
    double best_thresh = 0.0;

    double res_sum = 0.0;
    for (auto i : rows) res_sum -= grad_[i];  // residual = -gradient
    const double n_total = static_cast<double>(rows.size());
    const double parent_score = res_sum * res_sum / n_total;

    std::vector<std::size_t> sorted(rows);
    for (std::size_t f = 0; f < n_feat; ++f) {
      std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
        if (X_[a][f] != X_[b][f]) return X_[a][f] < X_[b][f];
        return a < b;
      });
      double left_sum = 0.0;
      for (std::size_t pos = 0; pos + 1 < sorted.size(); ++pos) {
        left_sum -= grad_[sorted[pos]];
        if (X_[sorted[pos]][f] == X_[sorted[pos + 1]][f]) continue;
        double n_left = static_cast<double>(pos + 1);
        double n_right = n_total - n_left;
        double right_sum = res_sum - left_sum;
        double gain =
            left_sum * left_sum / n_left + right_sum * right_sum / n_right - parent_score;
        if (gain > best_gain) {
          best_gain = gain;
          best_feat = static_cast<int>(f);
          best_pos = pos;
          best_thresh = X_[sorted[pos]][f];
        }
      }
    }

    if (best_feat < 0) return self;

    std::vector<std::size_t> left_rows, right_rows;
    for (auto i : rows) {
      if (X_[i][best_feat] <= best_thresh) left_rows.push_back(i);
      else right_rows.push_back(i);
    }
    tree.nodes[self].feature = best_feat;
    tree.nodes[self].threshold = best_thresh;
    tree.nodes[self].left = grow(tree, left_rows, depth + 1);
    tree.nodes[self].right = grow(tree, right_rows, depth + 1);
    return self;
  }

  const std::vector<std::vector<double>>& X_;
  const std::vector<double>& grad_;
  const std::vector<double>& hess_;
  int max_depth_;
  double lambda_;
};

inline double multiclass_logloss(const std::vector<std::vector<double>>& scores,
                                 const std::vector<int>& y) {
  double loss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double mx = *std::max_element(scores[i].begin(), scores[i].end());
    double total = 0.0;
    for (double s : scores[i]) total += std::exp(s - mx);
    loss += std::log(total) - (scores[i][y[i]] - mx);
  }
  return loss / static_cast<double>(y.size());
}

}  // namespace detail

// Multiclass softmax boosting: per iteration one regression tree per class on
// the negative gradient. An iteration that would raise the training log-loss
// has its leaf contributions halved until the loss stops rising, down to
// dropping the iteration entirely, so the recorded curve never increases.
inline BoostModel fit_boost(const std::vector<std::vector<double>>& X,
                            const std::vector<int>& labels, const BoostConfig& cfg) {
  if (X.size() != labels.size()) throw DataError("boost: features/labels length mismatch");
  if (X.empty()) throw DegenerateDataError("boost: empty training set");
  for (const auto& row : X)
    for (double v : row)
      if (!std::isfinite(v)) throw NonFiniteLossError("boost: non-finite feature value");

  BoostModel model;
  model.classes = labels;
  std::sort(model.classes.begin(), model.classes.end());
  model.classes.erase(std::unique(model.classes.begin(), model.classes.end()),
                      model.classes.end());
  if (model.classes.size() < 2)
    throw DegenerateDataError("boost: all labels identical");
  model.n_features = X[0].size();

  const std::size_t n = X.size();
  const std::size_t C = model.classes.size();
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = std::lower_bound(model.classes.begin(), model.classes.end(), labels[i]);
    y[i] = static_cast<int>(it - model.classes.begin());
  }

  model.base_score.assign(C, 0.0);
  for (auto cls : y) model.base_score[cls] += 1.0;
  for (double& b : model.base_score) b = std::log(b / static_cast<double>(n) + 1e-12);

  std::vector<std::vector<double>> scores(n, model.base_score);
  double loss = detail::multiclass_logloss(scores, y);
  if (!std::isfinite(loss)) throw NonFiniteLossError("boost: non-finite initial loss");
  model.loss_curve.push_back(loss);

  std::vector<std::vector<double>> probs(n, std::vector<double>(C, 0.0));
  for (int iter = 0; iter < cfg.iterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      double mx = *std::max_element(scores[i].begin(), scores[i].end());
      double total = 0.0;
      for (std::size_t c = 0; c < C; ++c) {
        probs[i][c] = std::exp(scores[i][c] - mx);
        total += probs[i][c];
      }
      for (std::size_t c = 0; c < C; ++c) probs[i][c] /= total;
    }

    std::vector<RegTree> round(C);
    std::vector<std::vector<double>> round_pred(C, std::vector<double>(n, 0.0));
    std::vector<double> grad(n), hess(n);
    for (std::size_t c = 0; c < C; ++c) {
      for (std::size_t i = 0; i < n; ++i) {
        grad[i] = probs[i][c] - (y[i] == static_cast<int>(c) ? 1.0 : 0.0);
        hess[i] = std::max(probs[i][c] * (1.0 - probs[i][c]), 1e-12);
      }
      detail::TreeBuilder builder(X, grad, hess, cfg.tree_depth, cfg.leaf_lambda);
      round[c] = builder.build();
      for (auto& node : round[c].nodes) node.value *= cfg.learning_rate;
      for (std::size_t i = 0; i < n; ++i) round_pred[c][i] = round[c].predict(X[i]);
    }

    double scale = 1.0;
    std::vector<std::vector<double>> trial(n, std::vector<double>(C));
    double trial_loss = std::numeric_limits<double>::infinity();
    while (scale > 1e-6) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < C; ++c)
          trial[i][c] = scores[i][c] + scale * round_pred[c][i];
      trial_loss = detail::multiclass_logloss(trial, y);
      if (std::isfinite(trial_loss) && trial_loss <= loss) break;
      scale *= 0.5;
    }
    if (!(scale > 1e-6)) {
      model.loss_curve.push_back(loss);  // iteration dropped
      continue;
    }
    if (scale != 1.0) {
      for (std::size_t c = 0; c < C; ++c)
        for (auto& node : round[c].nodes) node.value *= scale;
    }
    scores.swap(trial);
    loss = trial_loss;
    model.loss_curve.push_back(loss);
    model.trees.push_back(std::move(round));
  }
  return model;
}

}  // namespace sentitree
