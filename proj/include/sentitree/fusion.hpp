#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "sentitree/errors.hpp"
#include "sentitree/polarity.hpp"
#include "sentitree/rng.hpp"

namespace sentitree {

// One hidden ReLU layer into a 3-way softmax.
struct MLPModel {
  int in_dim = 0;
  int hidden = 16;
  static constexpr int kOut = 3;
  std::vector<double> w1;  // hidden × in, row-major
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // 3 × hidden, row-major
  std::vector<double> b2;  // 3
  std::uint64_t seed = 0;

  std::size_t param_count() const { return w1.size() + b1.size() + w2.size() + b2.size(); }

  double& param(std::size_t i) {
    if (i < w1.size()) return w1[i];
    i -= w1.size();
    if (i < b1.size()) return b1[i];
    i -= b1.size();
    if (i < w2.size()) return w2[i];
    i -= w2.size();
    return b2[i];
  }
};

inline MLPModel init_mlp(int in_dim, int hidden, std::uint64_t seed) {
  MLPModel m;
  m.in_dim = in_dim;
  m.hidden = hidden;
  m.seed = seed;
  m.w1.assign(static_cast<std::size_t>(hidden) * in_dim, 0.0);
  m.b1.assign(hidden, 0.0);
  m.w2.assign(static_cast<std::size_t>(MLPModel::kOut) * hidden, 0.0);
  m.b2.assign(MLPModel::kOut, 0.0);
  Rng rng = Rng::substream(seed, "init");
  double s1 = std::sqrt(2.0 / in_dim);
  for (double& w : m.w1) w = rng.normal() * s1;
  double s2 = std::sqrt(2.0 / hidden);
  for (double& w : m.w2) w = rng.normal() * s2;
  return m;
}

namespace detail {

struct ForwardState {
  std::vector<double> hidden_pre;   // before ReLU
  std::vector<double> hidden_act;   // after ReLU
  std::vector<double> probs;        // softmax output
};

inline ForwardState forward_full(const MLPModel& m, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != m.in_dim)
    throw WidthMismatchError(static_cast<std::size_t>(m.in_dim), x.size());
  ForwardState st;
  st.hidden_pre.resize(m.hidden);
  st.hidden_act.resize(m.hidden);
  for (int h = 0; h < m.hidden; ++h) {
    double acc = m.b1[h];
    const double* row = &m.w1[static_cast<std::size_t>(h) * m.in_dim];
    for (int i = 0; i < m.in_dim; ++i) acc += row[i] * x[i];
    st.hidden_pre[h] = acc;
    st.hidden_act[h] = acc > 0.0 ? acc : 0.0;
  }
  std::vector<double> out(MLPModel::kOut);
  for (int o = 0; o < MLPModel::kOut; ++o) {
    double acc = m.b2[o];
    const double* row = &m.w2[static_cast<std::size_t>(o) * m.hidden];
    for (int h = 0; h < m.hidden; ++h) acc += row[h] * st.hidden_act[h];
    out[o] = acc;
  }
  double mx = *std::max_element(out.begin(), out.end());
  double total = 0.0;
  for (double& v : out) {
    v = std::exp(v - mx);
    total += v;
  }
  for (double& v : out) v /= total;
  st.probs = std::move(out);
  return st;
}

struct Gradients {
  std::vector<double> w1, b1, w2, b2;

  void init(const MLPModel& m) {
    w1.assign(m.w1.size(), 0.0);
    b1.assign(m.b1.size(), 0.0);
    w2.assign(m.w2.size(), 0.0);
    b2.assign(m.b2.size(), 0.0);
  }
  double& param(std::size_t i) {
    if (i < w1.size()) return w1[i];
    i -= w1.size();
    if (i < b1.size()) return b1[i];
    i -= b1.size();
    if (i < w2.size()) return w2[i];
    i -= w2.size();
    return b2[i];
  }
};

// cross-entropy gradient for one example, accumulated into g
inline double backward(const MLPModel& m, const std::vector<double>& x, int y, Gradients& g) {
  ForwardState st = forward_full(m, x);
  double loss = -std::log(std::max(st.probs[y], 1e-300));

  std::vector<double> dout(MLPModel::kOut);
  for (int o = 0; o < MLPModel::kOut; ++o) dout[o] = st.probs[o] - (o == y ? 1.0 : 0.0);

  std::vector<double> dhidden(m.hidden, 0.0);
  for (int o = 0; o < MLPModel::kOut; ++o) {
    g.b2[o] += dout[o];
    double* grow = &g.w2[static_cast<std::size_t>(o) * m.hidden];
    const double* wrow = &m.w2[static_cast<std::size_t>(o) * m.hidden];
    for (int h = 0; h < m.hidden; ++h) {
      grow[h] += dout[o] * st.hidden_act[h];
      dhidden[h] += dout[o] * wrow[h];
    }
  }
  for (int h = 0; h < m.hidden; ++h) {
    if (st.hidden_pre[h] <= 0.0) continue;
    g.b1[h] += dhidden[h];
    double* grow = &g.w1[static_cast<std::size_t>(h) * m.in_dim];
    for (int i = 0; i < m.in_dim; ++i) grow[i] += dhidden[h] * x[i];
  }
  return loss;
}

}  // namespace detail

inline std::vector<double> forward(const MLPModel& m, const std::vector<double>& x) {
  return detail::forward_full(m, x).probs;
}

// argmax probability; exact ties take the earlier polarity in the fixed order
inline Polarity decide(const std::vector<double>& probs) {
  int best = 0;
  for (int c = 1; c < 3; ++c)
    if (probs[c] > probs[best]) best = c;
  return static_cast<Polarity>(best);
}

inline double mean_loss(const MLPModel& m, const std::vector<std::vector<double>>& X,
                        const std::vector<int>& y) {
  if (X.empty()) throw EmptyEvalError();
  double total = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    auto p = forward(m, X[i]);
    total += -std::log(std::max(p[y[i]], 1e-300));
  }
  return total / static_cast<double>(X.size());
}

struct TrainOptions {
  int epochs = 200;
  double learning_rate = 0.05;
  int batch_size = 32;
  int hidden = 16;
  int patience = 20;  // early stop on validation loss; <= 0 disables
  std::uint64_t seed = 0;
};

struct TrainedMLP {
  MLPModel model;
  std::vector<double> train_loss;  // index 0 = loss before any update
  std::vector<double> val_loss;
  int best_epoch = 0;
};

// Mini-batch gradient descent on cross-entropy with a seeded shuffle per
// epoch. With a validation set, training keeps the best-validation-loss
// parameters and stops after `patience` epochs without improvement.
inline TrainedMLP train_mlp(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                            const std::vector<std::vector<double>>& val_X,
                            const std::vector<int>& val_y, const TrainOptions& opt) {
  if (X.empty()) throw EmptyEvalError();
  TrainedMLP out;
  out.model = init_mlp(static_cast<int>(X[0].size()), opt.hidden, opt.seed);
  out.train_loss.push_back(mean_loss(out.model, X, y));

  const bool use_val = !val_X.empty() && opt.patience > 0;
  MLPModel best = out.model;
  double best_val = use_val ? mean_loss(out.model, val_X, val_y) : 0.0;
  if (use_val) out.val_loss.push_back(best_val);
  int since_best = 0;

  Rng shuffle_rng = Rng::substream(opt.seed, "shuffle");
  std::vector<std::size_t> order(X.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  detail::Gradients g;
  for (int epoch = 1; epoch <= opt.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t done = 0;
    while (done < order.size()) {
      std::size_t bs = std::min<std::size_t>(opt.batch_size, order.size() - done);
      g.init(out.model);
      for (std::size_t b = 0; b < bs; ++b)
        epoch_loss += detail::backward(out.model, X[order[done + b]], y[order[done + b]], g);
      double scale = opt.learning_rate / static_cast<double>(bs);
      for (std::size_t i = 0; i < out.model.param_count(); ++i)
        out.model.param(i) -= scale * g.param(i);
      done += bs;
    }
    epoch_loss /= static_cast<double>(X.size());
    if (!std::isfinite(epoch_loss)) throw NonFiniteLossError("mlp training");
    out.train_loss.push_back(epoch_loss);

    if (use_val) {
      double vl = mean_loss(out.model, val_X, val_y);
      out.val_loss.push_back(vl);
      if (vl < best_val) {
        best_val = vl;
        best = out.model;
        out.best_epoch = epoch;
        since_best = 0;
      } else if (++since_best >= opt.patience) {
        break;
      }
    } else {
      out.best_epoch = epoch;
    }
  }
  if (use_val) out.model = std::move(best);
  return out;
}

inline TrainedMLP train_mlp(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                            const TrainOptions& opt) {
  return train_mlp(X, y, {}, {}, opt);
}

// Analytic gradient against central finite differences; returns the largest
// relative error over all parameters.
inline double grad_check(MLPModel model, const std::vector<double>& x, int y) {
  detail::Gradients g;
  g.init(model);
  detail::backward(model, x, y, g);

  const double h = 1e-5;
  double worst = 0.0;
  for (std::size_t i = 0; i < model.param_count(); ++i) {
    double saved = model.param(i);
    model.param(i) = saved + h;
    auto pp = forward(model, x);
    double lp = -std::log(std::max(pp[y], 1e-300));
    model.param(i) = saved - h;
    auto pm = forward(model, x);
    double lm = -std::log(std::max(pm[y], 1e-300));
    model.param(i) = saved;
    double numeric = (lp - lm) / (2.0 * h);
    double analytic = g.param(i);
    double denom = std::max(std::abs(analytic) + std::abs(numeric), 1e-8);
    worst = std::max(worst, std::abs(analytic - numeric) / denom);
  }
  return worst;
}

}  // namespace sentitree
