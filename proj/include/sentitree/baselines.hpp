#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "sentitree/errors.hpp"
#include "sentitree/preprocess.hpp"
#include "sentitree/rng.hpp"

namespace sentitree {

using SparseVec = std::vector<std::pair<int, double>>;  // (feature, weight), sorted

// Unigrams and bigrams, sublinear tf, smoothed idf, L2-normalized rows.
// A vocabulary cap keeps the highest-df terms (ties lexicographic).
class TfidfVectorizer {
 public:
  explicit TfidfVectorizer(std::size_t max_features = 20000) : max_features_(max_features) {}

  void fit(const std::vector<TokenSeq>& docs) {
    std::unordered_map<std::string, long long> df;
    std::vector<std::string> scratch;
    for (const auto& doc : docs) {
      scratch.clear();
      collect_ngrams(doc, scratch);
      std::sort(scratch.begin(), scratch.end());
      scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
      for (const auto& g : scratch) df[g] += 1;
    }
    if (df.empty()) throw EmptyVocabularyError();

    std::vector<std::pair<std::string, long long>> terms(df.begin(), df.end());
    std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    if (terms.size() > max_features_) terms.resize(max_features_);
    std::sort(terms.begin(), terms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    n_docs_ = static_cast<long long>(docs.size());
    vocab_.clear();
    idf_.clear();
    for (std::size_t i = 0; i < terms.size(); ++i) {
      vocab_.emplace(terms[i].first, static_cast<int>(i));
      idf_.push_back(std::log((1.0 + n_docs_) / (1.0 + terms[i].second)) + 1.0);
    }
  }

  SparseVec transform(const TokenSeq& doc) const {
    std::map<int, long long> counts;
    std::vector<std::string> grams;
    collect_ngrams(doc, grams);
    for (const auto& g : grams) {
      auto it = vocab_.find(g);
      if (it != vocab_.end()) counts[it->second] += 1;
    }
    SparseVec out;
    out.reserve(counts.size());
    double norm = 0.0;
    for (const auto& [idx, c] : counts) {
      double w = (1.0 + std::log(static_cast<double>(c))) * idf_[idx];
      out.emplace_back(idx, w);
      norm += w * w;
    }
    if (norm > 0.0) {
      norm = std::sqrt(norm);
      for (auto& [idx, w] : out) w /= norm;
    }
    return out;
  }

  std::vector<SparseVec> fit_transform(const std::vector<TokenSeq>& docs) {
    fit(docs);
    std::vector<SparseVec> out;
    out.reserve(docs.size());
    for (const auto& d : docs) out.push_back(transform(d));
    return out;
  }

  std::size_t vocab_size() const { return vocab_.size(); }

 private:
  static void collect_ngrams(const TokenSeq& doc, std::vector<std::string>& out) {
    const auto& t = doc.tokens;
    for (std::size_t i = 0; i < t.size(); ++i) {
      out.push_back(t[i]);
      if (i + 1 < t.size()) out.push_back(t[i] + " " + t[i + 1]);
    }
  }

  std::size_t max_features_;
  long long n_docs_ = 0;
  std::unordered_map<std::string, int> vocab_;
  std::vector<double> idf_;
};

// Multinomial Naive Bayes over nonnegative weights with Laplace smoothing.
class MultinomialNB {
 public:
  explicit MultinomialNB(double alpha = 1.0) : alpha_(alpha) {}

  void fit(const std::vector<SparseVec>& X, const std::vector<int>& labels,
           std::size_t n_features) {
    classes_ = labels;
    std::sort(classes_.begin(), classes_.end());
    classes_.erase(std::unique(classes_.begin(), classes_.end()), classes_.end());
    if (classes_.size() < 2) throw DegenerateDataError("naive bayes: all labels identical");
    n_features_ = n_features;

    const std::size_t C = classes_.size();
    std::vector<double> class_count(C, 0.0);
    feature_sum_.assign(C, std::vector<double>(n_features, 0.0));
    for (std::size_t i = 0; i < X.size(); ++i) {
      std::size_t c = class_index(labels[i]);
      class_count[c] += 1.0;
      for (const auto& [idx, w] : X[i]) feature_sum_[c][idx] += w;
    }
    log_prior_.resize(C);
    log_prob_.assign(C, std::vector<double>(n_features, 0.0));
    for (std::size_t c = 0; c < C; ++c) {
      log_prior_[c] = std::log(class_count[c] / static_cast<double>(X.size()));
      double total = 0.0;
      for (double v : feature_sum_[c]) total += v;
      double denom = std::log(total + alpha_ * static_cast<double>(n_features));
      for (std::size_t f = 0; f < n_features; ++f)
        log_prob_[c][f] = std::log(feature_sum_[c][f] + alpha_) - denom;
    }
  }

  int predict(const SparseVec& x) const {
    std::size_t best = 0;
    double best_score = score(x, 0);
    for (std::size_t c = 1; c < classes_.size(); ++c) {
      double s = score(x, c);
      if (s > best_score) {
        best_score = s;
        best = c;
      }
    }
    return classes_[best];
  }

 private:
  double score(const SparseVec& x, std::size_t c) const {
    double s = log_prior_[c];
    for (const auto& [idx, w] : x) s += w * log_prob_[c][idx];
    return s;
  }
  std::size_t class_index(int label) const {
    return std::lower_bound(classes_.begin(), classes_.end(), label) - classes_.begin();
  }

  double alpha_;
  std::size_t n_features_ = 0;
  std::vector<int> classes_;
  std::vector<std::vector<double>> feature_sum_;
  std::vector<double> log_prior_;
  std::vector<std::vector<double>> log_prob_;
};

struct SvmConfig {
  int epochs = 30;
  double lambda = 1e-4;
  std::uint64_t seed = 0;
};

// One-vs-rest linear SVM trained with the Pegasos subgradient schedule on
// hinge loss; the bias stays unregularized.
class LinearSVM {
 public:
  explicit LinearSVM(SvmConfig cfg = {}) : cfg_(cfg) {}

  void fit(const std::vector<SparseVec>& X, const std::vector<int>& labels,
           std::size_t n_features) {
    classes_ = labels;
    std::sort(classes_.begin(), classes_.end());
    classes_.erase(std::unique(classes_.begin(), classes_.end()), classes_.end());
    if (classes_.size() < 2) throw DegenerateDataError("svm: all labels identical");

    w_.assign(classes_.size(), std::vector<double>(n_features, 0.0));
    bias_.assign(classes_.size(), 0.0);
    Rng rng = Rng::substream(cfg_.seed, "svm");
    std::vector<std::size_t> order(X.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (std::size_t c = 0; c < classes_.size(); ++c) {
      auto& w = w_[c];
      double& b = bias_[c];
      long long t = 0;
      double scale = 1.0;  // w is stored as scale * w_base
      for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
        rng.shuffle(order);
        for (auto i : order) {
          ++t;
          double eta = 1.0 / (cfg_.lambda * static_cast<double>(t));
          double y = labels[i] == classes_[c] ? 1.0 : -1.0;
          double margin = 0.0;
          for (const auto& [idx, v] : X[i]) margin += w[idx] * v;
          margin = y * (scale * margin + b);
          scale *= 1.0 - eta * cfg_.lambda;
          if (scale < 1e-9) {  // fold the decay in before it underflows
            for (double& x : w) x *= scale;
            scale = 1.0;
          }
          if (margin < 1.0) {
            for (const auto& [idx, v] : X[i]) w[idx] += eta * y * v / scale;
            b += eta * y;
          }
        }
      }
      for (double& x : w) x *= scale;
    }
  }

  int predict(const SparseVec& x) const {
    std::size_t best = 0;
    double best_score = score(x, 0);
    for (std::size_t c = 1; c < classes_.size(); ++c) {
      double s = score(x, c);
      if (s > best_score) {
        best_score = s;
        best = c;
      }
    }
    return classes_[best];
  }

  double score(const SparseVec& x, std::size_t c) const {
    double s = bias_[c];
    for (const auto& [idx, v] : x) s += w_[c][idx] * v;
    return s;
  }

 private:
  SvmConfig cfg_;
  std::vector<int> classes_;
  std::vector<std::vector<double>> w_;
  std::vector<double> bias_;
};

inline std::vector<double> sparse_to_dense(const SparseVec& x, std::size_t width) {
  std::vector<double> out(width, 0.0);
  for (const auto& [idx, v] : x) out[idx] = v;
  return out;
}

}  // namespace sentitree
