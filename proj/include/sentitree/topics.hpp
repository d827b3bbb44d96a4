#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "sentitree/corpus.hpp"
#include "sentitree/errors.hpp"
#include "sentitree/preprocess.hpp"
#include "sentitree/rng.hpp"

namespace sentitree {

struct TopicModel {
  int K = 1;
  double alpha = 50.0;
  double beta = 0.01;
  std::uint64_t seed = 0;
  std::vector<std::string> vocab;                 // index → term
  std::unordered_map<std::string, int> term_ids;  // term → index
  std::vector<std::vector<double>> phi;           // K × V, rows sum to 1

  int term_id(const std::string& t) const {
    auto it = term_ids.find(t);
    return it == term_ids.end() ? -1 : it->second;
  }
};

struct LdaFit {
  TopicModel model;
  std::vector<std::vector<int>> assignments;  // final topic per token per doc
  std::vector<std::vector<double>> theta;     // doc-topic mixtures from final counts
};

// Collapsed Gibbs sampling. Vocabulary order is first appearance, the chain
// is a single stream off the given seed, phi comes from the final-state
// counts with beta smoothing.
inline LdaFit fit_lda(const std::vector<TokenSeq>& docs, int K, double alpha, double beta,
                      int iters, std::uint64_t seed) {
  TopicModel model;
  model.K = K;
  model.alpha = alpha;
  model.beta = beta;
  model.seed = seed;

  std::vector<std::vector<int>> word_ids(docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& t : docs[d].tokens) {
      auto [it, fresh] = model.term_ids.try_emplace(t, static_cast<int>(model.vocab.size()));
      if (fresh) model.vocab.push_back(t);
      word_ids[d].push_back(it->second);
    }
  }
  const int V = static_cast<int>(model.vocab.size());
  if (V == 0) throw EmptyVocabularyError();

  std::vector<std::vector<long long>> n_kw(K, std::vector<long long>(V, 0));
  std::vector<long long> n_k(K, 0);
  std::vector<std::vector<long long>> n_dk(docs.size(), std::vector<long long>(K, 0));
  std::vector<std::vector<int>> z(docs.size());

  Rng rng(seed);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    z[d].resize(word_ids[d].size());
    for (std::size_t i = 0; i < word_ids[d].size(); ++i) {
      int t = static_cast<int>(rng.below(static_cast<std::uint64_t>(K)));
      z[d][i] = t;
      n_kw[t][word_ids[d][i]] += 1;
      n_k[t] += 1;
      n_dk[d][t] += 1;
    }
  }

  std::vector<double> weights(K);
  for (int sweep = 0; sweep < iters; ++sweep) {
    for (std::size_t d = 0; d < docs.size(); ++d) {
      for (std::size_t i = 0; i < word_ids[d].size(); ++i) {
        int w = word_ids[d][i];
        int old = z[d][i];
        n_kw[old][w] -= 1;
        n_k[old] -= 1;
        n_dk[d][old] -= 1;
        for (int k = 0; k < K; ++k) {
          weights[k] = (n_kw[k][w] + beta) / (n_k[k] + V * beta) * (n_dk[d][k] + alpha);
        }
        int t = static_cast<int>(rng.discrete(weights));
        z[d][i] = t;
        n_kw[t][w] += 1;
        n_k[t] += 1;
        n_dk[d][t] += 1;
      }
    }
  }

  model.phi.assign(K, std::vector<double>(V, 0.0));
  for (int k = 0; k < K; ++k)
    for (int w = 0; w < V; ++w)
      model.phi[k][w] = (n_kw[k][w] + beta) / (n_k[k] + V * beta);

  LdaFit fit;
  fit.model = std::move(model);
  fit.assignments = std::move(z);
  fit.theta.assign(docs.size(), std::vector<double>(K, 0.0));
  for (std::size_t d = 0; d < docs.size(); ++d) {
    long long n_d = static_cast<long long>(word_ids[d].size());
    for (int k = 0; k < K; ++k)
      fit.theta[d][k] = (n_dk[d][k] + alpha) / (n_d + K * alpha);
  }
  return fit;
}

// Held-out inference with phi fixed: 50 Gibbs sweeps over the doc's tokens,
// out-of-vocabulary tokens skipped, alpha-smoothed counts at the end. A doc
// with no known tokens comes out uniform. The chain seed mixes the model seed
// with the doc id so results do not depend on call order.
inline std::vector<double> infer_theta(const TokenSeq& doc, const TopicModel& model) {
  constexpr int kSweeps = 50;
  const int K = model.K;
  std::vector<int> words;
  for (const auto& t : doc.tokens) {
    int id = model.term_id(t);
    if (id >= 0) words.push_back(id);
  }
  if (words.empty()) return std::vector<double>(K, 1.0 / K);

  Rng rng = Rng::substream(model.seed, "infer:" + doc.source_id);
  std::vector<int> z(words.size());
  std::vector<long long> n_k(K, 0);
  for (std::size_t i = 0; i < words.size(); ++i) {
    z[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(K)));
    n_k[z[i]] += 1;
  }
  std::vector<double> weights(K);
  for (int sweep = 0; sweep < kSweeps; ++sweep) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      n_k[z[i]] -= 1;
      for (int k = 0; k < K; ++k) weights[k] = model.phi[k][words[i]] * (n_k[k] + model.alpha);
      z[i] = static_cast<int>(rng.discrete(weights));
      n_k[z[i]] += 1;
    }
  }
  std::vector<double> theta(K);
  for (int k = 0; k < K; ++k)
    theta[k] = (n_k[k] + model.alpha) / (static_cast<double>(words.size()) + K * model.alpha);
  return theta;
}

struct InterestVector {
  std::string user_id;
  std::vector<double> theta;
};

// Mean of the followed influencers' topic mixtures, renormalized; a user who
// follows none gets the uniform vector.
inline InterestVector user_interest(const UserProfile& user,
                                    const std::map<std::string, std::vector<double>>& famous_thetas,
                                    int K) {
  InterestVector out;
  out.user_id = user.id;
  out.theta.assign(K, 0.0);
  int n = 0;
  for (const auto& handle : user.follows) {
    auto it = famous_thetas.find(handle);
    if (it == famous_thetas.end()) continue;
    for (int k = 0; k < K; ++k) out.theta[k] += it->second[k];
    ++n;
  }
  if (n == 0) {
    out.theta.assign(K, 1.0 / K);
    return out;
  }
  double total = 0.0;
  for (double v : out.theta) total += v;
  for (double& v : out.theta) v /= total;
  return out;
}

// top-m terms per topic, for the named-category report
inline std::vector<std::vector<std::string>> top_terms(const TopicModel& model, int m) {
  std::vector<std::vector<std::string>> out(model.K);
  for (int k = 0; k < model.K; ++k) {
    std::vector<int> idx(model.vocab.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return model.phi[k][a] > model.phi[k][b]; });
    for (int i = 0; i < m && i < static_cast<int>(idx.size()); ++i)
      out[k].push_back(model.vocab[idx[i]]);
  }
  return out;
}

}  // namespace sentitree
