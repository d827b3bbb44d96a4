#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "sentitree/corpus.hpp"
#include "sentitree/errors.hpp"
#include "sentitree/polarity.hpp"
#include "sentitree/rng.hpp"

namespace sentitree {

struct SynthConfig {
  int n_trees = 190;
  double sarcasm_rate = 0.3;   // a stance message whose wording is drawn at random
  double neutral_frac = 0.1;   // messages with objective wording and Neutral gold
  int max_tree_nodes = 60;
  int famous_per_topic = 3;
  int follower_pool = 80;      // per community
  int followers_per_user = 25;
  std::uint64_t seed = 42;
};

struct SynthResult {
  Corpus corpus;
  std::vector<std::pair<std::string, double>> lexicon;  // word → signed strength
  std::map<std::string, bool> sarcastic;                // message id → flag
  int n_messages = 0;
};

namespace detail {

// Alphabetic code words: two distinct letters from a consonant alphabet that
// stemming leaves alone, so ids survive the text pipeline unambiguously.
inline std::string synth_word(const std::string& prefix, int i) {
  static const char alphabet[] = "bcdfghjklmnpqrtvwxz";  // 19 letters, no s
  int a = i / 18, b = i % 18;
  if (b >= a) b += 1;
  std::string w = prefix;
  w += alphabet[a % 19];
  w += alphabet[b % 19];
  return w;
}

}  // namespace detail

// Two communities with opposite stances. Community 0 posts positive-stance
// trees, community 1 negative-stance trees. Honest wording matches the
// stance, sarcastic wording is random-signed, so lexicon scoring is at chance
// on sarcastic messages while tree context and the community channels
// (follower overlap, followed influencers, location) still carry the truth.
inline SynthResult generate_synthetic(const SynthConfig& cfg) {
  Rng rng = Rng::substream(cfg.seed, "synth");
  SynthResult out;

  const int n_pos = 30, n_neg = 30, n_obj = 40, n_topic = 40;
  std::vector<std::string> pos_words, neg_words, obj_words;
  std::vector<std::vector<std::string>> topic_words(2);
  for (int i = 0; i < n_pos; ++i) pos_words.push_back(detail::synth_word("zela", i));
  for (int i = 0; i < n_neg; ++i) neg_words.push_back(detail::synth_word("mork", i));
  for (int i = 0; i < n_obj; ++i) obj_words.push_back(detail::synth_word("stano", i));
  for (int i = 0; i < n_topic; ++i) topic_words[0].push_back(detail::synth_word("quari", i));
  for (int i = 0; i < n_topic; ++i) topic_words[1].push_back(detail::synth_word("velto", i));

  for (const auto& w : pos_words) out.lexicon.emplace_back(w, 0.75);
  for (const auto& w : neg_words) out.lexicon.emplace_back(w, -0.75);

  // influencers: per community topic, disjoint wording
  std::vector<std::string> famous_handles[2];
  for (int t = 0; t < 2; ++t) {
    for (int j = 0; j < cfg.famous_per_topic; ++j) {
      FamousMember f;
      f.handle = "fam_t" + std::to_string(t) + "_" + std::to_string(j);
      f.name = std::string("Influencer ") + (t == 0 ? "Q" : "V") + std::to_string(j);
      f.followers = 1000000 + static_cast<std::uint64_t>(j) * 137 + t * 51;
      std::string text;
      for (int w = 0; w < 50; ++w) {
        if (w) text += ' ';
        text += topic_words[t][rng.index(topic_words[t].size())];
      }
      f.activity = text;
      famous_handles[t].push_back(f.handle);
      out.corpus.famous.push_back(std::move(f));
    }
  }

  auto pick = [&](const std::vector<std::string>& v) { return v[rng.index(v.size())]; };

  auto make_text = [&](Polarity stance, bool sarcastic, bool neutral) {
    std::string text;
    auto add = [&](const std::string& w) {
      if (!text.empty()) text += ' ';
      text += w;
    };
    if (neutral) {
      int n = 3 + static_cast<int>(rng.below(3));
      for (int i = 0; i < n; ++i) add(pick(obj_words));
      return text;
    }
    for (int i = 0; i < 3; ++i) {
      bool positive = sarcastic ? rng.bernoulli(0.5) : stance == Polarity::Positive;
      add(positive ? pick(pos_words) : pick(neg_words));
    }
    int n = 1 + static_cast<int>(rng.below(2));
    for (int i = 0; i < n; ++i) add(pick(obj_words));
    return text;
  };

  for (int t = 0; t < cfg.n_trees; ++t) {
    int community = t % 2;
    Polarity stance = community == 0 ? Polarity::Positive : Polarity::Negative;

    // spine guarantees the target height, other nodes branch subcritically
    double u = rng.uniform01();
    int height = u < 0.15 ? 3 : u < 0.55 ? 4 : u < 0.90 ? 5 : 6;
    std::vector<int> parent{-1}, depth{0};
    for (int d = 1; d <= height; ++d) {
      parent.push_back(static_cast<int>(parent.size()) - 1);
      depth.push_back(d);
    }
    for (std::size_t i = 0; i < parent.size() && parent.size() < static_cast<std::size_t>(cfg.max_tree_nodes); ++i) {
      if (depth[i] >= height) continue;
      double v = rng.uniform01();
      int extra = v < 0.50 ? 0 : v < 0.85 ? 1 : 2;
      for (int e = 0; e < extra && parent.size() < static_cast<std::size_t>(cfg.max_tree_nodes); ++e) {
        parent.push_back(static_cast<int>(i));
        depth.push_back(depth[i] + 1);
      }
    }

    for (std::size_t i = 0; i < parent.size(); ++i) {
      std::string id = "m" + std::to_string(t) + "_" + std::to_string(i);
      bool neutral = rng.bernoulli(cfg.neutral_frac);
      bool sarcastic = !neutral && rng.bernoulli(cfg.sarcasm_rate);

      Message m;
      m.id = id;
      m.text = make_text(stance, sarcastic, neutral);
      if (parent[i] >= 0)
        m.retweet_of = "m" + std::to_string(t) + "_" + std::to_string(parent[i]);
      m.gold_label = neutral ? Polarity::Neutral : stance;
      out.corpus.messages.push_back(std::move(m));
      out.sarcastic[id] = sarcastic;

      UserProfile p;
      p.id = id;
      p.display_name = "user " + id;
      std::string bio;
      for (int w = 0; w < 4; ++w) {
        if (w) bio += ' ';
        bio += pick(topic_words[community]);
      }
      p.bio = bio;
      bool loc_flip = rng.bernoulli(0.1);
      p.location = (community == 0) != loc_flip ? "north" : "south";

      int own = community, other = 1 - community;
      std::size_t skip = rng.index(famous_handles[own].size());
      for (std::size_t j = 0; j < famous_handles[own].size(); ++j)
        if (j != skip) p.follows.insert(famous_handles[own][j]);
      if (rng.bernoulli(0.1)) p.follows.insert(famous_handles[other][rng.index(famous_handles[other].size())]);

      std::vector<int> pool(cfg.follower_pool);
      for (int k = 0; k < cfg.follower_pool; ++k) pool[k] = k;
      rng.shuffle(pool);
      for (int k = 0; k < cfg.followers_per_user && k < cfg.follower_pool; ++k)
        p.followers.insert("pool_c" + std::to_string(own) + "_" + std::to_string(pool[k]));
      if (rng.bernoulli(0.5))
        p.followers.insert("pool_c" + std::to_string(other) + "_" +
                           std::to_string(rng.index(static_cast<std::size_t>(cfg.follower_pool))));

      out.corpus.profiles.push_back(std::move(p));
    }
  }
  out.n_messages = static_cast<int>(out.corpus.messages.size());
  return out;
}

// SentiWordNet-style rows for the synthetic polarity words
inline void write_synth_lexicon(const std::string& path,
                                const std::vector<std::pair<std::string, double>>& lexicon) {
  std::ofstream o(path);
  if (!o) throw DataError("cannot write " + path);
  o << "# synthetic sentiment lexicon\n";
  o << "# POS\tID\tPosScore\tNegScore\tSynsetTerms\tGloss\n";
  char id[16];
  for (std::size_t i = 0; i < lexicon.size(); ++i) {
    const auto& [word, strength] = lexicon[i];
    std::snprintf(id, sizeof id, "%08zu", i + 1);
    double pos = strength > 0 ? strength : 0.0;
    double neg = strength < 0 ? -strength : 0.0;
    o << "a\t" << id << '\t' << pos << '\t' << neg << '\t' << word << "#1\t"
      << "marker term " << word << '\n';
  }
}

inline void write_synth_corpus(const std::string& dir, const SynthResult& synth) {
  write_messages(dir + "/messages.csv", synth.corpus.messages);
  write_profiles(dir + "/profiles.csv", synth.corpus.profiles);
  write_edges(dir + "/edges.csv", synth.corpus.profiles);
  write_famous(dir + "/famous.csv", synth.corpus.famous);
  write_synth_lexicon(dir + "/lexicon.txt", synth.lexicon);
}

}  // namespace sentitree
