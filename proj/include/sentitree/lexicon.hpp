#pragma once

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "sentitree/csv.hpp"
#include "sentitree/errors.hpp"
#include "sentitree/polarity.hpp"
#include "sentitree/porter.hpp"
#include "sentitree/preprocess.hpp"

namespace sentitree {

struct LexiconEntry {
  std::string term;
  double pos_score = 0.0;
  double neg_score = 0.0;
};

struct BaseLabel {
  std::string message_id;
  double score = 0.0;  // in [-1, 1]
  Polarity label = Polarity::Neutral;
};

// SentiWordNet-style lexicon. Entries are keyed by surface term and, in a
// parallel table, by stemmed term; scores for a term seen in several synset
// rows are the arithmetic mean over those rows. Lookup is total: unknown
// terms score (0, 0).
class SentimentLexicon {
 public:
  void add_observation(const std::string& term, double pos, double neg) {
    auto& s = surface_[term];
    s.pos += pos;
    s.neg += neg;
    s.n += 1;
    if (term.find('_') == std::string::npos) {
      auto& t = stemmed_[porter_stem(term)];
      t.pos += pos;
      t.neg += neg;
      t.n += 1;
    }
  }

  // (pos, neg); surface match first, then the stem table
  LexiconEntry lookup(const std::string& term) const {
    if (auto it = surface_.find(term); it != surface_.end())
      return {term, it->second.pos / it->second.n, it->second.neg / it->second.n};
    if (auto it = stemmed_.find(porter_stem(term)); it != stemmed_.end())
      return {term, it->second.pos / it->second.n, it->second.neg / it->second.n};
    return {term, 0.0, 0.0};
  }

  // pos - neg in [-1, 1]
  double polarity(const std::string& term) const {
    auto e = lookup(term);
    return e.pos_score - e.neg_score;
  }

  std::size_t size() const { return surface_.size(); }

 private:
  struct Acc {
    double pos = 0.0, neg = 0.0;
    int n = 0;
  };
  std::unordered_map<std::string, Acc> surface_;
  std::unordered_map<std::string, Acc> stemmed_;
};

// SentiWordNet 3.0 text format: POS \t ID \t PosScore \t NegScore \t
// SynsetTerms \t Gloss, '#' comment lines. SynsetTerms holds space-separated
// "term#sense" entries.
inline SentimentLexicon load_sentiwordnet(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon file: " + path);
  SentimentLexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    std::vector<std::string> fields;
    std::size_t start = 0;
    while (fields.size() < 5) {
      auto tab = line.find('\t', start);
      if (tab == std::string::npos) break;
      fields.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    fields.push_back(line.substr(start));  // gloss, may contain anything
    if (fields.size() != 6)
      throw MalformedLineError(path, line_no, "expected 6 tab-separated fields");

    char* end = nullptr;
    double pos = std::strtod(fields[2].c_str(), &end);
    if (end == fields[2].c_str()) throw MalformedLineError(path, line_no, "bad PosScore");
    double neg = std::strtod(fields[3].c_str(), &end);
    if (end == fields[3].c_str()) throw MalformedLineError(path, line_no, "bad NegScore");
    if (pos < 0.0 || pos > 1.0 || neg < 0.0 || neg > 1.0)
      throw MalformedLineError(path, line_no, "score outside [0,1]");

    // SynsetTerms: "able#1 capable#3 ..."
    const std::string& terms = fields[4];
    std::size_t i = 0;
    while (i < terms.size()) {
      while (i < terms.size() && terms[i] == ' ') ++i;
      std::size_t j = i;
      while (j < terms.size() && terms[j] != ' ') ++j;
      if (j > i) {
        std::string t = terms.substr(i, j - i);
        auto hash = t.rfind('#');
        if (hash != std::string::npos) t.resize(hash);
        for (auto& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (!t.empty()) lex.add_observation(t, pos, neg);
      }
      i = j;
    }
  }
  return lex;
}

// Per-token polarity with negation flip and emoticon pseudo-scores; the
// message score is the mean of the nonzero contributions (0 if none), and the
// label is a step function with thresholds +-tau.
inline BaseLabel score_message(const TokenSeq& tokens, const SentimentLexicon& lex, double tau) {
  auto raw = [&](const std::string& t) -> double {
    if (t == kEmoPos) return 0.5;
    if (t == kEmoNeg) return -0.5;
    return lex.polarity(t);
  };

  double sum = 0.0;
  int nonzero = 0;
  for (const auto& t : tokens.tokens) {
    double p;
    if (t.rfind(kNegPrefix, 0) == 0) {
      p = -raw(t.substr(std::strlen(kNegPrefix)));
    } else {
      p = raw(t);
    }
    if (p != 0.0) {
      sum += p;
      ++nonzero;
    }
  }

  BaseLabel out;
  out.message_id = tokens.source_id;
  out.score = nonzero ? sum / nonzero : 0.0;
  if (out.score > tau) out.label = Polarity::Positive;
  else if (out.score < -tau) out.label = Polarity::Negative;
  else out.label = Polarity::Neutral;
  return out;
}

// Pluggable source of base labels: the lexicon scorer is the default, an
// external-predictions file the alternative.
class BaseLabeler {
 public:
  virtual ~BaseLabeler() = default;
  virtual BaseLabel label(const TokenSeq& tokens) const = 0;
};

class LexiconLabeler : public BaseLabeler {
 public:
  LexiconLabeler(const SentimentLexicon* lex, double tau) : lex_(lex), tau_(tau) {}
  BaseLabel label(const TokenSeq& tokens) const override {
    return score_message(tokens, *lex_, tau_);
  }

 private:
  const SentimentLexicon* lex_;
  double tau_;
};

// external_predictions.csv: message_id,score,label
inline std::map<std::string, BaseLabel> load_external_predictions(const std::string& path) {
  CsvTable t = read_csv(path);
  int c_id = find_column(t.header, "message_id");
  int c_score = find_column(t.header, "score");
  int c_label = find_column(t.header, "label");
  if (c_id < 0) throw MissingColumnError(path, "message_id");
  if (c_score < 0) throw MissingColumnError(path, "score");
  if (c_label < 0) throw MissingColumnError(path, "label");
  std::map<std::string, BaseLabel> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    std::size_t line = t.row_lines[i];
    BaseLabel b;
    b.message_id = row[c_id];
    char* end = nullptr;
    b.score = std::strtod(row[c_score].c_str(), &end);
    if (end == row[c_score].c_str())
      throw MalformedLineError(path, line, "bad score '" + row[c_score] + "'");
    auto p = parse_polarity(row[c_label]);
    if (!p) throw MalformedLineError(path, line, "unknown label '" + row[c_label] + "'");
    b.label = *p;
    if (!out.emplace(b.message_id, b).second)
      throw DuplicateIdError(path, b.message_id, line);
  }
  return out;
}

class ExternalLabeler : public BaseLabeler {
 public:
  explicit ExternalLabeler(std::map<std::string, BaseLabel> predictions)
      : predictions_(std::move(predictions)) {}
  BaseLabel label(const TokenSeq& tokens) const override {
    auto it = predictions_.find(tokens.source_id);
    if (it == predictions_.end()) throw MissingBaseLabelError(tokens.source_id);
    return it->second;
  }

 private:
  std::map<std::string, BaseLabel> predictions_;
};

}  // namespace sentitree
