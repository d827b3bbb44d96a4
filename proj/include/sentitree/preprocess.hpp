#pragma once

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sentitree/errors.hpp"
#include "sentitree/porter.hpp"

namespace sentitree {

// Marker tokens. EMO_* and NOT_-prefixed tokens are exempt from stopword
// removal and are never stemmed (the NOT_ base is stemmed, the prefix kept).
inline constexpr const char* kEmoPos = "EMO_POS";
inline constexpr const char* kEmoNeg = "EMO_NEG";
inline constexpr const char* kNegPrefix = "NOT_";
// Clause boundary recorded while stripping punctuation; consumed (dropped)
// by mark_negation.
inline constexpr const char* kBoundaryMarker = "\x02";

struct TokenSeq {
  std::vector<std::string> tokens;
  std::string source_id;
};

inline std::set<std::string> default_stopwords() {
  // ~120-word English list. Negation words (no/not/nor and the clitic bits
  // don/t/s) are intentionally absent so the negation channel stays visible.
  static const char* words[] = {
      "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "your",
      "yours", "yourself", "yourselves", "he", "him", "his", "himself", "she", "her",
      "hers", "herself", "it", "its", "itself", "they", "them", "their", "theirs",
      "themselves", "what", "which", "who", "whom", "this", "that", "these", "those",
      "am", "is", "are", "was", "were", "be", "been", "being", "have", "has", "had",
      "having", "do", "does", "did", "doing", "a", "an", "the", "and", "but", "if",
      "or", "because", "as", "until", "while", "of", "at", "by", "for", "with",
      "about", "against", "between", "into", "through", "during", "before", "after",
      "above", "below", "to", "from", "up", "down", "in", "out", "on", "off", "over",
      "under", "again", "further", "then", "once", "here", "there", "when", "where",
      "why", "how", "all", "any", "both", "each", "few", "more", "most", "other",
      "some", "such", "only", "own", "same", "so", "than", "too", "very", "can",
      "will", "just", "should", "now"};
  return {std::begin(words), std::end(words)};
}

// symbol -> maps-to-positive
inline std::vector<std::pair<std::string, bool>> default_emoji_map() {
  return {
      {":-)", true},  {":))", true},  {":)", true},   {":-D", true}, {":D", true},
      {"=)", true},   {";-)", true},  {";)", true},   {":]", true},  {"<3", true},
      {"^_^", true},  {"😀", true},   {"😁", true},   {"😂", true},  {"🙂", true},
      {"😊", true},   {"😍", true},   {"🤣", true},   {"❤️", true},  {"❤", true},
      {"👍", true},   {":-(", false}, {":((", false}, {":(", false}, {":'(", false},
      {":[", false},  {">:(", false}, {"😠", false},  {"😡", false}, {"😢", false},
      {"😭", false},  {"😞", false},  {"😔", false},  {"💔", false}, {"👎", false},
  };
}

struct PreprocessConfig {
  std::set<std::string> stopwords = default_stopwords();
  std::vector<std::pair<std::string, bool>> emoji_map = default_emoji_map();
  std::set<std::string> negators{"not", "no", "never"};
  std::set<std::string> boundary_words{"but", "however", "yet", "although", "though",
                                       "nevertheless"};
  bool stem = true;
  // Hooks for spell correction / abbreviation expansion; identity when unset.
  std::function<std::string(std::string)> spell_correct;
  std::function<std::string(std::string)> expand_abbreviations;
};

// stopwords.txt: one word per line, '#' starts a comment
inline std::set<std::string> load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open stopword file: " + path);
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::string word;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c)))
        word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (!word.empty()) out.insert(word);
  }
  return out;
}

// emoji_map.tsv: symbol TAB EMO_POS|EMO_NEG
inline std::vector<std::pair<std::string, bool>> load_emoji_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open emoji map: " + path);
  std::vector<std::pair<std::string, bool>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw MalformedLineError(path, line_no, "expected TAB separator");
    std::string symbol = line.substr(0, tab);
    std::string target = line.substr(tab + 1);
    while (!target.empty() && std::isspace(static_cast<unsigned char>(target.back())))
      target.pop_back();
    if (target == kEmoPos) out.emplace_back(symbol, true);
    else if (target == kEmoNeg) out.emplace_back(symbol, false);
    else throw MalformedLineError(path, line_no, "expected EMO_POS or EMO_NEG, got '" + target + "'");
  }
  return out;
}

// Negation marking: every token after a negator ("not", "no", "never", or an
// "n't" clitic) is prefixed NOT_ until the end of the sequence or the next
// clause boundary (a boundary word, or the punctuation marker recorded
// before punctuation stripping). Negators themselves stay unprefixed; the
// punctuation markers are consumed here.
inline std::vector<std::string> mark_negation(const std::vector<std::string>& tokens,
                                              const PreprocessConfig& cfg = {}) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  bool negated = false;
  for (const auto& t : tokens) {
    if (t == kBoundaryMarker) {
      negated = false;
      continue;
    }
    bool clitic = t.size() >= 3 && t.compare(t.size() - 3, 3, "n't") == 0;
    if (cfg.negators.count(t) || clitic) {
      out.push_back(t);
      negated = true;
      continue;
    }
    if (cfg.boundary_words.count(t)) {
      out.push_back(t);
      negated = false;
      continue;
    }
    out.push_back(negated ? kNegPrefix + t : t);
  }
  return out;
}

namespace detail {

inline bool url_starts_at(const std::string& s, std::size_t i) {
  auto prefix_at = [&](const char* p) {
    std::size_t n = std::strlen(p);
    if (i + n > s.size()) return false;
    for (std::size_t k = 0; k < n; ++k)
      if (std::tolower(static_cast<unsigned char>(s[i + k])) != p[k]) return false;
    return true;
  };
  if (!(prefix_at("http://") || prefix_at("https://") || prefix_at("www."))) return false;
  // must sit at a word boundary so "awww.x" is not a URL
  return i == 0 || !std::isalnum(static_cast<unsigned char>(s[i - 1]));
}

}  // namespace detail

// The fixed pipeline: (1) strip URLs, (2) strip @mentions, (3) drop '#' but
// keep the tag word, (4) lowercase, (5) map known emoticons/emojis to
// EMO_POS/EMO_NEG and drop unknown ones, (6) remove remaining punctuation and
// digits (clause punctuation is recorded as a boundary marker first),
// (7) whitespace-tokenize, (8) negation marking, (9) stopword removal with
// EMO_*/NOT_ exempt, (10) Porter stemming.
inline TokenSeq normalize(const std::string& text, const PreprocessConfig& cfg = {},
                          std::string source_id = "") {
  std::string s;
  s.reserve(text.size());
  for (char c : text)  // control bytes cannot forge internal sentinels
    s.push_back((static_cast<unsigned char>(c) < 0x20 && c != '\n' && c != '\t') ? ' ' : c);

  if (cfg.expand_abbreviations) s = cfg.expand_abbreviations(std::move(s));
  if (cfg.spell_correct) s = cfg.spell_correct(std::move(s));

  // (1) URLs: prefix up to the next whitespace
  std::string pass;
  pass.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    if (detail::url_starts_at(s, i)) {
      while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      pass.push_back(' ');
      continue;
    }
    pass.push_back(s[i]);
    ++i;
  }
  s = std::move(pass);

  // (2) @mentions removed entirely
  pass.clear();
  for (std::size_t i = 0; i < s.size();) {
    if (s[i] == '@') {
      ++i;
      while (i < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      pass.push_back(' ');
      continue;
    }
    pass.push_back(s[i]);
    ++i;
  }
  s = std::move(pass);

  // (3) '#' stripped, hashtag word kept
  pass.clear();
  for (char c : s)
    if (c != '#') pass.push_back(c);
  s = std::move(pass);

  // (4) lowercase (ASCII)
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));

  // (5) known emoticons/emojis -> sentinel words; longest match first
  std::vector<std::pair<std::string, bool>> emo = cfg.emoji_map;
  std::sort(emo.begin(), emo.end(), [](const auto& a, const auto& b) {
    return a.first.size() > b.first.size();
  });
  for (auto& e : emo)
    for (auto& c : e.first) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  pass.clear();
  for (std::size_t i = 0; i < s.size();) {
    bool matched = false;
    for (const auto& [sym, pos] : emo) {
      if (!sym.empty() && s.compare(i, sym.size(), sym) == 0) {
        pass += pos ? " \x01p " : " \x01n ";
        i += sym.size();
        matched = true;
        break;
      }
    }
    if (!matched) {
      pass.push_back(s[i]);
      ++i;
    }
  }
  s = std::move(pass);

  // (6) keep letters, apostrophes (so "n't" survives until negation) and the
  // emoticon sentinel; clause punctuation becomes a boundary marker; digits,
  // other punctuation and non-ASCII (unknown emoji) are deleted
  pass.clear();
  for (char c : s) {
    unsigned char u = static_cast<unsigned char>(c);
    if ((c >= 'a' && c <= 'z') || c == '\'' || c == '\x01') {
      pass.push_back(c);
    } else if (c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?') {
      pass += " ";
      pass += kBoundaryMarker;
      pass += " ";
    } else if (std::isspace(u)) {
      pass.push_back(' ');
    }
    // everything else dropped without splitting the word
  }
  s = std::move(pass);

  // (7) whitespace tokenize, translating sentinels
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&]() {
    if (cur.empty()) return;
    if (cur == "\x01p") {
      tokens.push_back(kEmoPos);
    } else {
      if (cur == "\x01n") tokens.push_back(kEmoNeg);
      else tokens.push_back(cur);
    }
    cur.clear();
  };
  for (char c : s) {
    if (c == ' ') flush();
    else cur.push_back(c);
  }
  flush();

  // (8) negation marking (consumes boundary markers)
  tokens = mark_negation(tokens, cfg);

  // apostrophes have served their purpose
  for (auto& t : tokens) {
    std::string stripped;
    for (char c : t)
      if (c != '\'') stripped.push_back(c);
    t = std::move(stripped);
  }
  std::erase_if(tokens, [](const std::string& t) { return t.empty(); });

  // (9) stopword removal; EMO_* and NOT_* exempt
  std::erase_if(tokens, [&](const std::string& t) {
    if (t == kEmoPos || t == kEmoNeg) return false;
    if (t.rfind(kNegPrefix, 0) == 0) return false;
    return cfg.stopwords.count(t) > 0;
  });

  // (10) Porter stemming; the NOT_ base is stemmed, markers left alone
  if (cfg.stem) {
    for (auto& t : tokens) {
      if (t == kEmoPos || t == kEmoNeg) continue;
      if (t.rfind(kNegPrefix, 0) == 0) {
        t = kNegPrefix + porter_stem(t.substr(std::strlen(kNegPrefix)));
      } else {
        t = porter_stem(t);
      }
    }
  }

  TokenSeq out;
  out.tokens = std::move(tokens);
  out.source_id = std::move(source_id);
  return out;
}

inline std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string s;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) s.push_back(' ');
    s += tokens[i];
  }
  return s;
}

}  // namespace sentitree
