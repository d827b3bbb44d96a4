// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Each check rebuilds its expectations from first principles
// (integer counting, rule-table walks, finite differences) rather than from
// the library under test.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "sentitree/difftree.hpp"
#include "sentitree/fusion.hpp"
#include "sentitree/gbdt.hpp"
#include "sentitree/metrics.hpp"
#include "sentitree/pipeline.hpp"
#include "sentitree/rng.hpp"
#include "sentitree/synth.hpp"
#include "sentitree/topics.hpp"

namespace fs = std::filesystem;
using namespace sentitree;

namespace {

constexpr Polarity P = Polarity::Positive;
constexpr Polarity N = Polarity::Negative;
constexpr Polarity O = Polarity::Neutral;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- metrics --
// Independent integer counting; every expected value is one division (or a
// three-term mean of such divisions), so equality must be exact.
bool check_metrics(std::string& detail) {
  auto t0 = std::chrono::steady_clock::now();
  Rng rng(20260822);
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 1 + static_cast<int>(rng.below(60));
    std::vector<int> gold(n), pred(n);
    long long c[3][3] = {};
    ConfusionMatrix cm;
    for (int i = 0; i < n; ++i) {
      gold[i] = static_cast<int>(rng.below(3));
      pred[i] = static_cast<int>(rng.below(3));
      c[gold[i]][pred[i]] += 1;
      cm.add(static_cast<Polarity>(gold[i]), static_cast<Polarity>(pred[i]));
    }
    long long correct = c[0][0] + c[1][1] + c[2][2];
    if (accuracy(cm) != static_cast<double>(correct) / n) {
      detail = "accuracy mismatch";
      return false;
    }
    double prec[3], rec[3], f[3];
    for (int k = 0; k < 3; ++k) {
      long long tp = c[k][k], fp = 0, fn = 0;
      for (int o = 0; o < 3; ++o) {
        if (o == k) continue;
        fp += c[o][k];
        fn += c[k][o];
      }
      prec[k] = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
      rec[k] = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
      long long fd = 2 * tp + fp + fn;
      f[k] = fd == 0 ? 0.0 : static_cast<double>(2 * tp) / fd;
      if (precision(cm, k) != prec[k] || recall(cm, k) != rec[k] ||
          f_from_counts(cm, k) != f[k]) {
        detail = "per-class mismatch at trial " + std::to_string(trial);
        return false;
      }
    }
    if (macro_precision(cm) != (prec[0] + prec[1] + prec[2]) / 3.0 ||
        macro_recall(cm) != (rec[0] + rec[1] + rec[2]) / 3.0 ||
        macro_f(cm) != (f[0] + f[1] + f[2]) / 3.0) {
      detail = "macro mismatch at trial " + std::to_string(trial);
      return false;
    }
  }
  double dt = seconds_since(t0);
  detail = "1000 matrices exact in " + std::to_string(dt).substr(0, 4) + "s";
  return dt < 5.0;
}

// -------------------------------------------------------------- diffusion --
Polarity oracle_combine(Polarity a, Polarity b) {
  if (a == O) return b;
  if (b == O) return a;
  return a == b ? a : N;
}

Polarity oracle_plurality(const std::vector<Polarity>& contributions) {
  int votes[3] = {0, 0, 0};
  for (Polarity c : contributions) votes[static_cast<int>(c)]++;
  int best = std::max({votes[0], votes[1], votes[2]});
  int winners = (votes[0] == best) + (votes[1] == best) + (votes[2] == best);
  if (winners > 1) return O;
  if (votes[0] == best) return N;
  if (votes[2] == best) return P;
  return O;
}

Polarity oracle_propagated(int node, const std::vector<std::vector<int>>& kids,
                           const std::vector<Polarity>& base) {
  if (kids[node].empty()) return base[node];
  std::vector<std::pair<int, int>> leaves;  // (pattern leaf, child of node)
  std::function<void(int, int, int)> walk = [&](int cur, int top, int dist) {
    if (kids[cur].empty() || dist == 5) {
      leaves.emplace_back(cur, top);
      return;
    }
    for (int c : kids[cur]) walk(c, top, dist + 1);
  };
  for (int c : kids[node]) walk(c, c, 1);
  std::vector<Polarity> contributions;
  for (auto [leaf, top] : leaves)
    contributions.push_back(oracle_combine(base[leaf], base[top]));
  return oracle_plurality(contributions);
}

Message make_msg(const std::string& id, const std::string& parent = "") {
  Message m;
  m.id = id;
  m.text = "text";
  if (!parent.empty()) m.retweet_of = parent;
  return m;
}

bool check_diffusion_exhaustive(std::string& detail) {
  auto t0 = std::chrono::steady_clock::now();
  const Polarity all[] = {N, O, P};
  long long checked = 0;
  bool ok = true;

  for (int n = 1; n <= 6 && ok; ++n) {
    std::vector<int> parent(n, -1);
    std::function<void(int)> enumerate = [&](int i) {
      if (!ok) return;
      if (i == n) {
        std::vector<std::vector<int>> kids(n);
        std::vector<int> depth(n, 0);
        for (int v = 1; v < n; ++v) {
          kids[parent[v]].push_back(v);
          depth[v] = depth[parent[v]] + 1;
        }
        if (*std::max_element(depth.begin(), depth.end()) > 3) return;

        std::vector<Message> msgs;
        for (int v = 0; v < n; ++v)
          msgs.push_back(make_msg("n" + std::to_string(v),
                                  v == 0 ? "" : "n" + std::to_string(parent[v])));
        auto forest = build_forest(msgs, 100);
        std::vector<Polarity> base(n, N);
        long long combos = 1;
        for (int v = 0; v < n; ++v) combos *= 3;
        for (long long code = 0; code < combos && ok; ++code) {
          long long c = code;
          std::map<std::string, Polarity> base_map;
          for (int v = 0; v < n; ++v) {
            base[v] = all[c % 3];
            base_map["n" + std::to_string(v)] = base[v];
            c /= 3;
          }
          auto res = propagate(forest[0], base_map);
          for (int v = 0; v < n; ++v) {
            if (res.propagated.at("n" + std::to_string(v)) !=
                oracle_propagated(v, kids, base)) {
              detail = "mismatch n=" + std::to_string(n) + " labeling=" + std::to_string(code);
              ok = false;
              break;
            }
          }
          ++checked;
        }
        return;
      }
      for (int p = 0; p < i && ok; ++p) {
        parent[i] = p;
        enumerate(i + 1);
      }
    };
    enumerate(1);
  }
  if (!ok) return false;
  if (checked != 83415) {  // shapes 1,1,2,6,23,106 for n=1..6, times 3^n
    detail = "case count " + std::to_string(checked) + " != 83415";
    return false;
  }
  double dt = seconds_since(t0);
  detail = "83415 cases exact in " + std::to_string(dt).substr(0, 4) + "s";
  return dt < 30.0;
}

bool check_worked_examples(std::string& detail) {
  if (combine(P, P) != P) { detail = "agreement"; return false; }
  if (combine(P, N) != N || combine(N, P) != N) { detail = "disagreement"; return false; }

  // single retweet: the leaf's label transfers directly to the root
  auto two = build_forest({make_msg("r"), make_msg("l", "r")});
  auto res2 = propagate(two[0], {{"r", O}, {"l", P}});
  if (res2.propagated.at("r") != P) { detail = "height-1 transfer"; return false; }

  // chain of two retweets: leaf positive against a negative middle → negative
  auto three = build_forest({make_msg("r"), make_msg("m", "r"), make_msg("l", "m")});
  auto res3 = propagate(three[0], {{"r", O}, {"m", N}, {"l", P}});
  if (res3.propagated.at("r") != N) { detail = "height-2 chain"; return false; }
  detail = "agreement, disagreement, transfer, chain";
  return true;
}

// ------------------------------------------------------------------ topics --
bool check_topics(std::string& detail) {
  auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::string> sky = {"telescope", "nebula", "comet",   "orbit",
                                        "eclipse",   "galaxy", "aurora",  "stellar",
                                        "equinox",   "transit", "parallax", "albedo"};
  const std::vector<std::string> oven = {"sourdough", "ganache", "praline", "brioche",
                                         "custard",   "frosting", "macaron", "crumble",
                                         "glaze",     "knead",    "proof",   "zest"};
  Rng gen(99);
  std::vector<TokenSeq> docs;
  std::vector<int> truth;
  for (int d = 0; d < 200; ++d) {
    const auto& pool = d % 2 == 0 ? sky : oven;
    TokenSeq doc;
    doc.source_id = "doc" + std::to_string(d);
    for (int i = 0; i < 50; ++i) doc.tokens.push_back(pool[gen.below(pool.size())]);
    docs.push_back(std::move(doc));
    truth.push_back(d % 2 == 0 ? 0 : 1);
  }
  LdaFit fit = fit_lda(docs, 2, 0.5, 0.01, 200, 400);

  long long direct = 0, swapped = 0, total = 0;
  for (int d = 0; d < 200; ++d)
    for (int z : fit.assignments[d]) {
      direct += z == truth[d];
      swapped += z == 1 - truth[d];
      ++total;
    }
  long long aligned = std::max(direct, swapped);
  double frac = static_cast<double>(aligned) / static_cast<double>(total);
  if (frac < 0.9) {
    detail = "token alignment " + std::to_string(frac);
    return false;
  }

  // single-topic fit must reduce to the smoothed unigram distribution
  std::vector<TokenSeq> small(3);
  small[0].tokens = {"rain", "rain", "sun", "cloud"};
  small[1].tokens = {"sun", "cloud", "cloud", "rain"};
  small[2].tokens = {"wind", "rain"};
  const double beta = 0.01;
  LdaFit uni = fit_lda(small, 1, 0.5, beta, 15, 3);
  std::map<std::string, long long> counts;
  long long n_tokens = 0;
  for (const auto& d : small)
    for (const auto& t : d.tokens) {
      ++counts[t];
      ++n_tokens;
    }
  for (std::size_t w = 0; w < uni.model.vocab.size(); ++w) {
    double want = (counts[uni.model.vocab[w]] + beta) /
                  (static_cast<double>(n_tokens) + uni.model.vocab.size() * beta);
    if (std::abs(uni.model.phi[0][w] - want) > 1e-9) {
      detail = "unigram deviation at " + uni.model.vocab[w];
      return false;
    }
  }
  double dt = seconds_since(t0);
  detail = "alignment " + std::to_string(frac).substr(0, 6) + ", unigram exact, " +
           std::to_string(dt).substr(0, 4) + "s";
  return dt < 60.0;
}

// ---------------------------------------------------------------- boosting --
bool check_boosting(std::string& detail) {
  // fixture set: three separable clusters, long training schedule
  Rng rng(314);
  std::vector<std::vector<double>> X;
  std::vector<int> y;
  const double cx[] = {0.0, 4.0, 0.0};
  const double cy[] = {0.0, 0.0, 4.0};
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 50; ++i) {
      X.push_back({cx[c] + 0.6 * rng.normal(), cy[c] + 0.6 * rng.normal()});
      y.push_back(c);
    }
  BoostConfig cfg;
  cfg.iterations = 2000;
  cfg.tree_depth = 3;
  cfg.learning_rate = 0.1;
  BoostModel m = fit_boost(X, y, cfg);
  if (m.loss_curve.size() != 2001) {
    detail = "loss curve length " + std::to_string(m.loss_curve.size());
    return false;
  }
  for (std::size_t i = 1; i < m.loss_curve.size(); ++i)
    if (m.loss_curve[i] > m.loss_curve[i - 1] + 1e-12) {
      detail = "loss rose at iteration " + std::to_string(i);
      return false;
    }

  // one-dimensional threshold data: stumps must hit 100% within 50 rounds
  std::vector<std::vector<double>> sx;
  std::vector<int> sy;
  Rng srng(77);
  for (int i = 0; i < 80; ++i) {
    double v = srng.uniform01() * 2.0 - 1.0;
    if (v == 0.0) v = 0.5;
    sx.push_back({v});
    sy.push_back(v < 0.0 ? 0 : 1);
  }
  BoostConfig scfg;
  scfg.iterations = 50;
  scfg.tree_depth = 1;
  scfg.learning_rate = 0.5;
  BoostModel sm = fit_boost(sx, sy, scfg);
  for (std::size_t i = 0; i < sx.size(); ++i)
    if (sm.predict(sx[i]) != sy[i]) {
      detail = "stump misclassified a separable point";
      return false;
    }

  // ordered encoding: an item never sees its own target or later ones.
  // With every category unique, all encodings equal the global mean; with
  // two same-category items, exactly one is the pure prior and the other
  // blends in only the first item's target.
  std::vector<std::string> uniq = {"a", "b", "c", "d", "e"};
  std::vector<double> tgt = {1.0, 0.0, 1.0, 1.0, 0.0};
  for (double v : encode_categorical(uniq, tgt, 2.0, 9))
    if (v != 0.6) {
      detail = "unique-category encoding leaked";
      return false;
    }
  auto pair = encode_categorical({"c", "c"}, {1.0, 0.0}, 1.0, 42);
  bool first_is_prior = pair[0] == 0.5 && pair[1] == 0.75;
  bool second_is_prior = pair[1] == 0.5 && pair[0] == 0.25;
  if (!first_is_prior && !second_is_prior) {
    detail = "pairwise encoding leaked";
    return false;
  }
  detail = "2000-round curve monotone, stumps exact, encoding leak-free";
  return true;
}

// --------------------------------------------------------------- gradients --
bool check_gradients(std::string& detail) {
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    MLPModel m = init_mlp(5, 7, 1000 + trial);
    Rng rng(2000 + trial);
    std::vector<double> x(5);
    for (double& v : x) v = rng.normal();
    int y = static_cast<int>(rng.below(3));
    worst = std::max(worst, grad_check(m, x, y));
  }
  std::ostringstream ss;
  ss << "max relative error " << worst << " over 100 pairs";
  detail = ss.str();
  return worst < 1e-4;
}

// ------------------------------------------------------------- end to end --
struct E2E {
  fs::path dir;
  RunOutput with_sarcasm;
  RunOutput no_sarcasm;
  std::string rerun_json;
  double runtime = 0.0;
  bool ran = false;
};

PipelineConfig synth_pipeline_config(const std::string& dir) {
  PipelineConfig cfg;
  cfg.messages_path = dir + "/messages.csv";
  cfg.famous_path = dir + "/famous.csv";
  cfg.profiles_path = dir + "/profiles.csv";
  cfg.edges_path = dir + "/edges.csv";
  cfg.lexicon_path = dir + "/lexicon.txt";
  cfg.topics = 2;
  cfg.alpha = 0.5;
  cfg.lda_iters = 300;
  cfg.boost.iterations = 100;
  cfg.mlp_epochs = 150;
  cfg.seed = 42;
  return cfg;
}

E2E run_e2e() {
  E2E e;
  auto t0 = std::chrono::steady_clock::now();
  e.dir = fs::temp_directory_path() / ("sentitree_accept_" + std::to_string(::getpid()));
  fs::create_directories(e.dir / "c30");
  fs::create_directories(e.dir / "c00");

  SynthConfig sc;
  sc.sarcasm_rate = 0.3;
  sc.seed = 42;
  write_synth_corpus((e.dir / "c30").string(), generate_synthetic(sc));
  sc.sarcasm_rate = 0.0;
  write_synth_corpus((e.dir / "c00").string(), generate_synthetic(sc));

  PipelineConfig cfg30 = synth_pipeline_config((e.dir / "c30").string());
  e.with_sarcasm = run_pipeline(cfg30);
  e.rerun_json = run_pipeline(cfg30).report_json_text;
  e.no_sarcasm = run_pipeline(synth_pipeline_config((e.dir / "c00").string()));
  e.runtime = seconds_since(t0);
  e.ran = true;
  return e;
}

double column_accuracy(const RunOutput& out, const std::string& name) {
  for (const auto& col : out.columns)
    if (col.name == name) return col.metrics.accuracy;
  return -1.0;
}

bool check_e2e(const E2E& e, std::string& detail) {
  if (!e.ran) { detail = "pipeline did not run"; return false; }
  double lex30 = column_accuracy(e.with_sarcasm, "lexicon_only");
  double full30 = column_accuracy(e.with_sarcasm, "full");
  double lex00 = column_accuracy(e.no_sarcasm, "lexicon_only");
  double full00 = column_accuracy(e.no_sarcasm, "full");
  double gap30 = full30 - lex30;
  double gap00 = std::abs(full00 - lex00);
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "sarcastic gap %+.4f (need >= +0.10), plain gap %.4f (need <= 0.03), %.1fs",
                gap30, gap00, e.runtime);
  detail = buf;
  if (e.with_sarcasm.n_messages < 1500 || e.with_sarcasm.n_messages > 2600) {
    detail += "; corpus size " + std::to_string(e.with_sarcasm.n_messages) + " out of band";
    return false;
  }
  return gap30 >= 0.10 && gap00 <= 0.03 && e.runtime < 300.0;
}

bool check_determinism(const E2E& e, std::string& detail) {
  if (!e.ran) { detail = "pipeline did not run"; return false; }
  if (e.with_sarcasm.report_json_text != e.rerun_json) {
    detail = "reports differ between identical runs";
    return false;
  }
  detail = "report json byte-identical across reruns";
  return true;
}

bool check_report_layout(const E2E& e, std::string& detail) {
  if (!e.ran) { detail = "pipeline did not run"; return false; }
  std::istringstream in(e.with_sarcasm.report_text);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  if (lines.size() != 6) { detail = "expected 6 lines"; return false; }
  for (const auto& l : lines)
    if (l.size() != lines[0].size()) { detail = "ragged columns"; return false; }

  auto tokens = [](const std::string& s) {
    std::istringstream ts(s);
    std::vector<std::string> out;
    std::string t;
    while (ts >> t) out.push_back(t);
    return out;
  };
  std::vector<std::string> header = tokens(lines[0]);
  std::vector<std::string> want_header = {"Metric",          "lexicon_only", "plus_diffusion",
                                          "plus_similarity", "plus_interests", "full"};
  if (header != want_header) { detail = "header columns wrong"; return false; }

  const char* rows[] = {"Accuracy", "Precision", "Recall", "F-measure", "Delta-Accuracy"};
  std::regex plain(R"([01]\.\d{4})"), signed_re(R"([+-][01]\.\d{4})");
  for (int r = 0; r < 5; ++r) {
    std::vector<std::string> cells = tokens(lines[r + 1]);
    if (cells.size() != 6 || cells[0] != rows[r]) {
      detail = std::string("row ") + rows[r] + " malformed";
      return false;
    }
    for (int c = 1; c <= 5; ++c)
      if (!std::regex_match(cells[c], r == 4 ? signed_re : plain)) {
        detail = std::string("cell format in row ") + rows[r];
        return false;
      }
  }
  detail = "metric rows by configuration columns with signed delta row";
  return true;
}

}  // namespace

int main() {
  int failures = 0;
  auto criterion = [&](const char* name, bool ok, const std::string& detail) {
    std::printf("[%s] %s — %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  };

  std::string d;
  d.clear(); criterion("metric counting oracle, exact over 1000 random matrices", check_metrics(d), d);
  d.clear(); criterion("propagation matches rule-table oracle on all trees to 6 nodes", check_diffusion_exhaustive(d), d);
  d.clear(); criterion("worked combine and propagation examples", check_worked_examples(d), d);
  d.clear(); criterion("planted two-topic recovery and single-topic unigram", check_topics(d), d);
  d.clear(); criterion("boosting monotone loss, exact stumps, leak-free encoding", check_boosting(d), d);
  d.clear(); criterion("mlp analytic gradients vs finite differences", check_gradients(d), d);

  E2E e;
  try {
    e = run_e2e();
  } catch (const std::exception& ex) {
    e.ran = false;
    std::fprintf(stderr, "end-to-end run threw: %s\n", ex.what());
  }
  d.clear(); criterion("synthetic end-to-end accuracy gap", check_e2e(e, d), d);
  d.clear(); criterion("byte-identical reports under a fixed seed", check_determinism(e, d), d);
  d.clear(); criterion("report table layout", check_report_layout(e, d), d);
  if (!e.dir.empty()) {
    std::error_code ec;
    fs::remove_all(e.dir, ec);
  }

  if (failures) std::printf("%d criterion(s) failed\n", failures);
  else std::printf("all criteria passed\n");
  return failures == 0 ? 0 : 1;
}
