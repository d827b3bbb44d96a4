#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "sentitree/baselines.hpp"
#include "sentitree/corpus.hpp"
#include "sentitree/difftree.hpp"
#include "sentitree/errors.hpp"
#include "sentitree/fusion.hpp"
#include "sentitree/gbdt.hpp"
#include "sentitree/lexicon.hpp"
#include "sentitree/metrics.hpp"
#include "sentitree/polarity.hpp"
#include "sentitree/preprocess.hpp"
#include "sentitree/rng.hpp"
#include "sentitree/similarity.hpp"
#include "sentitree/topics.hpp"

namespace sentitree {

struct PipelineConfig {
  std::string messages_path;
  std::string famous_path;
  std::string profiles_path;
  std::string edges_path;
  std::string lexicon_path;
  std::string wiki_path;                  // optional influencer text, handle,text
  std::string external_predictions_path;  // optional replacement for lexicon labels
  std::string stopwords_path;             // optional override
  std::string emoji_map_path;             // optional override
  std::string dump_dir;

  double tau = 0.05;
  int depth_cap = 4;

  int topics = 19;
  double alpha = -1.0;  // < 0 means 50/K
  double beta = 0.01;
  int lda_iters = 1000;

  BoostConfig boost;
  int mlp_hidden = 16;
  int mlp_epochs = 200;
  double mlp_lr = 0.05;
  int mlp_batch = 32;
  int mlp_patience = 20;

  std::size_t max_features = 20000;  // baseline vectorizer cap
  int svm_epochs = 30;
  double svm_lambda = 1e-4;
  double nb_alpha = 1.0;

  std::uint64_t seed = 1;
};

// key = value lines, '#' comments
inline std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto trim = [](std::string s) {
      std::size_t a = s.find_first_not_of(" \t");
      if (a == std::string::npos) return std::string();
      std::size_t b = s.find_last_not_of(" \t");
      return s.substr(a, b - a + 1);
    };
    std::string t = trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw MalformedLineError(path, line_no, "expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw MalformedLineError(path, line_no, "empty key");
    out[key] = value;
  }
  return out;
}

inline void apply_config_map(PipelineConfig& cfg, const std::map<std::string, std::string>& kv,
                             const std::string& origin) {
  auto as_double = [&](const std::string& k, const std::string& v) {
    char* end = nullptr;
    double d = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
      throw DataError(origin + ": bad numeric value for " + k + ": '" + v + "'");
    return d;
  };
  auto as_int = [&](const std::string& k, const std::string& v) {
    return static_cast<int>(as_double(k, v));
  };
  for (const auto& [k, v] : kv) {
    if (k == "messages") cfg.messages_path = v;
    else if (k == "famous") cfg.famous_path = v;
    else if (k == "profiles") cfg.profiles_path = v;
    else if (k == "edges") cfg.edges_path = v;
    else if (k == "lexicon") cfg.lexicon_path = v;
    else if (k == "wiki") cfg.wiki_path = v;
    else if (k == "external_predictions") cfg.external_predictions_path = v;
    else if (k == "stopwords") cfg.stopwords_path = v;
    else if (k == "emoji_map") cfg.emoji_map_path = v;
    else if (k == "dump_dir") cfg.dump_dir = v;
    else if (k == "tau") cfg.tau = as_double(k, v);
    else if (k == "depth_cap") cfg.depth_cap = as_int(k, v);
    else if (k == "topics") cfg.topics = as_int(k, v);
    else if (k == "alpha") cfg.alpha = as_double(k, v);
    else if (k == "beta") cfg.beta = as_double(k, v);
    else if (k == "lda_iters") cfg.lda_iters = as_int(k, v);
    else if (k == "boost_lr") cfg.boost.learning_rate = as_double(k, v);
    else if (k == "boost_depth") cfg.boost.tree_depth = as_int(k, v);
    else if (k == "boost_iters") cfg.boost.iterations = as_int(k, v);
    else if (k == "mlp_hidden") cfg.mlp_hidden = as_int(k, v);
    else if (k == "mlp_epochs") cfg.mlp_epochs = as_int(k, v);
    else if (k == "mlp_lr") cfg.mlp_lr = as_double(k, v);
    else if (k == "mlp_batch") cfg.mlp_batch = as_int(k, v);
    else if (k == "mlp_patience") cfg.mlp_patience = as_int(k, v);
    else if (k == "max_features") cfg.max_features = static_cast<std::size_t>(as_int(k, v));
    else if (k == "svm_epochs") cfg.svm_epochs = as_int(k, v);
    else if (k == "svm_lambda") cfg.svm_lambda = as_double(k, v);
    else if (k == "nb_alpha") cfg.nb_alpha = as_double(k, v);
    else if (k == "seed") cfg.seed = static_cast<std::uint64_t>(as_double(k, v));
    else throw DataError(origin + ": unknown config key '" + k + "'");
  }
}

struct RunOutput {
  std::vector<ReportColumn> columns;
  nlohmann::json report;
  std::string report_json_text;
  std::string report_text;
  std::vector<std::string> warnings;
  std::vector<std::string> notes;
  int n_messages = 0;
  int n_labeled = 0;
  int n_eval = 0;
  std::map<std::string, Polarity> base_labels;
  std::map<std::string, Polarity> diffusion_labels;
  std::map<int, int> heights;
};

namespace detail {

inline nlohmann::json forest_json(const std::vector<DiffusionTree>& forest,
                                  const std::map<std::string, Polarity>& base,
                                  const std::map<std::string, PropagationResult>& results) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& tree : forest) {
    nlohmann::json t;
    t["root"] = tree.root().id;
    t["height"] = tree.height();
    nlohmann::json nodes = nlohmann::json::array();
    const auto& res = results.at(tree.root().id);
    for (const auto& n : tree.nodes) {
      nlohmann::json j;
      j["id"] = n.id;
      j["parent"] = n.parent < 0 ? nlohmann::json(nullptr)
                                 : nlohmann::json(tree.nodes[n.parent].id);
      j["depth"] = n.depth;
      j["beyond_influence"] = n.beyond_influence;
      auto b = base.find(n.id);
      j["base"] = b == base.end() ? nlohmann::json(nullptr) : nlohmann::json(to_string(b->second));
      j["propagated"] = to_string(res.propagated.at(n.id));
      j["rule"] = res.trace.at(n.id).rule;
      nodes.push_back(std::move(j));
    }
    t["nodes"] = std::move(nodes);
    out.push_back(std::move(t));
  }
  return out;
}

inline nlohmann::json boost_json(const BoostModel& model) {
  nlohmann::json out;
  out["classes"] = model.classes;
  out["n_features"] = model.n_features;
  out["base_score"] = model.base_score;
  out["loss_curve"] = model.loss_curve;
  nlohmann::json iters = nlohmann::json::array();
  for (const auto& round : model.trees) {
    nlohmann::json per_class = nlohmann::json::array();
    for (const auto& tree : round) {
      nlohmann::json nodes = nlohmann::json::array();
      for (const auto& n : tree.nodes) {
        nlohmann::json j;
        j["feature"] = n.feature;
        j["threshold"] = n.threshold;
        j["left"] = n.left;
        j["right"] = n.right;
        j["value"] = n.value;
        nodes.push_back(std::move(j));
      }
      per_class.push_back(std::move(nodes));
    }
    iters.push_back(std::move(per_class));
  }
  out["trees"] = std::move(iters);
  return out;
}

inline nlohmann::json mlp_json(const TrainedMLP& trained) {
  nlohmann::json out;
  out["in_dim"] = trained.model.in_dim;
  out["hidden"] = trained.model.hidden;
  out["out_dim"] = MLPModel::kOut;
  out["seed"] = trained.model.seed;
  out["w1"] = trained.model.w1;
  out["b1"] = trained.model.b1;
  out["w2"] = trained.model.w2;
  out["b2"] = trained.model.b2;
  out["train_loss"] = trained.train_loss;
  out["val_loss"] = trained.val_loss;
  out["best_epoch"] = trained.best_epoch;
  return out;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw DataError("cannot write " + path);
  o << content;
}

}  // namespace detail

// The full run: corpus in, one metrics column per ablation out. Feature
// vectors keep a fixed width across ablations; switched-off channels are
// zeroed so every configuration trains the same shape of model.
inline RunOutput run_pipeline(const PipelineConfig& cfg) {
  RunOutput out;
  const int K = cfg.topics;
  if (K < 1) throw DataError("topics must be >= 1");
  const double alpha = cfg.alpha < 0.0 ? 50.0 / K : cfg.alpha;
  if (!cfg.dump_dir.empty()) std::filesystem::create_directories(cfg.dump_dir);

  // ingest
  Corpus corpus =
      load_corpus(cfg.messages_path, cfg.famous_path, cfg.profiles_path, cfg.edges_path);
  out.warnings = corpus.report.warnings;
  out.n_messages = static_cast<int>(corpus.messages.size());
  if (corpus.messages.empty()) throw DegenerateDataError("no messages in corpus");
  SentimentLexicon lexicon = load_sentiwordnet(cfg.lexicon_path);

  // the message id doubles as the author's profile id; authors without a
  // profile row get an empty stand-in
  std::vector<UserProfile> synthesized;
  std::map<std::string, const UserProfile*> profile_of;
  {
    std::map<std::string, const UserProfile*> known;
    for (const auto& p : corpus.profiles) known[p.id] = &p;
    std::vector<std::string> missing;
    for (const auto& m : corpus.messages)
      if (!known.count(m.id)) missing.push_back(m.id);
    synthesized.reserve(missing.size());
    for (const auto& id : missing) {
      UserProfile p;
      p.id = id;
      synthesized.push_back(std::move(p));
    }
    for (std::size_t i = 0; i < missing.size(); ++i) {
      known[missing[i]] = &synthesized[i];
      out.warnings.push_back("no profile for author '" + missing[i] + "', using an empty one");
    }
    profile_of = std::move(known);
  }

  // preprocess
  PreprocessConfig pre;
  if (!cfg.stopwords_path.empty()) pre.stopwords = load_stopwords(cfg.stopwords_path);
  if (!cfg.emoji_map_path.empty()) pre.emoji_map = load_emoji_map(cfg.emoji_map_path);
  std::map<std::string, TokenSeq> tokens;
  for (const auto& m : corpus.messages) tokens[m.id] = normalize(m.text, pre, m.id);

  // base labels
  std::unique_ptr<BaseLabeler> labeler;
  if (!cfg.external_predictions_path.empty())
    labeler = std::make_unique<ExternalLabeler>(
        load_external_predictions(cfg.external_predictions_path));
  else
    labeler = std::make_unique<LexiconLabeler>(&lexicon, cfg.tau);
  std::map<std::string, BaseLabel> base;
  for (const auto& m : corpus.messages) base[m.id] = labeler->label(tokens.at(m.id));
  for (const auto& [id, b] : base) out.base_labels[id] = b.label;

  // diffusion forest
  std::vector<DiffusionTree> forest = build_forest(corpus.messages, cfg.depth_cap);
  out.heights = height_histogram(forest);
  std::map<std::string, Polarity> base_pol;
  for (const auto& [id, b] : base) base_pol[id] = b.label;
  std::map<std::string, PropagationResult> prop_by_root;
  std::map<std::string, std::string> root_of;
  for (const auto& tree : forest) {
    auto res = propagate(tree, base_pol);
    for (const auto& [id, pol] : res.propagated) out.diffusion_labels[id] = pol;
    for (const auto& n : tree.nodes) root_of[n.id] = tree.root().id;
    prop_by_root.emplace(tree.root().id, std::move(res));
  }

  // follower-overlap similarity along each tree path
  std::vector<UserProfile> all_profiles;
  all_profiles.reserve(profile_of.size());
  for (const auto& [id, p] : profile_of) all_profiles.push_back(*p);
  std::map<std::string, std::string> user_of;
  for (const auto& m : corpus.messages) user_of[m.id] = m.id;
  std::map<std::string, double> path_jaccard, path_shared;
  std::map<std::string, double> user_jaccard, user_shared;
  for (const auto& tree : forest) {
    auto ps = path_similarity_to_root(tree, user_of, all_profiles);
    path_jaccard.insert(ps.jaccard_by_node.begin(), ps.jaccard_by_node.end());
    path_shared.insert(ps.shared_by_node.begin(), ps.shared_by_node.end());
    user_jaccard.insert(ps.jaccard_by_user.begin(), ps.jaccard_by_user.end());
    user_shared.insert(ps.shared_by_user.begin(), ps.shared_by_user.end());
  }

  // influencer topics and per-user interests
  std::vector<TokenSeq> famous_docs;
  std::map<std::string, std::string> wiki_text;
  if (!cfg.wiki_path.empty()) {
    CsvTable w = read_csv(cfg.wiki_path);
    int c_handle = find_column(w.header, "handle");
    int c_text = find_column(w.header, "text");
    if (c_handle < 0) throw MissingColumnError(cfg.wiki_path, "handle");
    if (c_text < 0) throw MissingColumnError(cfg.wiki_path, "text");
    for (const auto& row : w.rows) wiki_text[row[c_handle]] += row[c_text] + " ";
  }
  for (const auto& f : corpus.famous) {
    std::string text = f.activity;
    if (auto it = wiki_text.find(f.handle); it != wiki_text.end()) text += " " + it->second;
    if (auto it = profile_of.find(f.handle); it != profile_of.end())
      text += " " + it->second->bio;
    famous_docs.push_back(normalize(text, pre, f.handle));
  }
  std::optional<LdaFit> lda;
  std::map<std::string, std::vector<double>> famous_thetas;
  bool any_famous_tokens = false;
  for (const auto& d : famous_docs) any_famous_tokens |= !d.tokens.empty();
  if (any_famous_tokens) {
    lda = fit_lda(famous_docs, K, alpha, cfg.beta, cfg.lda_iters,
                  substream_seed(cfg.seed, "lda"));
    for (const auto& d : famous_docs) famous_thetas[d.source_id] = infer_theta(d, lda->model);
  } else {
    out.notes.push_back("no influencer text available; interest vectors are uniform");
  }
  std::map<std::string, std::vector<double>> interest;
  for (const auto& m : corpus.messages)
    interest[m.id] = user_interest(*profile_of.at(m.id), famous_thetas, K).theta;

  // interest grouping over users
  std::map<std::string, int> group;
  {
    std::vector<std::string> users;
    for (const auto& m : corpus.messages) users.push_back(m.id);
    std::vector<int> targets;
    for (const auto& u : users) {
      const auto& th = interest.at(u);
      targets.push_back(static_cast<int>(
          std::max_element(th.begin(), th.end()) - th.begin()));
    }
    std::set<int> distinct(targets.begin(), targets.end());
    if (distinct.size() < 2) {
      for (std::size_t i = 0; i < users.size(); ++i) group[users[i]] = targets[i];
      out.notes.push_back("interest grouping degenerate (single group); "
                          "using argmax interest directly");
    } else {
      std::vector<std::string> locations;
      std::vector<double> loc_targets;
      for (std::size_t i = 0; i < users.size(); ++i) {
        const auto* p = profile_of.at(users[i]);
        locations.push_back(p->location ? *p->location : "");
        loc_targets.push_back(static_cast<double>(targets[i]));
      }
      auto loc_encoded = encode_categorical(locations, loc_targets, 1.0,
                                            substream_seed(cfg.seed, "boost"));
      std::vector<std::vector<double>> X;
      for (std::size_t i = 0; i < users.size(); ++i) {
        std::vector<double> row = interest.at(users[i]);
        const auto* p = profile_of.at(users[i]);
        row.push_back(std::log1p(static_cast<double>(p->followers.size())));
        auto ju = user_jaccard.find(users[i]);
        row.push_back(ju == user_jaccard.end() ? 0.0 : ju->second);
        auto su = user_shared.find(users[i]);
        row.push_back(su == user_shared.end() ? 0.0 : su->second);
        row.push_back(loc_encoded[i]);
        X.push_back(std::move(row));
      }
      BoostConfig bc = cfg.boost;
      bc.seed = substream_seed(cfg.seed, "boost");
      BoostModel bm = fit_boost(X, targets, bc);
      for (std::size_t i = 0; i < users.size(); ++i) group[users[i]] = bm.predict(X[i]);
      if (cfg.dump_dir.size())
        detail::write_file(cfg.dump_dir + "/boost_model.json", detail::boost_json(bm).dump(2));
    }
  }

  // fusion features, fixed width K+9
  const int width = K + 9;
  std::map<std::string, std::vector<double>> features;
  for (const auto& m : corpus.messages) {
    std::vector<double> f;
    f.reserve(width);
    const auto& b = base.at(m.id);
    f.push_back(b.score);
    auto lex_oh = one_hot(b.label);
    f.insert(f.end(), lex_oh.begin(), lex_oh.end());
    auto diff_oh = one_hot(out.diffusion_labels.at(m.id));
    f.insert(f.end(), diff_oh.begin(), diff_oh.end());
    auto pj = path_jaccard.find(m.id);
    f.push_back(pj == path_jaccard.end() ? 0.0 : pj->second);
    const auto& th = interest.at(m.id);
    f.insert(f.end(), th.begin(), th.end());
    f.push_back(group.at(m.id) == group.at(root_of.at(m.id)) ? 1.0 : 0.0);
    features[m.id] = std::move(f);
  }

  // labeled split, shared by every configuration
  std::vector<std::string> labeled;
  std::map<std::string, int> gold;
  for (const auto& m : corpus.messages) {
    if (!m.gold_label) continue;
    labeled.push_back(m.id);
    gold[m.id] = static_cast<int>(*m.gold_label);
  }
  out.n_labeled = static_cast<int>(labeled.size());
  if (labeled.size() < 10)
    throw DegenerateDataError("need at least 10 gold-labeled messages, have " +
                              std::to_string(labeled.size()));
  {
    Rng split_rng = Rng::substream(cfg.seed, "split");
    split_rng.shuffle(labeled);
  }
  std::size_t train_n = labeled.size() * 8 / 10;
  std::vector<std::string> train_ids(labeled.begin(), labeled.begin() + train_n);
  std::vector<std::string> eval_ids(labeled.begin() + train_n, labeled.end());
  out.n_eval = static_cast<int>(eval_ids.size());
  if (eval_ids.empty()) throw EmptyEvalError();

  // ablations: which feature groups stay on
  struct Ablation {
    const char* name;
    bool diffusion, similarity, interests;
  };
  const Ablation ablations[] = {
      {"lexicon_only", false, false, false},
      {"plus_diffusion", true, false, false},
      {"plus_similarity", true, true, false},
      {"plus_interests", true, false, true},
      {"full", true, true, true},
  };

  auto masked = [&](const std::vector<double>& f, const Ablation& a) {
    std::vector<double> m = f;
    if (!a.diffusion)
      for (int i = 4; i < 7; ++i) m[i] = 0.0;
    if (!a.similarity) m[7] = 0.0;
    if (!a.interests)
      for (int i = 8; i < width; ++i) m[i] = 0.0;
    return m;
  };

  nlohmann::json mlp_dump = nlohmann::json::object();
  for (const auto& abl : ablations) {
    ConfusionMatrix cm;
    std::vector<std::string> notes;
    if (std::string(abl.name) == "lexicon_only") {
      for (const auto& id : eval_ids)
        cm.add(static_cast<Polarity>(gold.at(id)), base.at(id).label);
      notes.push_back("direct base-labeler output, no fusion model");
    } else {
      std::vector<std::vector<double>> train_X, val_X;
      std::vector<int> train_y, val_y;
      for (const auto& id : train_ids) {
        train_X.push_back(masked(features.at(id), abl));
        train_y.push_back(gold.at(id));
      }
      for (const auto& id : eval_ids) {
        val_X.push_back(masked(features.at(id), abl));
        val_y.push_back(gold.at(id));
      }
      TrainOptions opt;
      opt.epochs = cfg.mlp_epochs;
      opt.learning_rate = cfg.mlp_lr;
      opt.batch_size = cfg.mlp_batch;
      opt.hidden = cfg.mlp_hidden;
      opt.patience = cfg.mlp_patience;
      opt.seed = substream_seed(cfg.seed, std::string("mlp:") + abl.name);
      TrainedMLP trained = train_mlp(train_X, train_y, val_X, val_y, opt);
      for (std::size_t i = 0; i < eval_ids.size(); ++i) {
        Polarity pred = decide(forward(trained.model, val_X[i]));
        cm.add(static_cast<Polarity>(val_y[i]), pred);
      }
      if (!cfg.dump_dir.empty()) mlp_dump[abl.name] = detail::mlp_json(trained);
    }
    ReportColumn col;
    col.name = abl.name;
    col.metrics = summarize(cm);
    col.notes = std::move(notes);
    out.columns.push_back(std::move(col));
  }

  for (const auto& n : out.notes)
    for (auto& col : out.columns) col.notes.push_back(n);

  out.report = report_json(out.columns, "lexicon_only");
  out.report["n_messages"] = out.n_messages;
  out.report["n_labeled"] = out.n_labeled;
  out.report["n_eval"] = out.n_eval;
  out.report["seed"] = cfg.seed;
  out.report_json_text = out.report.dump(2) + "\n";
  out.report_text = report_text(out.columns, "lexicon_only");

  if (!cfg.dump_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.dump_dir);
    detail::write_file(cfg.dump_dir + "/report.json", out.report_json_text);
    detail::write_file(cfg.dump_dir + "/report.txt", out.report_text);
    detail::write_file(cfg.dump_dir + "/report.csv", report_csv(out.columns));
    detail::write_file(cfg.dump_dir + "/forest.json",
                       detail::forest_json(forest, base_pol, prop_by_root).dump(2));
    if (!mlp_dump.empty()) detail::write_file(cfg.dump_dir + "/mlp_models.json", mlp_dump.dump(2));
    {
      std::string csv = "message_id,score,label\n";
      char buf[32];
      for (const auto& [id, b] : base) {
        std::snprintf(buf, sizeof buf, "%.6f", b.score);
        csv += csv_escape(id) + "," + buf + "," + to_string(b.label) + "\n";
      }
      detail::write_file(cfg.dump_dir + "/base_labels.csv", csv);
    }
    {
      std::string csv = "node,path_jaccard,path_shared\n";
      char buf[64];
      for (const auto& [id, v] : path_jaccard) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f", v, path_shared.at(id));
        csv += csv_escape(id) + "," + buf + "\n";
      }
      detail::write_file(cfg.dump_dir + "/path_similarity.csv", csv);
    }
    if (all_profiles.size() <= 300)
      write_similarity_csv(cfg.dump_dir + "/similarity.csv", all_profiles);
    if (lda) {
      nlohmann::json tj;
      tj["K"] = K;
      tj["alpha"] = alpha;
      tj["beta"] = cfg.beta;
      tj["seed"] = lda->model.seed;
      tj["vocab"] = lda->model.vocab;
      tj["phi"] = lda->model.phi;
      tj["famous_thetas"] = famous_thetas;
      tj["top_terms"] = top_terms(lda->model, 10);
      detail::write_file(cfg.dump_dir + "/topics.json", tj.dump(2));
    }
    {
      std::string csv = "message_id";
      for (int i = 0; i < width; ++i) csv += ",f" + std::to_string(i);
      csv += ",gold\n";
      char buf[32];
      for (const auto& m : corpus.messages) {
        csv += csv_escape(m.id);
        for (double v : features.at(m.id)) {
          std::snprintf(buf, sizeof buf, "%.6f", v);
          csv += ",";
          csv += buf;
        }
        csv += ",";
        csv += m.gold_label ? to_string(*m.gold_label) : "null";
        csv += "\n";
      }
      detail::write_file(cfg.dump_dir + "/features.csv", csv);
    }
    {
      nlohmann::json hj;
      for (const auto& [h, c] : out.heights) hj[std::to_string(h)] = c;
      detail::write_file(cfg.dump_dir + "/heights.json", hj.dump(2));
    }
  }
  return out;
}

// TF-IDF baselines over the same seeded split
inline RunOutput run_baseline(const PipelineConfig& cfg, const std::vector<std::string>& kinds) {
  RunOutput out;
  auto ml = load_messages(cfg.messages_path);
  out.warnings = ml.report.warnings;
  out.n_messages = static_cast<int>(ml.messages.size());

  PreprocessConfig pre;
  if (!cfg.stopwords_path.empty()) pre.stopwords = load_stopwords(cfg.stopwords_path);
  if (!cfg.emoji_map_path.empty()) pre.emoji_map = load_emoji_map(cfg.emoji_map_path);

  std::vector<std::string> labeled;
  std::map<std::string, TokenSeq> tokens;
  std::map<std::string, int> gold;
  for (const auto& m : ml.messages) {
    if (!m.gold_label) continue;
    labeled.push_back(m.id);
    tokens[m.id] = normalize(m.text, pre, m.id);
    gold[m.id] = static_cast<int>(*m.gold_label);
  }
  out.n_labeled = static_cast<int>(labeled.size());
  if (labeled.size() < 10)
    throw DegenerateDataError("need at least 10 gold-labeled messages, have " +
                              std::to_string(labeled.size()));
  {
    Rng split_rng = Rng::substream(cfg.seed, "split");
    split_rng.shuffle(labeled);
  }
  std::size_t train_n = labeled.size() * 8 / 10;
  std::vector<std::string> train_ids(labeled.begin(), labeled.begin() + train_n);
  std::vector<std::string> eval_ids(labeled.begin() + train_n, labeled.end());
  out.n_eval = static_cast<int>(eval_ids.size());
  if (eval_ids.empty()) throw EmptyEvalError();

  std::vector<TokenSeq> train_docs;
  for (const auto& id : train_ids) train_docs.push_back(tokens.at(id));
  TfidfVectorizer vec(cfg.max_features);
  vec.fit(train_docs);
  std::vector<SparseVec> train_X, eval_X;
  std::vector<int> train_y, eval_y;
  for (const auto& id : train_ids) {
    train_X.push_back(vec.transform(tokens.at(id)));
    train_y.push_back(gold.at(id));
  }
  for (const auto& id : eval_ids) {
    eval_X.push_back(vec.transform(tokens.at(id)));
    eval_y.push_back(gold.at(id));
  }

  for (const auto& kind : kinds) {
    ConfusionMatrix cm;
    if (kind == "nb") {
      MultinomialNB nb(cfg.nb_alpha);
      nb.fit(train_X, train_y, vec.vocab_size());
      for (std::size_t i = 0; i < eval_X.size(); ++i)
        cm.add(static_cast<Polarity>(eval_y[i]), static_cast<Polarity>(nb.predict(eval_X[i])));
    } else if (kind == "svm") {
      SvmConfig sc;
      sc.epochs = cfg.svm_epochs;
      sc.lambda = cfg.svm_lambda;
      sc.seed = substream_seed(cfg.seed, "svm");
      LinearSVM svm(sc);
      svm.fit(train_X, train_y, vec.vocab_size());
      for (std::size_t i = 0; i < eval_X.size(); ++i)
        cm.add(static_cast<Polarity>(eval_y[i]), static_cast<Polarity>(svm.predict(eval_X[i])));
    } else if (kind == "mlp") {
      std::vector<std::vector<double>> dX, vX;
      for (const auto& x : train_X) dX.push_back(sparse_to_dense(x, vec.vocab_size()));
      for (const auto& x : eval_X) vX.push_back(sparse_to_dense(x, vec.vocab_size()));
      TrainOptions opt;
      opt.epochs = cfg.mlp_epochs;
      opt.learning_rate = cfg.mlp_lr;
      opt.batch_size = cfg.mlp_batch;
      opt.hidden = cfg.mlp_hidden;
      opt.patience = cfg.mlp_patience;
      opt.seed = substream_seed(cfg.seed, "mlp:baseline");
      TrainedMLP trained = train_mlp(dX, train_y, vX, eval_y, opt);
      for (std::size_t i = 0; i < vX.size(); ++i)
        cm.add(static_cast<Polarity>(eval_y[i]), decide(forward(trained.model, vX[i])));
    } else {
      throw UsageError("unknown baseline kind '" + kind + "' (expected nb, svm, or mlp)");
    }
    ReportColumn col;
    col.name = "tfidf_" + kind;
    col.metrics = summarize(cm);
    out.columns.push_back(std::move(col));
  }

  out.report = report_json(out.columns, out.columns.front().name);
  out.report["n_messages"] = out.n_messages;
  out.report["n_labeled"] = out.n_labeled;
  out.report["n_eval"] = out.n_eval;
  out.report["seed"] = cfg.seed;
  out.report_json_text = out.report.dump(2) + "\n";
  out.report_text = report_text(out.columns, out.columns.front().name);
  if (!cfg.dump_dir.empty()) {
    std::filesystem::create_directories(cfg.dump_dir);
    detail::write_file(cfg.dump_dir + "/report.json", out.report_json_text);
    detail::write_file(cfg.dump_dir + "/report.txt", out.report_text);
    detail::write_file(cfg.dump_dir + "/report.csv", report_csv(out.columns));
  }
  return out;
}

// Concatenate the column sets of several report.json files into one table.
inline nlohmann::json merge_reports(const std::vector<std::string>& paths,
                                    const std::string& baseline_name) {
  std::vector<ReportColumn> cols;
  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open report: " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ": not a report json (" + e.what() + ")");
    }
    if (!j.contains("columns"))
      throw DataError(path + ": not a report json (no columns)");
    for (const auto& c : j["columns"]) {
      ReportColumn col;
      col.name = c.at("name").get<std::string>();
      col.metrics.accuracy = c.at("accuracy").get<double>();
      col.metrics.macro_precision = c.at("precision").get<double>();
      col.metrics.macro_recall = c.at("recall").get<double>();
      col.metrics.macro_f = c.at("f_measure").get<double>();
      for (int g = 0; g < 3; ++g)
        for (int p = 0; p < 3; ++p)
          col.metrics.confusion.counts[g][p] = c.at("confusion")[g][p].get<long long>();
      for (int k = 0; k < 3; ++k) {
        auto cls = to_string(static_cast<Polarity>(k));
        col.metrics.class_precision[k] = c.at("per_class").at(cls).at("precision").get<double>();
        col.metrics.class_recall[k] = c.at("per_class").at(cls).at("recall").get<double>();
        col.metrics.class_f[k] = c.at("per_class").at(cls).at("f_measure").get<double>();
      }
      if (c.contains("notes"))
        for (const auto& n : c["notes"]) col.notes.push_back(n.get<std::string>());
      cols.push_back(std::move(col));
    }
  }
  nlohmann::json merged = report_json(cols, baseline_name);
  merged["merged_text"] = report_text(cols, baseline_name);
  return merged;
}

}  // namespace sentitree
