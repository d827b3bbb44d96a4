// Command-line front end: ingest, synth, run, baseline, dump-tree,
// report-merge. Exit codes: 0 ok, 1 usage, 2 data error, 3 numeric failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sentitree/corpus.hpp"
#include "sentitree/difftree.hpp"
#include "sentitree/errors.hpp"
#include "sentitree/lexicon.hpp"
#include "sentitree/pipeline.hpp"
#include "sentitree/preprocess.hpp"
#include "sentitree/synth.hpp"

namespace {

using namespace sentitree;

// Registers pipeline flags on a subcommand. A config file fills the config
// first; any flag the user actually passed then overrides it.
class PipelineFlags {
 public:
  explicit PipelineFlags(CLI::App* sub) : sub_(sub) {
    sub->add_option("--config", config_path_, "plain-text config file (key = value)");
    add_str("--messages", "messages.csv", [](PipelineConfig& c, const std::string& v) { c.messages_path = v; });
    add_str("--famous", "famous.csv", [](PipelineConfig& c, const std::string& v) { c.famous_path = v; });
    add_str("--profiles", "profiles.csv", [](PipelineConfig& c, const std::string& v) { c.profiles_path = v; });
    add_str("--edges", "edges.csv", [](PipelineConfig& c, const std::string& v) { c.edges_path = v; });
    add_str("--lexicon", "sentiment lexicon file", [](PipelineConfig& c, const std::string& v) { c.lexicon_path = v; });
    add_str("--wiki", "influencer text csv (handle,text)", [](PipelineConfig& c, const std::string& v) { c.wiki_path = v; });
    add_str("--external-predictions", "base label csv replacing the lexicon",
            [](PipelineConfig& c, const std::string& v) { c.external_predictions_path = v; });
    add_str("--stopwords", "stopword list override", [](PipelineConfig& c, const std::string& v) { c.stopwords_path = v; });
    add_str("--emoji-map", "emoticon map override", [](PipelineConfig& c, const std::string& v) { c.emoji_map_path = v; });
    add_str("--dump-dir", "directory for every intermediate artifact",
            [](PipelineConfig& c, const std::string& v) { c.dump_dir = v; });
    add_dbl("--tau", "neutral band half-width for lexicon labels", [](PipelineConfig& c, double v) { c.tau = v; });
    add_int("--depth-cap", "influence depth cap for tree propagation", [](PipelineConfig& c, int v) { c.depth_cap = v; });
    add_int("--topics", "LDA topic count", [](PipelineConfig& c, int v) { c.topics = v; });
    add_dbl("--alpha", "LDA document prior (default 50/K)", [](PipelineConfig& c, double v) { c.alpha = v; });
    add_dbl("--beta", "LDA word prior", [](PipelineConfig& c, double v) { c.beta = v; });
    add_int("--lda-iters", "Gibbs sweeps", [](PipelineConfig& c, int v) { c.lda_iters = v; });
    add_dbl("--boost-lr", "boosting learning rate", [](PipelineConfig& c, double v) { c.boost.learning_rate = v; });
    add_int("--boost-depth", "boosting tree depth", [](PipelineConfig& c, int v) { c.boost.tree_depth = v; });
    add_int("--boost-iters", "boosting iterations", [](PipelineConfig& c, int v) { c.boost.iterations = v; });
    add_int("--mlp-hidden", "fusion hidden units", [](PipelineConfig& c, int v) { c.mlp_hidden = v; });
    add_int("--mlp-epochs", "fusion training epochs", [](PipelineConfig& c, int v) { c.mlp_epochs = v; });
    add_dbl("--mlp-lr", "fusion learning rate", [](PipelineConfig& c, double v) { c.mlp_lr = v; });
    add_int("--mlp-batch", "fusion batch size", [](PipelineConfig& c, int v) { c.mlp_batch = v; });
    add_int("--mlp-patience", "early-stop patience (0 disables)", [](PipelineConfig& c, int v) { c.mlp_patience = v; });
    add_int("--max-features", "tf-idf vocabulary cap", [](PipelineConfig& c, int v) { c.max_features = static_cast<std::size_t>(v); });
    add_int("--svm-epochs", "svm epochs", [](PipelineConfig& c, int v) { c.svm_epochs = v; });
    add_dbl("--svm-lambda", "svm regularization", [](PipelineConfig& c, double v) { c.svm_lambda = v; });
    add_dbl("--nb-alpha", "naive bayes smoothing", [](PipelineConfig& c, double v) { c.nb_alpha = v; });
    add_u64("--seed", "root random seed", [](PipelineConfig& c, std::uint64_t v) { c.seed = v; });
  }

  PipelineConfig resolve() const {
    PipelineConfig cfg;
    if (!config_path_.empty()) apply_config_map(cfg, parse_config_file(config_path_), config_path_);
    for (const auto& [opt, fn] : appliers_)
      if (opt->count() > 0) fn(cfg);
    return cfg;
  }

 private:
  void add_str(const std::string& name, const std::string& desc,
               std::function<void(PipelineConfig&, const std::string&)> set) {
    auto v = std::make_shared<std::string>();
    auto* opt = sub_->add_option(name, *v, desc);
    appliers_.emplace_back(opt, [v, set](PipelineConfig& c) { set(c, *v); });
  }
  void add_dbl(const std::string& name, const std::string& desc,
               std::function<void(PipelineConfig&, double)> set) {
    auto v = std::make_shared<double>();
    auto* opt = sub_->add_option(name, *v, desc);
    appliers_.emplace_back(opt, [v, set](PipelineConfig& c) { set(c, *v); });
  }
  void add_int(const std::string& name, const std::string& desc,
               std::function<void(PipelineConfig&, int)> set) {
    auto v = std::make_shared<int>();
    auto* opt = sub_->add_option(name, *v, desc);
    appliers_.emplace_back(opt, [v, set](PipelineConfig& c) { set(c, *v); });
  }
  void add_u64(const std::string& name, const std::string& desc,
               std::function<void(PipelineConfig&, std::uint64_t)> set) {
    auto v = std::make_shared<std::uint64_t>();
    auto* opt = sub_->add_option(name, *v, desc);
    appliers_.emplace_back(opt, [v, set](PipelineConfig& c) { set(c, *v); });
  }

  CLI::App* sub_;
  std::string config_path_;
  std::vector<std::pair<CLI::Option*, std::function<void(PipelineConfig&)>>> appliers_;
};

int cmd_ingest(const PipelineConfig& cfg, const std::string& out_dir) {
  Corpus corpus =
      load_corpus(cfg.messages_path, cfg.famous_path, cfg.profiles_path, cfg.edges_path);
  for (const auto& w : corpus.report.warnings) std::cerr << "warning: " << w << "\n";
  auto forest = build_forest(corpus.messages, cfg.depth_cap);
  auto heights = height_histogram(forest);
  int labeled = 0;
  for (const auto& m : corpus.messages) labeled += m.gold_label.has_value();
  std::cout << "messages: " << corpus.messages.size() << " (" << labeled << " labeled)\n"
            << "profiles: " << corpus.profiles.size() << "\n"
            << "famous:   " << corpus.famous.size() << "\n"
            << "trees:    " << forest.size() << "\n";
  std::cout << "heights:  ";
  bool first = true;
  for (const auto& [h, c] : heights) {
    if (!first) std::cout << ", ";
    std::cout << h << ":" << c;
    first = false;
  }
  std::cout << "\n";
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_messages(out_dir + "/messages.csv", corpus.messages);
    write_profiles(out_dir + "/profiles.csv", corpus.profiles);
    write_edges(out_dir + "/edges.csv", corpus.profiles);
    write_famous(out_dir + "/famous.csv", corpus.famous);
    std::cout << "canonical copies written to " << out_dir << "\n";
  }
  return 0;
}

int cmd_synth(const SynthConfig& scfg, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  SynthResult synth = generate_synthetic(scfg);
  write_synth_corpus(out_dir, synth);

  std::ofstream cfg_out(out_dir + "/run.cfg");
  cfg_out << "# generated alongside the synthetic corpus\n"
          << "messages = " << out_dir << "/messages.csv\n"
          << "famous = " << out_dir << "/famous.csv\n"
          << "profiles = " << out_dir << "/profiles.csv\n"
          << "edges = " << out_dir << "/edges.csv\n"
          << "lexicon = " << out_dir << "/lexicon.txt\n"
          << "topics = 2\n"
          << "alpha = 0.5\n"
          << "lda_iters = 300\n"
          << "boost_iters = 100\n"
          << "mlp_epochs = 150\n"
          << "seed = " << scfg.seed << "\n";
  cfg_out.close();

  auto forest = build_forest(synth.corpus.messages, 1 << 20);
  auto heights = height_histogram(forest);
  std::cout << "messages: " << synth.n_messages << "\n"
            << "trees:    " << forest.size() << "\n";
  std::cout << "heights:  ";
  bool first = true;
  for (const auto& [h, c] : heights) {
    if (!first) std::cout << ", ";
    std::cout << h << ":" << c;
    first = false;
  }
  std::cout << "\nfiles written to " << out_dir << " (run config: " << out_dir
            << "/run.cfg)\n";
  return 0;
}

int cmd_run(const PipelineConfig& cfg, const std::string& report_json_path) {
  RunOutput out = run_pipeline(cfg);
  for (const auto& w : out.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& n : out.notes) std::cerr << "note: " << n << "\n";
  std::cout << out.report_text;
  if (!report_json_path.empty()) {
    std::ofstream o(report_json_path, std::ios::binary);
    if (!o) throw DataError("cannot write " + report_json_path);
    o << out.report_json_text;
  }
  return 0;
}

int cmd_baseline(const PipelineConfig& cfg, const std::string& kind,
                 const std::string& report_json_path) {
  std::vector<std::string> kinds;
  if (kind == "all") kinds = {"nb", "svm", "mlp"};
  else kinds = {kind};
  RunOutput out = run_baseline(cfg, kinds);
  for (const auto& w : out.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << out.report_text;
  if (!report_json_path.empty()) {
    std::ofstream o(report_json_path, std::ios::binary);
    if (!o) throw DataError("cannot write " + report_json_path);
    o << out.report_json_text;
  }
  return 0;
}

int cmd_dump_tree(const PipelineConfig& cfg, const std::string& root_id,
                  const std::string& out_path) {
  auto ml = load_messages(cfg.messages_path);
  auto forest = build_forest(ml.messages, cfg.depth_cap);

  std::map<std::string, Polarity> base;
  if (!cfg.lexicon_path.empty()) {
    SentimentLexicon lex = load_sentiwordnet(cfg.lexicon_path);
    PreprocessConfig pre;
    for (const auto& m : ml.messages)
      base[m.id] = score_message(normalize(m.text, pre, m.id), lex, cfg.tau).label;
  } else {
    for (const auto& m : ml.messages) base[m.id] = Polarity::Neutral;
  }

  for (const auto& tree : forest) {
    bool hit = tree.root().id == root_id;
    for (const auto& n : tree.nodes) hit = hit || n.id == root_id;
    if (!hit) continue;
    std::map<std::string, PropagationResult> results;
    results.emplace(tree.root().id, propagate(tree, base));
    std::vector<DiffusionTree> one{tree};
    nlohmann::json j = detail::forest_json(one, base, results)[0];
    std::string text = j.dump(2) + "\n";
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream o(out_path, std::ios::binary);
      if (!o) throw DataError("cannot write " + out_path);
      o << text;
    }
    return 0;
  }
  throw DataError("no tree contains message id '" + root_id + "'");
}

int cmd_report_merge(const std::vector<std::string>& paths, const std::string& baseline,
                     const std::string& out_path) {
  nlohmann::json merged = merge_reports(paths, baseline);
  std::string text = merged.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream o(out_path, std::ios::binary);
    if (!o) throw DataError("cannot write " + out_path);
    o << text;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid emotional-state classification over retweet cascades"};
  app.require_subcommand(1);

  auto* ingest = app.add_subcommand("ingest", "validate a corpus and print a summary");
  PipelineFlags ingest_flags(ingest);
  std::string ingest_out;
  ingest->add_option("--out-dir", ingest_out, "write canonicalized csv copies here");

  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus with known truth");
  SynthConfig scfg;
  std::string synth_out;
  synth->add_option("--out-dir", synth_out, "output directory")->required();
  synth->add_option("--trees", scfg.n_trees, "number of retweet trees");
  synth->add_option("--sarcasm", scfg.sarcasm_rate, "sarcastic wording probability");
  synth->add_option("--neutral-frac", scfg.neutral_frac, "objective message probability");
  synth->add_option("--max-tree-nodes", scfg.max_tree_nodes, "per-tree node cap");
  synth->add_option("--famous-per-topic", scfg.famous_per_topic, "influencers per planted topic");
  synth->add_option("--follower-pool", scfg.follower_pool, "community follower pool size");
  synth->add_option("--followers-per-user", scfg.followers_per_user, "followers drawn per user");
  synth->add_option("--seed", scfg.seed, "generator seed");

  auto* run = app.add_subcommand("run", "run the full pipeline and print the report");
  PipelineFlags run_flags(run);
  std::string run_report;
  run->add_option("--report-json", run_report, "also write report.json here");

  auto* baseline = app.add_subcommand("baseline", "tf-idf baselines over the same split");
  PipelineFlags baseline_flags(baseline);
  std::string baseline_kind = "all";
  std::string baseline_report;
  baseline->add_option("--kind", baseline_kind, "nb, svm, mlp, or all")
      ->check(CLI::IsMember({"nb", "svm", "mlp", "all"}));
  baseline->add_option("--report-json", baseline_report, "also write report.json here");

  auto* dump_tree = app.add_subcommand("dump-tree", "print one diffusion tree as json");
  PipelineFlags dump_flags(dump_tree);
  std::string dump_root, dump_out;
  dump_tree->add_option("--id", dump_root, "message id anywhere in the wanted tree")->required();
  dump_tree->add_option("--out", dump_out, "write here instead of stdout");

  auto* merge = app.add_subcommand("report-merge", "combine report.json files into one table");
  std::vector<std::string> merge_paths;
  std::string merge_baseline = "lexicon_only";
  std::string merge_out;
  merge->add_option("reports", merge_paths, "report.json files")->required();
  merge->add_option("--baseline", merge_baseline, "delta-row baseline column name");
  merge->add_option("--out", merge_out, "write here instead of stdout");

  try {
    app.parse(argc, argv);
    if (ingest->parsed()) return cmd_ingest(ingest_flags.resolve(), ingest_out);
    if (synth->parsed()) return cmd_synth(scfg, synth_out);
    if (run->parsed()) return cmd_run(run_flags.resolve(), run_report);
    if (baseline->parsed())
      return cmd_baseline(baseline_flags.resolve(), baseline_kind, baseline_report);
    if (dump_tree->parsed()) return cmd_dump_tree(dump_flags.resolve(), dump_root, dump_out);
    if (merge->parsed()) return cmd_report_merge(merge_paths, merge_baseline, merge_out);
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;  // --help stays 0, any parse failure is usage
  } catch (const sentitree::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const sentitree::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const sentitree::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
