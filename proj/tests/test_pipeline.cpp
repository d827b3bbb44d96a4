#include <gtest/gtest.h>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sentitree/corpus.hpp"
#include "sentitree/errors.hpp"
#include "sentitree/pipeline.hpp"
#include "sentitree/polarity.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using sentitree::apply_config_map;
using sentitree::Corpus;
using sentitree::DataError;
using sentitree::DegenerateDataError;
using sentitree::load_corpus;
using sentitree::MalformedLineError;
using sentitree::merge_reports;
using sentitree::parse_config_file;
using sentitree::PipelineConfig;
using sentitree::Polarity;
using sentitree::run_baseline;
using sentitree::run_pipeline;
using sentitree::RunOutput;
using sentitree::UsageError;
using sentitree::write_edges;
using sentitree::write_famous;
using sentitree::write_messages;
using sentitree::write_profiles;

const std::string kData = SENTITREE_DATA_DIR;

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("sentitree_pipe_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path path() const { return path_; }
  std::string str(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

PipelineConfig demo_config() {
  PipelineConfig cfg;
  cfg.messages_path = kData + "/demo/messages.csv";
  cfg.famous_path = kData + "/demo/famous.csv";
  cfg.profiles_path = kData + "/demo/profiles.csv";
  cfg.edges_path = kData + "/demo/edges.csv";
  cfg.lexicon_path = kData + "/lexicon_small.txt";
  cfg.wiki_path = kData + "/demo/wiki.csv";
  cfg.topics = 2;
  cfg.alpha = 0.5;
  cfg.lda_iters = 200;
  cfg.boost.iterations = 60;
  cfg.mlp_epochs = 120;
  cfg.mlp_hidden = 12;
  cfg.seed = 7;
  return cfg;
}

// one shared demo run with a dump directory, reused across the read-only tests
struct SharedRun {
  TempDir dir;
  RunOutput out;
  SharedRun() {
    PipelineConfig cfg = demo_config();
    cfg.dump_dir = dir.path().string();
    out = run_pipeline(cfg);
  }
};

SharedRun& shared_run() {
  static SharedRun run;
  return run;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(DemoRunTest, FiveAblationColumnsWithSharedEvalSplit) {
  const RunOutput& out = shared_run().out;
  ASSERT_EQ(out.columns.size(), 5u);
  const char* names[] = {"lexicon_only", "plus_diffusion", "plus_similarity",
                         "plus_interests", "full"};
  for (int i = 0; i < 5; ++i) EXPECT_EQ(out.columns[i].name, names[i]);

  EXPECT_EQ(out.n_messages, 15);
  EXPECT_EQ(out.n_labeled, 14);
  EXPECT_EQ(out.n_eval, 3);  // 20% of 14, rounded down via the 80% train cut
  for (const auto& col : out.columns) {
    EXPECT_GE(col.metrics.accuracy, 0.0);
    EXPECT_LE(col.metrics.accuracy, 1.0);
    long long total = 0;
    for (int g = 0; g < 3; ++g)
      for (int p = 0; p < 3; ++p) total += col.metrics.confusion.counts[g][p];
    EXPECT_EQ(total, 3);
  }
  ASSERT_FALSE(out.columns[0].notes.empty());
  EXPECT_NE(out.columns[0].notes[0].find("no fusion model"), std::string::npos);
}

TEST(DemoRunTest, ForestHeightsAndLabelCoverage) {
  const RunOutput& out = shared_run().out;
  std::map<int, int> want = {{0, 1}, {1, 3}, {2, 2}};
  EXPECT_EQ(out.heights, want);
  EXPECT_EQ(out.base_labels.size(), 15u);
  EXPECT_EQ(out.diffusion_labels.size(), 15u);
  // every message id is covered by both label maps
  for (const auto& [id, pol] : out.base_labels)
    EXPECT_TRUE(out.diffusion_labels.count(id)) << id;
}

TEST(DemoRunTest, DumpDirectoryHoldsAllArtifacts) {
  const SharedRun& run = shared_run();
  const char* files[] = {"report.json",    "report.txt",          "report.csv",
                         "forest.json",    "base_labels.csv",     "path_similarity.csv",
                         "similarity.csv", "topics.json",         "features.csv",
                         "heights.json",   "mlp_models.json",     "boost_model.json"};
  for (const char* f : files)
    EXPECT_TRUE(fs::exists(run.dir.path() / f)) << f << " missing";

  json mlps = json::parse(slurp(run.dir.path() / "mlp_models.json"));
  EXPECT_EQ(mlps.size(), 4u);  // every fused configuration, not the raw baseline
  for (const char* k : {"plus_diffusion", "plus_similarity", "plus_interests", "full"})
    EXPECT_TRUE(mlps.contains(k)) << k;

  json topics = json::parse(slurp(run.dir.path() / "topics.json"));
  EXPECT_EQ(topics["K"], 2);
  EXPECT_EQ(topics["phi"].size(), 2u);
  EXPECT_EQ(topics["famous_thetas"].size(), 4u);
}

TEST(DemoRunTest, ForestJsonDescribesEveryTree) {
  json forest = json::parse(slurp(shared_run().dir.path() / "forest.json"));
  ASSERT_EQ(forest.size(), 6u);

  const json* t101 = nullptr;
  for (const auto& t : forest)
    if (t["root"] == "t101") t101 = &t;
  ASSERT_NE(t101, nullptr);
  EXPECT_EQ((*t101)["height"], 2);
  ASSERT_EQ((*t101)["nodes"].size(), 4u);
  for (const auto& n : (*t101)["nodes"]) {
    EXPECT_FALSE(n["beyond_influence"].get<bool>());
    EXPECT_FALSE(n["rule"].get<std::string>().empty());
    std::string pol = n["propagated"].get<std::string>();
    EXPECT_TRUE(pol == "negative" || pol == "neutral" || pol == "positive") << pol;
    if (n["id"] == "t104") {
      EXPECT_EQ(n["parent"], "t103");
      EXPECT_EQ(n["depth"], 2);
    }
    if (n["id"] == "t101") EXPECT_TRUE(n["parent"].is_null());
  }
}

TEST(DemoRunTest, FeatureTableHasFixedWidth) {
  std::string csv = slurp(shared_run().dir.path() / "features.csv");
  std::istringstream in(csv);
  std::string line;
  ASSERT_TRUE(std::getline(in, line));
  // topics=2 gives feature width 2 + 9, plus the id and gold columns
  EXPECT_EQ(line, "message_id,f0,f1,f2,f3,f4,f5,f6,f7,f8,f9,f10,gold");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 12) << line;
  }
  EXPECT_EQ(rows, 15);
}

TEST(DemoRunTest, ReportJsonAndTextAgreeOnShape) {
  const SharedRun& run = shared_run();
  json rep = json::parse(slurp(run.dir.path() / "report.json"));
  EXPECT_EQ(rep["baseline"], "lexicon_only");
  EXPECT_EQ(rep["n_messages"], 15);
  EXPECT_EQ(rep["n_labeled"], 14);
  EXPECT_EQ(rep["n_eval"], 3);
  EXPECT_EQ(rep["seed"], 7);
  ASSERT_EQ(rep["columns"].size(), 5u);
  EXPECT_EQ(rep["columns"][0]["delta_accuracy"].get<double>(), 0.0);
  for (const auto& col : rep["columns"]) {
    for (const char* cls : {"negative", "neutral", "positive"})
      EXPECT_TRUE(col["per_class"].contains(cls));
    EXPECT_EQ(col["confusion"].size(), 3u);
  }

  std::string text = slurp(run.dir.path() / "report.txt");
  EXPECT_EQ(text, run.out.report_text);
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 6u);
  EXPECT_EQ(lines[0].rfind("Metric", 0), 0u);
  for (const char* row :
       {"Accuracy", "Precision", "Recall", "F-measure", "Delta-Accuracy"}) {
    EXPECT_NE(text.find(row), std::string::npos) << row;
  }
  for (const auto& l : lines) EXPECT_EQ(l.size(), lines[0].size());
}

TEST(PipelineTest, RepeatRunsAreByteIdentical) {
  PipelineConfig cfg = demo_config();
  RunOutput a = run_pipeline(cfg);
  RunOutput b = run_pipeline(cfg);
  EXPECT_EQ(a.report_json_text, b.report_json_text);
  EXPECT_EQ(a.report_text, b.report_text);
  EXPECT_EQ(a.base_labels, b.base_labels);
  EXPECT_EQ(a.diffusion_labels, b.diffusion_labels);
}

TEST(PipelineTest, BaseLabelsDoNotDependOnSeed) {
  PipelineConfig cfg = demo_config();
  RunOutput a = run_pipeline(cfg);
  cfg.seed = 8;
  RunOutput b = run_pipeline(cfg);
  EXPECT_EQ(a.base_labels, b.base_labels);
  EXPECT_EQ(a.heights, b.heights);
  EXPECT_EQ(a.n_eval, b.n_eval);
}

TEST(PipelineTest, AuthorsWithoutProfilesGetEmptyStandIns) {
  Corpus corpus = load_corpus(kData + "/demo/messages.csv", kData + "/demo/famous.csv",
                              kData + "/demo/profiles.csv", kData + "/demo/edges.csv");
  std::erase_if(corpus.profiles, [](const auto& p) { return p.id == "t602"; });

  TempDir dir;
  write_messages(dir.str("messages.csv"), corpus.messages);
  write_famous(dir.str("famous.csv"), corpus.famous);
  write_profiles(dir.str("profiles.csv"), corpus.profiles);
  write_edges(dir.str("edges.csv"), corpus.profiles);

  PipelineConfig cfg = demo_config();
  cfg.messages_path = dir.str("messages.csv");
  cfg.famous_path = dir.str("famous.csv");
  cfg.profiles_path = dir.str("profiles.csv");
  cfg.edges_path = dir.str("edges.csv");
  RunOutput out = run_pipeline(cfg);
  ASSERT_EQ(out.columns.size(), 5u);
  bool warned = false;
  for (const auto& w : out.warnings)
    warned |= w.find("no profile for author 't602'") != std::string::npos;
  EXPECT_TRUE(warned);
}

TEST(PipelineTest, NoFollowEdgesCollapsesInterestGrouping) {
  Corpus corpus = load_corpus(kData + "/demo/messages.csv", kData + "/demo/famous.csv",
                              kData + "/demo/profiles.csv", kData + "/demo/edges.csv");
  TempDir dir;
  write_messages(dir.str("messages.csv"), corpus.messages);
  write_famous(dir.str("famous.csv"), corpus.famous);
  write_profiles(dir.str("profiles.csv"), corpus.profiles);
  write_edges(dir.str("edges.csv"), {});  // header only, nobody follows anyone

  PipelineConfig cfg = demo_config();
  cfg.messages_path = dir.str("messages.csv");
  cfg.famous_path = dir.str("famous.csv");
  cfg.profiles_path = dir.str("profiles.csv");
  cfg.edges_path = dir.str("edges.csv");
  cfg.dump_dir = dir.str("dump");
  RunOutput out = run_pipeline(cfg);

  bool noted = false;
  for (const auto& n : out.notes)
    noted |= n.find("interest grouping degenerate") != std::string::npos;
  EXPECT_TRUE(noted);
  // the note reaches every report column
  for (const auto& col : out.columns) {
    bool found = false;
    for (const auto& n : col.notes)
      found |= n.find("interest grouping degenerate") != std::string::npos;
    EXPECT_TRUE(found) << col.name;
  }
  // no grouping model was trained, so no dump of one
  EXPECT_FALSE(fs::exists(fs::path(cfg.dump_dir) / "boost_model.json"));
  EXPECT_TRUE(fs::exists(fs::path(cfg.dump_dir) / "report.json"));
}

TEST(PipelineTest, FewerThanTenGoldLabelsIsDegenerate) {
  Corpus corpus = load_corpus(kData + "/demo/messages.csv", kData + "/demo/famous.csv",
                              kData + "/demo/profiles.csv", kData + "/demo/edges.csv");
  int kept = 0;
  for (auto& m : corpus.messages)
    if (m.gold_label && ++kept > 5) m.gold_label.reset();

  TempDir dir;
  write_messages(dir.str("messages.csv"), corpus.messages);
  PipelineConfig cfg = demo_config();
  cfg.messages_path = dir.str("messages.csv");
  EXPECT_THROW(run_pipeline(cfg), DegenerateDataError);
}

TEST(ConfigTest, ParsesCommentsBlanksAndCrlf) {
  TempDir dir;
  std::ofstream f(dir.str("run.cfg"), std::ios::binary);
  f << "# full comment line\r\n"
    << "\r\n"
    << "tau = 0.2   # trailing comment\n"
    << "  topics=3\n"
    << "seed = 11\n"
    << "messages = some/path.csv\n";
  f.close();

  auto kv = parse_config_file(dir.str("run.cfg"));
  EXPECT_EQ(kv.size(), 4u);
  PipelineConfig cfg;
  apply_config_map(cfg, kv, "run.cfg");
  EXPECT_DOUBLE_EQ(cfg.tau, 0.2);
  EXPECT_EQ(cfg.topics, 3);
  EXPECT_EQ(cfg.seed, 11u);
  EXPECT_EQ(cfg.messages_path, "some/path.csv");
  // untouched keys keep their defaults
  EXPECT_EQ(cfg.depth_cap, 4);
  EXPECT_DOUBLE_EQ(cfg.boost.learning_rate, 0.1);
}

TEST(ConfigTest, RejectsMalformedFiles) {
  TempDir dir;
  EXPECT_THROW(parse_config_file(dir.str("absent.cfg")), DataError);

  {
    std::ofstream f(dir.str("noeq.cfg"));
    f << "tau 0.2\n";
  }
  EXPECT_THROW(parse_config_file(dir.str("noeq.cfg")), MalformedLineError);

  {
    std::ofstream f(dir.str("nokey.cfg"));
    f << "= 0.2\n";
  }
  EXPECT_THROW(parse_config_file(dir.str("nokey.cfg")), MalformedLineError);

  PipelineConfig cfg;
  EXPECT_THROW(apply_config_map(cfg, {{"no_such_key", "1"}}, "x"), DataError);
  EXPECT_THROW(apply_config_map(cfg, {{"tau", "abc"}}, "x"), DataError);
  EXPECT_THROW(apply_config_map(cfg, {{"tau", "0.2xyz"}}, "x"), DataError);
  try {
    apply_config_map(cfg, {{"no_such_key", "1"}}, "run.cfg");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("no_such_key"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("run.cfg"), std::string::npos);
  }
}

TEST(BaselineTest, RunsAllThreeKindsOnTheSharedSplit) {
  PipelineConfig cfg = demo_config();
  RunOutput out = run_baseline(cfg, {"nb", "svm", "mlp"});
  ASSERT_EQ(out.columns.size(), 3u);
  EXPECT_EQ(out.columns[0].name, "tfidf_nb");
  EXPECT_EQ(out.columns[1].name, "tfidf_svm");
  EXPECT_EQ(out.columns[2].name, "tfidf_mlp");
  EXPECT_EQ(out.n_labeled, 14);
  EXPECT_EQ(out.n_eval, 3);
  for (const auto& col : out.columns) {
    EXPECT_GE(col.metrics.accuracy, 0.0);
    EXPECT_LE(col.metrics.accuracy, 1.0);
  }
  EXPECT_THROW(run_baseline(cfg, {"forest"}), UsageError);
}

TEST(BaselineTest, ExternalPredictionsReplaceTheLexicon) {
  Corpus corpus = load_corpus(kData + "/demo/messages.csv", kData + "/demo/famous.csv",
                              kData + "/demo/profiles.csv", kData + "/demo/edges.csv");
  TempDir dir;
  {
    std::ofstream f(dir.str("preds.csv"));
    f << "message_id,score,label\n";
    for (const auto& m : corpus.messages) f << m.id << ",0.0,neutral\n";
  }
  PipelineConfig cfg = demo_config();
  cfg.external_predictions_path = dir.str("preds.csv");
  RunOutput out = run_pipeline(cfg);
  ASSERT_EQ(out.columns.size(), 5u);
  for (const auto& [id, pol] : out.base_labels)
    EXPECT_EQ(pol, Polarity::Neutral) << id;
  for (const auto& [id, pol] : out.diffusion_labels)
    EXPECT_EQ(pol, Polarity::Neutral) << id;
}

TEST(MergeReportsTest, ConcatenatesColumnsAcrossFiles) {
  const SharedRun& run = shared_run();
  TempDir dir;
  PipelineConfig cfg = demo_config();
  cfg.dump_dir = dir.str("bl");
  run_baseline(cfg, {"nb"});

  json merged = merge_reports(
      {run.dir.str("report.json"), dir.str("bl") + "/report.json"}, "lexicon_only");
  EXPECT_EQ(merged["baseline"], "lexicon_only");
  ASSERT_EQ(merged["columns"].size(), 6u);
  EXPECT_EQ(merged["columns"][0]["name"], "lexicon_only");
  EXPECT_EQ(merged["columns"][5]["name"], "tfidf_nb");
  EXPECT_EQ(merged["columns"][0]["delta_accuracy"].get<double>(), 0.0);
  std::string text = merged["merged_text"].get<std::string>();
  EXPECT_NE(text.find("tfidf_nb"), std::string::npos);
  EXPECT_NE(text.find("full"), std::string::npos);

  // merged metrics survive the round trip unchanged
  json original = json::parse(slurp(run.dir.path() / "report.json"));
  EXPECT_EQ(merged["columns"][4]["accuracy"], original["columns"][4]["accuracy"]);
}

TEST(MergeReportsTest, RejectsFilesThatAreNotReports) {
  TempDir dir;
  EXPECT_THROW(merge_reports({dir.str("absent.json")}, "x"), DataError);

  {
    std::ofstream f(dir.str("plain.txt"));
    f << "not json at all {\n";
  }
  EXPECT_THROW(merge_reports({dir.str("plain.txt")}, "x"), DataError);

  {
    std::ofstream f(dir.str("other.json"));
    f << "{\"rows\": []}\n";
  }
  EXPECT_THROW(merge_reports({dir.str("other.json")}, "x"), DataError);
}

}  // namespace
