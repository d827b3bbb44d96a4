#pragma once

#include <array>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "sentitree/errors.hpp"
#include "sentitree/polarity.hpp"

namespace sentitree {

// counts[gold][predicted]
struct ConfusionMatrix {
  std::array<std::array<long long, 3>, 3> counts{};

  void add(Polarity gold, Polarity predicted, long long n = 1) {
    counts[static_cast<int>(gold)][static_cast<int>(predicted)] += n;
  }
  long long total() const {
    long long t = 0;
    for (const auto& row : counts)
      for (long long c : row) t += c;
    return t;
  }
  long long tp(int c) const { return counts[c][c]; }
  long long fp(int c) const {
    long long s = 0;
    for (int g = 0; g < 3; ++g)
      if (g != c) s += counts[g][c];
    return s;
  }
  long long fn(int c) const {
    long long s = 0;
    for (int p = 0; p < 3; ++p)
      if (p != c) s += counts[c][p];
    return s;
  }
  long long tn(int c) const { return total() - tp(c) - fp(c) - fn(c); }
  long long support(int c) const { return tp(c) + fn(c); }
};

inline double accuracy(const ConfusionMatrix& cm) {
  long long t = cm.total();
  if (t == 0) throw EmptyEvalError();
  long long trace = cm.tp(0) + cm.tp(1) + cm.tp(2);
  return static_cast<double>(trace) / static_cast<double>(t);
}

// 0/0 cases report 0; *_defined tells whether the ratio had a denominator
inline bool precision_defined(const ConfusionMatrix& cm, int c) { return cm.tp(c) + cm.fp(c) > 0; }
inline bool recall_defined(const ConfusionMatrix& cm, int c) { return cm.tp(c) + cm.fn(c) > 0; }

inline double precision(const ConfusionMatrix& cm, int c) {
  long long denom = cm.tp(c) + cm.fp(c);
  return denom == 0 ? 0.0 : static_cast<double>(cm.tp(c)) / static_cast<double>(denom);
}

inline double recall(const ConfusionMatrix& cm, int c) {
  long long denom = cm.tp(c) + cm.fn(c);
  return denom == 0 ? 0.0 : static_cast<double>(cm.tp(c)) / static_cast<double>(denom);
}

// 2TP / (2TP + FP + FN): one division, so the value is an exact rational
inline double f_from_counts(const ConfusionMatrix& cm, int c) {
  long long denom = 2 * cm.tp(c) + cm.fp(c) + cm.fn(c);
  return denom == 0 ? 0.0 : static_cast<double>(2 * cm.tp(c)) / static_cast<double>(denom);
}

inline double f_measure(double p, double r) {
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

inline double macro_precision(const ConfusionMatrix& cm) {
  return (precision(cm, 0) + precision(cm, 1) + precision(cm, 2)) / 3.0;
}
inline double macro_recall(const ConfusionMatrix& cm) {
  return (recall(cm, 0) + recall(cm, 1) + recall(cm, 2)) / 3.0;
}
inline double macro_f(const ConfusionMatrix& cm) {
  return (f_from_counts(cm, 0) + f_from_counts(cm, 1) + f_from_counts(cm, 2)) / 3.0;
}

// one class against the rest, for direct two-class metric parity
struct BinaryCounts {
  long long tp = 0, fp = 0, fn = 0, tn = 0;
  long long total() const { return tp + fp + fn + tn; }
};

inline BinaryCounts binary_counts(const ConfusionMatrix& cm, Polarity positive) {
  int c = static_cast<int>(positive);
  return {cm.tp(c), cm.fp(c), cm.fn(c), cm.tn(c)};
}

inline double accuracy(const BinaryCounts& b) {
  if (b.total() == 0) throw EmptyEvalError();
  return static_cast<double>(b.tp + b.tn) / static_cast<double>(b.total());
}
inline double precision(const BinaryCounts& b) {
  return b.tp + b.fp == 0 ? 0.0 : static_cast<double>(b.tp) / static_cast<double>(b.tp + b.fp);
}
inline double recall(const BinaryCounts& b) {
  return b.tp + b.fn == 0 ? 0.0 : static_cast<double>(b.tp) / static_cast<double>(b.tp + b.fn);
}
inline double f_measure(const BinaryCounts& b) {
  long long denom = 2 * b.tp + b.fp + b.fn;
  return denom == 0 ? 0.0 : static_cast<double>(2 * b.tp) / static_cast<double>(denom);
}

struct MetricsSummary {
  ConfusionMatrix confusion;
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f = 0.0;
  std::array<double, 3> class_precision{};
  std::array<double, 3> class_recall{};
  std::array<double, 3> class_f{};
  std::vector<std::string> flags;  // undefined-ratio notes
};

inline MetricsSummary summarize(const ConfusionMatrix& cm) {
  MetricsSummary s;
  s.confusion = cm;
  s.accuracy = accuracy(cm);
  s.macro_precision = macro_precision(cm);
  s.macro_recall = macro_recall(cm);
  s.macro_f = macro_f(cm);
  for (int c = 0; c < 3; ++c) {
    s.class_precision[c] = precision(cm, c);
    s.class_recall[c] = recall(cm, c);
    s.class_f[c] = f_from_counts(cm, c);
    auto cls = to_string(static_cast<Polarity>(c));
    if (!precision_defined(cm, c))
      s.flags.push_back(std::string("precision(") + cls + ") undefined, reported 0");
    if (!recall_defined(cm, c))
      s.flags.push_back(std::string("recall(") + cls + ") undefined, reported 0");
  }
  return s;
}

struct ReportColumn {
  std::string name;
  MetricsSummary metrics;
  std::vector<std::string> notes;
};

// The text table runs metric rows against configuration columns with a final
// accuracy-delta row against the named baseline column (first column if the
// name is absent).
inline std::size_t report_baseline_index(const std::vector<ReportColumn>& cols,
                                         const std::string& baseline_name) {
  for (std::size_t i = 0; i < cols.size(); ++i)
    if (cols[i].name == baseline_name) return i;
  return 0;
}

inline nlohmann::json report_json(const std::vector<ReportColumn>& cols,
                                  const std::string& baseline_name) {
  std::size_t bi = report_baseline_index(cols, baseline_name);
  nlohmann::json j;
  j["baseline"] = cols.empty() ? baseline_name : cols[bi].name;
  j["columns"] = nlohmann::json::array();
  for (const auto& col : cols) {
    nlohmann::json c;
    c["name"] = col.name;
    c["accuracy"] = col.metrics.accuracy;
    c["precision"] = col.metrics.macro_precision;
    c["recall"] = col.metrics.macro_recall;
    c["f_measure"] = col.metrics.macro_f;
    c["delta_accuracy"] = col.metrics.accuracy - cols[bi].metrics.accuracy;
    nlohmann::json per;
    for (int k = 0; k < 3; ++k) {
      nlohmann::json pc;
      pc["precision"] = col.metrics.class_precision[k];
      pc["recall"] = col.metrics.class_recall[k];
      pc["f_measure"] = col.metrics.class_f[k];
      pc["support"] = col.metrics.confusion.support(k);
      per[to_string(static_cast<Polarity>(k))] = pc;
    }
    c["per_class"] = per;
    nlohmann::json conf = nlohmann::json::array();
    for (int g = 0; g < 3; ++g) {
      nlohmann::json row = nlohmann::json::array();
      for (int p = 0; p < 3; ++p) row.push_back(col.metrics.confusion.counts[g][p]);
      conf.push_back(row);
    }
    c["confusion"] = conf;
    c["flags"] = col.metrics.flags;
    c["notes"] = col.notes;
    j["columns"].push_back(c);
  }
  return j;
}

inline std::string report_text(const std::vector<ReportColumn>& cols,
                               const std::string& baseline_name) {
  std::size_t bi = report_baseline_index(cols, baseline_name);
  auto fmt = [](double v, bool sign) {
    char buf[32];
    std::snprintf(buf, sizeof buf, sign ? "%+.4f" : "%.4f", v);
    return std::string(buf);
  };
  const char* row_names[] = {"Accuracy", "Precision", "Recall", "F-measure", "Delta-Accuracy"};
  std::size_t name_w = 14;  // widest row label
  std::vector<std::size_t> col_w(cols.size());
  for (std::size_t i = 0; i < cols.size(); ++i)
    col_w[i] = std::max<std::size_t>(cols[i].name.size(), 7) + 2;

  std::string out;
  auto pad = [&](const std::string& s, std::size_t w) {
    out += s;
    for (std::size_t k = s.size(); k < w; ++k) out += ' ';
  };
  pad("Metric", name_w + 2);
  for (std::size_t i = 0; i < cols.size(); ++i) pad(cols[i].name, col_w[i]);
  out += '\n';
  for (int r = 0; r < 5; ++r) {
    pad(row_names[r], name_w + 2);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const auto& m = cols[i].metrics;
      double v = 0.0;
      bool sign = false;
      switch (r) {
        case 0: v = m.accuracy; break;
        case 1: v = m.macro_precision; break;
        case 2: v = m.macro_recall; break;
        case 3: v = m.macro_f; break;
        case 4: v = m.accuracy - cols[bi].metrics.accuracy; sign = true; break;
      }
      pad(fmt(v, sign), col_w[i]);
    }
    out += '\n';
  }
  return out;
}

// metric,configuration,value rows for plotting
inline std::string report_csv(const std::vector<ReportColumn>& cols) {
  std::string out = "metric,configuration,value\n";
  char buf[32];
  const char* names[] = {"accuracy", "precision", "recall", "f_measure"};
  for (const auto& col : cols) {
    double vals[] = {col.metrics.accuracy, col.metrics.macro_precision,
                     col.metrics.macro_recall, col.metrics.macro_f};
    for (int r = 0; r < 4; ++r) {
      std::snprintf(buf, sizeof buf, "%.6f", vals[r]);
      out += names[r];
      out += ',';
      out += col.name;
      out += ',';
      out += buf;
      out += '\n';
    }
  }
  return out;
}

}  // namespace sentitree
