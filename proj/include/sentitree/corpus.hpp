#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sentitree/csv.hpp"
#include "sentitree/errors.hpp"
#include "sentitree/polarity.hpp"

namespace sentitree {

// One tweet or retweet. Tweet ids double as author ids: the message id is the
// key that profiles.csv rows join on.
struct Message {
  std::string id;
  std::string text;
  std::optional<std::string> retweet_of;  // absent for roots
  std::optional<Polarity> gold_label;

  bool operator==(const Message&) const = default;
};

struct FamousMember {
  std::string name;
  std::string handle;
  std::uint64_t followers = 0;
  std::string activity;

  bool operator==(const FamousMember&) const = default;
};

struct UserProfile {
  std::string id;
  std::string display_name;
  std::string bio;
  std::optional<std::string> location;
  std::set<std::string> follows;    // famous handles this user follows
  std::set<std::string> followers;  // ordinary-user ids following this user

  bool operator==(const UserProfile&) const = default;
};

struct LoadReport {
  std::vector<std::string> warnings;
  std::set<std::string> dangling;  // retweet_of values that point nowhere

  void warn(const std::string& msg) { warnings.push_back(msg); }
};

namespace detail {

inline bool is_null_field(const std::string& s) {
  if (s.empty()) return true;
  std::string lower;
  for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return lower == "null";
}

inline std::string require_cell(const std::vector<std::string>& row, int col) {
  return col >= 0 && static_cast<std::size_t>(col) < row.size() ? row[col] : std::string();
}

}  // namespace detail

struct MessagesLoad {
  std::vector<Message> messages;
  LoadReport report;
};

// messages.csv: Tweet_ID,Text,Retweet_ID,Label
inline MessagesLoad load_messages(const std::string& path) {
  CsvTable t = read_csv(path);
  int c_id = find_column(t.header, "Tweet_ID");
  int c_text = find_column(t.header, "Text");
  int c_parent = find_column(t.header, "Retweet_ID");
  int c_label = find_column(t.header, "Label");
  if (c_id < 0) throw MissingColumnError(path, "Tweet_ID");
  if (c_text < 0) throw MissingColumnError(path, "Text");
  if (c_parent < 0) throw MissingColumnError(path, "Retweet_ID");
  if (c_label < 0) throw MissingColumnError(path, "Label");

  MessagesLoad out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    std::size_t line = t.row_lines[i];
    Message m;
    m.id = detail::require_cell(row, c_id);
    if (m.id.empty()) throw MalformedLineError(path, line, "empty Tweet_ID");
    if (!seen.insert(m.id).second) throw DuplicateIdError(path, m.id, line);
    m.text = detail::require_cell(row, c_text);
    std::string parent = detail::require_cell(row, c_parent);
    if (!detail::is_null_field(parent)) {
      if (parent == m.id)
        throw MalformedLineError(path, line, "message retweets itself: '" + m.id + "'");
      m.retweet_of = parent;
    }
    std::string label = detail::require_cell(row, c_label);
    if (!detail::is_null_field(label)) {
      auto p = parse_polarity(label);
      if (!p) throw MalformedLineError(path, line, "unknown label '" + label + "'");
      m.gold_label = p;
    }
    out.messages.push_back(std::move(m));
  }

  // dangling parents are warnings: partial crawls are the norm, the child
  // becomes the root of its own tree downstream
  for (std::size_t i = 0; i < out.messages.size(); ++i) {
    const auto& m = out.messages[i];
    if (m.retweet_of && !seen.count(*m.retweet_of)) {
      out.report.dangling.insert(*m.retweet_of);
      out.report.warn(path + ":" + std::to_string(t.row_lines[i]) + ": dangling parent '" +
                      *m.retweet_of + "' for '" + m.id + "'");
    }
  }
  return out;
}

// famous.csv: Name,Twitter_ID,Followers,Activity
// Follower counts may use grouping commas ("11,08,90,048"); all commas in
// the numeric field are treated as separators.
inline std::vector<FamousMember> load_famous(const std::string& path, LoadReport* report = nullptr) {
  CsvTable t = read_csv(path);
  int c_name = find_column(t.header, "Name");
  int c_handle = find_column(t.header, "Twitter_ID");
  int c_followers = find_column(t.header, "Followers");
  int c_activity = find_column(t.header, "Activity");
  if (c_name < 0) throw MissingColumnError(path, "Name");
  if (c_handle < 0) throw MissingColumnError(path, "Twitter_ID");
  if (c_followers < 0) throw MissingColumnError(path, "Followers");
  if (c_activity < 0) throw MissingColumnError(path, "Activity");

  std::vector<FamousMember> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    std::size_t line = t.row_lines[i];
    FamousMember f;
    f.name = detail::require_cell(row, c_name);
    f.handle = detail::require_cell(row, c_handle);
    if (f.handle.empty()) throw MalformedLineError(path, line, "empty Twitter_ID");
    if (!seen.insert(f.handle).second) throw DuplicateIdError(path, f.handle, line);
    std::string raw = detail::require_cell(row, c_followers);
    std::string digits;
    for (char c : raw) {
      if (c == ',' || c == ' ') continue;
      if (!std::isdigit(static_cast<unsigned char>(c)))
        throw MalformedLineError(path, line, "bad follower count '" + raw + "'");
      digits.push_back(c);
    }
    f.followers = digits.empty() ? 0 : std::stoull(digits);
    f.activity = detail::require_cell(row, c_activity);
    out.push_back(std::move(f));
  }
  (void)report;
  return out;
}

// profiles.csv: ID,Name,Bio,Location
inline std::vector<UserProfile> load_profiles(const std::string& path) {
  CsvTable t = read_csv(path);
  int c_id = find_column(t.header, "ID");
  int c_name = find_column(t.header, "Name");
  int c_bio = find_column(t.header, "Bio");
  int c_loc = find_column(t.header, "Location");
  if (c_id < 0) throw MissingColumnError(path, "ID");
  if (c_name < 0) throw MissingColumnError(path, "Name");
  if (c_bio < 0) throw MissingColumnError(path, "Bio");
  if (c_loc < 0) throw MissingColumnError(path, "Location");

  std::vector<UserProfile> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    std::size_t line = t.row_lines[i];
    UserProfile p;
    p.id = detail::require_cell(row, c_id);
    if (p.id.empty()) throw MalformedLineError(path, line, "empty ID");
    if (!seen.insert(p.id).second) throw DuplicateIdError(path, p.id, line);
    p.display_name = detail::require_cell(row, c_name);
    p.bio = detail::require_cell(row, c_bio);
    std::string loc = detail::require_cell(row, c_loc);
    if (!detail::is_null_field(loc)) p.location = loc;
    out.push_back(std::move(p));
  }
  return out;
}

// edges.csv: Follower_ID,Followed_ID. Rows whose Followed_ID is a famous
// handle define `follows`; rows between ordinary users define `followers`.
inline void load_edges(const std::string& path, const std::vector<FamousMember>& famous,
                       std::vector<UserProfile>& profiles, LoadReport& report) {
  CsvTable t = read_csv(path);
  int c_from = find_column(t.header, "Follower_ID");
  int c_to = find_column(t.header, "Followed_ID");
  if (c_from < 0) throw MissingColumnError(path, "Follower_ID");
  if (c_to < 0) throw MissingColumnError(path, "Followed_ID");

  std::set<std::string> famous_handles;
  for (const auto& f : famous) famous_handles.insert(f.handle);
  std::map<std::string, UserProfile*> by_id;
  for (auto& p : profiles) by_id[p.id] = &p;

  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    std::size_t line = t.row_lines[i];
    std::string from = detail::require_cell(row, c_from);
    std::string to = detail::require_cell(row, c_to);
    if (from.empty() || to.empty())
      throw MalformedLineError(path, line, "empty edge endpoint");
    bool used = false;
    if (famous_handles.count(to)) {
      auto it = by_id.find(from);
      if (it != by_id.end()) {
        it->second->follows.insert(to);
        used = true;
      }
    }
    if (auto it = by_id.find(to); it != by_id.end()) {
      it->second->followers.insert(from);
      used = true;
    }
    if (!used)
      report.warn(path + ":" + std::to_string(line) + ": edge references unknown ids ('" +
                  from + "' -> '" + to + "')");
  }
}

struct Corpus {
  std::vector<Message> messages;
  std::vector<FamousMember> famous;
  std::vector<UserProfile> profiles;
  LoadReport report;

  const Message* find_message(const std::string& id) const {
    for (const auto& m : messages)
      if (m.id == id) return &m;
    return nullptr;
  }
  const UserProfile* find_profile(const std::string& id) const {
    for (const auto& p : profiles)
      if (p.id == id) return &p;
    return nullptr;
  }
  const FamousMember* find_famous(const std::string& handle) const {
    for (const auto& f : famous)
      if (f.handle == handle) return &f;
    return nullptr;
  }
};

inline Corpus load_corpus(const std::string& messages_path, const std::string& famous_path,
                          const std::string& profiles_path, const std::string& edges_path) {
  Corpus c;
  auto ml = load_messages(messages_path);
  c.messages = std::move(ml.messages);
  c.report = std::move(ml.report);
  c.famous = load_famous(famous_path);
  c.profiles = load_profiles(profiles_path);
  load_edges(edges_path, c.famous, c.profiles, c.report);
  return c;
}

inline void write_messages(const std::string& path, const std::vector<Message>& messages) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& m : messages) {
    rows.push_back({m.id, m.text, m.retweet_of ? *m.retweet_of : "null",
                    m.gold_label ? to_string(*m.gold_label) : "null"});
  }
  write_csv(path, {"Tweet_ID", "Text", "Retweet_ID", "Label"}, rows);
}

inline void write_famous(const std::string& path, const std::vector<FamousMember>& famous) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& f : famous)
    rows.push_back({f.name, f.handle, std::to_string(f.followers), f.activity});
  write_csv(path, {"Name", "Twitter_ID", "Followers", "Activity"}, rows);
}

inline void write_profiles(const std::string& path, const std::vector<UserProfile>& profiles) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& p : profiles)
    rows.push_back({p.id, p.display_name, p.bio, p.location ? *p.location : "null"});
  write_csv(path, {"ID", "Name", "Bio", "Location"}, rows);
}

inline void write_edges(const std::string& path, const std::vector<UserProfile>& profiles) {
  std::set<std::pair<std::string, std::string>> edges;
  for (const auto& p : profiles) {
    for (const auto& h : p.follows) edges.emplace(p.id, h);
    for (const auto& f : p.followers) edges.emplace(f, p.id);
  }
  std::vector<std::vector<std::string>> rows;
  for (const auto& [from, to] : edges) rows.push_back({from, to});
  write_csv(path, {"Follower_ID", "Followed_ID"}, rows);
}

}  // namespace sentitree
