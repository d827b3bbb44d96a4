#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "sentitree/corpus.hpp"
#include "sentitree/difftree.hpp"
#include "sentitree/errors.hpp"

namespace sentitree {

inline std::size_t shared_follower_count(const UserProfile& a, const UserProfile& b) {
  std::size_t n = 0;
  auto ia = a.followers.begin(), ib = b.followers.begin();
  while (ia != a.followers.end() && ib != b.followers.end()) {
    if (*ia < *ib) ++ia;
    else if (*ib < *ia) ++ib;
    else { ++n; ++ia; ++ib; }
  }
  return n;
}

// Jaccard overlap of follower sets. A user is maximally similar to itself;
// two distinct users with no followers at all share nothing.
inline double pair_similarity(const UserProfile& a, const UserProfile& b) {
  if (a.id == b.id) return 1.0;
  std::size_t inter = shared_follower_count(a, b);
  std::size_t uni = a.followers.size() + b.followers.size() - inter;
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

struct PathSimilarity {
  std::map<std::string, double> jaccard_by_node;
  std::map<std::string, double> shared_by_node;  // raw mean shared-follower count
  std::map<std::string, double> jaccard_by_user;
  std::map<std::string, double> shared_by_user;
};

// For the user at node n, the mean pair similarity against the users on the
// path from n's parent up to the root, inclusive. The root scores 1.0 against
// itself (and its own follower count for the raw variant).
inline PathSimilarity path_similarity_to_root(
    const DiffusionTree& tree, const std::map<std::string, std::string>& user_of,
    const std::vector<UserProfile>& profiles) {
  std::unordered_map<std::string, const UserProfile*> by_id;
  for (const auto& p : profiles) by_id.emplace(p.id, &p);

  auto profile_of = [&](const std::string& node_id) -> const UserProfile& {
    auto u = user_of.find(node_id);
    if (u == user_of.end()) throw MissingProfileError(node_id);
    auto p = by_id.find(u->second);
    if (p == by_id.end()) throw MissingProfileError(u->second);
    return *p->second;
  };

  PathSimilarity out;
  std::map<std::string, std::vector<double>> user_jac, user_sha;
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const auto& n = tree.nodes[i];
    if (n.beyond_influence) continue;
    const UserProfile& me = profile_of(n.id);
    double jac, sha;
    if (n.parent < 0) {
      jac = 1.0;
      sha = static_cast<double>(me.followers.size());
    } else {
      double jsum = 0.0, ssum = 0.0;
      int count = 0;
      for (int a = n.parent; a >= 0; a = tree.nodes[a].parent) {
        const UserProfile& other = profile_of(tree.nodes[a].id);
        jsum += pair_similarity(me, other);
        ssum += static_cast<double>(shared_follower_count(me, other));
        ++count;
      }
      jac = jsum / count;
      sha = ssum / count;
    }
    out.jaccard_by_node[n.id] = jac;
    out.shared_by_node[n.id] = sha;
    user_jac[user_of.at(n.id)].push_back(jac);
    user_sha[user_of.at(n.id)].push_back(sha);
  }
  for (const auto& [u, v] : user_jac) {
    double s = 0.0;
    for (double x : v) s += x;
    out.jaccard_by_user[u] = s / v.size();
  }
  for (const auto& [u, v] : user_sha) {
    double s = 0.0;
    for (double x : v) s += x;
    out.shared_by_user[u] = s / v.size();
  }
  return out;
}

// user_a,user_b,jaccard,shared_count over all unordered pairs, ids sorted
inline void write_similarity_csv(const std::string& path,
                                 const std::vector<UserProfile>& profiles) {
  std::vector<const UserProfile*> sorted;
  sorted.reserve(profiles.size());
  for (const auto& p : profiles) sorted.push_back(&p);
  std::sort(sorted.begin(), sorted.end(),
            [](const UserProfile* a, const UserProfile* b) { return a->id < b->id; });
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "user_a,user_b,jaccard,shared_count\n";
  char buf[64];
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.6f", pair_similarity(*sorted[i], *sorted[j]));
      out << sorted[i]->id << ',' << sorted[j]->id << ',' << buf << ','
          << shared_follower_count(*sorted[i], *sorted[j]) << '\n';
    }
  }
}

}  // namespace sentitree
