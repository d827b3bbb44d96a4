#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <tuple>
#include <string>
#include <unordered_map>
#include <vector>

#include "sentitree/corpus.hpp"
#include "sentitree/errors.hpp"
#include "sentitree/polarity.hpp"

namespace sentitree {

// Agreement keeps the shared label, positive/negative disagreement turns
// negative, and Neutral defers to the other operand.
inline Polarity combine(Polarity leaf, Polarity comparison) {
  if (leaf == Polarity::Neutral) return comparison;
  if (comparison == Polarity::Neutral) return leaf;
  if (leaf == comparison) return leaf;
  return Polarity::Negative;
}

struct TreeNode {
  std::string id;
  int parent = -1;  // index into nodes, -1 for root
  std::vector<int> children;
  int depth = 0;
  bool beyond_influence = false;  // deeper than depth_cap
};

struct DiffusionTree {
  std::vector<TreeNode> nodes;  // BFS order: index 0 is the root
  int depth_cap = 4;

  int height() const {
    int h = 0;
    for (const auto& n : nodes) h = std::max(h, n.depth);
    return h;
  }
  const TreeNode& root() const { return nodes.front(); }
  std::size_t size() const { return nodes.size(); }
};

struct ContributionTrace {
  std::string leaf_id;
  Polarity leaf_label = Polarity::Neutral;
  std::string comparison_id;
  Polarity comparison_label = Polarity::Neutral;
  Polarity contribution = Polarity::Neutral;
};

struct NodeTrace {
  std::string rule;  // "leaf", "cascade", "beyond-cap"
  std::vector<ContributionTrace> contributions;
};

struct PropagationResult {
  std::map<std::string, Polarity> propagated;
  std::map<std::string, NodeTrace> trace;
};

// Retweet links become parent edges; a missing or dangling target makes the
// message a root. Trees come out in order of root appearance, nodes in BFS
// order within each tree.
inline std::vector<DiffusionTree> build_forest(const std::vector<Message>& messages,
                                               int depth_cap = 4) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < messages.size(); ++i) index.emplace(messages[i].id, i);

  // parent index per message, -1 = root
  std::vector<int> parent(messages.size(), -1);
  for (std::size_t i = 0; i < messages.size(); ++i) {
    if (!messages[i].retweet_of) continue;
    auto it = index.find(*messages[i].retweet_of);
    if (it != index.end()) parent[i] = static_cast<int>(it->second);
  }

  // cycle check over parent chains, 0 = unseen, 1 = on current path, 2 = done
  std::vector<int> color(messages.size(), 0);
  for (std::size_t start = 0; start < messages.size(); ++start) {
    if (color[start] != 0) continue;
    std::vector<std::size_t> path;
    std::size_t cur = start;
    while (true) {
      if (color[cur] == 1) {
        std::string ids;
        bool in_cycle = false;
        for (auto p : path) {
          if (p == cur) in_cycle = true;
          if (!in_cycle) continue;
          if (!ids.empty()) ids += " -> ";
          ids += messages[p].id;
        }
        throw CycleDetectedError(ids);
      }
      if (color[cur] == 2) break;
      color[cur] = 1;
      path.push_back(cur);
      if (parent[cur] < 0) break;
      cur = static_cast<std::size_t>(parent[cur]);
    }
    for (auto p : path) color[p] = 2;
  }

  std::vector<std::vector<std::size_t>> children(messages.size());
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < messages.size(); ++i) {
    if (parent[i] < 0) roots.push_back(i);
    else children[static_cast<std::size_t>(parent[i])].push_back(i);
  }

  std::vector<DiffusionTree> forest;
  forest.reserve(roots.size());
  for (auto r : roots) {
    DiffusionTree tree;
    tree.depth_cap = depth_cap;
    // BFS so that node indices are nondecreasing in depth
    std::vector<std::pair<std::size_t, int>> queue{{r, -1}};
    for (std::size_t q = 0; q < queue.size(); ++q) {
      auto [mi, parent_node] = queue[q];
      TreeNode node;
      node.id = messages[mi].id;
      node.parent = parent_node;
      node.depth = parent_node < 0 ? 0 : tree.nodes[parent_node].depth + 1;
      node.beyond_influence = node.depth > depth_cap;
      int self = static_cast<int>(tree.nodes.size());
      if (parent_node >= 0) tree.nodes[parent_node].children.push_back(self);
      tree.nodes.push_back(std::move(node));
      for (auto c : children[mi]) queue.emplace_back(c, self);
    }
    forest.push_back(std::move(tree));
  }
  return forest;
}

// Bottom-up cascade over the within-cap part of the tree. A leaf keeps its
// base label. An internal node collects one contribution per effective leaf
// in its subtree, truncated to five levels below the node: nodes exactly five
// levels down stand in as leaves with their base labels. Each leaf l
// contributes combine(base(l), base(c)) where c is the child of the node on
// l's path, the intermediate closest to the node; a leaf that is itself that
// child contributes its own label unchanged. The node takes the plurality of
// contributions, ties resolving to Neutral. Beyond-cap nodes are excluded
// from the vote and end up with their base label if one is given, else
// Neutral.
inline PropagationResult propagate(const DiffusionTree& tree,
                                   const std::map<std::string, Polarity>& base) {
  constexpr int kPatternHeight = 5;
  const auto& nodes = tree.nodes;
  PropagationResult result;

  auto effective = [&](int i) { return !nodes[i].beyond_influence; };
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (effective(static_cast<int>(i)) && !base.count(nodes[i].id))
      throw MissingBaseLabelError(nodes[i].id);
  }

  auto effective_leaf = [&](int i) {
    for (int c : nodes[i].children)
      if (effective(c)) return false;
    return true;
  };

  std::vector<Polarity> prop(nodes.size(), Polarity::Neutral);

  // indices are BFS-ordered, so reverse order is nonincreasing depth
  for (int i = static_cast<int>(nodes.size()) - 1; i >= 0; --i) {
    const auto& n = nodes[i];
    NodeTrace t;
    if (!effective(i)) {
      auto it = base.find(n.id);
      prop[i] = it == base.end() ? Polarity::Neutral : it->second;
      t.rule = "beyond-cap";
    } else if (effective_leaf(i)) {
      prop[i] = base.at(n.id);
      t.rule = "leaf";
    } else {
      t.rule = "cascade";
      // walk the subtree to at most kPatternHeight levels below i
      std::array<int, 3> votes{0, 0, 0};
      std::vector<std::tuple<int, int, int>> stack;  // node, child-of-i, dist
      for (int c : n.children)
        if (effective(c)) stack.emplace_back(c, c, 1);
      while (!stack.empty()) {
        auto [cur, top_child, dist] = stack.back();
        stack.pop_back();
        bool is_leaf = effective_leaf(cur) || dist == kPatternHeight;
        if (is_leaf) {
          ContributionTrace ct;
          ct.leaf_id = nodes[cur].id;
          ct.leaf_label = base.at(nodes[cur].id);
          ct.comparison_id = nodes[top_child].id;
          ct.comparison_label = base.at(nodes[top_child].id);
          ct.contribution = combine(ct.leaf_label, ct.comparison_label);
          votes[static_cast<int>(ct.contribution)] += 1;
          t.contributions.push_back(std::move(ct));
        } else {
          for (int c : nodes[cur].children)
            if (effective(c)) stack.emplace_back(c, top_child, dist + 1);
        }
      }
      int best = std::max({votes[0], votes[1], votes[2]});
      int winners = (votes[0] == best) + (votes[1] == best) + (votes[2] == best);
      if (winners > 1) {
        prop[i] = Polarity::Neutral;
      } else if (votes[0] == best) {
        prop[i] = Polarity::Negative;
      } else if (votes[1] == best) {
        prop[i] = Polarity::Neutral;
      } else {
        prop[i] = Polarity::Positive;
      }
    }
    result.trace.emplace(n.id, std::move(t));
  }

  for (std::size_t i = 0; i < nodes.size(); ++i) result.propagated[nodes[i].id] = prop[i];
  return result;
}

inline std::map<int, int> height_histogram(const std::vector<DiffusionTree>& forest) {
  std::map<int, int> hist;
  for (const auto& t : forest) hist[t.height()] += 1;
  return hist;
}

}  // namespace sentitree
