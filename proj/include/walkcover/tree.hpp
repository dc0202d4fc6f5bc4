#pragma once

#include <cstddef>
#include <istream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "walkcover/errors.hpp"
#include "walkcover/rational.hpp"

namespace walkcover {

struct Edge {
  std::size_t u;
  std::size_t v;
  Rational resistance{1};
};

// An undirected tree with positive rational edge resistances. Vertex indices
// follow first appearance of the label; incidence lists follow edge order.
class WeightedTree {
 public:
  struct Incidence {
    std::size_t neighbor;
    std::size_t edge;
  };

  WeightedTree() = default;

  static WeightedTree build(std::vector<std::string> labels, std::vector<Edge> edges) {
    WeightedTree t;
    t.labels_ = std::move(labels);
    t.edges_ = std::move(edges);
    t.finish();
    return t;
  }

  std::size_t vertex_count() const { return labels_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::string& label(std::size_t v) const { return labels_.at(v); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(std::size_t e) const { return edges_.at(e); }
  const std::vector<Incidence>& incident(std::size_t v) const { return adjacency_.at(v); }
  std::size_t degree(std::size_t v) const { return adjacency_.at(v).size(); }

  std::optional<std::size_t> find(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index_of(std::string_view label) const {
    if (auto v = find(label)) return *v;
    throw InputError("unknown vertex label '" + std::string(label) + "'");
  }

  Rational conductance(std::size_t e) const { return 1 / edges_.at(e).resistance; }

  bool unit_resistances() const {
    for (const auto& e : edges_)
      if (e.resistance != 1) return false;
    return true;
  }

  Rational total_resistance() const {
    Rational s = 0;
    for (const auto& e : edges_) s += e.resistance;
    return s;
  }

  Rational total_conductance() const {
    Rational s = 0;
    for (const auto& e : edges_) s += 1 / e.resistance;
    return s;
  }

 private:
  void finish() {
    if (labels_.empty()) throw InputError("tree has no vertices");
    index_.clear();
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (!index_.emplace(labels_[i], i).second)
        throw InputError("duplicate vertex label '" + labels_[i] + "'");
    if (edges_.size() + 1 != labels_.size()) {
      if (edges_.size() >= labels_.size()) throw InputError("cycle detected");
      throw InputError("tree is disconnected");
    }
    std::vector<std::size_t> root(labels_.size());
    std::iota(root.begin(), root.end(), std::size_t{0});
    auto find_root = [&](std::size_t x) {
      while (root[x] != x) x = root[x] = root[root[x]];
      return x;
    };
    adjacency_.assign(labels_.size(), {});
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const Edge& ed = edges_[e];
      if (ed.u >= labels_.size() || ed.v >= labels_.size())
        throw InputError("edge endpoint out of range");
      if (ed.resistance <= 0) throw InputError("nonpositive resistance");
      std::size_t a = find_root(ed.u), b = find_root(ed.v);
      if (a == b) throw InputError("cycle detected");
      root[a] = b;
      adjacency_[ed.u].push_back({ed.v, e});
      adjacency_[ed.v].push_back({ed.u, e});
    }
  }

  std::vector<std::string> labels_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Incidence>> adjacency_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Tree file: one edge per line, `u v` or `u v R` (R decimal or p/q), `#`
// starts a comment. A line holding a single label declares a vertex, which
// is the only way to write a one-vertex tree.
inline WeightedTree parse_tree(std::istream& in) {
  std::vector<std::string> labels;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<Edge> edges;
  std::vector<std::size_t> root;
  std::unordered_map<std::string, std::size_t> seen_pairs;

  auto vertex = [&](const std::string& name) {
    auto [it, inserted] = index.emplace(name, labels.size());
    if (inserted) {
      labels.push_back(name);
      root.push_back(root.size());
    }
    return it->second;
  };
  auto find_root = [&](std::size_t x) {
    while (root[x] != x) x = root[x] = root[root[x]];
    return x;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::vector<std::string> tok;
    for (std::string s; tokens >> s;) tok.push_back(s);
    if (tok.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (tok.size() > 3) throw InputError(where + "malformed line");
    if (tok.size() == 1) {
      vertex(tok[0]);
      continue;
    }
    if (tok[0] == tok[1]) throw InputError(where + "malformed line (self-loop)");
    Rational r = 1;
    if (tok.size() == 3) {
      try {
        r = parse_rational(tok[2]);
      } catch (const InputError&) {
        throw InputError(where + "malformed resistance '" + tok[2] + "'");
      }
      if (r <= 0) throw InputError(where + "nonpositive resistance");
    }
    std::size_t u = vertex(tok[0]), v = vertex(tok[1]);
    const std::string key =
        u < v ? tok[0] + '\0' + tok[1] : tok[1] + '\0' + tok[0];
    if (!seen_pairs.emplace(key, line_no).second)
      throw InputError(where + "duplicate edge " + tok[0] + " " + tok[1]);
    std::size_t a = find_root(u), b = find_root(v);
    if (a == b) throw InputError(where + "cycle detected");
    root[a] = b;
    edges.push_back({u, v, r});
  }
  if (labels.empty()) throw InputError("tree file has no vertices");
  if (edges.size() + 1 != labels.size()) throw InputError("tree is disconnected");
  return WeightedTree::build(std::move(labels), std::move(edges));
}

inline WeightedTree parse_tree_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_tree(in);
}

// The input tree with an extra super-root r hanging above the start vertex.
// Index n (== tree.vertex_count()) denotes r.
struct RootedTree {
  WeightedTree tree;
  std::size_t start = 0;
  std::size_t super_root = 0;
  std::vector<std::optional<std::size_t>> parent;
  std::vector<Rational> parent_resistance;        // edge to parent; 1 for (r, start)
  std::vector<std::vector<std::size_t>> children;  // ordered by input edge order
  std::vector<std::size_t> subtree_size;          // r's entry counts only originals
  std::vector<std::size_t> preorder;              // starts with r

  std::size_t vertex_count() const { return tree.vertex_count(); }
  bool is_leaf(std::size_t v) const { return children.at(v).empty(); }
};

inline RootedTree attach_super_root(const WeightedTree& tree, std::string_view start) {
  RootedTree rt;
  rt.tree = tree;
  const std::size_t n = tree.vertex_count();
  rt.start = tree.index_of(start);
  rt.super_root = n;
  rt.parent.assign(n + 1, std::nullopt);
  rt.parent_resistance.assign(n + 1, Rational(0));
  rt.children.assign(n + 1, {});
  rt.subtree_size.assign(n + 1, 0);

  rt.parent[rt.start] = rt.super_root;
  rt.parent_resistance[rt.start] = 1;
  rt.children[rt.super_root].push_back(rt.start);
  rt.preorder.push_back(rt.super_root);

  std::vector<std::size_t> stack{rt.start};
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    rt.preorder.push_back(v);
    for (const auto& inc : tree.incident(v)) {
      if (rt.parent[v] && *rt.parent[v] == inc.neighbor) continue;
      rt.parent[inc.neighbor] = v;
      rt.parent_resistance[inc.neighbor] = tree.edge(inc.edge).resistance;
      rt.children[v].push_back(inc.neighbor);
    }
    for (auto it = rt.children[v].rbegin(); it != rt.children[v].rend(); ++it)
      stack.push_back(*it);
  }
  for (auto it = rt.preorder.rbegin(); it != rt.preorder.rend(); ++it) {
    std::size_t v = *it;
    if (v == rt.super_root) continue;
    rt.subtree_size[v] += 1;
    rt.subtree_size[*rt.parent[v]] += rt.subtree_size[v];
  }
  return rt;
}

}  // namespace walkcover
