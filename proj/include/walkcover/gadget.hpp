#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "walkcover/rational.hpp"
#include "walkcover/tree.hpp"

namespace walkcover {

enum class NodeKind { super_root, leaf, one_child, two_child, gadget };

// Move probabilities out of a node. For gadget nodes `parent` is 0: a gadget
// entered from below always moves up, and when entered from above it splits
// between `left` and `right`.
struct BranchProbabilities {
  Rational parent{0};
  Rational left{0};
  Rational right{0};
};

struct GadgetNode {
  std::size_t id = 0;
  NodeKind kind = NodeKind::leaf;
  std::optional<std::size_t> vertex;  // original vertex, or none for gadgets / r
  std::size_t owner = 0;              // gadget b^i_k: i
  std::size_t gadget_index = 0;       // gadget b^i_k: k
  Rational weight{1};
  std::optional<std::size_t> parent;
  std::optional<std::size_t> left;
  std::optional<std::size_t> right;
  BranchProbabilities probs;

  bool is_gadget() const { return kind == NodeKind::gadget; }
};

// Binarized, super-rooted tree T_B. Node 0 is r, node 1 is the image of the
// start vertex; ids are assigned in preorder (left before right).
struct GadgetTree {
  std::vector<GadgetNode> nodes;
  std::size_t root = 0;
  std::size_t start_node = 1;
  std::vector<std::size_t> node_of_vertex;
  std::vector<std::string> labels;
  std::size_t original_count = 0;

  const GadgetNode& node(std::size_t id) const { return nodes.at(id); }
  std::size_t size() const { return nodes.size(); }
  std::optional<std::size_t> project(std::size_t id) const { return nodes.at(id).vertex; }

  // Children-before-parents order over all nodes except r.
  std::vector<std::size_t> postorder() const {
    std::vector<std::size_t> order;
    order.reserve(nodes.size());
    for (std::size_t i = nodes.size(); i-- > 1;) order.push_back(i);
    return order;
  }

  // Node heights (leaves 0), used to schedule independent sibling work.
  std::vector<std::size_t> heights() const {
    std::vector<std::size_t> h(nodes.size(), 0);
    for (std::size_t i = nodes.size(); i-- > 0;) {
      const auto& nd = nodes[i];
      if (nd.left) h[i] = std::max(h[i], h[*nd.left] + 1);
      if (nd.right) h[i] = std::max(h[i], h[*nd.right] + 1);
    }
    return h;
  }
};

inline GadgetTree binarize(const RootedTree& rt) {
  GadgetTree gt;
  const std::size_t n = rt.vertex_count();
  gt.original_count = n;
  gt.labels = rt.tree.labels();
  gt.node_of_vertex.assign(n, 0);

  auto cond = [&](std::size_t v) { return Rational(1 / rt.parent_resistance[v]); };

  struct Pending {
    bool is_gadget;
    std::size_t vertex;  // original vertex, or gadget owner
    std::size_t k;       // gadget index
    std::size_t parent_node;
    bool as_left;
  };

  GadgetNode r;
  r.id = 0;
  r.kind = NodeKind::super_root;
  r.weight = 0;
  gt.nodes.push_back(r);

  std::vector<Pending> stack{{false, rt.start, 0, 0, true}};
  while (!stack.empty()) {
    Pending p = stack.back();
    stack.pop_back();
    GadgetNode nd;
    nd.id = gt.nodes.size();
    nd.parent = p.parent_node;
    const auto& kids = rt.children[p.vertex];
    const std::size_t d = kids.size();

    if (!p.is_gadget) {
      const std::size_t v = p.vertex;
      nd.vertex = v;
      nd.weight = cond(v);
      gt.node_of_vertex[v] = nd.id;
      const Rational cp = cond(v);
      if (d == 0) {
        nd.kind = NodeKind::leaf;
        nd.probs.parent = 1;
      } else if (d == 1) {
        nd.kind = NodeKind::one_child;
        const Rational c1 = cond(kids[0]);
        nd.probs.parent = cp / (cp + c1);
        nd.probs.left = c1 / (cp + c1);
        stack.push_back({false, kids[0], 0, nd.id, true});
      } else {
        nd.kind = NodeKind::two_child;
        const Rational c1 = cond(kids[0]);
        Rational rest = 0;
        for (std::size_t j = 1; j < d; ++j) rest += cond(kids[j]);
        const Rational total = cp + c1 + rest;
        nd.probs.parent = cp / total;
        nd.probs.left = c1 / total;
        nd.probs.right = rest / total;
        if (d == 2) stack.push_back({false, kids[1], 0, nd.id, false});
        else stack.push_back({true, v, 1, nd.id, false});
        stack.push_back({false, kids[0], 0, nd.id, true});
      }
    } else {
      // b^i_k routes to children u_{k+1}, ..., u_d (1-based).
      const std::size_t i = p.vertex, k = p.k;
      nd.kind = NodeKind::gadget;
      nd.owner = i;
      nd.gadget_index = k;
      Rational w = 0;
      for (std::size_t j = k; j < d; ++j) w += cond(kids[j]);
      nd.weight = w;
      const Rational cl = cond(kids[k]);
      nd.probs.left = cl / w;
      nd.probs.right = (w - cl) / w;
      if (k == d - 2) stack.push_back({false, kids[d - 1], 0, nd.id, false});
      else stack.push_back({true, i, k + 1, nd.id, false});
      stack.push_back({false, kids[k], 0, nd.id, true});
    }
    auto& par = gt.nodes[p.parent_node];
    if (p.as_left) par.left = nd.id;
    else par.right = nd.id;
    gt.nodes.push_back(std::move(nd));
  }
  return gt;
}

}  // namespace walkcover
