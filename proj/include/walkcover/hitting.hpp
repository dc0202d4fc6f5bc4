#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "walkcover/rational.hpp"
#include "walkcover/tree.hpp"

namespace walkcover {

// Exact hitting times of the conductance-weighted walk on a tree. Across an
// edge e = (c, p) with conductance C_e, where C_sub(c) sums the conductances
// strictly below c:
//   H[c, p] = (2 C_sub(c) + C_e) / C_e
//   H[p, c] = 2 sum(C) / C_e - H[c, p]
class HittingTable {
 public:
  explicit HittingTable(const WeightedTree& tree) : tree_(tree) {
    const std::size_t n = tree.vertex_count();
    parent_.assign(n, std::nullopt);
    depth_.assign(n, 0);
    up_.assign(n, Rational(0));
    down_.assign(n, Rational(0));
    to_root_.assign(n, Rational(0));
    from_root_.assign(n, Rational(0));
    std::vector<Rational> below(n, Rational(0));
    std::vector<Rational> parent_cond(n, Rational(0));

    std::vector<std::size_t> order, stack{0};
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      order.push_back(v);
      for (const auto& inc : tree.incident(v)) {
        if (parent_[v] && *parent_[v] == inc.neighbor) continue;
        parent_[inc.neighbor] = v;
        parent_cond[inc.neighbor] = tree.conductance(inc.edge);
        depth_[inc.neighbor] = depth_[v] + 1;
        stack.push_back(inc.neighbor);
      }
    }
    const Rational total = tree.total_conductance();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const std::size_t c = *it;
      if (!parent_[c]) continue;
      below[*parent_[c]] += below[c] + parent_cond[c];
      up_[c] = (2 * below[c] + parent_cond[c]) / parent_cond[c];
      down_[c] = 2 * total / parent_cond[c] - up_[c];
    }
    for (const std::size_t v : order) {
      if (!parent_[v]) continue;
      to_root_[v] = to_root_[*parent_[v]] + up_[v];
      from_root_[v] = from_root_[*parent_[v]] + down_[v];
    }
  }

  // H[u, v] by vertex index.
  Rational operator()(std::size_t u, std::size_t v) const {
    const std::size_t w = lca(u, v);
    return to_root_[u] - to_root_[w] + from_root_[v] - from_root_[w];
  }

  Rational at(std::string_view u, std::string_view v) const {
    return (*this)(tree_.index_of(u), tree_.index_of(v));
  }

  // H[u, target] for every u.
  std::vector<Rational> to(std::size_t target) const {
    std::vector<Rational> h;
    h.reserve(tree_.vertex_count());
    for (std::size_t u = 0; u < tree_.vertex_count(); ++u) h.push_back((*this)(u, target));
    return h;
  }

  // Child-to-parent and parent-to-child values for the edge above v in the
  // table's internal rooting (vertex 0 on top); zero for vertex 0.
  const Rational& child_to_parent(std::size_t v) const { return up_.at(v); }
  const Rational& parent_to_child(std::size_t v) const { return down_.at(v); }
  std::optional<std::size_t> parent(std::size_t v) const { return parent_.at(v); }

 private:
  std::size_t lca(std::size_t u, std::size_t v) const {
    while (depth_[u] > depth_[v]) u = *parent_[u];
    while (depth_[v] > depth_[u]) v = *parent_[v];
    while (u != v) {
      u = *parent_[u];
      v = *parent_[v];
    }
    return u;
  }

  WeightedTree tree_;
  std::vector<std::optional<std::size_t>> parent_;
  std::vector<std::size_t> depth_;
  std::vector<Rational> up_, down_, to_root_, from_root_;
};

inline Rational hitting_time_exact(const WeightedTree& tree, std::string_view u, std::string_view v) {
  return HittingTable(tree).at(u, v);
}

}  // namespace walkcover
