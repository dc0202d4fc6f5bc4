#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "walkcover/errors.hpp"
#include "walkcover/gadget.hpp"
#include "walkcover/rational.hpp"
#include "walkcover/tree.hpp"

namespace walkcover::oracles {

struct ExactResult {
  Rational value{0};
  std::size_t states = 0;
};

namespace detail {

// Dense Gauss-Jordan over rationals; solves A X = B for k right-hand sides.
inline std::vector<std::vector<Rational>> solve(std::vector<std::vector<Rational>> A,
                                                std::vector<std::vector<Rational>> B) {
  const std::size_t n = A.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && A[piv][col] == 0) ++piv;
    if (piv == n) throw InputError("singular linear system");
    std::swap(A[piv], A[col]);
    std::swap(B[piv], B[col]);
    const Rational inv = 1 / A[col][col];
    for (auto& x : A[col]) x *= inv;
    for (auto& x : B[col]) x *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || A[r][col] == 0) continue;
      const Rational f = A[r][col];
      for (std::size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
      for (std::size_t c = 0; c < B[r].size(); ++c) B[r][c] -= f * B[col][c];
    }
  }
  return B;
}

struct Chain {
  std::vector<std::vector<std::pair<std::size_t, Rational>>> moves;  // (neighbour, probability)

  explicit Chain(const WeightedTree& tree) : moves(tree.vertex_count()) {
    for (std::size_t v = 0; v < tree.vertex_count(); ++v) {
      Rational total = 0;
      for (const auto& inc : tree.incident(v)) total += tree.conductance(inc.edge);
      for (const auto& inc : tree.incident(v))
        moves[v].push_back({inc.neighbor, tree.conductance(inc.edge) / total});
    }
  }
};

inline void check_cap(const WeightedTree& tree, std::size_t cap) {
  if (tree.vertex_count() > cap)
    throw ResourceError("exact oracle limited to " + std::to_string(cap) + " vertices");
  if (tree.vertex_count() > 30) throw ResourceError("exact oracle limited to 30 vertices");
}

// Expected hitting times H[x, target] for all x.
inline std::vector<Rational> hitting_column(const Chain& ch, std::size_t target) {
  const std::size_t n = ch.moves.size();
  std::vector<std::vector<Rational>> A(n, std::vector<Rational>(n, Rational(0)));
  std::vector<std::vector<Rational>> B(n, std::vector<Rational>(1, Rational(0)));
  for (std::size_t x = 0; x < n; ++x) {
    A[x][x] = 1;
    if (x == target) continue;
    B[x][0] = 1;
    for (const auto& [y, p] : ch.moves[x]) A[x][y] -= p;
  }
  auto X = solve(std::move(A), std::move(B));
  std::vector<Rational> h(n);
  for (std::size_t x = 0; x < n; ++x) h[x] = X[x][0];
  return h;
}

enum class Goal { cover_return, cover };

// Expected steps until every vertex of `targets` is visited (and, for
// cover_return, the walk is back at start). States are (position, visited
// targets); layers are solved from the full set downwards.
inline ExactResult expected_cover(const WeightedTree& tree, std::size_t start,
                                  std::uint32_t targets, Goal goal) {
  const Chain ch(tree);
  const std::size_t n = tree.vertex_count();
  targets |= 1u << start;
  const std::uint32_t full = targets;
  std::map<std::uint32_t, std::vector<Rational>> value;  // mask -> E[x] for all x
  std::size_t states = 0;

  const std::vector<Rational> back = hitting_column(ch, start);
  value[full] = goal == Goal::cover_return ? back : std::vector<Rational>(n, Rational(0));
  states += n;

  // Submasks of `full` containing start, in decreasing numeric order.
  std::vector<std::uint32_t> masks;
  for (std::uint32_t m = (full - 1) & full;; m = (m - 1) & full) {
    if (m & (1u << start)) masks.push_back(m);
    if (m == 0) break;
  }
  for (const std::uint32_t M : masks) {
    std::vector<std::vector<Rational>> A(n, std::vector<Rational>(n, Rational(0)));
    std::vector<std::vector<Rational>> B(n, std::vector<Rational>(1, Rational(1)));
    for (std::size_t x = 0; x < n; ++x) {
      A[x][x] = 1;
      for (const auto& [y, p] : ch.moves[x]) {
        const std::uint32_t bit = 1u << y;
        if ((full & bit) && !(M & bit)) B[x][0] += p * value.at(M | bit)[y];
        else A[x][y] -= p;
      }
    }
    auto X = solve(std::move(A), std::move(B));
    std::vector<Rational> col(n);
    for (std::size_t x = 0; x < n; ++x) col[x] = X[x][0];
    value[M] = std::move(col);
    states += n;
  }
  return {value.at(1u << start)[start], states};
}

}  // namespace detail

inline constexpr std::size_t kExactVertexCap = 12;

inline ExactResult exact_cover_return_small(const WeightedTree& tree, std::string_view start,
                                            std::size_t cap = kExactVertexCap) {
  detail::check_cap(tree, cap);
  const std::uint32_t all = (1u << tree.vertex_count()) - 1;
  return detail::expected_cover(tree, tree.index_of(start), all, detail::Goal::cover_return);
}

inline ExactResult exact_cover_small(const WeightedTree& tree, std::string_view start,
                                     std::size_t cap = kExactVertexCap) {
  detail::check_cap(tree, cap);
  const std::uint32_t all = (1u << tree.vertex_count()) - 1;
  return detail::expected_cover(tree, tree.index_of(start), all, detail::Goal::cover);
}

// Visit all of `targets` and return to start.
inline ExactResult exact_subset_cover_return_small(const WeightedTree& tree, std::string_view start,
                                                   const std::vector<std::string>& targets,
                                                   std::size_t cap = kExactVertexCap) {
  detail::check_cap(tree, cap);
  std::uint32_t mask = 0;
  for (const auto& t : targets) mask |= 1u << tree.index_of(t);
  return detail::expected_cover(tree, tree.index_of(start), mask, detail::Goal::cover_return);
}

inline Rational exact_hitting_small(const WeightedTree& tree, std::string_view u, std::string_view v,
                                    std::size_t cap = kExactVertexCap) {
  detail::check_cap(tree, cap);
  const detail::Chain ch(tree);
  return detail::hitting_column(ch, tree.index_of(v))[tree.index_of(u)];
}

// Exact P_last[u] for every vertex u != start (zero entries included).
inline std::map<std::string, Rational> exact_last_vertex_small(const WeightedTree& tree,
                                                               std::string_view start,
                                                               std::size_t cap = kExactVertexCap) {
  detail::check_cap(tree, cap);
  const detail::Chain ch(tree);
  const std::size_t n = tree.vertex_count();
  const std::size_t s = tree.index_of(start);
  std::map<std::string, Rational> out;
  if (n == 1) return out;
  const std::uint32_t full = (1u << n) - 1;
  // value[M][x][u]: probability that u is the last new vertex.
  std::map<std::uint32_t, std::vector<std::vector<Rational>>> value;
  std::vector<std::uint32_t> masks;
  for (std::uint32_t m = (full - 1) & full;; m = (m - 1) & full) {
    if (m & (1u << s)) masks.push_back(m);
    if (m == 0) break;
  }
  for (const std::uint32_t M : masks) {
    std::vector<std::vector<Rational>> A(n, std::vector<Rational>(n, Rational(0)));
    std::vector<std::vector<Rational>> B(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t x = 0; x < n; ++x) {
      A[x][x] = 1;
      for (const auto& [y, p] : ch.moves[x]) {
        const std::uint32_t bit = 1u << y;
        if (M & bit) {
          A[x][y] -= p;
        } else if ((M | bit) == full) {
          B[x][y] += p;
        } else {
          const auto& next = value.at(M | bit)[y];
          for (std::size_t u = 0; u < n; ++u) B[x][u] += p * next[u];
        }
      }
    }
    value[M] = detail::solve(std::move(A), std::move(B));
  }
  const auto& at_start = value.at(1u << s)[s];
  for (std::size_t u = 0; u < n; ++u)
    if (u != s) out[tree.label(u)] = at_start[u];
  return out;
}

// Exact coverage profile P_v(1..N) of the subtree below `vertex` in the
// super-rooted tree: the walk starts at `vertex` and each move up the
// parent edge ends one session.
inline std::vector<Rational> exact_profile_small(const RootedTree& rt, std::size_t vertex,
                                                 std::size_t N, std::size_t cap = kExactVertexCap) {
  detail::check_cap(rt.tree, cap);
  std::vector<std::size_t> members;  // subtree vertices, `vertex` first
  std::vector<std::size_t> stack{vertex};
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    members.push_back(v);
    for (auto it = rt.children[v].rbegin(); it != rt.children[v].rend(); ++it) stack.push_back(*it);
  }
  const std::size_t m = members.size();
  std::map<std::size_t, std::size_t> local;
  for (std::size_t i = 0; i < m; ++i) local[members[i]] = i;

  // Local moves: (target or m for "exit through the parent edge", probability).
  std::vector<std::vector<std::pair<std::size_t, Rational>>> moves(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t v = members[i];
    Rational total = 1 / rt.parent_resistance[v];
    for (std::size_t c : rt.children[v]) total += 1 / rt.parent_resistance[c];
    moves[i].push_back({i == 0 ? m : local.at(*rt.parent[v]), (1 / rt.parent_resistance[v]) / total});
    for (std::size_t c : rt.children[v]) moves[i].push_back({local.at(c), (1 / rt.parent_resistance[c]) / total});
  }

  const std::uint32_t full = (1u << m) - 1;
  std::vector<std::uint32_t> masks;  // connected-or-not submasks containing local 0, descending
  for (std::uint32_t M = full;; --M) {
    if (M & 1u) masks.push_back(M);
    if (M == 0) break;
  }
  // V[s][M][x]: probability of covering with s sessions left (current one included).
  std::vector<std::map<std::uint32_t, std::vector<Rational>>> V(N + 1);
  std::vector<Rational> result(N, Rational(0));
  for (std::size_t s = 1; s <= N; ++s) {
    for (const std::uint32_t M : masks) {
      if (M == full) {
        V[s][M] = std::vector<Rational>(m, Rational(1));
        continue;
      }
      std::vector<std::vector<Rational>> A(m, std::vector<Rational>(m, Rational(0)));
      std::vector<std::vector<Rational>> B(m, std::vector<Rational>(1, Rational(0)));
      for (std::size_t x = 0; x < m; ++x) {
        A[x][x] = 1;
        for (const auto& [y, p] : moves[x]) {
          if (y == m) {
            if (s > 1) B[x][0] += p * V[s - 1].at(M)[0];
          } else if (M & (1u << y)) {
            A[x][y] -= p;
          } else {
            B[x][0] += p * V[s].at(M | (1u << y))[y];
          }
        }
      }
      auto X = detail::solve(std::move(A), std::move(B));
      std::vector<Rational> col(m);
      for (std::size_t x = 0; x < m; ++x) col[x] = X[x][0];
      V[s][M] = std::move(col);
    }
    result[s - 1] = V[s].at(1u)[0];
  }
  return result;
}

// Exact profiles for every node of T_B. Original nodes use the state
// oracle; a gadget node sends each entry to one of its original children
// independently (probability proportional to conductance), so its profile is
// the multinomial convolution P_b(t) = t! D(t) with
// D_j(s) = sum_{c >= 1} D_{j-1}(s - c) P_{u_j}(c) w_j^c / c!.
inline std::vector<std::vector<Rational>> exact_gadget_profiles_small(
    const RootedTree& rt, const GadgetTree& gt, std::size_t N, std::size_t cap = kExactVertexCap) {
  std::vector<std::vector<Rational>> out(gt.size());
  std::vector<std::vector<Rational>> by_vertex(rt.vertex_count());
  for (std::size_t v = 0; v < rt.vertex_count(); ++v) by_vertex[v] = exact_profile_small(rt, v, N, cap);
  std::vector<Rational> fact(N + 1, Rational(1));
  for (std::size_t k = 1; k <= N; ++k) fact[k] = fact[k - 1] * Rational(k);

  for (std::size_t id = 1; id < gt.size(); ++id) {
    const GadgetNode& nd = gt.node(id);
    if (!nd.is_gadget()) {
      out[id] = by_vertex[*nd.vertex];
      continue;
    }
    const auto& kids = rt.children[nd.owner];
    Rational W = 0;
    for (std::size_t j = nd.gadget_index; j < kids.size(); ++j) W += 1 / rt.parent_resistance[kids[j]];
    std::vector<Rational> D(N + 1, Rational(0));
    D[0] = 1;
    for (std::size_t j = nd.gadget_index; j < kids.size(); ++j) {
      const Rational w = (1 / rt.parent_resistance[kids[j]]) / W;
      std::vector<Rational> next(N + 1, Rational(0));
      for (std::size_t s = 1; s <= N; ++s)
        for (std::size_t c = 1; c <= s; ++c) {
          if (D[s - c] == 0) continue;
          next[s] += D[s - c] * by_vertex[kids[j]][c - 1] * rational_pow(w, c) / fact[c];
        }
      D = std::move(next);
    }
    out[id].resize(N);
    for (std::size_t t = 1; t <= N; ++t) out[id][t - 1] = fact[t] * D[t];
  }
  return out;
}

}  // namespace walkcover::oracles
