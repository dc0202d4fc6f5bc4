#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "walkcover/dp.hpp"
#include "walkcover/errors.hpp"
#include "walkcover/gadget.hpp"
#include "walkcover/kernel.hpp"
#include "walkcover/numeric.hpp"
#include "walkcover/profile.hpp"
#include "walkcover/tree.hpp"

namespace walkcover {

enum class TargetSide { left, right };

// A(t): the target leaf is first reached during the t-th entry into the
// subtree and is the last vertex of that subtree to be visited.
template <class S>
struct LastVertexProfile {
  std::size_t node = 0;
  std::size_t target = 0;  // gadget node id of the target leaf
  std::vector<S> values;   // values[t - 1] = A(t)

  const S& at(std::size_t t) const { return values.at(t - 1); }
  S total() const {
    S s(0);
    for (const auto& v : values) s += v;
    return s;
  }
};

// R(t_target, t_sibling; t) for 1 <= t_target <= N, 0 <= t_sibling <= N,
// 1 <= t <= N: the t_target-th entry into the target child comes after
// t - 1 and before t parent moves, with exactly t_sibling sibling entries
// before it. The sibling axis is capped at N ("at least N"); target counts
// beyond N are not represented. One-child kernels ignore the sibling axis.
template <class S>
struct LastKernel {
  KernelClass cls = KernelClass::two_child;
  BranchProbabilities probs;  // as given, before any side swap
  TargetSide side = TargetSide::left;
  std::size_t N = 0;
  std::vector<S> table;

  const S& at(std::size_t ta, std::size_t ts, std::size_t t) const {
    return table[((t - 1) * (N + 1) + ta) * (N + 1) + ts];
  }
  S& at(std::size_t ta, std::size_t ts, std::size_t t) {
    return table[((t - 1) * (N + 1) + ta) * (N + 1) + ts];
  }
  const S& at(std::size_t ta, std::size_t t) const { return at(ta, 0, t); }
};

inline BranchProbabilities oriented(const BranchProbabilities& p, TargetSide side) {
  if (side == TargetSide::left) return p;
  return {p.parent, p.right, p.left};
}

template <class S>
LastKernel<S> build_last_kernel(KernelClass cls, const BranchProbabilities& probs, TargetSide side,
                                std::size_t N) {
  if (N == 0) throw InputError("kernel needs N >= 1");
  validate_probabilities(cls, probs);
  if (cls == KernelClass::one_child && side == TargetSide::right)
    throw InputError("one-child kernel has no right target");
  LastKernel<S> k;
  k.cls = cls;
  k.probs = probs;
  k.side = side;
  k.N = N;
  k.table.assign(N * (N + 1) * (N + 1), S(0));
  const BranchProbabilities p = oriented(probs, side);

  if (cls == KernelClass::one_child) {
    // C(t + t_l - 2, t_l - 1) p_p^(t-1) p_l^(t_l)
    detail::MultinomialTerm<S> term({p.parent, p.left, Rational(0)}, 2 * N);
    const S pl = Numeric<S>::from(p.left);
    for (std::size_t t = 1; t <= N; ++t)
      for (std::size_t ta = 1; ta <= N; ++ta) k.at(ta, 0, t) = pl * term(t - 1, ta - 1);
    return k;
  }
  if (cls == KernelClass::gadget) {
    // t = t_a + t_s, C(t - 1, t_s) p_a^(t_a) p_s^(t_s)
    detail::MultinomialTerm<S> term({p.left, p.right, Rational(0)}, N);
    const S pa = Numeric<S>::from(p.left);
    for (std::size_t t = 1; t <= N; ++t)
      for (std::size_t ta = 1; ta <= t; ++ta) k.at(ta, t - ta, t) = pa * term(ta - 1, t - ta);
    return k;
  }

  // (t + t_a + t_s - 2)! / ((t-1)! (t_a-1)! t_s!) p_p^(t-1) p_a^(t_a) p_s^(t_s)
  detail::MultinomialTerm<S> joint({p.parent, p.left, p.right}, 2 * N);
  const Rational sa = p.parent / (p.parent + p.left);
  detail::MultinomialTerm<S> target_only({sa, Rational(1 - sa), Rational(0)}, 2 * N);
  const S pa = Numeric<S>::from(p.left), ga = Numeric<S>::from(Rational(1 - sa));
  for (std::size_t t = 1; t <= N; ++t)
    for (std::size_t ta = 1; ta <= N; ++ta) {
      S row = ga * target_only(t - 1, ta - 1);
      for (std::size_t ts = 0; ts < N; ++ts) {
        k.at(ta, ts, t) = pa * joint(t - 1, ta - 1, ts);
        row -= k.at(ta, ts, t);
      }
      k.at(ta, N, t) = row;
    }
  return k;
}

// Literal sum over the last kernel table, t_target outer and t_sibling inner.
template <class S>
LastVertexProfile<S> propagate_last(const LastKernel<S>& k, std::size_t node,
                                    const LastVertexProfile<S>& target,
                                    const CoverageProfile<S>* sibling) {
  const std::size_t N = k.N;
  if (target.values.size() != N || (sibling && sibling->length() != N))
    throw InputError("profile length does not match kernel N");
  if ((k.cls == KernelClass::one_child) != (sibling == nullptr))
    throw InputError("kernel class does not match child count");
  LastVertexProfile<S> out{node, target.target, std::vector<S>(N, S(0))};
  for (std::size_t t = 1; t <= N; ++t) {
    S acc(0);
    for (std::size_t ta = 1; ta <= N; ++ta) {
      if (!sibling) {
        acc += k.at(ta, t) * target.at(ta);
        continue;
      }
      for (std::size_t ts = 1; ts <= N; ++ts) acc += k.at(ta, ts, t) * target.at(ta) * sibling->at(ts);
    }
    out.values[t - 1] = std::move(acc);
  }
  return out;
}

// Factored form of the same recursion. `k` must be built for the oriented
// probabilities (target child in the left slot).
template <class S>
LastVertexProfile<S> propagate_last(const FactoredKernel<S>& k, std::size_t node,
                                    const LastVertexProfile<S>& target,
                                    const CoverageProfile<S>* sibling) {
  const std::size_t N = k.N;
  if (target.values.size() != N || (sibling && sibling->length() != N))
    throw InputError("profile length does not match kernel N");
  if ((k.cls == KernelClass::one_child) != (sibling == nullptr))
    throw InputError("kernel class does not match child count");
  const auto& A = target.values;
  LastVertexProfile<S> out{node, target.target, std::vector<S>(N, S(0))};

  if (k.cls == KernelClass::one_child) {
    for (std::size_t t = 1; t <= N; ++t) {
      S acc(0);
      for (std::size_t a = 1; a <= N; ++a)
        if (A[a - 1] != 0) acc += k.arrangements(t - 1, a - 1) * A[a - 1];
      out.values[t - 1] = k.pl * acc;
    }
    return out;
  }

  const auto& g = sibling->values;
  if (k.cls == KernelClass::gadget) {
    for (std::size_t t = 2; t <= N; ++t) {
      S acc(0);
      for (std::size_t b = 1; b < t; ++b)
        if (A[t - b - 1] != 0) acc += k.split(t - 1, t - 1 - b) * A[t - b - 1] * g[b - 1];
      out.values[t - 1] = k.pl * acc;
    }
    return out;
  }

  const S G = g[N - 1];
  const std::vector<S> phi = detail::tail_differences(g);
  const std::size_t M = 2 * N - 2;
  // K(m) = sum_b C(m, b) x^(m-b) y^b A(m - b + 1) phi(b)
  std::vector<S> K(M + 1, S(0));
  for (std::size_t m = 0; m <= M; ++m) {
    const std::size_t lo = m >= N - 1 ? m - (N - 1) : 0, hi = std::min(m, N - 1);
    S acc(0);
    for (std::size_t b = lo; b <= hi; ++b)
      if (phi[b] != 0 && A[m - b] != 0) acc += k.split(m, m - b) * A[m - b] * phi[b];
    K[m] = std::move(acc);
  }
  for (std::size_t t = 1; t <= N; ++t) {
    const std::size_t s = t - 1;
    S acc_a(0), acc_k(0);
    for (std::size_t a = 1; a <= N; ++a)
      if (A[a - 1] != 0) acc_a += k.left_marginal(s, a - 1) * A[a - 1];
    for (std::size_t m = 0; m <= M; ++m)
      if (K[m] != 0) acc_k += k.arrangements(s, m) * K[m];
    out.values[t - 1] = G * k.go_left * acc_a + k.pl * acc_k;
  }
  return out;
}

template <class S>
struct LastVertexEntry {
  std::size_t vertex = 0;
  std::string label;
  S probability{0};  // sum of A at w_1 over t <= N; a lower bound
};

template <class S>
struct LastVertexDistribution {
  std::size_t N = 0;
  std::vector<LastVertexEntry<S>> entries;  // ordered by label
  S deficit{0};                             // 1 - sum of probabilities

  S total() const {
    S s(0);
    for (const auto& e : entries) s += e.probability;
    return s;
  }
};

// Uses the lower coverage profiles of `dp` for off-path siblings, so every
// probability is a lower bound on the exact P_last.
template <class S>
LastVertexDistribution<S> last_vertex_distribution(const GadgetTree& gt, const DpResult<S>& dp,
                                                   unsigned threads = 1,
                                                   KernelCache<S>* cache = nullptr) {
  if (dp.lower.empty()) throw InputError("last-vertex recursion needs lower profiles");
  const std::size_t N = dp.N;
  KernelCache<S> local;
  KernelCache<S>& kernels = cache ? *cache : local;

  std::vector<std::size_t> leaves;
  for (std::size_t id = 2; id < gt.size(); ++id)
    if (gt.node(id).kind == NodeKind::leaf) leaves.push_back(id);

  LastVertexDistribution<S> dist;
  dist.N = N;
  dist.entries.resize(leaves.size());
  parallel_for(leaves.size(), threads, [&](std::size_t li) {
    const std::size_t leaf = leaves[li];
    LastVertexProfile<S> A{leaf, leaf, std::vector<S>(N, S(0))};
    A.values[0] = S(1);
    std::size_t child = leaf;
    while (child != gt.start_node) {
      const std::size_t id = *gt.node(child).parent;
      const GadgetNode& nd = gt.node(id);
      const KernelClass cls = kernel_class(nd.kind);
      const TargetSide side = nd.left == child ? TargetSide::left : TargetSide::right;
      const auto k = kernels.get(cls, oriented(nd.probs, side), N);
      const CoverageProfile<S>* sibling = nullptr;
      if (cls != KernelClass::one_child)
        sibling = &dp.lower[side == TargetSide::left ? *nd.right : *nd.left];
      A = propagate_last(*k, id, A, sibling);
      child = id;
    }
    const std::size_t v = *gt.node(leaf).vertex;
    dist.entries[li] = {v, gt.labels[v], A.total()};
  });
  std::sort(dist.entries.begin(), dist.entries.end(),
            [](const auto& a, const auto& b) { return a.label < b.label; });
  dist.deficit = S(1) - dist.total();
  if (leaves.empty()) dist.deficit = S(0);
  return dist;
}

template <class S>
LastVertexDistribution<S> last_vertex_distribution(const WeightedTree& tree, std::string_view start,
                                                   std::size_t N, unsigned threads = 1) {
  if (tree.vertex_count() < 2) throw InputError("last-vertex distribution needs >= 2 vertices");
  const GadgetTree gt = binarize(attach_super_root(tree, start));
  KernelCache<S> cache;
  const auto dp = run_dp<S>(gt, N, DpOptions{threads, true}, &cache);
  return last_vertex_distribution(gt, dp, threads, &cache);
}

}  // namespace walkcover
