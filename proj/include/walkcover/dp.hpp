#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "walkcover/errors.hpp"
#include "walkcover/gadget.hpp"
#include "walkcover/kernel.hpp"
#include "walkcover/parallel.hpp"
#include "walkcover/profile.hpp"

namespace walkcover {

struct DpOptions {
  unsigned threads = 1;
  bool lower = true;  // also compute the uncapped lower profiles
};

template <class S>
struct DpResult {
  std::size_t N = 0;
  std::vector<CoverageProfile<S>> upper;  // by node id; entry 0 (r) unused
  std::vector<CoverageProfile<S>> lower;  // empty unless requested
  S max_gap{0};                           // max over nodes of 1 - pre-cap P^1(N)

  const CoverageProfile<S>& root_upper() const { return upper.at(1); }
  const CoverageProfile<S>& root_lower() const { return lower.at(1); }
};

// Bottom-up over T_B. Nodes of equal height are independent and may run on
// several workers; each node's arithmetic is sequential, so results do not
// depend on the thread count.
template <class S>
DpResult<S> run_dp(const GadgetTree& gt, std::size_t N, const DpOptions& opt = {},
                   KernelCache<S>* cache = nullptr) {
  if (N == 0) throw InputError("truncation N must be >= 1");
  if (gt.size() < 2) throw InputError("gadget tree has no start node");
  KernelCache<S> local;
  KernelCache<S>& kernels = cache ? *cache : local;

  DpResult<S> res;
  res.N = N;
  res.upper.resize(gt.size());
  if (opt.lower) res.lower.resize(gt.size());

  const auto height = gt.heights();
  std::vector<std::vector<std::size_t>> levels(*std::max_element(height.begin(), height.end()) + 1);
  for (std::size_t id = 1; id < gt.size(); ++id) levels[height[id]].push_back(id);

  auto compute = [&](std::size_t id, ProfileBound bound, std::vector<CoverageProfile<S>>& into) {
    const GadgetNode& nd = gt.node(id);
    if (nd.kind == NodeKind::leaf) {
      into[id] = leaf_profile<S>(id, N, bound);
      return;
    }
    const auto kernel = kernels.get(kernel_class(nd.kind), nd.probs, N);
    const CoverageProfile<S>* right = nd.right ? &into[*nd.right] : nullptr;
    into[id] = propagate_profile(*kernel, id, into[*nd.left], right, bound);
  };

  for (const auto& level : levels) {
    parallel_for(level.size(), opt.threads, [&](std::size_t i) {
      compute(level[i], ProfileBound::upper, res.upper);
      if (opt.lower) compute(level[i], ProfileBound::lower, res.lower);
    });
  }
  for (std::size_t id = 1; id < gt.size(); ++id) {
    S gap = S(1) - res.upper[id].pre_cap;
    if (gap > res.max_gap) res.max_gap = gap;
  }
  return res;
}

}  // namespace walkcover
