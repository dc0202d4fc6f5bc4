#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "walkcover/errors.hpp"
#include "walkcover/gadget.hpp"
#include "walkcover/oracles/rng.hpp"
#include "walkcover/parallel.hpp"
#include "walkcover/tree.hpp"

namespace walkcover::oracles {

struct McResult {
  std::size_t samples = 0;
  double mean = 0;
  double stddev = 0;
  double half_width = 0;  // 99% normal-approximation half-width
  std::uint64_t seed = 0;

  double standard_error() const { return samples ? stddev / std::sqrt(double(samples)) : 0.0; }
};

enum class McTask { cover_return, cover };

namespace detail {

// Neighbour tables; transition probabilities proportional to conductance.
class Walker {
 public:
  explicit Walker(const WeightedTree& tree) : unit_(tree.unit_resistances()) {
    const std::size_t n = tree.vertex_count();
    nbr_.resize(n);
    cum_.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
      double total = 0;
      for (const auto& inc : tree.incident(v)) {
        nbr_[v].push_back(inc.neighbor);
        total += tree.conductance(inc.edge).get_d();
        cum_[v].push_back(total);
      }
      for (auto& c : cum_[v]) c /= total;
    }
  }

  std::size_t step(std::size_t x, Stream& rng) const {
    const auto& nb = nbr_[x];
    if (unit_) return nb[rng.below(nb.size())];
    const double u = rng.unit();
    const auto& cum = cum_[x];
    for (std::size_t j = 0; j + 1 < cum.size(); ++j)
      if (u < cum[j]) return nb[j];
    return nb.back();
  }

 private:
  bool unit_;
  std::vector<std::vector<std::size_t>> nbr_;
  std::vector<std::vector<double>> cum_;
};

inline McResult summarize(const std::vector<double>& xs, std::uint64_t seed) {
  McResult r;
  r.samples = xs.size();
  r.seed = seed;
  long double sum = 0;
  for (double x : xs) sum += x;
  const long double mean = sum / static_cast<long double>(xs.size());
  long double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  r.mean = static_cast<double>(mean);
  r.stddev = xs.size() > 1 ? static_cast<double>(std::sqrt(ss / (xs.size() - 1))) : 0.0;
  r.half_width = 2.5758293035489 * r.standard_error();
  return r;
}

}  // namespace detail

// Averages independent walk episodes. `targets` restricts the vertices that
// must be visited (default: all). Episode i uses Stream(seed, i).
inline McResult mc_walk(const WeightedTree& tree, std::string_view start, std::size_t samples,
                        std::uint64_t seed, McTask task,
                        const std::optional<std::vector<std::size_t>>& targets = std::nullopt,
                        unsigned threads = 1) {
  if (samples == 0) throw InputError("samples must be >= 1");
  const std::size_t n = tree.vertex_count();
  const std::size_t s = tree.index_of(start);
  std::vector<char> wanted(n, targets ? 0 : 1);
  if (targets)
    for (std::size_t v : *targets) wanted.at(v) = 1;
  wanted[s] = 1;
  std::size_t need = 0;
  for (char w : wanted) need += w;

  const detail::Walker walker(tree);
  std::vector<double> steps(samples, 0.0);
  parallel_for(samples, threads, [&](std::size_t i) {
    Stream rng(seed, i);
    std::vector<char> seen(n, 0);
    seen[s] = 1;
    std::size_t have = 1;
    std::size_t x = s;
    std::uint64_t count = 0;
    while (have < need || (task == McTask::cover_return && x != s)) {
      x = walker.step(x, rng);
      ++count;
      if (wanted[x] && !seen[x]) {
        seen[x] = 1;
        ++have;
      }
    }
    steps[i] = static_cast<double>(count);
  });
  return detail::summarize(steps, seed);
}

inline McResult mc_cover_return(const WeightedTree& tree, std::string_view start,
                                std::size_t samples, std::uint64_t seed, unsigned threads = 1) {
  return mc_walk(tree, start, samples, seed, McTask::cover_return, std::nullopt, threads);
}

inline McResult mc_cover(const WeightedTree& tree, std::string_view start, std::size_t samples,
                         std::uint64_t seed, unsigned threads = 1) {
  return mc_walk(tree, start, samples, seed, McTask::cover, std::nullopt, threads);
}

// Simulates the walk on T_B (gadget moves are instantaneous) for `steps`
// moves between projected vertices and counts transitions. Vertex index
// gt.original_count stands for the super-root.
inline std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> simulate_projection(
    const GadgetTree& gt, std::size_t steps, std::uint64_t seed) {
  const std::size_t root_label = gt.original_count;
  auto proj = [&](std::size_t id) { return id == gt.root ? root_label : *gt.node(id).vertex; };
  auto pick = [](Stream& rng, const BranchProbabilities& p, bool with_parent) {
    const double u = rng.unit();
    const double pp = with_parent ? p.parent.get_d() : 0.0;
    if (u < pp) return 0;
    if (u < pp + p.left.get_d()) return 1;
    return 2;
  };

  std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> counts;
  Stream rng(seed, 0);
  std::size_t at = gt.start_node;
  for (std::size_t k = 0; k < steps; ++k) {
    const GadgetNode& nd = gt.node(at);
    std::size_t next;
    if (at == gt.root) {
      next = gt.start_node;
    } else {
      const int move = nd.kind == NodeKind::leaf ? 0 : pick(rng, nd.probs, true);
      next = move == 0 ? *nd.parent : move == 1 ? *nd.left : *nd.right;
      if (move == 0) {
        while (next != gt.root && gt.node(next).is_gadget()) next = *gt.node(next).parent;
      } else {
        while (gt.node(next).is_gadget()) {
          const GadgetNode& g = gt.node(next);
          next = pick(rng, g.probs, false) == 1 ? *g.left : *g.right;
        }
      }
    }
    ++counts[{proj(at), proj(next)}];
    at = next;
  }
  return counts;
}

}  // namespace walkcover::oracles
