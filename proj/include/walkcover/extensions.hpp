#pragma once

#include <algorithm>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "walkcover/dp.hpp"
#include "walkcover/errors.hpp"
#include "walkcover/estimate.hpp"
#include "walkcover/gadget.hpp"
#include "walkcover/hitting.hpp"
#include "walkcover/last_vertex.hpp"
#include "walkcover/rational.hpp"
#include "walkcover/tree.hpp"

namespace walkcover {

// chain: transitions of the weighted chain itself.
// subdivided: steps of the unit walk after replacing each edge of
// resistance R by a path of R unit edges.
enum class StepUnits { chain, subdivided };

inline Integer resistance_denominator_lcm(const WeightedTree& tree) {
  Integer k = 1;
  for (const auto& e : tree.edges()) mpz_lcm(k.get_mpz_t(), k.get_mpz_t(), e.resistance.get_den_mpz_t());
  return k;
}

inline WeightedTree scale_resistances(const WeightedTree& tree, const Rational& factor) {
  std::vector<Edge> edges = tree.edges();
  for (auto& e : edges) e.resistance *= factor;
  return WeightedTree::build(tree.labels(), std::move(edges));
}

// Replaces each edge of integral resistance R by a path of R unit edges.
// Inserted vertices are labelled "u~v~j".
inline WeightedTree subdivide(const WeightedTree& tree) {
  std::vector<std::string> labels = tree.labels();
  std::set<std::string> taken(labels.begin(), labels.end());
  std::vector<Edge> edges;
  for (const auto& e : tree.edges()) {
    if (e.resistance.get_den() != 1) throw InputError("subdivision needs integral resistances");
    const Integer& r = e.resistance.get_num();
    if (r > 1000000) throw ResourceError("subdivision would exceed 10^6 vertices per edge");
    const unsigned long len = r.get_ui();
    std::size_t prev = e.u;
    for (unsigned long j = 1; j < len; ++j) {
      std::string name = tree.label(e.u) + "~" + tree.label(e.v) + "~" + std::to_string(j);
      while (taken.count(name)) name += "~";
      taken.insert(name);
      labels.push_back(name);
      edges.push_back({prev, labels.size() - 1, Rational(1)});
      prev = labels.size() - 1;
    }
    edges.push_back({prev, e.v, Rational(1)});
  }
  return WeightedTree::build(std::move(labels), std::move(edges));
}

// Cover-and-return time of the conductance-weighted chain. Subdivided units
// with non-integral resistances refer to the tree scaled by the least common
// denominator k of the resistances (k <= max_scale).
inline EstimateReport cover_return_weighted(const WeightedTree& tree, std::string_view start,
                                            const EstimateOptions& opt, StepUnits units,
                                            const Integer& max_scale = Integer(1000000)) {
  WeightedTree work = tree;
  if (units == StepUnits::subdivided) {
    const Integer k = resistance_denominator_lcm(tree);
    if (k > max_scale)
      throw ResourceError("resistance denominators need scale " + k.get_str() + " > cap " +
                          max_scale.get_str());
    if (k != 1) work = scale_resistances(tree, Rational(k));
  }
  const GadgetTree gt = binarize(attach_super_root(work, start));
  // One excursion from r has expected length 2 (1 + sum C); removing the two
  // steps on (r, v1) leaves 2 sum C chain steps. Subdivided: 2 sum R.
  const Rational scale =
      units == StepUnits::chain ? 2 * work.total_conductance() : 2 * work.total_resistance();
  const Rational cap = work.total_resistance();
  return certify("weighted", tree.vertex_count(), std::string(start),
                 rational_cost(gt, work.unit_resistances()), opt,
                 [&]<class S>(std::type_identity<S>, std::size_t N) {
                   return traversal_certificate<S>(gt, N, opt.threads, scale, cap);
                 });
}

// Minimal subtree containing `keep`, with labels and edges in input order.
inline WeightedTree steiner_subtree(const WeightedTree& tree, const std::vector<std::size_t>& keep) {
  const std::size_t n = tree.vertex_count();
  if (keep.empty()) throw InputError("Steiner subtree needs at least one vertex");
  std::vector<bool> required(n, false), alive(n, true);
  for (std::size_t v : keep) required.at(v) = true;
  std::vector<std::size_t> degree(n);
  std::vector<std::size_t> queue;
  for (std::size_t v = 0; v < n; ++v) {
    degree[v] = tree.degree(v);
    if (degree[v] <= 1 && !required[v]) queue.push_back(v);
  }
  while (!queue.empty()) {
    const std::size_t v = queue.back();
    queue.pop_back();
    if (!alive[v]) continue;
    alive[v] = false;
    for (const auto& inc : tree.incident(v))
      if (alive[inc.neighbor] && --degree[inc.neighbor] <= 1 && !required[inc.neighbor])
        queue.push_back(inc.neighbor);
  }
  std::vector<std::size_t> remap(n, n);
  std::vector<std::string> labels;
  for (std::size_t v = 0; v < n; ++v)
    if (alive[v]) {
      remap[v] = labels.size();
      labels.push_back(tree.label(v));
    }
  std::vector<Edge> edges;
  for (const auto& e : tree.edges())
    if (alive[e.u] && alive[e.v]) edges.push_back({remap[e.u], remap[e.v], e.resistance});
  return WeightedTree::build(std::move(labels), std::move(edges));
}

// Expected steps on the full tree until every target has been visited and
// the walk is back at `start`. Off-subtree excursions leave the traversal
// counts inside the Steiner subtree unchanged, so the DP runs on it and only
// the excursion length uses the full tree.
inline EstimateReport cover_return_subset(const WeightedTree& tree, std::string_view start,
                                          const std::vector<std::string>& targets,
                                          const EstimateOptions& opt) {
  if (targets.empty()) throw InputError("target set is empty");
  std::vector<std::size_t> keep{tree.index_of(start)};
  for (const auto& t : targets) keep.push_back(tree.index_of(t));
  const WeightedTree sub = steiner_subtree(tree, keep);
  const GadgetTree gt = binarize(attach_super_root(sub, start));
  const Rational scale = 2 * tree.total_conductance();
  const Rational cap = sub.total_resistance();
  return certify("subset", tree.vertex_count(), std::string(start),
                 rational_cost(gt, sub.unit_resistances()), opt,
                 [&]<class S>(std::type_identity<S>, std::size_t N) {
                   return traversal_certificate<S>(gt, N, opt.threads, scale, cap);
                 });
}

// Cover time without return: C = C+ - sum_u P_last[u] H[u, start]. The
// truncated P_last values are lower bounds whose total falls short of 1 by
// tau, so the subtracted sum lies in [sum a H, sum a H + tau max H].
template <class S>
Certificate cover_time_certificate(const GadgetTree& gt, std::size_t N, unsigned threads,
                                   const Rational& scale, const Rational& cap,
                                   const std::vector<Rational>& hit_start) {
  KernelCache<S> cache;
  const auto dp = run_dp<S>(gt, N, DpOptions{threads, true}, &cache);
  const auto tb = bound_traversals(dp, cap);
  const auto dist = last_vertex_distribution(gt, dp, threads, &cache);

  Rational weighted(0), mass(0), hmax(0);
  for (const auto& e : dist.entries) {
    Rational a = Numeric<S>::to_rational(e.probability);
    if (a < 0) a = 0;
    weighted += a * hit_start[e.vertex];
    mass += a;
    hmax = std::max(hmax, hit_start[e.vertex]);
  }
  Rational tau = dist.entries.empty() ? Rational(0) : Rational(1 - mass);
  if (tau < 0) tau = 0;

  Certificate c;
  c.e_lower = Numeric<S>::to_rational(tb.lower);
  c.e_upper = Numeric<S>::to_rational(tb.upper);
  c.scale = scale;
  c.offset = -weighted;
  c.estimate = scale * c.e_lower - weighted;
  c.upper = scale * c.e_upper - weighted;
  c.lower = c.estimate - tau * hmax;
  if (c.lower < 0) c.lower = 0;
  if (c.estimate < 0) c.estimate = 0;
  if (c.upper < c.estimate) c.upper = c.estimate;
  c.delta_empirical = 2 * Numeric<S>::to_rational(tb.max_gap);
  return c;
}

// Expected steps to visit every vertex, in chain steps of the weighted walk.
inline EstimateReport cover_time(const WeightedTree& tree, std::string_view start,
                                 const EstimateOptions& opt) {
  const GadgetTree gt = binarize(attach_super_root(tree, start));
  const std::vector<Rational> hit_start = HittingTable(tree).to(tree.index_of(start));
  const Rational scale = 2 * tree.total_conductance();
  const Rational cap = tree.total_resistance();
  std::size_t leaf_paths = 0;  // one propagation per leaf per level
  for (std::size_t id = 2; id < gt.size(); ++id)
    if (gt.node(id).kind == NodeKind::leaf)
      for (std::size_t x = id; x != gt.start_node; x = *gt.node(x).parent) ++leaf_paths;
  return certify("cover", tree.vertex_count(), std::string(start),
                 rational_cost(gt, tree.unit_resistances(), leaf_paths), opt,
                 [&]<class S>(std::type_identity<S>, std::size_t N) {
                   return cover_time_certificate<S>(gt, N, opt.threads, scale, cap, hit_start);
                 });
}

}  // namespace walkcover
