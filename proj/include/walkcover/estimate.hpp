#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "walkcover/dp.hpp"
#include "walkcover/errors.hpp"
#include "walkcover/gadget.hpp"
#include "walkcover/numeric.hpp"
#include "walkcover/tree.hpp"
#include "walkcover/truncation.hpp"

namespace walkcover {

enum class BackendChoice { automatic, rational, floating };

// adaptive: grow N until the a-posteriori certificate meets epsilon.
// apriori: use choose_truncation's N and also apply its additive bound.
enum class TruncationPolicy { adaptive, apriori };

struct EstimateOptions {
  std::optional<Rational> epsilon;
  std::optional<std::size_t> trunc_n;
  BackendChoice backend = BackendChoice::automatic;
  unsigned precision_bits = 53;  // float backend; >53 switches to MPFR
  unsigned threads = 1;
  TruncationPolicy truncation = TruncationPolicy::adaptive;
  std::size_t max_n = 4096;
  // Automatic backend picks rationals while rational_cost(...) * N^2 stays below this.
  double rational_cost_limit = 1e6;
};

struct EstimateReport {
  std::string mode = "cover-return";
  std::size_t n = 0;
  std::string start;
  Rational estimate{0}, lower{0}, upper{0};
  Rational e_lower{0};         // E^1(1), the truncated expectation
  Rational additive_bound{0};  // certified bound on E(1) - E^1(1)
  std::size_t trunc_n = 0;
  double delta_apriori = 0;
  Rational delta_empirical{0};  // 2 max_i (1 - P^1_i(N)), diagnostic only
  Backend backend = Backend::rational;
  unsigned precision_bits = 0;
  bool exact = true;
  double wallclock_ms = 0;
};

// One evaluation at a fixed N, already mapped to the reported unit.
struct Certificate {
  Rational lower{0}, estimate{0}, upper{0};
  Rational e_lower{0}, e_upper{0};
  Rational delta_empirical{0};
  // Reported value = scale * E(1) + offset; used to fold in the a-priori bound.
  Rational scale{0}, offset{0};
};

// Per-N^2 work estimate for the exact backend: one O(N^2) propagation per
// node, plus `extra_propagations` (the last-vertex recursions in cover mode).
// Non-unit resistances make the fractions grow several times faster; the
// factor 8 is a measured rule of thumb, not a bound.
inline double rational_cost(const GadgetTree& gt, bool unit_resistances, std::size_t extra_propagations = 0) {
  const double base = static_cast<double>(gt.size() + extra_propagations);
  return unit_resistances ? base : 8.0 * base;
}

// The N grid searched by the adaptive policy: 8, 12, 16, 24, 32, 48, ...
inline std::vector<std::size_t> truncation_grid(std::size_t max_n) {
  std::vector<std::size_t> grid;
  for (std::size_t base = 8; base <= max_n; base *= 2) {
    grid.push_back(base);
    if (base + base / 2 <= max_n) grid.push_back(base + base / 2);
  }
  if (grid.empty()) grid.push_back(std::max<std::size_t>(max_n, 1));
  return grid;
}

template <class S>
struct TraversalBounds {
  S lower{0};  // E^1(1) from the capped profile
  S upper{0};
  S max_gap{0};
};

// E(1) <= S_L / L(N): a walk that has not covered within N traversals
// restarts the same experiment, so 1 - P(j + N) <= (1 - P(j)) (1 - P(N)).
// `cap` is a known global upper bound on E(1).
template <class S>
TraversalBounds<S> bound_traversals(const DpResult<S>& dp, const Rational& cap) {
  TraversalBounds<S> b;
  b.lower = expected_traversals(dp.root_upper());
  b.max_gap = dp.max_gap;
  const S cap_s = Numeric<S>::from(cap);
  const auto& low = dp.root_lower();
  const S ln = low.values.back();
  b.upper = ln > 0 ? S(expected_traversals(low) / ln) : cap_s;
  if (b.upper > cap_s) b.upper = cap_s;
  if (b.upper < b.lower) b.upper = b.lower;  // only reachable through float rounding
  return b;
}

// Cover-and-return style certificate: reported = scale * E(1).
template <class S>
Certificate traversal_certificate(const GadgetTree& gt, std::size_t N, unsigned threads,
                                  const Rational& scale, const Rational& cap) {
  auto dp = run_dp<S>(gt, N, DpOptions{threads, true});
  auto tb = bound_traversals(dp, cap);
  Certificate c;
  c.e_lower = Numeric<S>::to_rational(tb.lower);
  c.e_upper = Numeric<S>::to_rational(tb.upper);
  c.scale = scale;
  c.lower = c.estimate = scale * c.e_lower;
  c.upper = scale * c.e_upper;
  c.delta_empirical = 2 * Numeric<S>::to_rational(tb.max_gap);
  return c;
}

namespace detail {

inline bool meets_target(const Certificate& c, const Rational& eps) {
  if (c.upper == c.lower) return true;
  return c.lower > 0 && c.upper - c.lower <= eps * c.lower;
}

}  // namespace detail

// Runs `eval` (a callable taking std::type_identity<S> and N) under the
// requested backend and truncation policy and assembles the report.
// `cost` is the rational_cost estimate used by the automatic backend rule.
template <class Eval>
EstimateReport certify(std::string mode, std::size_t n, std::string start, double cost,
                       const EstimateOptions& opt, Eval&& eval) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!opt.epsilon && !opt.trunc_n) throw InputError("either epsilon or N is required");
  if (opt.epsilon && *opt.epsilon <= 0) throw InputError("epsilon must be positive");
  if (opt.trunc_n && *opt.trunc_n == 0) throw InputError("N must be >= 1");
  if (opt.precision_bits < 53 && opt.backend != BackendChoice::rational)
    throw InputError("float precision must be at least 53 bits");

  const Backend float_backend = opt.precision_bits > 53 ? Backend::mpfr : Backend::float64;
  if (float_backend == Backend::mpfr) set_float_precision_bits(opt.precision_bits);

  auto run = [&](Backend b, std::size_t N) -> Certificate {
    switch (b) {
      case Backend::rational: return eval(std::type_identity<Rational>{}, N);
      case Backend::float64: return eval(std::type_identity<double>{}, N);
      case Backend::mpfr: return eval(std::type_identity<Mpfr>{}, N);
    }
    return {};
  };
  auto rational_affordable = [&](std::size_t N) {
    return cost * static_cast<double>(N) * static_cast<double>(N) <= opt.rational_cost_limit;
  };
  auto pick_fixed = [&](std::size_t N) {
    if (opt.backend == BackendChoice::rational) return Backend::rational;
    if (opt.backend == BackendChoice::floating) return float_backend;
    return rational_affordable(N) ? Backend::rational : float_backend;
  };

  Backend chosen = Backend::rational;
  Certificate cert;
  std::size_t N = 0;
  if (opt.trunc_n) {
    N = *opt.trunc_n;
    chosen = pick_fixed(N);
    cert = run(chosen, N);
  } else if (opt.truncation == TruncationPolicy::apriori) {
    const TruncationParams tp = choose_truncation(n, *opt.epsilon, opt.max_n);
    N = tp.N;
    chosen = pick_fixed(N);
    cert = run(chosen, N);
    const Rational alt = cert.scale * (cert.e_lower + Rational(tp.additive_bound)) + cert.offset;
    if (alt < cert.upper) {
      cert.upper = std::max(alt, cert.estimate);
      cert.e_upper = cert.e_lower + Rational(tp.additive_bound);
    }
  } else {
    const Rational& eps = *opt.epsilon;
    const auto grid = truncation_grid(opt.max_n);
    auto search = [&](Backend b, std::size_t from) -> std::optional<std::size_t> {
      for (std::size_t i = from; i < grid.size(); ++i) {
        cert = run(b, grid[i]);
        N = grid[i];
        if (detail::meets_target(cert, eps)) return i;
      }
      return std::nullopt;
    };
    auto exhausted = [&] {
      return ResourceError("no N <= " + std::to_string(opt.max_n) +
                           " certifies the requested epsilon; relax epsilon or raise the N cap");
    };
    if (opt.backend == BackendChoice::floating) {
      chosen = float_backend;
      if (!search(chosen, 0)) throw exhausted();
    } else {
      // Locate N cheaply in floating point, then confirm (and if needed
      // extend) in exact arithmetic.
      auto hit = search(float_backend, 0);
      if (!hit) throw exhausted();
      if (opt.backend == BackendChoice::automatic && !rational_affordable(grid[*hit])) {
        chosen = float_backend;
      } else {
        chosen = Backend::rational;
        if (!search(Backend::rational, *hit)) throw exhausted();
      }
    }
  }

  EstimateReport r;
  r.mode = std::move(mode);
  r.n = n;
  r.start = std::move(start);
  r.estimate = cert.estimate;
  r.lower = cert.lower;
  r.upper = cert.upper;
  r.e_lower = cert.e_lower;
  r.additive_bound = cert.e_upper - cert.e_lower;
  r.trunc_n = N;
  r.delta_apriori = apriori_delta(n, N);
  r.delta_empirical = cert.delta_empirical;
  r.backend = chosen;
  r.exact = chosen == Backend::rational;
  r.precision_bits = r.exact ? 0 : opt.precision_bits;
  r.wallclock_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

// Expected steps to visit every vertex and come back to `start` on a tree
// with unit resistances.
inline EstimateReport cover_return_time(const WeightedTree& tree, std::string_view start,
                                        const EstimateOptions& opt) {
  if (!tree.unit_resistances())
    throw InputError("cover-return mode needs unit resistances; use the weighted mode");
  const GadgetTree gt = binarize(attach_super_root(tree, start));
  const std::size_t n = tree.vertex_count();
  const Rational scale = 2 * Rational(n - 1);
  const Rational cap(n - 1);  // C+ <= 2(n-1)^2
  return certify("cover-return", n, std::string(start), rational_cost(gt, true), opt,
                 [&]<class S>(std::type_identity<S>, std::size_t N) {
                   return traversal_certificate<S>(gt, N, opt.threads, scale, cap);
                 });
}

}  // namespace walkcover
