#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <future>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

#include "walkcover/errors.hpp"
#include "walkcover/gadget.hpp"
#include "walkcover/numeric.hpp"
#include "walkcover/rational.hpp"

namespace walkcover {

enum class KernelClass { two_child, one_child, gadget };

inline KernelClass kernel_class(NodeKind kind) {
  switch (kind) {
    case NodeKind::two_child: return KernelClass::two_child;
    case NodeKind::one_child: return KernelClass::one_child;
    case NodeKind::gadget: return KernelClass::gadget;
    default: throw InputError("node has no traversal kernel");
  }
}

inline void validate_probabilities(KernelClass cls, const BranchProbabilities& p) {
  switch (cls) {
    case KernelClass::two_child:
      if (p.parent <= 0 || p.left <= 0 || p.right <= 0 || p.parent + p.left + p.right != 1)
        throw InputError("two-child kernel needs positive probabilities summing to 1");
      break;
    case KernelClass::one_child:
      if (p.parent <= 0 || p.left <= 0 || p.right != 0 || p.parent + p.left != 1)
        throw InputError("one-child kernel needs positive probabilities summing to 1");
      break;
    case KernelClass::gadget:
      if (p.left <= 0 || p.right <= 0 || p.left + p.right != 1)
        throw InputError("gadget kernel needs a positive two-way split summing to 1");
      break;
  }
}

namespace detail {

// (a+b+c)! / (a! b! c!) * p0^a p1^b p2^c, exactly for rationals and in log
// space for floating scalars.
template <class S>
class MultinomialTerm {
 public:
  MultinomialTerm(std::array<Rational, 3> probs, std::size_t max_count) : probs_(probs) {
    if constexpr (Numeric<S>::exact) {
      for (std::size_t i = 0; i < 3; ++i) {
        pow_[i].reserve(max_count + 1);
        pow_[i].push_back(Rational(1));
        for (std::size_t k = 1; k <= max_count; ++k) pow_[i].push_back(pow_[i].back() * probs[i]);
      }
    } else {
      using std::log;
      log_fact_.assign(3 * max_count + 1, S(0));
      for (std::size_t k = 1; k < log_fact_.size(); ++k)
        log_fact_[k] = log_fact_[k - 1] + log(S(static_cast<double>(k)));
      for (std::size_t i = 0; i < 3; ++i)
        log_p_[i] = probs[i] > 0 ? S(log(Numeric<S>::from(probs[i]))) : S(0);
    }
  }

  S operator()(unsigned long a, unsigned long b, unsigned long c = 0) const {
    if constexpr (Numeric<S>::exact) {
      Rational coef(binomial(a + b + c, a) * binomial(b + c, b));
      return coef * pow_[0].at(a) * pow_[1].at(b) * pow_[2].at(c);
    } else {
      using std::exp;
      S lg = log_fact_.at(a + b + c) - log_fact_[a] - log_fact_[b] - log_fact_[c];
      const unsigned long counts[3] = {a, b, c};
      for (std::size_t i = 0; i < 3; ++i) {
        if (counts[i] == 0) continue;
        if (probs_[i] == 0) return S(0);
        lg += S(static_cast<double>(counts[i])) * log_p_[i];
      }
      return exp(lg);
    }
  }

 private:
  std::array<Rational, 3> probs_;
  std::array<std::vector<Rational>, 3> pow_;
  std::vector<S> log_fact_;
  std::array<S, 3> log_p_{};
};

}  // namespace detail

// Full table Q(t_l, t_r; t) for 0 <= t_l, t_r <= N and 1 <= t <= N. Index N on
// a child axis stands for "at least N entries into that child".
template <class S>
struct TraversalKernel {
  KernelClass cls = KernelClass::two_child;
  BranchProbabilities probs;
  std::size_t N = 0;
  std::vector<S> table;

  const S& at(std::size_t tl, std::size_t tr, std::size_t t) const {
    return table[((t - 1) * (N + 1) + tl) * (N + 1) + tr];
  }
  S& at(std::size_t tl, std::size_t tr, std::size_t t) {
    return table[((t - 1) * (N + 1) + tl) * (N + 1) + tr];
  }
  // One-child kernels: Q(t_l; t).
  const S& at(std::size_t tl, std::size_t t) const { return table[(t - 1) * (N + 1) + tl]; }
  S& at(std::size_t tl, std::size_t t) { return table[(t - 1) * (N + 1) + tl]; }
};

template <class S>
TraversalKernel<S> build_kernel(KernelClass cls, const BranchProbabilities& probs, std::size_t N) {
  if (N == 0) throw InputError("kernel needs N >= 1");
  validate_probabilities(cls, probs);
  TraversalKernel<S> k;
  k.cls = cls;
  k.probs = probs;
  k.N = N;
  const Rational& pp = probs.parent;
  const Rational& pl = probs.left;
  const Rational& pr = probs.right;

  if (cls == KernelClass::one_child) {
    k.table.assign(N * (N + 1), S(0));
    detail::MultinomialTerm<S> term({pp, pl, Rational(0)}, 2 * N);
    const S stop = Numeric<S>::from(pp);
    for (std::size_t t = 1; t <= N; ++t) {
      S rest(1);
      for (std::size_t tl = 0; tl < N; ++tl) {
        k.at(tl, t) = stop * term(t - 1, tl);
        rest -= k.at(tl, t);
      }
      k.at(N, t) = rest;
    }
    return k;
  }

  k.table.assign(N * (N + 1) * (N + 1), S(0));
  if (cls == KernelClass::gadget) {
    // Each entry from the parent is routed to exactly one child.
    detail::MultinomialTerm<S> term({pl, pr, Rational(0)}, N);
    for (std::size_t t = 1; t <= N; ++t)
      for (std::size_t tl = 0; tl <= t; ++tl) k.at(tl, t - tl, t) = term(tl, t - tl);
    return k;
  }

  detail::MultinomialTerm<S> joint({pp, pl, pr}, 2 * N);
  const Rational sl = pp / (pp + pl), sr = pp / (pp + pr);
  detail::MultinomialTerm<S> left_only({sl, Rational(1 - sl), Rational(0)}, 2 * N);
  detail::MultinomialTerm<S> right_only({sr, Rational(1 - sr), Rational(0)}, 2 * N);
  const S stop = Numeric<S>::from(pp), stop_l = Numeric<S>::from(sl), stop_r = Numeric<S>::from(sr);

  for (std::size_t t = 1; t <= N; ++t) {
    for (std::size_t tl = 0; tl < N; ++tl)
      for (std::size_t tr = 0; tr < N; ++tr) k.at(tl, tr, t) = stop * joint(t - 1, tl, tr);
    S total(0);
    for (std::size_t tl = 0; tl < N; ++tl) {
      // Marginal of the left count (as if the right child did not exist)
      // minus the exact-count part of the row.
      S row = stop_l * left_only(t - 1, tl);
      for (std::size_t tr = 0; tr < N; ++tr) row -= k.at(tl, tr, t);
      k.at(tl, N, t) = row;
    }
    for (std::size_t tr = 0; tr < N; ++tr) {
      S col = stop_r * right_only(t - 1, tr);
      for (std::size_t tl = 0; tl < N; ++tl) col -= k.at(tl, tr, t);
      k.at(N, tr, t) = col;
    }
    for (std::size_t tl = 0; tl <= N; ++tl)
      for (std::size_t tr = 0; tr <= N; ++tr)
        if (tl != N || tr != N) total += k.at(tl, tr, t);
    k.at(N, N, t) = S(1) - total;
  }
  return k;
}

// Row-major dense table.
template <class S>
struct Grid {
  std::size_t rows = 0, cols = 0;
  std::vector<S> data;
  const S& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  S& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
};

// Lower-triangular table indexed (m, a) with a <= m.
template <class S>
struct Triangle {
  std::size_t max_m = 0;
  std::vector<S> data;
  const S& operator()(std::size_t m, std::size_t a) const { return data[m * (m + 1) / 2 + a]; }
  S& operator()(std::size_t m, std::size_t a) { return data[m * (m + 1) / 2 + a]; }
};

// C(s + m, m) p^s q^m by the lattice-path recurrence.
template <class S>
Grid<S> arrangement_table(const S& p, const S& q, std::size_t max_s, std::size_t max_m) {
  Grid<S> g{max_s + 1, max_m + 1, std::vector<S>((max_s + 1) * (max_m + 1), S(0))};
  for (std::size_t s = 0; s <= max_s; ++s)
    for (std::size_t m = 0; m <= max_m; ++m) {
      if (s == 0 && m == 0) {
        g(0, 0) = S(1);
        continue;
      }
      S v(0);
      if (s > 0) v += p * g(s - 1, m);
      if (m > 0) v += q * g(s, m - 1);
      g(s, m) = std::move(v);
    }
  return g;
}

// C(m, a) x^a y^(m - a) by Pascal's rule.
template <class S>
Triangle<S> split_table(const S& x, const S& y, std::size_t max_m) {
  Triangle<S> tri{max_m, std::vector<S>((max_m + 1) * (max_m + 2) / 2, S(0))};
  tri(0, 0) = S(1);
  for (std::size_t m = 1; m <= max_m; ++m)
    for (std::size_t a = 0; a <= m; ++a) {
      S v(0);
      if (a > 0) v += x * tri(m - 1, a - 1);
      if (a < m) v += y * tri(m - 1, a);
      tri(m, a) = std::move(v);
    }
  return tri;
}

// The traversal kernel in factored form. A weight-1 node's moves split into
// "when is the t-th parent move" (a negative binomial in the number m of
// child moves) and "how do the m child moves split" (a binomial), so the
// recursion is O(N^2) per node instead of O(N^3) over the full table.
template <class S>
struct FactoredKernel {
  KernelClass cls = KernelClass::two_child;
  BranchProbabilities probs;
  std::size_t N = 0;
  S pp{0}, pl{0}, pr{0};
  S stop_left{0}, go_left{0};    // pp / (pp + pl), pl / (pp + pl)
  S stop_right{0}, go_right{0};  // pp / (pp + pr), pr / (pp + pr)
  Grid<S> arrangements;          // two-child: (pp, pl + pr), m <= 2N - 2; one-child: (pp, pl), m < N
  Grid<S> left_marginal;         // two-child: (stop_left, go_left), m < N
  Grid<S> right_marginal;        // two-child: (stop_right, go_right), m < N
  Triangle<S> split;             // two-child: (pl, pr) / (pl + pr), m <= 2N - 2; gadget: (pl, pr), m <= N
};

template <class S>
FactoredKernel<S> build_factored_kernel(KernelClass cls, const BranchProbabilities& probs,
                                        std::size_t N) {
  if (N == 0) throw InputError("kernel needs N >= 1");
  validate_probabilities(cls, probs);
  FactoredKernel<S> k;
  k.cls = cls;
  k.probs = probs;
  k.N = N;
  k.pp = Numeric<S>::from(probs.parent);
  k.pl = Numeric<S>::from(probs.left);
  k.pr = Numeric<S>::from(probs.right);
  switch (cls) {
    case KernelClass::one_child:
      k.arrangements = arrangement_table<S>(k.pp, k.pl, N - 1, N - 1);
      break;
    case KernelClass::gadget:
      k.split = split_table<S>(k.pl, k.pr, N);
      break;
    case KernelClass::two_child: {
      const Rational& pp = probs.parent;
      const Rational& pl = probs.left;
      const Rational& pr = probs.right;
      const Rational q = pl + pr;
      const Rational sl = pp / (pp + pl), sr = pp / (pp + pr);
      k.stop_left = Numeric<S>::from(sl);
      k.go_left = Numeric<S>::from(Rational(1 - sl));
      k.stop_right = Numeric<S>::from(sr);
      k.go_right = Numeric<S>::from(Rational(1 - sr));
      k.arrangements = arrangement_table<S>(k.pp, Numeric<S>::from(q), N - 1, 2 * N - 2);
      k.left_marginal = arrangement_table<S>(k.stop_left, k.go_left, N - 1, N - 1);
      k.right_marginal = arrangement_table<S>(k.stop_right, k.go_right, N - 1, N - 1);
      k.split = split_table<S>(Numeric<S>::from(Rational(pl / q)), Numeric<S>::from(Rational(pr / q)),
                               2 * N - 2);
      break;
    }
  }
  return k;
}

struct KernelKey {
  KernelClass cls;
  Rational parent, left, right;
  std::size_t N;
  bool operator<(const KernelKey& o) const {
    return std::tie(cls, N, parent, left, right) < std::tie(o.cls, o.N, o.parent, o.left, o.right);
  }
};

// Build-once cache of factored kernels keyed by (class, probabilities, N).
// Concurrent lookups of the same key wait for the single builder.
template <class S>
class KernelCache {
 public:
  using Ptr = std::shared_ptr<const FactoredKernel<S>>;

  Ptr get(KernelClass cls, const BranchProbabilities& probs, std::size_t N) {
    KernelKey key{cls, probs.parent, probs.left, probs.right, N};
    std::promise<Ptr> promise;
    std::shared_future<Ptr> future;
    bool builder = false;
    {
      std::lock_guard lock(mu_);
      auto it = entries_.find(key);
      if (it != entries_.end()) {
        future = it->second;
      } else {
        future = promise.get_future().share();
        entries_.emplace(key, future);
        ++builds_;
        builder = true;
      }
    }
    if (builder) {
      try {
        promise.set_value(std::make_shared<const FactoredKernel<S>>(build_factored_kernel<S>(cls, probs, N)));
      } catch (...) {
        promise.set_exception(std::current_exception());
      }
    }
    return future.get();
  }

  std::size_t builds() const {
    std::lock_guard lock(mu_);
    return builds_;
  }

 private:
  mutable std::mutex mu_;
  std::map<KernelKey, std::shared_future<Ptr>> entries_;
  std::size_t builds_ = 0;
};

}  // namespace walkcover
