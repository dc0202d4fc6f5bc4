#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "walkcover/errors.hpp"
#include "walkcover/kernel.hpp"
#include "walkcover/numeric.hpp"

namespace walkcover {

// upper: the truncated profile P^1 with P(N) forced to 1 (pointwise >= P).
// lower: the same recursion without the forcing. Kernel cells at index N
// count ">= N entries", so treating the child as covered there with its own
// lower value keeps every entry <= P.
enum class ProfileBound { upper, lower };

template <class S>
struct CoverageProfile {
  std::size_t node = 0;
  std::vector<S> values;  // values[t - 1] = P(t)
  S pre_cap{1};           // P(N) before capping
  ProfileBound bound = ProfileBound::upper;

  std::size_t length() const { return values.size(); }
  const S& at(std::size_t t) const { return values.at(t - 1); }
  bool exact() const { return Numeric<S>::exact; }
};

template <class S>
CoverageProfile<S> leaf_profile(std::size_t node, std::size_t N,
                                ProfileBound bound = ProfileBound::upper) {
  if (N == 0) throw InputError("profile length must be >= 1");
  return {node, std::vector<S>(N, S(1)), S(1), bound};
}

namespace detail {

template <class S>
CoverageProfile<S> finish_profile(std::size_t node, std::vector<S> values, ProfileBound bound) {
  if constexpr (!Numeric<S>::exact) {
    for (auto& v : values) v = std::clamp(v, S(0), S(1));
  }
  CoverageProfile<S> p{node, std::move(values), S(0), bound};
  p.pre_cap = p.values.back();
  if (bound == ProfileBound::upper) p.values.back() = S(1);
  return p;
}

template <class S>
void check_lengths(std::size_t N, const CoverageProfile<S>& left, const CoverageProfile<S>* right) {
  if (left.length() != N || (right && right->length() != N))
    throw InputError("profile length does not match kernel N");
}

// psi(0) = -P(N), psi(a) = P(a) - P(N) for 1 <= a < N.
template <class S>
std::vector<S> tail_differences(const std::vector<S>& f) {
  const std::size_t N = f.size();
  std::vector<S> psi(N);
  psi[0] = -f[N - 1];
  for (std::size_t a = 1; a < N; ++a) psi[a] = f[a - 1] - f[N - 1];
  return psi;
}

}  // namespace detail

// Factored recursion; agrees exactly with the table route in rational mode.
// Writing P_l(a) = P_l(N) + psi(a) turns the sum over the capped kernel into
// marginal pieces that need only the uncapped closed forms.
template <class S>
CoverageProfile<S> propagate_profile(const FactoredKernel<S>& k, std::size_t node,
                                     const CoverageProfile<S>& left,
                                     const CoverageProfile<S>* right, ProfileBound bound) {
  const std::size_t N = k.N;
  detail::check_lengths(N, left, right);
  if ((k.cls == KernelClass::one_child) != (right == nullptr))
    throw InputError("kernel class does not match child count");
  const auto& f = left.values;
  std::vector<S> out(N, S(0));

  if (k.cls == KernelClass::gadget) {
    const auto& g = right->values;
    for (std::size_t t = 2; t <= N; ++t) {
      S acc(0);
      for (std::size_t a = 1; a < t; ++a) acc += k.split(t, a) * f[a - 1] * g[t - a - 1];
      out[t - 1] = std::move(acc);
    }
    return detail::finish_profile(node, std::move(out), bound);
  }

  const S F = f[N - 1];
  const std::vector<S> psi = detail::tail_differences(f);

  if (k.cls == KernelClass::one_child) {
    for (std::size_t t = 1; t <= N; ++t) {
      S acc(0);
      for (std::size_t m = 0; m < N; ++m)
        if (psi[m] != 0) acc += k.arrangements(t - 1, m) * psi[m];
      out[t - 1] = F + k.pp * acc;
    }
    return detail::finish_profile(node, std::move(out), bound);
  }

  const auto& g = right->values;
  const S G = g[N - 1];
  const std::vector<S> phi = detail::tail_differences(g);
  const std::size_t M = 2 * N - 2;
  std::vector<S> H(M + 1, S(0));
  for (std::size_t m = 0; m <= M; ++m) {
    const std::size_t lo = m >= N - 1 ? m - (N - 1) : 0, hi = std::min(m, N - 1);
    S acc(0);
    for (std::size_t a = lo; a <= hi; ++a)
      if (psi[a] != 0 && phi[m - a] != 0) acc += k.split(m, a) * psi[a] * phi[m - a];
    H[m] = std::move(acc);
  }
  for (std::size_t t = 1; t <= N; ++t) {
    const std::size_t s = t - 1;
    S acc_l(0), acc_r(0), acc_h(0);
    for (std::size_t a = 0; a < N; ++a)
      if (psi[a] != 0) acc_l += k.left_marginal(s, a) * psi[a];
    for (std::size_t b = 0; b < N; ++b)
      if (phi[b] != 0) acc_r += k.right_marginal(s, b) * phi[b];
    for (std::size_t m = 0; m <= M; ++m)
      if (H[m] != 0) acc_h += k.arrangements(s, m) * H[m];
    out[t - 1] = F * G + F * k.stop_right * acc_r + G * k.stop_left * acc_l + k.pp * acc_h;
  }
  return detail::finish_profile(node, std::move(out), bound);
}

// Literal double sum over the full kernel table, t_l outer and t_r inner.
template <class S>
CoverageProfile<S> propagate_profile(const TraversalKernel<S>& k, std::size_t node,
                                     const CoverageProfile<S>& left,
                                     const CoverageProfile<S>* right, ProfileBound bound) {
  const std::size_t N = k.N;
  detail::check_lengths(N, left, right);
  if ((k.cls == KernelClass::one_child) != (right == nullptr))
    throw InputError("kernel class does not match child count");
  std::vector<S> out(N, S(0));
  for (std::size_t t = 1; t <= N; ++t) {
    S acc(0);
    for (std::size_t tl = 1; tl <= N; ++tl) {
      if (!right) {
        acc += k.at(tl, t) * left.at(tl);
        continue;
      }
      for (std::size_t tr = 1; tr <= N; ++tr) acc += k.at(tl, tr, t) * left.at(tl) * right->at(tr);
    }
    out[t - 1] = std::move(acc);
  }
  return detail::finish_profile(node, std::move(out), bound);
}

// Sum over t = 1..N of 1 - P(t).
template <class S>
S expected_traversals(const CoverageProfile<S>& p) {
  S acc(0);
  for (const auto& v : p.values) acc += S(1) - v;
  return acc;
}

}  // namespace walkcover
