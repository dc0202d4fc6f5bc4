#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "walkcover/errors.hpp"
#include "walkcover/rational.hpp"

namespace walkcover {

// A-priori truncation from the explicit tail P_i(t) >= 1 - 2^{-floor(t / 4n^2)}.
struct TruncationParams {
  std::size_t n = 1;
  std::size_t N = 1;
  std::size_t block = 4;   // 4 n^2 traversals per halving of the tail
  double halving = 0.5;
  Rational epsilon{1};
  double delta = 0;        // 2 * 2^{-floor(N / block)}
  double additive_bound = 0;
};

inline std::size_t tail_block(std::size_t n) { return 4 * n * n; }

inline double apriori_delta(std::size_t n, std::size_t N) {
  if (n <= 1) return 0.0;  // w_1 is a leaf, its profile is exactly 1
  return 2.0 * std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(N / tail_block(n), 4000)));
}

// N((1 + delta)^{2n} - 1) + 2 N delta.
inline double apriori_additive_bound(std::size_t n, std::size_t N) {
  const double d = apriori_delta(n, N);
  const double Nd = static_cast<double>(N);
  return Nd * std::expm1(2.0 * static_cast<double>(n) * std::log1p(d)) + 2.0 * Nd * d;
}

inline TruncationParams choose_truncation(std::size_t n, const Rational& epsilon,
                                          std::size_t max_n = std::size_t{1} << 26) {
  if (n == 0) throw InputError("tree has no vertices");
  if (epsilon <= 0) throw InputError("epsilon must be positive");
  const std::size_t block = tail_block(n);
  const double eps = epsilon.get_d();
  auto ok = [&](std::size_t k) { return apriori_additive_bound(n, k * block) <= eps; };

  std::size_t hi = 1;
  while (!ok(hi)) {
    if (hi * block > max_n)
      throw ResourceError("a-priori truncation exceeds N = " + std::to_string(max_n) +
                          "; relax epsilon or give N explicitly");
    hi *= 2;
  }
  std::size_t lo = hi / 2;  // ok(lo) is false unless lo == 0
  while (hi - lo > 1) {
    std::size_t mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  if (hi * block > max_n)
    throw ResourceError("a-priori truncation exceeds N = " + std::to_string(max_n) +
                        "; relax epsilon or give N explicitly");
  TruncationParams p;
  p.n = n;
  p.N = hi * block;
  p.block = block;
  p.epsilon = epsilon;
  p.delta = apriori_delta(n, p.N);
  p.additive_bound = apriori_additive_bound(n, p.N);
  return p;
}

}  // namespace walkcover
