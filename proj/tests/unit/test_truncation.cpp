#include <gtest/gtest.h>

#include <cmath>

#include "walkcover/truncation.hpp"

using namespace walkcover;

namespace {

// Smallest multiple of 4n^2 meeting the bound, by linear scan.
std::size_t scan(std::size_t n, double eps) {
  const std::size_t block = 4 * n * n;
  for (std::size_t k = 1;; ++k) {
    const double N = double(k * block);
    const double d = 2 * std::pow(0.5, double(k));
    if (N * (std::pow(1 + d, 2.0 * n) - 1) + 2 * N * d <= eps) return k * block;
  }
}

}  // namespace

TEST(Truncation, SingleVertexNeedsOneBlock) {
  const auto p = choose_truncation(1, Rational(1, 1000));
  EXPECT_EQ(p.N, 4u);
  EXPECT_EQ(p.delta, 0.0);
  EXPECT_EQ(p.additive_bound, 0.0);
}

TEST(Truncation, TwoVerticesMatchesLinearScan) {
  const auto p = choose_truncation(2, Rational(1, 2));
  EXPECT_EQ(p.block, 16u);
  EXPECT_EQ(p.N, scan(2, 0.5));
  EXPECT_LE(p.additive_bound, 0.5);
  EXPECT_GT(apriori_additive_bound(2, p.N - 16), 0.5);
}

TEST(Truncation, MatchesScanAcrossSizes) {
  for (std::size_t n : {2u, 3u, 5u, 8u})
    for (double eps : {1.0, 0.1, 1e-3})
      EXPECT_EQ(choose_truncation(n, Rational(eps)).N, scan(n, eps)) << n << " " << eps;
}

TEST(Truncation, MonotoneInEpsilon) {
  std::size_t prev = 0;
  for (double eps : {1.0, 0.5, 0.1, 0.01, 1e-4, 1e-6}) {
    const auto N = choose_truncation(6, Rational(eps)).N;
    EXPECT_GE(N, prev);
    prev = N;
  }
}

TEST(Truncation, DeltaFollowsTheTailBlocks) {
  EXPECT_DOUBLE_EQ(apriori_delta(3, 36), 1.0);
  EXPECT_DOUBLE_EQ(apriori_delta(3, 72), 0.5);
  EXPECT_DOUBLE_EQ(apriori_delta(3, 71), 1.0);
}

TEST(Truncation, Errors) {
  EXPECT_THROW(choose_truncation(0, Rational(1)), InputError);
  EXPECT_THROW(choose_truncation(3, Rational(0)), InputError);
  EXPECT_THROW(choose_truncation(50, Rational(1, 1000), 4096), ResourceError);
}
