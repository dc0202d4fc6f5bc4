#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "support/trees.hpp"
#include "walkcover/extensions.hpp"
#include "walkcover/oracles/exact.hpp"

using namespace walkcover;

namespace {

EstimateOptions eps(const char* e) {
  EstimateOptions opt;
  opt.epsilon = parse_rational(e);
  return opt;
}

void expect_brackets(const EstimateReport& r, const Rational& truth) {
  EXPECT_LE(r.lower, truth) << to_decimal(r.lower) << " vs " << to_decimal(truth);
  EXPECT_GE(r.upper, truth) << to_decimal(r.upper) << " vs " << to_decimal(truth);
}

}  // namespace

TEST(Weighted, SingleEdgeOfResistanceTwo) {
  auto t = parse_tree_text("a b 2");
  auto chain = cover_return_weighted(t, "a", eps("1e-6"), StepUnits::chain);
  auto sub = cover_return_weighted(t, "a", eps("1e-6"), StepUnits::subdivided);
  expect_brackets(chain, Rational(2));
  expect_brackets(sub, Rational(8));
  EXPECT_EQ(chain.mode, "weighted");
}

TEST(Weighted, UnitResistancesReproduceCoverReturn) {
  std::mt19937_64 rng(71);
  for (int rep = 0; rep < 5; ++rep) {
    const std::size_t n = 2 + rng() % 9;
    auto t = testkit::random_tree(n, rng);
    const std::string s = t.label(rng() % n);
    auto a = cover_return_time(t, s, eps("1e-2"));
    for (auto units : {StepUnits::chain, StepUnits::subdivided}) {
      auto b = cover_return_weighted(t, s, eps("1e-2"), units);
      EXPECT_EQ(a.estimate, b.estimate);
      EXPECT_EQ(a.lower, b.lower);
      EXPECT_EQ(a.upper, b.upper);
      EXPECT_EQ(a.trunc_n, b.trunc_n);
    }
  }
}

TEST(Weighted, ChainStepsMatchExactOracle) {
  std::mt19937_64 rng(72);
  for (int rep = 0; rep < 8; ++rep) {
    const std::size_t n = 2 + rng() % 6;
    auto t = testkit::random_weighted_tree(n, rng);
    const std::string s = t.label(rng() % n);
    auto r = cover_return_weighted(t, s, eps("1e-3"), StepUnits::chain);
    expect_brackets(r, oracles::exact_cover_return_small(t, s).value);
  }
}

TEST(Weighted, SubdividedStepsMatchTheSubdividedTree) {
  std::mt19937_64 rng(73);
  for (int rep = 0; rep < 6; ++rep) {
    const std::size_t n = 2 + rng() % 4;
    auto t = testkit::random_weighted_tree(n, rng);
    const std::string s = t.label(rng() % n);
    auto work = scale_resistances(t, Rational(resistance_denominator_lcm(t)));
    auto sub = subdivide(work);
    if (sub.vertex_count() > oracles::kExactVertexCap) continue;
    const Rational truth = oracles::exact_cover_return_small(sub, s).value;
    expect_brackets(cover_return_weighted(t, s, eps("1e-3"), StepUnits::subdivided), truth);
    expect_brackets(cover_return_time(sub, s, eps("1e-3")), truth);
  }
}

TEST(Weighted, FractionalResistancesScaleByCommonDenominator) {
  auto t = parse_tree_text("a b 1/2\nb c 3/2");
  auto r = cover_return_weighted(t, "a", eps("1e-4"), StepUnits::subdivided);
  // Scaled by 2 this is a unit path on 5 vertices started at an end: 2 * 4^2.
  expect_brackets(r, Rational(32));
  EXPECT_THROW(cover_return_weighted(t, "a", eps("1e-2"), StepUnits::subdivided, Integer(1)), ResourceError);
}

TEST(Subdivide, LabelsAndShape) {
  auto s = subdivide(parse_tree_text("a b 3\nb c"));
  EXPECT_EQ(s.vertex_count(), 5u);
  EXPECT_TRUE(s.unit_resistances());
  EXPECT_NO_THROW(s.index_of("a~b~1"));
  EXPECT_NO_THROW(s.index_of("a~b~2"));
  EXPECT_THROW(subdivide(parse_tree_text("a b 1/2")), InputError);
  EXPECT_THROW(subdivide(parse_tree_text("a b 2000000")), ResourceError);
}

TEST(Steiner, PrunesUnneededBranches) {
  auto t = parse_tree_text("a b\nb c\nb d\nd e");
  auto s = steiner_subtree(t, {t.index_of("a"), t.index_of("d")});
  EXPECT_EQ(s.labels(), (std::vector<std::string>{"a", "b", "d"}));
  EXPECT_EQ(s.edge_count(), 2u);
  EXPECT_EQ(steiner_subtree(t, {t.index_of("c")}).vertex_count(), 1u);
}

TEST(Subset, SmallCases) {
  auto t = parse_tree_text("a b\nb c");
  expect_brackets(cover_return_subset(t, "a", {"b"}, eps("1e-4")), Rational(4));
  auto self = cover_return_subset(t, "a", {"a"}, eps("1e-4"));
  EXPECT_EQ(self.lower, 0);
  EXPECT_EQ(self.upper, 0);
  auto full = cover_return_subset(t, "a", {"a", "b", "c"}, eps("1e-4"));
  auto plain = cover_return_time(t, "a", eps("1e-4"));
  EXPECT_EQ(full.estimate, plain.estimate);
  EXPECT_EQ(full.upper, plain.upper);
  EXPECT_EQ(full.mode, "subset");
  EXPECT_THROW(cover_return_subset(t, "a", {}, eps("0.1")), InputError);
  EXPECT_THROW(cover_return_subset(t, "a", {"zz"}, eps("0.1")), InputError);
}

TEST(Subset, MatchesExactOracle) {
  std::mt19937_64 rng(74);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 2 + rng() % 7;
    auto t = testkit::random_tree(n, rng);
    const std::string s = t.label(rng() % n);
    std::vector<std::string> targets;
    for (std::size_t v = 0; v < n; ++v)
      if (rng() % 3 == 0) targets.push_back(t.label(v));
    if (targets.empty()) targets.push_back(t.label(n - 1));
    auto truth = oracles::exact_subset_cover_return_small(t, s, targets).value;
    expect_brackets(cover_return_subset(t, s, targets, eps("1e-3")), truth);
  }
}

// Off-subtree excursions do not change traversal counts inside the Steiner
// subtree; checked on every tree shape up to 7 vertices.
TEST(Subset, SteinerReductionOnAllSmallTrees) {
  std::mt19937_64 rng(76);
  EstimateOptions opt;
  opt.epsilon = Rational(1, 100);
  opt.backend = BackendChoice::rational;
  for (std::size_t n = 2; n <= 7; ++n)
    for (const auto& t : testkit::all_trees(n)) {
      const std::string s = t.label(rng() % n);
      for (int rep = 0; rep < 2; ++rep) {
        std::vector<std::string> targets;
        for (std::size_t v = 0; v < n; ++v)
          if (rng() % 2) targets.push_back(t.label(v));
        if (targets.empty()) targets.push_back(t.label(rng() % n));
        auto truth = oracles::exact_subset_cover_return_small(t, s, targets).value;
        expect_brackets(cover_return_subset(t, s, targets, opt), truth);
      }
    }
}

// Same N for every set so the only difference is the target set.
TEST(Subset, NestedSetsAtEqualN) {
  std::mt19937_64 rng(77);
  EstimateOptions opt;
  opt.trunc_n = 24;
  opt.backend = BackendChoice::rational;
  for (int rep = 0; rep < 6; ++rep) {
    const std::size_t n = 3 + rng() % 6;
    auto t = testkit::random_tree(n, rng);
    const std::string s = t.label(0);
    std::vector<std::string> targets;
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    Rational prev_upper(0);
    for (std::size_t v : order) {
      targets.push_back(t.label(v));
      auto r = cover_return_subset(t, s, targets, opt);
      EXPECT_GE(r.upper, prev_upper);
      EXPECT_LE(r.lower, r.upper);
      prev_upper = r.upper;
    }
  }
}

TEST(Subset, NestedTargetSetsAreMonotone) {
  auto t = parse_tree_text("r a\nr b\na c\na d\nb e\ne f");
  auto small = cover_return_subset(t, "r", {"c"}, eps("1e-4"));
  auto mid = cover_return_subset(t, "r", {"c", "e"}, eps("1e-4"));
  auto big = cover_return_subset(t, "r", {"c", "e", "f", "d"}, eps("1e-4"));
  EXPECT_LE(small.lower, mid.upper);
  EXPECT_LT(small.upper, mid.lower);
  EXPECT_LT(mid.upper, big.lower);
}

TEST(CoverTime, SmallCases) {
  expect_brackets(cover_time(parse_tree_text("a b\nb c"), "a", eps("1e-4")), Rational(4));
  expect_brackets(cover_time(parse_tree_text("a b\nb c\nc d"), "a", eps("1e-4")), Rational(9));
  expect_brackets(cover_time(parse_tree_text("c x\nc y\nc z"), "c", eps("1e-4")), Rational(10));
  auto one = cover_time(parse_tree_text("a"), "a", eps("1e-3"));
  EXPECT_EQ(one.upper, 0);
  EXPECT_EQ(one.mode, "cover");
}

TEST(CoverTime, MatchesExactOracleAndOrdering) {
  std::mt19937_64 rng(75);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 2 + rng() % 6;
    auto t = rep % 3 == 2 ? testkit::random_weighted_tree(n, rng) : testkit::random_tree(n, rng);
    const std::string s = t.label(rng() % n);
    auto truth = oracles::exact_cover_small(t, s).value;
    auto r = cover_time(t, s, eps("1e-3"));
    expect_brackets(r, truth);
    EXPECT_LE(r.upper - r.lower, r.lower / 1000 + Rational(1, 1000000));
    // Covering never needs more than covering and returning.
    auto cr = oracles::exact_cover_return_small(t, s).value;
    EXPECT_LE(r.lower, cr);
    // Every vertex must be hit.
    HittingTable h(t);
    Rational hmax(0);
    for (std::size_t u = 0; u < n; ++u) hmax = std::max(hmax, h(t.index_of(s), u));
    EXPECT_GE(r.upper, hmax);
  }
}
