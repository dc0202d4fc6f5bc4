#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "support/trees.hpp"
#include "walkcover/gadget.hpp"
#include "walkcover/oracles/monte_carlo.hpp"
#include "walkcover/tree.hpp"

using namespace walkcover;

namespace {

WeightedTree tree(const char* text) { return parse_tree_text(text); }

std::string parse_error(const char* text) {
  try {
    parse_tree_text(text);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(ParseTree, PathWithUnitResistances) {
  auto t = tree("a b\nb c");
  EXPECT_EQ(t.vertex_count(), 3u);
  EXPECT_EQ(t.edge_count(), 2u);
  EXPECT_TRUE(t.unit_resistances());
  EXPECT_EQ(t.label(0), "a");
  EXPECT_EQ(t.degree(t.index_of("b")), 2u);
}

TEST(ParseTree, ResistanceColumnAcceptsDecimalsAndFractions) {
  EXPECT_EQ(tree("a b 2").edge(0).resistance, 2);
  EXPECT_EQ(tree("a b 7/3").edge(0).resistance, Rational(7, 3));
  EXPECT_EQ(tree("a b 1.25").edge(0).resistance, Rational(5, 4));
  EXPECT_EQ(tree("a b 2.5e-1").edge(0).resistance, Rational(1, 4));
}

TEST(ParseTree, CommentsAndBlankLines) {
  auto t = tree("# header\n\na b   # first edge\n  b c\n");
  EXPECT_EQ(t.vertex_count(), 3u);
}

TEST(ParseTree, SingleLabelDeclaresAVertex) {
  auto t = tree("solo\n");
  EXPECT_EQ(t.vertex_count(), 1u);
  EXPECT_EQ(t.edge_count(), 0u);
}

TEST(ParseTree, Errors) {
  EXPECT_NE(parse_error("a b\nb c\nc a").find("cycle detected"), std::string::npos);
  EXPECT_NE(parse_error("a b\nb a").find("duplicate edge"), std::string::npos);
  EXPECT_NE(parse_error("a b 0").find("nonpositive"), std::string::npos);
  EXPECT_NE(parse_error("a b -1").find("nonpositive"), std::string::npos);
  EXPECT_NE(parse_error("a b x").find("malformed resistance"), std::string::npos);
  EXPECT_NE(parse_error("a b 1 extra").find("malformed line"), std::string::npos);
  EXPECT_NE(parse_error("a a").find("self-loop"), std::string::npos);
  EXPECT_NE(parse_error("a b\nc d").find("disconnected"), std::string::npos);
  EXPECT_NE(parse_error("# nothing\n").find("no vertices"), std::string::npos);
  EXPECT_NE(parse_error("a b\nb c\nc a").find("line 3"), std::string::npos);
}

TEST(WeightedTreeBuild, RejectsBadEdgeCounts) {
  EXPECT_THROW(WeightedTree::build({"a", "b", "c"}, {{0, 1, Rational(1)}}), InputError);
  EXPECT_THROW(WeightedTree::build({"a", "b"}, {{0, 1, Rational(1)}, {1, 0, Rational(1)}}), InputError);
  EXPECT_THROW(WeightedTree::build({"a", "a"}, {{0, 1, Rational(1)}}), InputError);
}

TEST(SuperRoot, SingleEdge) {
  auto rt = attach_super_root(tree("a b"), "a");
  EXPECT_EQ(rt.super_root, 2u);
  EXPECT_EQ(rt.parent[0], 2u);
  EXPECT_EQ(rt.parent[1], 0u);
  EXPECT_EQ(rt.children[2], std::vector<std::size_t>{0});
  EXPECT_EQ(rt.subtree_size[0], 2u);
  EXPECT_EQ(rt.parent_resistance[0], 1);
}

TEST(SuperRoot, PathFromMiddle) {
  auto t = tree("a b\nb c");
  auto rt = attach_super_root(t, "b");
  const auto a = t.index_of("a"), b = t.index_of("b"), c = t.index_of("c");
  EXPECT_EQ(rt.subtree_size[b], 3u);
  EXPECT_EQ(rt.subtree_size[a], 1u);
  EXPECT_EQ(rt.subtree_size[c], 1u);
  EXPECT_EQ(rt.children[b], (std::vector<std::size_t>{a, c}));
  EXPECT_EQ(rt.preorder.front(), rt.super_root);
}

TEST(SuperRoot, SingleVertex) {
  auto rt = attach_super_root(tree("a"), "a");
  EXPECT_EQ(rt.children[rt.super_root].size(), 1u);
  EXPECT_TRUE(rt.is_leaf(0));
}

TEST(SuperRoot, UnknownStart) { EXPECT_THROW(attach_super_root(tree("a b"), "z"), InputError); }

TEST(Binarize, StarWithThreeLeaves) {
  auto t = tree("v u1\nv u2\nv u3");
  auto gt = binarize(attach_super_root(t, "v"));
  ASSERT_EQ(gt.size(), 6u);  // r, v, u1, b, u2, u3
  const auto& v = gt.node(1);
  EXPECT_EQ(v.kind, NodeKind::two_child);
  EXPECT_EQ(v.probs.parent, Rational(1, 4));
  EXPECT_EQ(v.probs.left, Rational(1, 4));
  EXPECT_EQ(v.probs.right, Rational(1, 2));
  EXPECT_EQ(gt.project(*v.left), t.index_of("u1"));
  const auto& b = gt.node(*v.right);
  EXPECT_TRUE(b.is_gadget());
  EXPECT_EQ(b.weight, 2);
  EXPECT_EQ(b.probs.left, Rational(1, 2));
  EXPECT_EQ(gt.project(*b.left), t.index_of("u2"));
  EXPECT_EQ(gt.project(*b.right), t.index_of("u3"));
}

TEST(Binarize, PathNeedsNoGadgets) {
  auto gt = binarize(attach_super_root(tree("a b\nb c\nc d"), "b"));
  EXPECT_EQ(gt.size(), 5u);
  for (const auto& nd : gt.nodes) EXPECT_FALSE(nd.is_gadget());
  EXPECT_EQ(gt.node(1).probs.parent, Rational(1, 3));
}

TEST(Binarize, CompleteBinaryTree) {
  auto gt = binarize(attach_super_root(tree("1 2\n1 3\n2 4\n2 5\n3 6\n3 7"), "1"));
  EXPECT_EQ(gt.size(), 8u);
  EXPECT_LE(gt.size(), 2 * 7u + 1);
  for (const auto& nd : gt.nodes) EXPECT_FALSE(nd.is_gadget());
}

TEST(Binarize, GadgetWeightsCountRoutedLeaves) {
  // Degree-6 vertex: gadgets b_1..b_4 with weights 5, 4, 3, 2.
  auto t = tree("c a1\nc a2\nc a3\nc a4\nc a5\nc a6");
  auto gt = binarize(attach_super_root(t, "c"));
  std::map<std::size_t, Rational> weight_by_index;
  for (const auto& nd : gt.nodes)
    if (nd.is_gadget()) weight_by_index[nd.gadget_index] = nd.weight;
  ASSERT_EQ(weight_by_index.size(), 4u);
  for (std::size_t k = 1; k <= 4; ++k) EXPECT_EQ(weight_by_index[k], Rational(6 - k));
  // Weight equals the number of original leaves below.
  for (const auto& nd : gt.nodes) {
    if (!nd.is_gadget()) continue;
    std::size_t leaves = 0;
    std::vector<std::size_t> st{nd.id};
    while (!st.empty()) {
      auto x = st.back();
      st.pop_back();
      const auto& m = gt.node(x);
      if (m.kind == NodeKind::leaf) ++leaves;
      if (m.left) st.push_back(*m.left);
      if (m.right) st.push_back(*m.right);
    }
    EXPECT_EQ(nd.weight, Rational(leaves));
  }
}

TEST(Binarize, InvariantsOnRandomTrees) {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t n = 1 + rng() % 25;
    auto t = rep % 2 ? testkit::random_weighted_tree(n, rng) : testkit::random_tree(n, rng);
    auto rt = attach_super_root(t, t.label(rng() % n));
    auto gt = binarize(rt);
    EXPECT_LE(gt.size(), 2 * n + 1);
    std::size_t originals = 0;
    for (std::size_t id = 1; id < gt.size(); ++id) {
      const auto& nd = gt.node(id);
      EXPECT_EQ(nd.probs.parent + nd.probs.left + nd.probs.right, 1);
      if (nd.is_gadget()) {
        EXPECT_TRUE(nd.left && nd.right);
        EXPECT_EQ(nd.probs.parent, 0);
        EXPECT_GT(nd.probs.left, 0);
        EXPECT_GT(nd.probs.right, 0);
      } else {
        ++originals;
        EXPECT_GT(nd.probs.parent, 0);
        if (nd.kind == NodeKind::leaf) {
          EXPECT_TRUE(rt.is_leaf(*nd.vertex));
        }
        if (t.unit_resistances()) {
          EXPECT_EQ(nd.weight, 1);
        }
      }
      if (nd.left) {
        EXPECT_EQ(gt.node(*nd.left).parent, id);
      }
      if (nd.right) {
        EXPECT_EQ(gt.node(*nd.right).parent, id);
      }
    }
    EXPECT_EQ(originals, n);
  }
}

TEST(Binarize, Deterministic) {
  const char* text = "x a\nx b\nx c\nx d\na e\na f\na g";
  auto g1 = binarize(attach_super_root(tree(text), "x"));
  auto g2 = binarize(attach_super_root(tree(text), "x"));
  ASSERT_EQ(g1.size(), g2.size());
  for (std::size_t i = 0; i < g1.size(); ++i) {
    EXPECT_EQ(g1.node(i).kind, g2.node(i).kind);
    EXPECT_EQ(g1.node(i).left, g2.node(i).left);
    EXPECT_EQ(g1.node(i).right, g2.node(i).right);
    EXPECT_EQ(g1.node(i).probs.left, g2.node(i).probs.left);
  }
}

TEST(Binarize, ConductanceWeightedProbabilities) {
  // v has parent edge (r, v) of conductance 1 and children with resistances 1, 2, 4.
  auto t = tree("v a 1\nv b 2\nv c 4");
  auto gt = binarize(attach_super_root(t, "v"));
  const auto& v = gt.node(1);
  const Rational total = 1 + 1 + Rational(1, 2) + Rational(1, 4);
  EXPECT_EQ(v.probs.parent, 1 / total);
  EXPECT_EQ(v.probs.left, 1 / total);
  EXPECT_EQ(v.probs.right, Rational(3, 4) / total);
  const auto& g = gt.node(*v.right);
  EXPECT_EQ(g.weight, Rational(3, 4));
  EXPECT_EQ(g.probs.left, Rational(2, 3));
}

// The walk on T_B projected to original vertices is the walk on T_r.
TEST(Binarize, ProjectionFidelity) {
  auto t = tree("c a\nc b\nc d\nc e\na f\na g\na h");
  auto rt = attach_super_root(t, "c");
  auto gt = binarize(rt);
  const std::size_t steps = 100000;
  auto counts = oracles::simulate_projection(gt, steps, 42);
  const std::size_t n = t.vertex_count();
  std::map<std::size_t, std::uint64_t> from_total;
  for (const auto& [key, c] : counts) from_total[key.first] += c;
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<std::size_t> nbrs;
    for (const auto& inc : t.incident(v)) nbrs.push_back(inc.neighbor);
    if (v == rt.start) nbrs.push_back(n);
    const double total = static_cast<double>(from_total[v]);
    ASSERT_GT(total, 0);
    const double p = 1.0 / nbrs.size();
    for (std::size_t u : nbrs) {
      const double got = static_cast<double>(counts[{v, u}]) / total;
      const double se = std::sqrt(p * (1 - p) / total);
      EXPECT_LE(std::abs(got - p), 4 * se) << "from " << v << " to " << u;
    }
  }
}
