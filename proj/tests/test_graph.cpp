#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "mwc/graph.hpp"
#include "test_util.hpp"

namespace mwc {
namespace {

const ScenarioConfig& example() {
  static const ScenarioConfig c = load_config(test::scenario("paper_example.json"));
  return c;
}

const ScenarioConfig& variant() {
  static const ScenarioConfig c = load_config(test::scenario("paper_bipartite_variant.json"));
  return c;
}

const MatrixWeightedGraph& graph(const ScenarioConfig& c, int k) { return c.graphs().at(k); }

ErrorCode first_issue(const MatrixWeightedGraph& g) { return validate_graph(g).issues.front().code; }

TEST(ValidateGraph, ExampleGraphs) {
  const auto g1 = validate_graph(graph(example(), 0));
  ASSERT_TRUE(g1.ok());
  ASSERT_EQ(g1.edges.size(), 3u);
  for (const auto& e : g1.edges) EXPECT_EQ(e.cls, Definiteness::PositiveDefinite);

  const auto g3 = validate_graph(graph(example(), 2));
  ASSERT_TRUE(g3.ok());
  ASSERT_EQ(g3.edges.size(), 3u);
  for (const auto& e : g3.edges) EXPECT_EQ(e.cls, Definiteness::PositiveSemiDefinite);
}

TEST(ValidateGraph, ReportsEveryKindOfBadEdge) {
  MatrixWeightedGraph indefinite(3, 3);
  indefinite.add_edge(0, 1, Eigen::Vector3d(1, -1, 0).asDiagonal().toDenseMatrix());
  EXPECT_EQ(first_issue(indefinite), ErrorCode::IndefiniteWeight);

  MatrixWeightedGraph loop(3, 1);
  loop.add_edge(1, 1, Matrix::Ones(1, 1));
  EXPECT_EQ(first_issue(loop), ErrorCode::SelfLoop);

  MatrixWeightedGraph asym(2, 2);
  Matrix w = Matrix::Identity(2, 2);
  w(0, 1) = 0.5;
  asym.add_edge(0, 1, w);
  EXPECT_EQ(first_issue(asym), ErrorCode::NonSymmetric);

  MatrixWeightedGraph dup(2, 1);
  dup.add_edge(0, 1, Matrix::Ones(1, 1)).add_edge(1, 0, Matrix::Ones(1, 1));
  EXPECT_EQ(first_issue(dup), ErrorCode::DuplicateEdge);

  MatrixWeightedGraph zero(2, 2);
  zero.add_edge(0, 1, Matrix::Zero(2, 2));
  EXPECT_EQ(first_issue(zero), ErrorCode::ZeroWeight);

  EXPECT_FALSE(validate_graph(MatrixWeightedGraph(1, 2)).ok());
  EXPECT_THROW(MatrixWeightedGraph(2, 2).add_edge(0, 2, Matrix::Identity(2, 2)), Error);
  EXPECT_THROW(MatrixWeightedGraph(2, 2).add_edge(0, 1, Matrix::Identity(3, 3)), Error);
}

TEST(Laplacian, TwoNodeEdges) {
  const Matrix a = graph(example(), 0).edges().front().weight;
  MatrixWeightedGraph pos(2, 3);
  pos.add_edge(0, 1, a);
  const BlockLaplacian lp = laplacian(pos);
  EXPECT_EQ(Matrix(lp.block(0, 0)), a);
  EXPECT_EQ(Matrix(lp.block(1, 1)), a);
  EXPECT_EQ(Matrix(lp.block(0, 1)), Matrix(-a));

  MatrixWeightedGraph neg(2, 3);
  neg.add_edge(0, 1, -a);
  const BlockLaplacian ln = laplacian(neg);
  // |A| = a while the off-diagonal block is -(-a).
  EXPECT_EQ(Matrix(ln.block(0, 0)), a);
  EXPECT_EQ(Matrix(ln.block(0, 1)), a);
}

TEST(Laplacian, RejectsInvalidGraph) {
  MatrixWeightedGraph g(2, 2);
  g.add_edge(0, 1, Eigen::Vector2d(1, -1).asDiagonal().toDenseMatrix());
  try {
    laplacian(g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IndefiniteWeight);
  }
}

TEST(Laplacian, ExampleGraphIsPositiveSemidefinite) {
  const BlockLaplacian l = laplacian(graph(example(), 0));
  ASSERT_EQ(l.matrix.order(), 21);
  EXPECT_EQ(l.matrix.matrix(), test::brute_laplacian(graph(example(), 0)));
  test::Rng rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vector x = test::random_vector(rng, 21);
    EXPECT_GE(quadratic_form(l, x), -1e-12);
  }
}

TEST(Laplacian, PropertyPsdOnRandomSignedGraphs) {
  test::Rng rng(22);
  for (int trial = 0; trial < 300; ++trial) {
    const MatrixWeightedGraph g =
        test::random_graph(rng, test::uniform_int(rng, 2, 6), test::uniform_int(rng, 1, 3), 0.6);
    const SymEigen eig = SymEigen::of(laplacian(g).matrix);
    EXPECT_GE(eig.min(), -1e-9 * std::max(1.0, eig.max()));
  }
}

TEST(QuadraticForm, MatchesEdgeSumIdentity) {
  test::Rng rng(23);
  const BlockLaplacian l1 = laplacian(graph(example(), 0));
  for (int trial = 0; trial < 50; ++trial) {
    const Vector x = test::random_vector(rng, 21);
    const double oracle = test::edge_sum_quadratic_form(graph(example(), 0), x);
    EXPECT_NEAR(quadratic_form(l1, x), oracle, 1e-9 * std::max(1.0, std::abs(oracle)));
  }
  for (int trial = 0; trial < 200; ++trial) {
    const MatrixWeightedGraph g = test::random_graph(rng, test::uniform_int(rng, 2, 6), test::uniform_int(rng, 1, 3), 0.6);
    const Vector x = test::random_vector(rng, g.order());
    const double oracle = test::edge_sum_quadratic_form(g, x);
    EXPECT_NEAR(quadratic_form(laplacian(g), x), oracle, 1e-9 * std::max(1.0, std::abs(oracle)));
  }
}

TEST(QuadraticForm, ConsensusDirectionAndZero) {
  const BlockLaplacian l = laplacian(graph(example(), 0));
  Vector ones_v(21);
  for (int i = 0; i < 7; ++i) ones_v.segment(i * 3, 3) = Eigen::Vector3d(0.3, -1.2, 2.0);
  EXPECT_NEAR(quadratic_form(l, ones_v), 0.0, 1e-12);
  EXPECT_EQ(quadratic_form(l, Vector::Zero(21)), 0.0);
  try {
    quadratic_form(l, Vector::Zero(20));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Laplacian, PropertyConsensusDirectionsInNullSpace) {
  test::Rng rng(24);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = test::uniform_int(rng, 2, 6);
    const int d = test::uniform_int(rng, 1, 3);
    const MatrixWeightedGraph g = test::random_connected_pd_graph(rng, n, d);
    const BlockLaplacian l = laplacian(g);
    for (int k = 0; k < d; ++k) {
      const Vector v = test::random_vector(rng, d);
      const Vector x = v.replicate(n, 1);
      EXPECT_LE((l.matrix.matrix() * x).norm(), 1e-10);
    }
  }
}

TEST(IsConnected, Examples) {
  EXPECT_FALSE(is_connected(graph(example(), 0)));
  MatrixWeightedGraph two(2, 1);
  two.add_edge(0, 1, Matrix::Ones(1, 1));
  EXPECT_TRUE(is_connected(two));
  EXPECT_FALSE(is_connected(MatrixWeightedGraph(2, 1)));
}

TEST(PositiveNegativeSpanningTree, PsdOnlyEdgeIsNotEnough) {
  MatrixWeightedGraph g(2, 2);
  g.add_edge(0, 1, Eigen::Vector2d(1, 0).asDiagonal().toDenseMatrix());
  EXPECT_FALSE(has_positive_negative_spanning_tree(g).exists);
  g = MatrixWeightedGraph(2, 2);
  g.add_edge(0, 1, -Matrix::Identity(2, 2));
  const SpanningTree t = has_positive_negative_spanning_tree(g);
  EXPECT_TRUE(t.exists);
  ASSERT_EQ(t.edges.size(), 1u);
}

TEST(PositiveNegativeSpanningTree, WitnessIsADefiniteSpanningTree) {
  test::Rng rng(25);
  for (int trial = 0; trial < 200; ++trial) {
    const MatrixWeightedGraph g = test::random_graph(rng, test::uniform_int(rng, 2, 7), 2, 0.7);
    const SpanningTree t = has_positive_negative_spanning_tree(g);
    if (!t.exists) continue;
    ASSERT_EQ(static_cast<int>(t.edges.size()), g.n() - 1);
    MatrixWeightedGraph tree(g.n(), g.d());
    for (auto [i, j] : t.edges) {
      const Edge* e = g.find_edge(i, j);
      ASSERT_NE(e, nullptr);
      EXPECT_TRUE(is_definite(classify_definiteness(SymMatrix(e->weight))));
      tree.add_edge(i, j, e->weight);
    }
    EXPECT_TRUE(is_connected(tree));
  }
}

TEST(PositiveNegativeSpanningTree, PropertyMonotoneUnderAddingPdEdges) {
  test::Rng rng(26);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = test::uniform_int(rng, 2, 6);
    MatrixWeightedGraph g = test::random_graph(rng, n, 2, 0.5);
    const bool before = has_positive_negative_spanning_tree(g).exists;
    const int i = test::uniform_int(rng, 0, n - 2);
    const int j = test::uniform_int(rng, i + 1, n - 1);
    if (g.find_edge(i, j)) continue;
    g.add_edge(i, j, test::random_pd(rng, 2));
    if (before) {
      EXPECT_TRUE(has_positive_negative_spanning_tree(g).exists);
    }
  }
}

TEST(StructuralBalance, AllPositiveGraph) {
  const auto b = structural_balance(graph(example(), 0));
  ASSERT_TRUE(b.has_value());
  EXPECT_EQ(b->sigma, std::vector<int>(7, 1));
  EXPECT_TRUE(b->v2().empty());
}

TEST(StructuralBalance, VariantUnionGraph) {
  // The three variant graphs are edge-disjoint, so their union is a single graph.
  MatrixWeightedGraph u(7, 3);
  for (const auto& g : variant().graphs()) {
    for (const auto& e : g.edges()) u.add_edge(e.i, e.j, e.weight);
  }
  const auto b = structural_balance(u);
  ASSERT_TRUE(b.has_value());
  EXPECT_EQ(b->v1(), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(b->v2(), (std::vector<int>{3, 4, 5, 6}));
}

TEST(StructuralBalance, TriangleWithOneNegativeEdge) {
  MatrixWeightedGraph g(3, 1);
  g.add_edge(0, 1, Matrix::Ones(1, 1)).add_edge(1, 2, Matrix::Ones(1, 1)).add_edge(0, 2, -Matrix::Ones(1, 1));
  EXPECT_FALSE(structural_balance(g).has_value());
}

TEST(StructuralBalance, DisconnectedComponentsRootedPositive) {
  MatrixWeightedGraph g(4, 1);
  g.add_edge(0, 1, -Matrix::Ones(1, 1)).add_edge(2, 3, -Matrix::Ones(1, 1));
  const auto b = structural_balance(g);
  ASSERT_TRUE(b.has_value());
  EXPECT_EQ(b->sigma, (std::vector<int>{1, -1, 1, -1}));
}

TEST(GaugeTransform, IdentityAndInvolution) {
  const MatrixWeightedGraph& g = graph(variant(), 2);
  EXPECT_EQ(gauge_transform(g, Bipartition{std::vector<int>(7, 1)}), g);
  const Bipartition b{{1, -1, 1, 1, -1, 1, -1}};
  EXPECT_EQ(gauge_transform(gauge_transform(g, b), b), g);
  EXPECT_THROW(gauge_transform(g, Bipartition{{1, 1}}), Error);
}

TEST(GaugeTransform, BalancedVariantBecomesNonnegative) {
  const Bipartition b{{1, 1, 1, -1, -1, -1, -1}};
  for (const auto& g : variant().graphs()) {
    for (const auto& e : checked_edges(gauge_transform(g, b))) EXPECT_EQ(e.sign(), 1);
  }
}

TEST(GaugeTransform, PropertyBalanceThenTransformGivesPositiveEdgesAndConjugation) {
  test::Rng rng(27);
  int balanced = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = test::uniform_int(rng, 2, 6);
    const int d = test::uniform_int(rng, 1, 3);
    const MatrixWeightedGraph g = test::random_graph(rng, n, d, 0.5);
    Bipartition b{std::vector<int>(n)};
    for (auto& s : b.sigma) s = test::uniform_int(rng, 0, 1) ? 1 : -1;
    const Vector c = b.gauge_diagonal(d);
    const Matrix expected = c.asDiagonal() * laplacian(g).matrix.matrix() * c.asDiagonal();
    EXPECT_LE((laplacian(gauge_transform(g, b)).matrix.matrix() - expected).norm(), 1e-10);

    if (auto sb = structural_balance(g)) {
      ++balanced;
      for (const auto& e : checked_edges(gauge_transform(g, *sb))) EXPECT_EQ(e.sign(), 1);
    }
  }
  EXPECT_GT(balanced, 50);
}

}  // namespace
}  // namespace mwc
