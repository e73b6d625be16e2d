#include <gtest/gtest.h>

#include "mwc/analysis.hpp"
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

std::vector<BlockLaplacian> catalog_laplacians(const ScenarioConfig& c) {
  std::vector<BlockLaplacian> ls;
  for (const auto& g : c.graphs()) ls.push_back(laplacian(g));
  return ls;
}

std::vector<Matrix> dense(const std::vector<BlockLaplacian>& ls) {
  std::vector<Matrix> out;
  for (const auto& l : ls) out.push_back(l.matrix.matrix());
  return out;
}

TEST(NullIntersection, TrivialCases) {
  MatrixWeightedGraph pd(2, 2);
  pd.add_edge(0, 1, Matrix::Identity(2, 2));
  EXPECT_EQ(null_intersection({laplacian(pd)}).dim(), 2);
  EXPECT_EQ(null_intersection({laplacian(MatrixWeightedGraph(3, 2))}).dim(), 6);
  EXPECT_THROW(null_intersection({}), Error);

  MatrixWeightedGraph a(2, 2);
  a.add_edge(0, 1, Eigen::Vector2d(1, 0).asDiagonal().toDenseMatrix());
  MatrixWeightedGraph b(2, 2);
  b.add_edge(0, 1, Eigen::Vector2d(0, 1).asDiagonal().toDenseMatrix());
  // Each PSD edge leaves one coordinate free; together they force consensus.
  EXPECT_EQ(null_intersection({laplacian(a)}).dim(), 3);
  EXPECT_EQ(null_intersection({laplacian(a), laplacian(b)}).dim(), 2);
}

TEST(NullIntersection, ExampleCatalogMatchesSvdOracle) {
  const auto ls = catalog_laplacians(example());
  const NullSpaceBasis basis = null_intersection(ls);
  const Matrix oracle = test::svd_null_space(dense(ls));
  EXPECT_EQ(basis.dim(), 5);
  ASSERT_EQ(oracle.cols(), basis.dim());
  EXPECT_LE((projector(basis).matrix() - test::projector_of(oracle)).norm(), 1e-8);
}

TEST(NullIntersection, PropertyMatchesStackedSvdOnRandomCatalogs) {
  test::Rng rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = test::uniform_int(rng, 2, 5);
    const int d = test::uniform_int(rng, 1, 3);
    std::vector<BlockLaplacian> ls;
    const int count = test::uniform_int(rng, 1, 4);
    for (int k = 0; k < count; ++k) ls.push_back(laplacian(test::random_graph(rng, n, d, 0.5)));
    const NullSpaceBasis basis = null_intersection(ls);
    const Matrix oracle = test::svd_null_space(dense(ls));
    ASSERT_EQ(basis.dim(), oracle.cols());
    EXPECT_LE((projector(basis).matrix() - test::projector_of(oracle)).norm(), 1e-8);
  }
}

TEST(ExtractClusters, GroupsEqualBlocks) {
  Vector x(8);
  x << 1, 2, 3, 4, 1, 2, 1 + 1e-9, 2;
  EXPECT_EQ(extract_clusters(x, 4, 2), (std::vector<std::vector<int>>{{0, 2, 3}, {1}}));
  EXPECT_THROW(extract_clusters(x, 3, 2), Error);
}

TEST(PredictSteadyState, Examples) {
  // Two agents, one PD edge: the average.
  MatrixWeightedGraph g(2, 2);
  g.add_edge(0, 1, Matrix::Identity(2, 2));
  Vector x0(4);
  x0 << 1, 0, 3, 4;
  const ConsensusPrediction avg = predict_steady_state(null_intersection({laplacian(g)}), x0, 2);
  EXPECT_EQ(avg.kind, ConsensusKind::Consensus);
  EXPECT_LE((avg.steady_state - Eigen::Vector4d(2, 2, 2, 2)).norm(), 1e-12);

  // Negative edge: opposite values.
  MatrixWeightedGraph neg(2, 2);
  neg.add_edge(0, 1, -Matrix::Identity(2, 2));
  const ConsensusPrediction bip = predict_steady_state(null_intersection({laplacian(neg)}), x0, 2);
  EXPECT_EQ(bip.kind, ConsensusKind::BipartiteConsensus);
  EXPECT_LE((bip.steady_state - Eigen::Vector4d(-1, -2, 1, 2)).norm(), 1e-12);

  const ConsensusPrediction none = predict_steady_state(NullSpaceBasis::from_columns(Matrix(4, 0)), x0, 2);
  EXPECT_EQ(none.kind, ConsensusKind::AsymptoticStability);
  EXPECT_EQ(none.steady_state, Vector::Zero(4));

  EXPECT_THROW(predict_steady_state(avg.basis, Vector::Zero(3), 2), Error);
}

TEST(PredictSteadyState, ClusterExampleHasThreeClusters) {
  const ConsensusPrediction p =
      predict_steady_state(null_intersection(catalog_laplacians(example())), example().initial_state, 3);
  EXPECT_EQ(p.kind, ConsensusKind::ClusterConsensus);
  EXPECT_EQ(p.clusters, (std::vector<std::vector<int>>{{0, 1, 2}, {3, 5}, {4, 6}}));
}

TEST(PredictSteadyState, PropertyProjectionIsIdempotent) {
  test::Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = test::uniform_int(rng, 2, 5);
    const int d = test::uniform_int(rng, 1, 3);
    const NullSpaceBasis basis = null_intersection({laplacian(test::random_graph(rng, n, d, 0.5))});
    const Vector x0 = test::random_vector(rng, n * d);
    const Vector once = predict_steady_state(basis, x0, d).steady_state;
    const Vector twice = predict_steady_state(basis, once, d).steady_state;
    EXPECT_LE((once - twice).norm(), 1e-10);
  }
}

TEST(Mu, Examples) {
  EXPECT_NEAR(mu_m_plus_1(Matrix::Identity(4, 4), 0), 1.0, 1e-14);
  const Matrix p = Eigen::Vector4d(1, 1, 0, 0).asDiagonal();
  EXPECT_NEAR(mu_m_plus_1(p, 2), 0.0, 1e-14);
  EXPECT_NEAR(mu_m_plus_1(p, 1), 1.0, 1e-14);
  EXPECT_THROW(mu_m_plus_1(p, 4), Error);
  EXPECT_THROW(mu_m_plus_1(p, -1), Error);
}

TEST(Mu, ExamplePeriodContracts) {
  const StateTransition phi = state_transition(example().schedule, Window{0, 6});
  EXPECT_LT(mu_m_plus_1(phi, 5), 1.0 - 1e-9);
  EXPECT_NEAR(mu_m_plus_1(phi, 4), 1.0, 1e-9);
}

TEST(Certify, ClusterExample) {
  const CertificationReport r = certify_cluster_consensus(example().schedule, period_windows(example().schedule));
  EXPECT_TRUE(r.certified);
  EXPECT_TRUE(r.window_nullspaces_equal);
  EXPECT_EQ(r.m, 5);
  EXPECT_LT(r.q_estimate, 1.0);
  EXPECT_EQ(r.windows.size(), 100u);
  EXPECT_FALSE(r.pn_spanning_tree);
  ASSERT_TRUE(r.balance.has_value());
  EXPECT_TRUE(r.balance->v2().empty());
  const Matrix oracle = test::svd_null_space(dense(catalog_laplacians(example())));
  EXPECT_LE(projector_distance(r.basis(), NullSpaceBasis::from_columns(oracle)), 1e-8);
}

TEST(Certify, BipartiteVariant) {
  const CertificationReport r = certify_cluster_consensus(variant().schedule, period_windows(variant().schedule));
  EXPECT_TRUE(r.certified);
  EXPECT_EQ(r.m, 3);
  EXPECT_TRUE(r.pn_spanning_tree);
  ASSERT_TRUE(r.balance.has_value());
  EXPECT_EQ(r.balance->v1(), (std::vector<int>{0, 1, 2}));
}

TEST(Certify, ComplementaryPdGraphsGiveConsensus) {
  test::Rng rng(43);
  MatrixWeightedGraph a(3, 2, "a");
  a.add_edge(0, 1, test::random_pd(rng, 2));
  MatrixWeightedGraph b(3, 2, "b");
  b.add_edge(1, 2, test::random_pd(rng, 2));
  const SwitchingSchedule s = SwitchingSchedule::periodic({a, b}, {{0, 1.0, 1.0}, {1, 1.0, 1.0}}, 5, 1.0);
  const CertificationReport r = certify_cluster_consensus(s, period_windows(s));
  EXPECT_TRUE(r.certified);
  EXPECT_EQ(r.m, 2);
  EXPECT_TRUE(r.pn_spanning_tree);
}

TEST(Certify, EdgelessScheduleHasNothingToContract) {
  // Zero averaged Laplacian: m = dn and mu is reported as 0.
  const SwitchingSchedule s = SwitchingSchedule::explicit_schedule({MatrixWeightedGraph(2, 1)}, {{0, 1.0, 1.0}}, 1.0);
  const CertificationReport r = certify_cluster_consensus(s, {Window{0, 1}});
  EXPECT_EQ(r.m, 2);
  EXPECT_EQ(r.q_estimate, 0.0);
}

TEST(Certify, SingleGraphReducesToFixedNetwork) {
  test::Rng rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    const MatrixWeightedGraph g = test::random_graph(rng, test::uniform_int(rng, 2, 5), 2, 0.6);
    const SwitchingSchedule s = SwitchingSchedule::periodic({g}, {{0, 0.7, 1.0}}, 3, 0.5);
    const CertificationReport r = certify_cluster_consensus(s, period_windows(s));
    if (r.m < s.order()) {
      EXPECT_TRUE(r.certified) << "trial " << trial;
    }
    EXPECT_EQ(r.m, null_space(laplacian(g).matrix).dim());
  }
}

TEST(Certify, RejectsGappedWindows) {
  try {
    certify_cluster_consensus(example().schedule, {Window{0, 6}, Window{7, 12}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WindowsNotContiguous);
  }
  EXPECT_THROW(certify_cluster_consensus(example().schedule, {Window{1, 6}}), Error);
  EXPECT_THROW(certify_cluster_consensus(example().schedule, {}), Error);
}

TEST(BipartiteSteadyState, Examples) {
  Vector x0(4);
  x0 << 1, 2, 3, 4;
  const Vector all_pos = bipartite_steady_state(Bipartition{{1, 1}}, Matrix::Identity(2, 2), x0);
  EXPECT_LE((all_pos - Eigen::Vector4d(2, 3, 2, 3)).norm(), 1e-12);
  const Vector split = bipartite_steady_state(Bipartition{{1, -1}}, Matrix::Identity(2, 2), x0);
  EXPECT_LE((split - Eigen::Vector4d(-1, -1, 1, 1)).norm(), 1e-12);
  const Vector e1 = bipartite_steady_state(Bipartition{{1, 1}}, Matrix::Identity(2, 1), x0);
  EXPECT_LE((e1 - Eigen::Vector4d(2, 0, 2, 0)).norm(), 1e-12);
  try {
    bipartite_steady_state(Bipartition{{1, 1}}, 2.0 * Matrix::Identity(2, 1), x0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonOrthonormalPsi);
  }
}

TEST(BipartiteSteadyState, AgreesWithProjectionOnVariant) {
  const auto ls = catalog_laplacians(variant());
  const NullSpaceBasis basis = null_intersection(ls);
  ASSERT_EQ(basis.dim(), 3);
  const auto b = simultaneous_structural_balance(variant().graphs());
  ASSERT_TRUE(b.has_value());
  const Vector closed = bipartite_steady_state(*b, Matrix::Identity(3, 3), variant().initial_state);
  const Vector projected = predict_steady_state(basis, variant().initial_state, 3).steady_state;
  EXPECT_LE((closed - projected).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(VerifyNecessaryCondition, Cases) {
  const auto ls = catalog_laplacians(example());
  const Vector x_star = predict_steady_state(null_intersection(ls), example().initial_state, 3).steady_state;
  EXPECT_TRUE(verify_necessary_condition(x_star, ls));
  EXPECT_TRUE(verify_necessary_condition(Vector::Zero(21), ls));
  EXPECT_FALSE(verify_necessary_condition(example().initial_state, ls));
  EXPECT_THROW(verify_necessary_condition(Vector::Zero(3), ls), Error);
}

TEST(Contraction, PropertyPhiShrinksComplementOfNullSpace) {
  test::Rng rng(45);
  int certified = 0;
  for (int trial = 0; trial < 200 && certified < 50; ++trial) {
    const SwitchingSchedule s =
        test::random_schedule(rng, test::uniform_int(rng, 2, 5), test::uniform_int(rng, 1, 3), 2);
    const LaplacianCache cache(s);
    const Window w{0, s.period_length()};
    // Catalogs where an edge flips sign between graphs have no integral network.
    CertificationReport r;
    try {
      r = certify_cluster_consensus(s, period_windows(s));
    } catch (const Error& e) {
      ASSERT_EQ(e.code(), ErrorCode::SignInconsistentEdge);
      continue;
    }
    if (!r.certified || r.m == s.order()) continue;
    ++certified;
    const Matrix phi = state_transition(s, cache, w).matrix;
    const Matrix p = projector(r.basis()).matrix();
    for (int k = 0; k < 5; ++k) {
      Vector w0 = test::random_vector(rng, s.order());
      w0 -= p * w0;
      EXPECT_LE((phi * w0).norm(), std::sqrt(r.mu.front()) * w0.norm() + 1e-10);
    }
  }
  EXPECT_GE(certified, 50);
}

TEST(Idempotency, ExampleTransitionOverManyPeriods) {
  const SwitchingSchedule& s = example().schedule;
  const CertificationReport r = certify_cluster_consensus(s, period_windows(s));
  const int periods = static_cast<int>(std::ceil(std::log(1e-8) / std::log(r.q_estimate)));
  const Matrix phi = state_transition(s, Window{0, 6 * periods}).matrix;
  EXPECT_LE((phi * phi - phi).norm(), 1e-6);
  EXPECT_LE((phi - projector(r.basis()).matrix()).norm(), 1e-6);
}

}  // namespace
}  // namespace mwc
