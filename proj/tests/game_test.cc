#include <cmath>

#include <gtest/gtest.h>

#include "nzsg/errors.h"
#include "nzsg/game.h"
#include "nzsg/game_spec.h"
#include "nzsg/rng.h"
#include "test_util.h"

namespace nzsg {
namespace {

using testing::Profile;
using testing::Scalar;
using testing::TwoPlayerBilinear;
using testing::TwoPlayerQuadratic;

TEST(PlayerPayoff, TwoPlayerBilinearHandValues) {
  const GameGraph g = TwoPlayerBilinear();
  const StrategyProfile x = Profile(g, {1, 2});
  EXPECT_DOUBLE_EQ(PlayerPayoff(g, x, 0), 2.0);
  EXPECT_DOUBLE_EQ(PlayerPayoff(g, x, 1), -2.0);
}

TEST(PlayerPayoff, VanishesAtOrigin) {
  for (const GameGraph& g :
       {MakeLinearGame(4, {2, 3, 1, 5}, 3), MakeQuadraticScGame(4, {2, 3, 1, 5}, 3)}) {
    for (double p : AllPayoffs(g, g.ZeroProfile())) EXPECT_EQ(p, 0.0);
  }
}

TEST(PlayerPayoff, ShapeAndIndexErrors) {
  const GameGraph g = TwoPlayerBilinear();
  const StrategyProfile wrong(std::vector<int>{1, 2});
  EXPECT_THROW(PlayerPayoff(g, wrong, 0), DimensionError);
  EXPECT_THROW(PlayerPayoff(g, g.ZeroProfile(), 2), PlayerIndexError);
  EXPECT_THROW(PlayerGradient(g, g.ZeroProfile(), -1), PlayerIndexError);
  EXPECT_THROW(PlayerGradient(g, wrong, 0), DimensionError);
}

TEST(PlayerGradient, TwoPlayerBilinearHandValues) {
  const GameGraph g = TwoPlayerBilinear();
  const StrategyProfile x = Profile(g, {1, 2});
  EXPECT_DOUBLE_EQ(PlayerGradient(g, x, 0)(0), 2.0);
  EXPECT_DOUBLE_EQ(PlayerGradient(g, x, 1)(0), -1.0);
}

TEST(PlayerGradient, QuadraticScalarGame) {
  const GameGraph g = TwoPlayerQuadratic();
  const StrategyProfile x = Profile(g, {0.3, -1.7});
  EXPECT_NEAR(PlayerGradient(g, x, 0)(0), -0.3 + -1.7, 1e-15);
  // p_2 = x^2/2 - x y - y^2/2, so the own gradient is -x - y.
  EXPECT_NEAR(PlayerGradient(g, x, 1)(0), -0.3 + 1.7, 1e-15);
}

TEST(PlayerGradient, ZeroAtOriginOfBilinearGame) {
  const GameGraph g = MakeLinearGame(3, {10, 10, 10}, 11);
  EXPECT_EQ(JointGradient(g, g.ZeroProfile()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(ZeroSum, LinearExperimentGame) {
  const GameGraph g = MakeLinearGame(3, {10, 10, 10}, 1);
  const ZeroSumReport r = CheckZeroSum(g, 1000, 5);
  EXPECT_TRUE(r.passed);
  EXPECT_LE(r.max_relative, 1e-9);
}

TEST(ZeroSum, QuadraticTriangleCancels) {
  const GameGraph g = MakeQuadraticScGame(3, {10, 10, 10}, 2);
  const ZeroSumReport r = CheckZeroSum(g, 1000, 6, 5.0);
  EXPECT_TRUE(r.passed) << r.max_relative;
}

TEST(ZeroSum, ClippedGameFarOutside) {
  const GameGraph g = MakeLipschitzScGame(3, {4, 4, 4}, 2, 1.0);
  EXPECT_TRUE(CheckZeroSum(g, 500, 7, 50.0).passed);
}

GameGraph CorruptedGame(GameGraph::ZeroSumGate gate) {
  Rng rng(9);
  std::vector<Edge> edges;
  const std::vector<int> dims = {3, 3, 3};
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const EdgePayoff p = EdgePayoff::Bilinear(rng.UniformMatrix(3, 3, 0, 1));
      const double scale = (i == 0 && j == 2) ? 2.0 : 1.0;
      edges.push_back({i, j, p, p.Mirrored().Scaled(scale)});
    }
  }
  return GameGraph::General(dims, edges, PayoffKind::kBilinear, {}, gate);
}

TEST(ZeroSum, CorruptedEdgeFails) {
  const GameGraph g = CorruptedGame(GameGraph::ZeroSumGate::kSkip);
  EXPECT_FALSE(CheckZeroSum(g, 100, 1).passed);
}

TEST(ZeroSum, GeneralConstructorGatesViolations) {
  EXPECT_THROW(CorruptedGame(GameGraph::ZeroSumGate::kEnforce), ConstructionError);
}

TEST(PayoffSumIdentity, HandValues) {
  const GameGraph g = TwoPlayerBilinear();
  const auto r = CheckPayoffSumIdentity(g, Profile(g, {1, 2}), Profile(g, {3, 4}));
  EXPECT_DOUBLE_EQ(r.lhs, -2.0);
  EXPECT_DOUBLE_EQ(r.rhs, -2.0);
  EXPECT_DOUBLE_EQ(r.gap, 0.0);
  EXPECT_TRUE(r.passed);
}

TEST(PayoffSumIdentity, SameProfileGivesZero) {
  const GameGraph g = MakeQuadraticScGame(3, {2, 2, 2}, 4);
  const StrategyProfile x = g.MakeProfile(VectorXd::LinSpaced(6, -1, 2));
  const auto r = CheckPayoffSumIdentity(g, x, x);
  EXPECT_NEAR(r.lhs, 0.0, 1e-12);
  EXPECT_NEAR(r.gap, 0.0, 1e-12);
}

TEST(PayoffSumIdentity, RandomQuadraticProfiles) {
  const GameGraph g = MakeQuadraticScGame(3, {10, 10, 10}, 8);
  Rng rng(21);
  for (int k = 0; k < 200; ++k) {
    const auto x = g.MakeProfile(rng.UniformVector(30, -1, 1));
    const auto xs = g.MakeProfile(rng.UniformVector(30, -1, 1));
    const auto r = CheckPayoffSumIdentity(g, x, xs);
    EXPECT_TRUE(r.passed);
    EXPECT_LE(r.gap / r.scale, 1e-9);
  }
}

TEST(Constructors, QuadraticStrongConcavityIsNMinusOne) {
  for (int n : {2, 3, 6}) {
    const GameGraph g = MakeQuadraticScGame(n, std::vector<int>(n, 3), 1);
    EXPECT_DOUBLE_EQ(g.moduli().alpha, n - 1.0);
    ASSERT_TRUE(g.moduli().beta.has_value());
    EXPECT_GE(*g.moduli().beta, 1.0);
    EXPECT_FALSE(g.moduli().lipschitz.has_value());
  }
}

TEST(Constructors, LinearGameShapeAndCouplingRange) {
  const GameGraph g = MakeLinearGame(3, {10, 10, 10}, 42);
  EXPECT_EQ(g.num_players(), 3);
  EXPECT_EQ(g.total_dim(), 30);
  EXPECT_EQ(g.edges().size(), 3u);
  for (const Edge& e : g.edges()) {
    const MatrixXd& c = e.forward.coupling();
    EXPECT_EQ(c.rows(), 10);
    EXPECT_GE(c.minCoeff(), 0.0);
    EXPECT_LT(c.maxCoeff(), 1.0);
    EXPECT_EQ((e.backward.coupling() + c.transpose()).cwiseAbs().maxCoeff(), 0.0);
  }
  EXPECT_DOUBLE_EQ(g.moduli().alpha, 0.0);
}

TEST(Constructors, SameSeedSameGame) {
  const GameGraph a = MakeLinearGame(3, {4, 5, 6}, 77);
  const GameGraph b = MakeLinearGame(3, {4, 5, 6}, 77);
  const GameGraph c = MakeLinearGame(3, {4, 5, 6}, 78);
  for (std::size_t k = 0; k < a.edges().size(); ++k) {
    EXPECT_EQ(a.edges()[k].forward.coupling(), b.edges()[k].forward.coupling());
  }
  EXPECT_NE(a.edges()[0].forward.coupling(), c.edges()[0].forward.coupling());
}

TEST(Constructors, RejectInvalidInput) {
  EXPECT_THROW(MakeLinearGame(1, {3}, 0), ConstructionError);
  EXPECT_THROW(MakeLinearGame(2, {3, 0}, 0), ConstructionError);
  EXPECT_THROW(MakeLinearGame(3, {3, 3}, 0), ConstructionError);
  EXPECT_THROW(MakeLipschitzScGame(2, {1, 1}, 0, 0.0), ConstructionError);
  const EdgePayoff p = EdgePayoff::Bilinear(MatrixXd::Ones(1, 1));
  EXPECT_THROW(GameGraph::Pairwise({1, 1}, {{0, 0, p}}, PayoffKind::kBilinear, {}),
               ConstructionError);
  EXPECT_THROW(GameGraph::Pairwise({1, 1}, {{0, 1, p}, {1, 0, p}},
                                   PayoffKind::kBilinear, {}),
               ConstructionError);
  EXPECT_THROW(GameGraph::Pairwise({2, 1}, {{0, 1, p}}, PayoffKind::kBilinear, {}),
               ConstructionError);
}

class GradientConsistency : public ::testing::TestWithParam<int> {};

TEST_P(GradientConsistency, MatchesCentralDifferences) {
  const int family = GetParam();
  const std::vector<int> dims = {3, 4, 2};
  const GameGraph g = family == 0   ? MakeLinearGame(3, dims, 5)
                      : family == 1 ? MakeQuadraticScGame(3, dims, 5)
                                    : MakeLipschitzScGame(3, dims, 5, 1.5);
  EXPECT_TRUE(CheckGradientConsistency(g, 100, 3).passed);
  // Also cross the clipping boundary for the saturated family.
  EXPECT_TRUE(CheckGradientConsistency(g, 100, 4, 1e-5, 1e-6, 4.0).passed);
}

INSTANTIATE_TEST_SUITE_P(Families, GradientConsistency, ::testing::Values(0, 1, 2));

TEST(Certificates, StrongConcavityQuadratic) {
  const GameGraph g = MakeQuadraticScGame(3, {10, 10, 10}, 3);
  const CertificateReport r = CheckStrongConcavity(g, 500, 1);
  EXPECT_TRUE(r.applicable);
  EXPECT_TRUE(r.passed) << r.worst;
}

TEST(Certificates, StrongConcavityFailsWhenOverclaimed) {
  const GameGraph base = MakeQuadraticScGame(3, {3, 3, 3}, 3);
  std::vector<GameGraph::PairwiseEdge> edges;
  for (const Edge& e : base.edges()) edges.push_back({e.i, e.j, e.forward});
  Moduli m = base.moduli();
  m.alpha = 3.0;  // true value is 2
  const GameGraph g =
      GameGraph::Pairwise(base.dims(), edges, PayoffKind::kQuadraticSC, m);
  EXPECT_FALSE(CheckStrongConcavity(g, 200, 1).passed);
}

TEST(Certificates, LipschitzBoundHoldsFarOutside) {
  const GameGraph g = MakeLipschitzScGame(3, {5, 5, 5}, 9, 2.0);
  ASSERT_TRUE(g.moduli().lipschitz.has_value());
  EXPECT_DOUBLE_EQ(g.moduli().alpha, 2.0);
  const CertificateReport r = CheckLipschitzBound(g, 1000, 2);
  EXPECT_TRUE(r.passed) << r.worst;
  EXPECT_TRUE(CheckStrongConcavity(g, 300, 3).passed);
}

TEST(Certificates, SmoothnessForQuadraticAndLinear) {
  EXPECT_TRUE(CheckSmoothness(MakeQuadraticScGame(3, {4, 4, 4}, 1), 200, 1).passed);
  EXPECT_TRUE(CheckSmoothness(MakeLinearGame(3, {4, 4, 4}, 1), 200, 1).passed);
}

// --- Radial saturation ------------------------------------------------------------

TEST(RadialSaturation, IdentityInsideAndBoundedOutside) {
  const RadialSaturation s(2.0);
  const VectorXd inside = VectorXd::Constant(3, 0.5);
  EXPECT_EQ(s.Map(inside), inside);
  EXPECT_DOUBLE_EQ(s.Potential(inside), 0.5 * inside.squaredNorm());
  for (double r : {2.5, 10.0, 1e6}) {
    VectorXd u = VectorXd::Zero(3);
    u(1) = r;
    // The image stays inside radius 2R; tanh rounds to 1 far out.
    EXPECT_LE(s.Map(u).norm(), 4.0);
    if (r < 100.0) EXPECT_LT(s.Map(u).norm(), 4.0);
    EXPECT_GT(s.Map(u).norm(), 2.0);
  }
  EXPECT_LE(s.MapNormBound(1.0), 1.0 + 1e-15);
  EXPECT_LE(s.MapNormBound(1e9), 4.0);
}

TEST(RadialSaturation, DerivativesMatchFiniteDifferences) {
  const RadialSaturation s(1.0);
  Rng rng(3);
  const double h = 1e-6;
  for (int k = 0; k < 50; ++k) {
    const VectorXd u = rng.UniformVector(4, -3, 3);
    const VectorXd w = rng.UniformVector(4, -1, 1);
    MatrixXd jac_fd(4, 4);
    VectorXd grad_fd(4);
    MatrixXd hess_fd(4, 4);
    for (int c = 0; c < 4; ++c) {
      VectorXd up = u, dn = u;
      up(c) += h;
      dn(c) -= h;
      jac_fd.col(c) = (s.Map(up) - s.Map(dn)) / (2 * h);
      grad_fd(c) = (s.Potential(up) - s.Potential(dn)) / (2 * h);
      hess_fd.col(c) = (s.Jacobian(up) * w - s.Jacobian(dn) * w) / (2 * h);
    }
    EXPECT_LT(testing::MaxRelDiff(s.Jacobian(u), jac_fd), 1e-7);
    EXPECT_LT(testing::MaxRelDiff(s.Map(u), grad_fd), 1e-7);
    EXPECT_LT(testing::MaxRelDiff(s.ContractedHessian(u, w), hess_fd), 1e-6);
    // |D phi| <= 1.
    EXPECT_LE(OperatorNorm(s.Jacobian(u)), 1.0 + 1e-12);
  }
}

TEST(EdgePayoff, SecondDerivativeBlocksMatchFiniteDifferences) {
  Rng rng(4);
  const EdgePayoff p = EdgePayoff::Clipped(rng.UniformMatrix(3, 2, 0, 1), 1.0);
  const double h = 1e-6;
  for (int k = 0; k < 20; ++k) {
    const VectorXd u = rng.UniformVector(3, -2, 2);
    const VectorXd v = rng.UniformVector(2, -2, 2);
    MatrixXd oo(3, 3), ot(3, 2), to(2, 3), tt(2, 2);
    for (int c = 0; c < 3; ++c) {
      VectorXd up = u, dn = u;
      up(c) += h;
      dn(c) -= h;
      oo.col(c) = (p.GradOwn(up, v) - p.GradOwn(dn, v)) / (2 * h);
      to.col(c) = (p.GradOther(up, v) - p.GradOther(dn, v)) / (2 * h);
    }
    for (int c = 0; c < 2; ++c) {
      VectorXd up = v, dn = v;
      up(c) += h;
      dn(c) -= h;
      ot.col(c) = (p.GradOwn(u, up) - p.GradOwn(u, dn)) / (2 * h);
      tt.col(c) = (p.GradOther(u, up) - p.GradOther(u, dn)) / (2 * h);
    }
    EXPECT_LT(testing::MaxRelDiff(p.HessOwnOwn(u, v), oo), 1e-6);
    EXPECT_LT(testing::MaxRelDiff(p.HessOwnOther(u, v), ot), 1e-6);
    EXPECT_LT(testing::MaxRelDiff(p.HessOtherOwn(u, v), to), 1e-6);
    EXPECT_LT(testing::MaxRelDiff(p.HessOtherOther(u, v), tt), 1e-6);
  }
}

TEST(EdgePayoff, MirrorIsNegatedSwap) {
  Rng rng(5);
  const EdgePayoff p(rng.UniformMatrix(2, 3, -1, 1), 0.7, 1.3, 2.0);
  const EdgePayoff q = p.Mirrored();
  for (int k = 0; k < 20; ++k) {
    const VectorXd u = rng.UniformVector(2, -4, 4);
    const VectorXd v = rng.UniformVector(3, -4, 4);
    EXPECT_NEAR(p.Value(u, v) + q.Value(v, u), 0.0, 1e-12);
  }
}

// --- Game spec files ------------------------------------------------------------------

TEST(GameSpec, CompleteRandomSpecReproducesConstructor) {
  const GameSpec spec = CompleteGameSpec(PayoffKind::kBilinear, 3, 10, 123);
  const GameGraph a = BuildGame(spec);
  const GameGraph b = MakeLinearGame(3, {10, 10, 10}, 123);
  ASSERT_EQ(a.edges().size(), b.edges().size());
  for (std::size_t k = 0; k < a.edges().size(); ++k) {
    EXPECT_EQ(a.edges()[k].forward.coupling(), b.edges()[k].forward.coupling());
  }
}

TEST(GameSpec, JsonRoundTrip) {
  const nlohmann::json j = nlohmann::json::parse(R"({
    "family": "quadratic-sc", "players": 3, "dim": 2,
    "edges": [{"pair": [0, 1], "coupling": [[1, 0], [0, 1]]},
              {"pair": [1, 2], "reverse_scale": 2.0}],
    "matrices": {"source": "random", "seed": 5, "low": -1, "high": 1},
    "moduli": {"beta": 9}
  })");
  const GameSpec spec = ParseGameSpec(j);
  EXPECT_EQ(spec.dims, (std::vector<int>{2, 2, 2}));
  EXPECT_FALSE(spec.complete);
  ASSERT_EQ(spec.edges.size(), 2u);
  EXPECT_TRUE(spec.edges[0].coupling.has_value());
  EXPECT_DOUBLE_EQ(spec.edges[1].reverse_scale, 2.0);
  const GameSpec again = ParseGameSpec(ToJson(spec));
  EXPECT_EQ(ToJson(again).dump(), ToJson(spec).dump());
  const GameGraph g = BuildGame(spec);
  EXPECT_DOUBLE_EQ(*g.moduli().beta, 9.0);
  EXPECT_FALSE(CheckZeroSum(g, 50, 1).passed);
}

TEST(GameSpec, RejectsMalformedInput) {
  using nlohmann::json;
  EXPECT_THROW(ParseGameSpec(json::parse(R"({"family": "cubic", "dims": [1, 1]})")),
               ConfigError);
  EXPECT_THROW(ParseGameSpec(json::parse(R"({"family": "bilinear"})")), ConfigError);
  EXPECT_THROW(ParseGameSpec(json::parse(
                   R"({"family": "bilinear", "dims": [1, 1], "edges": [{"pair": [0, 2]}]})")),
               ConfigError);
  EXPECT_THROW(
      ParseGameSpec(json::parse(
          R"({"family": "bilinear", "dims": [2, 1], "edges": [{"pair": [0, 1], "coupling": [[1, 2]]}]})")),
      ConfigError);
  EXPECT_THROW(ParseGameSpec(json::parse(
                   R"({"family": "bilinear", "dims": [1, 1], "matrices": {"source": "inline"}})")),
               ConfigError);
  GameSpec no_seed = CompleteGameSpec(PayoffKind::kBilinear, 2, 1, 0);
  no_seed.seed.reset();
  EXPECT_THROW(BuildGame(no_seed), ConfigError);
}

}  // namespace
}  // namespace nzsg
