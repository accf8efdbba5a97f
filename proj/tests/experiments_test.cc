#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "nzsg/errors.h"
#include "nzsg/experiments.h"
#include "nzsg/io.h"

namespace nzsg {
namespace {

using nlohmann::json;

const CheckResult* FindCheck(const ExperimentResult& r, const std::string& name) {
  for (const CheckResult& c : r.checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

bool CheckPassed(const ExperimentResult& r, const std::string& name) {
  const CheckResult* c = FindCheck(r, name);
  EXPECT_NE(c, nullptr) << "missing check " << name;
  return c != nullptr && c->passed;
}

const Artifact& FindArtifact(const ExperimentResult& r, const std::string& name) {
  for (const Artifact& a : r.artifacts) {
    if (a.name == name) return a;
  }
  throw std::runtime_error("missing artifact " + name);
}

std::string ReadFile(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

TEST(FitRate, RecoversExactExponential) {
  std::vector<std::int64_t> t;
  std::vector<double> d;
  for (int k = 0; k <= 100; ++k) {
    t.push_back(k);
    d.push_back(3.0 * std::pow(0.9, k));
  }
  const RateFit fit = FitRate(t, d, 0.1);
  EXPECT_TRUE(fit.valid);
  EXPECT_EQ(fit.t_start, 10);
  EXPECT_EQ(fit.t_end, 100);
  EXPECT_EQ(fit.points, 91);
  EXPECT_NEAR(fit.factor, 0.9, 1e-12);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
}

TEST(FitRate, StopsAtFirstUnusableSample) {
  std::vector<std::int64_t> t = {0, 1, 2, 3, 4, 5};
  std::vector<double> d = {1, 2, 4, 8, INFINITY, 32};
  const RateFit fit = FitRate(t, d, 0.0);
  EXPECT_EQ(fit.t_end, 3);
  EXPECT_NEAR(fit.factor, 2.0, 1e-12);
  EXPECT_FALSE(FitRate({0}, {1.0}, 0.0).valid);
  EXPECT_FALSE(FitRate({0, 1}, {0.0, 1.0}, 0.0).valid);
  EXPECT_THROW(FitRate({0, 1}, {1.0}, 0.0), DimensionError);
}

TEST(ExperimentConfig, ParsesOverridesOnTopOfDefaults) {
  const ExperimentConfig c = ParseExperimentConfig(json::parse(R"({
    "experiment": "fig2",
    "game": {"players": 4, "dim": 3},
    "eta": {"oga": 0.02},
    "rule": "oga",
    "seed": 11
  })"));
  EXPECT_EQ(c.experiment, ExperimentKind::kFig2Quadratic);
  EXPECT_EQ(c.game.dims, std::vector<int>({3, 3, 3, 3}));
  EXPECT_EQ(c.game.family, PayoffKind::kQuadraticSC);
  EXPECT_DOUBLE_EQ(c.eta_oga, 0.02);
  EXPECT_DOUBLE_EQ(c.eta_ga, 0.005);
  EXPECT_EQ(c.rules, std::vector<UpdateRule>({UpdateRule::kOGA}));
  EXPECT_EQ(c.seed, 11u);
}

TEST(ExperimentConfig, LoneDimKeepsDefaultPlayerCount) {
  const ExperimentConfig c = ParseExperimentConfig(
      json::parse(R"({"experiment": "fig3", "game": {"dim": 4}})"));
  EXPECT_EQ(c.game.dims, std::vector<int>({4, 4, 4}));
}

TEST(ExperimentConfig, RejectsMalformedInput) {
  const char* bad[] = {
      R"([1, 2])",
      R"({"experiment": "fig9"})",
      R"({"horizon": "long"})",
      R"({"unknown_key": 1})",
      R"({"eta": -0.1})",
      R"({"eta": "fast"})",
      R"({"rules": []})",
      R"({"rule": "gda"})",
      R"({"experiment": "fig3", "player_range": [10, 3]})",
      R"({"experiment": "lipschitz", "horizons": []})",
      R"({"experiment": "lipschitz", "epsilon": 0.5})",
      R"({"trials": 0})",
      R"({"game": {"family": "cubic"}})",
      R"({"game": 3})",
      R"({"threshold": 0})",
  };
  for (const char* text : bad) {
    EXPECT_THROW(ParseExperimentConfig(json::parse(text)), ConfigError) << text;
  }
}

TEST(ExperimentConfig, HashTracksContent) {
  ExperimentConfig a = DefaultConfig(ExperimentKind::kFig1Linear);
  ExperimentConfig b = a;
  EXPECT_EQ(ConfigHash(a), ConfigHash(b));
  EXPECT_EQ(ConfigHash(a).size(), 16u);
  b.seed = 1;
  EXPECT_NE(ConfigHash(a), ConfigHash(b));
  // Round trip through JSON keeps the hash.
  EXPECT_EQ(ConfigHash(ParseExperimentConfig(ToJson(a))), ConfigHash(a));
}

TEST(ExperimentConfig, SeedsDeriveFromRootUnlessPinned) {
  ExperimentConfig a = DefaultConfig(ExperimentKind::kFig2Quadratic);
  const Seeds s0 = DeriveSeeds(a);
  a.seed = 5;
  const Seeds s5 = DeriveSeeds(a);
  EXPECT_NE(s0.game, s5.game);
  EXPECT_NE(s0.init, s5.init);
  a.game.seed = 77;
  EXPECT_EQ(DeriveSeeds(a).game, 77u);
  EXPECT_EQ(DeriveSeeds(a).init, s5.init);
}

TEST(Validate, DefaultGamesPass) {
  for (ExperimentKind kind : {ExperimentKind::kFig1Linear, ExperimentKind::kFig2Quadratic,
                              ExperimentKind::kLipschitz}) {
    const ExperimentResult r = RunValidate(DefaultConfig(kind).game, 0);
    EXPECT_TRUE(r.passed()) << ExperimentKindName(kind);
    EXPECT_TRUE(CheckPassed(r, "zero_sum"));
    EXPECT_TRUE(CheckPassed(r, "hessian_antisymmetry"));
    EXPECT_TRUE(CheckPassed(r, "payoff_sum_identity"));
    EXPECT_TRUE(CheckPassed(r, "gradient_consistency"));
  }
}

TEST(Validate, QuadraticGameReportsStrongConcavity) {
  const ExperimentResult r =
      RunValidate(CompleteGameSpec(PayoffKind::kQuadraticSC, 4, 3, 9), 0);
  EXPECT_TRUE(CheckPassed(r, "strong_concavity"));
  EXPECT_TRUE(CheckPassed(r, "smoothness"));
  EXPECT_DOUBLE_EQ(r.summary["report"]["moduli"]["alpha"].get<double>(), 3.0);
}

TEST(Validate, CorruptedGameFailsZeroSum) {
  const GameSpec spec = ParseGameSpec(json::parse(R"({
    "family": "bilinear",
    "dims": [2, 2, 2],
    "edges": [{"pair": [0, 1], "reverse_scale": 1.5}, {"pair": [1, 2]}],
    "matrices": {"seed": 4}
  })"));
  const ExperimentResult r = RunValidate(spec, 0);
  EXPECT_FALSE(r.passed());
  EXPECT_FALSE(CheckPassed(r, "zero_sum"));
  EXPECT_FALSE(CheckPassed(r, "hessian_antisymmetry"));
}

TEST(Fig1, ZeroStepIsStationary) {
  ExperimentConfig c = DefaultConfig(ExperimentKind::kFig1Linear);
  c.eta_ga = c.eta_oga = 0.0;
  c.horizon = 100;
  const ExperimentResult r = RunFig1(c);
  EXPECT_TRUE(CheckPassed(r, "ga_stationary_at_zero_step"));
  EXPECT_TRUE(CheckPassed(r, "oga_stationary_at_zero_step"));
}

TEST(Fig1, DefaultRunReproducesDivergenceAndTheoremRate) {
  const ExperimentResult r = RunFig1(DefaultConfig(ExperimentKind::kFig1Linear));
  EXPECT_TRUE(CheckPassed(r, "ga_step_growth_at_least_divergence_factor"));
  EXPECT_TRUE(CheckPassed(r, "ga_last_iterate_divergent"));
  EXPECT_TRUE(CheckPassed(r, "oga_last_iterate_convergent"));
  EXPECT_TRUE(CheckPassed(r, "oga_theorem_step_ratio_within_bound"));
  EXPECT_TRUE(r.summary["runs"]["ga"]["average_iterate_converges"].get<bool>());
}

// The GA divergence at the default horizon grows by only a few e-folds, so a
// log-linear fit of the whole post-transient window is not yet straight.
// Kept at the published threshold; see the README for measured values.
TEST(Fig1, DefaultGaLogLinearFitMeetsRSquaredThreshold) {
  const ExperimentResult r = RunFig1(DefaultConfig(ExperimentKind::kFig1Linear));
  const CheckResult* c = FindCheck(r, "ga_fit_factor_at_least_divergence_factor");
  ASSERT_NE(c, nullptr);
  EXPECT_TRUE(c->passed) << c->detail;
}

TEST(Fig1, LongHorizonGaFitIsLogLinear) {
  ExperimentConfig c = DefaultConfig(ExperimentKind::kFig1Linear);
  c.horizon = 50000;
  c.rules = {UpdateRule::kGA};
  c.csv_stride = 100;
  const ExperimentResult r = RunFig1(c);
  const CheckResult* check = FindCheck(r, "ga_fit_factor_at_least_divergence_factor");
  ASSERT_NE(check, nullptr);
  EXPECT_TRUE(check->passed) << check->detail;
}

TEST(Fig1, RejectsWrongFamily) {
  ExperimentConfig c = DefaultConfig(ExperimentKind::kFig1Linear);
  c.game.family = PayoffKind::kQuadraticSC;
  EXPECT_THROW(RunFig1(c), ConfigError);
}

TEST(Fig2, DefaultRunPassesAllChecks) {
  const ExperimentResult r = RunFig2(DefaultConfig(ExperimentKind::kFig2Quadratic));
  for (const CheckResult& c : r.checks) EXPECT_TRUE(c.passed) << c.name << " " << c.detail;
  EXPECT_FALSE(r.checks.empty());
}

TEST(Fig3, SmallScalingRunIsSeedDependent) {
  ExperimentConfig c = DefaultConfig(ExperimentKind::kFig3Scaling);
  c.player_range = {3, 4};
  c.trials = 1;
  c.eta_ga = c.eta_oga = 0.01;
  c.t_max = 100000;
  const ExperimentResult a = RunFig3(c);
  c.seed = 1;
  const ExperimentResult b = RunFig3(c);
  EXPECT_NE(FindArtifact(a, "fig3_trials.csv").content,
            FindArtifact(b, "fig3_trials.csv").content);
  const json rows = a.summary["iterations"]["ga"];
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_GT(rows[0]["mean_iterations"].get<double>(), 0.0);
  EXPECT_EQ(rows[0]["censored_trials"].get<int>(), 0);
}

TEST(Fig3, CensoredTrialsEnterAtTMax) {
  ExperimentConfig c = DefaultConfig(ExperimentKind::kFig3Scaling);
  c.player_range = {3};
  c.trials = 2;
  c.t_max = 10;
  const ExperimentResult r = RunFig3(c);
  const json row = r.summary["iterations"]["ga"][0];
  EXPECT_EQ(row["censored_trials"].get<int>(), 2);
  EXPECT_DOUBLE_EQ(row["mean_iterations"].get<double>(), 10.0);
  EXPECT_DOUBLE_EQ(row["std_iterations"].get<double>(), 0.0);
}

TEST(Lipschitz, SingleRungWithinBound) {
  ExperimentConfig c = DefaultConfig(ExperimentKind::kLipschitz);
  c.horizons = {1000, 10000};
  c.exploratory_epsilon.reset();
  const ExperimentResult r = RunLipschitz(c);
  for (const CheckResult& check : r.checks) EXPECT_TRUE(check.passed) << check.name;
  const json ladder = r.summary["ladder"]["ga"];
  EXPECT_NEAR(ladder[1]["eta"].get<double>(), 1e-3, 1e-15);
  EXPECT_TRUE(ladder[1]["inside_clip_ball"].get<bool>());
}

TEST(Selfplay, ShortRunLedgerShape) {
  ExperimentConfig c = DefaultConfig(ExperimentKind::kSelfplay);
  c.horizon = 1000;
  c.checkpoints = {10, 100, 1000};
  const ExperimentResult r = RunSelfplay(c);
  EXPECT_TRUE(CheckPassed(r, "average_regret_decreases"));
  const std::string& csv = FindArtifact(r, "selfplay_ledger.csv").content;
  EXPECT_NE(csv.find("t,avg_regret_1,avg_regret_2,avg_regret_3,exploitability"),
            std::string::npos);
}

TEST(Artifacts, CsvHeadersCarryProvenance) {
  ExperimentConfig c = DefaultConfig(ExperimentKind::kFig2Quadratic);
  c.horizon = 200;
  const ExperimentResult r = RunFig2(c);
  const std::string& csv = FindArtifact(r, "fig2_ga.csv").content;
  EXPECT_EQ(csv.rfind("# nzsg " + std::string(kVersion), 0), 0u);
  EXPECT_NE(csv.find("config_hash=" + ConfigHash(c)), std::string::npos);
  EXPECT_NE(csv.find("seed=0 game_seed=" + std::to_string(DeriveSeeds(c).game)),
            std::string::npos);
  EXPECT_NE(csv.find("t,dist_sq_total,dist_sq_player_1"), std::string::npos);
}

TEST(Artifacts, RepeatedRunsAreByteIdentical) {
  ExperimentConfig c = DefaultConfig(ExperimentKind::kFig1Linear);
  c.horizon = 500;
  const auto dir = std::filesystem::temp_directory_path() / "nzsg_experiments_test";
  std::filesystem::remove_all(dir);
  WriteArtifacts(RunFig1(c), dir / "a");
  WriteArtifacts(RunFig1(c), dir / "b");
  int files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir / "a")) {
    const auto other = dir / "b" / entry.path().filename();
    ASSERT_TRUE(std::filesystem::exists(other));
    EXPECT_EQ(ReadFile(entry.path()), ReadFile(other)) << entry.path();
    ++files;
  }
  EXPECT_GE(files, 6);
  std::filesystem::remove_all(dir);
}

TEST(Simulate, PowerLawScheduleWhenEpsilonIsSet) {
  ExperimentConfig c = DefaultConfig(ExperimentKind::kCustom);
  c.game = CompleteGameSpec(PayoffKind::kQuadraticSC, 3, 2, 1);
  c.epsilon = 0.25;
  c.horizon = 10000;
  const ExperimentResult r = RunSimulate(c);
  EXPECT_EQ(r.summary["runs"]["ga"]["schedule"].get<std::string>(),
            "power-law(T=10000,eps=0.25)");
}

TEST(Spectral, ReportsPredictionsForLinearGame) {
  const ExperimentResult r = RunSpectral(DefaultConfig(ExperimentKind::kCustom));
  EXPECT_TRUE(CheckPassed(r, "offdiagonal_antisymmetry"));
  EXPECT_GT(r.summary["omega"].get<double>(), 0.0);
  EXPECT_TRUE(r.summary["predictions"].contains("oga-linear"));
  EXPECT_TRUE(r.summary["predictions"]["ga-smooth-strongly-concave"].contains("unavailable"));
}

}  // namespace
}  // namespace nzsg
