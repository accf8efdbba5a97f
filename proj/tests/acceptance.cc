// Acceptance suite. Each criterion prints one PASS or FAIL line; the process
// exit code is 0 only if every selected criterion passed.
//
//   acceptance                  run all criteria
//   acceptance --criterion 4    run one

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "nzsg/dynamics.h"
#include "nzsg/errors.h"
#include "nzsg/experiments.h"
#include "nzsg/game.h"
#include "nzsg/io.h"
#include "nzsg/rng.h"
#include "nzsg/spectral.h"

namespace {

using namespace nzsg;
using nlohmann::json;

struct Outcome {
  bool passed = true;
  std::string detail;

  void Require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      if (!detail.empty()) detail += "; ";
      detail += "failed: " + what;
    }
  }
  void Note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string Num(double v) { return FormatDouble(v); }

const CheckResult* FindCheck(const ExperimentResult& r, const std::string& name) {
  for (const CheckResult& c : r.checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

bool Passed(const ExperimentResult& r, const std::string& name) {
  const CheckResult* c = FindCheck(r, name);
  return c != nullptr && c->passed;
}

GameGraph SampledGame(PayoffKind family, std::uint64_t seed) {
  Rng rng = Rng(seed).Split("acceptance-shape");
  const int n = 2 + static_cast<int>(rng.NextU64() % 4);  // 2..5
  std::vector<int> dims(n);
  for (int& d : dims) d = 1 + static_cast<int>(rng.NextU64() % 10);  // 1..10
  switch (family) {
    case PayoffKind::kBilinear:
      return MakeLinearGame(n, dims, seed);
    case PayoffKind::kQuadraticSC:
      return MakeQuadraticScGame(n, dims, seed);
    case PayoffKind::kLipschitzSC:
      return MakeLipschitzScGame(n, dims, seed, 1.0);
  }
  return MakeLinearGame(n, dims, seed);
}

// 1. Structural identities on 20 games per family at 1000 points each.
Outcome Criterion1() {
  Outcome out;
  double worst_zero_sum = 0.0, worst_identity = 0.0, worst_anti = 0.0;
  for (PayoffKind family :
       {PayoffKind::kBilinear, PayoffKind::kQuadraticSC, PayoffKind::kLipschitzSC}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const GameGraph g = SampledGame(family, seed);
      const std::string tag =
          std::string(PayoffKindName(family)) + " seed " + std::to_string(seed);
      const ZeroSumReport zs = CheckZeroSum(g, 1000, seed, 3.0, 1e-9);
      worst_zero_sum = std::max(worst_zero_sum, zs.max_relative);
      out.Require(zs.passed, "zero-sum " + tag);

      Rng rng = Rng(seed).Split("acceptance-points");
      bool identity_ok = true, anti_ok = true;
      for (int k = 0; k < 1000; ++k) {
        const StrategyProfile x = RandomProfile(g, rng.NextU64(), -3.0, 3.0);
        const StrategyProfile xs = RandomProfile(g, rng.NextU64(), -3.0, 3.0);
        const PayoffSumIdentityReport id = CheckPayoffSumIdentity(g, x, xs, 1e-9);
        worst_identity = std::max(worst_identity, id.gap / id.scale);
        identity_ok = identity_ok && id.passed;
        const AntisymmetryReport a =
            CheckHessianAntisymmetry(g, AssembleHessian(g, x), 1e-9);
        worst_anti = std::max(worst_anti, a.max_abs / std::max(a.scale, 1e-300));
        anti_ok = anti_ok && a.passed;
      }
      out.Require(identity_ok, "payoff-sum identity " + tag);
      out.Require(anti_ok, "antisymmetry " + tag);
    }
  }
  out.Note("max relative: zero-sum " + Num(worst_zero_sum) + ", identity " +
           Num(worst_identity) + ", antisymmetry " + Num(worst_anti));
  return out;
}

// 2. GA divergence factor on the linear experiment and the exact 2-player rate.
Outcome Criterion2() {
  Outcome out;
  ExperimentConfig c = DefaultConfig(ExperimentKind::kFig1Linear);
  c.rules = {UpdateRule::kGA};
  const ExperimentResult r = RunFig1(c);
  const json& s = r.summary["runs"]["ga"];
  const double factor = s["divergence_factor"].get<double>();
  const double min_ratio = s["min_step_ratio"].get<double>();
  out.Require(Passed(r, "ga_step_growth_at_least_divergence_factor"),
              "per-step growth >= 1 + eta^2 omega^2 - 1e-10");
  out.Note("eta 0.003, min ratio " + Num(min_ratio) + " vs factor " + Num(factor));

  const GameGraph g = MakeGameFromCouplings(
      PayoffKind::kBilinear, {1, 1},
      {{0, 1, EdgePayoff::Bilinear(MatrixXd::Constant(1, 1, 1.0))}});
  const double eta = 0.003;
  DynamicsConfig d;
  d.rule = UpdateRule::kGA;
  d.schedule = StepSchedule::Constant(eta);
  d.horizon = 5000;
  StrategyProfile x0 = g.ZeroProfile();
  x0.data() << 0.6, -0.8;
  const Trajectory t = Run(g, d, x0, NashSet(g.ZeroProfile()));
  double worst = 0.0;
  for (std::size_t k = 1; k < t.rows.size(); ++k) {
    const double ratio = t.rows[k].dist_sq_total / t.rows[k - 1].dist_sq_total;
    worst = std::max(worst, std::abs(ratio - (1 + eta * eta)));
  }
  out.Require(worst <= 4 * std::numeric_limits<double>::epsilon(),
              "2-player growth equals 1 + eta^2");
  out.Note("2-player max |ratio - (1 + eta^2)| " + Num(worst));
  return out;
}

// 3. OGA at eta = 1/(2 rho): post-transient per-step ratio within 5% of the
// theorem's factor, and the 2-player asymptotic ratio 1/2.
Outcome Criterion3() {
  Outcome out;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ExperimentConfig c = DefaultConfig(ExperimentKind::kFig1Linear);
    c.rules = {UpdateRule::kOGA};
    c.seed = seed;
    const ExperimentResult r = RunFig1(c);
    const json& run = r.summary["oga_theorem_run"];
    out.Require(Passed(r, "oga_theorem_step_ratio_within_bound"),
                "seed " + std::to_string(seed));
    if (seed == 0) {
      out.Note("seed 0: max ratio " + Num(run["max_post_transient_ratio"].get<double>()) +
               " vs factor " + Num(run["per_step_bound"].get<double>()));
    }
  }
  const GameGraph g = MakeGameFromCouplings(
      PayoffKind::kBilinear, {1, 1},
      {{0, 1, EdgePayoff::Bilinear(MatrixXd::Constant(1, 1, 1.0))}});
  const double rho = Spectrum(AssembleHessian(g, g.ZeroProfile()), 1.0).rho;
  DynamicsConfig d;
  d.rule = UpdateRule::kOGA;
  d.schedule = StepSchedule::Constant(1.0 / (2.0 * rho));
  d.horizon = 600;
  StrategyProfile x0 = g.ZeroProfile();
  x0.data() << 1.0, 0.5;
  const Trajectory t = Run(g, d, x0, NashSet(g.ZeroProfile()));
  const double ratio = t.rows[600].dist_sq_total / t.rows[599].dist_sq_total;
  out.Require(std::abs(ratio - 0.5) <= 0.005, "2-player asymptotic ratio 1/2 within 1%");
  out.Note("2-player ratio at t=600 " + Num(ratio));
  return out;
}

// 4. OGA root map against the augmented Jacobian for random antisymmetric H.
Outcome Criterion4() {
  Outcome out;
  Rng rng(4);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + static_cast<int>(rng.NextU64() % 20);
    const MatrixXd a = rng.UniformMatrix(d, d, -1.0, 1.0);
    const GameHessian h{a - a.transpose(), StrategyProfile(std::vector<int>{d})};
    const double rho = Spectrum(h, 1.0).rho;
    const double eta = rho > 0.0 ? rng.Uniform(0.05, 0.45) / rho : 0.1;
    const double dist = MultisetDistance(OgaJacobianSpectrum(h, eta),
                                         Eigenvalues(AugmentedOgaJacobian(h, eta)));
    worst = std::max(worst, dist);
  }
  out.Require(worst <= 1e-8, "multiset distance <= 1e-8");
  out.Note("100 matrices, d <= 20, max distance " + Num(worst));
  return out;
}

// 5. Schur determinant identity on 100 blocked matrices.
Outcome Criterion5() {
  Outcome out;
  Rng rng(5);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int a = 1 + static_cast<int>(rng.NextU64() % 10);
    const int b = 1 + static_cast<int>(rng.NextU64() % 10);
    const MatrixXd m1 = rng.UniformMatrix(a, a, -1, 1);
    const MatrixXd m2 = rng.UniformMatrix(a, b, -1, 1);
    const MatrixXd m3 = rng.UniformMatrix(b, a, -1, 1);
    MatrixXd m4 = rng.UniformMatrix(b, b, -1, 1);
    m4.diagonal().array() += static_cast<double>(b);  // well conditioned
    worst = std::max(worst, SchurDeterminantCheck(m1, m2, m3, m4).gap);
  }
  out.Require(worst <= 1e-8, "relative gap <= 1e-8");
  out.Note("100 matrices, max relative gap " + Num(worst));
  return out;
}

// 6. Smooth strongly concave bounds at the prescribed steps.
Outcome Criterion6() {
  Outcome out;
  const ExperimentResult r = RunFig2(DefaultConfig(ExperimentKind::kFig2Quadratic));
  out.Require(Passed(r, "ga_bound_cumulative"), "GA bound at every iterate");
  out.Require(Passed(r, "oga_bound_cumulative"), "OGA bound at every iterate");
  out.Require(Passed(r, "ga_bound_reaches_threshold"), "GA reaches 1e-5");
  out.Require(Passed(r, "oga_bound_reaches_threshold"), "OGA reaches 1e-5");
  const json& ga = r.summary["ga_bound_run"];
  const json& oga = r.summary["oga_bound_run"];
  out.Note("GA eta " + Num(ga["eta"].get<double>()) + " reaches 1e-5 at t=" +
           ga["iterations_to_threshold"].dump() + ", OGA eta " +
           Num(oga["eta"].get<double>()) + " at t=" +
           oga["iterations_to_threshold"].dump());
  return out;
}

// 7. Lipschitz ladder.
Outcome Criterion7() {
  Outcome out;
  ExperimentConfig c = DefaultConfig(ExperimentKind::kLipschitz);
  c.exploratory_epsilon.reset();
  const ExperimentResult r = RunLipschitz(c);
  for (const char* rule : {"ga", "oga"}) {
    const std::string n(rule);
    out.Require(Passed(r, n + "_final_within_bound"), n + " final within bound");
    out.Require(Passed(r, n + "_final_decreasing_along_ladder"),
                n + " final decreasing along ladder");
    std::string finals;
    for (const json& row : r.summary["ladder"][n]) {
      finals += (finals.empty() ? "" : " ") + Num(row["final_dist_sq"].get<double>()) +
                "<=" + Num(row["bound"].get<double>());
    }
    out.Note(n + " " + finals);
  }
  return out;
}

// 8. Projected GA self-play.
Outcome Criterion8() {
  Outcome out;
  const ExperimentResult r = RunSelfplay(DefaultConfig(ExperimentKind::kSelfplay));
  out.Require(Passed(r, "exploitability_of_average_at_most_0.05"),
              "exploitability <= 0.05 at T=1e4");
  out.Require(Passed(r, "average_regret_decreases"),
              "average regret at T=1e4 below T=1e2");
  const json& cps = r.summary["checkpoints"];
  out.Note("exploitability " + Num(cps.back()["exploitability"].get<double>()) +
           ", avg regret T=1e2 " + cps.front()["average_regret"].dump() +
           " T=1e4 " + cps.back()["average_regret"].dump());
  return out;
}

// 9. Iterations to threshold against the number of players.
Outcome Criterion9() {
  Outcome out;
  const ExperimentResult r = RunFig3(DefaultConfig(ExperimentKind::kFig3Scaling));
  out.Require(Passed(r, "ga_iterations_strictly_increasing"),
              "GA mean iterations strictly increasing in n");
  out.Require(Passed(r, "oga_plateau_ratio_at_most_1.25"),
              "OGA ratio n=50 / n=25 <= 1.25");
  for (const char* rule : {"ga", "oga"}) {
    std::string means;
    for (const json& row : r.summary["iterations"][rule]) {
      means += (means.empty() ? "" : " ") + row["n"].dump() + ":" +
               Num(row["mean_iterations"].get<double>());
    }
    out.Note(std::string(rule) + " means " + means);
  }
  return out;
}

std::string ReadFile(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

// 10. Byte-identical output for repeated runs of every experiment.
Outcome Criterion10() {
  Outcome out;
  std::vector<ExperimentConfig> configs = {
      DefaultConfig(ExperimentKind::kFig1Linear),
      DefaultConfig(ExperimentKind::kFig2Quadratic),
      DefaultConfig(ExperimentKind::kFig3Scaling),
      DefaultConfig(ExperimentKind::kLipschitz),
      DefaultConfig(ExperimentKind::kSelfplay),
      DefaultConfig(ExperimentKind::kCustom),
  };
  // Desk-scale sizes for the long sweeps; the code paths are the same.
  configs[2].player_range = {3, 10};
  configs[2].trials = 4;
  configs[3].horizons = {1000, 10000};
  configs[4].horizon = 2000;
  configs[4].checkpoints = {100, 2000};

  const auto root = std::filesystem::temp_directory_path() / "nzsg_acceptance_10";
  std::filesystem::remove_all(root);
  int files = 0;
  for (std::size_t k = 0; k < configs.size(); ++k) {
    std::vector<std::filesystem::path> dirs;
    for (int rep = 0; rep < 2; ++rep) {
      const ExperimentResult r = RunExperiment(configs[k]);
      dirs.push_back(root / (r.name + "_" + std::to_string(rep)));
      WriteArtifacts(r, dirs.back());
    }
    for (const auto& entry : std::filesystem::directory_iterator(dirs[0])) {
      const auto other = dirs[1] / entry.path().filename();
      const bool same = std::filesystem::exists(other) &&
                        ReadFile(entry.path()) == ReadFile(other);
      out.Require(same, entry.path().filename().string() + " differs");
      ++files;
    }
  }
  std::filesystem::remove_all(root);
  out.Note(std::to_string(files) + " files compared across 6 experiments");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria = {
      Criterion1, Criterion2, Criterion3, Criterion4,  Criterion5,
      Criterion6, Criterion7, Criterion8, Criterion9, Criterion10};
  std::vector<int> selected;
  for (int k = 1; k < argc; ++k) {
    const std::string arg = argv[k];
    if (arg == "--criterion" && k + 1 < argc) {
      selected.push_back(std::atoi(argv[++k]));
    } else {
      std::cerr << "usage: acceptance [--criterion N]...\n";
      return 2;
    }
  }
  if (selected.empty()) {
    for (int k = 1; k <= static_cast<int>(criteria.size()); ++k) selected.push_back(k);
  }
  bool all = true;
  for (int k : selected) {
    if (k < 1 || k > static_cast<int>(criteria.size())) {
      std::cerr << "no criterion " << k << '\n';
      return 2;
    }
    Outcome o;
    try {
      o = criteria[k - 1]();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::cout << (o.passed ? "PASS" : "FAIL") << " criterion " << k << ": "
              << o.detail << std::endl;
    all = all && o.passed;
  }
  return all ? 0 : 1;
}
