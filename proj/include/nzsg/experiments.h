#ifndef NZSG_EXPERIMENTS_H_
#define NZSG_EXPERIMENTS_H_

// Experiment drivers behind the command-line tool. Every driver is a pure
// function of its config: it returns the summary and the file contents it
// would write, so determinism can be checked by comparing strings.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nzsg/dynamics.h"
#include "nzsg/game_spec.h"

namespace nzsg {

enum class ExperimentKind {
  kFig1Linear,
  kFig2Quadratic,
  kFig3Scaling,
  kLipschitz,
  kSelfplay,
  kCustom,
};

std::string_view ExperimentKindName(ExperimentKind kind);
// Accepts the names above ("fig1-linear", ...) plus the short forms "fig1",
// "fig2", "fig3". Throws ConfigError.
ExperimentKind ParseExperimentKind(std::string_view name);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::kCustom;
  GameSpec game;
  std::vector<UpdateRule> rules;
  double eta_ga = 0.01;
  double eta_oga = 0.01;
  // Power-law schedule T^{-(1/2 + epsilon)} instead of the constant steps.
  std::optional<double> epsilon;
  std::int64_t horizon = 1000;
  double threshold = 1e-5;
  int trials = 1;
  std::uint64_t seed = 0;
  std::vector<int> player_range;
  std::int64_t t_max = 1000000;
  std::vector<std::int64_t> horizons;
  std::optional<double> exploratory_epsilon;
  double init_low = -1.0;
  double init_high = 1.0;
  std::int64_t csv_stride = 1;
  double fit_skip_fraction = 0.1;
  // Self-play only.
  double set_radius = 1.0;
  std::vector<std::int64_t> checkpoints;

  void Validate() const;
};

// Defaults for the named experiment; kCustom gets a small bilinear game.
ExperimentConfig DefaultConfig(ExperimentKind kind);
// Unknown keys are rejected. Missing keys take the experiment's defaults.
ExperimentConfig ParseExperimentConfig(const nlohmann::json& j);
nlohmann::json ToJson(const ExperimentConfig& config);
// Hash of the canonical JSON form.
std::string ConfigHash(const ExperimentConfig& config);

struct Seeds {
  std::uint64_t game = 0;
  std::uint64_t init = 0;
};
// The game seed is the spec's own seed when given, otherwise derived from the
// experiment seed.
Seeds DeriveSeeds(const ExperimentConfig& config);

// Least-squares fit of log(dist^2) against t. The first skip_fraction of the
// iterations is discarded; only finite positive distances enter.
struct RateFit {
  std::int64_t t_start = 0;
  std::int64_t t_end = 0;
  int points = 0;
  double slope = 0.0;
  double factor = 1.0;  // exp(slope), the per-step factor on dist^2
  double r_squared = 0.0;
  std::optional<double> bound_factor;
  bool valid = false;
};

RateFit FitRate(const std::vector<std::int64_t>& t,
                const std::vector<double>& dist_sq, double skip_fraction);
RateFit FitRate(const Trajectory& traj, double skip_fraction);

struct Artifact {
  std::string name;
  std::string content;
};

struct CheckResult {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct ExperimentResult {
  std::string name;
  nlohmann::json summary;
  std::vector<Artifact> artifacts;
  std::vector<CheckResult> checks;

  bool passed() const;
  void AddCheck(std::string check_name, bool ok, std::string detail = "");
};

// Writes every artifact plus "<name>_summary.json" into out_dir.
void WriteArtifacts(const ExperimentResult& result,
                    const std::filesystem::path& out_dir);

ExperimentResult RunFig1(const ExperimentConfig& config);
ExperimentResult RunFig2(const ExperimentConfig& config);
ExperimentResult RunFig3(const ExperimentConfig& config);
ExperimentResult RunLipschitz(const ExperimentConfig& config);
ExperimentResult RunSelfplay(const ExperimentConfig& config);
// Single trajectory per configured rule on the configured game.
ExperimentResult RunSimulate(const ExperimentConfig& config);
// Spectrum at the Nash point and every rate prediction whose constants are
// available.
ExperimentResult RunSpectral(const ExperimentConfig& config);
// Zero-sum, antisymmetry, payoff-sum identity, gradient and modulus checks.
ExperimentResult RunValidate(const GameSpec& spec, std::uint64_t seed = 0);

// Dispatch on config.experiment.
ExperimentResult RunExperiment(const ExperimentConfig& config);

}  // namespace nzsg

#endif  // NZSG_EXPERIMENTS_H_
