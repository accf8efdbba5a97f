// nzsg command-line front end.
//
// Exit codes: 0 success, 1 a check failed (or a solver gave up), 2 the
// configuration could not be used.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "nzsg/errors.h"
#include "nzsg/experiments.h"
#include "nzsg/io.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::optional<double> eta;
  std::optional<std::int64_t> horizon;
  std::optional<std::string> rule;
  std::optional<int> trials;
};

nlohmann::json LoadJson(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw nzsg::ConfigError("cannot open config file: " + path);
  try {
    return nlohmann::json::parse(f, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw nzsg::ConfigError(path + ": " + e.what());
  }
}

// A bare game spec (top-level "family") is wrapped into the experiment's
// config as its "game" block.
nlohmann::json AsExperimentJson(nlohmann::json j, nzsg::ExperimentKind kind) {
  if (j.is_object() && j.contains("family") && !j.contains("game")) {
    j = nlohmann::json{{"game", j}};
  }
  if (!j.is_object()) throw nzsg::ConfigError("config must be a JSON object");
  const std::string name(nzsg::ExperimentKindName(kind));
  if (j.contains("experiment")) {
    if (nzsg::ParseExperimentKind(j["experiment"].get<std::string>()) != kind) {
      throw nzsg::ConfigError("config is for experiment '" +
                              j["experiment"].get<std::string>() +
                              "', not '" + name + "'");
    }
  }
  j["experiment"] = name;
  return j;
}

nzsg::ExperimentConfig BuildConfig(const Flags& flags, nzsg::ExperimentKind kind) {
  nlohmann::json j = flags.config_path.empty() ? nlohmann::json::object()
                                               : LoadJson(flags.config_path);
  nzsg::ExperimentConfig c = nzsg::ParseExperimentConfig(AsExperimentJson(j, kind));
  if (flags.seed) c.seed = *flags.seed;
  if (flags.eta) c.eta_ga = c.eta_oga = *flags.eta;
  if (flags.rule) c.rules = {nzsg::ParseUpdateRule(*flags.rule)};
  if (flags.trials) c.trials = *flags.trials;
  if (flags.horizon) {
    if (kind == nzsg::ExperimentKind::kFig3Scaling) {
      c.t_max = *flags.horizon;
    } else if (kind == nzsg::ExperimentKind::kLipschitz) {
      c.horizons = {*flags.horizon};
    } else {
      c.horizon = *flags.horizon;
    }
  }
  c.Validate();
  return c;
}

int Report(const nzsg::ExperimentResult& result, const std::string& out_dir) {
  const std::filesystem::path dir =
      out_dir.empty() ? std::filesystem::path("results") / result.name
                      : std::filesystem::path(out_dir);
  nzsg::WriteArtifacts(result, dir);
  for (const nzsg::CheckResult& c : result.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
    std::cout << '\n';
  }
  std::cout << result.name << ": " << (result.passed() ? "ok" : "check failed")
            << ", artifacts in " << dir.string() << '\n';
  return result.passed() ? kExitOk : kExitCheckFailed;
}

void AddCommonFlags(CLI::App* cmd, Flags& flags, bool dynamics) {
  cmd->add_option("--config", flags.config_path, "JSON config or game spec file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", flags.seed, "Experiment seed");
  cmd->add_option("--out", flags.out_dir, "Output directory");
  if (!dynamics) return;
  cmd->add_option("--eta", flags.eta, "Constant step size for every rule")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--horizon", flags.horizon,
                  "Number of steps (t_max for fig3, single ladder rung for "
                  "lipschitz)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--rule", flags.rule, "Update rule")
      ->check(CLI::IsMember({"ga", "oga", "oga-two-step"}));
  cmd->add_option("--trials", flags.trials, "Trials per player count (fig3)")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient dynamics on network zero-sum games"};
  app.set_version_flag("--version", std::string(nzsg::kVersion));
  app.require_subcommand(1);

  Flags flags;
  struct Command {
    const char* name;
    const char* help;
    nzsg::ExperimentKind kind;
  };
  const Command experiments[] = {
      {"simulate", "Run the configured rules on the configured game",
       nzsg::ExperimentKind::kCustom},
      {"spectral", "Hessian spectrum and rate predictions at the equilibrium",
       nzsg::ExperimentKind::kCustom},
      {"fig1", "Linear game: GA divergence and OGA convergence",
       nzsg::ExperimentKind::kFig1Linear},
      {"fig2", "Strongly concave quadratic game with bound-check runs",
       nzsg::ExperimentKind::kFig2Quadratic},
      {"fig3", "Iterations to threshold against the number of players",
       nzsg::ExperimentKind::kFig3Scaling},
      {"lipschitz", "Decaying-step ladder on the clipped game",
       nzsg::ExperimentKind::kLipschitz},
      {"selfplay", "Projected gradient self-play regret ledger",
       nzsg::ExperimentKind::kSelfplay},
  };

  CLI::App* validate = app.add_subcommand("validate", "Structural and modulus checks");
  AddCommonFlags(validate, flags, false);
  for (const Command& c : experiments) {
    AddCommonFlags(app.add_subcommand(c.name, c.help), flags, true);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (validate->parsed()) {
      nlohmann::json j = flags.config_path.empty() ? nlohmann::json::object()
                                                   : LoadJson(flags.config_path);
      nzsg::GameSpec spec;
      if (j.contains("family")) {
        spec = nzsg::ParseGameSpec(j);
      } else {
        const nzsg::ExperimentKind kind =
            j.contains("experiment")
                ? nzsg::ParseExperimentKind(j["experiment"].get<std::string>())
                : nzsg::ExperimentKind::kFig1Linear;
        nzsg::ExperimentConfig c = nzsg::ParseExperimentConfig(AsExperimentJson(j, kind));
        if (flags.seed) c.seed = *flags.seed;
        spec = c.game;
        spec.seed = nzsg::DeriveSeeds(c).game;
      }
      return Report(nzsg::RunValidate(spec, flags.seed.value_or(0)), flags.out_dir);
    }
    for (const Command& c : experiments) {
      CLI::App* cmd = app.get_subcommand(c.name);
      if (!cmd->parsed()) continue;
      const nzsg::ExperimentConfig config = BuildConfig(flags, c.kind);
      const std::string name = c.name;
      if (name == "simulate") return Report(nzsg::RunSimulate(config), flags.out_dir);
      if (name == "spectral") return Report(nzsg::RunSpectral(config), flags.out_dir);
      return Report(nzsg::RunExperiment(config), flags.out_dir);
    }
  } catch (const nzsg::SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n' << e.matrix_dump() << '\n';
    return kExitCheckFailed;
  } catch (const nzsg::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    // DimensionError, ConstructionError: the config describes an invalid game.
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::out_of_range& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  return kExitOk;
}
