#include "nzsg/experiments.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>
#include <utility>

#include "nzsg/errors.h"
#include "nzsg/io.h"
#include "nzsg/no_regret.h"
#include "nzsg/rng.h"
#include "nzsg/spectral.h"

namespace nzsg {

using nlohmann::json;

// --- Names -------------------------------------------------------------------

std::string_view ExperimentKindName(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kFig1Linear:
      return "fig1-linear";
    case ExperimentKind::kFig2Quadratic:
      return "fig2-quadratic";
    case ExperimentKind::kFig3Scaling:
      return "fig3-scaling";
    case ExperimentKind::kLipschitz:
      return "lipschitz";
    case ExperimentKind::kSelfplay:
      return "selfplay";
    case ExperimentKind::kCustom:
      return "custom";
  }
  return "custom";
}

ExperimentKind ParseExperimentKind(std::string_view name) {
  if (name == "fig1-linear" || name == "fig1") return ExperimentKind::kFig1Linear;
  if (name == "fig2-quadratic" || name == "fig2") return ExperimentKind::kFig2Quadratic;
  if (name == "fig3-scaling" || name == "fig3") return ExperimentKind::kFig3Scaling;
  if (name == "lipschitz") return ExperimentKind::kLipschitz;
  if (name == "selfplay") return ExperimentKind::kSelfplay;
  if (name == "custom") return ExperimentKind::kCustom;
  throw ConfigError("unknown experiment: " + std::string(name));
}

// --- Config --------------------------------------------------------------------

void ExperimentConfig::Validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
  if (rules.empty()) fail("at least one rule is required");
  if (!(eta_ga >= 0.0) || !(eta_oga >= 0.0) || !std::isfinite(eta_ga) ||
      !std::isfinite(eta_oga)) {
    fail("eta must be finite and >= 0");
  }
  if (epsilon && !(*epsilon > 0.0 && *epsilon < 0.5)) fail("epsilon must lie in (0, 0.5)");
  if (exploratory_epsilon &&
      !(*exploratory_epsilon > 0.0 && *exploratory_epsilon < 0.5)) {
    fail("exploratory_epsilon must lie in (0, 0.5)");
  }
  if (horizon < 0) fail("horizon must be >= 0");
  if (!(threshold > 0.0)) fail("threshold must be > 0");
  if (trials < 1) fail("trials must be >= 1");
  if (t_max < 1) fail("t_max must be >= 1");
  if (!(init_low <= init_high)) fail("initial.low must not exceed initial.high");
  if (csv_stride < 1) fail("csv_stride must be >= 1");
  if (!(fit_skip_fraction >= 0.0 && fit_skip_fraction < 1.0)) {
    fail("fit_skip_fraction must lie in [0, 1)");
  }
  if (!(set_radius > 0.0)) fail("set_radius must be > 0");
  if (game.dims.empty()) fail("game needs at least one player dimension");
  if (experiment == ExperimentKind::kFig3Scaling) {
    if (player_range.empty()) fail("player_range must be nonempty");
    for (std::size_t k = 0; k < player_range.size(); ++k) {
      if (player_range[k] < 2) fail("player_range entries must be >= 2");
      if (k > 0 && player_range[k] <= player_range[k - 1]) {
        fail("player_range must be strictly ascending");
      }
    }
  }
  if (experiment == ExperimentKind::kLipschitz) {
    if (horizons.empty()) fail("horizons must be nonempty");
    for (std::size_t k = 0; k < horizons.size(); ++k) {
      if (horizons[k] < 1) fail("horizons must be >= 1");
      if (k > 0 && horizons[k] <= horizons[k - 1]) {
        fail("horizons must be strictly ascending");
      }
    }
  }
}

ExperimentConfig DefaultConfig(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  c.rules = {UpdateRule::kGA, UpdateRule::kOGA};
  switch (kind) {
    case ExperimentKind::kFig1Linear:
      c.game = CompleteGameSpec(PayoffKind::kBilinear, 3, 10, 0);
      c.game.seed.reset();
      c.eta_ga = 0.003;
      c.eta_oga = 0.05;
      c.horizon = 5000;
      break;
    case ExperimentKind::kFig2Quadratic:
      c.game = CompleteGameSpec(PayoffKind::kQuadraticSC, 3, 10, 0);
      c.game.seed.reset();
      c.eta_ga = c.eta_oga = 0.005;
      c.horizon = 10000;
      break;
    case ExperimentKind::kFig3Scaling:
      c.game = CompleteGameSpec(PayoffKind::kQuadraticSC, 3, 10, 0);
      c.game.seed.reset();
      c.eta_ga = c.eta_oga = 0.001;
      c.trials = 10;
      c.player_range = {3, 10, 25, 50};
      c.t_max = 1000000;
      break;
    case ExperimentKind::kLipschitz:
      c.game = CompleteGameSpec(PayoffKind::kLipschitzSC, 3, 10, 0);
      c.game.seed.reset();
      c.game.clip_radius = 10.0;
      c.epsilon = 0.25;
      c.horizons = {1000, 10000, 100000};
      c.exploratory_epsilon = 0.49;
      break;
    case ExperimentKind::kSelfplay:
      c.game = CompleteGameSpec(PayoffKind::kBilinear, 3, 5, 0);
      c.game.seed.reset();
      c.rules = {UpdateRule::kGA};
      c.horizon = 10000;
      c.checkpoints = {100, 1000, 10000};
      break;
    case ExperimentKind::kCustom:
      c.game = CompleteGameSpec(PayoffKind::kBilinear, 3, 10, 0);
      c.game.seed.reset();
      c.rules = {UpdateRule::kGA};
      c.eta_ga = c.eta_oga = 0.01;
      c.horizon = 1000;
      break;
  }
  return c;
}

namespace {

template <typename T>
T GetAs(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config: bad value for '" + key + "': " + e.what());
  }
}

json OptionalJson(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

ExperimentConfig ParseExperimentConfig(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  const ExperimentKind kind =
      j.contains("experiment")
          ? ParseExperimentKind(GetAs<std::string>(j.at("experiment"), "experiment"))
          : ExperimentKind::kCustom;
  ExperimentConfig c = DefaultConfig(kind);

  for (const auto& [key, value] : j.items()) {
    if (key == "experiment") {
      continue;
    } else if (key == "game") {
      if (!value.is_object()) throw ConfigError("config: 'game' must be an object");
      json base = ToJson(c.game);
      if ((value.contains("players") || value.contains("dim")) &&
          !value.contains("dims")) {
        // A lone "dim" keeps the default player count.
        if (!value.contains("players") && base.contains("dims")) {
          base["players"] = base["dims"].size();
        }
        base.erase("dims");
      }
      base.merge_patch(value);
      c.game = ParseGameSpec(base);
    } else if (key == "rules" || key == "rule") {
      c.rules.clear();
      if (value.is_string()) {
        c.rules.push_back(ParseUpdateRule(value.get<std::string>()));
      } else {
        for (const std::string& r : GetAs<std::vector<std::string>>(value, key)) {
          c.rules.push_back(ParseUpdateRule(r));
        }
      }
    } else if (key == "eta") {
      if (value.is_number()) {
        c.eta_ga = c.eta_oga = value.get<double>();
      } else if (value.is_object()) {
        for (const auto& [rule, eta] : value.items()) {
          const double v = GetAs<double>(eta, "eta." + rule);
          if (ParseUpdateRule(rule) == UpdateRule::kGA) {
            c.eta_ga = v;
          } else {
            c.eta_oga = v;
          }
        }
      } else {
        throw ConfigError("config: 'eta' must be a number or {rule: eta}");
      }
    } else if (key == "epsilon") {
      c.epsilon = value.is_null() ? std::nullopt
                                  : std::optional<double>(GetAs<double>(value, key));
    } else if (key == "exploratory_epsilon") {
      c.exploratory_epsilon =
          value.is_null() ? std::nullopt
                          : std::optional<double>(GetAs<double>(value, key));
    } else if (key == "horizon") {
      c.horizon = GetAs<std::int64_t>(value, key);
    } else if (key == "threshold") {
      c.threshold = GetAs<double>(value, key);
    } else if (key == "trials") {
      c.trials = GetAs<int>(value, key);
    } else if (key == "seed") {
      c.seed = GetAs<std::uint64_t>(value, key);
    } else if (key == "player_range") {
      c.player_range = GetAs<std::vector<int>>(value, key);
    } else if (key == "t_max") {
      c.t_max = GetAs<std::int64_t>(value, key);
    } else if (key == "horizons") {
      c.horizons = GetAs<std::vector<std::int64_t>>(value, key);
    } else if (key == "initial") {
      if (value.contains("low")) c.init_low = GetAs<double>(value.at("low"), "initial.low");
      if (value.contains("high")) {
        c.init_high = GetAs<double>(value.at("high"), "initial.high");
      }
    } else if (key == "csv_stride") {
      c.csv_stride = GetAs<std::int64_t>(value, key);
    } else if (key == "fit_skip_fraction") {
      c.fit_skip_fraction = GetAs<double>(value, key);
    } else if (key == "set_radius") {
      c.set_radius = GetAs<double>(value, key);
    } else if (key == "checkpoints") {
      c.checkpoints = GetAs<std::vector<std::int64_t>>(value, key);
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  c.Validate();
  return c;
}

json ToJson(const ExperimentConfig& c) {
  json j;
  j["experiment"] = std::string(ExperimentKindName(c.experiment));
  j["game"] = ToJson(c.game);
  json rules = json::array();
  for (UpdateRule r : c.rules) rules.push_back(std::string(UpdateRuleName(r)));
  j["rules"] = rules;
  j["eta"] = {{"ga", c.eta_ga}, {"oga", c.eta_oga}};
  j["epsilon"] = OptionalJson(c.epsilon);
  j["horizon"] = c.horizon;
  j["threshold"] = c.threshold;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["player_range"] = c.player_range;
  j["t_max"] = c.t_max;
  j["horizons"] = c.horizons;
  j["exploratory_epsilon"] = OptionalJson(c.exploratory_epsilon);
  j["initial"] = {{"low", c.init_low}, {"high", c.init_high}};
  j["csv_stride"] = c.csv_stride;
  j["fit_skip_fraction"] = c.fit_skip_fraction;
  j["set_radius"] = c.set_radius;
  j["checkpoints"] = c.checkpoints;
  return j;
}

std::string ConfigHash(const ExperimentConfig& config) {
  return HexHash(ToJson(config).dump());
}

Seeds DeriveSeeds(const ExperimentConfig& config) {
  const Rng root(config.seed);
  Seeds s;
  s.game = config.game.seed ? *config.game.seed : root.Split("game").NextU64();
  s.init = root.Split("init").NextU64();
  return s;
}

// --- Rate fits -------------------------------------------------------------------

RateFit FitRate(const std::vector<std::int64_t>& t,
                const std::vector<double>& dist_sq, double skip_fraction) {
  RateFit fit;
  if (t.size() != dist_sq.size()) {
    throw DimensionError("FitRate: t and dist_sq differ in length");
  }
  auto usable = [&](std::size_t k) {
    return std::isfinite(dist_sq[k]) && dist_sq[k] > 0.0;
  };
  // The window ends at the last usable sample before the first unusable one,
  // so a diverging series is cut where it stops being finite.
  std::size_t last = 0;
  bool any = false;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!usable(k)) break;
    last = k;
    any = true;
  }
  if (!any) return fit;
  fit.t_end = t[last];
  fit.t_start = static_cast<std::int64_t>(
      std::ceil(t.front() + skip_fraction * static_cast<double>(fit.t_end - t.front())));

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t k = 0; k <= last; ++k) {
    if (t[k] < fit.t_start) continue;
    const double x = static_cast<double>(t[k]);
    const double y = std::log(dist_sq[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  fit.points = m;
  if (m < 2) return fit;
  const double mx = sx / m;
  const double my = sy / m;
  double cxx = 0, cxy = 0, cyy = 0;
  for (std::size_t k = 0; k <= last; ++k) {
    if (t[k] < fit.t_start) continue;
    const double dx = static_cast<double>(t[k]) - mx;
    const double dy = std::log(dist_sq[k]) - my;
    cxx += dx * dx;
    cxy += dx * dy;
    cyy += dy * dy;
  }
  if (!(cxx > 0.0)) return fit;
  fit.slope = cxy / cxx;
  fit.factor = std::exp(fit.slope);
  const double ss_res = std::max(0.0, cyy - fit.slope * cxy);
  fit.r_squared = cyy > 0.0 ? 1.0 - ss_res / cyy : 1.0;
  fit.valid = true;
  return fit;
}

RateFit FitRate(const Trajectory& traj, double skip_fraction) {
  std::vector<std::int64_t> t;
  std::vector<double> d;
  for (const TrajectoryRow& row : traj.rows) {
    if (row.overflow) break;
    t.push_back(row.t);
    d.push_back(row.dist_sq_total);
  }
  return FitRate(t, d, skip_fraction);
}

// --- Results ---------------------------------------------------------------------

bool ExperimentResult::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed; });
}

void ExperimentResult::AddCheck(std::string check_name, bool ok,
                                std::string detail) {
  checks.push_back({std::move(check_name), ok, std::move(detail)});
}

void WriteArtifacts(const ExperimentResult& result,
                    const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream f(out_dir / name, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + (out_dir / name).string());
    f << content;
  };
  for (const Artifact& a : result.artifacts) write(a.name, a.content);
  json summary = result.summary;
  json checks = json::array();
  for (const CheckResult& c : result.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  summary["checks"] = checks;
  summary["passed"] = result.passed();
  write(result.name + "_summary.json", summary.dump(2) + "\n");
}

namespace {

struct Context {
  const ExperimentConfig* config;
  Seeds seeds;
  std::string hash;
  bool per_trial_seeds = false;

  json Provenance() const {
    return {{"version", std::string(kVersion)},
            {"config_hash", hash},
            {"seed", config->seed},
            {"game_seed", seeds.game},
            {"init_seed", seeds.init},
            {"experiment", std::string(ExperimentKindName(config->experiment))}};
  }

  HeaderComments Comments(std::vector<std::string> extra = {}) const {
    HeaderComments c = {
        "nzsg " + std::string(kVersion),
        "config_hash=" + hash,
        "experiment=" + std::string(ExperimentKindName(config->experiment)),
        per_trial_seeds
            ? "seed=" + std::to_string(config->seed) +
                  " game_seed=per-trial init_seed=per-trial"
            : "seed=" + std::to_string(config->seed) +
                  " game_seed=" + std::to_string(seeds.game) +
                  " init_seed=" + std::to_string(seeds.init)};
    for (auto& e : extra) c.push_back(std::move(e));
    return c;
  }
};

Context MakeContext(const ExperimentConfig& config) {
  config.Validate();
  return {&config, DeriveSeeds(config), ConfigHash(config)};
}

void RequireFamily(const ExperimentConfig& config, PayoffKind family) {
  if (config.game.family != family) {
    throw ConfigError("config: " + std::string(ExperimentKindName(config.experiment)) +
                      " needs a " + std::string(PayoffKindName(family)) +
                      " game, got " + std::string(PayoffKindName(config.game.family)));
  }
}

GameGraph BuildConfiguredGame(const Context& ctx) {
  GameSpec spec = ctx.config->game;
  spec.seed = ctx.seeds.game;
  return BuildGame(spec);
}

double EtaFor(const ExperimentConfig& c, UpdateRule rule) {
  return rule == UpdateRule::kGA ? c.eta_ga : c.eta_oga;
}

StepSchedule ScheduleFor(const ExperimentConfig& c, UpdateRule rule,
                         std::int64_t horizon) {
  if (c.epsilon && c.experiment != ExperimentKind::kFig1Linear &&
      c.experiment != ExperimentKind::kFig2Quadratic &&
      c.experiment != ExperimentKind::kFig3Scaling) {
    return StepSchedule::PowerLaw(std::max<std::int64_t>(horizon, 1), *c.epsilon);
  }
  return StepSchedule::Constant(EtaFor(c, rule));
}

// The Nash set used for distances: ker H for linear games and the origin
// otherwise (every family here has grad p(0) = 0 and, with alpha > 0, that
// equilibrium is unique).
NashSet NashSetFor(const GameGraph& g) {
  if (g.family() == PayoffKind::kBilinear) {
    return LinearNashSet(AssembleHessian(g, g.ZeroProfile()));
  }
  return NashSet(g.ZeroProfile());
}

std::string RuleName(UpdateRule r) { return std::string(UpdateRuleName(r)); }

std::string TrajectoryCsv(const Context& ctx, const Trajectory& traj,
                          const StepSchedule& schedule, std::int64_t stride,
                          std::vector<std::string> extra = {}) {
  extra.insert(extra.begin(), "rule=" + RuleName(traj.rule) + " schedule=" +
                                  schedule.Describe() + " bootstrap=" +
                                  traj.bootstrap);
  std::ostringstream os;
  WriteTrajectoryCsv(os, traj, ctx.Comments(std::move(extra)), stride);
  return os.str();
}

std::string NormsCsv(const Context& ctx, const Trajectory& traj,
                     std::int64_t stride) {
  std::ostringstream os;
  WritePlayerNormsCsv(os, traj, ctx.Comments({"rule=" + RuleName(traj.rule)}),
                      stride);
  return os.str();
}

json FitJson(const RateFit& f) {
  json j = {{"window", {f.t_start, f.t_end}},
            {"points", f.points},
            {"slope", f.slope},
            {"factor", f.factor},
            {"r_squared", f.r_squared},
            {"valid", f.valid}};
  j["bound_factor"] = OptionalJson(f.bound_factor);
  return j;
}

// dist^2(t+1) / dist^2(t) over consecutive recorded steps with finite
// positive distances.
struct StepRatio {
  std::int64_t t;  // ratio of step t -> t + 1
  double ratio;
};

std::vector<StepRatio> StepRatios(const Trajectory& traj) {
  std::vector<StepRatio> out;
  for (std::size_t k = 1; k < traj.rows.size(); ++k) {
    const TrajectoryRow& a = traj.rows[k - 1];
    const TrajectoryRow& b = traj.rows[k];
    if (b.t != a.t + 1 || a.overflow || b.overflow) continue;
    if (!(a.dist_sq_total > 0.0) || !std::isfinite(a.dist_sq_total) ||
        !std::isfinite(b.dist_sq_total)) {
      continue;
    }
    out.push_back({a.t, b.dist_sq_total / a.dist_sq_total});
  }
  return out;
}

// First t with dist^2 < threshold, if any.
std::optional<std::int64_t> FirstBelow(const Trajectory& traj, double threshold) {
  for (const TrajectoryRow& row : traj.rows) {
    if (!row.overflow && row.dist_sq_total < threshold) return row.t;
  }
  return std::nullopt;
}

double MaxPlayerNormSq(const StrategyProfile& x) {
  double best = 0.0;
  for (int i = 0; i < x.num_players(); ++i) {
    best = std::max(best, x.player(i).squaredNorm());
  }
  return best;
}

json TrajectorySummary(const Trajectory& traj, double threshold) {
  const TrajectoryRow& first = traj.rows.front();
  const TrajectoryRow& last = traj.rows.back();
  json j = {{"steps_completed", traj.steps_completed},
            {"initial_dist_sq", first.dist_sq_total},
            {"final_dist_sq", last.dist_sq_total},
            {"final_avg_iterate_dist_sq", last.avg_iterate_dist_sq},
            {"overflow", traj.overflow},
            {"bootstrap", traj.bootstrap}};
  const auto below = FirstBelow(traj, threshold);
  j["iterations_to_threshold"] = below ? json(*below) : json(nullptr);
  return j;
}

DynamicsConfig MakeDynamics(UpdateRule rule, StepSchedule schedule,
                            std::int64_t horizon, std::uint64_t seed) {
  DynamicsConfig d;
  d.rule = rule;
  d.schedule = std::move(schedule);
  d.horizon = horizon;
  d.record_every = 1;
  d.seed = seed;
  return d;
}

ExperimentResult NewResult(const std::string& name, const Context& ctx) {
  ExperimentResult r;
  r.name = name;
  r.summary["provenance"] = ctx.Provenance();
  r.summary["config"] = ToJson(*ctx.config);
  return r;
}

// Below this the squared distance is treated as converged to machine floor;
// bound-check runs stop there so that ratios never involve subnormals.
constexpr double kFloorDistSq = 1e-150;

}  // namespace

// --- Figure 1: linear game ------------------------------------------------------------

ExperimentResult RunFig1(const ExperimentConfig& config) {
  RequireFamily(config, PayoffKind::kBilinear);
  const Context ctx = MakeContext(config);
  ExperimentResult out = NewResult("fig1", ctx);

  const GameGraph g = BuildConfiguredGame(ctx);
  const StrategyProfile x0 =
      RandomProfile(g, ctx.seeds.init, config.init_low, config.init_high);
  const GameHessian h = AssembleHessian(g, g.ZeroProfile());
  const NashSet nash = LinearNashSet(h);
  const SpectralReport spec =
      Spectrum(h, config.eta_ga > 0.0 ? config.eta_ga : 1.0);
  out.summary["spectrum"] = {{"omega", spec.has_nonzero ? json(spec.omega) : json(nullptr)},
                             {"rho", spec.rho},
                             {"nash_set_dimension", nash.kernel_basis().cols()},
                             {"eigenvector_condition",
                              std::isfinite(spec.eigenvector_condition)
                                  ? json(spec.eigenvector_condition)
                                  : json("inf")}};
  {
    json sj = ToJson(spec);
    sj["provenance"] = ctx.Provenance();
    out.artifacts.push_back({"fig1_spectrum.json", sj.dump(2) + "\n"});
  }

  for (UpdateRule rule : config.rules) {
    const double eta = EtaFor(config, rule);
    const StepSchedule schedule = StepSchedule::Constant(eta);
    const Trajectory traj =
        Run(g, MakeDynamics(rule, schedule, config.horizon, ctx.seeds.init), x0,
            nash);
    const std::string name = RuleName(rule);
    out.artifacts.push_back({"fig1_" + name + ".csv",
                             TrajectoryCsv(ctx, traj, schedule, config.csv_stride)});
    out.artifacts.push_back(
        {"fig1_" + name + "_norms.csv", NormsCsv(ctx, traj, config.csv_stride)});

    json s = TrajectorySummary(traj, config.threshold);
    s["eta"] = eta;
    RateFit fit = FitRate(traj, config.fit_skip_fraction);
    const double d0 = traj.rows.front().dist_sq_total;
    const double dT = traj.rows.back().dist_sq_total;

    if (eta == 0.0) {
      bool stationary = true;
      for (const TrajectoryRow& row : traj.rows) {
        stationary = stationary && row.dist_sq_total == d0;
      }
      s["stationary"] = stationary;
      out.AddCheck(name + "_stationary_at_zero_step", stationary);
    } else if (rule == UpdateRule::kGA) {
      const double factor = spec.has_nonzero
                                ? 1.0 + eta * eta * spec.omega * spec.omega
                                : 1.0;
      fit.bound_factor = factor;
      double min_ratio = std::numeric_limits<double>::infinity();
      double worst_gap = std::numeric_limits<double>::infinity();
      for (const StepRatio& r : StepRatios(traj)) {
        min_ratio = std::min(min_ratio, r.ratio);
        worst_gap = std::min(worst_gap, r.ratio - factor);
      }
      s["divergence_factor"] = factor;
      s["min_step_ratio"] = min_ratio;
      s["last_iterate_divergent"] = dT > d0;
      s["average_iterate_converges"] =
          traj.rows.back().avg_iterate_dist_sq < d0;
      out.AddCheck("ga_step_growth_at_least_divergence_factor",
                   worst_gap >= -1e-10,
                   "min ratio - factor = " + FormatDouble(worst_gap));
      out.AddCheck("ga_fit_factor_at_least_divergence_factor",
                   fit.valid && fit.factor >= factor && fit.r_squared >= 0.99,
                   "fit " + FormatDouble(fit.factor) + " R2 " +
                       FormatDouble(fit.r_squared) + " bound " +
                       FormatDouble(factor));
      out.AddCheck("ga_last_iterate_divergent", dT > d0);
    } else {
      s["last_iterate_convergent"] = dT < d0;
      s["average_iterate_converges"] =
          traj.rows.back().avg_iterate_dist_sq < d0;
      out.AddCheck(name + "_last_iterate_convergent", dT < d0,
                   "dist^2 " + FormatDouble(d0) + " -> " + FormatDouble(dT));
    }
    s["fit"] = FitJson(fit);
    out.summary["runs"][name] = s;
  }

  // OGA at the step size of the linear-rate theorem, checked per step after
  // the transient.
  if (spec.has_nonzero && config.horizon > 0) {
    const RatePrediction pred = PredictRates(
        RateTheorem::kOgaLinear, RateInputsFrom(g, spec), 0);
    const double eta = *pred.prescribed_eta;
    const double factor = *pred.per_step_factor;
    DynamicsConfig d = MakeDynamics(UpdateRule::kOGA, StepSchedule::Constant(eta),
                                    config.horizon, ctx.seeds.init);
    d.stop_below = kFloorDistSq;
    const Trajectory traj = Run(g, d, x0, nash);
    const std::int64_t t_start = static_cast<std::int64_t>(
        std::ceil(config.fit_skip_fraction * traj.steps_completed));
    double worst = 0.0;
    for (const StepRatio& r : StepRatios(traj)) {
      if (r.t >= t_start) worst = std::max(worst, r.ratio);
    }
    out.artifacts.push_back(
        {"fig1_oga_theorem.csv",
         TrajectoryCsv(ctx, traj, d.schedule, config.csv_stride,
                       {"per_step_bound=" + FormatDouble(factor)})});
    out.summary["oga_theorem_run"] = {{"eta", eta},
                                      {"per_step_bound", factor},
                                      {"max_post_transient_ratio", worst},
                                      {"steps_completed", traj.steps_completed}};
    out.AddCheck("oga_theorem_step_ratio_within_bound", worst <= factor * 1.05,
                 "max ratio " + FormatDouble(worst) + " bound " +
                     FormatDouble(factor));
  }
  return out;
}

// --- Figure 2: strongly concave quadratic game ------------------------------------------

ExperimentResult RunFig2(const ExperimentConfig& config) {
  RequireFamily(config, PayoffKind::kQuadraticSC);
  const Context ctx = MakeContext(config);
  ExperimentResult out = NewResult("fig2", ctx);

  const GameGraph g = BuildConfiguredGame(ctx);
  const StrategyProfile x0 =
      RandomProfile(g, ctx.seeds.init, config.init_low, config.init_high);
  const NashSet nash(g.ZeroProfile());
  const int n = g.num_players();
  out.summary["moduli"] = {{"alpha", g.moduli().alpha},
                           {"beta", OptionalJson(g.moduli().beta)}};

  for (UpdateRule rule : config.rules) {
    const double eta = EtaFor(config, rule);
    const StepSchedule schedule = StepSchedule::Constant(eta);
    const Trajectory traj =
        Run(g, MakeDynamics(rule, schedule, config.horizon, ctx.seeds.init), x0,
            nash);
    const std::string name = RuleName(rule);
    out.artifacts.push_back({"fig2_" + name + ".csv",
                             TrajectoryCsv(ctx, traj, schedule, config.csv_stride)});
    json s = TrajectorySummary(traj, config.threshold);
    s["eta"] = eta;
    const RateFit fit = FitRate(traj, config.fit_skip_fraction);
    s["fit"] = FitJson(fit);
    out.summary["runs"][name] = s;
    const bool converged = FirstBelow(traj, config.threshold).has_value();
    out.AddCheck(name + "_reaches_threshold", converged);
    out.AddCheck(name + "_log_linear_fit", fit.valid && fit.r_squared >= 0.99,
                 "R2 " + FormatDouble(fit.r_squared));
  }

  const double r_x0 = std::sqrt(MaxPlayerNormSq(x0));
  RateInputs in;
  in.n = n;
  in.alpha = g.moduli().alpha;
  in.beta = g.moduli().beta;

  // Smooth strongly concave GA theorem: pointwise ratio and cumulative bound.
  std::int64_t bound_horizon = config.horizon;
  {
    in.radius = r_x0;
    const RatePrediction pred =
        PredictRates(RateTheorem::kGaSmoothStrongly, in, bound_horizon);
    const double eta = *pred.prescribed_eta;
    const double factor = *pred.per_step_factor;
    DynamicsConfig d = MakeDynamics(UpdateRule::kGA, StepSchedule::Constant(eta),
                                    bound_horizon, ctx.seeds.init);
    d.stop_below = kFloorDistSq;
    const Trajectory traj = Run(g, d, x0, nash);
    double worst_ratio = 0.0;
    for (const StepRatio& r : StepRatios(traj)) {
      worst_ratio = std::max(worst_ratio, r.ratio);
    }
    double worst_excess = -std::numeric_limits<double>::infinity();
    for (const TrajectoryRow& row : traj.rows) {
      worst_excess = std::max(worst_excess,
                              row.dist_sq_total - pred.bound[row.t]);
    }
    const auto below = FirstBelow(traj, config.threshold);
    out.artifacts.push_back(
        {"fig2_ga_bound.csv",
         TrajectoryCsv(ctx, traj, d.schedule, config.csv_stride,
                       {"per_step_bound=" + FormatDouble(factor)})});
    out.summary["ga_bound_run"] = {
        {"eta", eta},
        {"per_step_bound", factor},
        {"max_step_ratio", worst_ratio},
        {"max_excess_over_bound", worst_excess},
        {"iterations_to_threshold", below ? json(*below) : json(nullptr)}};
    out.AddCheck("ga_bound_step_ratio", worst_ratio <= factor * (1.0 + 1e-12),
                 "max ratio " + FormatDouble(worst_ratio) + " bound " +
                     FormatDouble(factor));
    out.AddCheck("ga_bound_cumulative", worst_excess <= 0.0);
    out.AddCheck("ga_bound_reaches_threshold", below.has_value());
  }

  // Smooth strongly concave OGA theorem: cumulative bound with r covering
  // both x^0 and the bootstrap iterate x^1.
  {
    in.radius.reset();
    const double eta =
        *PredictRates(RateTheorem::kOgaSmoothStrongly, in, 0).prescribed_eta;
    DynamicsConfig d = MakeDynamics(UpdateRule::kOGA, StepSchedule::Constant(eta),
                                    bound_horizon, ctx.seeds.init);
    d.stop_below = kFloorDistSq;
    d.keep_iterates = true;
    const Trajectory traj = Run(g, d, x0, nash);
    double r2 = MaxPlayerNormSq(x0);
    for (const auto& [t, x] : traj.iterates) {
      if (t == 1) r2 = std::max(r2, MaxPlayerNormSq(x));
    }
    in.radius = std::sqrt(r2);
    const RatePrediction pred =
        PredictRates(RateTheorem::kOgaSmoothStrongly, in, bound_horizon);
    double worst_excess = -std::numeric_limits<double>::infinity();
    for (const TrajectoryRow& row : traj.rows) {
      worst_excess = std::max(worst_excess,
                              row.dist_sq_total - pred.bound[row.t]);
    }
    const auto below = FirstBelow(traj, config.threshold);
    out.artifacts.push_back(
        {"fig2_oga_bound.csv",
         TrajectoryCsv(ctx, traj, d.schedule, config.csv_stride,
                       {"per_step_bound=" + FormatDouble(*pred.per_step_factor)})});
    out.summary["oga_bound_run"] = {
        {"eta", eta},
        {"per_step_bound", *pred.per_step_factor},
        {"radius", *in.radius},
        {"max_excess_over_bound", worst_excess},
        {"iterations_to_threshold", below ? json(*below) : json(nullptr)}};
    out.AddCheck("oga_bound_cumulative", worst_excess <= 0.0);
    out.AddCheck("oga_bound_reaches_threshold", below.has_value());
  }
  return out;
}

// --- Figure 3: iterations against the number of players -------------------------------------

namespace {

struct TrialOutcome {
  int n = 0;
  int trial = 0;
  UpdateRule rule = UpdateRule::kGA;
  std::int64_t iterations = 0;
  bool censored = false;
  std::uint64_t game_seed = 0;
};

std::vector<TrialOutcome> RunScalingTrial(const ExperimentConfig& config, int n,
                                          int trial) {
  const Rng trial_rng = Rng(config.seed).Split("fig3/n=" + std::to_string(n), trial);
  const std::uint64_t game_seed = trial_rng.Split("game").NextU64();
  const std::uint64_t init_seed = trial_rng.Split("init").NextU64();
  GameSpec spec = config.game;
  spec.dims.assign(n, config.game.dims.front());
  spec.complete = true;
  spec.edges.clear();
  spec.seed = game_seed;
  const GameGraph g = BuildGame(spec);
  const StrategyProfile x0 = RandomProfile(g, init_seed, config.init_low, config.init_high);
  const NashSet nash(g.ZeroProfile());

  std::vector<TrialOutcome> out;
  for (UpdateRule rule : config.rules) {
    DynamicsConfig d = MakeDynamics(rule, StepSchedule::Constant(EtaFor(config, rule)),
                                    config.t_max, init_seed);
    d.record_every = config.t_max;
    d.stop_below = config.threshold;
    const Trajectory traj = Run(g, d, x0, nash);
    TrialOutcome o{n, trial, rule, 0, false, game_seed};
    if (traj.stopped_below_threshold && !traj.overflow) {
      o.iterations = traj.steps_completed;
    } else {
      o.iterations = config.t_max;
      o.censored = true;
    }
    out.push_back(o);
  }
  return out;
}

}  // namespace

ExperimentResult RunFig3(const ExperimentConfig& config) {
  RequireFamily(config, PayoffKind::kQuadraticSC);
  Context ctx = MakeContext(config);
  ctx.per_trial_seeds = true;
  ExperimentResult out = NewResult("fig3", ctx);
  out.summary["provenance"]["game_seed"] = "per-trial";
  out.summary["provenance"]["init_seed"] = "per-trial";

  struct Job {
    int n;
    int trial;
  };
  std::vector<Job> jobs;
  for (int n : config.player_range) {
    for (int k = 0; k < config.trials; ++k) jobs.push_back({n, k});
  }
  std::vector<std::vector<TrialOutcome>> slots(jobs.size());
  const std::size_t workers =
      std::max<std::size_t>(1, std::thread::hardware_concurrency());
  for (std::size_t start = 0; start < jobs.size(); start += workers) {
    std::vector<std::future<std::vector<TrialOutcome>>> batch;
    const std::size_t stop = std::min(jobs.size(), start + workers);
    for (std::size_t k = start; k < stop; ++k) {
      batch.push_back(std::async(std::launch::async, RunScalingTrial,
                                 std::cref(config), jobs[k].n, jobs[k].trial));
    }
    for (std::size_t k = start; k < stop; ++k) slots[k] = batch[k - start].get();
  }
  std::vector<TrialOutcome> all;
  for (auto& s : slots) all.insert(all.end(), s.begin(), s.end());
  std::sort(all.begin(), all.end(), [](const TrialOutcome& a, const TrialOutcome& b) {
    return std::tie(a.n, a.rule, a.trial) < std::tie(b.n, b.rule, b.trial);
  });

  std::ostringstream trials_csv;
  for (const std::string& line : ctx.Comments()) trials_csv << "# " << line << '\n';
  trials_csv << "n,trial,rule,iterations,censored,game_seed\n";
  for (const TrialOutcome& o : all) {
    trials_csv << o.n << ',' << o.trial << ',' << RuleName(o.rule) << ','
               << o.iterations << ',' << (o.censored ? 1 : 0) << ','
               << o.game_seed << '\n';
  }
  out.artifacts.push_back({"fig3_trials.csv", trials_csv.str()});

  std::ostringstream agg_csv;
  for (const std::string& line :
       ctx.Comments({"censored trials enter the mean at t_max=" +
                     std::to_string(config.t_max)})) {
    agg_csv << "# " << line << '\n';
  }
  agg_csv << "n,rule,mean_iterations,std_iterations,censored_trials,trials\n";
  std::map<UpdateRule, std::vector<double>> means;
  json per_rule;
  for (UpdateRule rule : config.rules) {
    json rows = json::array();
    for (int n : config.player_range) {
      std::vector<double> it;
      int censored = 0;
      for (const TrialOutcome& o : all) {
        if (o.n == n && o.rule == rule) {
          it.push_back(static_cast<double>(o.iterations));
          censored += o.censored ? 1 : 0;
        }
      }
      const double mean = std::accumulate(it.begin(), it.end(), 0.0) / it.size();
      double var = 0.0;
      for (double v : it) var += (v - mean) * (v - mean);
      const double sd = it.size() > 1 ? std::sqrt(var / (it.size() - 1)) : 0.0;
      means[rule].push_back(mean);
      agg_csv << n << ',' << RuleName(rule) << ',' << FormatDouble(mean) << ','
              << FormatDouble(sd) << ',' << censored << ',' << it.size() << '\n';
      rows.push_back({{"n", n},
                      {"mean_iterations", mean},
                      {"std_iterations", sd},
                      {"censored_trials", censored}});
    }
    per_rule[RuleName(rule)] = rows;
  }
  out.artifacts.push_back({"fig3.csv", agg_csv.str()});
  out.summary["iterations"] = per_rule;

  const std::size_t m = config.player_range.size();
  if (means.count(UpdateRule::kGA)) {
    const auto& v = means[UpdateRule::kGA];
    bool increasing = true;
    json ratios = json::array();
    for (std::size_t k = 1; k < v.size(); ++k) {
      increasing = increasing && v[k] > v[k - 1];
      ratios.push_back(v[k] / v[k - 1]);
    }
    out.summary["ga_monotonicity"] = {{"strictly_increasing", increasing},
                                      {"consecutive_ratios", ratios}};
    out.AddCheck("ga_iterations_strictly_increasing", increasing);
  }
  if (means.count(UpdateRule::kOGA) && m >= 2) {
    const auto& v = means[UpdateRule::kOGA];
    const double ratio = v[m - 1] / v[m - 2];
    out.summary["oga_plateau"] = {{"n_pair", {config.player_range[m - 2],
                                              config.player_range[m - 1]}},
                                  {"ratio", ratio}};
    out.AddCheck("oga_plateau_ratio_at_most_1.25", ratio <= 1.25,
                 "ratio " + FormatDouble(ratio));
  }
  return out;
}

// --- Lipschitz theorems: decaying steps on the clipped game ------------------------------------

ExperimentResult RunLipschitz(const ExperimentConfig& config) {
  RequireFamily(config, PayoffKind::kLipschitzSC);
  const Context ctx = MakeContext(config);
  ExperimentResult out = NewResult("lipschitz", ctx);

  const GameGraph g = BuildConfiguredGame(ctx);
  const StrategyProfile x0 =
      RandomProfile(g, ctx.seeds.init, config.init_low, config.init_high);
  const NashSet nash(g.ZeroProfile());
  const double clip = config.game.clip_radius;
  const double epsilon = config.epsilon.value_or(0.25);

  RateInputs in;
  in.n = g.num_players();
  in.alpha = g.moduli().alpha;
  in.lipschitz = g.moduli().lipschitz;
  in.radius = std::sqrt(MaxPlayerNormSq(x0));
  out.summary["constants"] = {{"alpha", g.moduli().alpha},
                              {"lipschitz", OptionalJson(g.moduli().lipschitz)},
                              {"r", *in.radius},
                              {"clip_radius", clip},
                              {"epsilon", epsilon}};

  std::ostringstream table;
  for (const std::string& line : ctx.Comments()) table << "# " << line << '\n';
  table << "T,epsilon,rule,eta,final_dist_sq,bound,within_bound,max_player_norm,"
           "inside_clip_ball\n";

  auto run_one = [&](UpdateRule rule, std::int64_t T, double eps,
                     bool write_trajectory) {
    const StepSchedule schedule = StepSchedule::PowerLaw(T, eps);
    const Trajectory traj =
        Run(g, MakeDynamics(rule, schedule, T, ctx.seeds.init), x0, nash);
    in.schedule = schedule;
    const RatePrediction pred = PredictRates(
        rule == UpdateRule::kGA ? RateTheorem::kGaLipschitz
                                : RateTheorem::kOgaLipschitz,
        in, T);
    double max_norm_sq = 0.0;
    for (const TrajectoryRow& row : traj.rows) {
      for (double v : row.dist_sq_player) max_norm_sq = std::max(max_norm_sq, v);
    }
    const double final_d = traj.rows.back().dist_sq_total;
    const double bound = pred.bound[T];
    const bool within = final_d <= bound && !traj.overflow;
    const bool inside = std::sqrt(max_norm_sq) <= clip;
    table << T << ',' << FormatDouble(eps) << ',' << RuleName(rule) << ','
          << FormatDouble(schedule.At(1)) << ',' << FormatDouble(final_d) << ','
          << FormatDouble(bound) << ',' << (within ? 1 : 0) << ','
          << FormatDouble(std::sqrt(max_norm_sq)) << ',' << (inside ? 1 : 0)
          << '\n';
    if (write_trajectory) {
      const std::int64_t stride = std::max(config.csv_stride, T / 1000);
      out.artifacts.push_back(
          {"lipschitz_" + RuleName(rule) + "_T" + std::to_string(T) + ".csv",
           TrajectoryCsv(ctx, traj, schedule, stride,
                         {"bound_at_T=" + FormatDouble(bound)})});
    }
    return json{{"T", T},
                {"epsilon", eps},
                {"eta", schedule.At(1)},
                {"final_dist_sq", final_d},
                {"bound", bound},
                {"within_bound", within},
                {"max_player_norm", std::sqrt(max_norm_sq)},
                {"inside_clip_ball", inside}};
  };

  for (UpdateRule rule : config.rules) {
    const std::string name = RuleName(rule);
    json ladder = json::array();
    std::vector<double> finals;
    bool all_within = true;
    for (std::int64_t T : config.horizons) {
      json row = run_one(rule, T, epsilon, true);
      finals.push_back(row["final_dist_sq"].get<double>());
      all_within = all_within && row["within_bound"].get<bool>();
      ladder.push_back(std::move(row));
    }
    bool decreasing = true;
    for (std::size_t k = 1; k < finals.size(); ++k) {
      decreasing = decreasing && finals[k] < finals[k - 1];
    }
    out.summary["ladder"][name] = ladder;
    out.summary["ladder_decreasing"][name] = decreasing;
    out.AddCheck(name + "_final_within_bound", all_within);
    out.AddCheck(name + "_final_decreasing_along_ladder", decreasing);

    if (config.exploratory_epsilon) {
      const std::int64_t T = config.horizons.front();
      json slow = run_one(rule, T, *config.exploratory_epsilon, false);
      slow["reference_final_dist_sq"] = finals.front();
      slow["larger_than_reference"] =
          slow["final_dist_sq"].get<double>() > finals.front();
      out.summary["exploratory"][name] = slow;
    }
  }
  out.artifacts.push_back({"lipschitz.csv", table.str()});
  return out;
}

// --- No-regret self-play -------------------------------------------------------------------

ExperimentResult RunSelfplay(const ExperimentConfig& config) {
  const Context ctx = MakeContext(config);
  ExperimentResult out = NewResult("selfplay", ctx);
  const GameGraph g = BuildConfiguredGame(ctx);
  StrategySets sets;
  for (int i = 0; i < g.num_players(); ++i) {
    sets.push_back(CompactSet::Ball(VectorXd::Zero(g.dim(i)), config.set_radius));
  }
  SelfplayOptions opts;
  opts.checkpoints = config.checkpoints;
  if (std::find(opts.checkpoints.begin(), opts.checkpoints.end(), config.horizon) ==
      opts.checkpoints.end()) {
    opts.checkpoints.push_back(config.horizon);
  }
  const SelfplayResult res =
      ProjectedGaSelfplay(g, sets, config.horizon, ctx.seeds.init, opts);

  std::ostringstream os;
  WriteLedgerCsv(os, res, ctx.Comments({"schedule=" + res.schedule.Describe()}));
  out.artifacts.push_back({"selfplay_ledger.csv", os.str()});

  json cps = json::array();
  for (const SelfplayCheckpoint& cp : res.checkpoints) {
    cps.push_back({{"t", cp.t},
                   {"average_regret", cp.average_regret},
                   {"exploitability", cp.exploitability},
                   {"exact", cp.exact}});
  }
  out.summary["checkpoints"] = cps;
  out.summary["schedule"] = res.schedule.Describe();
  if (!res.checkpoints.empty()) {
    const SelfplayCheckpoint& last = res.checkpoints.back();
    out.AddCheck("exploitability_of_average_at_most_0.05",
                 last.exploitability <= 0.05,
                 "exploitability " + FormatDouble(last.exploitability));
    const SelfplayCheckpoint& first = res.checkpoints.front();
    if (first.t < last.t) {
      bool decreasing = true;
      for (std::size_t i = 0; i < last.average_regret.size(); ++i) {
        decreasing = decreasing && last.average_regret[i] < first.average_regret[i];
      }
      out.AddCheck("average_regret_decreases", decreasing);
    }
  }
  return out;
}

// --- Generic runs --------------------------------------------------------------------------

ExperimentResult RunSimulate(const ExperimentConfig& config) {
  const Context ctx = MakeContext(config);
  ExperimentResult out = NewResult("simulate", ctx);
  const GameGraph g = BuildConfiguredGame(ctx);
  const StrategyProfile x0 =
      RandomProfile(g, ctx.seeds.init, config.init_low, config.init_high);
  const NashSet nash = NashSetFor(g);
  for (UpdateRule rule : config.rules) {
    const StepSchedule schedule = ScheduleFor(config, rule, config.horizon);
    const Trajectory traj =
        Run(g, MakeDynamics(rule, schedule, config.horizon, ctx.seeds.init), x0,
            nash);
    const std::string name = RuleName(rule);
    out.artifacts.push_back({"simulate_" + name + ".csv",
                             TrajectoryCsv(ctx, traj, schedule, config.csv_stride)});
    json s = TrajectorySummary(traj, config.threshold);
    s["schedule"] = schedule.Describe();
    s["fit"] = FitJson(FitRate(traj, config.fit_skip_fraction));
    out.summary["runs"][name] = s;
  }
  return out;
}

ExperimentResult RunSpectral(const ExperimentConfig& config) {
  const Context ctx = MakeContext(config);
  ExperimentResult out = NewResult("spectral", ctx);
  const GameGraph g = BuildConfiguredGame(ctx);
  const StrategyProfile x0 =
      RandomProfile(g, ctx.seeds.init, config.init_low, config.init_high);
  const GameHessian h = AssembleHessian(g, g.ZeroProfile());
  const double eta = config.eta_ga > 0.0 ? config.eta_ga : 1.0;
  const SpectralReport report = Spectrum(h, eta);
  const AntisymmetryReport anti = CheckHessianAntisymmetry(g, h);

  json sj = ToJson(report);
  sj["provenance"] = ctx.Provenance();
  out.artifacts.push_back({"spectral.json", sj.dump(2) + "\n"});

  out.summary["omega"] = report.has_nonzero ? json(report.omega) : json(nullptr);
  out.summary["rho"] = report.rho;
  out.summary["eigenvector_condition"] =
      std::isfinite(report.eigenvector_condition)
          ? json(report.eigenvector_condition)
          : json("inf");
  out.summary["antisymmetry_max_abs"] = anti.max_abs;
  if (!report.note.empty()) out.summary["note"] = report.note;
  out.AddCheck("offdiagonal_antisymmetry", anti.passed);

  const NashSet nash = NashSetFor(g);
  RateInputs base = RateInputsFrom(g, report);
  json predictions;
  for (RateTheorem th :
       {RateTheorem::kGaLinearDivergence, RateTheorem::kOgaLinear,
        RateTheorem::kGaSmoothStrongly, RateTheorem::kOgaSmoothStrongly,
        RateTheorem::kGaLipschitz, RateTheorem::kOgaLipschitz}) {
    RateInputs in = base;
    const bool linear = th == RateTheorem::kGaLinearDivergence ||
                        th == RateTheorem::kOgaLinear;
    if (linear && g.family() != PayoffKind::kBilinear) continue;
    in.radius = linear ? std::sqrt(nash.DistanceSq(x0))
                       : std::sqrt(MaxPlayerNormSq(x0));
    if (th == RateTheorem::kGaLipschitz || th == RateTheorem::kOgaLipschitz) {
      in.schedule = StepSchedule::PowerLaw(std::max<std::int64_t>(config.horizon, 1),
                                           config.epsilon.value_or(0.25));
    }
    const std::string name(RateTheoremName(th));
    try {
      const RatePrediction p = PredictRates(th, in, config.horizon);
      json pj = ToJson(p);
      pj.erase("bound");
      pj["bound_at_horizon"] =
          p.bound.empty() ? json(nullptr) : json(p.bound.back());
      predictions[name] = pj;
    } catch (const ConfigError& e) {
      predictions[name] = {{"unavailable", e.what()}};
    }
  }
  out.summary["predictions"] = predictions;
  return out;
}

ExperimentResult RunValidate(const GameSpec& input, std::uint64_t seed) {
  GameSpec spec = input;
  if (!spec.seed && !spec.inline_matrices) spec.seed = Rng(seed).Split("game").NextU64();
  const std::string hash = HexHash(ToJson(spec).dump());
  ExperimentResult out;
  out.name = "validate";
  out.summary["provenance"] = {{"version", std::string(kVersion)},
                               {"config_hash", hash},
                               {"seed", seed}};
  out.summary["game"] = ToJson(spec);

  const GameGraph g = BuildGame(spec);
  const Rng root(seed);
  json report;

  const ZeroSumReport zs = CheckZeroSum(g, 1000, root.Split("zero-sum").NextU64());
  report["zero_sum"] = {{"samples", zs.samples},
                        {"max_abs_sum", zs.max_abs_sum},
                        {"max_relative", zs.max_relative},
                        {"passed", zs.passed}};
  out.AddCheck("zero_sum", zs.passed,
               "max relative |sum_i p_i| = " + FormatDouble(zs.max_relative));

  {
    Rng rng = root.Split("antisymmetry");
    double worst = 0.0;
    bool ok = true;
    for (int k = 0; k < 100; ++k) {
      const StrategyProfile x = RandomProfile(g, rng.NextU64());
      const AntisymmetryReport a = CheckHessianAntisymmetry(g, AssembleHessian(g, x));
      worst = std::max(worst, a.max_abs / std::max(1.0, a.scale));
      ok = ok && a.passed;
    }
    report["hessian_antisymmetry"] = {{"points", 100},
                                      {"max_relative", worst},
                                      {"passed", ok}};
    out.AddCheck("hessian_antisymmetry", ok,
                 "max relative |H_ij + H_ji^T| = " + FormatDouble(worst));
  }
  {
    Rng rng = root.Split("payoff-sum");
    double worst = 0.0;
    bool ok = true;
    for (int k = 0; k < 1000; ++k) {
      const StrategyProfile x = RandomProfile(g, rng.NextU64());
      const StrategyProfile xs = RandomProfile(g, rng.NextU64());
      const PayoffSumIdentityReport r = CheckPayoffSumIdentity(g, x, xs);
      worst = std::max(worst, r.gap / r.scale);
      ok = ok && r.passed;
    }
    report["payoff_sum_identity"] = {{"pairs", 1000},
                                     {"max_relative", worst},
                                     {"passed", ok}};
    out.AddCheck("payoff_sum_identity", ok,
                 "max relative gap = " + FormatDouble(worst));
  }

  auto certificate = [&](const std::string& name, const CertificateReport& r) {
    report[name] = ToJson(r);
    if (r.applicable) out.AddCheck(name, r.passed, r.detail);
  };
  certificate("gradient_consistency",
              CheckGradientConsistency(g, 100, root.Split("gradient").NextU64()));
  if (g.moduli().alpha > 0.0) {
    certificate("strong_concavity",
                CheckStrongConcavity(g, 200, root.Split("concavity").NextU64()));
  }
  if (g.moduli().beta) {
    certificate("smoothness", CheckSmoothness(g, 200, root.Split("smooth").NextU64()));
  }
  if (g.moduli().lipschitz) {
    certificate("lipschitz_bound",
                CheckLipschitzBound(g, 200, root.Split("lipschitz").NextU64()));
  }
  report["moduli"] = {{"alpha", g.moduli().alpha},
                      {"beta", OptionalJson(g.moduli().beta)},
                      {"lipschitz", OptionalJson(g.moduli().lipschitz)}};
  out.summary["report"] = report;
  return out;
}

ExperimentResult RunExperiment(const ExperimentConfig& config) {
  switch (config.experiment) {
    case ExperimentKind::kFig1Linear:
      return RunFig1(config);
    case ExperimentKind::kFig2Quadratic:
      return RunFig2(config);
    case ExperimentKind::kFig3Scaling:
      return RunFig3(config);
    case ExperimentKind::kLipschitz:
      return RunLipschitz(config);
    case ExperimentKind::kSelfplay:
      return RunSelfplay(config);
    case ExperimentKind::kCustom:
      break;
  }
  return RunSimulate(config);
}

}  // namespace nzsg
