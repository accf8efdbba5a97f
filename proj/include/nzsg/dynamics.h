#ifndef NZSG_DYNAMICS_H_
#define NZSG_DYNAMICS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "nzsg/game.h"

namespace nzsg {

enum class UpdateRule { kGA, kOGA, kOGATwoStep };

std::string_view UpdateRuleName(UpdateRule rule);
// "ga", "oga", "oga-two-step". Throws ConfigError.
UpdateRule ParseUpdateRule(std::string_view name);

// Step sizes eta_s indexed by the step s >= 1 that produces x^s from x^{s-1}.
// eta_0 (needed by variable-step OGA) equals eta_1.
class StepSchedule {
 public:
  enum class Kind { kConstant, kPowerLaw, kExplicit, kInverseSqrt };

  static StepSchedule Constant(double eta);
  // eta_s = horizon^{-(1/2 + epsilon)} for every s; epsilon in (0, 1/2).
  static StepSchedule PowerLaw(std::int64_t horizon, double epsilon);
  // values[k] is eta_{k+1}; steps past the end reuse the last value.
  static StepSchedule Explicit(std::vector<double> values);
  // eta_s = scale / sqrt(s); used by no-regret self-play.
  static StepSchedule InverseSqrt(double scale);

  double At(std::int64_t s) const;
  Kind kind() const { return kind_; }
  std::string Describe() const;
  bool IsNonincreasing(std::int64_t horizon) const;

 private:
  StepSchedule() = default;

  Kind kind_ = Kind::kConstant;
  double eta_ = 0.0;
  std::int64_t horizon_ = 0;
  double epsilon_ = 0.0;
  double inverse_sqrt_scale_ = 0.0;
  std::vector<double> values_;
};

// Nash set as an affine set {reference + N z}, N with orthonormal columns
// (possibly zero columns). Distances are measured to this set.
class NashSet {
 public:
  NashSet() = default;
  explicit NashSet(StrategyProfile reference);
  NashSet(StrategyProfile reference, Eigen::MatrixXd kernel_basis);

  // x - proj(x), in profile layout.
  Eigen::VectorXd Residual(const StrategyProfile& x) const;
  double DistanceSq(const StrategyProfile& x) const;
  std::vector<double> PlayerDistanceSq(const StrategyProfile& x) const;

  const StrategyProfile& reference() const { return reference_; }
  const Eigen::MatrixXd& kernel_basis() const { return kernel_basis_; }

 private:
  StrategyProfile reference_;
  Eigen::MatrixXd kernel_basis_;
};

struct DynamicsConfig {
  UpdateRule rule = UpdateRule::kGA;
  StepSchedule schedule = StepSchedule::Constant(0.01);
  std::int64_t horizon = 1000;
  std::int64_t record_every = 1;
  std::uint64_t seed = 0;
  // Stop as soon as the total squared distance drops below this (<= 0:
  // never). The stopping step is always recorded.
  double stop_below = 0.0;
  // Keep full iterates (t, x^t) at recorded steps.
  bool keep_iterates = false;

  void Validate() const;
};

struct DynamicsState {
  StrategyProfile current;                     // x^t
  std::optional<Eigen::VectorXd> previous_gradient;  // grad p(x^{t-1}), OGA
  std::optional<Eigen::VectorXd> half_iterate;       // w^{t-1}, two-step OGA
  std::int64_t t = 0;
  bool overflow = false;
};

// Fresh state at x^0. OGA bootstraps with previous_gradient = grad p(x^0), so
// the first step is a GA step; the two-step form uses the matching
// w^{-1} = x^0 - eta_0 grad p(x^0).
DynamicsState InitialState(const GameGraph& g, UpdateRule rule,
                           const StrategyProfile& x0,
                           const StepSchedule& schedule);
// State at t = 1 from explicit (x^0, x^1) for the optimistic rules.
DynamicsState InitialStateWithSecond(const GameGraph& g, UpdateRule rule,
                                     const StrategyProfile& x0,
                                     const StrategyProfile& x1,
                                     const StepSchedule& schedule);

// Simultaneous (Jacobi) updates. A non-finite result sets overflow and
// returns the input iterate unchanged.
DynamicsState StepGa(const GameGraph& g, const DynamicsState& state,
                     double eta);
// x^{t+1} = x^t + (eta + eta_prev) grad p(x^t) - eta_prev grad p(x^{t-1}).
DynamicsState StepOga(const GameGraph& g, const DynamicsState& state,
                      double eta, double eta_prev);
// w^t = w^{t-1} + eta_prev grad p(x^t);  x^{t+1} = w^t + eta grad p(x^t).
DynamicsState StepOgaTwoStep(const GameGraph& g, const DynamicsState& state,
                             double eta, double eta_prev);

struct TrajectoryRow {
  std::int64_t t = 0;
  double dist_sq_total = 0.0;
  std::vector<double> dist_sq_player;
  double avg_iterate_dist_sq = 0.0;
  double eta = 0.0;  // step size that produced x^t (eta_0 at t = 0)
  bool overflow = false;
};

struct Trajectory {
  UpdateRule rule = UpdateRule::kGA;
  std::vector<TrajectoryRow> rows;
  std::vector<std::pair<std::int64_t, StrategyProfile>> iterates;
  StrategyProfile final_iterate;
  // (1/t) sum_{s=1..t} x^s at the last completed step (x^0 if none).
  StrategyProfile time_average;
  std::int64_t steps_completed = 0;
  bool overflow = false;
  bool stopped_below_threshold = false;
  std::string bootstrap;
};

Trajectory Run(const GameGraph& g, const DynamicsConfig& config,
               const StrategyProfile& x0, const NashSet& nash,
               const std::optional<StrategyProfile>& x1 = std::nullopt);

// Initial profile with coordinates i.i.d. uniform on [low, high].
StrategyProfile RandomProfile(const GameGraph& g, std::uint64_t seed,
                              double low = -1.0, double high = 1.0);

}  // namespace nzsg

#endif  // NZSG_DYNAMICS_H_
