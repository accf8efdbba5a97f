#include "nzsg/dynamics.h"

#include <cmath>
#include <sstream>
#include <utility>

#include "nzsg/errors.h"
#include "nzsg/rng.h"

namespace nzsg {

std::string_view UpdateRuleName(UpdateRule rule) {
  switch (rule) {
    case UpdateRule::kGA:
      return "ga";
    case UpdateRule::kOGA:
      return "oga";
    case UpdateRule::kOGATwoStep:
      return "oga-two-step";
  }
  return "unknown";
}

UpdateRule ParseUpdateRule(std::string_view name) {
  if (name == "ga" || name == "GA") return UpdateRule::kGA;
  if (name == "oga" || name == "OGA") return UpdateRule::kOGA;
  if (name == "oga-two-step" || name == "oga2") return UpdateRule::kOGATwoStep;
  throw ConfigError("unknown update rule '" + std::string(name) + "'");
}

// --- StepSchedule ------------------------------------------------------------

StepSchedule StepSchedule::Constant(double eta) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw ConfigError("step size must be finite and >= 0");
  }
  StepSchedule s;
  s.kind_ = Kind::kConstant;
  s.eta_ = eta;
  return s;
}

StepSchedule StepSchedule::PowerLaw(std::int64_t horizon, double epsilon) {
  if (horizon < 1) throw ConfigError("power-law schedule needs horizon >= 1");
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw ConfigError("power-law exponent epsilon must lie in (0, 0.5)");
  }
  StepSchedule s;
  s.kind_ = Kind::kPowerLaw;
  s.horizon_ = horizon;
  s.epsilon_ = epsilon;
  s.eta_ = std::pow(static_cast<double>(horizon), -(0.5 + epsilon));
  return s;
}

StepSchedule StepSchedule::Explicit(std::vector<double> values) {
  if (values.empty()) throw ConfigError("explicit schedule is empty");
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError("explicit schedule entries must be finite and > 0");
    }
  }
  StepSchedule s;
  s.kind_ = Kind::kExplicit;
  s.values_ = std::move(values);
  return s;
}

StepSchedule StepSchedule::InverseSqrt(double scale) {
  if (!(scale > 0.0)) throw ConfigError("1/sqrt(s) scale must be > 0");
  StepSchedule s;
  s.kind_ = Kind::kInverseSqrt;
  s.inverse_sqrt_scale_ = scale;
  return s;
}

double StepSchedule::At(std::int64_t s) const {
  if (s < 1) s = 1;
  switch (kind_) {
    case Kind::kConstant:
    case Kind::kPowerLaw:
      return eta_;
    case Kind::kInverseSqrt:
      return inverse_sqrt_scale_ / std::sqrt(static_cast<double>(s));
    case Kind::kExplicit:
      if (static_cast<std::size_t>(s) <= values_.size()) return values_[s - 1];
      return values_.back();
  }
  return eta_;
}

std::string StepSchedule::Describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::kConstant:
      os << "constant(" << eta_ << ")";
      break;
    case Kind::kPowerLaw:
      os << "power-law(T=" << horizon_ << ",eps=" << epsilon_ << ")";
      break;
    case Kind::kExplicit:
      os << "explicit(" << values_.size() << " values)";
      break;
    case Kind::kInverseSqrt:
      os << "inverse-sqrt(" << inverse_sqrt_scale_ << ")";
      break;
  }
  return os.str();
}

bool StepSchedule::IsNonincreasing(std::int64_t horizon) const {
  if (kind_ != Kind::kExplicit) return true;
  for (std::int64_t s = 1; s < horizon; ++s) {
    if (At(s + 1) > At(s)) return false;
  }
  return true;
}

// --- NashSet -----------------------------------------------------------------

NashSet::NashSet(StrategyProfile reference)
    : reference_(std::move(reference)),
      kernel_basis_(reference_.size(), 0) {}

NashSet::NashSet(StrategyProfile reference, Eigen::MatrixXd kernel_basis)
    : reference_(std::move(reference)), kernel_basis_(std::move(kernel_basis)) {
  if (kernel_basis_.rows() != reference_.size()) {
    throw DimensionError("Nash kernel basis has the wrong row count");
  }
}

Eigen::VectorXd NashSet::Residual(const StrategyProfile& x) const {
  if (x.dims() != reference_.dims()) {
    throw DimensionError("profile shape does not match the Nash reference");
  }
  Eigen::VectorXd r = x.data() - reference_.data();
  if (kernel_basis_.cols() > 0) {
    r -= kernel_basis_ * (kernel_basis_.transpose() * r);
  }
  return r;
}

double NashSet::DistanceSq(const StrategyProfile& x) const {
  return Residual(x).squaredNorm();
}

std::vector<double> NashSet::PlayerDistanceSq(const StrategyProfile& x) const {
  const Eigen::VectorXd r = Residual(x);
  std::vector<double> out(x.num_players());
  for (int i = 0; i < x.num_players(); ++i) {
    out[i] = r.segment(x.offset(i), x.dim(i)).squaredNorm();
  }
  return out;
}

// --- Config / state ----------------------------------------------------------

void DynamicsConfig::Validate() const {
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (record_every < 1) throw ConfigError("record_every must be >= 1");
}

DynamicsState InitialState(const GameGraph& g, UpdateRule rule,
                           const StrategyProfile& x0,
                           const StepSchedule& schedule) {
  g.CheckShape(x0);
  DynamicsState state;
  state.current = x0;
  if (rule == UpdateRule::kOGA) {
    state.previous_gradient = JointGradient(g, x0);
  } else if (rule == UpdateRule::kOGATwoStep) {
    state.half_iterate = x0.data() - schedule.At(0) * JointGradient(g, x0);
  }
  return state;
}

DynamicsState InitialStateWithSecond(const GameGraph& g, UpdateRule rule,
                                     const StrategyProfile& x0,
                                     const StrategyProfile& x1,
                                     const StepSchedule& schedule) {
  g.CheckShape(x0);
  g.CheckShape(x1);
  if (rule == UpdateRule::kGA) {
    throw ConfigError("an explicit second iterate only applies to OGA");
  }
  DynamicsState state;
  state.current = x1;
  state.t = 1;
  const Eigen::VectorXd g0 = JointGradient(g, x0);
  if (rule == UpdateRule::kOGA) {
    state.previous_gradient = g0;
  } else {
    state.half_iterate = x1.data() - schedule.At(1) * g0;
  }
  return state;
}

namespace {

DynamicsState Advance(const DynamicsState& state, Eigen::VectorXd next) {
  DynamicsState out = state;
  if (!next.allFinite()) {
    out.overflow = true;
    return out;
  }
  out.current.data() = std::move(next);
  out.t = state.t + 1;
  return out;
}

}  // namespace

DynamicsState StepGa(const GameGraph& g, const DynamicsState& state,
                     double eta) {
  if (state.overflow) return state;
  const Eigen::VectorXd grad = JointGradient(g, state.current);
  return Advance(state, state.current.data() + eta * grad);
}

DynamicsState StepOga(const GameGraph& g, const DynamicsState& state,
                      double eta, double eta_prev) {
  if (state.overflow) return state;
  if (!state.previous_gradient) {
    throw PreconditionError("OGA step needs the previous gradient");
  }
  const Eigen::VectorXd grad = JointGradient(g, state.current);
  DynamicsState out =
      Advance(state, state.current.data() + (eta + eta_prev) * grad -
                         eta_prev * *state.previous_gradient);
  if (!out.overflow) out.previous_gradient = grad;
  return out;
}

DynamicsState StepOgaTwoStep(const GameGraph& g, const DynamicsState& state,
                             double eta, double eta_prev) {
  if (state.overflow) return state;
  if (!state.half_iterate) {
    throw PreconditionError("two-step OGA needs the half iterate");
  }
  const Eigen::VectorXd grad = JointGradient(g, state.current);
  Eigen::VectorXd w = *state.half_iterate + eta_prev * grad;
  Eigen::VectorXd next = w + eta * grad;
  DynamicsState out = Advance(state, std::move(next));
  if (!out.overflow) out.half_iterate = std::move(w);
  return out;
}

// --- Run ---------------------------------------------------------------------

StrategyProfile RandomProfile(const GameGraph& g, std::uint64_t seed,
                              double low, double high) {
  Rng rng = Rng(seed).Split("initial-profile");
  return g.MakeProfile(rng.UniformVector(g.total_dim(), low, high));
}

Trajectory Run(const GameGraph& g, const DynamicsConfig& config,
               const StrategyProfile& x0, const NashSet& nash,
               const std::optional<StrategyProfile>& x1) {
  config.Validate();
  g.CheckShape(x0);
  Trajectory traj;
  traj.rule = config.rule;

  DynamicsState state;
  if (x1) {
    state = InitialStateWithSecond(g, config.rule, x0, *x1, config.schedule);
    traj.bootstrap = "explicit-x1";
  } else {
    state = InitialState(g, config.rule, x0, config.schedule);
    traj.bootstrap = config.rule == UpdateRule::kGA
                         ? "none"
                         : "previous-gradient=grad(x0)";
  }

  Eigen::VectorXd running_sum = Eigen::VectorXd::Zero(g.total_dim());
  StrategyProfile average = x0;

  auto record = [&](const StrategyProfile& x, std::int64_t t, double eta,
                    bool overflow) {
    TrajectoryRow row;
    row.t = t;
    row.dist_sq_player = nash.PlayerDistanceSq(x);
    row.dist_sq_total = 0.0;
    for (double v : row.dist_sq_player) row.dist_sq_total += v;
    row.avg_iterate_dist_sq = nash.DistanceSq(average);
    row.eta = eta;
    row.overflow = overflow;
    traj.rows.push_back(std::move(row));
    if (config.keep_iterates) traj.iterates.emplace_back(t, x);
  };

  // Truncation marker: flag the last recorded row rather than duplicating t.
  auto mark_overflow = [&](const StrategyProfile& x, std::int64_t t,
                           double eta) {
    if (!traj.rows.empty() && traj.rows.back().t == t) {
      traj.rows.back().overflow = true;
    } else {
      record(x, t, eta, true);
    }
  };

  record(x0, 0, config.schedule.At(0), false);
  if (x1) {
    running_sum += x1->data();
    average.data() = running_sum;
    record(*x1, 1, config.schedule.At(1), false);
  }

  const auto below = [&](double d) {
    return config.stop_below > 0.0 && d < config.stop_below;
  };
  bool stopped = below(traj.rows.back().dist_sq_total);

  while (!stopped && state.t < config.horizon) {
    const std::int64_t s = state.t + 1;
    const double eta = config.schedule.At(s);
    const double eta_prev = config.schedule.At(s - 1);
    DynamicsState next;
    switch (config.rule) {
      case UpdateRule::kGA:
        next = StepGa(g, state, eta);
        break;
      case UpdateRule::kOGA:
        next = StepOga(g, state, eta, eta_prev);
        break;
      case UpdateRule::kOGATwoStep:
        next = StepOgaTwoStep(g, state, eta, eta_prev);
        break;
    }
    if (next.overflow) {
      traj.overflow = true;
      mark_overflow(state.current, state.t, eta);
      break;
    }
    state = std::move(next);
    running_sum += state.current.data();
    average.data() = running_sum / static_cast<double>(state.t);

    const double dist = nash.DistanceSq(state.current);
    stopped = below(dist);
    if (!std::isfinite(dist)) {
      traj.overflow = true;
      mark_overflow(state.current, state.t, eta);
      break;
    }
    if (stopped || state.t % config.record_every == 0 ||
        state.t == config.horizon) {
      record(state.current, state.t, eta, false);
    }
  }

  traj.final_iterate = state.current;
  traj.time_average = average;
  traj.steps_completed = state.t;
  traj.stopped_below_threshold = stopped;
  return traj;
}

}  // namespace nzsg
