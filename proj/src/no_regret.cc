#include "nzsg/no_regret.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "nzsg/errors.h"
#include "nzsg/rng.h"

namespace nzsg {

// --- CompactSet --------------------------------------------------------------

CompactSet::CompactSet(Kind kind, Eigen::VectorXd a, Eigen::VectorXd b,
                       double radius)
    : kind_(kind), a_(std::move(a)), b_(std::move(b)), radius_(radius) {}

CompactSet CompactSet::Ball(Eigen::VectorXd center, double radius) {
  if (!(radius > 0.0)) throw ConfigError("ball radius must be > 0");
  return CompactSet(Kind::kBall, std::move(center), Eigen::VectorXd(), radius);
}

CompactSet CompactSet::Box(Eigen::VectorXd lower, Eigen::VectorXd upper) {
  if (lower.size() != upper.size()) {
    throw DimensionError("box corners have different lengths");
  }
  if (!(lower.array() < upper.array()).all()) {
    throw ConfigError("box needs lower < upper componentwise");
  }
  return CompactSet(Kind::kBox, std::move(lower), std::move(upper), 0.0);
}

CompactSet CompactSet::UnitBall(int dim) {
  return Ball(Eigen::VectorXd::Zero(dim), 1.0);
}

Eigen::VectorXd CompactSet::Project(
    const Eigen::Ref<const Eigen::VectorXd>& v) const {
  if (v.size() != a_.size()) throw DimensionError("projection shape mismatch");
  if (kind_ == Kind::kBox) return v.cwiseMax(a_).cwiseMin(b_);
  const Eigen::VectorXd offset = v - a_;
  const double nrm = offset.norm();
  if (nrm <= radius_) return v;
  return a_ + (radius_ / nrm) * offset;
}

bool CompactSet::Contains(const Eigen::Ref<const Eigen::VectorXd>& v,
                          double tol) const {
  if (v.size() != a_.size()) return false;
  if (kind_ == Kind::kBox) {
    return ((v - a_).array() >= -tol).all() && ((b_ - v).array() >= -tol).all();
  }
  return (v - a_).norm() <= radius_ * (1.0 + tol) + tol;
}

double CompactSet::Diameter() const {
  if (kind_ == Kind::kBox) return (b_ - a_).norm();
  return 2.0 * radius_;
}

double CompactSet::MaxNorm() const {
  if (kind_ == Kind::kBox) return a_.cwiseAbs().cwiseMax(b_.cwiseAbs()).norm();
  return a_.norm() + radius_;
}

StrategyProfile ProjectProfile(const StrategySets& sets,
                               const StrategyProfile& x) {
  if (static_cast<int>(sets.size()) != x.num_players()) {
    throw DimensionError("one strategy set per player required");
  }
  StrategyProfile out = x;
  for (int i = 0; i < x.num_players(); ++i) {
    out.player(i) = sets[i].Project(x.player(i));
  }
  return out;
}

// --- CounterfactualPayoff ------------------------------------------------------

CounterfactualPayoff::CounterfactualPayoff(const GameGraph& g, int player)
    : game_(&g), player_(player) {
  for (int k : g.incident_edges(player)) {
    const Edge& e = g.edges()[k];
    Term term;
    if (e.i == player) {
      term.payoff = &e.forward;
      term.opponent = e.j;
    } else {
      term.payoff = &e.backward;
      term.opponent = e.i;
    }
    term.phi_sum = Eigen::VectorXd::Zero(g.dim(term.opponent));
    terms_.push_back(std::move(term));
  }
}

void CounterfactualPayoff::Add(const StrategyProfile& x) {
  game_->CheckShape(x);
  for (Term& term : terms_) {
    const auto v = x.player(term.opponent);
    const RadialSaturation& sat = term.payoff->saturation();
    term.phi_sum += sat.Map(v);
    if (term.payoff->other_weight() != 0.0) {
      term.potential_sum += sat.Potential(v);
    }
  }
  ++count_;
}

double CounterfactualPayoff::Value(
    const Eigen::Ref<const Eigen::VectorXd>& u) const {
  const double n = static_cast<double>(count_);
  double total = 0.0;
  for (const Term& term : terms_) {
    const EdgePayoff& p = *term.payoff;
    const RadialSaturation& sat = p.saturation();
    total += sat.Map(u).dot(p.coupling() * term.phi_sum);
    if (p.own_weight() != 0.0) total -= p.own_weight() * n * sat.Potential(u);
    total += p.other_weight() * term.potential_sum;
  }
  return total;
}

Eigen::VectorXd CounterfactualPayoff::Gradient(
    const Eigen::Ref<const Eigen::VectorXd>& u) const {
  const double n = static_cast<double>(count_);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(u.size());
  for (const Term& term : terms_) {
    const EdgePayoff& p = *term.payoff;
    const RadialSaturation& sat = p.saturation();
    const Eigen::VectorXd w = p.coupling() * term.phi_sum;
    if (sat.active()) {
      grad += sat.Jacobian(u) * w;
    } else {
      grad += w;
    }
    if (p.own_weight() != 0.0) grad -= p.own_weight() * n * sat.Map(u);
  }
  return grad;
}

InnerMaxResult MaximizeCounterfactual(const CounterfactualPayoff& objective,
                                      const CompactSet& set,
                                      const Eigen::VectorXd& warm_start,
                                      const InnerSolverOptions& options) {
  // Work on the per-round average so step sizes and the tolerance do not
  // depend on t.
  const double scale =
      objective.count() > 0 ? 1.0 / static_cast<double>(objective.count()) : 1.0;
  auto f = [&](const Eigen::VectorXd& u) { return scale * objective.Value(u); };
  auto grad = [&](const Eigen::VectorXd& u) {
    return Eigen::VectorXd(scale * objective.Gradient(u));
  };

  InnerMaxResult result;
  Eigen::VectorXd u = set.Project(warm_start);
  double fu = f(u);
  double step = 1.0;
  for (int it = 0; it < options.budget; ++it) {
    result.iterations = it + 1;
    const Eigen::VectorXd g = grad(u);
    // Backtracking on the projected step.
    Eigen::VectorXd next;
    double fnext = 0.0;
    Eigen::VectorXd diff;
    for (int bt = 0; bt < 60; ++bt) {
      next = set.Project(u + step * g);
      diff = next - u;
      fnext = f(next);
      if (fnext >= fu + g.dot(diff) - diff.squaredNorm() / (2.0 * step) -
                       1e-15 * (1.0 + std::abs(fu))) {
        break;
      }
      step *= 0.5;
    }
    const double mapping_norm = diff.norm() / step;
    if (fnext >= fu) {
      u = std::move(next);
      fu = fnext;
    }
    if (mapping_norm <= options.tolerance) {
      result.exact = true;
      break;
    }
    step *= 2.0;
  }
  result.argmax = u;
  result.value = fu / scale;
  return result;
}

// --- RegretLedger --------------------------------------------------------------

RegretLedger::RegretLedger(const GameGraph& g, StrategySets sets)
    : game_(&g), sets_(std::move(sets)), realized_(g.num_players(), 0.0) {
  if (static_cast<int>(sets_.size()) != g.num_players()) {
    throw DimensionError("one strategy set per player required");
  }
  for (int i = 0; i < g.num_players(); ++i) {
    if (sets_[i].dim() != g.dim(i)) {
      throw DimensionError("strategy set dimension mismatch for player " +
                           std::to_string(i));
    }
    counterfactual_.emplace_back(g, i);
  }
}

void RegretLedger::Record(const StrategyProfile& x) {
  const std::vector<double> p = AllPayoffs(*game_, x);
  for (int i = 0; i < game_->num_players(); ++i) {
    realized_[i] += p[i];
    counterfactual_[i].Add(x);
  }
  last_ = x.data();
  ++t_;
}

RegretResult RegretLedger::Regret(int player,
                                  const InnerSolverOptions& options) const {
  game_->CheckPlayer(player);
  if (t_ < 1) throw PreconditionError("regret needs at least one round");
  const Eigen::VectorXd warm =
      last_.segment(game_->offset(player), game_->dim(player));
  const InnerMaxResult best =
      MaximizeCounterfactual(counterfactual_[player], sets_[player], warm,
                             options);
  RegretResult out;
  out.value = best.value - realized_[player];
  out.exact = best.exact;
  out.iterations = best.iterations;
  return out;
}

std::vector<RegretResult> RegretLedger::AllRegrets(
    const InnerSolverOptions& options) const {
  std::vector<RegretResult> out;
  for (int i = 0; i < game_->num_players(); ++i) out.push_back(Regret(i, options));
  return out;
}

RegretResult Regret(const GameGraph& g, const CompactSet& set_i,
                    const std::vector<StrategyProfile>& history, int player,
                    const InnerSolverOptions& options) {
  g.CheckPlayer(player);
  if (history.empty()) throw PreconditionError("regret needs t >= 1");
  CounterfactualPayoff objective(g, player);
  double realized = 0.0;
  for (const StrategyProfile& x : history) {
    objective.Add(x);
    realized += PlayerPayoff(g, x, player);
  }
  const InnerMaxResult best = MaximizeCounterfactual(
      objective, set_i, Eigen::VectorXd(history.back().player(player)), options);
  return RegretResult{best.value - realized, best.exact, best.iterations};
}

ExploitabilityResult Exploitability(const GameGraph& g, const StrategySets& sets,
                                    const StrategyProfile& xbar,
                                    const InnerSolverOptions& options) {
  g.CheckShape(xbar);
  if (static_cast<int>(sets.size()) != g.num_players()) {
    throw DimensionError("one strategy set per player required");
  }
  ExploitabilityResult out;
  out.value = -std::numeric_limits<double>::infinity();
  const std::vector<double> base = AllPayoffs(g, xbar);
  for (int i = 0; i < g.num_players(); ++i) {
    CounterfactualPayoff objective(g, i);
    objective.Add(xbar);
    const InnerMaxResult best = MaximizeCounterfactual(
        objective, sets[i], Eigen::VectorXd(xbar.player(i)), options);
    const double gap = best.value - base[i];
    out.player_gaps.push_back(gap);
    out.value = std::max(out.value, gap);
    out.exact = out.exact && best.exact;
  }
  return out;
}

// --- Self-play -------------------------------------------------------------------

double GradientBound(const GameGraph& g, const StrategySets& sets, int player) {
  double bound = 0.0;
  for (int k : g.incident_edges(player)) {
    const Edge& e = g.edges()[k];
    const bool forward = e.i == player;
    const EdgePayoff& p = forward ? e.forward : e.backward;
    const int opp = forward ? e.j : e.i;
    const RadialSaturation& sat = p.saturation();
    bound += p.own_weight() * sat.MapNormBound(sets[player].MaxNorm()) +
             OperatorNorm(p.coupling()) * sat.MapNormBound(sets[opp].MaxNorm());
  }
  return bound;
}

SelfplayResult ProjectedGaSelfplay(const GameGraph& g, const StrategySets& sets,
                                   std::int64_t horizon, std::uint64_t seed,
                                   const SelfplayOptions& options) {
  if (horizon < 1) throw ConfigError("self-play horizon must be >= 1");
  if (static_cast<int>(sets.size()) != g.num_players()) {
    throw DimensionError("one strategy set per player required");
  }
  double scale;
  if (options.step_scale) {
    scale = *options.step_scale;
  } else {
    double diameter = std::numeric_limits<double>::infinity();
    double grad = 0.0;
    for (int i = 0; i < g.num_players(); ++i) {
      diameter = std::min(diameter, sets[i].Diameter());
      grad = std::max(grad, GradientBound(g, sets, i));
    }
    scale = grad > 0.0 ? diameter / grad : 1.0;
  }

  SelfplayResult result;
  result.schedule = StepSchedule::InverseSqrt(scale);
  result.seed = seed;

  StrategyProfile x;
  if (options.initial) {
    g.CheckShape(*options.initial);
    x = ProjectProfile(sets, *options.initial);
  } else {
    Rng rng = Rng(seed).Split("selfplay-initial");
    x = ProjectProfile(sets,
                       g.MakeProfile(rng.UniformVector(g.total_dim(), -1.0, 1.0)));
  }

  std::vector<std::int64_t> checkpoints = options.checkpoints;
  std::sort(checkpoints.begin(), checkpoints.end());
  auto next_checkpoint = checkpoints.begin();

  RegretLedger ledger(g, sets);
  Eigen::VectorXd running_sum = Eigen::VectorXd::Zero(g.total_dim());
  for (std::int64_t s = 1; s <= horizon; ++s) {
    ledger.Record(x);
    running_sum += x.data();
    if (options.keep_history) result.history.push_back(x);
    while (next_checkpoint != checkpoints.end() && *next_checkpoint == s) {
      SelfplayCheckpoint cp;
      cp.t = s;
      for (const RegretResult& r : ledger.AllRegrets(options.inner)) {
        cp.average_regret.push_back(r.value / static_cast<double>(s));
        cp.exact = cp.exact && r.exact;
      }
      const StrategyProfile avg =
          g.MakeProfile(running_sum / static_cast<double>(s));
      const ExploitabilityResult ex = Exploitability(g, sets, avg, options.inner);
      cp.exploitability = ex.value;
      cp.exact = cp.exact && ex.exact;
      result.checkpoints.push_back(std::move(cp));
      ++next_checkpoint;
    }
    if (s == horizon) break;
    const double eta = result.schedule.At(s);
    const Eigen::VectorXd grad = JointGradient(g, x);
    StrategyProfile next = g.MakeProfile(x.data() + eta * grad);
    x = ProjectProfile(sets, next);
  }
  result.time_average = g.MakeProfile(running_sum / static_cast<double>(horizon));
  return result;
}

}  // namespace nzsg
