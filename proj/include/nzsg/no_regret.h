#ifndef NZSG_NO_REGRET_H_
#define NZSG_NO_REGRET_H_

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "nzsg/dynamics.h"
#include "nzsg/game.h"

namespace nzsg {

// Compact convex strategy set for one player: a Euclidean ball or a box.
class CompactSet {
 public:
  enum class Kind { kBall, kBox };

  static CompactSet Ball(Eigen::VectorXd center, double radius);
  static CompactSet Box(Eigen::VectorXd lower, Eigen::VectorXd upper);
  static CompactSet UnitBall(int dim);

  Kind kind() const { return kind_; }
  int dim() const { return static_cast<int>(a_.size()); }

  Eigen::VectorXd Project(const Eigen::Ref<const Eigen::VectorXd>& v) const;
  bool Contains(const Eigen::Ref<const Eigen::VectorXd>& v,
                double tol = 1e-12) const;
  double Diameter() const;
  // sup |u| over the set.
  double MaxNorm() const;

 private:
  CompactSet(Kind kind, Eigen::VectorXd a, Eigen::VectorXd b, double radius);

  Kind kind_;
  Eigen::VectorXd a_;  // center (ball) or lower corner (box)
  Eigen::VectorXd b_;  // upper corner (box)
  double radius_ = 0.0;
};

using StrategySets = std::vector<CompactSet>;

StrategyProfile ProjectProfile(const StrategySets& sets,
                               const StrategyProfile& x);

struct InnerSolverOptions {
  int budget = 500;
  double tolerance = 1e-7;
};

// max over the set of an objective, computed by projected gradient ascent
// with backtracking. `exact` means the gradient-mapping norm fell below
// tolerance; otherwise `value` is only a lower bound on the maximum.
struct InnerMaxResult {
  double value = 0.0;
  Eigen::VectorXd argmax;
  int iterations = 0;
  bool exact = false;
};

// Running sums of opponents' play that make sum_s p_i(u, x^s_{-i}) an O(1)
// evaluation for the separable payoffs of this library.
class CounterfactualPayoff {
 public:
  CounterfactualPayoff(const GameGraph& g, int player);

  void Add(const StrategyProfile& x);
  std::int64_t count() const { return count_; }

  // sum_s p_i(u, x^s_{-i}).
  double Value(const Eigen::Ref<const Eigen::VectorXd>& u) const;
  Eigen::VectorXd Gradient(const Eigen::Ref<const Eigen::VectorXd>& u) const;

 private:
  struct Term {
    const EdgePayoff* payoff;  // payoff of `player` on this edge
    int opponent;
    Eigen::VectorXd phi_sum;    // sum_s phi(x_opp^s)
    double potential_sum = 0.0;  // sum_s h(x_opp^s)
  };
  const GameGraph* game_;
  int player_;
  std::vector<Term> terms_;
  std::int64_t count_ = 0;
};

InnerMaxResult MaximizeCounterfactual(const CounterfactualPayoff& objective,
                                      const CompactSet& set,
                                      const Eigen::VectorXd& warm_start,
                                      const InnerSolverOptions& options = {});

struct RegretResult {
  double value = 0.0;  // certified lower bound on r_i(t)
  bool exact = false;
  int iterations = 0;
};

// Per-player cumulative counterfactual and realized payoffs.
class RegretLedger {
 public:
  RegretLedger(const GameGraph& g, StrategySets sets);

  void Record(const StrategyProfile& x);
  std::int64_t t() const { return t_; }
  double realized(int player) const { return realized_[player]; }

  RegretResult Regret(int player, const InnerSolverOptions& options = {}) const;
  std::vector<RegretResult> AllRegrets(
      const InnerSolverOptions& options = {}) const;

 private:
  const GameGraph* game_;
  StrategySets sets_;
  std::vector<CounterfactualPayoff> counterfactual_;
  std::vector<double> realized_;
  Eigen::VectorXd last_;
  std::int64_t t_ = 0;
};

// r_i(t) = max_{x_i in X_i} sum_s [p_i(x_i, x^s_{-i}) - p_i(x^s)].
RegretResult Regret(const GameGraph& g, const CompactSet& set_i,
                    const std::vector<StrategyProfile>& history, int player,
                    const InnerSolverOptions& options = {});

struct ExploitabilityResult {
  double value = 0.0;  // max_i gap_i
  std::vector<double> player_gaps;
  bool exact = true;
};

// max_i max_{x_i} [p_i(x_i, xbar_{-i}) - p_i(xbar)].
ExploitabilityResult Exploitability(const GameGraph& g, const StrategySets& sets,
                                    const StrategyProfile& xbar,
                                    const InnerSolverOptions& options = {});

struct SelfplayCheckpoint {
  std::int64_t t = 0;
  std::vector<double> average_regret;  // r_i(t)/t
  double exploitability = 0.0;         // of the time average at t
  bool exact = true;
};

struct SelfplayResult {
  std::vector<StrategyProfile> history;  // x^1 .. x^T (if kept)
  StrategyProfile time_average;
  std::vector<SelfplayCheckpoint> checkpoints;
  StepSchedule schedule = StepSchedule::Constant(0.0);
  std::uint64_t seed = 0;
};

struct SelfplayOptions {
  // eta_s = step_scale / sqrt(s); nullopt selects diameter / G where G bounds
  // every player's gradient over the sets.
  std::optional<double> step_scale;
  std::vector<std::int64_t> checkpoints;
  bool keep_history = false;
  // x^1; nullopt draws uniform [-1, 1] coordinates and projects.
  std::optional<StrategyProfile> initial;
  InnerSolverOptions inner;
};

// Gradient-norm bound for player i over the product of the sets.
double GradientBound(const GameGraph& g, const StrategySets& sets, int player);

// Projected online gradient ascent self-play:
// x^{s+1} = P(x^s + eta_s grad p(x^s)).
SelfplayResult ProjectedGaSelfplay(const GameGraph& g, const StrategySets& sets,
                                   std::int64_t horizon, std::uint64_t seed,
                                   const SelfplayOptions& options = {});

}  // namespace nzsg

#endif  // NZSG_NO_REGRET_H_
