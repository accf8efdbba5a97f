#ifndef NZSG_GAME_H_
#define NZSG_GAME_H_

// Network zero-sum games: players on a graph, one two-person game per edge,
// each player using a single strategy x_i in R^{d_i} across all its edges.
//
// Every edge payoff in this library has the separable form
//
//   p(u, v) = -a h(u) + phi(u)^T C phi(v) + b h(v)
//
// where phi is the radial saturation map of RadialSaturation and h is its
// potential (grad h = phi). With no clipping phi(u) = u and h(u) = |u|^2/2,
// which covers the bilinear (a = b = 0) and quadratic (a = b = 1) families.
// The reverse payoff of a pairwise zero-sum edge is again of this form, with
// C -> -C^T and a <-> b.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace nzsg {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class PayoffKind { kBilinear, kQuadraticSC, kLipschitzSC };

std::string_view PayoffKindName(PayoffKind kind);
// Accepts "bilinear", "quadratic-sc", "lipschitz-sc". Throws ConfigError.
PayoffKind ParsePayoffKind(std::string_view name);

inline constexpr double kZeroSumTolerance = 1e-9;

// phi(u) = u for |u| <= R, and u/|u| * g(|u|) outside, with
// g(r) = R + R tanh((r - R)/R). phi is C^1, |phi| < 2R and |D phi| <= 1.
// R = +inf disables saturation.
class RadialSaturation {
 public:
  explicit RadialSaturation(
      double radius = std::numeric_limits<double>::infinity());

  bool active() const { return active_; }
  double radius() const { return radius_; }

  VectorXd Map(const Eigen::Ref<const VectorXd>& u) const;
  // D phi(u); symmetric.
  MatrixXd Jacobian(const Eigen::Ref<const VectorXd>& u) const;
  // h(u) with grad h = phi.
  double Potential(const Eigen::Ref<const VectorXd>& u) const;
  // Hessian in u of phi(u)^T w for fixed w.
  MatrixXd ContractedHessian(const Eigen::Ref<const VectorXd>& u,
                             const Eigen::Ref<const VectorXd>& w) const;
  // Supremum of |phi(u)| over |u| <= norm_bound.
  double MapNormBound(double norm_bound) const;

 private:
  double radius_;
  bool active_;
};

// One directed edge payoff p_ij(x_i, x_j). "Own" is x_i, "other" is x_j.
class EdgePayoff {
 public:
  EdgePayoff(MatrixXd coupling, double own_weight, double other_weight,
             double clip_radius = std::numeric_limits<double>::infinity());

  static EdgePayoff Bilinear(MatrixXd coupling);
  static EdgePayoff Quadratic(MatrixXd coupling);
  static EdgePayoff Clipped(MatrixXd coupling, double clip_radius);

  // The payoff q(v, u) = -p(u, v).
  EdgePayoff Mirrored() const;
  EdgePayoff Scaled(double factor) const;

  Eigen::Index own_dim() const { return coupling_.rows(); }
  Eigen::Index other_dim() const { return coupling_.cols(); }
  const MatrixXd& coupling() const { return coupling_; }
  double own_weight() const { return own_weight_; }
  double other_weight() const { return other_weight_; }
  const RadialSaturation& saturation() const { return saturation_; }

  double Value(const Eigen::Ref<const VectorXd>& own,
               const Eigen::Ref<const VectorXd>& other) const;
  VectorXd GradOwn(const Eigen::Ref<const VectorXd>& own,
                   const Eigen::Ref<const VectorXd>& other) const;
  VectorXd GradOther(const Eigen::Ref<const VectorXd>& own,
                     const Eigen::Ref<const VectorXd>& other) const;
  // Second-derivative blocks. HessOwnOther(k, l) = d^2 p / d own_k d other_l.
  MatrixXd HessOwnOwn(const Eigen::Ref<const VectorXd>& own,
                      const Eigen::Ref<const VectorXd>& other) const;
  MatrixXd HessOwnOther(const Eigen::Ref<const VectorXd>& own,
                        const Eigen::Ref<const VectorXd>& other) const;
  MatrixXd HessOtherOwn(const Eigen::Ref<const VectorXd>& own,
                        const Eigen::Ref<const VectorXd>& other) const;
  MatrixXd HessOtherOther(const Eigen::Ref<const VectorXd>& own,
                          const Eigen::Ref<const VectorXd>& other) const;

 private:
  MatrixXd coupling_;
  double own_weight_;
  double other_weight_;
  RadialSaturation saturation_;
};

// Strong concavity alpha (of p_i in x_i), per-edge smoothness beta, and the
// global bound L on |grad_i p_i|. Absent constants are not certified.
struct Moduli {
  double alpha = 0.0;
  std::optional<double> beta;
  std::optional<double> lipschitz;
};

// Joint strategy x = (x_1, ..., x_n) stored contiguously.
class StrategyProfile {
 public:
  StrategyProfile() = default;
  explicit StrategyProfile(std::vector<int> dims);
  StrategyProfile(std::vector<int> dims, VectorXd data);

  int num_players() const { return static_cast<int>(dims_.size()); }
  int dim(int player) const;
  int offset(int player) const;
  Eigen::Index size() const { return data_.size(); }
  const std::vector<int>& dims() const { return dims_; }

  const VectorXd& data() const { return data_; }
  VectorXd& data() { return data_; }

  Eigen::VectorBlock<const VectorXd> player(int i) const;
  Eigen::VectorBlock<VectorXd> player(int i);

  // Same profile with player i's slice replaced.
  StrategyProfile WithPlayer(int i, const Eigen::Ref<const VectorXd>& xi) const;

 private:
  std::vector<int> dims_;
  std::vector<int> offsets_;
  VectorXd data_;
};

struct Edge {
  int i = 0;
  int j = 0;
  EdgePayoff forward;   // p_ij(x_i, x_j)
  EdgePayoff backward;  // p_ji(x_j, x_i)
};

// Immutable after construction.
class GameGraph {
 public:
  enum class ZeroSumGate { kEnforce, kSkip };

  // Pairwise zero-sum by construction: the backward payoff of every edge is
  // the mirror of the forward one. `coupling` lists (i, j, p_ij).
  struct PairwiseEdge {
    int i;
    int j;
    EdgePayoff payoff;
  };
  static GameGraph Pairwise(std::vector<int> dims,
                            std::vector<PairwiseEdge> edges, PayoffKind family,
                            Moduli moduli);

  // Arbitrary two-person games per edge. With kEnforce the global zero-sum
  // property is sampled (CheckZeroSum with 64 profiles) and a violation throws
  // ConstructionError; kSkip leaves that to the caller (fault injection,
  // `validate`).
  static GameGraph General(std::vector<int> dims, std::vector<Edge> edges,
                           PayoffKind family, Moduli moduli,
                           ZeroSumGate gate = ZeroSumGate::kEnforce);

  int num_players() const { return static_cast<int>(dims_.size()); }
  const std::vector<int>& dims() const { return dims_; }
  int dim(int player) const;
  int offset(int player) const;
  int total_dim() const { return total_dim_; }
  const std::vector<Edge>& edges() const { return edges_; }
  // Indices into edges() incident to `player`.
  const std::vector<int>& incident_edges(int player) const;
  PayoffKind family() const { return family_; }
  const Moduli& moduli() const { return moduli_; }

  StrategyProfile ZeroProfile() const { return StrategyProfile(dims_); }
  StrategyProfile MakeProfile(VectorXd data) const;
  // Throws DimensionError unless x has this game's shape.
  void CheckShape(const StrategyProfile& x) const;
  void CheckPlayer(int player) const;

 private:
  GameGraph(std::vector<int> dims, std::vector<Edge> edges, PayoffKind family,
            Moduli moduli);

  std::vector<int> dims_;
  std::vector<int> offsets_;
  int total_dim_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> incident_;
  PayoffKind family_;
  Moduli moduli_;
};

// p_i(x) = sum over incident edges of p_ij(x_i, x_j).
double PlayerPayoff(const GameGraph& g, const StrategyProfile& x, int player);
// grad_{x_i} p_i(x).
VectorXd PlayerGradient(const GameGraph& g, const StrategyProfile& x,
                        int player);
// All players' own gradients stacked in profile layout.
VectorXd JointGradient(const GameGraph& g, const StrategyProfile& x);
std::vector<double> AllPayoffs(const GameGraph& g, const StrategyProfile& x);

// --- Structural checks -----------------------------------------------------

struct ZeroSumReport {
  int samples = 0;
  double max_abs_sum = 0.0;
  // max over samples of |sum_i p_i| / (1 + max_i |p_i|)
  double max_relative = 0.0;
  double tolerance = kZeroSumTolerance;
  bool passed = true;
};

// Profiles are drawn i.i.d. uniform on [-box, box]^d.
ZeroSumReport CheckZeroSum(const GameGraph& g, int samples, std::uint64_t seed,
                           double box = 1.0,
                           double tolerance = kZeroSumTolerance);

struct PayoffSumIdentityReport {
  double lhs = 0.0;  // sum_i p_i(x_i, x*_{-i})
  double rhs = 0.0;  // -sum_i p_i(x*_i, x_{-i})
  double gap = 0.0;
  double scale = 1.0;
  bool passed = true;
};

PayoffSumIdentityReport CheckPayoffSumIdentity(
    const GameGraph& g, const StrategyProfile& x, const StrategyProfile& x_star,
    double tolerance = kZeroSumTolerance);

struct CertificateReport {
  std::string name;
  int samples = 0;
  double worst = 0.0;  // worst observed violation (<= 0 means satisfied)
  bool passed = true;
  bool applicable = true;
  std::string detail;
};

// Central differences with step `h` against analytic own-gradients.
CertificateReport CheckGradientConsistency(const GameGraph& g, int samples,
                                           std::uint64_t seed,
                                           double h = 1e-5,
                                           double tolerance = 1e-6,
                                           double box = 1.0);

// p_i(x'_i, x_-i) <= p_i(x) + <grad_i p_i, x'_i - x_i> - alpha/2 |x_i - x'_i|^2
// with alpha from g.moduli(). For clipped payoffs points are drawn inside the
// clipping ball, where the declared alpha applies.
CertificateReport CheckStrongConcavity(const GameGraph& g, int samples,
                                       std::uint64_t seed,
                                       double tolerance = 1e-9);

// |grad_i p_i(x)| <= L, sampled at radii up to far_factor * clip radius.
CertificateReport CheckLipschitzBound(const GameGraph& g, int samples,
                                      std::uint64_t seed,
                                      double far_factor = 100.0);

// Per-edge smoothness in both arguments against the declared beta, inside
// the unit-scaled sampling box.
CertificateReport CheckSmoothness(const GameGraph& g, int samples,
                                  std::uint64_t seed, double box = 1.0);

// --- Constructors ------------------------------------------------------------

struct SamplingBounds {
  double low = 0.0;
  double high = 1.0;
};

// Complete graph, C_ij i.i.d. uniform on [low, high], p_ij = x_i^T C_ij x_j.
GameGraph MakeLinearGame(int n, const std::vector<int>& dims,
                         std::uint64_t seed, SamplingBounds bounds = {});
// Complete graph with p_ij = -|x_i|^2/2 + x_i^T C_ij x_j + |x_j|^2/2.
GameGraph MakeQuadraticScGame(int n, const std::vector<int>& dims,
                              std::uint64_t seed, SamplingBounds bounds = {});
// Quadratic game with phi-saturated terms outside |x_i| <= clip_radius.
GameGraph MakeLipschitzScGame(int n, const std::vector<int>& dims,
                              std::uint64_t seed, double clip_radius,
                              SamplingBounds bounds = {});

// Same families from explicit couplings for i < j, listed in (0,1), (0,2), ...
// order. Moduli are certified from the matrices.
GameGraph MakeGameFromCouplings(PayoffKind family, const std::vector<int>& dims,
                                const std::vector<GameGraph::PairwiseEdge>& couplings,
                                double clip_radius =
                                    std::numeric_limits<double>::infinity());

// Certified moduli for a pairwise game of the given family: alpha is the
// smallest summed own curvature, beta = max over edges of max(|C|_2, a), and
// for clipped games L = max_i sum_j 2R (a + |C_ij|_2).
Moduli CertifyModuli(PayoffKind family, const std::vector<int>& dims,
                     const std::vector<GameGraph::PairwiseEdge>& edges);

// Spectral norm.
double OperatorNorm(const MatrixXd& m);

}  // namespace nzsg

#endif  // NZSG_GAME_H_
