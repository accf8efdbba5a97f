#include "nzsg/game.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>

#include <Eigen/SVD>

#include "nzsg/errors.h"
#include "nzsg/rng.h"

namespace nzsg {

std::string_view PayoffKindName(PayoffKind kind) {
  switch (kind) {
    case PayoffKind::kBilinear:
      return "bilinear";
    case PayoffKind::kQuadraticSC:
      return "quadratic-sc";
    case PayoffKind::kLipschitzSC:
      return "lipschitz-sc";
  }
  return "unknown";
}

PayoffKind ParsePayoffKind(std::string_view name) {
  if (name == "bilinear" || name == "linear") return PayoffKind::kBilinear;
  if (name == "quadratic-sc") return PayoffKind::kQuadraticSC;
  if (name == "lipschitz-sc") return PayoffKind::kLipschitzSC;
  throw ConfigError("unknown payoff family '" + std::string(name) + "'");
}

double OperatorNorm(const MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<MatrixXd> svd(m);
  return svd.singularValues()(0);
}

// --- RadialSaturation --------------------------------------------------------

namespace {

// Radial profile g(r) = R + R tanh((r - R)/R) and the derived quantities used
// by the saturation map, valid for r > R.
struct RadialTerms {
  double s;        // g(r)/r
  double t;        // s'(r)/r
  double t_prime;  // d t / d r
};

RadialTerms ComputeRadialTerms(double r, double radius) {
  const double z = (r - radius) / radius;
  const double th = std::tanh(z);
  const double sech2 = 1.0 - th * th;
  const double g = radius + radius * th;
  const double g1 = sech2;
  const double g2 = -(2.0 / radius) * th * sech2;
  const double numer = g1 * r - g;
  RadialTerms out;
  out.s = g / r;
  out.t = numer / (r * r * r);
  out.t_prime = (g2 * r * r - 3.0 * numer) / (r * r * r * r);
  return out;
}

double LogCosh(double z) {
  const double a = std::abs(z);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

}  // namespace

RadialSaturation::RadialSaturation(double radius)
    : radius_(radius), active_(std::isfinite(radius)) {
  if (!(radius > 0.0)) {
    throw ConstructionError("clip radius must be positive");
  }
}

VectorXd RadialSaturation::Map(const Eigen::Ref<const VectorXd>& u) const {
  if (!active_) return u;
  const double r = u.norm();
  if (r <= radius_) return u;
  return ComputeRadialTerms(r, radius_).s * u;
}

MatrixXd RadialSaturation::Jacobian(const Eigen::Ref<const VectorXd>& u) const {
  const Eigen::Index n = u.size();
  if (!active_) return MatrixXd::Identity(n, n);
  const double r = u.norm();
  if (r <= radius_) return MatrixXd::Identity(n, n);
  const RadialTerms rt = ComputeRadialTerms(r, radius_);
  MatrixXd jac = rt.t * (u * u.transpose());
  jac.diagonal().array() += rt.s;
  return jac;
}

double RadialSaturation::Potential(const Eigen::Ref<const VectorXd>& u) const {
  const double r = u.norm();
  if (!active_ || r <= radius_) return 0.5 * r * r;
  const double z = (r - radius_) / radius_;
  return 0.5 * radius_ * radius_ + radius_ * (r - radius_) +
         radius_ * radius_ * LogCosh(z);
}

MatrixXd RadialSaturation::ContractedHessian(
    const Eigen::Ref<const VectorXd>& u,
    const Eigen::Ref<const VectorXd>& w) const {
  const Eigen::Index n = u.size();
  if (!active_) return MatrixXd::Zero(n, n);
  const double r = u.norm();
  if (r <= radius_) return MatrixXd::Zero(n, n);
  const RadialTerms rt = ComputeRadialTerms(r, radius_);
  const double uw = u.dot(w);
  MatrixXd hess = rt.t * (u * w.transpose() + w * u.transpose()) +
                  (rt.t_prime / r) * uw * (u * u.transpose());
  hess.diagonal().array() += rt.t * uw;
  return hess;
}

double RadialSaturation::MapNormBound(double norm_bound) const {
  if (!active_ || norm_bound <= radius_) return norm_bound;
  return radius_ + radius_ * std::tanh((norm_bound - radius_) / radius_);
}

// --- EdgePayoff --------------------------------------------------------------

EdgePayoff::EdgePayoff(MatrixXd coupling, double own_weight,
                       double other_weight, double clip_radius)
    : coupling_(std::move(coupling)),
      own_weight_(own_weight),
      other_weight_(other_weight),
      saturation_(clip_radius) {}

EdgePayoff EdgePayoff::Bilinear(MatrixXd coupling) {
  return EdgePayoff(std::move(coupling), 0.0, 0.0);
}

EdgePayoff EdgePayoff::Quadratic(MatrixXd coupling) {
  return EdgePayoff(std::move(coupling), 1.0, 1.0);
}

EdgePayoff EdgePayoff::Clipped(MatrixXd coupling, double clip_radius) {
  return EdgePayoff(std::move(coupling), 1.0, 1.0, clip_radius);
}

EdgePayoff EdgePayoff::Mirrored() const {
  return EdgePayoff(-coupling_.transpose(), other_weight_, own_weight_,
                    saturation_.radius());
}

EdgePayoff EdgePayoff::Scaled(double factor) const {
  return EdgePayoff(factor * coupling_, factor * own_weight_,
                    factor * other_weight_, saturation_.radius());
}

double EdgePayoff::Value(const Eigen::Ref<const VectorXd>& own,
                         const Eigen::Ref<const VectorXd>& other) const {
  double cross;
  if (saturation_.active()) {
    cross = saturation_.Map(own).dot(coupling_ * saturation_.Map(other));
  } else {
    cross = own.dot(coupling_ * other);
  }
  double value = cross;
  if (own_weight_ != 0.0) value -= own_weight_ * saturation_.Potential(own);
  if (other_weight_ != 0.0) value += other_weight_ * saturation_.Potential(other);
  return value;
}

VectorXd EdgePayoff::GradOwn(const Eigen::Ref<const VectorXd>& own,
                             const Eigen::Ref<const VectorXd>& other) const {
  if (!saturation_.active()) {
    VectorXd grad = coupling_ * other;
    if (own_weight_ != 0.0) grad.noalias() -= own_weight_ * own;
    return grad;
  }
  VectorXd grad = saturation_.Jacobian(own) *
                  (coupling_ * saturation_.Map(other));
  if (own_weight_ != 0.0) grad -= own_weight_ * saturation_.Map(own);
  return grad;
}

VectorXd EdgePayoff::GradOther(const Eigen::Ref<const VectorXd>& own,
                               const Eigen::Ref<const VectorXd>& other) const {
  if (!saturation_.active()) {
    VectorXd grad = coupling_.transpose() * own;
    if (other_weight_ != 0.0) grad.noalias() += other_weight_ * other;
    return grad;
  }
  VectorXd grad = saturation_.Jacobian(other) *
                  (coupling_.transpose() * saturation_.Map(own));
  if (other_weight_ != 0.0) grad += other_weight_ * saturation_.Map(other);
  return grad;
}

MatrixXd EdgePayoff::HessOwnOwn(const Eigen::Ref<const VectorXd>& own,
                                const Eigen::Ref<const VectorXd>& other) const {
  const MatrixXd jac = saturation_.Jacobian(own);
  MatrixXd hess = -own_weight_ * jac;
  if (saturation_.active()) {
    hess += saturation_.ContractedHessian(own,
                                          coupling_ * saturation_.Map(other));
  }
  return hess;
}

MatrixXd EdgePayoff::HessOwnOther(const Eigen::Ref<const VectorXd>& own,
                                  const Eigen::Ref<const VectorXd>& other) const {
  if (!saturation_.active()) return coupling_;
  return saturation_.Jacobian(own) * coupling_ * saturation_.Jacobian(other);
}

MatrixXd EdgePayoff::HessOtherOwn(const Eigen::Ref<const VectorXd>& own,
                                  const Eigen::Ref<const VectorXd>& other) const {
  return HessOwnOther(own, other).transpose();
}

MatrixXd EdgePayoff::HessOtherOther(
    const Eigen::Ref<const VectorXd>& own,
    const Eigen::Ref<const VectorXd>& other) const {
  MatrixXd hess = other_weight_ * saturation_.Jacobian(other);
  if (saturation_.active()) {
    hess += saturation_.ContractedHessian(
        other, coupling_.transpose() * saturation_.Map(own));
  }
  return hess;
}

// --- StrategyProfile ---------------------------------------------------------

namespace {

std::vector<int> OffsetsOf(const std::vector<int>& dims) {
  std::vector<int> offsets(dims.size());
  int acc = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    offsets[k] = acc;
    acc += dims[k];
  }
  return offsets;
}

int SumOf(const std::vector<int>& dims) {
  int acc = 0;
  for (int d : dims) acc += d;
  return acc;
}

}  // namespace

StrategyProfile::StrategyProfile(std::vector<int> dims)
    : dims_(std::move(dims)),
      offsets_(OffsetsOf(dims_)),
      data_(VectorXd::Zero(SumOf(dims_))) {}

StrategyProfile::StrategyProfile(std::vector<int> dims, VectorXd data)
    : dims_(std::move(dims)), offsets_(OffsetsOf(dims_)), data_(std::move(data)) {
  if (data_.size() != SumOf(dims_)) {
    throw DimensionError("profile data has length " +
                         std::to_string(data_.size()) + ", dims sum to " +
                         std::to_string(SumOf(dims_)));
  }
}

int StrategyProfile::dim(int player) const {
  if (player < 0 || player >= num_players()) {
    throw PlayerIndexError("player " + std::to_string(player) +
                           " out of range");
  }
  return dims_[player];
}

int StrategyProfile::offset(int player) const {
  dim(player);
  return offsets_[player];
}

Eigen::VectorBlock<const VectorXd> StrategyProfile::player(int i) const {
  return data_.segment(offset(i), dims_[i]);
}

Eigen::VectorBlock<VectorXd> StrategyProfile::player(int i) {
  return data_.segment(offset(i), dims_[i]);
}

StrategyProfile StrategyProfile::WithPlayer(
    int i, const Eigen::Ref<const VectorXd>& xi) const {
  if (xi.size() != dim(i)) {
    throw DimensionError("replacement slice has wrong length");
  }
  StrategyProfile out = *this;
  out.player(i) = xi;
  return out;
}

// --- GameGraph ---------------------------------------------------------------

GameGraph::GameGraph(std::vector<int> dims, std::vector<Edge> edges,
                     PayoffKind family, Moduli moduli)
    : dims_(std::move(dims)),
      offsets_(OffsetsOf(dims_)),
      total_dim_(SumOf(dims_)),
      edges_(std::move(edges)),
      incident_(dims_.size()),
      family_(family),
      moduli_(moduli) {
  if (dims_.size() < 2) throw ConstructionError("a game needs >= 2 players");
  for (int d : dims_) {
    if (d < 1) throw ConstructionError("player dimensions must be >= 1");
  }
  std::set<std::pair<int, int>> seen;
  const int n = num_players();
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const Edge& e = edges_[k];
    if (e.i < 0 || e.i >= n || e.j < 0 || e.j >= n) {
      throw ConstructionError("edge endpoint out of range");
    }
    if (e.i == e.j) throw ConstructionError("self-loop on player " +
                                            std::to_string(e.i));
    const auto key = std::minmax(e.i, e.j);
    if (!seen.insert(key).second) {
      throw ConstructionError("duplicate edge [" + std::to_string(key.first) +
                              "," + std::to_string(key.second) + "]");
    }
    if (e.forward.own_dim() != dims_[e.i] ||
        e.forward.other_dim() != dims_[e.j] ||
        e.backward.own_dim() != dims_[e.j] ||
        e.backward.other_dim() != dims_[e.i]) {
      throw ConstructionError("coupling shape does not match player dims on "
                              "edge [" + std::to_string(e.i) + "," +
                              std::to_string(e.j) + "]");
    }
    incident_[e.i].push_back(static_cast<int>(k));
    incident_[e.j].push_back(static_cast<int>(k));
  }
}

GameGraph GameGraph::Pairwise(std::vector<int> dims,
                              std::vector<PairwiseEdge> edges,
                              PayoffKind family, Moduli moduli) {
  std::vector<Edge> full;
  full.reserve(edges.size());
  for (auto& e : edges) {
    EdgePayoff back = e.payoff.Mirrored();
    full.push_back(Edge{e.i, e.j, std::move(e.payoff), std::move(back)});
  }
  return GameGraph(std::move(dims), std::move(full), family, moduli);
}

GameGraph GameGraph::General(std::vector<int> dims, std::vector<Edge> edges,
                             PayoffKind family, Moduli moduli,
                             ZeroSumGate gate) {
  GameGraph g(std::move(dims), std::move(edges), family, moduli);
  if (gate == ZeroSumGate::kEnforce) {
    const ZeroSumReport report = CheckZeroSum(g, 64, 0x5eedULL);
    if (!report.passed) {
      std::ostringstream os;
      os << "game is not zero-sum: max |sum p_i| = " << report.max_abs_sum;
      throw ConstructionError(os.str());
    }
  }
  return g;
}

int GameGraph::dim(int player) const {
  CheckPlayer(player);
  return dims_[player];
}

int GameGraph::offset(int player) const {
  CheckPlayer(player);
  return offsets_[player];
}

const std::vector<int>& GameGraph::incident_edges(int player) const {
  CheckPlayer(player);
  return incident_[player];
}

void GameGraph::CheckPlayer(int player) const {
  if (player < 0 || player >= num_players()) {
    throw PlayerIndexError("player " + std::to_string(player) +
                           " out of range for a " +
                           std::to_string(num_players()) + "-player game");
  }
}

void GameGraph::CheckShape(const StrategyProfile& x) const {
  if (x.dims() != dims_) {
    throw DimensionError("strategy profile shape does not match the game");
  }
}

StrategyProfile GameGraph::MakeProfile(VectorXd data) const {
  if (data.size() != total_dim_) {
    throw DimensionError("profile length " + std::to_string(data.size()) +
                         " != game dimension " + std::to_string(total_dim_));
  }
  return StrategyProfile(dims_, std::move(data));
}

// --- Evaluation --------------------------------------------------------------

double PlayerPayoff(const GameGraph& g, const StrategyProfile& x, int player) {
  g.CheckShape(x);
  double total = 0.0;
  for (int k : g.incident_edges(player)) {
    const Edge& e = g.edges()[k];
    if (e.i == player) {
      total += e.forward.Value(x.player(e.i), x.player(e.j));
    } else {
      total += e.backward.Value(x.player(e.j), x.player(e.i));
    }
  }
  return total;
}

VectorXd PlayerGradient(const GameGraph& g, const StrategyProfile& x,
                        int player) {
  g.CheckShape(x);
  VectorXd grad = VectorXd::Zero(g.dim(player));
  for (int k : g.incident_edges(player)) {
    const Edge& e = g.edges()[k];
    if (e.i == player) {
      grad += e.forward.GradOwn(x.player(e.i), x.player(e.j));
    } else {
      grad += e.backward.GradOwn(x.player(e.j), x.player(e.i));
    }
  }
  return grad;
}

VectorXd JointGradient(const GameGraph& g, const StrategyProfile& x) {
  g.CheckShape(x);
  VectorXd grad = VectorXd::Zero(g.total_dim());
  for (const Edge& e : g.edges()) {
    const auto xi = x.player(e.i);
    const auto xj = x.player(e.j);
    grad.segment(g.offset(e.i), g.dim(e.i)) += e.forward.GradOwn(xi, xj);
    grad.segment(g.offset(e.j), g.dim(e.j)) += e.backward.GradOwn(xj, xi);
  }
  return grad;
}

std::vector<double> AllPayoffs(const GameGraph& g, const StrategyProfile& x) {
  g.CheckShape(x);
  std::vector<double> out(g.num_players(), 0.0);
  for (const Edge& e : g.edges()) {
    const auto xi = x.player(e.i);
    const auto xj = x.player(e.j);
    out[e.i] += e.forward.Value(xi, xj);
    out[e.j] += e.backward.Value(xj, xi);
  }
  return out;
}

// --- Checks ------------------------------------------------------------------

ZeroSumReport CheckZeroSum(const GameGraph& g, int samples, std::uint64_t seed,
                           double box, double tolerance) {
  if (samples < 1) throw ConfigError("CheckZeroSum needs samples >= 1");
  Rng rng(seed);
  ZeroSumReport report;
  report.samples = samples;
  report.tolerance = tolerance;
  for (int s = 0; s < samples; ++s) {
    const StrategyProfile x =
        g.MakeProfile(rng.UniformVector(g.total_dim(), -box, box));
    const std::vector<double> p = AllPayoffs(g, x);
    double sum = 0.0;
    double biggest = 0.0;
    for (double v : p) {
      sum += v;
      biggest = std::max(biggest, std::abs(v));
    }
    report.max_abs_sum = std::max(report.max_abs_sum, std::abs(sum));
    report.max_relative =
        std::max(report.max_relative, std::abs(sum) / (1.0 + biggest));
  }
  report.passed = report.max_relative <= tolerance;
  return report;
}

PayoffSumIdentityReport CheckPayoffSumIdentity(const GameGraph& g,
                                               const StrategyProfile& x,
                                               const StrategyProfile& x_star,
                                               double tolerance) {
  g.CheckShape(x);
  g.CheckShape(x_star);
  PayoffSumIdentityReport report;
  double biggest = 0.0;
  for (int i = 0; i < g.num_players(); ++i) {
    const double a = PlayerPayoff(g, x_star.WithPlayer(i, x.player(i)), i);
    const double b = PlayerPayoff(g, x.WithPlayer(i, x_star.player(i)), i);
    report.lhs += a;
    report.rhs -= b;
    biggest = std::max({biggest, std::abs(a), std::abs(b)});
  }
  report.gap = std::abs(report.lhs - report.rhs);
  report.scale = 1.0 + biggest;
  report.passed = report.gap <= tolerance * report.scale;
  return report;
}

CertificateReport CheckGradientConsistency(const GameGraph& g, int samples,
                                           std::uint64_t seed, double h,
                                           double tolerance, double box) {
  Rng rng(seed);
  CertificateReport report;
  report.name = "gradient-consistency";
  report.samples = samples;
  for (int s = 0; s < samples; ++s) {
    const StrategyProfile x =
        g.MakeProfile(rng.UniformVector(g.total_dim(), -box, box));
    for (int i = 0; i < g.num_players(); ++i) {
      const VectorXd analytic = PlayerGradient(g, x, i);
      VectorXd numeric(analytic.size());
      for (int k = 0; k < g.dim(i); ++k) {
        StrategyProfile plus = x;
        StrategyProfile minus = x;
        plus.player(i)[k] += h;
        minus.player(i)[k] -= h;
        numeric[k] =
            (PlayerPayoff(g, plus, i) - PlayerPayoff(g, minus, i)) / (2.0 * h);
      }
      const double err = (analytic - numeric).norm() /
                         std::max(1.0, analytic.norm());
      report.worst = std::max(report.worst, err - tolerance);
    }
  }
  report.passed = report.worst <= 0.0;
  return report;
}

CertificateReport CheckStrongConcavity(const GameGraph& g, int samples,
                                       std::uint64_t seed, double tolerance) {
  Rng rng(seed);
  CertificateReport report;
  report.name = "strong-concavity";
  report.samples = samples;
  const double alpha = g.moduli().alpha;
  std::ostringstream detail;
  detail << "alpha=" << alpha;
  report.detail = detail.str();
  if (alpha <= 0.0) {
    report.applicable = false;
    report.detail += " (not strongly concave)";
  }
  // Clipped payoffs are strongly concave only inside the clipping ball; keep
  // every slice inside it.
  double clip = std::numeric_limits<double>::infinity();
  for (const Edge& e : g.edges()) {
    clip = std::min(clip, e.forward.saturation().radius());
  }
  report.worst = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    VectorXd data = rng.UniformVector(g.total_dim(), -1.0, 1.0);
    StrategyProfile x = g.MakeProfile(std::move(data));
    const int i = static_cast<int>(rng.NextU64() % g.num_players());
    VectorXd xi_alt = rng.UniformVector(g.dim(i), -1.0, 1.0);
    if (std::isfinite(clip)) {
      for (int p = 0; p < g.num_players(); ++p) {
        const double nrm = x.player(p).norm();
        if (nrm > 0.95 * clip) x.player(p) *= 0.95 * clip / nrm;
      }
      if (xi_alt.norm() > 0.95 * clip) xi_alt *= 0.95 * clip / xi_alt.norm();
    }
    const double base = PlayerPayoff(g, x, i);
    const VectorXd grad = PlayerGradient(g, x, i);
    const VectorXd diff = xi_alt - VectorXd(x.player(i));
    const double rhs = base + grad.dot(diff) - 0.5 * alpha * diff.squaredNorm();
    const double lhs = PlayerPayoff(g, x.WithPlayer(i, xi_alt), i);
    const double scale = 1.0 + std::abs(base) + std::abs(lhs);
    report.worst = std::max(report.worst, (lhs - rhs) / scale);
  }
  report.passed = !report.applicable || report.worst <= tolerance;
  return report;
}

CertificateReport CheckLipschitzBound(const GameGraph& g, int samples,
                                      std::uint64_t seed, double far_factor) {
  Rng rng(seed);
  CertificateReport report;
  report.name = "lipschitz-bound";
  report.samples = samples;
  if (!g.moduli().lipschitz) {
    report.applicable = false;
    report.detail = "no Lipschitz constant declared";
    return report;
  }
  const double bound = *g.moduli().lipschitz;
  double clip = std::numeric_limits<double>::infinity();
  for (const Edge& e : g.edges()) {
    clip = std::min(clip, e.forward.saturation().radius());
  }
  const double reach = std::isfinite(clip) ? far_factor * clip : far_factor;
  std::ostringstream detail;
  detail << "L=" << bound;
  report.detail = detail.str();
  report.worst = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    // Log-uniform radius per player so both the interior and far exterior
    // get coverage.
    VectorXd data(g.total_dim());
    for (int p = 0; p < g.num_players(); ++p) {
      VectorXd dir(g.dim(p));
      for (int k = 0; k < g.dim(p); ++k) dir[k] = rng.Normal();
      if (dir.norm() == 0.0) dir.setOnes();
      const double radius =
          std::exp(rng.Uniform(std::log(1e-3), std::log(reach)));
      data.segment(g.offset(p), g.dim(p)) = radius * dir.normalized();
    }
    const StrategyProfile x = g.MakeProfile(std::move(data));
    for (int i = 0; i < g.num_players(); ++i) {
      report.worst =
          std::max(report.worst, PlayerGradient(g, x, i).norm() - bound);
    }
  }
  report.passed = report.worst <= 0.0;
  return report;
}

CertificateReport CheckSmoothness(const GameGraph& g, int samples,
                                  std::uint64_t seed, double box) {
  Rng rng(seed);
  CertificateReport report;
  report.name = "smoothness";
  report.samples = samples;
  if (!g.moduli().beta) {
    report.applicable = false;
    report.detail = "no smoothness constant declared";
    return report;
  }
  const double beta = *g.moduli().beta;
  std::ostringstream detail;
  detail << "beta=" << beta;
  report.detail = detail.str();
  report.worst = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    for (const Edge& e : g.edges()) {
      for (const EdgePayoff* p : {&e.forward, &e.backward}) {
        const VectorXd u = rng.UniformVector(p->own_dim(), -box, box);
        const VectorXd u2 = rng.UniformVector(p->own_dim(), -box, box);
        const VectorXd v = rng.UniformVector(p->other_dim(), -box, box);
        const VectorXd v2 = rng.UniformVector(p->other_dim(), -box, box);
        const double own_ratio =
            (p->GradOwn(u, v) - p->GradOwn(u2, v)).norm() - beta * (u - u2).norm();
        const double other_ratio = (p->GradOwn(u, v) - p->GradOwn(u, v2)).norm() -
                                   beta * (v - v2).norm();
        report.worst = std::max({report.worst, own_ratio, other_ratio});
      }
    }
  }
  report.passed = report.worst <= 1e-9 * (1.0 + beta);
  return report;
}

// --- Constructors ------------------------------------------------------------

Moduli CertifyModuli(PayoffKind family, const std::vector<int>& dims,
                     const std::vector<GameGraph::PairwiseEdge>& edges) {
  const int n = static_cast<int>(dims.size());
  std::vector<double> own_curvature(n, 0.0);
  std::vector<double> grad_bound(n, 0.0);
  double beta = 0.0;
  for (const auto& e : edges) {
    const EdgePayoff back = e.payoff.Mirrored();
    const double cnorm = OperatorNorm(e.payoff.coupling());
    own_curvature[e.i] += e.payoff.own_weight();
    own_curvature[e.j] += back.own_weight();
    beta = std::max({beta, cnorm, e.payoff.own_weight(), back.own_weight()});
    const double two_r = 2.0 * e.payoff.saturation().radius();
    grad_bound[e.i] += two_r * (e.payoff.own_weight() + cnorm);
    grad_bound[e.j] += two_r * (back.own_weight() + cnorm);
  }
  Moduli m;
  m.alpha = n > 0 ? *std::min_element(own_curvature.begin(), own_curvature.end())
                  : 0.0;
  switch (family) {
    case PayoffKind::kBilinear:
      m.alpha = 0.0;
      m.beta = beta;
      break;
    case PayoffKind::kQuadraticSC:
      m.beta = beta;
      break;
    case PayoffKind::kLipschitzSC:
      m.lipschitz = *std::max_element(grad_bound.begin(), grad_bound.end());
      break;
  }
  return m;
}

GameGraph MakeGameFromCouplings(
    PayoffKind family, const std::vector<int>& dims,
    const std::vector<GameGraph::PairwiseEdge>& couplings, double clip_radius) {
  std::vector<GameGraph::PairwiseEdge> edges;
  edges.reserve(couplings.size());
  for (const auto& c : couplings) {
    const MatrixXd& C = c.payoff.coupling();
    switch (family) {
      case PayoffKind::kBilinear:
        edges.push_back({c.i, c.j, EdgePayoff::Bilinear(C)});
        break;
      case PayoffKind::kQuadraticSC:
        edges.push_back({c.i, c.j, EdgePayoff::Quadratic(C)});
        break;
      case PayoffKind::kLipschitzSC:
        if (!std::isfinite(clip_radius)) {
          throw ConstructionError("lipschitz-sc games need a finite clip radius");
        }
        edges.push_back({c.i, c.j, EdgePayoff::Clipped(C, clip_radius)});
        break;
    }
  }
  const Moduli moduli = CertifyModuli(family, dims, edges);
  return GameGraph::Pairwise(dims, std::move(edges), family, moduli);
}

namespace {

std::vector<GameGraph::PairwiseEdge> SampleCompleteCouplings(
    int n, const std::vector<int>& dims, std::uint64_t seed,
    SamplingBounds bounds) {
  if (n < 2) throw ConstructionError("n must be >= 2");
  if (static_cast<int>(dims.size()) != n) {
    throw ConstructionError("dims must list one dimension per player");
  }
  for (int d : dims) {
    if (d < 1) throw ConstructionError("player dimensions must be >= 1");
  }
  if (!(bounds.low <= bounds.high)) {
    throw ConstructionError("sampling bounds must satisfy low <= high");
  }
  Rng rng = Rng(seed).Split("couplings");
  std::vector<GameGraph::PairwiseEdge> out;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      out.push_back(
          {i, j,
           EdgePayoff::Bilinear(
               rng.UniformMatrix(dims[i], dims[j], bounds.low, bounds.high))});
    }
  }
  return out;
}

}  // namespace

GameGraph MakeLinearGame(int n, const std::vector<int>& dims,
                         std::uint64_t seed, SamplingBounds bounds) {
  return MakeGameFromCouplings(PayoffKind::kBilinear, dims,
                               SampleCompleteCouplings(n, dims, seed, bounds));
}

GameGraph MakeQuadraticScGame(int n, const std::vector<int>& dims,
                              std::uint64_t seed, SamplingBounds bounds) {
  return MakeGameFromCouplings(PayoffKind::kQuadraticSC, dims,
                               SampleCompleteCouplings(n, dims, seed, bounds));
}

GameGraph MakeLipschitzScGame(int n, const std::vector<int>& dims,
                              std::uint64_t seed, double clip_radius,
                              SamplingBounds bounds) {
  if (!(clip_radius > 0.0) || !std::isfinite(clip_radius)) {
    throw ConstructionError("clip radius must be positive and finite");
  }
  return MakeGameFromCouplings(PayoffKind::kLipschitzSC, dims,
                               SampleCompleteCouplings(n, dims, seed, bounds),
                               clip_radius);
}

}  // namespace nzsg
