#include "nzsg/spectral.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "nzsg/errors.h"

namespace nzsg {

GameHessian AssembleHessian(const GameGraph& g, const StrategyProfile& x) {
  g.CheckShape(x);
  const int d = g.total_dim();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
  for (const Edge& e : g.edges()) {
    const auto xi = x.player(e.i);
    const auto xj = x.player(e.j);
    const int oi = g.offset(e.i);
    const int oj = g.offset(e.j);
    const int di = g.dim(e.i);
    const int dj = g.dim(e.j);
    h.block(oi, oi, di, di) += e.forward.HessOwnOwn(xi, xj);
    h.block(oi, oj, di, dj) += e.forward.HessOwnOther(xi, xj);
    h.block(oj, oj, dj, dj) += e.backward.HessOwnOwn(xj, xi);
    h.block(oj, oi, dj, di) += e.backward.HessOwnOther(xj, xi);
  }
  return GameHessian{std::move(h), x};
}

AntisymmetryReport CheckHessianAntisymmetry(const GameGraph& g,
                                            const GameHessian& h,
                                            double tolerance) {
  AntisymmetryReport report;
  const Eigen::MatrixXd sym = h.matrix + h.matrix.transpose();
  report.full_max_abs = sym.cwiseAbs().maxCoeff();
  report.scale = h.matrix.cwiseAbs().rowwise().sum().maxCoeff();
  for (int i = 0; i < g.num_players(); ++i) {
    for (int j = 0; j < g.num_players(); ++j) {
      if (i == j) continue;
      const double block_max =
          sym.block(g.offset(i), g.offset(j), g.dim(i), g.dim(j))
              .cwiseAbs()
              .maxCoeff();
      report.max_abs = std::max(report.max_abs, block_max);
    }
  }
  report.passed = report.max_abs <= tolerance * std::max(report.scale, 1e-300);
  if (report.scale == 0.0) report.passed = report.max_abs == 0.0;
  return report;
}

std::string MatrixDump(const Eigen::MatrixXd& m) {
  std::string out;
  char buf[40];
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(r, c));
      if (c > 0) out += ' ';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::vector<Complex> Eigenvalues(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw DimensionError("eigenvalues need a square matrix");
  if (m.rows() == 0) return {};
  if (!m.allFinite()) {
    throw SolverError("matrix has non-finite entries", MatrixDump(m));
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw SolverError("dense eigensolver did not converge", MatrixDump(m));
  }
  const Eigen::VectorXcd ev = solver.eigenvalues();
  return std::vector<Complex>(ev.data(), ev.data() + ev.size());
}

double EigenvectorCondition(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) {
    throw SolverError("dense eigensolver did not converge", MatrixDump(m));
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(solver.eigenvectors());
  const Eigen::VectorXd sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

std::vector<Complex> OgaRootsForGaEigenvalue(Complex mu) {
  // z^2 - (2 mu - 1) z + (mu - 1) = 0
  const Complex b = -(2.0 * mu - 1.0);
  const Complex c = mu - 1.0;
  const Complex disc = std::sqrt(b * b - 4.0 * c);
  // Pick the numerically stable pairing.
  const Complex q =
      -0.5 * (b + (std::real(std::conj(b) * disc) >= 0.0 ? disc : -disc));
  if (std::abs(q) == 0.0) return {Complex(0.0, 0.0), Complex(0.0, 0.0)};
  return {q, c / q};
}

std::vector<Complex> OgaJacobianSpectrum(const GameHessian& h, double eta) {
  if (!(eta > 0.0)) throw ConfigError("eta must be > 0");
  const std::vector<Complex> lambdas = Eigenvalues(h.matrix);
  std::vector<Complex> out;
  out.reserve(2 * lambdas.size());
  for (const Complex& lam : lambdas) {
    for (const Complex& z : OgaRootsForGaEigenvalue(1.0 + eta * lam)) {
      out.push_back(z);
    }
  }
  return out;
}

Eigen::MatrixXd AugmentedOgaJacobian(const GameHessian& h, double eta) {
  const Eigen::Index d = h.matrix.rows();
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * d, 2 * d);
  j.topLeftCorner(d, d) = 2.0 * eta * h.matrix;
  j.topLeftCorner(d, d).diagonal().array() += 1.0;
  j.topRightCorner(d, d) = -eta * h.matrix;
  j.bottomLeftCorner(d, d).setIdentity();
  return j;
}

double MultisetDistance(std::vector<Complex> a, std::vector<Complex> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (const Complex& z : a) {
    std::size_t best = b.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (used[k]) continue;
      const double dist = std::abs(z - b[k]);
      if (dist < best_dist) {
        best_dist = dist;
        best = k;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_dist);
  }
  return worst;
}

SpectralReport Spectrum(const GameHessian& h, double eta, double nonzero_tol) {
  if (!(eta > 0.0)) throw ConfigError("eta must be > 0");
  SpectralReport report;
  report.eta = eta;
  report.eigenvalues = Eigenvalues(h.matrix);
  for (const Complex& lam : report.eigenvalues) {
    report.rho = std::max(report.rho, std::abs(lam));
    report.max_abs_real_part =
        std::max(report.max_abs_real_part, std::abs(lam.real()));
  }
  report.omega = std::numeric_limits<double>::infinity();
  for (const Complex& lam : report.eigenvalues) {
    const double mod = std::abs(lam);
    if (mod > nonzero_tol * report.rho && mod > 0.0) {
      report.has_nonzero = true;
      report.omega = std::min(report.omega, mod);
    }
  }
  if (!report.has_nonzero) {
    report.omega = 0.0;
    report.note = "no nonzero eigenvalues";
  }
  for (const Complex& lam : report.eigenvalues) {
    report.ga_jacobian_spectrum.push_back(1.0 + eta * lam);
    for (const Complex& z : OgaRootsForGaEigenvalue(1.0 + eta * lam)) {
      report.oga_jacobian_spectrum.push_back(z);
    }
  }
  report.eigenvector_condition = EigenvectorCondition(h.matrix);
  return report;
}

SchurReport SchurDeterminantCheck(const Eigen::MatrixXd& m1,
                                  const Eigen::MatrixXd& m2,
                                  const Eigen::MatrixXd& m3,
                                  const Eigen::MatrixXd& m4, double max_cond) {
  if (m1.rows() != m1.cols() || m4.rows() != m4.cols() ||
      m2.rows() != m1.rows() || m2.cols() != m4.cols() ||
      m3.rows() != m4.rows() || m3.cols() != m1.cols()) {
    throw DimensionError("Schur blocks have inconsistent shapes");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m4);
  const Eigen::VectorXd sv = svd.singularValues();
  const double smin = sv.size() ? sv(sv.size() - 1) : 1.0;
  if (sv.size() && (!(smin > 0.0) || sv(0) / smin > max_cond)) {
    throw PreconditionError("M4 is numerically singular");
  }
  const Eigen::Index a = m1.rows();
  const Eigen::Index b = m4.rows();
  Eigen::MatrixXd full(a + b, a + b);
  full << m1, m2, m3, m4;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu4(m4);
  const Eigen::MatrixXd schur = m1 - m2 * lu4.solve(m3);
  SchurReport report;
  report.det_direct = full.partialPivLu().determinant();
  report.det_schur = (a ? schur.partialPivLu().determinant() : 1.0) *
                     (b ? lu4.determinant() : 1.0);
  const double scale = std::max(
      {std::abs(report.det_direct), std::abs(report.det_schur), 1e-300});
  report.gap = std::abs(report.det_direct - report.det_schur) / scale;
  return report;
}

Eigen::MatrixXd NullSpaceBasis(const Eigen::MatrixXd& h, double null_tol) {
  const Eigen::Index d = h.cols();
  if (d == 0) return Eigen::MatrixXd(0, 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(h, Eigen::ComputeFullV);
  const Eigen::VectorXd sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  Eigen::Index rank = 0;
  if (smax > 0.0) {
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
      if (sv(k) > null_tol * smax) ++rank;
    }
  }
  return svd.matrixV().rightCols(d - rank);
}

NashSet LinearNashSet(const GameHessian& h, double null_tol) {
  StrategyProfile zero(h.point.dims());
  return NashSet(std::move(zero), NullSpaceBasis(h.matrix, null_tol));
}

double NashSetDistanceLinear(const GameHessian& h, const StrategyProfile& x,
                             double null_tol) {
  return std::sqrt(LinearNashSet(h, null_tol).DistanceSq(x));
}

// --- Rates -------------------------------------------------------------------

std::string_view RateTheoremName(RateTheorem theorem) {
  switch (theorem) {
    case RateTheorem::kGaLinearDivergence:
      return "ga-linear-divergence";
    case RateTheorem::kOgaLinear:
      return "oga-linear";
    case RateTheorem::kGaSmoothStrongly:
      return "ga-smooth-strongly-concave";
    case RateTheorem::kOgaSmoothStrongly:
      return "oga-smooth-strongly-concave";
    case RateTheorem::kGaLipschitz:
      return "ga-lipschitz-strongly-concave";
    case RateTheorem::kOgaLipschitz:
      return "oga-lipschitz-strongly-concave";
  }
  return "unknown";
}

RateInputs RateInputsFrom(const GameGraph& g, const SpectralReport& report) {
  RateInputs in;
  in.n = g.num_players();
  if (g.moduli().alpha > 0.0) in.alpha = g.moduli().alpha;
  in.beta = g.moduli().beta;
  in.lipschitz = g.moduli().lipschitz;
  if (report.has_nonzero) in.omega = report.omega;
  if (report.rho > 0.0) in.rho = report.rho;
  in.eta = report.eta;
  return in;
}

namespace {

template <typename T>
const T& Require(const std::optional<T>& v, const char* name) {
  if (!v) throw ConfigError(std::string("missing constant: ") + name);
  return *v;
}

}  // namespace

RatePrediction PredictRates(RateTheorem theorem, const RateInputs& in,
                            std::int64_t horizon) {
  if (horizon < 0) throw ConfigError("horizon must be >= 0");
  RatePrediction out{theorem, std::nullopt, std::nullopt, {}, false};
  out.bound.resize(horizon + 1);
  switch (theorem) {
    case RateTheorem::kGaLinearDivergence: {
      const double eta = Require(in.eta, "eta");
      const double omega = Require(in.omega, "omega");
      const double big_r = Require(in.radius, "R");
      const double factor = 1.0 + eta * eta * omega * omega;
      out.per_step_factor = factor;
      out.is_lower_bound = true;
      for (std::int64_t t = 0; t <= horizon; ++t) {
        out.bound[t] = std::pow(factor, static_cast<double>(t)) * big_r * big_r;
      }
      break;
    }
    case RateTheorem::kOgaLinear: {
      const double omega = Require(in.omega, "omega");
      const double rho = Require(in.rho, "rho");
      const double ratio = omega / rho;
      const double factor =
          0.5 + 0.5 * std::sqrt(std::max(0.0, 1.0 - ratio * ratio));
      out.prescribed_eta = 1.0 / (2.0 * rho);
      out.per_step_factor = factor;
      if (!in.radius) {
        out.bound.clear();
        break;
      }
      const double r2 = *in.radius * *in.radius;
      out.bound[0] = r2;
      for (std::int64_t k = 1; k <= horizon; ++k) {
        out.bound[k] = std::pow(factor, static_cast<double>(k - 1)) * r2;
      }
      break;
    }
    case RateTheorem::kGaSmoothStrongly: {
      const double n = Require(in.n, "n");
      const double alpha = Require(in.alpha, "alpha");
      const double beta = Require(in.beta, "beta");
      out.prescribed_eta = alpha / (2.0 * n * beta * beta);
      const double factor = 1.0 - alpha * alpha / (4.0 * n * beta * beta);
      out.per_step_factor = factor;
      if (!in.radius) {
        out.bound.clear();
        break;
      }
      const double base = n * *in.radius * *in.radius;
      for (std::int64_t t = 0; t <= horizon; ++t) {
        out.bound[t] = std::pow(factor, static_cast<double>(t)) * base;
      }
      break;
    }
    case RateTheorem::kOgaSmoothStrongly: {
      const double n = Require(in.n, "n");
      const double alpha = Require(in.alpha, "alpha");
      const double beta = Require(in.beta, "beta");
      out.prescribed_eta = 1.0 / (2.0 * n * beta);
      const double factor = 1.0 - alpha / (4.0 * n * beta);
      out.per_step_factor = factor;
      if (!in.radius) {
        out.bound.clear();
        break;
      }
      const double base = (n + 1.0) * 2.0 * *in.radius * *in.radius;
      out.bound[0] = base;
      for (std::int64_t k = 1; k <= horizon; ++k) {
        out.bound[k] = std::pow(factor, static_cast<double>(k - 1)) * base;
      }
      break;
    }
    case RateTheorem::kGaLipschitz:
    case RateTheorem::kOgaLipschitz: {
      const double n = Require(in.n, "n");
      const double alpha = Require(in.alpha, "alpha");
      const double lip = Require(in.lipschitz, "L");
      const double r = Require(in.radius, "r");
      const StepSchedule& sched = Require(in.schedule, "schedule");
      const bool oga = theorem == RateTheorem::kOgaLipschitz;
      double sum = 0.0;
      double prod = 1.0;
      out.bound[0] = n * r * r;
      for (std::int64_t s = 1; s <= horizon; ++s) {
        const double eta = sched.At(s);
        const double eta_prev = sched.At(s - 1);
        if (oga) {
          sum += eta * eta_prev;
          prod *= 1.0 - (eta + eta_prev) * alpha;
          out.bound[s] = 4.0 * n * lip * lip * sum + n * r * r * prod;
        } else {
          sum += eta * eta;
          prod *= 1.0 - eta * alpha;
          out.bound[s] = lip * lip * n * sum + n * r * r * prod;
        }
      }
      break;
    }
  }
  return out;
}

}  // namespace nzsg
