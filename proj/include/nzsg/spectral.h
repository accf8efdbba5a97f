#ifndef NZSG_SPECTRAL_H_
#define NZSG_SPECTRAL_H_

// Game Hessian, its spectrum, GA/OGA Jacobian spectra, and the rate bounds
// that follow from them.

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nzsg/dynamics.h"
#include "nzsg/game.h"

namespace nzsg {

using Complex = std::complex<double>;

inline constexpr double kNonzeroTolerance = 1e-8;
inline constexpr double kNullTolerance = 1e-9;

// Block (i, j) holds d(grad_{x_i} p_i)/d x_j, i.e. H is the Jacobian of the
// joint own-gradient map. For linear games grad p(x) = H x.
struct GameHessian {
  Eigen::MatrixXd matrix;
  StrategyProfile point;
};

GameHessian AssembleHessian(const GameGraph& g, const StrategyProfile& x);

// Off-diagonal blocks satisfy H_ji = -H_ij^T in every NZSG; the diagonal
// blocks carry own curvature (zero for linear games).
struct AntisymmetryReport {
  double max_abs = 0.0;  // max |H_ij + H_ji^T| over off-diagonal blocks
  double scale = 0.0;    // |H|_inf
  double full_max_abs = 0.0;  // max |H + H^T| including diagonal blocks
  bool passed = true;
};

AntisymmetryReport CheckHessianAntisymmetry(const GameGraph& g,
                                            const GameHessian& h,
                                            double tolerance = 1e-9);

struct SpectralReport {
  double eta = 0.0;
  std::vector<Complex> eigenvalues;
  bool has_nonzero = false;
  double omega = 0.0;  // smallest modulus above nonzero_tol * rho; 0 if none
  double rho = 0.0;
  double max_abs_real_part = 0.0;
  std::vector<Complex> ga_jacobian_spectrum;   // 1 + eta * lambda
  std::vector<Complex> oga_jacobian_spectrum;  // 2d values
  // cond_2 of the eigenvector matrix; +inf when it is numerically singular.
  double eigenvector_condition = 0.0;
  std::string note;
};

// General dense eigenvalues of a real matrix. Throws SolverError (with a
// plain-text dump of `m`) if the QR iteration does not converge.
std::vector<Complex> Eigenvalues(const Eigen::MatrixXd& m);

double EigenvectorCondition(const Eigen::MatrixXd& m);

SpectralReport Spectrum(const GameHessian& h, double eta,
                        double nonzero_tol = kNonzeroTolerance);

// For every mu = 1 + eta * lambda, the two roots of
// z^2 - (2 mu - 1) z + (mu - 1) = 0.
std::vector<Complex> OgaJacobianSpectrum(const GameHessian& h, double eta);
std::vector<Complex> OgaRootsForGaEigenvalue(Complex mu);

// [[I + 2 eta H, -eta H], [I, 0]] acting on (x^t, x^{t-1}).
Eigen::MatrixXd AugmentedOgaJacobian(const GameHessian& h, double eta);

// Largest distance from an element of `a` to its matched partner in `b`
// (greedy nearest matching). +inf if the sizes differ.
double MultisetDistance(std::vector<Complex> a, std::vector<Complex> b);

struct SchurReport {
  double det_direct = 0.0;
  double det_schur = 0.0;
  double gap = 0.0;  // relative
};

// det [[M1, M2], [M3, M4]] directly and as det(M1 - M2 M4^-1 M3) det(M4).
// Throws PreconditionError if M4 is numerically singular (cond > max_cond).
SchurReport SchurDeterminantCheck(const Eigen::MatrixXd& m1,
                                  const Eigen::MatrixXd& m2,
                                  const Eigen::MatrixXd& m3,
                                  const Eigen::MatrixXd& m4,
                                  double max_cond = 1e12);

// Orthonormal basis of ker H by SVD, dropping singular values above
// null_tol * sigma_max.
Eigen::MatrixXd NullSpaceBasis(const Eigen::MatrixXd& h,
                               double null_tol = kNullTolerance);
double NashSetDistanceLinear(const GameHessian& h, const StrategyProfile& x,
                             double null_tol = kNullTolerance);
// Nash set of a linear game as {x : H x = 0}.
NashSet LinearNashSet(const GameHessian& h, double null_tol = kNullTolerance);

// --- Theorem rate predictions -------------------------------------------------

enum class RateTheorem {
  kGaLinearDivergence,   // d^2 >= (1 + eta^2 omega^2)^t R^2
  kOgaLinear,            // d(x^{t+1})^2 <= (1/2 + sqrt(1 - (omega/rho)^2)/2)^t r^2
  kGaSmoothStrongly,     // sum |x_i - x_i*|^2 <= (1 - alpha^2/(4 n beta^2))^t n r^2
  kOgaSmoothStrongly,    // <= (1 - alpha/(4 n beta))^t (n + 1) 2 r^2 at t + 1
  kGaLipschitz,          // L^2 n sum eta_s^2 + n r^2 prod (1 - eta_s alpha)
  kOgaLipschitz,         // 4 n L^2 sum eta_s eta_{s-1} + n r^2 prod(...)
};

std::string_view RateTheoremName(RateTheorem theorem);

struct RateInputs {
  std::optional<int> n;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> lipschitz;
  std::optional<double> omega;
  std::optional<double> rho;
  // Initial distance: R (lower bound, divergence) or r (per-player bound
  // for the smooth/Lipschitz theorems, total bound for OGA linear).
  std::optional<double> radius;
  // Step size for the divergence theorem, schedule for the Lipschitz ones.
  std::optional<double> eta;
  std::optional<StepSchedule> schedule;
};

// Inputs from a game's certified moduli and a spectral report.
RateInputs RateInputsFrom(const GameGraph& g, const SpectralReport& report);

struct RatePrediction {
  RateTheorem theorem;
  // Step size the theorem prescribes (nullopt when it takes any schedule).
  std::optional<double> prescribed_eta;
  // Per-step factor on the squared distance (nullopt for Lipschitz bounds).
  std::optional<double> per_step_factor;
  // bound[t] bounds the squared distance of iterate x^t, t = 0..horizon.
  // For the divergence theorem it is a lower bound.
  std::vector<double> bound;
  bool is_lower_bound = false;
};

// Throws ConfigError naming the first missing constant.
RatePrediction PredictRates(RateTheorem theorem, const RateInputs& inputs,
                            std::int64_t horizon);

// Plain-text grid (one row per line, %.17g) used for solver forensics.
std::string MatrixDump(const Eigen::MatrixXd& m);

}  // namespace nzsg

#endif  // NZSG_SPECTRAL_H_
