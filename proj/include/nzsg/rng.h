#ifndef NZSG_RNG_H_
#define NZSG_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Core>

namespace nzsg {

// Seedable, splittable generator. All stochastic operations take one of these
// (or a raw seed) explicitly. Streams derived with Split() are independent of
// the order in which they are requested, so concurrent trials reproduce
// bit-identically.
//
// Doubles are produced from the top 53 bits of mt19937_64 output rather than
// through std::uniform_real_distribution, whose algorithm is
// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  // Child generator for a named stream; `index` distinguishes e.g. trials.
  Rng Split(std::string_view stream, std::uint64_t index = 0) const;

  std::uint64_t NextU64() { return engine_(); }

  // Uniform on [lo, hi).
  double Uniform(double lo, double hi);

  Eigen::VectorXd UniformVector(Eigen::Index size, double lo, double hi);

  // Filled row by row.
  Eigen::MatrixXd UniformMatrix(Eigen::Index rows, Eigen::Index cols,
                                double lo, double hi);

  // Standard normal via Box-Muller on the 53-bit uniforms.
  double Normal();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer; used for seed derivation.
std::uint64_t MixSeed(std::uint64_t x);

// 64-bit FNV-1a, used for stream names and config hashes.
std::uint64_t Fnv1a64(std::string_view bytes);

}  // namespace nzsg

#endif  // NZSG_RNG_H_
