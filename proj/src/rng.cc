#include "nzsg/rng.h"

#include <cmath>
#include <numbers>

namespace nzsg {

std::uint64_t MixSeed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t Fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(MixSeed(seed)) {}

Rng Rng::Split(std::string_view stream, std::uint64_t index) const {
  const std::uint64_t derived =
      MixSeed(seed_ ^ MixSeed(Fnv1a64(stream)) ^ MixSeed(index + 1));
  return Rng(derived);
}

double Rng::Uniform(double lo, double hi) {
  const double unit =
      static_cast<double>(engine_() >> 11) * 0x1.0p-53;  // [0, 1)
  return lo + (hi - lo) * unit;
}

Eigen::VectorXd Rng::UniformVector(Eigen::Index size, double lo, double hi) {
  Eigen::VectorXd v(size);
  for (Eigen::Index k = 0; k < size; ++k) v[k] = Uniform(lo, hi);
  return v;
}

Eigen::MatrixXd Rng::UniformMatrix(Eigen::Index rows, Eigen::Index cols,
                                   double lo, double hi) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = Uniform(lo, hi);
  }
  return m;
}

double Rng::Normal() {
  double u1 = Uniform(0.0, 1.0);
  while (u1 <= 0.0) u1 = Uniform(0.0, 1.0);
  const double u2 = Uniform(0.0, 1.0);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace nzsg
