#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "dptool/types.hpp"

namespace dptool {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Independent substream seed for `index` under a root seed. Parallel and
// serial consumers of the same (root, index) pairs see identical draws.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  return mix64(root + (index + 1) * 0x9e3779b97f4a7c15ULL);
}

// mt19937_64 is fully specified by the standard, so draws are reproducible
// across platforms; conversions below avoid unspecified distribution objects.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

  // Index draw proportional to nonnegative weights; zero-weight cells are
  // never selected. Weights need not be normalized.
  std::size_t categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) throw DomainError("categorical draw over zero total mass");
    double u = uniform() * total;
    double acc = 0.0;
    std::size_t last_positive = weights.size();
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      acc += weights[i];
      last_positive = i;
      if (u < acc) return i;
    }
    return last_positive; // u landed in rounding dust past the last cell
  }

private:
  std::mt19937_64 engine_;
};

} // namespace dptool
