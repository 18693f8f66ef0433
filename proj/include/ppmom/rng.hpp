#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ppmom {

// Deterministic stream derivation: independent generators are obtained by
// hashing (master seed, stream label, stream index). Every estimator seeds
// its nodes/replicates through this, which is what makes results invariant
// under the number of workers.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                          std::uint64_t index = 0);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // uniform on [0, 1)
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // uniform integer in [0, n), n > 0
  std::uint64_t uniform_index(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(gen_()) * n) >> 64);
  }

  // standard normal (Marsaglia polar, second value discarded)
  double normal();

  // exact Poisson sample by sequential inversion; large means are split into
  // chunks so exp(-mean) stays representable
  long poisson(double mean);

 private:
  long poisson_small(double mean);
  std::mt19937_64 gen_;
};

}  // namespace ppmom
