#include "ppmom/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace ppmom {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void fnv1a_bytes(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                          std::uint64_t index) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  fnv1a_bytes(h, &master, sizeof master);
  fnv1a_bytes(h, label.data(), label.size());
  fnv1a_bytes(h, &index, sizeof index);
  return splitmix64(h);
}

double Rng::normal() {
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  return u * std::sqrt(-2.0 * std::log(s) / s);
}

long Rng::poisson_small(double mean) {
  if (mean <= 0.0) return 0;
  const double u = uniform();
  double p = std::exp(-mean);
  double cum = p;
  long k = 0;
  while (u > cum) {
    ++k;
    p *= mean / static_cast<double>(k);
    cum += p;
    if (k > 100000) break;  // cum has saturated numerically
  }
  return k;
}

long Rng::poisson(double mean) {
  if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be >= 0");
  long total = 0;
  while (mean > 400.0) {
    total += poisson_small(400.0);
    mean -= 400.0;
  }
  return total + poisson_small(mean);
}

}  // namespace ppmom
