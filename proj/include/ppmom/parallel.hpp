#pragma once

#include <cstddef>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ppmom::par {

// Every Monte Carlo loop in the library is written as an indexed map: slot i
// is computed from a generator seeded by i alone and written into out[i].
// The parallel path is therefore bit-identical to the serial one for any
// thread count; the serial path is kept as the reference implementation and
// for the benchmark.

enum class Exec { Serial, Parallel };

void set_threads(int n);
int max_threads();

template <class T, class Item>
std::vector<T> map_indexed(std::size_t n, Item&& item, Exec exec = Exec::Parallel) {
  std::vector<T> out(n);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
      out[static_cast<std::size_t>(i)] = item(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) out[i] = item(i);
  }
  return out;
}

// Neumaier compensated sum in index order; reductions must not depend on the
// worker count, so sums are always taken over the stored per-index values.
double sum_compensated(std::span<const double> v);

}  // namespace ppmom::par
