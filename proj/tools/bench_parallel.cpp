// Timing comparison between the OpenMP kernels and the serial reference
// path, and a bit-identity check between the two.

#include <chrono>
#include <cstdio>
#include <vector>

#include "ppmom/moments.hpp"
#include "ppmom/parallel.hpp"
#include "ppmom/process.hpp"
#include "ppmom/rng.hpp"
#include "ppmom/ustat.hpp"

using namespace ppmom;

namespace {

double now() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <class F>
double time_it(F&& f) {
  const double t0 = now();
  f();
  return now() - t0;
}

}  // namespace

int main() {
  Domain dom;
  dom.dim = 2;
  dom.mark_bound = 0.5;
  IntensityMeasure ref;
  ref.rho = 30;
  dom.kind = ParticleKind::Segment;

  const UStatistic crossings = ustat_segment_crossings();
  const std::size_t n_nodes = 400000;

  auto node = [&](std::size_t i) {
    Rng rng(derive_seed(42, "bench", i));
    Particle y[2] = {ref.sample_mark(dom, rng), ref.sample_mark(dom, rng)};
    return crossings.kernel({y, 2});
  };

  std::vector<double> serial_vals, parallel_vals;
  const double t_serial =
      time_it([&] { serial_vals = par::map_indexed<double>(n_nodes, node, par::Exec::Serial); });
  const double t_parallel =
      time_it([&] { parallel_vals = par::map_indexed<double>(n_nodes, node, par::Exec::Parallel); });

  std::printf("pair-kernel Monte Carlo, %zu nodes\n", n_nodes);
  std::printf("  serial reference: %8.3f s\n", t_serial);
  std::printf("  openmp (%d thr):  %8.3f s   speedup %.2fx\n", par::max_threads(), t_parallel,
              t_serial / t_parallel);
  std::printf("  bit-identical:    %s\n", serial_vals == parallel_vals ? "yes" : "NO");

  // replicate-level workload: Poisson draws and full statistic evaluation
  const std::size_t n_rep = 3000;
  auto replicate = [&](std::size_t i) {
    Rng rng(derive_seed(42, "benchrep", i));
    const Configuration eta = sample_poisson_scaled(ref, dom, 4.0, rng);
    return eval_ustat(crossings, eta);
  };
  std::vector<double> sr, pr;
  const double t2s = time_it([&] { sr = par::map_indexed<double>(n_rep, replicate, par::Exec::Serial); });
  const double t2p = time_it([&] { pr = par::map_indexed<double>(n_rep, replicate, par::Exec::Parallel); });
  std::printf("replicate evaluation, %zu replicates\n", n_rep);
  std::printf("  serial reference: %8.3f s\n", t2s);
  std::printf("  openmp (%d thr):  %8.3f s   speedup %.2fx\n", par::max_threads(), t2p, t2s / t2p);
  std::printf("  bit-identical:    %s\n", sr == pr ? "yes" : "NO");
  return (serial_vals == parallel_vals && sr == pr) ? 0 : 1;
}
