#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ppmom/estimate.hpp"
#include "ppmom/process.hpp"

namespace ppmom {

using Kernel = std::function<double(std::span<const Particle>)>;
using Functional = std::function<double(const Configuration&)>;

// U-statistic of order k: the sum of a symmetric kernel over ordered
// k-tuples of distinct particles.
struct UStatistic {
  int order = 1;
  Kernel kernel;
  std::string name;
};

// Wraps `h` into the average over all argument permutations.
Kernel symmetrize(int order, Kernel h);

// `symmetric = false` symmetrizes the kernel before storing it.
UStatistic make_ustat(std::string name, int order, Kernel k, bool symmetric = true);

double eval_ustat(const UStatistic& F, const Configuration& x);

// n-th difference of an arbitrary functional via the alternating subset sum;
// this is the reference route the closed forms are tested against
double difference_functional(const Functional& F, const Configuration& x,
                             std::span<const Particle> points);

// closed form for U-statistics, n <= k only
double difference_ustat_closed(const UStatistic& F, const Configuration& x,
                               std::span<const Particle> points);

// Monte Carlo estimate of the chaos kernel T_n F at the given points:
// k!/(k-n)! times the integral of f(points, .) over lambda^(k-n).
// Exact for n = k (empty integral) and n > k (zero).
MomentEstimate kernel_Tn(const UStatistic& F, int n, std::span<const Particle> points,
                         const IntensityMeasure& m, const Domain& dom, long n_samples,
                         std::uint64_t seed);

// built-in kernels
UStatistic ustat_count();
UStatistic ustat_count_in_box(Vec3 lo, Vec3 hi);
UStatistic ustat_close_pairs(double range);
UStatistic ustat_segment_length();
UStatistic ustat_segment_crossings();
UStatistic ustat_plate_area();
UStatistic ustat_plate_chords();
UStatistic ustat_plate_triples();

// the components of the model's statistic vector G as U-statistics
std::vector<UStatistic> model_ustats(const GibbsModel& model);

}  // namespace ppmom
