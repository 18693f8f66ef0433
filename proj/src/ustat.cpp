#include "ppmom/ustat.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "ppmom/stats.hpp"

namespace ppmom {

namespace {

double factorial(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// visit all index combinations i1 < ... < ik from [0, n)
template <class Visit>
void for_each_combination(std::size_t n, int k, Visit&& visit) {
  if (k == 0 || n < static_cast<std::size_t>(k)) {
    if (k == 0) visit(std::span<const std::size_t>{});
    return;
  }
  std::vector<std::size_t> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    visit(std::span<const std::size_t>(idx));
    int j = k - 1;
    while (j >= 0 && idx[static_cast<std::size_t>(j)] == n - static_cast<std::size_t>(k - j)) --j;
    if (j < 0) break;
    ++idx[static_cast<std::size_t>(j)];
    for (int t = j + 1; t < k; ++t) idx[static_cast<std::size_t>(t)] = idx[static_cast<std::size_t>(t - 1)] + 1;
  }
}

}  // namespace

Kernel symmetrize(int order, Kernel h) {
  if (order <= 1) return h;
  auto perms = std::make_shared<std::vector<std::vector<int>>>();
  std::vector<int> p(static_cast<std::size_t>(order));
  std::iota(p.begin(), p.end(), 0);
  do {
    perms->push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  const double inv = 1.0 / static_cast<double>(perms->size());
  return [order, h = std::move(h), perms, inv](std::span<const Particle> args) {
    std::vector<Particle> buf(static_cast<std::size_t>(order));
    double s = 0;
    for (const auto& q : *perms) {
      for (int i = 0; i < order; ++i) buf[static_cast<std::size_t>(i)] = args[static_cast<std::size_t>(q[static_cast<std::size_t>(i)])];
      s += h(buf);
    }
    return s * inv;
  };
}

UStatistic make_ustat(std::string name, int order, Kernel k, bool symmetric) {
  if (order < 1) throw std::invalid_argument("U-statistic order must be >= 1");
  UStatistic f;
  f.order = order;
  f.kernel = symmetric ? std::move(k) : symmetrize(order, std::move(k));
  f.name = std::move(name);
  return f;
}

double eval_ustat(const UStatistic& F, const Configuration& x) {
  const int k = F.order;
  if (x.items.size() < static_cast<std::size_t>(k)) return 0.0;
  // kernel is symmetric: the ordered-tuple sum is k! times the combination sum
  double sum = 0;
  std::vector<Particle> args(static_cast<std::size_t>(k));
  for_each_combination(x.items.size(), k, [&](std::span<const std::size_t> idx) {
    for (int i = 0; i < k; ++i) args[static_cast<std::size_t>(i)] = x.items[idx[static_cast<std::size_t>(i)]];
    sum += F.kernel(args);
  });
  return factorial(k) * sum;
}

double difference_functional(const Functional& F, const Configuration& x,
                             std::span<const Particle> points) {
  const std::size_t n = points.size();
  if (n == 0) return F(x);
  if (n > 20) throw std::invalid_argument("difference order too large");
  double sum = 0;
  std::vector<Particle> subset;
  subset.reserve(n);
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    subset.clear();
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1ULL << i)) subset.push_back(points[i]);
    const double sign = ((n - subset.size()) % 2 == 0) ? 1.0 : -1.0;
    sum += sign * F(x.with(subset));
  }
  return sum;
}

double difference_ustat_closed(const UStatistic& F, const Configuration& x,
                               std::span<const Particle> points) {
  const int k = F.order;
  const int n = static_cast<int>(points.size());
  if (n > k)
    throw std::invalid_argument("difference_ustat_closed needs n <= k (higher differences vanish)");
  const int rest = k - n;
  if (x.items.size() < static_cast<std::size_t>(rest)) return 0.0;
  std::vector<Particle> args(static_cast<std::size_t>(k));
  for (int i = 0; i < n; ++i) args[static_cast<std::size_t>(i)] = points[static_cast<std::size_t>(i)];
  double sum = 0;
  for_each_combination(x.items.size(), rest, [&](std::span<const std::size_t> idx) {
    for (int i = 0; i < rest; ++i)
      args[static_cast<std::size_t>(n + i)] = x.items[idx[static_cast<std::size_t>(i)]];
    sum += F.kernel(args);
  });
  // ordered tail tuples contribute (k-n)! copies each
  return factorial(k) * sum;
}

MomentEstimate kernel_Tn(const UStatistic& F, int n, std::span<const Particle> points,
                         const IntensityMeasure& m, const Domain& dom, long n_samples,
                         std::uint64_t seed) {
  MomentEstimate e;
  e.method = Method::Chaos;
  const int k = F.order;
  if (n != static_cast<int>(points.size()))
    throw std::invalid_argument("kernel_Tn: points size must equal n");
  if (n > k) return e;  // exact zero
  if (n == k) {
    e.value = factorial(k) * F.kernel(points);
    return e;
  }
  const int rest = k - n;
  const double mass = m.total_mass(dom);
  const double scale = factorial(k) / factorial(rest) * std::pow(mass, rest);
  std::vector<Particle> args(static_cast<std::size_t>(k));
  for (int i = 0; i < n; ++i) args[static_cast<std::size_t>(i)] = points[static_cast<std::size_t>(i)];
  std::vector<double> vals(static_cast<std::size_t>(n_samples));
  Rng rng(derive_seed(seed, "kernel_tn"));
  for (long s = 0; s < n_samples; ++s) {
    for (int i = 0; i < rest; ++i) args[static_cast<std::size_t>(n + i)] = m.sample_mark(dom, rng);
    vals[static_cast<std::size_t>(s)] = F.kernel(args);
  }
  const auto ms = stats::mean_se(vals);
  e.value = scale * ms.mean;
  e.std_error = scale * ms.se;
  e.n_inner = n_samples;
  return e;
}

UStatistic ustat_count() {
  return make_ustat("count", 1, [](std::span<const Particle>) { return 1.0; });
}

UStatistic ustat_count_in_box(Vec3 lo, Vec3 hi) {
  return make_ustat("count_in_box", 1, [lo, hi](std::span<const Particle> a) {
    const Vec3& c = a[0].center;
    return (c.x >= lo.x && c.x <= hi.x && c.y >= lo.y && c.y <= hi.y && c.z >= lo.z && c.z <= hi.z)
               ? 1.0
               : 0.0;
  });
}

UStatistic ustat_close_pairs(double range) {
  return make_ustat("close_pairs", 2, [range](std::span<const Particle> a) {
    return norm(a[0].center - a[1].center) <= range ? 0.5 : 0.0;
  });
}

UStatistic ustat_segment_length() {
  return make_ustat("L", 1, [](std::span<const Particle> a) { return a[0].size; });
}

UStatistic ustat_segment_crossings() {
  return make_ustat("N", 2, [](std::span<const Particle> a) {
    return segments_intersect(a[0].as_segment(), a[1].as_segment()) ? 0.5 : 0.0;
  });
}

UStatistic ustat_plate_area() {
  return make_ustat("S", 1, [](std::span<const Particle> a) { return plate_area(a[0].as_plate()); });
}

UStatistic ustat_plate_chords() {
  return make_ustat("L", 2, [](std::span<const Particle> a) {
    return 0.5 * plate_pair_chord_length(a[0].as_plate(), a[1].as_plate());
  });
}

UStatistic ustat_plate_triples() {
  return make_ustat("N", 3, [](std::span<const Particle> a) {
    return plates_triple_intersect(a[0].as_plate(), a[1].as_plate(), a[2].as_plate()) ? 1.0 / 6.0
                                                                                      : 0.0;
  });
}

std::vector<UStatistic> model_ustats(const GibbsModel& model) {
  switch (model.kind) {
    case ModelKind::SegmentModel:
      return {ustat_segment_length(), ustat_segment_crossings()};
    case ModelKind::PlateModel:
      return {ustat_plate_area(), ustat_plate_chords(), ustat_plate_triples()};
    case ModelKind::Strauss:
      return {ustat_count(), ustat_close_pairs(model.strauss_range)};
  }
  return {};
}

}  // namespace ppmom
