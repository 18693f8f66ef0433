#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "ppmom/partitions.hpp"
#include "ppmom/process.hpp"
#include "ppmom/ustat.hpp"

using namespace ppmom;

namespace {

GibbsModel segment_model(double rho = 10, double b = 0.35) {
  Domain dom;
  dom.dim = 2;
  dom.mark_bound = b;
  IntensityMeasure ref;
  ref.rho = rho;
  return make_segment_model(dom, ref, 0.2, -0.4);
}

// unpruned reference enumerator: all set partitions, then the family filter
std::vector<std::vector<std::vector<int>>> brute_family(const std::vector<int>& orders) {
  int total = 0;
  for (int k : orders) total += k;
  std::vector<int> factor(static_cast<std::size_t>(total));
  {
    int off = 0, f = 0;
    for (int k : orders) {
      for (int t = 0; t < k; ++t) factor[static_cast<std::size_t>(off + t)] = f;
      ++f;
      off += k;
    }
  }
  std::vector<std::vector<std::vector<int>>> out;
  std::vector<int> assign(static_cast<std::size_t>(total), 0);
  auto rec = [&](auto&& self, int e, int nb) -> void {
    if (e == total) {
      std::vector<std::vector<int>> blocks(static_cast<std::size_t>(nb));
      for (int i = 0; i < total; ++i)
        blocks[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])].push_back(i);
      for (const auto& blk : blocks) {
        std::set<int> fs;
        for (int i : blk)
          if (!fs.insert(factor[static_cast<std::size_t>(i)]).second) return;
      }
      out.push_back(std::move(blocks));
      return;
    }
    for (int b = 0; b <= nb; ++b) {
      assign[static_cast<std::size_t>(e)] = b;
      self(self, e + 1, std::max(nb, b + 1));
    }
  };
  rec(rec, 0, 0);
  return out;
}

std::vector<std::vector<int>> nonincreasing_tuples(int max_total) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int remaining, int maxpart) -> void {
    if (!cur.empty()) out.push_back(cur);
    for (int p = std::min(remaining, maxpart); p >= 1; --p) {
      cur.push_back(p);
      self(self, remaining - p, p);
      cur.pop_back();
    }
  };
  rec(rec, max_total, max_total);
  return out;
}

}  // namespace

TEST_CASE("eval_ustat basics") {
  const GibbsModel m = segment_model();
  Rng rng(3);
  Configuration x = sample_poisson(m.reference, m.domain, rng);
  while (x.items.size() < 3) x.items.push_back(m.reference.sample_mark(m.domain, rng));

  // k = 1 indicator over a half plane counts matching particles
  const UStatistic in_left = ustat_count_in_box({-1e300, -1e300, -1e300}, {0.5, 1e300, 1e300});
  long expect = 0;
  for (const Particle& p : x.items)
    if (p.center.x <= 0.5) ++expect;
  CHECK(eval_ustat(in_left, x) == doctest::Approx(static_cast<double>(expect)));

  // empty sum below the order
  Configuration one;
  one.kind = ParticleKind::Segment;
  one.items.push_back(x.items[0]);
  CHECK(eval_ustat(ustat_segment_crossings(), one) == 0.0);

  // raw crossing kernel sums to twice the unordered crossing count
  const UStatistic raw_cross = make_ustat("cross", 2, [](std::span<const Particle> a) {
    return segments_intersect(a[0].as_segment(), a[1].as_segment()) ? 1.0 : 0.0;
  });
  const StatVec g = statistics_G(m, x);
  CHECK(eval_ustat(raw_cross, x) == doctest::Approx(2.0 * g[1]).epsilon(1e-12));
}

TEST_CASE("difference_functional basics and the closed form") {
  const GibbsModel m = segment_model();
  Rng rng(5);
  const Configuration x = sample_poisson(m.reference, m.domain, rng);

  const Functional count = [](const Configuration& c) { return static_cast<double>(c.size()); };
  const Particle y = m.reference.sample_mark(m.domain, rng);
  CHECK(difference_functional(count, x, {&y, 1}) == doctest::Approx(1.0).epsilon(1e-12));

  // the (k+1)-st difference of a U-statistic vanishes
  const UStatistic crossings = ustat_segment_crossings();
  const Functional fcross = [&](const Configuration& c) { return eval_ustat(crossings, c); };
  std::vector<Particle> pts;
  for (int i = 0; i < 3; ++i) pts.push_back(m.reference.sample_mark(m.domain, rng));
  CHECK(std::abs(difference_functional(fcross, x, pts)) < 1e-9);

  // closed form checks against the alternating sum for n <= k
  for (int t = 0; t < 30; ++t) {
    const Configuration z = sample_poisson(m.reference, m.domain, rng);
    for (int n = 1; n <= 2; ++n) {
      std::vector<Particle> ps;
      for (int i = 0; i < n; ++i) ps.push_back(m.reference.sample_mark(m.domain, rng));
      const double closed = difference_ustat_closed(crossings, z, ps);
      const double brute = difference_functional(fcross, z, ps);
      CHECK(closed == doctest::Approx(brute).epsilon(1e-9));
    }
  }
  CHECK_THROWS(difference_ustat_closed(crossings, x, pts));  // n > k rejected
}

TEST_CASE("difference_ustat_closed at full order") {
  const UStatistic crossings = ustat_segment_crossings();
  const Particle a = make_segment_particle({0.5, 0.5}, 0.2, 0);
  const Particle b = make_segment_particle({0.5, 0.5}, 0.2, 1.0);
  Configuration x;
  x.kind = ParticleKind::Segment;
  const Particle pts[2] = {a, b};
  // n = k: k! f(points); the crossing kernel carries its 1/2 prefactor
  CHECK(difference_ustat_closed(crossings, x, pts) == doctest::Approx(2.0 * 0.5).epsilon(1e-12));

  const UStatistic in_box = ustat_count_in_box({0, 0, -1}, {1, 1, 1});
  const Particle inside[1] = {make_segment_particle({0.5, 0.5}, 0.2, 0)};
  CHECK(difference_ustat_closed(in_box, x, inside) == doctest::Approx(1.0));
}

TEST_CASE("kernel_Tn exact and Monte Carlo branches") {
  const GibbsModel m = segment_model();
  Rng rng(9);
  const UStatistic crossings = ustat_segment_crossings();

  // n = k: exact value, zero standard error
  Particle two[2] = {make_segment_particle({0.5, 0.5}, 0.2, 0),
                     make_segment_particle({0.5, 0.5}, 0.2, 1.2)};
  auto e = kernel_Tn(crossings, 2, two, m.reference, m.domain, 10, 1);
  CHECK(e.value == doctest::Approx(2.0 * 0.5));
  CHECK(e.std_error == 0.0);

  // n > k: exact zero
  const UStatistic len = ustat_segment_length();
  Particle one[1] = {two[0]};
  e = kernel_Tn(len, 2, two, m.reference, m.domain, 10, 1);
  CHECK(e.value == 0.0);

  // n = 0 reproduces the Slivnyak-Mecke mean of an indicator
  const UStatistic in_box = ustat_count_in_box({0, 0, -1}, {0.5, 0.5, 1});
  e = kernel_Tn(in_box, 0, {}, m.reference, m.domain, 40000, 7);
  const double want = 10.0 * 0.25;  // rho |C|
  CHECK(std::abs(e.value - want) <= 3 * e.std_error);
  (void)one;
}

TEST_CASE("symmetrize") {
  // a symmetric kernel is a fixed point
  const Kernel sym = [](std::span<const Particle> a) { return a[0].size + a[1].size; };
  const Kernel wrapped = symmetrize(2, sym);
  const Particle p = make_segment_particle({0.1, 0.1}, 0.2, 0);
  const Particle q = make_segment_particle({0.2, 0.2}, 0.3, 1.0);
  const Particle args[2] = {p, q};
  CHECK(wrapped(args) == doctest::Approx(sym(args)).epsilon(1e-12));

  // product kernel averages over the two orders
  const Kernel prod = [](std::span<const Particle> a) { return a[0].size * (a[1].size + 1.0); };
  const Kernel sprod = symmetrize(2, prod);
  CHECK(sprod(args) == doctest::Approx(0.5 * (0.2 * 1.3 + 0.3 * 1.2)).epsilon(1e-12));

  // the ordered-tuple sum is unchanged by symmetrization
  const GibbsModel m = segment_model();
  Rng rng(11);
  const Configuration x = sample_poisson(m.reference, m.domain, rng);
  const UStatistic raw = make_ustat("raw", 2, prod, false);
  double direct = 0;
  for (std::size_t i = 0; i < x.items.size(); ++i)
    for (std::size_t j = 0; j < x.items.size(); ++j) {
      if (i == j) continue;
      const Particle ab[2] = {x.items[i], x.items[j]};
      direct += prod(ab);
    }
  CHECK(eval_ustat(raw, x) == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("partition family sizes and the A identity") {
  struct Case {
    std::vector<int> orders;
    std::size_t size;
  };
  const std::vector<Case> cases = {{{1, 1}, 2}, {{2, 1}, 3},  {{2, 2}, 7},
                                   {{3, 2}, 13}, {{3, 3}, 34}, {{3, 2, 1}, 60}};
  for (const auto& c : cases) {
    const auto fam = enumerate_partition_family(c.orders);
    CHECK(fam.members.size() == c.size);
    CHECK(family_cardinality_by_A(c.orders) == c.size);
  }
}

TEST_CASE("enumeration agrees with the unpruned brute-force filter") {
  for (const auto& orders : nonincreasing_tuples(8)) {
    const auto fam = enumerate_partition_family(orders);
    const auto brute = brute_family(orders);
    REQUIRE(fam.members.size() == brute.size());
    // compare as canonical block sets
    auto canon = [](const std::vector<std::vector<int>>& blocks) {
      std::vector<std::vector<int>> c = blocks;
      for (auto& b : c) std::sort(b.begin(), b.end());
      std::sort(c.begin(), c.end());
      return c;
    };
    std::set<std::vector<std::vector<int>>> got, want;
    for (const auto& p : fam.members) got.insert(canon(p.blocks));
    for (const auto& b : brute) want.insert(canon(b));
    CHECK(got == want);
    CHECK(family_cardinality_by_A(orders) == brute.size());
  }
}

TEST_CASE("coefficient_A spot values") {
  {
    const std::vector<int> orders = {2, 1};
    CHECK(coefficient_A(orders, std::vector<int>{0}) == 2);
    CHECK(coefficient_A(orders, std::vector<int>{1}) == 1);
  }
  {
    const std::vector<int> orders = {3, 3};
    const std::vector<std::uint64_t> want = {6, 18, 9, 1};
    for (int j = 0; j <= 3; ++j)
      CHECK(coefficient_A(orders, std::vector<int>{j}) == want[static_cast<std::size_t>(j)]);
  }
  {
    const std::vector<int> orders = {3, 2};
    const std::vector<std::uint64_t> want = {6, 6, 1};
    for (int j = 0; j <= 2; ++j)
      CHECK(coefficient_A(orders, std::vector<int>{j}) == want[static_cast<std::size_t>(j)]);
  }
  // A counts partitions grouped by shared variables: orders (2,1) by blocks
  {
    const auto fam = enumerate_partition_family({2, 1});
    const auto hist = family_block_histogram(fam);
    // two partitions with 3 blocks (j=1... no merge has k1+j=3 blocks when j=1)
    // blocks = k1 + j: j=1 -> 3 blocks (A=1), j=0 -> 2 blocks (A=2)
    REQUIRE(hist.size() == 2);
    CHECK(hist[0].first == 2);
    CHECK(hist[0].second == 2);
    CHECK(hist[1].first == 3);
    CHECK(hist[1].second == 1);
  }
}

TEST_CASE("merge pattern count for orders (3,2,1) is ten") {
  CHECK(merge_pattern_count(enumerate_partition_family({3, 2, 1})) == 10);
}

TEST_CASE("enumeration cap and order validation") {
  CHECK_THROWS(enumerate_partition_family({7, 6}));       // total 13 > 12
  CHECK_THROWS(enumerate_partition_family({1, 2}));       // not nonincreasing
  CHECK_NOTHROW(enumerate_partition_family({6, 6}));      // total 12 allowed
}

TEST_CASE("merged_tensor_eval substitution") {
  const UStatistic f1 = make_ustat("f1", 1, [](std::span<const Particle> a) { return a[0].size; });
  const UStatistic f2 = make_ustat("f2", 1, [](std::span<const Particle> a) { return 2 * a[0].size; });
  const std::vector<UStatistic> fs = {f1, f2};
  const Particle p = make_segment_particle({0, 0}, 0.3, 0);
  const Particle q = make_segment_particle({0, 0}, 0.5, 0);

  Partition singletons{2, {{0}, {1}}};
  const Particle two[2] = {p, q};
  CHECK(merged_tensor_eval(fs, singletons, two) == doctest::Approx(0.3 * 2 * 0.5).epsilon(1e-12));

  Partition merged{2, {{0, 1}}};
  const Particle onearg[1] = {p};
  CHECK(merged_tensor_eval(fs, merged, onearg) == doctest::Approx(0.3 * 0.6).epsilon(1e-12));

  // a block meeting one factor twice is rejected
  const UStatistic g2 = make_ustat("g2", 2, [](std::span<const Particle>) { return 1.0; });
  const std::vector<UStatistic> gs = {g2};
  Partition bad{2, {{0, 1}}};
  CHECK_THROWS(merged_tensor_eval(gs, bad, onearg));
}

TEST_CASE("product_expand_eval equals the direct product") {
  const GibbsModel m = segment_model();
  Rng rng(13);

  // m = 1 reduces to eval_ustat
  const UStatistic len = ustat_segment_length();
  const Configuration x0 = sample_poisson(m.reference, m.domain, rng);
  CHECK(product_expand_eval({&len, 1}, x0) == doctest::Approx(eval_ustat(len, x0)).epsilon(1e-12));

  // two order-1 statistics: off-diagonal plus diagonal decomposition
  const UStatistic cnt = ustat_count();
  {
    const std::vector<UStatistic> fs = {len, cnt};
    for (int t = 0; t < 10; ++t) {
      const Configuration x = sample_poisson(m.reference, m.domain, rng);
      const double lhs = product_expand_eval(fs, x);
      const double rhs = eval_ustat(len, x) * eval_ustat(cnt, x);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
  }

  // L N products on random segment configurations
  const UStatistic crossings = ustat_segment_crossings();
  {
    const std::vector<UStatistic> fs = {len, crossings};
    for (int t = 0; t < 30; ++t) {
      const Configuration x = sample_poisson(m.reference, m.domain, rng);
      const double lhs = product_expand_eval(fs, x);
      const double rhs = eval_ustat(len, x) * eval_ustat(crossings, x);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
  }

  // N^2 exercises merges of two order-2 kernels
  {
    const std::vector<UStatistic> fs = {crossings, crossings};
    for (int t = 0; t < 10; ++t) {
      Configuration x = sample_poisson(m.reference, m.domain, rng);
      while (x.items.size() > 12) x.items.pop_back();
      const double v = eval_ustat(crossings, x);
      CHECK(product_expand_eval(fs, x) == doctest::Approx(v * v).epsilon(1e-9));
    }
  }
}
