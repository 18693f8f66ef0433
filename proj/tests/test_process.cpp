#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ppmom/mcmc.hpp"
#include "ppmom/process.hpp"
#include "ppmom/stats.hpp"
#include "ppmom/ustat.hpp"

using namespace ppmom;

namespace {

GibbsModel segment_model(double nu1 = 0.2, double nu2 = -0.5, double rho = 12, double b = 0.3) {
  Domain dom;
  dom.dim = 2;
  dom.mark_bound = b;
  IntensityMeasure ref;
  ref.rho = rho;
  return make_segment_model(dom, ref, nu1, nu2);
}

GibbsModel plate_model(double nu1 = 0.2, double nu2 = -0.4, double nu3 = -0.4, double rho = 10,
                       double b = 0.5) {
  Domain dom;
  dom.dim = 3;
  dom.mark_bound = b;
  IntensityMeasure ref;
  ref.rho = rho;
  return make_plate_model(dom, ref, nu1, nu2, nu3);
}

GibbsModel strauss_model(double beta = 2, double gamma = 0.5, double range = 0.1) {
  Domain dom;
  dom.dim = 2;
  dom.kind = ParticleKind::Point;
  dom.mark_bound = 1;
  IntensityMeasure ref;
  ref.rho = 1;
  return make_strauss_model(dom, ref, beta, gamma, range);
}

// brute-force alternating subset sum of G, the reference for difference_G
StatVec difference_G_brute(const GibbsModel& model, const Configuration& x,
                           std::span<const Particle> pts) {
  const std::size_t n = pts.size();
  StatVec sum;
  sum.n = model.stat_count();
  std::vector<Particle> subset;
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    subset.clear();
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1ULL << i)) subset.push_back(pts[i]);
    StatVec g = statistics_G(model, x.with(subset));
    if ((n - subset.size()) % 2 == 1)
      sum -= g;
    else
      sum += g;
  }
  return sum;
}

}  // namespace

TEST_CASE("sample_poisson: zero intensity gives the empty configuration") {
  Domain dom;
  dom.dim = 2;
  dom.kind = ParticleKind::Point;
  IntensityMeasure ref;
  ref.rho = 0;
  Rng rng(1);
  CHECK(sample_poisson(ref, dom, rng).size() == 0);
}

TEST_CASE("sample_poisson: mean count and count distribution") {
  Domain dom;
  dom.dim = 2;
  dom.kind = ParticleKind::Point;
  IntensityMeasure ref;
  ref.rho = 4.0;
  Rng rng(42);
  const long n = 100000;
  std::vector<long> counts(n);
  double s = 0;
  for (long i = 0; i < n; ++i) {
    counts[static_cast<std::size_t>(i)] = static_cast<long>(sample_poisson(ref, dom, rng).size());
    s += static_cast<double>(counts[static_cast<std::size_t>(i)]);
  }
  const double mean = s / n;
  CHECK(std::abs(mean - 4.0) <= 3.0 * std::sqrt(4.0 / n));
  const auto gof = stats::poisson_count_gof(counts, 4.0);
  CHECK(gof.p > 0.01);
}

TEST_CASE("sample_poisson: marks respect the domain") {
  const GibbsModel m = segment_model();
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    const Configuration x = sample_poisson(m.reference, m.domain, rng);
    for (const Particle& p : x.items) {
      CHECK(m.domain.contains(p.center));
      CHECK(p.size > 0);
      CHECK(p.size <= m.domain.mark_bound);
      CHECK(p.axis.y >= 0);  // phi in [0, pi)
    }
  }
}

TEST_CASE("sample_poisson: unnormalizable rho is rejected") {
  Domain dom;
  dom.dim = 2;
  dom.kind = ParticleKind::Point;
  IntensityMeasure ref;
  ref.rho = -1;
  Rng rng(1);
  CHECK_THROWS(sample_poisson(ref, dom, rng));
}

TEST_CASE("statistics_G on hand-built configurations") {
  const GibbsModel m = segment_model();
  Configuration x;
  x.kind = ParticleKind::Segment;
  const StatVec zero = statistics_G(m, x);
  CHECK(zero[0] == 0.0);
  CHECK(zero[1] == 0.0);

  // two crossing unit segments (lengths capped by b; use 0.2 instead)
  Configuration y;
  y.kind = ParticleKind::Segment;
  y.items.push_back(make_segment_particle({0.5, 0.5}, 0.2, 0));
  y.items.push_back(make_segment_particle({0.5, 0.5}, 0.2, M_PI / 2));
  const StatVec g = statistics_G(m, y);
  CHECK(g[0] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(g[1] == 1.0);
}

TEST_CASE("statistics_G agrees with an independent U-statistic recount") {
  Rng rng(11);
  const GibbsModel seg = segment_model();
  for (int t = 0; t < 20; ++t) {
    const Configuration x = sample_poisson(seg.reference, seg.domain, rng);
    const StatVec g = statistics_G(seg, x);
    const auto us = model_ustats(seg);
    CHECK(eval_ustat(us[0], x) == doctest::Approx(g[0]).epsilon(1e-12));
    CHECK(eval_ustat(us[1], x) == doctest::Approx(g[1]).epsilon(1e-12));
  }
  const GibbsModel pl = plate_model();
  for (int t = 0; t < 10; ++t) {
    const Configuration x = sample_poisson(pl.reference, pl.domain, rng);
    const StatVec g = statistics_G(pl, x);
    const auto us = model_ustats(pl);
    for (int i = 0; i < 3; ++i)
      CHECK(eval_ustat(us[static_cast<std::size_t>(i)], x) ==
            doctest::Approx(g[i]).epsilon(1e-9));
  }
}

TEST_CASE("statistics_G is invariant under configuration order") {
  Rng rng(13);
  const GibbsModel m = segment_model();
  Configuration x = sample_poisson(m.reference, m.domain, rng);
  const StatVec g = statistics_G(m, x);
  std::reverse(x.items.begin(), x.items.end());
  const StatVec h = statistics_G(m, x);
  CHECK(g[0] == doctest::Approx(h[0]).epsilon(1e-12));
  CHECK(g[1] == h[1]);
}

TEST_CASE("unnormalized_log_density closed forms") {
  const GibbsModel seg = segment_model(0.7, -0.3);
  Configuration empty;
  empty.kind = ParticleKind::Segment;
  CHECK(unnormalized_log_density(seg, empty) == 0.0);

  Configuration one;
  one.kind = ParticleKind::Segment;
  one.items.push_back(make_segment_particle({0.5, 0.5}, 0.25, 1.0));
  CHECK(unnormalized_log_density(seg, one) == doctest::Approx(0.7 * 0.25).epsilon(1e-12));

  const GibbsModel st = strauss_model(2.0, 0.5, 0.2);
  Configuration pts;
  pts.kind = ParticleKind::Point;
  pts.items.push_back(make_point_particle({0.1, 0.1, 0}));
  pts.items.push_back(make_point_particle({0.15, 0.1, 0}));
  pts.items.push_back(make_point_particle({0.9, 0.9, 0}));
  // n = 3, s = 1 close pair
  CHECK(unnormalized_log_density(st, pts) ==
        doctest::Approx(3 * std::log(2.0) + 1 * std::log(0.5)).epsilon(1e-12));
}

TEST_CASE("difference_G closed forms match the paper tables") {
  Rng rng(17);
  const GibbsModel seg = segment_model();
  const Configuration x = sample_poisson(seg.reference, seg.domain, rng);

  const Particle y = seg.reference.sample_mark(seg.domain, rng);
  const StatVec d1 = difference_G(seg, x, {&y, 1});
  CHECK(d1[0] == doctest::Approx(y.size).epsilon(1e-12));
  long crossings = 0;
  for (const Particle& p : x.items)
    if (segments_intersect(p.as_segment(), y.as_segment())) ++crossings;
  CHECK(d1[1] == static_cast<double>(crossings));

  // third difference of the segment statistics vanishes
  std::vector<Particle> three;
  for (int i = 0; i < 3; ++i) three.push_back(seg.reference.sample_mark(seg.domain, rng));
  const StatVec d3 = difference_G(seg, x, three);
  CHECK(d3[0] == 0.0);
  CHECK(d3[1] == 0.0);

  // plate third difference is the triple-intersection indicator
  const GibbsModel pl = plate_model();
  Configuration empty;
  empty.kind = ParticleKind::Plate;
  std::vector<Particle> disks = {
      make_plate_particle({0, 0, 0}, 0.4, {0, 0, 1}),
      make_plate_particle({0, 0, 0}, 0.4, {1, 0, 0}),
      make_plate_particle({0, 0, 0}, 0.4, {0, 1, 0}),
  };
  const StatVec p3 = difference_G(pl, empty, disks);
  CHECK(p3[0] == 0.0);
  CHECK(p3[1] == 0.0);
  CHECK(p3[2] == 1.0);
}

TEST_CASE("difference_G equals the alternating subset sum") {
  Rng rng(19);
  for (const GibbsModel& m : {segment_model(), plate_model(), strauss_model()}) {
    for (int t = 0; t < 20; ++t) {
      const Configuration x = sample_poisson(m.reference, m.domain, rng);
      for (int n = 1; n <= 3; ++n) {
        std::vector<Particle> pts;
        for (int i = 0; i < n; ++i) pts.push_back(m.reference.sample_mark(m.domain, rng));
        const StatVec got = difference_G(m, x, pts);
        const StatVec want = difference_G_brute(m, x, pts);
        for (int c = 0; c < got.n; ++c)
          CHECK(got[c] == doctest::Approx(want[c]).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("q_m telescopes to the direct increment of G") {
  Rng rng(23);
  for (const GibbsModel& m : {segment_model(), plate_model()}) {
    for (int t = 0; t < 25; ++t) {
      const Configuration x = sample_poisson(m.reference, m.domain, rng);
      for (int mm = 1; mm <= 4; ++mm) {
        std::vector<Particle> add;
        for (int i = 0; i < mm; ++i) add.push_back(m.reference.sample_mark(m.domain, rng));
        const StatVec q = q_m(m, x, add);
        const StatVec d = statistics_G(m, x.with(add)) - statistics_G(m, x);
        for (int c = 0; c < q.n; ++c)
          CHECK(q[c] == doctest::Approx(d[c]).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("q_m with one particle is the first difference") {
  Rng rng(29);
  const GibbsModel m = segment_model();
  const Configuration x = sample_poisson(m.reference, m.domain, rng);
  const Particle y = m.reference.sample_mark(m.domain, rng);
  const StatVec q = q_m(m, x, {&y, 1});
  const StatVec d = difference_G(m, x, {&y, 1});
  CHECK(q[0] == d[0]);
  CHECK(q[1] == d[1]);
}

TEST_CASE("q_m rejects duplicated new particles") {
  Rng rng(31);
  const GibbsModel m = segment_model();
  const Configuration x = sample_poisson(m.reference, m.domain, rng);
  const Particle y = m.reference.sample_mark(m.domain, rng);
  const Particle two[2] = {y, y};
  CHECK_THROWS(q_m(m, x, two));
}

TEST_CASE("conditional_intensity closed forms and the density ratio") {
  Rng rng(37);

  // trivial model: nu = 0 means the density is identically one
  {
    const GibbsModel m = strauss_model(1.0, 1.0, 0.1);
    const Configuration x = sample_poisson(m.reference, m.domain, rng);
    for (int n = 1; n <= 3; ++n) {
      std::vector<Particle> pts;
      for (int i = 0; i < n; ++i) pts.push_back(m.reference.sample_mark(m.domain, rng));
      CHECK(conditional_intensity(m, pts, x) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  // strauss closed forms
  {
    const double beta = 2.5, gamma = 0.4, r = 0.15;
    const GibbsModel m = strauss_model(beta, gamma, r);
    Configuration empty;
    empty.kind = ParticleKind::Point;
    const Particle u = m.reference.sample_mark(m.domain, rng);
    CHECK(conditional_intensity(m, {&u, 1}, empty) == doctest::Approx(beta).epsilon(1e-12));

    const Configuration x = sample_poisson(m.reference, m.domain, rng);
    const double t = static_cast<double>(strauss_close_count(m, u, x));
    CHECK(conditional_intensity(m, {&u, 1}, x) ==
          doctest::Approx(beta * std::pow(gamma, t)).epsilon(1e-12));

    Particle y2[2] = {u, m.reference.sample_mark(m.domain, rng)};
    const double near = norm(y2[0].center - y2[1].center) <= r ? 1.0 : 0.0;
    const double t2 = static_cast<double>(strauss_close_count(m, y2[0], x) +
                                          strauss_close_count(m, y2[1], x));
    CHECK(conditional_intensity(m, y2, x) ==
          doctest::Approx(beta * beta * std::pow(gamma, near + t2)).epsilon(1e-12));
  }

  // generic ratio-of-densities oracle
  for (const GibbsModel& m : {segment_model(), plate_model(), strauss_model()}) {
    for (int t = 0; t < 15; ++t) {
      const Configuration x = sample_poisson(m.reference, m.domain, rng);
      const int n = 1 + static_cast<int>(rng.uniform_index(3));
      std::vector<Particle> pts;
      for (int i = 0; i < n; ++i) pts.push_back(m.reference.sample_mark(m.domain, rng));
      const double lhs = conditional_intensity(m, pts, x);
      const double rhs = std::exp(unnormalized_log_density(m, x.with(pts)) -
                                  unnormalized_log_density(m, x));
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
      CHECK(lhs > 0);  // hereditarity: the exponential family is strictly positive
    }
  }
}

TEST_CASE("conditional_intensity is symmetric and satisfies the cocycle identity") {
  Rng rng(41);
  const GibbsModel m = segment_model();
  for (int t = 0; t < 20; ++t) {
    const Configuration x = sample_poisson(m.reference, m.domain, rng);
    std::vector<Particle> pts;
    for (int i = 0; i < 3; ++i) pts.push_back(m.reference.sample_mark(m.domain, rng));

    const double base = conditional_intensity(m, pts, x);
    std::vector<Particle> perm = {pts[2], pts[0], pts[1]};
    CHECK(conditional_intensity(m, perm, x) == doctest::Approx(base).epsilon(1e-12));

    // lambda*_{n+m}(y u z, x) = lambda*_n(y, x u z) lambda*_m(z, x)
    const std::vector<Particle> y = {pts[0], pts[1]};
    const std::vector<Particle> z = {pts[2]};
    const Configuration xz = x.with(z);
    const double split = conditional_intensity(m, y, xz) * conditional_intensity(m, z, x);
    CHECK(base == doctest::Approx(split).epsilon(1e-9));
  }
}

TEST_CASE("intensity_function pooled estimates") {
  Rng rng(43);
  // nu = 0: conditional intensity is identically one
  {
    const GibbsModel m = strauss_model(1.0, 1.0, 0.1);
    std::vector<Configuration> pool;
    for (int i = 0; i < 50; ++i) pool.push_back(sample_poisson(m.reference, m.domain, rng));
    const Particle u = m.reference.sample_mark(m.domain, rng);
    const auto e = intensity_function(m, u, pool);
    CHECK(e.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e.std_error == doctest::Approx(0.0).epsilon(1e-12));
  }
  // gamma = 1: deterministic constant conditional intensity beta
  {
    const GibbsModel m = strauss_model(3.0, 1.0, 0.1);
    std::vector<Configuration> pool;
    for (int i = 0; i < 50; ++i) pool.push_back(sample_poisson(m.reference, m.domain, rng));
    const Particle u = m.reference.sample_mark(m.domain, rng);
    const auto e = intensity_function(m, u, pool);
    CHECK(e.value == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(e.std_error == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("model sign constraints are enforced") {
  Domain dom;
  dom.dim = 2;
  dom.mark_bound = 0.3;
  IntensityMeasure ref;
  ref.rho = 5;
  CHECK_THROWS(make_segment_model(dom, ref, 0.1, +0.2));
  Domain dom3;
  dom3.dim = 3;
  dom3.mark_bound = 0.3;
  CHECK_THROWS(make_plate_model(dom3, ref, 0.1, -0.2, +0.1));
  Domain pd;
  pd.dim = 2;
  CHECK_THROWS(make_strauss_model(pd, ref, -1.0, 0.5, 0.1));
  CHECK_THROWS(make_strauss_model(pd, ref, 1.0, 0.0, 0.1));   // hard core excluded
  CHECK_THROWS(make_strauss_model(pd, ref, 1.0, 1.5, 0.1));
}

TEST_CASE("mark law tables and fixed marks") {
  Domain dom;
  dom.dim = 2;
  dom.kind = ParticleKind::Segment;
  dom.mark_bound = 1.0;
  IntensityMeasure ref;
  ref.rho = 1;
  ref.q.type = MarkLaw::Type::Fixed;
  ref.q.fixed_value = 0.25;
  Rng rng(47);
  for (int i = 0; i < 20; ++i) CHECK(ref.sample_mark(dom, rng).size == 0.25);

  // quantile table representing uniform on (0.2, 0.6]
  ref.q.type = MarkLaw::Type::QuantileTable;
  ref.q.table_u = {0.0, 1.0};
  ref.q.table_q = {0.2, 0.6};
  double lo = 1, hi = 0, s = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double v = ref.sample_mark(dom, rng).size;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    s += v;
  }
  CHECK(lo >= 0.2);
  CHECK(hi <= 0.6);
  CHECK(std::abs(s / n - 0.4) < 0.005);
}

TEST_CASE("grid rho tables sample proportionally") {
  Domain dom;
  dom.dim = 2;
  dom.kind = ParticleKind::Point;
  IntensityMeasure ref;
  ref.grid = {2, 1, 0};
  ref.rho_cells = {3.0, 1.0};  // left cell three times as dense
  CHECK(ref.total_mass(dom) == doctest::Approx(2.0));
  Rng rng(53);
  long left = 0;
  const long n = 40000;
  for (long i = 0; i < n; ++i)
    if (ref.sample_center(dom, rng).x < 0.5) ++left;
  CHECK(std::abs(static_cast<double>(left) / n - 0.75) < 0.01);
}
