#include "ppmom/moments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "ppmom/parallel.hpp"
#include "ppmom/stats.hpp"

namespace ppmom {

namespace {

double factorial(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

long long llgcd(long long a, long long b) { return b == 0 ? a : llgcd(b, a % b); }

int batch_of(std::size_t i, std::size_t n) {
  return static_cast<int>(i * static_cast<std::size_t>(kBatches) / n);
}

// mean and SE from the same contiguous batches the pool slices use
stats::MeanSE batched(std::span<const double> vals) {
  const std::size_t n = vals.size();
  if (n < static_cast<std::size_t>(2 * kBatches)) return stats::mean_se(vals);
  std::array<double, kBatches> sum{};
  std::array<long, kBatches> cnt{};
  for (std::size_t i = 0; i < n; ++i) {
    const int b = batch_of(i, n);
    sum[static_cast<std::size_t>(b)] += vals[i];
    cnt[static_cast<std::size_t>(b)]++;
  }
  std::vector<double> means(kBatches);
  for (int b = 0; b < kBatches; ++b)
    means[static_cast<std::size_t>(b)] = sum[static_cast<std::size_t>(b)] / static_cast<double>(cnt[static_cast<std::size_t>(b)]);
  auto ms = stats::mean_se(means);
  ms.n = n;
  return ms;
}

std::span<const Configuration> pool_slice(const MuPool& pool, int b) {
  const std::size_t n = pool.states.size();
  const std::size_t lo = n * static_cast<std::size_t>(b) / kBatches;
  const std::size_t hi = n * static_cast<std::size_t>(b + 1) / kBatches;
  return std::span<const Configuration>(pool.states).subspan(lo, hi - lo);
}

double pooled_ci(const GibbsModel& model, std::span<const Particle> pts,
                 std::span<const Configuration> slice) {
  double s = 0;
  for (const Configuration& mu : slice) s += conditional_intensity(model, pts, mu);
  return s / static_cast<double>(slice.size());
}

void require_pool(const MuPool& pool) {
  if (pool.states.size() < static_cast<std::size_t>(kBatches))
    throw std::invalid_argument("mu pool needs at least one state per batch");
}

// inner Monte Carlo estimate of T_n F at fixed points, drawing from rng
double tn_estimate(const UStatistic& F, std::span<const Particle> y, const IntensityMeasure& m,
                   const Domain& dom, double mass, long n_inner, Rng& rng) {
  const int k = F.order;
  const int n = static_cast<int>(y.size());
  if (n > k) return 0.0;
  if (n == k) return factorial(k) * F.kernel(y);
  const int rest = k - n;
  std::vector<Particle> args(static_cast<std::size_t>(k));
  for (int i = 0; i < n; ++i) args[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)];
  double s = 0;
  for (long r = 0; r < n_inner; ++r) {
    for (int i = 0; i < rest; ++i)
      args[static_cast<std::size_t>(n + i)] = m.sample_mark(dom, rng);
    s += F.kernel(args);
  }
  return factorial(k) / factorial(rest) * std::pow(mass, rest) * s / static_cast<double>(n_inner);
}

std::vector<UStatistic> sorted_by_order(std::span<const UStatistic> ustats) {
  std::vector<UStatistic> sorted(ustats.begin(), ustats.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const UStatistic& a, const UStatistic& b) { return a.order > b.order; });
  return sorted;
}

}  // namespace

MuPool make_mu_pool(const GibbsModel& model, const ChainParams& params) {
  MuPool pool;
  pool.seed = params.seed;
  pool.states = run_chain(model, params).states;
  return pool;
}

MomentEstimate poisson_mean_ustat(const UStatistic& F, const IntensityMeasure& m,
                                  const Domain& dom, long n_nodes, std::uint64_t seed) {
  const int k = F.order;
  const double mass = m.total_mass(dom);
  MomentEstimate e;
  e.method = Method::Slivnyak;
  e.n_outer = n_nodes;
  if (mass <= 0) return e;
  const auto vals = par::map_indexed<double>(static_cast<std::size_t>(n_nodes), [&](std::size_t i) {
    Rng rng(derive_seed(seed, "pmean", i));
    std::vector<Particle> y(static_cast<std::size_t>(k));
    for (int t = 0; t < k; ++t) y[static_cast<std::size_t>(t)] = m.sample_mark(dom, rng);
    return F.kernel(y);
  });
  const auto ms = stats::mean_se(vals);
  const double scale = std::pow(mass, k);
  e.value = scale * ms.mean;
  e.std_error = scale * ms.se;
  return e;
}

MomentEstimate poisson_variance_ustat(const UStatistic& F, const IntensityMeasure& m,
                                      const Domain& dom, long n_nodes, long n_inner,
                                      std::uint64_t seed) {
  const int k = F.order;
  const double mass = m.total_mass(dom);
  MomentEstimate e;
  e.method = Method::Chaos;
  e.n_outer = n_nodes;
  e.n_inner = n_inner;
  if (mass <= 0) return e;

  double value = 0, var = 0;
  for (int i = 1; i <= k; ++i) {
    double coeff = factorial(i);
    {
      double binom = 1;
      for (int t = 1; t <= i; ++t) binom = binom * (k - i + t) / t;
      coeff *= binom * binom;
    }
    const std::string label = "pvar" + std::to_string(i);
    const auto vals = par::map_indexed<double>(static_cast<std::size_t>(n_nodes), [&](std::size_t node) {
      Rng rng(derive_seed(seed, label, node));
      std::vector<Particle> y(static_cast<std::size_t>(i));
      for (int t = 0; t < i; ++t) y[static_cast<std::size_t>(t)] = m.sample_mark(dom, rng);
      if (i == k) {
        const double f = F.kernel(y);
        return f * f;
      }
      // two independent inner replicates remove the plug-in squaring bias
      std::vector<Particle> args(static_cast<std::size_t>(k));
      for (int t = 0; t < i; ++t) args[static_cast<std::size_t>(t)] = y[static_cast<std::size_t>(t)];
      double rep[2];
      for (int r = 0; r < 2; ++r) {
        double s = 0;
        for (long q = 0; q < n_inner; ++q) {
          for (int t = i; t < k; ++t) args[static_cast<std::size_t>(t)] = m.sample_mark(dom, rng);
          s += F.kernel(args);
        }
        rep[r] = std::pow(mass, k - i) * s / static_cast<double>(n_inner);
      }
      return rep[0] * rep[1];
    });
    const auto ms = stats::mean_se(vals);
    const double scale = coeff * std::pow(mass, i);
    value += scale * ms.mean;
    var += scale * ms.se * scale * ms.se;
  }
  e.value = value;
  e.std_error = std::sqrt(var);
  return e;
}

MomentEstimate poisson_covariance_chaos(const UStatistic& F, const UStatistic& Ft,
                                        const IntensityMeasure& m, const Domain& dom,
                                        long n_nodes, long n_inner, std::uint64_t seed) {
  const double mass = m.total_mass(dom);
  MomentEstimate e;
  e.method = Method::Chaos;
  e.n_outer = n_nodes;
  e.n_inner = n_inner;
  if (mass <= 0) return e;
  const int kmin = std::min(F.order, Ft.order);

  double value = 0, var = 0;
  for (int n = 1; n <= kmin; ++n) {
    const std::string label = "pcov" + std::to_string(n);
    const auto vals = par::map_indexed<double>(static_cast<std::size_t>(n_nodes), [&](std::size_t node) {
      Rng rng(derive_seed(seed, label, node));
      std::vector<Particle> y(static_cast<std::size_t>(n));
      for (int t = 0; t < n; ++t) y[static_cast<std::size_t>(t)] = m.sample_mark(dom, rng);
      const double ta = tn_estimate(F, y, m, dom, mass, n_inner, rng);
      const double tb = tn_estimate(Ft, y, m, dom, mass, n_inner, rng);
      return ta * tb;
    });
    const auto ms = stats::mean_se(vals);
    const double scale = std::pow(mass, n) / factorial(n);
    value += scale * ms.mean;
    var += scale * ms.se * scale * ms.se;
  }
  e.value = value;
  e.std_error = std::sqrt(var);
  return e;
}

SeriesEstimate poisson_series_expectation(const Functional& F, const IntensityMeasure& m,
                                          const Domain& dom, const SeriesOptions& opt,
                                          std::uint64_t seed) {
  const double mass = m.total_mass(dom);
  SeriesEstimate out;
  out.estimate.method = Method::Series;

  const int n_max = opt.n_max > 0
                        ? opt.n_max
                        : static_cast<int>(mass + 10.0 * std::sqrt(std::max(mass, 1.0)) + 20.0);
  out.n_max = n_max;

  double value = 0, var = 0;
  double prev_term = 0, last_term = 0;
  for (int n = 0; n <= n_max; ++n) {
    const double logw = n * std::log(std::max(mass, 1e-300)) - mass - std::lgamma(n + 1.0);
    const double w = mass > 0 ? std::exp(logw) : (n == 0 ? 1.0 : 0.0);
    double term_mean, term_se = 0;
    if (n == 0) {
      Configuration empty;
      empty.kind = dom.kind;
      term_mean = F(empty);
    } else {
      const long nodes = (w < 1e-10) ? std::min<long>(100, opt.nodes_per_term) : opt.nodes_per_term;
      const std::string label = "series" + std::to_string(n);
      const auto vals = par::map_indexed<double>(static_cast<std::size_t>(nodes), [&](std::size_t i) {
        Rng rng(derive_seed(seed, label, i));
        Configuration x;
        x.kind = dom.kind;
        x.items.reserve(static_cast<std::size_t>(n));
        for (int t = 0; t < n; ++t) x.items.push_back(m.sample_mark(dom, rng));
        return F(x);
      });
      const auto ms = stats::mean_se(vals);
      term_mean = ms.mean;
      term_se = ms.se;
    }
    const double t = w * term_mean;
    value += t;
    var += w * term_se * w * term_se;
    prev_term = last_term;
    last_term = std::abs(t);
  }
  out.estimate.value = value;
  out.estimate.std_error = std::sqrt(var);
  out.estimate.n_outer = opt.nodes_per_term;

  if (last_term == 0) {
    out.truncation_bound = 0;
  } else if (prev_term > 0 && last_term < prev_term) {
    const double r = last_term / prev_term;
    out.truncation_bound = last_term * r / (1.0 - r);
  } else {
    out.truncation_bound = std::numeric_limits<double>::infinity();
  }
  out.tail_ok = out.truncation_bound <= opt.tail_tol * std::max(std::abs(value), 1e-300);
  return out;
}

MomentEstimate kernel_Tn_density(const GibbsModel& model, int n,
                                 std::span<const Particle> points, const MuPool& pool) {
  if (n < 1) throw std::invalid_argument("kernel_Tn_density needs n >= 1");
  if (static_cast<int>(points.size()) != n)
    throw std::invalid_argument("kernel_Tn_density: points size must equal n");
  if (pool.states.empty()) throw std::invalid_argument("empty mu pool");

  std::vector<double> vals(pool.states.size());
  std::vector<Particle> subset;
  subset.reserve(static_cast<std::size_t>(n));
  for (std::size_t j = 0; j < pool.states.size(); ++j) {
    const Configuration& mu = pool.states[j];
    double s = 0;
    for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
      subset.clear();
      for (int t = 0; t < n; ++t)
        if (mask & (1ULL << t)) subset.push_back(points[static_cast<std::size_t>(t)]);
      const double sign = ((static_cast<std::size_t>(n) - subset.size()) % 2 == 0) ? 1.0 : -1.0;
      s += sign * conditional_intensity(model, subset, mu);
    }
    vals[j] = s;
  }
  const auto ms = stats::batch_mean_se(vals, kBatches);
  MomentEstimate e;
  e.value = ms.mean;
  e.std_error = ms.se;
  e.n_outer = static_cast<long>(pool.states.size());
  e.method = Method::Theorem2;
  return e;
}

MomentEstimate density_mean_ustat(const UStatistic& F, const GibbsModel& model,
                                  const MuPool& pool, long n_nodes, std::uint64_t seed) {
  require_pool(pool);
  const int k = F.order;
  const double mass = model.reference.total_mass(model.domain);
  const auto vals = par::map_indexed<double>(static_cast<std::size_t>(n_nodes), [&](std::size_t i) {
    Rng rng(derive_seed(seed, "dmean", i));
    std::vector<Particle> y(static_cast<std::size_t>(k));
    for (int t = 0; t < k; ++t)
      y[static_cast<std::size_t>(t)] = model.reference.sample_mark(model.domain, rng);
    const double fv = F.kernel(y);
    if (fv == 0.0) return 0.0;
    return fv * pooled_ci(model, y, pool_slice(pool, batch_of(i, static_cast<std::size_t>(n_nodes))));
  });
  const auto ms = batched(vals);
  const double scale = std::pow(mass, k);
  MomentEstimate e;
  e.value = scale * ms.mean;
  e.std_error = scale * ms.se;
  e.n_outer = n_nodes;
  e.n_inner = static_cast<long>(pool.states.size());
  e.method = Method::Theorem2;
  return e;
}

namespace {

long choose_nodes(const std::vector<UStatistic>& sorted, const Partition& sigma,
                  const GibbsModel& model, const MixedOptions& opt, std::uint64_t seed,
                  std::size_t si) {
  const std::size_t b = sigma.blocks.size();
  Rng rng(derive_seed(seed, "mixpilot", si));
  long hits = 0;
  std::vector<Particle> marks(b);
  for (long i = 0; i < opt.pilot_nodes; ++i) {
    for (std::size_t t = 0; t < b; ++t)
      marks[t] = model.reference.sample_mark(model.domain, rng);
    if (merged_tensor_eval(sorted, sigma, marks) != 0.0) ++hits;
  }
  const double rate = std::max(static_cast<double>(hits), 0.5) / static_cast<double>(opt.pilot_nodes);
  if (rate * static_cast<double>(opt.base_nodes) >= static_cast<double>(opt.target_hits))
    return opt.base_nodes;
  const double want = static_cast<double>(opt.target_hits) / rate;
  return std::max(opt.base_nodes, std::min(opt.max_nodes, static_cast<long>(std::llround(want))));
}

}  // namespace

MixedMomentResult density_mixed_moment(std::span<const UStatistic> ustats,
                                       const GibbsModel& model, const MuPool& pool,
                                       const MixedOptions& opt, std::uint64_t seed) {
  require_pool(pool);
  const auto sorted = sorted_by_order(ustats);
  std::vector<int> orders;
  for (const auto& f : sorted) orders.push_back(f.order);
  const PartitionFamily fam = enumerate_partition_family(orders);
  const double mass = model.reference.total_mass(model.domain);

  MixedMomentResult res;
  std::array<double, kBatches> total_batch{};

  for (std::size_t si = 0; si < fam.members.size(); ++si) {
    const Partition& sigma = fam.members[si];
    const std::size_t nb = sigma.blocks.size();
    const long nodes = choose_nodes(sorted, sigma, model, opt, seed, si);
    const std::string label = "mix" + std::to_string(si);
    const auto vals = par::map_indexed<double>(static_cast<std::size_t>(nodes), [&](std::size_t i) {
      Rng rng(derive_seed(seed, label, i));
      std::vector<Particle> marks(nb);
      for (std::size_t t = 0; t < nb; ++t)
        marks[t] = model.reference.sample_mark(model.domain, rng);
      const double kv = merged_tensor_eval(sorted, sigma, marks);
      if (kv == 0.0) return 0.0;
      return kv * pooled_ci(model, marks, pool_slice(pool, batch_of(i, static_cast<std::size_t>(nodes))));
    });
    const double scale = std::pow(mass, static_cast<double>(nb));
    const auto ms = batched(vals);

    MomentEstimate pe;
    pe.value = scale * ms.mean;
    pe.std_error = scale * ms.se;
    pe.n_outer = nodes;
    pe.n_inner = static_cast<long>(pool.states.size());
    pe.method = ustats.size() == 1 ? Method::Theorem2 : Method::Theorem3;
    res.per_sigma.push_back(pe);
    res.sigma_blocks.push_back(static_cast<int>(nb));

    // accumulate the per-batch contribution for the combined SE
    std::array<double, kBatches> sum{};
    std::array<long, kBatches> cnt{};
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const int b = batch_of(i, vals.size());
      sum[static_cast<std::size_t>(b)] += vals[i];
      cnt[static_cast<std::size_t>(b)]++;
    }
    for (int b = 0; b < kBatches; ++b)
      if (cnt[static_cast<std::size_t>(b)] > 0)
        total_batch[static_cast<std::size_t>(b)] +=
            scale * sum[static_cast<std::size_t>(b)] / static_cast<double>(cnt[static_cast<std::size_t>(b)]);
  }

  std::vector<double> tb(total_batch.begin(), total_batch.end());
  const auto tms = stats::mean_se(tb);
  res.total.value = tms.mean;
  res.total.std_error = tms.se;
  res.total.n_outer = opt.base_nodes;
  res.total.n_inner = static_cast<long>(pool.states.size());
  res.total.method = ustats.size() == 1 ? Method::Theorem2 : Method::Theorem3;

  std::map<int, double> grouped;
  for (std::size_t si = 0; si < res.per_sigma.size(); ++si)
    grouped[res.sigma_blocks[si]] += res.per_sigma[si].value;
  res.grouped.assign(grouped.begin(), grouped.end());
  return res;
}

Theorem1Result theorem1_identity_check(std::span<const UStatistic> ustats,
                                       const GibbsModel& model, const MuPool& pool,
                                       const MixedOptions& opt, long n_corr_nodes,
                                       long n_corr_inner, std::uint64_t seed) {
  require_pool(pool);
  const auto sorted = sorted_by_order(ustats);
  std::vector<int> orders;
  int q = 0;
  for (const auto& f : sorted) {
    orders.push_back(f.order);
    q += f.order;
  }
  if (q > 6)
    throw std::invalid_argument("theorem1_identity_check is limited to total order <= 6");
  const PartitionFamily fam = enumerate_partition_family(orders);
  const double mass = model.reference.total_mass(model.domain);

  Theorem1Result out;
  out.lhs = density_mixed_moment(ustats, model, pool, opt, derive_seed(seed, "t1lhs")).total;

  // the product expansion as plain U-statistics with symmetrized kernels
  auto shared_sorted = std::make_shared<std::vector<UStatistic>>(sorted);
  std::vector<UStatistic> pieces;
  for (const Partition& sigma : fam.members) {
    auto raw = [shared_sorted, sigma](std::span<const Particle> args) {
      return merged_tensor_eval(*shared_sorted, sigma, args);
    };
    pieces.push_back(make_ustat("piece", static_cast<int>(sigma.blocks.size()), raw, false));
  }

  std::array<double, kBatches> rhs_batch{};

  // Poisson product mean, term by term over the expansion
  double pois_value = 0, pois_var = 0;
  for (std::size_t si = 0; si < fam.members.size(); ++si) {
    const Partition& sigma = fam.members[si];
    const std::size_t nb = sigma.blocks.size();
    const std::string label = "t1pois" + std::to_string(si);
    const auto vals = par::map_indexed<double>(static_cast<std::size_t>(opt.base_nodes), [&](std::size_t i) {
      Rng rng(derive_seed(seed, label, i));
      std::vector<Particle> marks(nb);
      for (std::size_t t = 0; t < nb; ++t)
        marks[t] = model.reference.sample_mark(model.domain, rng);
      return merged_tensor_eval(sorted, sigma, marks);
    });
    const double scale = std::pow(mass, static_cast<double>(nb));
    const auto ms = batched(vals);
    pois_value += scale * ms.mean;
    pois_var += scale * ms.se * scale * ms.se;
    std::array<double, kBatches> sum{};
    std::array<long, kBatches> cnt{};
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const int b = batch_of(i, vals.size());
      sum[static_cast<std::size_t>(b)] += vals[i];
      cnt[static_cast<std::size_t>(b)]++;
    }
    for (int b = 0; b < kBatches; ++b)
      if (cnt[static_cast<std::size_t>(b)] > 0)
        rhs_batch[static_cast<std::size_t>(b)] +=
            scale * sum[static_cast<std::size_t>(b)] / static_cast<double>(cnt[static_cast<std::size_t>(b)]);
  }
  out.poisson_part.value = pois_value;
  out.poisson_part.std_error = std::sqrt(pois_var);
  out.poisson_part.method = Method::Slivnyak;

  // correction terms <T_n prod F, T_n p> / n!
  for (int n = 1; n <= q; ++n) {
    const std::string label = "t1corr" + std::to_string(n);
    const auto vals = par::map_indexed<double>(static_cast<std::size_t>(n_corr_nodes), [&](std::size_t i) {
      Rng rng(derive_seed(seed, label, i));
      std::vector<Particle> y(static_cast<std::size_t>(n));
      for (int t = 0; t < n; ++t)
        y[static_cast<std::size_t>(t)] = model.reference.sample_mark(model.domain, rng);
      double tf = 0;
      for (const UStatistic& piece : pieces)
        if (piece.order >= n)
          tf += tn_estimate(piece, y, model.reference, model.domain, mass, n_corr_inner, rng);
      // alternating pooled sum for T_n p
      const auto slice = pool_slice(pool, batch_of(i, static_cast<std::size_t>(n_corr_nodes)));
      double tp = 0;
      std::vector<Particle> subset;
      for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
        subset.clear();
        for (int t = 0; t < n; ++t)
          if (mask & (1ULL << t)) subset.push_back(y[static_cast<std::size_t>(t)]);
        const double sign = ((static_cast<std::size_t>(n) - subset.size()) % 2 == 0) ? 1.0 : -1.0;
        tp += sign * pooled_ci(model, subset, slice);
      }
      return tf * tp;
    });
    const double scale = std::pow(mass, n) / factorial(n);
    const auto ms = batched(vals);
    MomentEstimate term;
    term.value = scale * ms.mean;
    term.std_error = scale * ms.se;
    term.n_outer = n_corr_nodes;
    term.n_inner = n_corr_inner;
    term.method = Method::Chaos;
    out.correction_terms.push_back(term);
    std::array<double, kBatches> sum{};
    std::array<long, kBatches> cnt{};
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const int b = batch_of(i, vals.size());
      sum[static_cast<std::size_t>(b)] += vals[i];
      cnt[static_cast<std::size_t>(b)]++;
    }
    for (int b = 0; b < kBatches; ++b)
      if (cnt[static_cast<std::size_t>(b)] > 0)
        rhs_batch[static_cast<std::size_t>(b)] +=
            scale * sum[static_cast<std::size_t>(b)] / static_cast<double>(cnt[static_cast<std::size_t>(b)]);
  }

  std::vector<double> rb(rhs_batch.begin(), rhs_batch.end());
  const auto rms = stats::mean_se(rb);
  out.rhs.value = rms.mean;
  out.rhs.std_error = rms.se;
  out.rhs.n_outer = n_corr_nodes;
  out.rhs.n_inner = n_corr_inner;
  out.rhs.method = Method::Chaos;
  return out;
}

std::vector<SuiteEntry> model_moment_suite(const GibbsModel& model, const MuPool& pool,
                                           const MixedOptions& opt, std::uint64_t seed) {
  const auto gs = model_ustats(model);
  std::vector<std::pair<std::string, std::vector<UStatistic>>> targets;
  if (model.kind == ModelKind::SegmentModel) {
    targets = {{"EL", {gs[0]}},
               {"EN", {gs[1]}},
               {"EL2", {gs[0], gs[0]}},
               {"EN2", {gs[1], gs[1]}},
               {"ELN", {gs[0], gs[1]}}};
  } else if (model.kind == ModelKind::PlateModel) {
    targets = {{"ES", {gs[0]}},
               {"EL", {gs[1]}},
               {"EN", {gs[2]}},
               {"ES2", {gs[0], gs[0]}},
               {"EL2", {gs[1], gs[1]}},
               {"EN2", {gs[2], gs[2]}},
               {"ELN", {gs[1], gs[2]}},
               {"ESLN", {gs[0], gs[1], gs[2]}}};
  } else {
    throw std::invalid_argument("model_moment_suite expects a segment or plate model");
  }

  std::vector<SuiteEntry> out;
  std::uint64_t idx = 0;
  for (auto& [name, fs] : targets) {
    SuiteEntry entry;
    entry.target = name;
    for (const auto& f : fs) entry.orders.push_back(f.order);
    entry.result = density_mixed_moment(fs, model, pool, opt, derive_seed(seed, "suite", idx++));
    out.push_back(std::move(entry));
  }
  return out;
}

std::vector<CoefficientGroup> suite_coefficients(ModelKind kind, const std::string& target) {
  struct Comp {
    int order;
    long long num, den;
  };
  std::map<char, Comp> comp;
  if (kind == ModelKind::SegmentModel) {
    comp['L'] = {1, 1, 1};
    comp['N'] = {2, 1, 2};
  } else if (kind == ModelKind::PlateModel) {
    comp['S'] = {1, 1, 1};
    comp['L'] = {2, 1, 2};
    comp['N'] = {3, 1, 6};
  } else {
    throw std::invalid_argument("suite_coefficients expects a segment or plate model");
  }

  // target name: "E" followed by component letters, trailing "2" squares
  std::string t = target;
  if (t.empty() || t[0] != 'E') throw std::invalid_argument("unknown target " + target);
  t.erase(0, 1);
  bool square = false;
  if (!t.empty() && t.back() == '2') {
    square = true;
    t.pop_back();
  }
  std::vector<Comp> factors;
  for (char c : t) {
    auto it = comp.find(c);
    if (it == comp.end()) throw std::invalid_argument("unknown target " + target);
    factors.push_back(it->second);
    if (square) factors.push_back(it->second);
  }
  if (factors.empty()) throw std::invalid_argument("unknown target " + target);

  std::sort(factors.begin(), factors.end(), [](const Comp& a, const Comp& b) { return a.order > b.order; });
  std::vector<int> orders;
  long long num = 1, den = 1;
  for (const Comp& f : factors) {
    orders.push_back(f.order);
    num *= f.num;
    den *= f.den;
  }
  const PartitionFamily fam = enumerate_partition_family(orders);
  std::vector<CoefficientGroup> out;
  for (auto [blocks, count] : family_block_histogram(fam)) {
    CoefficientGroup g;
    g.block_count = blocks;
    g.count = count;
    g.weight_num = count * num;
    g.weight_den = den;
    const long long d = llgcd(g.weight_num, g.weight_den);
    g.weight_num /= d;
    g.weight_den /= d;
    out.push_back(g);
  }
  return out;
}

double log_functional_Hm(const GibbsModel& model, double log_c_hat, int component, int m_power,
                         const Configuration& x) {
  if (component < 0 || component >= model.stat_count())
    throw std::invalid_argument("log_functional_Hm: bad component");
  std::vector<double> shifted = model.nu;
  shifted[static_cast<std::size_t>(component)] += static_cast<double>(m_power);
  return -log_c_hat + dot(statistics_G(model, x), shifted);
}

JensenResult jensen_gap(const GibbsModel& model, int component, int m_power, long n_importance,
                        long n_poisson, std::uint64_t seed) {
  if (component < 0 || component >= model.stat_count())
    throw std::invalid_argument("jensen_gap: bad component");
  JensenResult out;

  // left side: log of the importance estimate of E F^m(mu), F = exp(G_c)
  {
    struct Draw {
      double a, w;
    };
    const auto draws =
        par::map_indexed<Draw>(static_cast<std::size_t>(n_importance), [&](std::size_t i) {
          Rng rng(derive_seed(seed, "jensenA", i));
          const Configuration eta = sample_poisson(model.reference, model.domain, rng);
          const StatVec g = statistics_G(model, eta);
          const double w = std::exp(dot(g, model.nu));
          const double a = std::exp(dot(g, model.nu) + m_power * g[component]);
          return Draw{a, w};
        });
    std::vector<double> as(draws.size()), ws(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) {
      as[i] = draws[i].a;
      ws[i] = draws[i].w;
    }
    const double abar = stats::mean(as), wbar = stats::mean(ws);
    if (!(abar > 0) || !(wbar > 0))
      throw std::runtime_error("jensen_gap: degenerate importance weights");
    std::vector<double> u(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) u[i] = as[i] / abar - ws[i] / wbar;
    out.lhs_log.value = std::log(abar / wbar);
    out.lhs_log.std_error =
        std::sqrt(stats::sample_variance(u) / static_cast<double>(n_importance));
    out.lhs_log.n_outer = n_importance;
    out.lhs_log.method = Method::Importance;
  }

  // right side: E H_m(eta) with the estimated normalizing constant
  {
    const auto hs = par::map_indexed<double>(static_cast<std::size_t>(n_poisson), [&](std::size_t i) {
      Rng rng(derive_seed(seed, "jensenB", i));
      const Configuration eta = sample_poisson(model.reference, model.domain, rng);
      const StatVec g = statistics_G(model, eta);
      return dot(g, model.nu) + m_power * g[component];
    });
    const auto hms = stats::mean_se(hs);
    const MomentEstimate logc =
        log_normalizing_constant_estimate(model, n_poisson, derive_seed(seed, "jensenC"));
    out.rhs.value = hms.mean - logc.value;
    out.rhs.std_error = std::sqrt(hms.se * hms.se + logc.std_error * logc.std_error);
    out.rhs.n_outer = n_poisson;
    out.rhs.method = Method::Slivnyak;
  }
  return out;
}

}  // namespace ppmom
