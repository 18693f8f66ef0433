#include "ppmom/clt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ppmom/moments.hpp"
#include "ppmom/parallel.hpp"
#include "ppmom/rng.hpp"
#include "ppmom/stats.hpp"

namespace ppmom {

double CovMatrix::frobenius() const {
  double s = 0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) s += at(i, j) * at(i, j);
  return std::sqrt(s);
}

double CovMatrix::min_eigenvalue() const {
  std::vector<double> m(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m[static_cast<std::size_t>(i * dim + j)] = at(i, j);
  return stats::sym_eigenvalues(std::move(m), dim).front();
}

RescaledSample rescale_ustats(std::span<const UStatistic> ustats, const IntensityMeasure& m,
                              const Domain& dom, double a, long n_replicates, long mean_nodes,
                              std::uint64_t seed) {
  if (!(a >= 1.0)) throw std::invalid_argument("rescale_ustats needs level a >= 1");
  const int l = static_cast<int>(ustats.size());
  RescaledSample out;
  out.level = a;

  // high-precision centering under a * lambda: E F under the scaled measure
  // is a^k times the base-measure mean
  for (int i = 0; i < l; ++i) {
    out.orders.push_back(ustats[static_cast<std::size_t>(i)].order);
    const auto base = poisson_mean_ustat(ustats[static_cast<std::size_t>(i)], m, dom, mean_nodes,
                                         derive_seed(seed, "center", static_cast<std::uint64_t>(i)));
    out.centering.push_back(std::pow(a, ustats[static_cast<std::size_t>(i)].order) * base.value);
  }

  struct Row {
    std::array<double, 4> v{};
  };
  const auto rows = par::map_indexed<Row>(static_cast<std::size_t>(n_replicates), [&](std::size_t r) {
    Rng rng(derive_seed(seed, "replicate", r));
    const Configuration eta = sample_poisson_scaled(m, dom, a, rng);
    Row row;
    for (int i = 0; i < l; ++i) {
      const double k = ustats[static_cast<std::size_t>(i)].order;
      const double f = eval_ustat(ustats[static_cast<std::size_t>(i)], eta);
      row.v[static_cast<std::size_t>(i)] =
          std::pow(a, -(k - 0.5)) * (f - out.centering[static_cast<std::size_t>(i)]);
    }
    return row;
  });

  out.components.assign(static_cast<std::size_t>(l), {});
  for (int i = 0; i < l; ++i) {
    out.components[static_cast<std::size_t>(i)].resize(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
      out.components[static_cast<std::size_t>(i)][r] = rows[r].v[static_cast<std::size_t>(i)];
  }
  return out;
}

namespace {

double factorial(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// inner estimate of T_1 F(y) = k integral f(y, x_2..x_k) over lambda^(k-1)
double t1_estimate(const UStatistic& F, const Particle& y, const IntensityMeasure& m,
                   const Domain& dom, double mass, long n_inner, Rng& rng) {
  const int k = F.order;
  if (k == 1) {
    const Particle args[1] = {y};
    return F.kernel(args);
  }
  std::vector<Particle> args(static_cast<std::size_t>(k));
  args[0] = y;
  double s = 0;
  for (long r = 0; r < n_inner; ++r) {
    for (int t = 1; t < k; ++t) args[static_cast<std::size_t>(t)] = m.sample_mark(dom, rng);
    s += F.kernel(args);
  }
  return factorial(k) / factorial(k - 1) * std::pow(mass, k - 1) * s / static_cast<double>(n_inner);
}

}  // namespace

CovEstimate asymptotic_covariance(std::span<const UStatistic> ustats, const IntensityMeasure& m,
                                  const Domain& dom, long n_nodes, long n_inner,
                                  std::uint64_t seed) {
  const int l = static_cast<int>(ustats.size());
  if (l < 1 || l > 3) throw std::invalid_argument("asymptotic_covariance supports 1..3 statistics");
  const double mass = m.total_mass(dom);

  struct Node {
    std::array<double, 3> ta{}, tb{};
  };
  const auto nodes = par::map_indexed<Node>(static_cast<std::size_t>(n_nodes), [&](std::size_t i) {
    Rng rng(derive_seed(seed, "asco", i));
    const Particle y = m.sample_mark(dom, rng);
    Node node;
    for (int s = 0; s < l; ++s) {
      node.ta[static_cast<std::size_t>(s)] =
          t1_estimate(ustats[static_cast<std::size_t>(s)], y, m, dom, mass, n_inner, rng);
      node.tb[static_cast<std::size_t>(s)] =
          t1_estimate(ustats[static_cast<std::size_t>(s)], y, m, dom, mass, n_inner, rng);
    }
    return node;
  });

  CovEstimate out;
  out.value.dim = out.se.dim = l;
  std::vector<double> vals(nodes.size());
  for (int i = 0; i < l; ++i) {
    for (int j = i; j < l; ++j) {
      for (std::size_t t = 0; t < nodes.size(); ++t)
        vals[t] = nodes[t].ta[static_cast<std::size_t>(i)] * nodes[t].tb[static_cast<std::size_t>(j)];
      const auto ms = stats::mean_se(vals);
      out.value.at(i, j) = out.value.at(j, i) = mass * ms.mean;
      out.se.at(i, j) = out.se.at(j, i) = mass * ms.se;
    }
  }
  return out;
}

std::vector<MomentEstimate> third_moment_condition(std::span<const UStatistic> ustats,
                                                   const IntensityMeasure& m, const Domain& dom,
                                                   long n_nodes, long n_inner,
                                                   std::uint64_t seed) {
  const double mass = m.total_mass(dom);
  std::vector<MomentEstimate> out;
  for (std::size_t s = 0; s < ustats.size(); ++s) {
    const UStatistic& F = ustats[s];
    const std::string label = "third" + std::to_string(s);
    const auto vals = par::map_indexed<double>(static_cast<std::size_t>(n_nodes), [&](std::size_t i) {
      Rng rng(derive_seed(seed, label, i));
      const Particle y = m.sample_mark(dom, rng);
      if (F.order == 1) {
        const Particle args[1] = {y};
        const double f = F.kernel(args);
        return std::abs(f * f * f);
      }
      // three independent replicates make the product unbiased for T^3;
      // the built-in kernels are nonnegative, so |T|^3 = T^3
      const double t1 = t1_estimate(F, y, m, dom, mass, n_inner, rng);
      const double t2 = t1_estimate(F, y, m, dom, mass, n_inner, rng);
      const double t3 = t1_estimate(F, y, m, dom, mass, n_inner, rng);
      return std::abs(t1 * t2 * t3);
    });
    const auto ms = stats::mean_se(vals);
    MomentEstimate e;
    e.value = mass * ms.mean;
    e.std_error = mass * ms.se;
    e.n_outer = n_nodes;
    e.n_inner = n_inner;
    e.method = Method::Chaos;
    out.push_back(e);
  }
  return out;
}

GaussianDiagnostic gaussian_diagnostic(const RescaledSample& sample, const CovMatrix& C) {
  if (sample.size() < 1000)
    throw std::invalid_argument("gaussian_diagnostic needs at least 1000 replicates");
  const int l = static_cast<int>(sample.components.size());
  if (l != C.dim) throw std::invalid_argument("gaussian_diagnostic: dimension mismatch");

  GaussianDiagnostic out;
  out.empirical.dim = l;
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j)
      out.empirical.at(i, j) = stats::sample_covariance(sample.components[static_cast<std::size_t>(i)],
                                                        sample.components[static_cast<std::size_t>(j)]);
  double fa = 0;
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j) {
      const double d = out.empirical.at(i, j) - C.at(i, j);
      fa += d * d;
    }
  out.frobenius_abs = std::sqrt(fa);
  out.frobenius_rel = C.frobenius() > 0 ? out.frobenius_abs / C.frobenius() : 0.0;

  for (int i = 0; i < l; ++i) {
    const double sd = std::sqrt(C.at(i, i));
    const auto ks = stats::ks_test(sample.components[static_cast<std::size_t>(i)],
                                   [sd](double x) { return stats::normal_cdf(x / sd); });
    out.ks_stat.push_back(ks.stat);
    out.ks_p.push_back(ks.p);
  }
  return out;
}

CovEstimate segment_example_covariance(const IntensityMeasure& m, const Domain& dom,
                                       long n_nodes, long n_inner, std::uint64_t seed) {
  if (dom.kind != ParticleKind::Segment)
    throw std::invalid_argument("segment_example_covariance needs a segment domain");
  const double mass = m.total_mass(dom);

  struct Node {
    double l2, lt, tt;
  };
  const auto nodes = par::map_indexed<Node>(static_cast<std::size_t>(n_nodes), [&](std::size_t i) {
    Rng rng(derive_seed(seed, "excov", i));
    const Particle y = m.sample_mark(dom, rng);
    const Segment2D ys = y.as_segment();
    // lambda({s : s hits y}) with two independent replicates for the square
    double rep[2];
    for (int r = 0; r < 2; ++r) {
      long hits = 0;
      for (long q = 0; q < n_inner; ++q) {
        const Particle s = m.sample_mark(dom, rng);
        if (segments_intersect(s.as_segment(), ys)) ++hits;
      }
      rep[r] = mass * static_cast<double>(hits) / static_cast<double>(n_inner);
    }
    return Node{ys.length * ys.length, ys.length * rep[0], rep[0] * rep[1]};
  });

  std::vector<double> v(nodes.size());
  CovEstimate out;
  out.value.dim = out.se.dim = 2;
  auto fill = [&](auto pick, int i, int j) {
    for (std::size_t t = 0; t < nodes.size(); ++t) v[t] = pick(nodes[t]);
    const auto ms = stats::mean_se(v);
    out.value.at(i, j) = out.value.at(j, i) = mass * ms.mean;
    out.se.at(i, j) = out.se.at(j, i) = mass * ms.se;
  };
  fill([](const Node& n) { return n.l2; }, 0, 0);
  fill([](const Node& n) { return n.lt; }, 0, 1);
  fill([](const Node& n) { return n.tt; }, 1, 1);
  return out;
}

}  // namespace ppmom
