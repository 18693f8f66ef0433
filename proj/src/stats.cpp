#include "ppmom/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "ppmom/parallel.hpp"

namespace ppmom::stats {

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return par::sum_compensated(v) / static_cast<double>(v.size());
}

MeanSE mean_se(std::span<const double> v) {
  MeanSE r;
  r.n = v.size();
  if (v.empty()) return r;
  r.mean = mean(v);
  if (v.size() < 2) return r;
  double ss = 0;
  for (double x : v) ss += (x - r.mean) * (x - r.mean);
  r.se = std::sqrt(ss / (static_cast<double>(v.size() - 1) * static_cast<double>(v.size())));
  return r;
}

MeanSE batch_mean_se(std::span<const double> v, int n_batches) {
  if (n_batches < 2 || v.size() < static_cast<std::size_t>(2 * n_batches))
    return mean_se(v);
  std::vector<double> bm(static_cast<std::size_t>(n_batches));
  const std::size_t n = v.size();
  for (int b = 0; b < n_batches; ++b) {
    std::size_t lo = n * static_cast<std::size_t>(b) / static_cast<std::size_t>(n_batches);
    std::size_t hi = n * static_cast<std::size_t>(b + 1) / static_cast<std::size_t>(n_batches);
    bm[static_cast<std::size_t>(b)] = mean(v.subspan(lo, hi - lo));
  }
  MeanSE r = mean_se(bm);
  r.n = v.size();
  return r;
}

double sample_variance(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss / static_cast<double>(v.size() - 1);
}

double sample_covariance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("covariance: size mismatch");
  if (a.size() < 2) return 0.0;
  const double ma = mean(a), mb = mean(b);
  double ss = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ss += (a[i] - ma) * (b[i] - mb);
  return ss / static_cast<double>(a.size() - 1);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double chi2_sf(double x, int dof) {
  if (x <= 0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

double ks_p_value(double d, std::size_t n) {
  if (d <= 0) return 1.0;
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  double sum = 0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) *
                        std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

KSResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf) {
  KSResult r;
  if (sample.empty()) return r;
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  r.stat = d;
  r.p = ks_p_value(d, sample.size());
  return r;
}

Chi2Result poisson_count_gof(std::span<const long> counts, double mean_) {
  Chi2Result r;
  if (counts.empty() || mean_ <= 0) return r;
  const double n = static_cast<double>(counts.size());
  long max_count = *std::max_element(counts.begin(), counts.end());

  // expected pmf, accumulated from k = 0
  std::vector<double> pmf;
  double logm = std::log(mean_);
  for (long k = 0; k <= max_count; ++k)
    pmf.push_back(std::exp(k * logm - mean_ - std::lgamma(static_cast<double>(k) + 1.0)));

  std::vector<long> obs(pmf.size() + 1, 0);
  for (long c : counts) obs[static_cast<std::size_t>(std::min<long>(c, max_count))]++;
  std::vector<double> expd(pmf.size() + 1, 0.0);
  double tail = 1.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    expd[k] = n * pmf[k];
    tail -= pmf[k];
  }
  expd.back() = n * std::max(tail, 0.0);

  // merge adjacent low-expectation bins (target >= 5 per bin)
  std::vector<double> mobs, mexp;
  double co = 0, ce = 0;
  for (std::size_t k = 0; k < expd.size(); ++k) {
    co += static_cast<double>(obs[k]);
    ce += expd[k];
    if (ce >= 5.0) {
      mobs.push_back(co);
      mexp.push_back(ce);
      co = ce = 0;
    }
  }
  if (ce > 0 || co > 0) {
    if (!mexp.empty()) {
      mobs.back() += co;
      mexp.back() += ce;
    } else {
      mobs.push_back(co);
      mexp.push_back(ce);
    }
  }
  if (mexp.size() < 2) return r;
  double stat = 0;
  for (std::size_t k = 0; k < mexp.size(); ++k)
    stat += (mobs[k] - mexp[k]) * (mobs[k] - mexp[k]) / mexp[k];
  r.stat = stat;
  r.dof = static_cast<int>(mexp.size()) - 1;
  r.p = chi2_sf(stat, r.dof);
  return r;
}

double autocorrelation(std::span<const double> x, int lag) {
  if (lag <= 0 || x.size() <= static_cast<std::size_t>(lag) + 1) return 0.0;
  const double m = mean(x);
  double num = 0, den = 0;
  for (std::size_t i = 0; i < x.size(); ++i) den += (x[i] - m) * (x[i] - m);
  for (std::size_t i = 0; i + static_cast<std::size_t>(lag) < x.size(); ++i)
    num += (x[i] - m) * (x[i + static_cast<std::size_t>(lag)] - m);
  return den > 0 ? num / den : 0.0;
}

std::vector<double> sym_eigenvalues(std::vector<double> a, int n) {
  if (n <= 0 || a.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
    throw std::invalid_argument("sym_eigenvalues: bad shape");
  auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i * n + j)]; };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(at(p, q)) < 1e-300) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * at(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = at(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

}  // namespace ppmom::stats
