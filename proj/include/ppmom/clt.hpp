#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ppmom/estimate.hpp"
#include "ppmom/process.hpp"
#include "ppmom/ustat.hpp"

namespace ppmom {

// Centered and rescaled U-statistic vectors under the intensity a * lambda:
// component i is a^-(k_i - 1/2) (F_i - E F_i).
struct RescaledSample {
  double level = 1;
  std::vector<int> orders;
  std::vector<std::vector<double>> components;  // [component][replicate]
  std::vector<double> centering;                // E F_i under a * lambda

  std::size_t size() const { return components.empty() ? 0 : components[0].size(); }
};

struct CovMatrix {
  int dim = 0;
  std::array<double, 9> a{};

  double& at(int i, int j) { return a[static_cast<std::size_t>(i * dim + j)]; }
  double at(int i, int j) const { return a[static_cast<std::size_t>(i * dim + j)]; }
  double frobenius() const;
  double min_eigenvalue() const;
};

struct CovEstimate {
  CovMatrix value;
  CovMatrix se;
};

RescaledSample rescale_ustats(std::span<const UStatistic> ustats, const IntensityMeasure& m,
                              const Domain& dom, double a, long n_replicates, long mean_nodes,
                              std::uint64_t seed);

// C_ij = integral of T_1 F_i times T_1 F_j over lambda (a = 1); each factor
// is estimated with its own inner stream so the product stays unbiased
CovEstimate asymptotic_covariance(std::span<const UStatistic> ustats, const IntensityMeasure& m,
                                  const Domain& dom, long n_nodes, long n_inner,
                                  std::uint64_t seed);

// integral of |T_1 F_i|^3 over lambda, one value per statistic
std::vector<MomentEstimate> third_moment_condition(std::span<const UStatistic> ustats,
                                                   const IntensityMeasure& m, const Domain& dom,
                                                   long n_nodes, long n_inner,
                                                   std::uint64_t seed);

struct GaussianDiagnostic {
  CovMatrix empirical;
  double frobenius_abs = 0;
  double frobenius_rel = 0;
  std::vector<double> ks_stat;
  std::vector<double> ks_p;
};

// covariance Frobenius error plus marginal KS tests against N(0, C_ii);
// the proxy for the paper-style smooth-metric convergence check
GaussianDiagnostic gaussian_diagnostic(const RescaledSample& sample, const CovMatrix& C);

// The closed-form covariance path for the segment statistics (L, N):
// C11 = int l^2, C22 = int lambda(hit set)^2, C12 = int l lambda(hit set).
// Independent code path used to cross-check the generic estimator.
CovEstimate segment_example_covariance(const IntensityMeasure& m, const Domain& dom,
                                       long n_nodes, long n_inner, std::uint64_t seed);

}  // namespace ppmom
