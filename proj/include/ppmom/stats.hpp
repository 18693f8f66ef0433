#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ppmom::stats {

double mean(std::span<const double> v);

struct MeanSE {
  double mean = 0;
  double se = 0;
  std::size_t n = 0;
};

MeanSE mean_se(std::span<const double> v);

// mean and standard error from consecutive batch means; used for correlated
// sequences (MCMC output, pooled estimators)
MeanSE batch_mean_se(std::span<const double> v, int n_batches);

double sample_variance(std::span<const double> v);
double sample_covariance(std::span<const double> a, std::span<const double> b);

double normal_cdf(double x);

// upper tail of the chi-square distribution with dof degrees of freedom
double chi2_sf(double x, int dof);

struct KSResult {
  double stat = 0;
  double p = 1;
};

// one-sample Kolmogorov-Smirnov test; sample is copied and sorted
KSResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf);

// asymptotic KS p-value (Stephens' small-sample correction)
double ks_p_value(double d, std::size_t n);

struct Chi2Result {
  double stat = 0;
  double p = 1;
  int dof = 0;
};

// goodness of fit of observed counts against Poisson(mean); bins with small
// expectation are merged into the tail
Chi2Result poisson_count_gof(std::span<const long> counts, double mean);

double autocorrelation(std::span<const double> x, int lag);

// eigenvalues of a dense symmetric n x n matrix (row-major), cyclic Jacobi;
// meant for the small covariance matrices here (n <= 4)
std::vector<double> sym_eigenvalues(std::vector<double> m, int n);

}  // namespace ppmom::stats
