#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ppmom/estimate.hpp"
#include "ppmom/mcmc.hpp"
#include "ppmom/partitions.hpp"
#include "ppmom/process.hpp"
#include "ppmom/ustat.hpp"

namespace ppmom {

// Standard errors of pooled estimators come from 20 paired batches of
// integration nodes and pool states; pairing absorbs the correlation that
// pool reuse introduces.
inline constexpr int kBatches = 20;

// Sampled states of the target process, reused across integration nodes to
// estimate E lambda*_n(.; mu).
struct MuPool {
  std::vector<Configuration> states;
  std::uint64_t seed = 0;
};

MuPool make_mu_pool(const GibbsModel& model, const ChainParams& params);

// E F(eta) = integral of f over lambda^k (Slivnyak-Mecke)
MomentEstimate poisson_mean_ustat(const UStatistic& F, const IntensityMeasure& m,
                                  const Domain& dom, long n_nodes, std::uint64_t seed);

// var F(eta) by the chaos formula; squared inner integrals use two
// independent inner replicates per outer node
MomentEstimate poisson_variance_ustat(const UStatistic& F, const IntensityMeasure& m,
                                      const Domain& dom, long n_nodes, long n_inner,
                                      std::uint64_t seed);

// cov(F, Ft) = sum over n of <T_n F, T_n Ft> / n!
MomentEstimate poisson_covariance_chaos(const UStatistic& F, const UStatistic& Ft,
                                        const IntensityMeasure& m, const Domain& dom,
                                        long n_nodes, long n_inner, std::uint64_t seed);

struct SeriesOptions {
  int n_max = -1;             // -1: choose from the intensity mass
  long nodes_per_term = 20000;
  double tail_tol = 1e-4;     // relative truncation tolerance
};

struct SeriesEstimate {
  MomentEstimate estimate;
  double truncation_bound = 0;
  bool tail_ok = true;
  int n_max = 0;
};

// expectation of a nonnegative functional via the explicit Poisson series
SeriesEstimate poisson_series_expectation(const Functional& F, const IntensityMeasure& m,
                                          const Domain& dom, const SeriesOptions& opt,
                                          std::uint64_t seed);

// T_n p as the alternating sum of pooled conditional-intensity means
MomentEstimate kernel_Tn_density(const GibbsModel& model, int n,
                                 std::span<const Particle> points, const MuPool& pool);

// E F(mu) = integral of f times E lambda*_k over lambda^k
MomentEstimate density_mean_ustat(const UStatistic& F, const GibbsModel& model,
                                  const MuPool& pool, long n_nodes, std::uint64_t seed);

struct MixedOptions {
  long base_nodes = 20000;
  long max_nodes = 4000000;
  long pilot_nodes = 4000;
  long target_hits = 2000;  // wanted nonzero kernel evaluations per partition
};

struct MixedMomentResult {
  MomentEstimate total;
  std::vector<int> sigma_blocks;            // block count per partition
  std::vector<MomentEstimate> per_sigma;    // per-partition integral
  std::vector<std::pair<int, double>> grouped;  // summed by block count, ascending
};

// E prod F_i(mu) as the partition sum over the admissible family; kernels
// that evaluate to zero skip the pooled conditional-intensity average
MixedMomentResult density_mixed_moment(std::span<const UStatistic> ustats,
                                       const GibbsModel& model, const MuPool& pool,
                                       const MixedOptions& opt, std::uint64_t seed);

struct Theorem1Result {
  MomentEstimate lhs;             // density mixed moment
  MomentEstimate rhs;             // Poisson mean plus kernel inner products
  MomentEstimate poisson_part;
  std::vector<MomentEstimate> correction_terms;  // one per chaos order
};

Theorem1Result theorem1_identity_check(std::span<const UStatistic> ustats,
                                       const GibbsModel& model, const MuPool& pool,
                                       const MixedOptions& opt, long n_corr_nodes,
                                       long n_corr_inner, std::uint64_t seed);

struct SuiteEntry {
  std::string target;
  std::vector<int> orders;
  MixedMomentResult result;
};

// every first and second moment display of the built-in geometric models,
// plus the mixed moments E[LN] and (plates) E[SLN]
std::vector<SuiteEntry> model_moment_suite(const GibbsModel& model, const MuPool& pool,
                                           const MixedOptions& opt, std::uint64_t seed);

struct CoefficientGroup {
  int block_count = 0;
  long long count = 0;        // partitions with this block count
  long long weight_num = 0;   // count times the kernel prefactors, reduced
  long long weight_den = 1;
};

// exact per-block-count weights of a suite target's partition expansion
std::vector<CoefficientGroup> suite_coefficients(ModelKind kind, const std::string& target);

// H_m = m log F + log p with the estimated log normalizing constant;
// `component` picks which statistic F exponentiates
double log_functional_Hm(const GibbsModel& model, double log_c_hat, int component, int m_power,
                         const Configuration& x);

struct JensenResult {
  MomentEstimate lhs_log;  // log of the importance estimate of E F^m(mu)
  MomentEstimate rhs;      // Poisson-sample mean of H_m
};

JensenResult jensen_gap(const GibbsModel& model, int component, int m_power, long n_importance,
                        long n_poisson, std::uint64_t seed);

}  // namespace ppmom
