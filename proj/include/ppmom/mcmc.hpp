#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ppmom/estimate.hpp"
#include "ppmom/process.hpp"
#include "ppmom/ustat.hpp"

namespace ppmom {

struct ChainParams {
  long burn_in = 10000;
  long thinning = 0;  // 0: ten times the reference expected count
  long n_samples = 1000;
  double move_prob = 0.2;
  std::uint64_t seed = 1;

  void validate() const;
  long effective_thinning(const GibbsModel& model) const;
};

enum class ProposalType { Birth = 0, Death = 1, Move = 2 };

struct ChainOutput {
  std::vector<Configuration> states;
  std::array<long, 3> proposed{};
  std::array<long, 3> accepted{};
  std::vector<long> count_trace;          // configuration size after every step
  std::vector<signed char> step_type;     // ProposalType per step
  std::vector<unsigned char> step_accepted;

  double acceptance_rate(ProposalType t) const;
};

// Metropolis-Hastings acceptance probabilities of the birth-death-move
// sampler; exposed so the detailed-balance identity can be checked directly.
double birth_acceptance(const GibbsModel& model, const Configuration& x, const Particle& u);
double death_acceptance(const GibbsModel& model, const Configuration& x, std::size_t index);

// One step of the sampler (stationary for the unnormalized density times the
// reference Poisson law). Death proposals on an empty state auto-reject.
Configuration bdm_step(const GibbsModel& model, const Configuration& x, double move_prob, Rng& rng);

ChainOutput run_chain(const GibbsModel& model, const ChainParams& params);

// step,count,type,accepted per line
std::string chain_diagnostics_csv(const ChainOutput& out);

// Self-normalized estimate of E F^m(mu) from reference Poisson draws with
// weights exp(nu . G); standard error by the delta method.
MomentEstimate importance_estimate(const GibbsModel& model, const Functional& F, int m_power,
                                   long n_poisson, std::uint64_t seed);

// c_nu = E exp(nu . G(eta)) and its logarithm
MomentEstimate normalizing_constant_estimate(const GibbsModel& model, long n_poisson,
                                             std::uint64_t seed);
MomentEstimate log_normalizing_constant_estimate(const GibbsModel& model, long n_poisson,
                                                 std::uint64_t seed);

}  // namespace ppmom
