#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ppmom/mcmc.hpp"
#include "ppmom/moments.hpp"
#include "ppmom/process.hpp"

namespace ppmom {

// Everything one run needs, loaded from a key = value text file. Unknown
// keys are rejected and all constraint violations are reported together.
struct ExperimentConfig {
  // model
  std::string model_kind = "strauss";  // segment | plate | strauss
  std::vector<double> window = {0, 1, 0, 1};
  double mark_bound = 1.0;
  double rho = 1.0;
  std::string q_dist = "uniform";
  std::string v_dist = "uniform";
  double nu1 = 0, nu2 = 0, nu3 = 0;
  double beta = 1, gamma = 1, range = 0.1;
  std::vector<double> cbox;  // counting box for point targets

  // sampler
  long chain_burn_in = 10000;
  long chain_thinning = 0;
  long chain_samples = 500;
  double chain_move_prob = 0.2;

  // estimators
  long est_nodes = 20000;
  long est_nodes_max = 2000000;
  long est_inner = 64;
  long est_replicates = 10000;
  std::vector<std::string> targets;

  // clt
  std::vector<double> clt_levels = {1, 2, 4, 8};
  long clt_replicates = 2000;

  std::uint64_t seed = 1;
  std::string out = "results.csv";

  std::string canonical_text() const;
  std::string digest() const;
  GibbsModel build_model() const;
};

struct ConfigParseResult {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> errors;
};

ConfigParseResult load_config_text(const std::string& text);
ConfigParseResult load_config_file(const std::string& path);

struct ResultRecord {
  std::string target;
  std::string method;
  double value = 0;
  double std_error = 0;
  long n_outer = 0;
  long n_inner = 0;
  std::uint64_t seed = 0;
  double wall_time_s = 0;
  std::string config_digest;
};

// Runs every requested target through the theorem, simulation and importance
// paths. Individual estimator failures are recorded as NaN rows and the run
// continues. Timing is off by default so identical runs produce identical
// bytes; pass with_timing for real wall times.
std::vector<ResultRecord> run_experiment(const ExperimentConfig& cfg, bool with_timing = false);

std::string results_to_csv(std::span<const ResultRecord> records);

// seed derivation re-exported for the CLI (hash of master, label, index)
using ppmom::derive_seed;

}  // namespace ppmom
