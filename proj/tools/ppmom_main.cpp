// Command line front end: sample configurations, run estimator suites,
// CLT diagnostics, partition tables and the quick invariant checks.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ppmom/clt.hpp"
#include "ppmom/config_io.hpp"
#include "ppmom/experiment.hpp"
#include "ppmom/moments.hpp"
#include "ppmom/parallel.hpp"
#include "ppmom/partitions.hpp"

namespace {

using namespace ppmom;

struct Common {
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = 0;
};

ExperimentConfig load_or_die(const Common& c) {
  auto res = load_config_file(c.config_path);
  if (!res.config) {
    std::cerr << "config errors:\n";
    for (const auto& e : res.errors) std::cerr << "  " << e << "\n";
    std::exit(2);
  }
  ExperimentConfig cfg = *res.config;
  if (c.seed_set) cfg.seed = c.seed;
  if (!c.out_path.empty()) cfg.out = c.out_path;
  return cfg;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream f(path);
  if (!f) {
    std::cerr << "cannot write " << path << "\n";
    std::exit(2);
  }
  f << body;
}

int cmd_sample(const Common& c, long count, bool use_chain) {
  const ExperimentConfig cfg = load_or_die(c);
  const GibbsModel model = cfg.build_model();
  std::vector<Configuration> configs;
  if (use_chain) {
    ChainParams params;
    params.burn_in = cfg.chain_burn_in;
    params.thinning = cfg.chain_thinning;
    params.n_samples = count > 0 ? count : cfg.chain_samples;
    params.move_prob = cfg.chain_move_prob;
    params.seed = derive_seed(cfg.seed, "sample-chain");
    const ChainOutput out = run_chain(model, params);
    configs = out.states;
    write_file(cfg.out + ".diag.csv", chain_diagnostics_csv(out));
  } else {
    const long n = count > 0 ? count : cfg.chain_samples;
    for (long i = 0; i < n; ++i) {
      Rng rng(derive_seed(cfg.seed, "sample", static_cast<std::uint64_t>(i)));
      configs.push_back(sample_poisson(model.reference, model.domain, rng));
    }
  }
  write_file(cfg.out, write_configurations(configs));
  std::cout << "wrote " << configs.size() << " configurations to " << cfg.out << "\n";
  return 0;
}

int cmd_estimate(const Common& c, bool timing) {
  const ExperimentConfig cfg = load_or_die(c);
  const auto records = run_experiment(cfg, timing);
  write_file(cfg.out, results_to_csv(records));
  std::cout << "wrote " << records.size() << " rows to " << cfg.out << "\n";
  for (const auto& r : records)
    if (r.method.rfind("error:", 0) == 0) {
      std::cerr << "estimator failure on " << r.target << ": " << r.method << "\n";
      return 1;
    }
  return 0;
}

int cmd_clt(const Common& c) {
  const ExperimentConfig cfg = load_or_die(c);
  const GibbsModel model = cfg.build_model();
  if (model.kind != ModelKind::SegmentModel) {
    std::cerr << "clt currently drives the segment statistics (L, N)\n";
    return 2;
  }
  const auto fs = model_ustats(model);
  const auto cov = asymptotic_covariance(fs, model.reference, model.domain, cfg.est_nodes,
                                         cfg.est_inner, derive_seed(cfg.seed, "clt-cov"));
  std::string csv = "level,component,empirical_var,analytic_C,frobenius_err,ks_stat,ks_p\n";
  char buf[256];
  for (double a : cfg.clt_levels) {
    const auto sample = rescale_ustats(fs, model.reference, model.domain, a, cfg.clt_replicates,
                                       cfg.est_nodes_max, derive_seed(cfg.seed, "clt-sample"));
    const auto diag = gaussian_diagnostic(sample, cov.value);
    for (int i = 0; i < cov.value.dim; ++i) {
      std::snprintf(buf, sizeof buf, "%g,%d,%.10g,%.10g,%.10g,%.10g,%.10g\n", a, i,
                    diag.empirical.at(i, i), cov.value.at(i, i), diag.frobenius_rel,
                    diag.ks_stat[static_cast<std::size_t>(i)],
                    diag.ks_p[static_cast<std::size_t>(i)]);
      csv += buf;
    }
  }
  write_file(cfg.out, csv);
  std::cout << "wrote " << cfg.out << "\n";
  return 0;
}

int cmd_partitions(const std::string& orders_str, int max_total, const std::string& out_path) {
  std::string csv = "orders,j_vector,A,block_count\n";
  auto emit_orders = [&](const std::vector<int>& orders) {
    std::string oname;
    for (std::size_t i = 0; i < orders.size(); ++i) {
      if (i) oname += '+';
      oname += std::to_string(orders[i]);
    }
    const PartitionFamily fam = enumerate_partition_family(orders);
    const int k1 = orders[0];
    if (orders.size() == 1) {
      csv += oname + ",-,1," + std::to_string(k1) + "\n";
    } else {
      std::vector<int> j(orders.size() - 1, 0);
      while (true) {
        const auto a = coefficient_A(orders, j);
        if (a > 0) {
          std::string jname;
          int blocks = k1;
          for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) jname += '+';
            jname += std::to_string(j[i]);
            blocks += j[i];
          }
          csv += oname + "," + jname + "," + std::to_string(a) + "," + std::to_string(blocks) + "\n";
        }
        std::size_t pos = 0;
        while (pos < j.size()) {
          if (j[pos] < orders[pos + 1]) {
            ++j[pos];
            break;
          }
          j[pos] = 0;
          ++pos;
        }
        if (pos == j.size()) break;
      }
    }
    csv += oname + ",card," + std::to_string(fam.members.size()) + ",0\n";
  };

  if (!orders_str.empty()) {
    std::vector<int> orders;
    std::size_t pos = 0;
    while (pos < orders_str.size()) {
      std::size_t c = orders_str.find(',', pos);
      if (c == std::string::npos) c = orders_str.size();
      orders.push_back(std::stoi(orders_str.substr(pos, c - pos)));
      pos = c + 1;
    }
    emit_orders(orders);
  } else {
    // all nonincreasing order tuples with total <= max_total
    std::vector<int> cur;
    auto rec = [&](auto&& self, int remaining, int maxpart) -> void {
      if (!cur.empty()) emit_orders(cur);
      for (int p = std::min(remaining, maxpart); p >= 1; --p) {
        cur.push_back(p);
        self(self, remaining - p, p);
        cur.pop_back();
      }
    };
    rec(rec, max_total, max_total);
  }

  if (out_path.empty()) {
    std::cout << csv;
  } else {
    write_file(out_path, csv);
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

int cmd_check() {
  int failures = 0;
  auto check = [&](const std::string& name, bool ok) {
    std::printf("%-50s %s\n", name.c_str(), ok ? "PASS" : "FAIL");
    if (!ok) ++failures;
  };

  // partition identities
  {
    bool ok = true;
    const std::vector<std::vector<int>> cases = {{1, 1}, {2, 1}, {2, 2}, {3, 2}, {3, 3}, {3, 2, 1}};
    const std::vector<std::size_t> expected = {2, 3, 7, 13, 34, 60};
    for (std::size_t i = 0; i < cases.size(); ++i) {
      const auto fam = enumerate_partition_family(cases[i]);
      ok = ok && fam.members.size() == expected[i] &&
           family_cardinality_by_A(cases[i]) == expected[i];
    }
    ok = ok && merge_pattern_count(enumerate_partition_family({3, 2, 1})) == 10;
    check("partition family cardinalities and A identity", ok);
  }

  // detailed balance of the sampler
  {
    Domain dom;
    dom.dim = 2;
    dom.mark_bound = 0.3;
    IntensityMeasure ref;
    ref.rho = 15;
    const GibbsModel model = make_segment_model(dom, ref, 0.2, -0.5);
    Rng rng(7);
    bool ok = true;
    for (int t = 0; t < 50; ++t) {
      Configuration x = sample_poisson(model.reference, model.domain, rng);
      const Particle u = model.reference.sample_mark(model.domain, rng);
      const double rb = conditional_intensity(model, {&u, 1}, x) *
                        model.reference.total_mass(model.domain) / static_cast<double>(x.size() + 1);
      Configuration xu = x.with({&u, 1});
      const double rd = static_cast<double>(xu.size()) /
                        (conditional_intensity(model, {&u, 1}, x) *
                         model.reference.total_mass(model.domain));
      ok = ok && std::abs(rb * rd - 1.0) < 1e-12;
    }
    check("birth/death detailed-balance unit identity", ok);
  }

  // q_m telescoping against the direct difference of G
  {
    Domain dom;
    dom.dim = 2;
    dom.mark_bound = 0.3;
    IntensityMeasure ref;
    ref.rho = 10;
    const GibbsModel model = make_segment_model(dom, ref, 0.1, -0.3);
    Rng rng(11);
    bool ok = true;
    for (int t = 0; t < 50; ++t) {
      const Configuration x = sample_poisson(model.reference, model.domain, rng);
      std::vector<Particle> add;
      for (int i = 0; i < 3; ++i) add.push_back(model.reference.sample_mark(model.domain, rng));
      const StatVec q = q_m(model, x, add);
      const StatVec d = statistics_G(model, x.with(add)) - statistics_G(model, x);
      for (int i = 0; i < q.n; ++i)
        ok = ok && std::abs(q[i] - d[i]) <= 1e-9 * (1.0 + std::abs(d[i]));
    }
    check("Q_m equals the direct statistic increment", ok);
  }

  // serialization round trip
  {
    Domain dom;
    dom.dim = 2;
    dom.mark_bound = 0.4;
    dom.kind = ParticleKind::Segment;
    IntensityMeasure ref;
    ref.rho = 12;
    Rng rng(3);
    std::vector<Configuration> cs;
    for (int i = 0; i < 5; ++i) cs.push_back(sample_poisson(ref, dom, rng));
    const auto back = read_configurations(write_configurations(cs));
    bool ok = back.size() == cs.size();
    for (std::size_t i = 0; ok && i < cs.size(); ++i) {
      ok = back[i].items.size() == cs[i].items.size();
      for (std::size_t p = 0; ok && p < cs[i].items.size(); ++p)
        ok = norm(back[i].items[p].center - cs[i].items[p].center) < 1e-12 &&
             std::abs(back[i].items[p].size - cs[i].items[p].size) < 1e-12;
    }
    check("configuration text round trip", ok);
  }

  // serial and parallel paths produce identical bits
  {
    const auto a = par::map_indexed<double>(
        5000, [](std::size_t i) { Rng r(derive_seed(1, "chk", i)); return r.normal(); },
        par::Exec::Parallel);
    const auto b = par::map_indexed<double>(
        5000, [](std::size_t i) { Rng r(derive_seed(1, "chk", i)); return r.normal(); },
        par::Exec::Serial);
    check("parallel kernel bit-identical to serial reference", a == b);
  }

  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"moment calculus for interacting particle processes"};
  app.require_subcommand(1);

  Common common;
  long sample_count = 0;
  bool sample_chain = false;
  bool timing = false;
  std::string orders_str;
  int max_total = 7;

  auto add_common = [&](CLI::App* sub, bool need_config) {
    if (need_config)
      sub->add_option("--config", common.config_path, "experiment config file")->required();
    sub->add_option("--out", common.out_path, "output path (overrides config)");
    sub->add_option("--seed", common.seed, "master seed (overrides config)")
        ->each([&](const std::string&) { common.seed_set = true; });
    sub->add_option("--workers", common.workers, "worker threads");
  };

  auto* sample = app.add_subcommand("sample", "draw configurations and write them as text");
  add_common(sample, true);
  sample->add_option("--count", sample_count, "number of configurations");
  sample->add_flag("--chain", sample_chain, "sample the Gibbs model by MCMC instead of the reference");

  auto* estimate = app.add_subcommand("estimate", "run the moment estimator suite");
  add_common(estimate, true);
  estimate->add_flag("--timing", timing, "record wall times (breaks byte reproducibility)");

  auto* clt = app.add_subcommand("clt", "rescaled U-statistic Gaussian diagnostics");
  add_common(clt, true);

  auto* partitions = app.add_subcommand("partitions", "partition family cardinalities and A tables");
  partitions->add_option("--orders", orders_str, "comma separated orders, e.g. 3,2,1");
  partitions->add_option("--max-total", max_total, "emit all order tuples up to this total");
  partitions->add_option("--out", common.out_path, "output path (default stdout)");

  auto* check = app.add_subcommand("check", "run the quick invariant suite");
  (void)check;

  CLI11_PARSE(app, argc, argv);

  if (common.workers > 0) ppmom::par::set_threads(common.workers);

  try {
    if (app.got_subcommand("sample")) return cmd_sample(common, sample_count, sample_chain);
    if (app.got_subcommand("estimate")) return cmd_estimate(common, timing);
    if (app.got_subcommand("clt")) return cmd_clt(common);
    if (app.got_subcommand("partitions")) return cmd_partitions(orders_str, max_total, common.out_path);
    if (app.got_subcommand("check")) return cmd_check();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
