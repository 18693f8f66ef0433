#include "ppmom/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "ppmom/stats.hpp"

namespace ppmom {

namespace {

std::string num_str(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(std::span<const double> v, char sep = ' ') {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += num_str(v[i]);
  }
  return s;
}

std::string join_strings(std::span<const std::string> v, char sep = ',') {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += v[i];
  }
  return s;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct KeyValue {
  std::string key, value;
  int line;
};

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) {
    std::size_t pos = 0;
    while (pos < tok.size()) {
      std::size_t c = tok.find(',', pos);
      if (c == std::string::npos) c = tok.size();
      if (c > pos) out.push_back(std::stod(tok.substr(pos, c - pos)));
      pos = c + 1;
    }
  }
  return out;
}

}  // namespace

std::string ExperimentConfig::canonical_text() const {
  std::string s;
  s += "model.kind = " + model_kind + "\n";
  s += "window = " + join(window) + "\n";
  s += "mark.bound = " + num_str(mark_bound) + "\n";
  s += "rho = " + num_str(rho) + "\n";
  s += "q.dist = " + q_dist + "\n";
  s += "v.dist = " + v_dist + "\n";
  if (model_kind == "strauss") {
    s += "beta = " + num_str(beta) + "\n";
    s += "gamma = " + num_str(gamma) + "\n";
    s += "range = " + num_str(range) + "\n";
  } else {
    s += "nu1 = " + num_str(nu1) + "\n";
    s += "nu2 = " + num_str(nu2) + "\n";
    if (model_kind == "plate") s += "nu3 = " + num_str(nu3) + "\n";
  }
  if (!cbox.empty()) s += "cbox = " + join(cbox) + "\n";
  s += "chain.burn_in = " + std::to_string(chain_burn_in) + "\n";
  s += "chain.thinning = " + std::to_string(chain_thinning) + "\n";
  s += "chain.samples = " + std::to_string(chain_samples) + "\n";
  s += "chain.move_prob = " + num_str(chain_move_prob) + "\n";
  s += "est.nodes = " + std::to_string(est_nodes) + "\n";
  s += "est.nodes_max = " + std::to_string(est_nodes_max) + "\n";
  s += "est.inner = " + std::to_string(est_inner) + "\n";
  s += "est.replicates = " + std::to_string(est_replicates) + "\n";
  if (!targets.empty()) s += "targets = " + join_strings(targets) + "\n";
  s += "clt.levels = " + join(clt_levels, ',') + "\n";
  s += "clt.replicates = " + std::to_string(clt_replicates) + "\n";
  s += "seed = " + std::to_string(seed) + "\n";
  s += "out = " + out + "\n";
  return s;
}

std::string ExperimentConfig::digest() const {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(canonical_text())));
  return buf;
}

GibbsModel ExperimentConfig::build_model() const {
  Domain dom;
  dom.dim = (model_kind == "plate") ? 3 : 2;
  if (model_kind == "strauss" && window.size() == 6) dom.dim = 3;
  if (window.size() != static_cast<std::size_t>(2 * dom.dim))
    throw std::invalid_argument("window needs 2 bounds per dimension");
  for (int i = 0; i < dom.dim; ++i) {
    dom.lo[static_cast<std::size_t>(i)] = window[static_cast<std::size_t>(2 * i)];
    dom.hi[static_cast<std::size_t>(i)] = window[static_cast<std::size_t>(2 * i + 1)];
  }
  dom.mark_bound = mark_bound;

  IntensityMeasure ref;
  ref.rho = rho;
  if (q_dist == "uniform") {
    ref.q.type = MarkLaw::Type::Uniform;
  } else if (q_dist.rfind("fixed:", 0) == 0) {
    ref.q.type = MarkLaw::Type::Fixed;
    ref.q.fixed_value = std::stod(q_dist.substr(6));
  } else if (q_dist.rfind("table:", 0) == 0) {
    ref.q.type = MarkLaw::Type::QuantileTable;
    std::string body = q_dist.substr(6);
    std::size_t pos = 0;
    while (pos < body.size()) {
      std::size_t c = body.find(',', pos);
      if (c == std::string::npos) c = body.size();
      const std::string pair = body.substr(pos, c - pos);
      const std::size_t colon = pair.find(':');
      if (colon == std::string::npos) throw std::invalid_argument("q.dist table needs u:q pairs");
      ref.q.table_u.push_back(std::stod(pair.substr(0, colon)));
      ref.q.table_q.push_back(std::stod(pair.substr(colon + 1)));
      pos = c + 1;
    }
  } else {
    throw std::invalid_argument("unknown q.dist " + q_dist);
  }
  if (v_dist == "uniform") {
    ref.v.type = OrientLaw::Type::Uniform;
  } else if (v_dist.rfind("fixed:", 0) == 0) {
    ref.v.type = OrientLaw::Type::Fixed;
    ref.v.fixed_phi = std::stod(v_dist.substr(6));
  } else {
    throw std::invalid_argument("unknown v.dist " + v_dist);
  }

  if (model_kind == "segment") return make_segment_model(dom, ref, nu1, nu2);
  if (model_kind == "plate") return make_plate_model(dom, ref, nu1, nu2, nu3);
  if (model_kind == "strauss") return make_strauss_model(dom, ref, beta, gamma, range);
  throw std::invalid_argument("unknown model.kind " + model_kind);
}

ConfigParseResult load_config_text(const std::string& text) {
  ConfigParseResult res;
  std::vector<KeyValue> kvs;
  {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos) {
        if (line.find_first_not_of(" \t\r") != std::string::npos)
          res.errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
        continue;
      }
      auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
      };
      kvs.push_back({trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno});
    }
  }

  ExperimentConfig cfg;
  auto err = [&](const std::string& m) { res.errors.push_back(m); };
  for (const auto& kv : kvs) {
    try {
      const std::string& k = kv.key;
      const std::string& v = kv.value;
      if (k == "model.kind") cfg.model_kind = v;
      else if (k == "window") cfg.window = parse_doubles(v);
      else if (k == "mark.bound") cfg.mark_bound = std::stod(v);
      else if (k == "rho") cfg.rho = std::stod(v);
      else if (k == "q.dist") cfg.q_dist = v;
      else if (k == "v.dist") cfg.v_dist = v;
      else if (k == "nu1") cfg.nu1 = std::stod(v);
      else if (k == "nu2") cfg.nu2 = std::stod(v);
      else if (k == "nu3") cfg.nu3 = std::stod(v);
      else if (k == "beta") cfg.beta = std::stod(v);
      else if (k == "gamma") cfg.gamma = std::stod(v);
      else if (k == "range") cfg.range = std::stod(v);
      else if (k == "cbox") cfg.cbox = parse_doubles(v);
      else if (k == "chain.burn_in") cfg.chain_burn_in = std::stol(v);
      else if (k == "chain.thinning") cfg.chain_thinning = std::stol(v);
      else if (k == "chain.samples") cfg.chain_samples = std::stol(v);
      else if (k == "chain.move_prob") cfg.chain_move_prob = std::stod(v);
      else if (k == "est.nodes") cfg.est_nodes = std::stol(v);
      else if (k == "est.nodes_max") cfg.est_nodes_max = std::stol(v);
      else if (k == "est.inner") cfg.est_inner = std::stol(v);
      else if (k == "est.replicates") cfg.est_replicates = std::stol(v);
      else if (k == "targets") {
        cfg.targets.clear();
        std::size_t pos = 0;
        while (pos < v.size()) {
          std::size_t c = v.find(',', pos);
          if (c == std::string::npos) c = v.size();
          if (c > pos) cfg.targets.push_back(v.substr(pos, c - pos));
          pos = c + 1;
        }
      } else if (k == "clt.levels") cfg.clt_levels = parse_doubles(v);
      else if (k == "clt.replicates") cfg.clt_replicates = std::stol(v);
      else if (k == "seed") cfg.seed = std::stoull(v);
      else if (k == "out") cfg.out = v;
      else err("line " + std::to_string(kv.line) + ": unknown key '" + k + "'");
    } catch (const std::exception& e) {
      err("line " + std::to_string(kv.line) + ": bad value for '" + kv.key + "': " + e.what());
    }
  }

  // constraint validation; every violation is reported, not just the first
  if (cfg.model_kind != "segment" && cfg.model_kind != "plate" && cfg.model_kind != "strauss")
    err("model.kind must be segment, plate or strauss");
  if (cfg.model_kind == "segment" && cfg.nu2 > 0) err("segment model requires nu2 <= 0");
  if (cfg.model_kind == "plate" && cfg.nu2 > 0) err("plate model requires nu2 <= 0");
  if (cfg.model_kind == "plate" && cfg.nu3 > 0) err("plate model requires nu3 <= 0");
  if (cfg.model_kind == "strauss") {
    if (!(cfg.beta > 0)) err("strauss beta must be positive");
    if (!(cfg.gamma > 0) || cfg.gamma > 1) err("strauss gamma must lie in (0, 1]");
    if (!(cfg.range > 0)) err("strauss range must be positive");
  }
  if (!(cfg.mark_bound > 0)) err("mark.bound must be positive");
  if (!(cfg.rho >= 0)) err("rho must be nonnegative");
  if (cfg.chain_burn_in < 0) err("chain.burn_in must be >= 0");
  if (cfg.chain_thinning < 0) err("chain.thinning must be >= 0");
  if (cfg.chain_samples < 1) err("chain.samples must be >= 1");
  if (cfg.chain_move_prob < 0 || cfg.chain_move_prob >= 1) err("chain.move_prob must lie in [0, 1)");
  if (cfg.est_nodes < 1) err("est.nodes must be positive");
  if (cfg.est_inner < 1) err("est.inner must be positive");
  if (cfg.est_replicates < 2) err("est.replicates must be >= 2");
  if (cfg.clt_replicates < 2) err("clt.replicates must be >= 2");
  for (double a : cfg.clt_levels)
    if (!(a >= 1)) err("clt.levels must all be >= 1");
  if (!cfg.window.empty() && cfg.window.size() != 4 && cfg.window.size() != 6)
    err("window needs 4 (2d) or 6 (3d) bounds");
  if (cfg.window.size() >= 4) {
    for (std::size_t i = 0; i + 1 < cfg.window.size(); i += 2)
      if (!(cfg.window[i] < cfg.window[i + 1])) err("window bounds must increase");
  }

  if (res.errors.empty()) res.config = std::move(cfg);
  return res;
}

ConfigParseResult load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    ConfigParseResult res;
    res.errors.push_back("cannot open config file " + path);
    return res;
  }
  std::stringstream ss;
  ss << f.rdbuf();
  return load_config_text(ss.str());
}

namespace {

struct TargetSpec {
  std::vector<UStatistic> factors;
  Functional functional;  // product of the factors, for simulation/importance
};

TargetSpec resolve_target(const GibbsModel& model, const ExperimentConfig& cfg,
                          const std::string& target) {
  TargetSpec spec;
  if (target == "muC" || target == "muC2") {
    if (cfg.cbox.size() != static_cast<std::size_t>(2 * model.domain.dim))
      throw std::invalid_argument("target " + target + " needs a cbox");
    Vec3 lo{cfg.cbox[0], cfg.cbox[2], -1e300};
    Vec3 hi{cfg.cbox[1], cfg.cbox[3], 1e300};
    if (model.domain.dim == 3) {
      lo.z = cfg.cbox[4];
      hi.z = cfg.cbox[5];
    }
    const UStatistic f = ustat_count_in_box(lo, hi);
    spec.factors.push_back(f);
    if (target == "muC2") spec.factors.push_back(f);
  } else {
    // names like EL, EN2, ELN over the model's statistic letters
    std::string t = target;
    if (t.empty() || t[0] != 'E') throw std::invalid_argument("unknown target " + target);
    t.erase(0, 1);
    bool square = false;
    if (!t.empty() && t.back() == '2') {
      square = true;
      t.pop_back();
    }
    const auto gs = model_ustats(model);
    const auto names = model.stat_names();
    for (char c : t) {
      int idx = -1;
      for (int i = 0; i < model.stat_count(); ++i)
        if (names[static_cast<std::size_t>(i)] == std::string(1, c)) idx = i;
      if (idx < 0) throw std::invalid_argument("unknown statistic '" + std::string(1, c) +
                                               "' in target " + target);
      spec.factors.push_back(gs[static_cast<std::size_t>(idx)]);
      if (square) spec.factors.push_back(gs[static_cast<std::size_t>(idx)]);
    }
    if (spec.factors.empty()) throw std::invalid_argument("unknown target " + target);
  }

  auto factors = std::make_shared<std::vector<UStatistic>>(spec.factors);
  spec.functional = [factors](const Configuration& x) {
    double p = 1;
    for (const auto& f : *factors) p *= eval_ustat(f, x);
    return p;
  };
  return spec;
}

}  // namespace

std::vector<ResultRecord> run_experiment(const ExperimentConfig& cfg, bool with_timing) {
  const GibbsModel model = cfg.build_model();
  const std::string digest = cfg.digest();
  std::vector<ResultRecord> records;

  std::vector<std::string> targets = cfg.targets;
  if (targets.empty()) {
    if (model.kind == ModelKind::Strauss) targets = {"muC", "muC2"};
    else if (model.kind == ModelKind::SegmentModel) targets = {"EL", "EN", "EL2", "EN2", "ELN"};
    else targets = {"ES", "EL", "EN", "ES2", "EL2", "EN2", "ELN"};
  }

  ChainParams pool_params;
  pool_params.burn_in = cfg.chain_burn_in;
  pool_params.thinning = cfg.chain_thinning;
  pool_params.n_samples = cfg.chain_samples;
  pool_params.move_prob = cfg.chain_move_prob;
  pool_params.seed = derive_seed(cfg.seed, "pool");

  ChainParams sim_params = pool_params;
  sim_params.seed = derive_seed(cfg.seed, "sim");

  const MuPool pool = make_mu_pool(model, pool_params);
  const ChainOutput sim = run_chain(model, sim_params);

  MixedOptions mix;
  mix.base_nodes = cfg.est_nodes;
  mix.max_nodes = cfg.est_nodes_max;

  auto push = [&](const std::string& target, const MomentEstimate& e, std::uint64_t seed,
                  double wall) {
    ResultRecord r;
    r.target = target;
    r.method = to_string(e.method);
    r.value = e.value;
    r.std_error = e.std_error;
    r.n_outer = e.n_outer;
    r.n_inner = e.n_inner;
    r.seed = seed;
    r.wall_time_s = with_timing ? wall : 0.0;
    r.config_digest = digest;
    records.push_back(std::move(r));
  };

  auto timed = [&](auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    MomentEstimate e = fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::pair<MomentEstimate, double>(
        e, std::chrono::duration<double>(t1 - t0).count());
  };

  for (const std::string& target : targets) {
    std::uint64_t tseed = derive_seed(cfg.seed, "target:" + target);
    try {
      const TargetSpec spec = resolve_target(model, cfg, target);

      // theorem path
      {
        auto [e, wall] = timed([&] {
          return density_mixed_moment(spec.factors, model, pool, mix, derive_seed(tseed, "thm"))
              .total;
        });
        push(target, e, tseed, wall);
      }
      // simulation path
      {
        auto [e, wall] = timed([&] {
          std::vector<double> vals(sim.states.size());
          for (std::size_t i = 0; i < sim.states.size(); ++i)
            vals[i] = spec.functional(sim.states[i]);
          const auto ms = stats::batch_mean_se(vals, kBatches);
          MomentEstimate est;
          est.value = ms.mean;
          est.std_error = ms.se;
          est.n_outer = static_cast<long>(sim.states.size());
          est.method = Method::Simulation;
          return est;
        });
        push(target, e, tseed, wall);
      }
      // importance path
      {
        auto [e, wall] = timed([&] {
          return importance_estimate(model, spec.functional, 1, cfg.est_replicates,
                                     derive_seed(tseed, "imp"));
        });
        push(target, e, tseed, wall);
      }
    } catch (const std::exception& ex) {
      ResultRecord r;
      r.target = target;
      r.method = std::string("error:") + ex.what();
      r.value = std::nan("");
      r.std_error = std::nan("");
      r.seed = tseed;
      r.config_digest = digest;
      records.push_back(std::move(r));
    }
  }
  return records;
}

std::string results_to_csv(std::span<const ResultRecord> records) {
  std::string csv = "target,method,value,std_error,n_outer,n_inner,seed,wall_time_s,config_digest\n";
  char buf[64];
  for (const ResultRecord& r : records) {
    csv += r.target + "," + r.method + ",";
    std::snprintf(buf, sizeof buf, "%.10g", r.value);
    csv += buf;
    csv += ",";
    std::snprintf(buf, sizeof buf, "%.10g", r.std_error);
    csv += buf;
    csv += "," + std::to_string(r.n_outer) + "," + std::to_string(r.n_inner) + "," +
           std::to_string(r.seed) + ",";
    std::snprintf(buf, sizeof buf, "%.6f", r.wall_time_s);
    csv += buf;
    csv += "," + r.config_digest + "\n";
  }
  return csv;
}

}  // namespace ppmom
