#include "ppmom/mcmc.hpp"

#include <cmath>
#include <stdexcept>

#include "ppmom/parallel.hpp"
#include "ppmom/stats.hpp"

namespace ppmom {

void ChainParams::validate() const {
  if (burn_in < 0 || thinning < 0 || n_samples < 1)
    throw std::invalid_argument("chain parameters out of range");
  if (move_prob < 0 || move_prob >= 1)
    throw std::invalid_argument("move_prob must lie in [0, 1)");
}

long ChainParams::effective_thinning(const GibbsModel& model) const {
  if (thinning > 0) return thinning;
  const double mass = model.reference.total_mass(model.domain);
  return std::max<long>(1, std::lround(10.0 * mass));
}

double ChainOutput::acceptance_rate(ProposalType t) const {
  const auto i = static_cast<std::size_t>(t);
  return proposed[i] > 0 ? static_cast<double>(accepted[i]) / static_cast<double>(proposed[i]) : 0.0;
}

double birth_acceptance(const GibbsModel& model, const Configuration& x, const Particle& u) {
  const double mass = model.reference.total_mass(model.domain);
  const Particle pts[1] = {u};
  const double lam = conditional_intensity(model, pts, x);
  return std::min(1.0, lam * mass / static_cast<double>(x.size() + 1));
}

double death_acceptance(const GibbsModel& model, const Configuration& x, std::size_t index) {
  const double mass = model.reference.total_mass(model.domain);
  const Configuration rest = x.without(index);
  const Particle pts[1] = {x.items[index]};
  const double lam = conditional_intensity(model, pts, rest);
  return std::min(1.0, static_cast<double>(x.size()) / (lam * mass));
}

namespace {

struct StepResult {
  ProposalType type;
  bool accepted;
};

StepResult bdm_step_inplace(const GibbsModel& model, Configuration& x, double move_prob, Rng& rng) {
  const double mass = model.reference.total_mass(model.domain);
  const double u0 = rng.uniform();
  if (u0 < move_prob) {
    // the move kernel must be chosen with the same probability in every
    // state, so an empty state auto-rejects instead of re-routing the mass
    if (x.items.empty()) return {ProposalType::Move, false};
    const std::size_t i = static_cast<std::size_t>(rng.uniform_index(x.items.size()));
    const Particle proposal = model.reference.sample_mark(model.domain, rng);
    const Configuration rest = x.without(i);
    const Particle oldp[1] = {x.items[i]};
    const Particle newp[1] = {proposal};
    const double ratio = std::exp(dot(q_m(model, rest, newp), model.nu) -
                                  dot(q_m(model, rest, oldp), model.nu));
    if (rng.uniform() < ratio) {
      x.items[i] = proposal;
      return {ProposalType::Move, true};
    }
    return {ProposalType::Move, false};
  }
  if (rng.uniform() < 0.5) {
    const Particle u = model.reference.sample_mark(model.domain, rng);
    const Particle pts[1] = {u};
    const double a = std::min(1.0, conditional_intensity(model, pts, x) * mass /
                                       static_cast<double>(x.size() + 1));
    if (rng.uniform() < a) {
      x.items.push_back(u);
      return {ProposalType::Birth, true};
    }
    return {ProposalType::Birth, false};
  }
  if (x.items.empty()) return {ProposalType::Death, false};
  const std::size_t i = static_cast<std::size_t>(rng.uniform_index(x.items.size()));
  const double a = death_acceptance(model, x, i);
  if (rng.uniform() < a) {
    x.items.erase(x.items.begin() + static_cast<std::ptrdiff_t>(i));
    return {ProposalType::Death, true};
  }
  return {ProposalType::Death, false};
}

}  // namespace

Configuration bdm_step(const GibbsModel& model, const Configuration& x, double move_prob, Rng& rng) {
  Configuration y = x;
  bdm_step_inplace(model, y, move_prob, rng);
  return y;
}

ChainOutput run_chain(const GibbsModel& model, const ChainParams& params) {
  params.validate();
  model.validate();
  const long thin = params.effective_thinning(model);
  const long total = params.burn_in + thin * params.n_samples;

  ChainOutput out;
  out.states.reserve(static_cast<std::size_t>(params.n_samples));
  out.count_trace.reserve(static_cast<std::size_t>(total));
  out.step_type.reserve(static_cast<std::size_t>(total));
  out.step_accepted.reserve(static_cast<std::size_t>(total));

  Rng rng(derive_seed(params.seed, "chain"));
  Configuration x;
  x.kind = model.domain.kind;

  for (long step = 0; step < total; ++step) {
    const StepResult r = bdm_step_inplace(model, x, params.move_prob, rng);
    out.proposed[static_cast<std::size_t>(r.type)]++;
    if (r.accepted) out.accepted[static_cast<std::size_t>(r.type)]++;
    out.count_trace.push_back(static_cast<long>(x.size()));
    out.step_type.push_back(static_cast<signed char>(r.type));
    out.step_accepted.push_back(r.accepted ? 1 : 0);
    if (step >= params.burn_in && (step - params.burn_in + 1) % thin == 0)
      out.states.push_back(x);
  }
  return out;
}

std::string chain_diagnostics_csv(const ChainOutput& out) {
  std::string csv = "step,count,type,accepted\n";
  static const char* names[3] = {"birth", "death", "move"};
  for (std::size_t i = 0; i < out.count_trace.size(); ++i) {
    csv += std::to_string(i) + "," + std::to_string(out.count_trace[i]) + "," +
           names[static_cast<std::size_t>(out.step_type[i])] + "," +
           (out.step_accepted[i] ? "1" : "0") + "\n";
  }
  return csv;
}

MomentEstimate importance_estimate(const GibbsModel& model, const Functional& F, int m_power,
                                   long n_poisson, std::uint64_t seed) {
  if (n_poisson < 2) throw std::invalid_argument("importance_estimate needs n >= 2");
  model.validate();

  struct Draw {
    double a, w;
  };
  const auto draws = par::map_indexed<Draw>(static_cast<std::size_t>(n_poisson), [&](std::size_t i) {
    Rng rng(derive_seed(seed, "importance", i));
    const Configuration eta = sample_poisson(model.reference, model.domain, rng);
    const double w = std::exp(dot(statistics_G(model, eta), model.nu));
    double fm = 1;
    const double f = F(eta);
    for (int p = 0; p < m_power; ++p) fm *= f;
    return Draw{fm * w, w};
  });

  std::vector<double> as(draws.size()), ws(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) {
    as[i] = draws[i].a;
    ws[i] = draws[i].w;
  }
  const double wbar = stats::mean(ws);
  if (!(wbar > 0)) throw std::runtime_error("importance_estimate: degenerate weights (all zero)");
  const double abar = stats::mean(as);
  const double ratio = abar / wbar;

  // delta method on the ratio of means
  std::vector<double> u(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) u[i] = as[i] - ratio * ws[i];
  const double sd = std::sqrt(stats::sample_variance(u));

  MomentEstimate e;
  e.value = ratio;
  e.std_error = sd / (std::sqrt(static_cast<double>(n_poisson)) * wbar);
  e.n_outer = n_poisson;
  e.method = Method::Importance;
  return e;
}

namespace {

MomentEstimate weight_mean(const GibbsModel& model, long n_poisson, std::uint64_t seed) {
  model.validate();
  const auto ws = par::map_indexed<double>(static_cast<std::size_t>(n_poisson), [&](std::size_t i) {
    Rng rng(derive_seed(seed, "normconst", i));
    const Configuration eta = sample_poisson(model.reference, model.domain, rng);
    return std::exp(dot(statistics_G(model, eta), model.nu));
  });
  const auto ms = stats::mean_se(ws);
  MomentEstimate e;
  e.value = ms.mean;
  e.std_error = ms.se;
  e.n_outer = n_poisson;
  e.method = Method::Importance;
  return e;
}

}  // namespace

MomentEstimate normalizing_constant_estimate(const GibbsModel& model, long n_poisson,
                                             std::uint64_t seed) {
  return weight_mean(model, n_poisson, seed);
}

MomentEstimate log_normalizing_constant_estimate(const GibbsModel& model, long n_poisson,
                                                 std::uint64_t seed) {
  MomentEstimate e = weight_mean(model, n_poisson, seed);
  e.std_error = e.std_error / e.value;
  e.value = std::log(e.value);
  return e;
}

}  // namespace ppmom
