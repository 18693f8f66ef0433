#include "ppmom/process.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ppmom/stats.hpp"

namespace ppmom {

std::string to_string(ParticleKind k) {
  switch (k) {
    case ParticleKind::Point: return "point";
    case ParticleKind::Segment: return "segment";
    case ParticleKind::Plate: return "plate";
  }
  return "?";
}

std::string to_string(Method m) {
  switch (m) {
    case Method::Slivnyak: return "slivnyak";
    case Method::Chaos: return "chaos";
    case Method::Theorem2: return "theorem2";
    case Method::Theorem3: return "theorem3";
    case Method::Series: return "series";
    case Method::Simulation: return "simulation";
    case Method::Importance: return "importance";
  }
  return "?";
}

bool agree_within(const MomentEstimate& a, const MomentEstimate& b, double k) {
  const double se = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
  return std::abs(a.value - b.value) <= k * se;
}

Segment2D Particle::as_segment() const {
  return Segment2D{{center.x, center.y}, size, std::atan2(axis.y, axis.x)};
}

Plate3D Particle::as_plate() const { return Plate3D{center, size, axis}; }

Particle make_segment_particle(Vec2 center, double length, double phi) {
  if (!(length > 0)) throw std::invalid_argument("segment length must be positive");
  phi = std::fmod(phi, M_PI);
  if (phi < 0) phi += M_PI;
  Particle p;
  p.center = {center.x, center.y, 0};
  p.size = length;
  p.axis = {std::cos(phi), std::sin(phi), 0};
  return p;
}

Particle make_plate_particle(Vec3 center, double radius, Vec3 normal) {
  if (!(radius > 0)) throw std::invalid_argument("plate radius must be positive");
  const double n = norm(normal);
  if (!(std::abs(n - 1.0) < 1e-9)) throw std::invalid_argument("plate normal must be unit");
  if (normal.z < 0) normal = -1.0 * normal;  // hemisphere representative
  Particle p;
  p.center = center;
  p.size = radius;
  p.axis = (1.0 / n) * normal;
  return p;
}

Particle make_point_particle(Vec3 center) {
  Particle p;
  p.center = center;
  p.size = 0;
  p.axis = {1, 0, 0};
  return p;
}

Configuration Configuration::with(std::span<const Particle> added) const {
  Configuration out = *this;
  out.items.insert(out.items.end(), added.begin(), added.end());
  return out;
}

Configuration Configuration::without(std::size_t index) const {
  Configuration out = *this;
  out.items.erase(out.items.begin() + static_cast<std::ptrdiff_t>(index));
  return out;
}

double Domain::volume() const {
  double v = 1;
  for (int i = 0; i < dim; ++i) v *= hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)];
  return v;
}

double Domain::diameter() const {
  double s = 0;
  for (int i = 0; i < dim; ++i) {
    const double d = hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)];
    s += d * d;
  }
  return std::sqrt(s);
}

bool Domain::contains(const Vec3& p) const {
  const double c[3] = {p.x, p.y, p.z};
  for (int i = 0; i < dim; ++i)
    if (c[i] < lo[static_cast<std::size_t>(i)] || c[i] > hi[static_cast<std::size_t>(i)]) return false;
  return true;
}

void Domain::validate() const {
  if (dim != 2 && dim != 3) throw std::invalid_argument("domain dim must be 2 or 3");
  if (!(volume() > 0)) throw std::invalid_argument("domain window must have positive volume");
  if (!(mark_bound > 0)) throw std::invalid_argument("mark bound must be positive");
}

void MarkLaw::validate(double bound) const {
  if (type == Type::Fixed) {
    if (!(fixed_value > 0) || fixed_value > bound)
      throw std::invalid_argument("fixed mark must lie in (0, b]");
  } else if (type == Type::QuantileTable) {
    if (table_u.size() != table_q.size() || table_u.size() < 2)
      throw std::invalid_argument("quantile table needs matching u/q lists");
    if (table_u.front() != 0.0 || table_u.back() != 1.0)
      throw std::invalid_argument("quantile table u must start at 0 and end at 1");
    for (std::size_t i = 1; i < table_u.size(); ++i)
      if (!(table_u[i] > table_u[i - 1])) throw std::invalid_argument("quantile table u must increase");
    for (double q : table_q)
      if (!(q > 0) || q > bound) throw std::invalid_argument("quantile values must lie in (0, b]");
  }
}

double MarkLaw::sample(double bound, Rng& rng) const {
  switch (type) {
    case Type::Uniform:
      return bound * (1.0 - rng.uniform());  // (0, b]
    case Type::Fixed:
      return fixed_value;
    case Type::QuantileTable: {
      const double u = rng.uniform();
      auto it = std::upper_bound(table_u.begin(), table_u.end(), u);
      const std::size_t j = std::min(static_cast<std::size_t>(it - table_u.begin()), table_u.size() - 1);
      const std::size_t i = j - 1;
      const double t = (u - table_u[i]) / (table_u[j] - table_u[i]);
      return table_q[i] + t * (table_q[j] - table_q[i]);
    }
  }
  return bound;
}

void IntensityMeasure::validate(const Domain& dom) const {
  if (!(rho >= 0) || !std::isfinite(rho)) throw std::invalid_argument("rho must be finite and >= 0");
  if (!rho_cells.empty()) {
    std::size_t cells = 1;
    for (int i = 0; i < dom.dim; ++i) {
      if (grid[static_cast<std::size_t>(i)] <= 0) throw std::invalid_argument("rho grid must be positive");
      cells *= static_cast<std::size_t>(grid[static_cast<std::size_t>(i)]);
    }
    if (rho_cells.size() != cells) throw std::invalid_argument("rho table size does not match grid");
    for (double c : rho_cells)
      if (!(c >= 0) || !std::isfinite(c)) throw std::invalid_argument("rho table entries must be finite and >= 0");
  }
  q.validate(dom.mark_bound);
}

double IntensityMeasure::total_mass(const Domain& dom) const {
  if (rho_cells.empty()) return rho * dom.volume();
  std::size_t cells = rho_cells.size();
  double cell_vol = dom.volume() / static_cast<double>(cells);
  double s = 0;
  for (double c : rho_cells) s += c;
  return s * cell_vol;
}

Vec3 IntensityMeasure::sample_center(const Domain& dom, Rng& rng) const {
  if (rho_cells.empty()) {
    Vec3 p{rng.uniform(dom.lo[0], dom.hi[0]), rng.uniform(dom.lo[1], dom.hi[1]), 0};
    if (dom.dim == 3) p.z = rng.uniform(dom.lo[2], dom.hi[2]);
    return p;
  }
  // choose a cell by weight, then uniform inside it
  double total = 0;
  for (double c : rho_cells) total += c;
  double u = rng.uniform() * total;
  std::size_t idx = 0;
  for (; idx + 1 < rho_cells.size(); ++idx) {
    if (u < rho_cells[idx]) break;
    u -= rho_cells[idx];
  }
  std::array<int, 3> g = grid;
  if (dom.dim == 2) g[2] = 1;
  const int nx = g[0], ny = g[1];
  const int ix = static_cast<int>(idx) % nx;
  const int iy = (static_cast<int>(idx) / nx) % ny;
  const int iz = static_cast<int>(idx) / (nx * ny);
  Vec3 p;
  const double dx = (dom.hi[0] - dom.lo[0]) / nx;
  const double dy = (dom.hi[1] - dom.lo[1]) / ny;
  p.x = dom.lo[0] + (ix + rng.uniform()) * dx;
  p.y = dom.lo[1] + (iy + rng.uniform()) * dy;
  if (dom.dim == 3) {
    const double dz = (dom.hi[2] - dom.lo[2]) / g[2];
    p.z = dom.lo[2] + (iz + rng.uniform()) * dz;
  }
  return p;
}

Particle IntensityMeasure::sample_mark(const Domain& dom, Rng& rng) const {
  const Vec3 z = sample_center(dom, rng);
  switch (dom.kind) {
    case ParticleKind::Point:
      return make_point_particle(z);
    case ParticleKind::Segment: {
      const double len = q.sample(dom.mark_bound, rng);
      const double phi = (v.type == OrientLaw::Type::Fixed) ? v.fixed_phi : M_PI * rng.uniform();
      return make_segment_particle({z.x, z.y}, len, phi);
    }
    case ParticleKind::Plate: {
      const double r = q.sample(dom.mark_bound, rng);
      Vec3 n;
      if (v.type == OrientLaw::Type::Fixed) {
        n = v.fixed_normal;
      } else {
        // uniform on the sphere, folded to the upper hemisphere
        const double zz = 2.0 * rng.uniform() - 1.0;
        const double th = 2.0 * M_PI * rng.uniform();
        const double s = std::sqrt(std::max(0.0, 1.0 - zz * zz));
        n = {s * std::cos(th), s * std::sin(th), zz};
      }
      return make_plate_particle(z, r, n);
    }
  }
  return {};
}

StatVec& StatVec::operator+=(const StatVec& o) {
  n = std::max(n, o.n);
  for (int i = 0; i < 3; ++i) v[static_cast<std::size_t>(i)] += o.v[static_cast<std::size_t>(i)];
  return *this;
}

StatVec& StatVec::operator-=(const StatVec& o) {
  n = std::max(n, o.n);
  for (int i = 0; i < 3; ++i) v[static_cast<std::size_t>(i)] -= o.v[static_cast<std::size_t>(i)];
  return *this;
}

double dot(const StatVec& g, std::span<const double> nu) {
  if (static_cast<int>(nu.size()) != g.n) throw std::invalid_argument("nu/G size mismatch");
  double s = 0;
  for (int i = 0; i < g.n; ++i) s += g[i] * nu[static_cast<std::size_t>(i)];
  return s;
}

int GibbsModel::stat_count() const {
  switch (kind) {
    case ModelKind::SegmentModel: return 2;
    case ModelKind::PlateModel: return 3;
    case ModelKind::Strauss: return 2;
  }
  return 0;
}

int GibbsModel::max_interaction_order() const {
  return kind == ModelKind::PlateModel ? 3 : 2;
}

std::array<std::string, 3> GibbsModel::stat_names() const {
  switch (kind) {
    case ModelKind::SegmentModel: return {"L", "N", ""};
    case ModelKind::PlateModel: return {"S", "L", "N"};
    case ModelKind::Strauss: return {"n", "s", ""};
  }
  return {};
}

void GibbsModel::validate() const {
  domain.validate();
  reference.validate(domain);
  if (static_cast<int>(nu.size()) != stat_count())
    throw std::invalid_argument("parameter vector length does not match G");
  switch (kind) {
    case ModelKind::SegmentModel:
      if (domain.kind != ParticleKind::Segment || domain.dim != 2)
        throw std::invalid_argument("segment model needs a 2d segment domain");
      if (nu[1] > 0) throw std::invalid_argument("segment model requires nu2 <= 0");
      break;
    case ModelKind::PlateModel:
      if (domain.kind != ParticleKind::Plate || domain.dim != 3)
        throw std::invalid_argument("plate model needs a 3d plate domain");
      if (nu[1] > 0 || nu[2] > 0) throw std::invalid_argument("plate model requires nu2, nu3 <= 0");
      break;
    case ModelKind::Strauss:
      if (domain.kind != ParticleKind::Point)
        throw std::invalid_argument("strauss model acts on bare points");
      if (!(strauss_range > 0)) throw std::invalid_argument("strauss range must be positive");
      break;
  }
}

GibbsModel make_segment_model(Domain dom, IntensityMeasure ref, double nu1, double nu2) {
  GibbsModel m;
  m.kind = ModelKind::SegmentModel;
  dom.kind = ParticleKind::Segment;
  dom.dim = 2;
  m.domain = dom;
  m.reference = std::move(ref);
  m.nu = {nu1, nu2};
  m.validate();
  return m;
}

GibbsModel make_plate_model(Domain dom, IntensityMeasure ref, double nu1, double nu2, double nu3) {
  GibbsModel m;
  m.kind = ModelKind::PlateModel;
  dom.kind = ParticleKind::Plate;
  dom.dim = 3;
  m.domain = dom;
  m.reference = std::move(ref);
  m.nu = {nu1, nu2, nu3};
  m.validate();
  return m;
}

GibbsModel make_strauss_model(Domain dom, IntensityMeasure ref, double beta, double gamma, double range) {
  if (!(beta > 0)) throw std::invalid_argument("strauss beta must be positive");
  if (!(gamma > 0) || gamma > 1)
    throw std::invalid_argument("strauss gamma must lie in (0, 1]; the hard core gamma = 0 is not supported");
  GibbsModel m;
  m.kind = ModelKind::Strauss;
  dom.kind = ParticleKind::Point;
  m.domain = dom;
  m.reference = std::move(ref);
  m.nu = {std::log(beta), std::log(gamma)};
  m.strauss_range = range;
  m.validate();
  return m;
}

Configuration sample_poisson(const IntensityMeasure& m, const Domain& dom, Rng& rng) {
  return sample_poisson_scaled(m, dom, 1.0, rng);
}

Configuration sample_poisson_scaled(const IntensityMeasure& m, const Domain& dom, double a, Rng& rng) {
  m.validate(dom);
  Configuration x;
  x.kind = dom.kind;
  const double mass = a * m.total_mass(dom);
  if (mass <= 0) return x;
  const long n = rng.poisson(mass);
  x.items.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) x.items.push_back(m.sample_mark(dom, rng));
  return x;
}

namespace {

double pt_dist(const Particle& a, const Particle& b) { return norm(a.center - b.center); }

}  // namespace

long strauss_close_count(const GibbsModel& model, const Particle& u, const Configuration& x) {
  long t = 0;
  for (const Particle& p : x.items)
    if (pt_dist(u, p) <= model.strauss_range) ++t;
  return t;
}

StatVec statistics_G(const GibbsModel& model, const Configuration& x) {
  StatVec g;
  g.n = model.stat_count();
  const auto& it = x.items;
  const std::size_t n = it.size();
  switch (model.kind) {
    case ModelKind::SegmentModel: {
      for (const Particle& p : it) g[0] += p.size;
      double cnt = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          if (segments_intersect(it[i].as_segment(), it[j].as_segment())) cnt += 1;
      g[1] = cnt;
      break;
    }
    case ModelKind::PlateModel: {
      for (const Particle& p : it) g[0] += plate_area(p.as_plate());
      double chord = 0, triples = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          chord += plate_pair_chord_length(it[i].as_plate(), it[j].as_plate());
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          for (std::size_t k = j + 1; k < n; ++k)
            if (plates_triple_intersect(it[i].as_plate(), it[j].as_plate(), it[k].as_plate()))
              triples += 1;
      g[1] = chord;
      g[2] = triples;
      break;
    }
    case ModelKind::Strauss: {
      g[0] = static_cast<double>(n);
      double close = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          if (pt_dist(it[i], it[j]) <= model.strauss_range) close += 1;
      g[1] = close;
      break;
    }
  }
  return g;
}

double unnormalized_log_density(const GibbsModel& model, const Configuration& x) {
  return dot(statistics_G(model, x), model.nu);
}

StatVec difference_G(const GibbsModel& model, const Configuration& x,
                     std::span<const Particle> points) {
  StatVec d;
  d.n = model.stat_count();
  const std::size_t n = points.size();
  if (n == 0) {
    // zeroth difference is G itself
    return statistics_G(model, x);
  }
  if (static_cast<int>(n) > model.max_interaction_order()) return d;

  switch (model.kind) {
    case ModelKind::SegmentModel: {
      if (n == 1) {
        const Segment2D y = points[0].as_segment();
        d[0] = y.length;
        double cnt = 0;
        for (const Particle& p : x.items)
          if (segments_intersect(p.as_segment(), y)) cnt += 1;
        d[1] = cnt;
      } else {  // n == 2
        d[1] = segments_intersect(points[0].as_segment(), points[1].as_segment()) ? 1.0 : 0.0;
      }
      break;
    }
    case ModelKind::PlateModel: {
      if (n == 1) {
        const Plate3D y = points[0].as_plate();
        d[0] = plate_area(y);
        double chord = 0, pairs = 0;
        for (const Particle& p : x.items) chord += plate_pair_chord_length(p.as_plate(), y);
        for (std::size_t i = 0; i < x.items.size(); ++i)
          for (std::size_t j = i + 1; j < x.items.size(); ++j)
            if (plates_triple_intersect(x.items[i].as_plate(), x.items[j].as_plate(), y)) pairs += 1;
        d[1] = chord;
        d[2] = pairs;
      } else if (n == 2) {
        const Plate3D y1 = points[0].as_plate(), y2 = points[1].as_plate();
        d[1] = plate_pair_chord_length(y1, y2);
        double cnt = 0;
        for (const Particle& p : x.items)
          if (plates_triple_intersect(p.as_plate(), y1, y2)) cnt += 1;
        d[2] = cnt;
      } else {  // n == 3
        d[2] = plates_triple_intersect(points[0].as_plate(), points[1].as_plate(),
                                       points[2].as_plate())
                   ? 1.0
                   : 0.0;
      }
      break;
    }
    case ModelKind::Strauss: {
      if (n == 1) {
        d[0] = 1;
        d[1] = static_cast<double>(strauss_close_count(model, points[0], x));
      } else {  // n == 2
        d[1] = pt_dist(points[0], points[1]) <= model.strauss_range ? 1.0 : 0.0;
      }
      break;
    }
  }
  return d;
}

StatVec q_m(const GibbsModel& model, const Configuration& x, std::span<const Particle> added) {
  const std::size_t m = added.size();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (added[i] == added[j]) throw std::invalid_argument("q_m: duplicated new particles");

  StatVec q;
  q.n = model.stat_count();
  const int max_order = std::min<int>(static_cast<int>(m), model.max_interaction_order());

  Particle sub[3];
  for (std::size_t i = 0; i < m; ++i) {
    sub[0] = added[i];
    q += difference_G(model, x, {sub, 1});
  }
  if (max_order >= 2) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) {
        sub[0] = added[i];
        sub[1] = added[j];
        q += difference_G(model, x, {sub, 2});
      }
  }
  if (max_order >= 3) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j)
        for (std::size_t k = j + 1; k < m; ++k) {
          sub[0] = added[i];
          sub[1] = added[j];
          sub[2] = added[k];
          q += difference_G(model, x, {sub, 3});
        }
  }
  return q;
}

double conditional_intensity(const GibbsModel& model, std::span<const Particle> points,
                             const Configuration& x) {
  if (points.empty()) return 1.0;  // lambda*_0
  return std::exp(dot(q_m(model, x, points), model.nu));
}

MomentEstimate intensity_function(const GibbsModel& model, const Particle& u,
                                  std::span<const Configuration> mu_sample) {
  if (mu_sample.empty()) throw std::invalid_argument("intensity_function: empty sample");
  std::vector<double> vals(mu_sample.size());
  const Particle pts[1] = {u};
  for (std::size_t i = 0; i < mu_sample.size(); ++i)
    vals[i] = conditional_intensity(model, pts, mu_sample[i]);
  const auto ms = stats::batch_mean_se(vals, 20);
  MomentEstimate e;
  e.value = ms.mean;
  e.std_error = ms.se;
  e.n_outer = static_cast<long>(mu_sample.size());
  e.method = Method::Simulation;
  return e;
}

}  // namespace ppmom
