#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "ppmom/estimate.hpp"
#include "ppmom/geometry.hpp"
#include "ppmom/rng.hpp"

namespace ppmom {

enum class ParticleKind { Point, Segment, Plate };

std::string to_string(ParticleKind k);

// One marked particle: germ location plus mark. `size` is the segment length
// or plate radius; `axis` is the segment direction (unit, upper half-plane)
// or the plate normal (unit, upper hemisphere). Points ignore both.
struct Particle {
  Vec3 center;
  double size = 0;
  Vec3 axis{1, 0, 0};

  Segment2D as_segment() const;
  Plate3D as_plate() const;
  friend bool operator==(const Particle&, const Particle&) = default;
};

Particle make_segment_particle(Vec2 center, double length, double phi);
Particle make_plate_particle(Vec3 center, double radius, Vec3 normal);
Particle make_point_particle(Vec3 center);

struct Configuration {
  ParticleKind kind = ParticleKind::Point;
  std::vector<Particle> items;

  std::size_t size() const { return items.size(); }
  Configuration with(std::span<const Particle> added) const;
  Configuration without(std::size_t index) const;
};

struct Domain {
  int dim = 2;
  std::array<double, 3> lo{0, 0, 0};
  std::array<double, 3> hi{1, 1, 1};
  double mark_bound = 1.0;
  ParticleKind kind = ParticleKind::Point;

  double volume() const;
  double diameter() const;
  bool contains(const Vec3& p) const;
  void validate() const;
};

// Size-mark law on (0, b]: uniform, a point mass, or a piecewise-linear
// quantile (inverse CDF) table.
struct MarkLaw {
  enum class Type { Uniform, Fixed, QuantileTable };
  Type type = Type::Uniform;
  double fixed_value = 0;
  std::vector<double> table_u;  // increasing, first 0, last 1
  std::vector<double> table_q;  // values in (0, b]

  double sample(double bound, Rng& rng) const;
  void validate(double bound) const;
};

// Orientation law: uniform on [0, pi) / the upper hemisphere, or fixed.
struct OrientLaw {
  enum class Type { Uniform, Fixed };
  Type type = Type::Uniform;
  double fixed_phi = 0;
  Vec3 fixed_normal{0, 0, 1};
};

// Reference intensity measure rho(z) dz Q(dr) V(dphi); rho is constant or a
// per-cell table on a regular grid over the window.
struct IntensityMeasure {
  double rho = 1.0;
  std::vector<double> rho_cells;  // optional, row-major over `grid`
  std::array<int, 3> grid{0, 0, 0};
  MarkLaw q;
  OrientLaw v;

  double total_mass(const Domain& dom) const;
  Vec3 sample_center(const Domain& dom, Rng& rng) const;
  Particle sample_mark(const Domain& dom, Rng& rng) const;
  void validate(const Domain& dom) const;
};

enum class ModelKind { SegmentModel, PlateModel, Strauss };

// Statistic vector with at most three active components.
struct StatVec {
  std::array<double, 3> v{0, 0, 0};
  int n = 0;

  double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }
  StatVec& operator+=(const StatVec& o);
  StatVec& operator-=(const StatVec& o);
  friend StatVec operator+(StatVec a, const StatVec& b) { return a += b; }
  friend StatVec operator-(StatVec a, const StatVec& b) { return a -= b; }
};

double dot(const StatVec& g, std::span<const double> nu);

// Exponential-family density exp(nu . G(x)) with respect to the reference
// Poisson process. Strauss stores nu = (log beta, log gamma); s(x) counts
// unordered close pairs, which is the convention the closed-form conditional
// intensities beta gamma^t(u,x) require.
struct GibbsModel {
  ModelKind kind = ModelKind::Strauss;
  Domain domain;
  IntensityMeasure reference;
  std::vector<double> nu;
  double strauss_range = 0;

  int stat_count() const;
  int max_interaction_order() const;  // largest n with a nonzero n-th difference
  std::array<std::string, 3> stat_names() const;
  void validate() const;
};

GibbsModel make_segment_model(Domain dom, IntensityMeasure ref, double nu1, double nu2);
GibbsModel make_plate_model(Domain dom, IntensityMeasure ref, double nu1, double nu2, double nu3);
GibbsModel make_strauss_model(Domain dom, IntensityMeasure ref, double beta, double gamma, double range);

Configuration sample_poisson(const IntensityMeasure& m, const Domain& dom, Rng& rng);
// Poisson sample at intensity a * lambda (same mark laws, scaled mass)
Configuration sample_poisson_scaled(const IntensityMeasure& m, const Domain& dom, double a, Rng& rng);

StatVec statistics_G(const GibbsModel& model, const Configuration& x);
double unnormalized_log_density(const GibbsModel& model, const Configuration& x);

// n-th iterated difference of G at x, evaluated at distinct new particles
StatVec difference_G(const GibbsModel& model, const Configuration& x,
                     std::span<const Particle> points);

// Q_m: the sum of the differences over all nonempty subsets of the new
// particles; equals G(x with added) - G(x)
StatVec q_m(const GibbsModel& model, const Configuration& x, std::span<const Particle> added);

// conditional intensity of order |points|: exp(nu . Q_m)
double conditional_intensity(const GibbsModel& model, std::span<const Particle> points,
                             const Configuration& x);

// pooled estimate of the intensity function rho(u) = E lambda*(u, mu)
MomentEstimate intensity_function(const GibbsModel& model, const Particle& u,
                                  std::span<const Configuration> mu_sample);

// number of points of x within the Strauss range of u
long strauss_close_count(const GibbsModel& model, const Particle& u, const Configuration& x);

}  // namespace ppmom
