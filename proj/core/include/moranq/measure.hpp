#pragma once

// Cylinder measures on Moran sets, their energies, and atom-cloud
// discretizations with doubling and Frostman diagnostics.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "moranq/coding.hpp"
#include "moranq/geometry.hpp"

namespace moranq {

// Word-independent conditional masses m_{k,j}, repeating with the period of
// the governing system.
class CylinderMeasure {
 public:
  // Throws ValidationError naming the level when a mass vector does not
  // match the branch count, has an entry outside (0,1) or does not sum to 1.
  CylinderMeasure(const MoranSystem& system, std::vector<std::vector<double>> masses,
                  std::string name = "weighted");

  static CylinderMeasure uniform(const MoranSystem& system);

  // m_{k,j} for 1-based level k and child j.
  double conditional(std::size_t k, int j) const;
  std::size_t period() const { return masses_.size(); }
  const std::string& name() const { return name_; }
  const std::vector<std::vector<double>>& masses() const { return masses_; }

  // p = inf_k min_j m_{k,j}; satisfies p mu(J_s) <= mu(J_{s*i}) <= (1-p) mu(J_s).
  double p() const;

  CylinderMeasure shifted(std::size_t phase) const;

 private:
  CylinderMeasure() = default;
  std::vector<std::vector<double>> masses_;
  std::string name_;
};

// mu(J_sigma).
double mass(const CylinderMeasure& measure, const Word& sigma);

// E_r(sigma) = mu(J_sigma) * s_sigma^r.
double energy(const CylinderMeasure& measure, const MoranSystem& system, const Word& sigma,
              double r);

struct Atom {
  Point x;
  double weight = 0.0;
  Word word;  // generating cylinder
};

// A finite weighted point cloud standing in for mu.
struct DiscretizedMeasure {
  int dim = 1;
  std::vector<Atom> atoms;
  double resolution = 0.0;  // largest cylinder side represented by one atom
  std::string system_id;
  std::string measure_id;
  std::size_t depth = 0;

  std::size_t size() const { return atoms.size(); }
  double total_weight() const;
};

inline constexpr std::size_t kDefaultAtomBudget = std::size_t{1} << 20;

// One atom per level-L cylinder, at the centre of its cell. Throws
// BudgetError when the atom count would exceed `budget`.
DiscretizedMeasure discretize(const CylinderMeasure& measure, const MoranSystem& system,
                              std::size_t depth, std::size_t budget = kDefaultAtomBudget);

// Total weight of atoms within closed distance eps of x.
double ball_mass(const DiscretizedMeasure& atoms, const Point& x, double eps);

// Answers ball_mass queries in O(log m) for q = 1 by sorting; falls back to
// a linear scan in q = 2.
class BallMassIndex {
 public:
  explicit BallMassIndex(const DiscretizedMeasure& atoms);
  double operator()(const Point& x, double eps) const;

 private:
  const DiscretizedMeasure* atoms_;
  std::vector<double> sorted_x_;
  std::vector<double> prefix_;  // prefix_[i] = weight of the first i sorted atoms
};

// Geometric radius grid min, min*factor, ..., up to max inclusive.
struct RadiusGrid {
  double min = 0.0;
  double max = 0.0;
  double factor = 2.0;

  std::vector<double> values() const;
  // min = 4 * resolution, max = 1, factor 2.
  static RadiusGrid for_atoms(const DiscretizedMeasure& atoms);
};

struct DoublingProfile {
  double d_est = 0.0;  // max ratio ball_mass(x, 2 eps) / ball_mass(x, eps)
  Point worst_x{0.0, 0.0};
  double worst_eps = 0.0;
};

// Samples `sample_points` atom locations at a uniform index stride (all atoms
// when sample_points >= atom count). Throws PreconditionError if the grid
// reaches below 4 * resolution.
DoublingProfile doubling_profile(const DiscretizedMeasure& atoms, std::size_t sample_points,
                                 const RadiusGrid& radii);

struct DoublingTrend {
  std::vector<std::size_t> depths;
  std::vector<double> d_est;
  bool strictly_increasing = false;
  double spread = 1.0;  // max / min of d_est
  // Set when the estimate grows by more than 2x over the depth range, which
  // signals a measure that is not doubling.
  bool diverging = false;
};

// doubling_profile at each depth with RadiusGrid::for_atoms.
DoublingTrend doubling_trend(const CylinderMeasure& measure, const MoranSystem& system,
                             const std::vector<std::size_t>& depths, std::size_t sample_points);

// The conditional measure mu(.|J_sigma) pulled back to the unit cell: atoms
// of discretize(depth) inside J_sigma, mapped by x -> (x - lo_sigma) / s_sigma,
// weights divided by mu(J_sigma).
DiscretizedMeasure rescale_conditional(const CylinderMeasure& measure,
                                       const MoranSystem& system, const Word& sigma,
                                       std::size_t depth,
                                       std::size_t budget = kDefaultAtomBudget);

struct FrostmanEstimate {
  double t = 0.0;      // log(1 - p) / log(s_min)
  double c_est = 0.0;  // max sampled ball_mass / eps^t
};

// Throws PreconditionError unless p and s_min lie in (0,1).
double frostman_exponent(double p, double s_min);

FrostmanEstimate frostman_estimate(const DiscretizedMeasure& atoms, double p, double s_min,
                                   const RadiusGrid& radii, std::size_t sample_points);

struct FrostmanCheck {
  double t = 0.0;
  double c_coarse = 0.0;  // at depth L
  double c_fine = 0.0;    // at depth L + 2
  bool pass = false;      // estimates agree within a factor 2
};

FrostmanCheck frostman_check(const CylinderMeasure& measure, const MoranSystem& system,
                             std::size_t depth, std::size_t sample_points);

}  // namespace moranq
