#include "moranq/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "moranq/errors.hpp"

namespace moranq {

namespace {

constexpr double kMassSumTol = 1e-9;

}  // namespace

CylinderMeasure::CylinderMeasure(const MoranSystem& system,
                                 std::vector<std::vector<double>> masses, std::string name)
    : masses_(std::move(masses)), name_(std::move(name)) {
  if (masses_.size() != system.period()) {
    throw ValidationError("measure has " + std::to_string(masses_.size()) +
                          " mass levels but the system period is " +
                          std::to_string(system.period()));
  }
  for (std::size_t k = 0; k < masses_.size(); ++k) {
    const std::string where = "masses at level " + std::to_string(k + 1);
    const auto& m = masses_[k];
    if (static_cast<int>(m.size()) != system.branches(k + 1)) {
      throw ValidationError(where + " have " + std::to_string(m.size()) +
                            " entries but the level has " +
                            std::to_string(system.branches(k + 1)) + " children");
    }
    for (double v : m) {
      if (!(v > 0.0 && v < 1.0)) throw ValidationError(where + " must lie in (0,1)");
    }
    const double sum = std::accumulate(m.begin(), m.end(), 0.0);
    if (std::abs(sum - 1.0) > kMassSumTol) {
      throw ValidationError(where + " sum to " + std::to_string(sum) + ", expected 1");
    }
  }
}

CylinderMeasure CylinderMeasure::uniform(const MoranSystem& system) {
  std::vector<std::vector<double>> masses;
  for (std::size_t k = 1; k <= system.period(); ++k) {
    const int n = system.branches(k);
    masses.emplace_back(static_cast<std::size_t>(n), 1.0 / n);
  }
  return CylinderMeasure(system, std::move(masses), "uniform");
}

double CylinderMeasure::conditional(std::size_t k, int j) const {
  if (k == 0) throw RangeError("levels are 1-based");
  const auto& m = masses_[(k - 1) % masses_.size()];
  if (j < 1 || j > static_cast<int>(m.size())) throw InvalidWordError("child index out of range");
  return m[static_cast<std::size_t>(j - 1)];
}

double CylinderMeasure::p() const {
  double p = 1.0;
  for (const auto& m : masses_) p = std::min(p, *std::min_element(m.begin(), m.end()));
  return p;
}

CylinderMeasure CylinderMeasure::shifted(std::size_t phase) const {
  CylinderMeasure out;
  out.name_ = name_;
  for (std::size_t i = 0; i < masses_.size(); ++i) {
    out.masses_.push_back(masses_[(phase + i) % masses_.size()]);
  }
  return out;
}

double mass(const CylinderMeasure& measure, const Word& sigma) {
  double m = 1.0;
  for (std::size_t h = 1; h <= sigma.size(); ++h) m *= measure.conditional(h, sigma.at(h));
  return m;
}

double energy(const CylinderMeasure& measure, const MoranSystem& system, const Word& sigma,
              double r) {
  if (!(r > 0.0)) throw PreconditionError("order r must be positive");
  return mass(measure, sigma) * std::pow(contraction_ratio(system, sigma), r);
}

double DiscretizedMeasure::total_weight() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.weight;
  return s;
}

namespace {

void emit_atoms(const CylinderMeasure& measure, const MoranSystem& system, std::size_t depth,
                const Box& cell, double weight, std::vector<int>& word,
                DiscretizedMeasure& out) {
  if (word.size() == depth) {
    out.atoms.push_back(Atom{cell.center(), weight, Word(word)});
    out.resolution = std::max(out.resolution, cell.side);
    return;
  }
  const std::size_t level = word.size() + 1;
  const LevelSpec& spec = system.level(level);
  for (int j = 1; j <= spec.branches(); ++j) {
    word.push_back(j);
    emit_atoms(measure, system, depth, child_cell(cell, spec, j),
               weight * measure.conditional(level, j), word, out);
    word.pop_back();
  }
}

}  // namespace

DiscretizedMeasure discretize(const CylinderMeasure& measure, const MoranSystem& system,
                              std::size_t depth, std::size_t budget) {
  if (depth < 1) throw RangeError("discretization depth must be at least 1");
  double count = 1.0;
  for (std::size_t k = 1; k <= depth; ++k) count *= system.branches(k);
  if (count > static_cast<double>(budget)) {
    throw BudgetError("depth " + std::to_string(depth) + " needs " +
                      std::to_string(static_cast<long long>(count)) +
                      " atoms, over the budget of " + std::to_string(budget));
  }
  DiscretizedMeasure out;
  out.dim = system.dimension();
  out.depth = depth;
  out.system_id = system.name();
  out.measure_id = measure.name();
  out.atoms.reserve(static_cast<std::size_t>(count));
  std::vector<int> word;
  emit_atoms(measure, system, depth, Box{system.dimension(), {0.0, 0.0}, 1.0}, 1.0, word, out);
  return out;
}

double ball_mass(const DiscretizedMeasure& atoms, const Point& x, double eps) {
  const double eps2 = eps * eps;
  double m = 0.0;
  for (const auto& a : atoms.atoms) {
    if (squared_distance(a.x, x) <= eps2) m += a.weight;
  }
  return m;
}

BallMassIndex::BallMassIndex(const DiscretizedMeasure& atoms) : atoms_(&atoms) {
  if (atoms.dim != 1) return;
  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return atoms.atoms[a].x[0] < atoms.atoms[b].x[0];
  });
  sorted_x_.reserve(order.size());
  prefix_.assign(order.size() + 1, 0.0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    sorted_x_.push_back(atoms.atoms[order[i]].x[0]);
    prefix_[i + 1] = prefix_[i] + atoms.atoms[order[i]].weight;
  }
}

double BallMassIndex::operator()(const Point& x, double eps) const {
  if (sorted_x_.empty()) return ball_mass(*atoms_, x, eps);
  // Same closed-ball predicate as ball_mass: (a - x)^2 <= eps^2.
  const double eps2 = eps * eps;
  const double c = x[0];
  auto mid = std::lower_bound(sorted_x_.begin(), sorted_x_.end(), c);
  auto first = std::partition_point(sorted_x_.begin(), mid,
                                    [&](double v) { return (c - v) * (c - v) > eps2; });
  auto last = std::partition_point(mid, sorted_x_.end(),
                                   [&](double v) { return (v - c) * (v - c) <= eps2; });
  const auto lo = static_cast<std::size_t>(first - sorted_x_.begin());
  const auto hi = static_cast<std::size_t>(last - sorted_x_.begin());
  return hi > lo ? prefix_[hi] - prefix_[lo] : 0.0;
}

std::vector<double> RadiusGrid::values() const {
  if (!(min > 0.0) || !(factor > 1.0)) throw PreconditionError("radius grid needs min > 0, factor > 1");
  std::vector<double> out;
  for (double e = min; e <= max * (1.0 + 1e-12); e *= factor) out.push_back(e);
  return out;
}

RadiusGrid RadiusGrid::for_atoms(const DiscretizedMeasure& atoms) {
  return RadiusGrid{4.0 * atoms.resolution, 1.0, 2.0};
}

namespace {

std::vector<std::size_t> sample_indices(std::size_t count, std::size_t samples) {
  std::vector<std::size_t> idx;
  if (count == 0) return idx;
  if (samples == 0 || samples >= count) {
    idx.resize(count);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return idx;
  }
  for (std::size_t i = 0; i < samples; ++i) idx.push_back(i * count / samples);
  return idx;
}

}  // namespace

DoublingProfile doubling_profile(const DiscretizedMeasure& atoms, std::size_t sample_points,
                                 const RadiusGrid& radii) {
  if (radii.min < 4.0 * atoms.resolution * (1.0 - 1e-12)) {
    throw PreconditionError("radius grid starts below 4x the atom resolution");
  }
  const BallMassIndex index(atoms);
  const auto grid = radii.values();
  DoublingProfile best;
  for (std::size_t i : sample_indices(atoms.size(), sample_points)) {
    const Point& x = atoms.atoms[i].x;
    for (double eps : grid) {
      const double inner = index(x, eps);
      if (inner <= 0.0) continue;
      const double ratio = index(x, 2.0 * eps) / inner;
      if (ratio > best.d_est) best = DoublingProfile{ratio, x, eps};
    }
  }
  return best;
}

DoublingTrend doubling_trend(const CylinderMeasure& measure, const MoranSystem& system,
                             const std::vector<std::size_t>& depths, std::size_t sample_points) {
  DoublingTrend trend;
  trend.depths = depths;
  for (std::size_t depth : depths) {
    const auto atoms = discretize(measure, system, depth);
    trend.d_est.push_back(doubling_profile(atoms, sample_points, RadiusGrid::for_atoms(atoms)).d_est);
  }
  if (trend.d_est.empty()) return trend;
  trend.strictly_increasing = trend.d_est.size() > 1;
  for (std::size_t i = 1; i < trend.d_est.size(); ++i) {
    if (!(trend.d_est[i] > trend.d_est[i - 1])) trend.strictly_increasing = false;
  }
  const auto [lo, hi] = std::minmax_element(trend.d_est.begin(), trend.d_est.end());
  trend.spread = *hi / *lo;
  trend.diverging = trend.strictly_increasing && trend.spread > 2.0;
  return trend;
}

DiscretizedMeasure rescale_conditional(const CylinderMeasure& measure,
                                       const MoranSystem& system, const Word& sigma,
                                       std::size_t depth, std::size_t budget) {
  if (depth <= sigma.size()) throw RangeError("depth must exceed the length of sigma");
  const Box cell = realize(system, sigma);
  const double m = mass(measure, sigma);
  // Enumerate only the subtree below sigma.
  double count = 1.0;
  for (std::size_t k = sigma.size() + 1; k <= depth; ++k) count *= system.branches(k);
  if (count > static_cast<double>(budget)) throw BudgetError("conditional cloud exceeds the atom budget");

  DiscretizedMeasure sub;
  sub.dim = system.dimension();
  std::vector<int> word(sigma.symbols().begin(), sigma.symbols().end());
  emit_atoms(measure, system, depth, cell, m, word, sub);

  DiscretizedMeasure out;
  out.dim = sub.dim;
  out.depth = depth - sigma.size();
  out.system_id = system.name() + "|" + sigma.to_string();
  out.measure_id = measure.name();
  out.resolution = sub.resolution / cell.side;
  out.atoms.reserve(sub.atoms.size());
  for (auto& a : sub.atoms) {
    Point y{0.0, 0.0};
    for (int ax = 0; ax < sub.dim; ++ax) y[ax] = (a.x[ax] - cell.lo[ax]) / cell.side;
    auto tail = a.word.symbols().subspan(sigma.size());
    out.atoms.push_back(Atom{y, a.weight / m, Word(std::vector<int>(tail.begin(), tail.end()))});
  }
  return out;
}

double frostman_exponent(double p, double s_min) {
  if (!(p > 0.0 && p < 1.0) || !(s_min > 0.0 && s_min < 1.0)) {
    throw PreconditionError("p and s_min must lie in (0,1)");
  }
  return std::log(1.0 - p) / std::log(s_min);
}

FrostmanEstimate frostman_estimate(const DiscretizedMeasure& atoms, double p, double s_min,
                                   const RadiusGrid& radii, std::size_t sample_points) {
  FrostmanEstimate est;
  est.t = frostman_exponent(p, s_min);
  const BallMassIndex index(atoms);
  const auto grid = radii.values();
  for (std::size_t i : sample_indices(atoms.size(), sample_points)) {
    for (double eps : grid) {
      est.c_est = std::max(est.c_est, index(atoms.atoms[i].x, eps) / std::pow(eps, est.t));
    }
  }
  return est;
}

FrostmanCheck frostman_check(const CylinderMeasure& measure, const MoranSystem& system,
                             std::size_t depth, std::size_t sample_points) {
  const auto coarse = discretize(measure, system, depth);
  const auto fine = discretize(measure, system, depth + 2);
  const RadiusGrid grid = RadiusGrid::for_atoms(coarse);
  const double smin = system_bounds(system).s_min;
  FrostmanCheck check;
  const auto a = frostman_estimate(coarse, measure.p(), smin, grid, sample_points);
  const auto b = frostman_estimate(fine, measure.p(), smin, grid, sample_points);
  check.t = a.t;
  check.c_coarse = a.c_est;
  check.c_fine = b.c_est;
  check.pass = a.c_est > 0.0 && b.c_est > 0.0 &&
               std::max(a.c_est, b.c_est) <= 2.0 * std::min(a.c_est, b.c_est);
  return check;
}

}  // namespace moranq
