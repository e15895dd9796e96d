#include "moranq/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "moranq/errors.hpp"

namespace moranq {

namespace {

constexpr double kGeomTol = 1e-12;

std::vector<int> branch_counts(const std::vector<LevelSpec>& levels) {
  std::vector<int> counts;
  counts.reserve(levels.size());
  for (const auto& l : levels) counts.push_back(l.branches());
  return counts;
}

Box unit_box(int dim) { return Box{dim, {0.0, 0.0}, 1.0}; }

Box child_box(const Box& parent, const LevelSpec& spec, int j) { return child_cell(parent, spec, j); }

}  // namespace

Box child_cell(const Box& parent, const LevelSpec& spec, int j) {
  Box b;
  b.dim = parent.dim;
  const auto& off = spec.offsets[static_cast<std::size_t>(j - 1)];
  for (int a = 0; a < parent.dim; ++a) b.lo[a] = parent.lo[a] + off[a] * parent.side;
  b.side = parent.side * spec.ratios[static_cast<std::size_t>(j - 1)];
  return b;
}

double squared_distance(const Point& a, const Point& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  return dx * dx + dy * dy;
}

double distance(const Point& a, const Point& b) { return std::sqrt(squared_distance(a, b)); }

Point Box::hi() const {
  Point h = lo;
  for (int a = 0; a < dim; ++a) h[a] += side;
  return h;
}

Point Box::center() const {
  Point c = lo;
  for (int a = 0; a < dim; ++a) c[a] += 0.5 * side;
  return c;
}

double Box::diameter() const { return side * std::sqrt(static_cast<double>(dim)); }

bool Box::contains(const Point& x, double tol) const {
  for (int a = 0; a < dim; ++a) {
    if (x[a] < lo[a] - tol || x[a] > lo[a] + side + tol) return false;
  }
  return true;
}

bool Box::contains(const Box& inner, double tol) const {
  for (int a = 0; a < dim; ++a) {
    if (inner.lo[a] < lo[a] - tol) return false;
    if (inner.lo[a] + inner.side > lo[a] + side + tol) return false;
  }
  return true;
}

double Box::margin_of(const Box& inner) const {
  double m = side;
  for (int a = 0; a < dim; ++a) {
    m = std::min(m, inner.lo[a] - lo[a]);
    m = std::min(m, (lo[a] + side) - (inner.lo[a] + inner.side));
  }
  return m;
}

bool Box::interiors_overlap(const Box& other, double tol) const {
  for (int a = 0; a < dim; ++a) {
    const double overlap = std::min(lo[a] + side, other.lo[a] + other.side) -
                           std::max(lo[a], other.lo[a]);
    if (overlap <= tol) return false;
  }
  return true;
}

double box_distance(const Box& a, const Box& b) {
  double s = 0.0;
  for (int ax = 0; ax < a.dim; ++ax) {
    const double gap = std::max({0.0, b.lo[ax] - (a.lo[ax] + a.side), a.lo[ax] - (b.lo[ax] + b.side)});
    s += gap * gap;
  }
  return std::sqrt(s);
}

double point_box_distance(const Point& x, const Box& b) {
  double s = 0.0;
  for (int ax = 0; ax < b.dim; ++ax) {
    const double gap = std::max({0.0, b.lo[ax] - x[ax], x[ax] - (b.lo[ax] + b.side)});
    s += gap * gap;
  }
  return std::sqrt(s);
}

double union_diameter(const std::vector<Box>& boxes) {
  if (boxes.empty()) return 0.0;
  const int dim = boxes.front().dim;
  // Per axis, the farthest pair of corners uses the extreme coordinates, so
  // it suffices to compare the lo/hi extremes box by box.
  double best = 0.0;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    for (std::size_t j = i; j < boxes.size(); ++j) {
      double s = 0.0;
      for (int a = 0; a < dim; ++a) {
        const double span = std::max(boxes[i].lo[a] + boxes[i].side, boxes[j].lo[a] + boxes[j].side) -
                            std::min(boxes[i].lo[a], boxes[j].lo[a]);
        s += span * span;
      }
      best = std::max(best, s);
    }
  }
  return std::sqrt(best);
}

MoranSystem::MoranSystem(int dimension, std::vector<LevelSpec> levels, std::string name,
                         Validation validation)
    : dim_(dimension), levels_(std::move(levels)), name_(std::move(name)) {
  if (dim_ != 1 && dim_ != 2) throw ValidationError("dimension must be 1 or 2");
  if (levels_.empty()) throw ValidationError("a Moran system needs at least one level");
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    const auto& l = levels_[k];
    const std::string where = "level " + std::to_string(k + 1) + ": ";
    if (l.ratios.size() < 2) throw ValidationError(where + "branch count must be >= 2");
    if (l.offsets.size() != l.ratios.size()) {
      throw ValidationError(where + "ratios and offsets differ in length");
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < l.ratios.size(); ++j) {
      const double s = l.ratios[j];
      if (!(s > 0.0 && s < 1.0)) {
        throw ValidationError(where + "ratio " + std::to_string(j + 1) + " must lie in (0,1)");
      }
      if (dim_ == 1 && l.offsets[j][1] != 0.0) {
        throw ValidationError(where + "second offset coordinate must be 0 in dimension 1");
      }
      sum += s;
    }
    if (validation == Validation::kStructureOnly) continue;
    if (dim_ == 1 && sum > 1.0 + kGeomTol) {
      throw ValidationError(where + "ratios sum to more than 1");
    }
    const Box parent = unit_box(dim_);
    for (int j = 1; j <= l.branches(); ++j) {
      const Box cj = child_box(parent, l, j);
      if (!parent.contains(cj, kGeomTol)) {
        throw ValidationError(where + "child " + std::to_string(j) + " leaves the parent cell");
      }
      for (int i = 1; i < j; ++i) {
        if (child_box(parent, l, i).interiors_overlap(cj, kGeomTol)) {
          throw ValidationError(where + "children " + std::to_string(i) + " and " +
                                std::to_string(j) + " have overlapping interiors");
        }
      }
    }
  }
  alphabet_ = Alphabet(branch_counts(levels_));
}

MoranSystem MoranSystem::cantor(double gap) {
  if (!(gap > 0.0 && gap < 1.0)) throw ValidationError("cantor gap must lie in (0,1)");
  const double s = (1.0 - gap) / 2.0;
  LevelSpec l{{s, s}, {Point{0.0, 0.0}, Point{1.0 - s, 0.0}}};
  return MoranSystem(1, {l}, "cantor");
}

MoranSystem MoranSystem::binary_full() {
  LevelSpec l{{0.5, 0.5}, {Point{0.0, 0.0}, Point{0.5, 0.0}}};
  return MoranSystem(1, {l}, "binary-full");
}

MoranSystem MoranSystem::carpet4(double rho) {
  if (!(rho > 0.0 && rho <= 0.5)) throw ValidationError("carpet4 ratio must lie in (0,1/2]");
  const double f = 1.0 - rho;
  LevelSpec l{{rho, rho, rho, rho},
              {Point{0.0, 0.0}, Point{f, 0.0}, Point{0.0, f}, Point{f, f}}};
  return MoranSystem(2, {l}, "carpet4");
}

MoranSystem MoranSystem::alternating() {
  const double third = 1.0 / 3.0;
  LevelSpec odd{{third, third}, {Point{0.0, 0.0}, Point{5.0 / 12.0, 0.0}}};
  LevelSpec even{{0.25, 0.25, 0.25}, {Point{0.0, 0.0}, Point{0.25, 0.0}, Point{0.75, 0.0}}};
  return MoranSystem(1, {odd, even}, "periodic");
}

const LevelSpec& MoranSystem::level(std::size_t k) const {
  if (k == 0) throw RangeError("levels are 1-based");
  return levels_[(k - 1) % levels_.size()];
}

double MoranSystem::ratio(std::size_t k, int j) const {
  const auto& l = level(k);
  if (j < 1 || j > l.branches()) throw InvalidWordError("child index out of range");
  return l.ratios[static_cast<std::size_t>(j - 1)];
}

MoranSystem MoranSystem::shifted(std::size_t phase) const {
  std::vector<LevelSpec> rotated;
  rotated.reserve(levels_.size());
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    rotated.push_back(levels_[(phase + i) % levels_.size()]);
  }
  return MoranSystem(dim_, std::move(rotated), name_, Validation::kStructureOnly);
}

Box realize(const MoranSystem& system, const Word& sigma) {
  validate_word(system.alphabet(), sigma);
  Box b = unit_box(system.dimension());
  for (std::size_t h = 1; h <= sigma.size(); ++h) b = child_box(b, system.level(h), sigma.at(h));
  return b;
}

double contraction_ratio(const MoranSystem& system, const Word& sigma) {
  double s = 1.0;
  for (std::size_t h = 1; h <= sigma.size(); ++h) s *= system.ratio(h, sigma.at(h));
  return s;
}

namespace {

// Visits every suffix of length 1..k0 below `cell`, in lexicographic order.
template <typename Visit>
void for_each_suffix(const MoranSystem& system, std::size_t base_level, const Box& cell,
                     std::vector<int>& suffix, int k0, Visit&& visit) {
  if (static_cast<int>(suffix.size()) == k0) return;
  const std::size_t level = base_level + suffix.size() + 1;
  const LevelSpec& spec = system.level(level);
  for (int j = 1; j <= spec.branches(); ++j) {
    const Box child = child_box(cell, spec, j);
    suffix.push_back(j);
    visit(suffix, child);
    for_each_suffix(system, base_level, child, suffix, k0, visit);
    suffix.pop_back();
  }
}

}  // namespace

SeparationWitness interior_witness(const MoranSystem& system, const Word& sigma, int k0) {
  if (k0 < 1) throw RangeError("k0 must be at least 1");
  const Box cell = realize(system, sigma);
  std::optional<SeparationWitness> best;
  std::vector<int> suffix;
  // Lexicographic order across lengths: compare finished candidates directly.
  for_each_suffix(system, sigma.size(), cell, suffix, k0,
                  [&](const std::vector<int>& tau, const Box& sub) {
                    const double delta = cell.margin_of(sub) / cell.side;
                    if (delta <= kGeomTol) return;
                    Word w(tau);
                    const bool better =
                        !best || delta > best->delta * (1.0 + kGeomTol) ||
                        (delta >= best->delta * (1.0 - kGeomTol) && w < best->suffix);
                    if (better) best = SeparationWitness{std::move(w), delta};
                  });
  if (!best) {
    throw NoWitnessError("no strictly interior sub-cell of J_" + sigma.to_string() +
                         " within " + std::to_string(k0) + " levels");
  }
  return *best;
}

ConstructionReport verify_construction(const MoranSystem& system, int depth, int k0,
                                       std::size_t word_budget) {
  if (depth < 1) throw RangeError("verification depth must be at least 1");
  ConstructionReport report;
  report.min_delta = 1.0;

  auto fail = [&](const Word& w, std::string what) {
    report.pass = false;
    report.violation_word = w;
    report.violation = std::move(what);
  };

  std::vector<Word> frontier{Word()};
  for (int level = 0; level <= depth && report.pass; ++level) {
    std::vector<Word> next;
    for (const Word& sigma : frontier) {
      if (++report.words_checked > word_budget) {
        fail(sigma, "word budget exhausted");
        return report;
      }
      const Box cell = realize(system, sigma);
      const double s = contraction_ratio(system, sigma);
      if (std::abs(cell.side - s) > kGeomTol * s) {
        fail(sigma, "cell side differs from the contraction ratio");
        return report;
      }
      try {
        report.min_delta = std::min(report.min_delta, interior_witness(system, sigma, k0).delta);
      } catch (const NoWitnessError& e) {
        fail(sigma, e.what());
        return report;
      }
      if (level == depth) continue;
      const LevelSpec& spec = system.level(sigma.size() + 1);
      std::vector<Box> kids;
      for (int j = 1; j <= spec.branches(); ++j) {
        Box c = child_box(cell, spec, j);
        if (!cell.contains(c, kGeomTol * cell.side)) {
          fail(sigma.child(j), "child cell is not nested in its parent");
          return report;
        }
        for (std::size_t i = 0; i < kids.size(); ++i) {
          if (kids[i].interiors_overlap(c, kGeomTol * cell.side)) {
            fail(sigma.child(j), "interior overlaps sibling " + std::to_string(i + 1));
            return report;
          }
        }
        kids.push_back(c);
        next.push_back(sigma.child(j));
      }
      if (system.dimension() == 1) {
        double sum = 0.0;
        for (double r : spec.ratios) sum += r;
        if (sum > 1.0 + kGeomTol) {
          fail(sigma.child(1), "child ratios sum to " + std::to_string(sum));
          return report;
        }
      }
    }
    frontier = std::move(next);
  }
  return report;
}

SystemBounds system_bounds(const MoranSystem& system) {
  SystemBounds b{1.0, 0.0, 0};
  for (const auto& l : system.levels()) {
    for (double s : l.ratios) {
      b.s_min = std::min(b.s_min, s);
      b.s_max = std::max(b.s_max, s);
    }
    b.n_max = std::max(b.n_max, l.branches());
  }
  return b;
}

std::vector<Word> words_of_length(const MoranSystem& system, std::size_t depth) {
  std::vector<Word> words{Word()};
  for (std::size_t h = 1; h <= depth; ++h) {
    std::vector<Word> next;
    const int n = system.branches(h);
    next.reserve(words.size() * static_cast<std::size_t>(n));
    for (const auto& w : words) {
      for (int j = 1; j <= n; ++j) next.push_back(w.child(j));
    }
    words = std::move(next);
  }
  return words;
}

}  // namespace moranq
