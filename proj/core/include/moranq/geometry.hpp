#pragma once

// Moran constructions with axis-aligned box cells in R^1 and R^2.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "moranq/coding.hpp"

namespace moranq {

// A point of R^q stored with two coordinates; for q = 1 the second is 0.
using Point = std::array<double, 2>;

double distance(const Point& a, const Point& b);
double squared_distance(const Point& a, const Point& b);

// The closed box lo + [0, side]^q. Only the first `dim` coordinates matter.
struct Box {
  int dim = 1;
  Point lo{0.0, 0.0};
  double side = 1.0;

  Point hi() const;
  Point center() const;
  // Euclidean diameter, side * sqrt(q).
  double diameter() const;

  bool contains(const Point& x, double tol = 0.0) const;
  // True iff `inner` lies in this box, allowing `tol` slack per face.
  bool contains(const Box& inner, double tol = 0.0) const;
  // Smallest gap between `inner` and the boundary of this box; negative when
  // `inner` pokes out. Zero when it touches a face.
  double margin_of(const Box& inner) const;
  // True iff the open interiors intersect, with `tol` slack on each overlap.
  bool interiors_overlap(const Box& other, double tol = 0.0) const;
};

// Euclidean distance between two closed boxes (0 when they intersect).
double box_distance(const Box& a, const Box& b);
// Euclidean distance from a point to a closed box.
double point_box_distance(const Point& x, const Box& b);
// Diameter of a finite union of boxes: the largest corner-to-corner distance.
double union_diameter(const std::vector<Box>& boxes);

// Children of one level, placed inside the unit parent cell [0,1]^q.
struct LevelSpec {
  std::vector<double> ratios;  // s_{k,j}
  std::vector<Point> offsets;  // lower corner of child j, in parent units

  int branches() const { return static_cast<int>(ratios.size()); }
};

// A Moran construction whose level specs repeat with period P. The base
// cell J is [0,1]^q and |J_sigma| is measured as the side length s_sigma.
class MoranSystem {
 public:
  enum class Validation { kStrict, kStructureOnly };

  // Throws ValidationError if the description violates any construction
  // invariant; kStructureOnly checks only shapes and ratio ranges, leaving
  // packing violations for verify_construction to report.
  MoranSystem(int dimension, std::vector<LevelSpec> levels, std::string name,
              Validation validation = Validation::kStrict);

  // Two children of ratio (1 - gap) / 2 at both ends of [0,1].
  static MoranSystem cantor(double gap);
  // [0,1/2] and [1/2,1].
  static MoranSystem binary_full();
  // Four corner squares of ratio rho <= 1/2, ordered (0,0), (1-rho,0),
  // (0,1-rho), (1-rho,1-rho).
  static MoranSystem carpet4(double rho);
  // Alternating levels: two children of ratio 1/3 at 0 and 5/12, then three
  // of ratio 1/4 at 0, 1/4 and 3/4.
  static MoranSystem alternating();

  int dimension() const { return dim_; }
  std::size_t period() const { return levels_.size(); }
  const std::string& name() const { return name_; }

  // Level spec of 1-based level k.
  const LevelSpec& level(std::size_t k) const;
  int branches(std::size_t k) const { return level(k).branches(); }
  double ratio(std::size_t k, int j) const;
  const Alphabet& alphabet() const { return alphabet_; }
  const std::vector<LevelSpec>& levels() const { return levels_; }

  // The system whose level 1 is this system's level phase + 1.
  MoranSystem shifted(std::size_t phase) const;

 private:
  int dim_;
  std::vector<LevelSpec> levels_;
  std::string name_;
  Alphabet alphabet_;
};

// The cell of child j (1-based) of `parent` under `spec`.
Box child_cell(const Box& parent, const LevelSpec& spec, int j);

// J_sigma. Throws InvalidWordError for words outside the alphabet.
Box realize(const MoranSystem& system, const Word& sigma);

// s_sigma, the product of the level ratios along sigma.
double contraction_ratio(const MoranSystem& system, const Word& sigma);

struct SeparationWitness {
  Word suffix;          // tau(sigma)
  double delta = 0.0;   // d(J_{sigma*tau}, boundary of J_sigma) / |J_sigma|
};

// Exhaustive search over suffixes of length 1..k0 for the strictly interior
// sub-cell farthest from the boundary of J_sigma. Ties go to the
// lexicographically smallest suffix. Throws NoWitnessError if none exists.
SeparationWitness interior_witness(const MoranSystem& system, const Word& sigma, int k0);

struct ConstructionReport {
  bool pass = true;
  std::size_t words_checked = 0;
  double min_delta = 0.0;  // smallest witness delta seen
  std::optional<Word> violation_word;
  std::string violation;
};

// Checks every word up to `depth`: nesting, ratio law, sibling interior
// disjointness and an interior witness with |tau| <= k0. Stops at the first
// violation. Words beyond `word_budget` are reported as a violation.
ConstructionReport verify_construction(const MoranSystem& system, int depth, int k0 = 2,
                                       std::size_t word_budget = std::size_t{1} << 20);

struct SystemBounds {
  double s_min = 0.0;  // inf of all ratios
  double s_max = 0.0;  // sup of all ratios
  int n_max = 0;       // N_0
};

SystemBounds system_bounds(const MoranSystem& system);

// All words of length `depth`, in lexicographic order.
std::vector<Word> words_of_length(const MoranSystem& system, std::size_t depth);

}  // namespace moranq
