#pragma once

// n-point quantization of discretized measures: distortion, Lloyd iteration
// with restarts, an exhaustive oracle for tiny instances, and error curves.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "moranq/geometry.hpp"
#include "moranq/measure.hpp"

namespace moranq {

struct Codebook {
  int dim = 1;
  double r = 2.0;
  std::vector<Point> points;
  double distortion = 0.0;  // sum over atoms of w * d(x, points)^r

  // Search metadata.
  int restarts = 0;
  int iterations = 0;
  bool converged = false;
  bool monotone = true;  // distortion never increased between iterations
  std::uint64_t seed = 0;

  std::size_t size() const { return points.size(); }
};

// Per-cell accumulation for a nearest-point assignment. Atoms are assigned
// to the closest codepoint, ties to the lowest index.
struct CellSums {
  std::vector<std::size_t> assignment;  // codepoint index per atom
  std::vector<double> mass;             // atom weight per cell
  std::vector<double> integral;         // sum of w * d^r per cell
  double total = 0.0;                   // sum of `integral` in index order
};

CellSums assign_cells(const DiscretizedMeasure& atoms, std::span<const Point> points, double r);

// sum_atoms w * min_a d(x, a)^r. Throws PreconditionError for an empty codebook.
double distortion(const DiscretizedMeasure& atoms, std::span<const Point> points, double r);

// Number of distinct atom locations.
std::size_t distinct_atom_count(const DiscretizedMeasure& atoms);

struct LloydConfig {
  int restarts = 8;
  std::uint64_t seed = 1;
  double tol = 1e-10;  // relative distortion decrease that counts as converged
  int max_iter = 1000;
  int threads = 1;     // restarts evaluated concurrently, result is thread-count independent
};

// Best of `restarts` Lloyd runs from D^2-weighted seeding. Throws
// PreconditionError if n is zero or exceeds the number of distinct atoms, or
// if r < 1.
Codebook lloyd(const DiscretizedMeasure& atoms, std::size_t n, double r, const LloydConfig& cfg);

// A single Lloyd run from the given starting points.
Codebook lloyd_from(const DiscretizedMeasure& atoms, std::vector<Point> start, double r,
                    const LloydConfig& cfg);

// Minimizer of sum_i w_i |x_i - c|^r over c. Exact weighted mean for r = 2;
// bisection on the derivative for q = 1; damped Weiszfeld steps for q = 2.
Point one_center(std::span<const Point> xs, std::span<const double> ws, int dim, double r,
                 double tol = 1e-12);

inline constexpr std::size_t kOracleMaxAtoms = 12;
inline constexpr std::size_t kOracleMaxPoints = 4;

// Exact optimum over all partitions of the atoms into n groups. Throws
// PreconditionError beyond 12 atoms or 4 points.
Codebook brute_force(const DiscretizedMeasure& atoms, std::size_t n, double r);

struct ErrorCurveRow {
  std::size_t n = 0;
  double e_r = 0.0;  // e^r_{n,r} estimate
  Codebook book;
};

struct ErrorCurve {
  std::vector<ErrorCurveRow> rows;
  // Set when strict decrease in n could not be restored by rerunning.
  bool monotone_violation = false;
};

// lloyd for n in [n_min, n_max]. Each n also tries two warm starts from the
// previous book: adding the worst-served atom, and splitting the costliest
// cell in two. A row that fails to decrease is rerun with doubled restarts
// and then flagged.
ErrorCurve error_curve(const DiscretizedMeasure& atoms, std::size_t n_min, std::size_t n_max,
                       double r, const LloydConfig& cfg);

// Closed-form e^2_{1,2} of the self-similar measure of a period-1 system:
// V = sum_i p_i |f_i(m) - m|^2 / (1 - sum_i p_i s_i^2). Throws
// PreconditionError for period > 1.
double self_similar_variance(const MoranSystem& system, const CylinderMeasure& measure);

}  // namespace moranq
