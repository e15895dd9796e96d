#pragma once

// Voronoi-cell integrals of codebooks and the diagnostics that compare them
// with the stopping-time antichains: ratio tables, kappa counts, coverage,
// incidence and the energy-sum comparison.

#include <cstddef>
#include <span>
#include <vector>

#include "moranq/antichain.hpp"
#include "moranq/quantizer.hpp"

namespace moranq {

struct CellReport {
  double r = 2.0;
  std::vector<std::size_t> assignment;  // codepoint of every atom
  std::vector<double> mass;             // atom mass per cell
  std::vector<double> integral;         // I_a
  double distortion = 0.0;              // sum of I_a
  double j_low = 0.0;                   // min_a I_a
  double j_high = 0.0;                  // max_a I_a
};

// Nearest-codepoint partition with ties to the lowest index; empty cells
// are kept with I_a = 0.
CellReport voronoi_cells(const DiscretizedMeasure& atoms, std::span<const Point> points, double r);

// Index into lambda of the cylinder containing each atom. Throws
// PreconditionError when lambda reaches below the discretization depth.
std::vector<std::size_t> atom_cylinders(const DiscretizedMeasure& atoms,
                                        const LambdaAntichain& lambda);

struct KappaStats {
  std::vector<std::size_t> kappa;  // per sigma: codepoints within s_sigma/8 of J_sigma
  std::size_t kappa_min = 0;
  std::size_t kappa_max = 0;
  std::size_t kappa_c = 0;  // codepoints in no inflated cylinder
};

KappaStats kappa_stats(std::span<const Point> points, const LambdaAntichain& lambda,
                       const MoranSystem& system);

// max over sigma of max_{atoms in J_sigma} d(x, points) / s_sigma.
double coverage_check(const DiscretizedMeasure& atoms, std::span<const Point> points,
                      const LambdaAntichain& lambda, const MoranSystem& system);

struct Incidence {
  std::size_t cylinders_per_cell = 0;  // max over cells of cylinders met
  std::size_t cells_per_cylinder = 0;  // max over cylinders of cells met
};

Incidence incidence_check(const DiscretizedMeasure& atoms, const CellReport& cells,
                          const LambdaAntichain& lambda);

struct RatioRow {
  std::size_t n = 0;
  int k = 0;
  double e_r = 0.0;
  double j_low = 0.0;
  double j_high = 0.0;
  double low_ratio = 0.0;   // n J_low / e_r
  double high_ratio = 0.0;  // n J_high / e_r
  std::size_t kappa_min = 0;
  std::size_t kappa_max = 0;
  std::size_t kappa_c = 0;
  double coverage_max = 0.0;
};

struct RatioTable {
  std::vector<RatioRow> rows;
  bool monotone_violation = false;
};

struct RatioOptions {
  std::size_t n_min = 1;
  std::size_t n_max = 16;
  double pairing = 1.0;  // k(n) = max{k : pairing * phi_k <= n}, or 0
  LloydConfig lloyd;
};

// k(n) for the given multiplier; falls back to 0 when even phi_0 is too large.
int pair_k(std::span<const std::size_t> phis, double pairing, std::size_t n);

RatioTable ratio_table(const MoranSystem& system, const CylinderMeasure& measure,
                       const DiscretizedMeasure& atoms, double r, const RatioOptions& options);

struct Band {
  double min = 0.0;
  double max = 0.0;
  double spread = 0.0;  // max / min, infinite when min is 0
};

Band band_of(std::span<const double> values);

struct EnergyRow {
  int k = 0;
  std::size_t phi = 0;
  std::size_t n = 0;
  double e_r = 0.0;
  double energy_sum = 0.0;  // sum of E_r over lambda
  double phi_eta_k = 0.0;
  double error_ratio = 0.0;   // e_r / (phi eta^k)
  double energy_ratio = 0.0;  // energy_sum / (phi eta^k)
};

struct EnergySumReport {
  std::vector<EnergyRow> rows;
  Band error_band;
  Band energy_band;
  bool pass = false;  // both spreads within the tolerance factor
};

EnergySumReport energy_sum_check(const MoranSystem& system, const CylinderMeasure& measure,
                                 const DiscretizedMeasure& atoms, double r, int k_min, int k_max,
                                 double pairing, double tolerance, const LloydConfig& cfg);

struct CellBoundReport {
  double i_sigma = 0.0;
  double energy = 0.0;
  double lower = 0.0;  // C1H E_r(sigma)
  double upper = 0.0;  // (1 + zeta)^r mu(J_sigma) |J_sigma|^r
  bool lower_pass = false;
  bool upper_pass = false;
};

// I_sigma over atoms of J_sigma against the codebook. |J_sigma| is the
// Euclidean diameter of the cell. Throws PreconditionError unless every
// point lies within zeta |J_sigma| of J_sigma and the codebook has exactly
// H >= 2 points, H taken from the ledger.
CellBoundReport cell_bound_check(const DiscretizedMeasure& atoms, const MoranSystem& system,
                                 const CylinderMeasure& measure, const Word& sigma,
                                 std::span<const Point> points, double r, double zeta,
                                 const ConstantsLedger& ledger);

}  // namespace moranq
