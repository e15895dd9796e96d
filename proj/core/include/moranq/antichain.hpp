#pragma once

// Stopping-time antichains, their neighbor structure, and the ledger of
// explicit constants derived from a system and measure.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "moranq/coding.hpp"
#include "moranq/geometry.hpp"
#include "moranq/measure.hpp"

namespace moranq {

// eta_r = min{p * s_min^r, 8^-r}.
double eta_r(const MoranSystem& system, const CylinderMeasure& measure, double r);

struct LambdaAntichain {
  int k = 0;
  double r = 2.0;
  double eta = 0.0;
  Antichain words;               // in lexicographic (DFS) order
  std::vector<double> energies;  // E_r of each word, same order

  std::size_t phi() const { return words.words.size(); }
};

inline constexpr std::size_t kDefaultLambdaCap = std::size_t{1} << 20;

// The maximal antichain of first words whose energy drops strictly below
// eta^k. Throws RangeError for k < 0 or r <= 0 and BudgetError past `cap`.
LambdaAntichain build_lambda(const MoranSystem& system, const CylinderMeasure& measure, int k,
                             double r, std::size_t cap = kDefaultLambdaCap);

struct GrowthRow {
  int k = 0;
  std::size_t phi = 0;
  std::size_t phi_next = 0;
  double factor = 0.0;  // phi_next / phi
  bool pass = false;    // phi <= phi_next <= N1 * phi
};

struct GrowthReport {
  int h0 = 0;
  double n1 = 0.0;
  std::vector<GrowthRow> rows;
  bool pass = true;
};

// H0 = [log eta / log((1-p) s_max^r)] + 1.
int growth_h0(const MoranSystem& system, const CylinderMeasure& measure, double r);

// Checks phi_k <= phi_{k+1} <= N1 phi_k for k = 0 .. k_max - 1.
GrowthReport growth_check(const MoranSystem& system, const CylinderMeasure& measure, double r,
                          int k_max);

struct NeighborEntry {
  Word sigma;
  Box cell;
  double energy = 0.0;
  std::vector<std::size_t> neighbors;  // indices into the antichain, ascending, self included
  double star_diameter = 0.0;          // |A*_sigma|
  double star_mass = 0.0;              // mu(A*_sigma)
  double star_energy = 0.0;            // mu(A*) |A*|^r

  std::size_t m_sigma() const { return neighbors.size(); }
};

struct NeighborStructure {
  double r = 2.0;
  std::vector<NeighborEntry> entries;  // same order as the antichain
  std::size_t max_m = 0;
};

// omega is a neighbor of sigma iff their cells are within s_sigma/4 + s_omega/4.
NeighborStructure neighbor_sets(const MoranSystem& system, const CylinderMeasure& measure,
                                const LambdaAntichain& lambda);

enum class Grade { kExactFormula, kEmpiricalEstimate, kBoundOnly };

const char* to_string(Grade grade);

struct LedgerEntry {
  std::string name;
  std::optional<double> value;  // empty when not computable here
  Grade grade = Grade::kExactFormula;
  std::string formula;
  std::string inputs;
};

struct ConstantsLedger {
  std::vector<LedgerEntry> entries;

  // Throws RangeError for unknown names or entries without a value.
  double value(const std::string& name) const;
  const LedgerEntry& entry(const std::string& name) const;
  bool has_value(const std::string& name) const;
};

struct LedgerOptions {
  int k0 = 2;
  // Doubling and Frostman estimates use the deepest discretization whose atom
  // count stays within this many atoms.
  std::size_t estimate_atoms = 4096;
  std::size_t estimate_samples = 256;
};

// Evaluates every explicit constant. Inputs that only exist as estimates (D,
// C4) make their descendants estimate-grade.
ConstantsLedger constants_ledger(const MoranSystem& system, const CylinderMeasure& measure,
                                 double r, int H, const LedgerOptions& options = {});

// ceil(1 + 2/eta)^q. Throws RangeError unless 0 < eta <= 1.
long long covering_M(double eta, int q);

// A grid of covering_M(eta, q) points; every point of [0,1]^q lies within eta/2 of it.
std::vector<Point> covering_net(double eta, int q);

struct ComparabilityReport {
  double s_ratio_min = 1.0;   // min s_omega / s_sigma over neighbor pairs
  double s_ratio_max = 1.0;
  double mu_ratio_min = 1.0;  // min mu(J_omega) / mu(J_sigma)
  double mu_ratio_max = 1.0;
  std::size_t max_m = 0;
  double star_ratio_min = 1.0;  // min E*_r(sigma) / E_r(sigma)
  double star_ratio_max = 1.0;

  bool s_pass = false;     // C2 s_sigma <= s_omega < s_sigma / C2
  bool mu_pass = false;    // C3 mu_omega <= mu_sigma <= mu_omega / C3
  bool m_pass = false;     // M_sigma <= M0
  bool star_pass = false;  // D1 E <= E* <= E / D1
  bool pass = false;
};

// Requires C2, C3, M0 and D1 in the ledger.
ComparabilityReport comparability_check(const NeighborStructure& structure,
                                        const CylinderMeasure& measure,
                                        const ConstantsLedger& ledger);

}  // namespace moranq
