#include "moranq/gersho.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "moranq/errors.hpp"

namespace moranq {

CellReport voronoi_cells(const DiscretizedMeasure& atoms, std::span<const Point> points, double r) {
  CellSums sums = assign_cells(atoms, points, r);
  CellReport rep;
  rep.r = r;
  rep.assignment = std::move(sums.assignment);
  rep.mass = std::move(sums.mass);
  rep.integral = std::move(sums.integral);
  rep.distortion = sums.total;
  rep.j_low = *std::min_element(rep.integral.begin(), rep.integral.end());
  rep.j_high = *std::max_element(rep.integral.begin(), rep.integral.end());
  return rep;
}

std::vector<std::size_t> atom_cylinders(const DiscretizedMeasure& atoms,
                                        const LambdaAntichain& lambda) {
  const auto& words = lambda.words.words;
  const std::size_t lo = lambda.words.min_length();
  const std::size_t hi = lambda.words.max_length();
  if (hi > atoms.depth) {
    throw PreconditionError("antichain reaches level " + std::to_string(hi) +
                            ", below the discretization depth " + std::to_string(atoms.depth));
  }
  std::unordered_map<Word, std::size_t> index;
  for (std::size_t i = 0; i < words.size(); ++i) index.emplace(words[i], i);
  std::vector<std::size_t> out(atoms.size());
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    const Word& w = atoms.atoms[a].word;
    bool found = false;
    for (std::size_t h = lo; h <= hi && !found; ++h) {
      auto it = index.find(truncate(w, h));
      if (it != index.end()) {
        out[a] = it->second;
        found = true;
      }
    }
    if (!found) throw PreconditionError("atom " + w.to_string() + " lies in no antichain cylinder");
  }
  return out;
}

KappaStats kappa_stats(std::span<const Point> points, const LambdaAntichain& lambda,
                       const MoranSystem& system) {
  const auto& words = lambda.words.words;
  KappaStats st;
  st.kappa.assign(words.size(), 0);
  std::vector<bool> covered(points.size(), false);
  for (std::size_t i = 0; i < words.size(); ++i) {
    const Box cell = realize(system, words[i]);
    const double reach = cell.side / 8.0;
    for (std::size_t a = 0; a < points.size(); ++a) {
      if (point_box_distance(points[a], cell) <= reach) {
        ++st.kappa[i];
        covered[a] = true;
      }
    }
  }
  if (!st.kappa.empty()) {
    st.kappa_min = *std::min_element(st.kappa.begin(), st.kappa.end());
    st.kappa_max = *std::max_element(st.kappa.begin(), st.kappa.end());
  }
  st.kappa_c = static_cast<std::size_t>(std::count(covered.begin(), covered.end(), false));
  return st;
}

double coverage_check(const DiscretizedMeasure& atoms, std::span<const Point> points,
                      const LambdaAntichain& lambda, const MoranSystem& system) {
  if (points.empty()) throw PreconditionError("codebook must be non-empty");
  const auto cyl = atom_cylinders(atoms, lambda);
  std::vector<double> side(lambda.phi());
  for (std::size_t i = 0; i < side.size(); ++i) {
    side[i] = contraction_ratio(system, lambda.words.words[i]);
  }
  double worst = 0.0;
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    double d2 = std::numeric_limits<double>::infinity();
    for (const Point& p : points) d2 = std::min(d2, squared_distance(atoms.atoms[a].x, p));
    worst = std::max(worst, std::sqrt(d2) / side[cyl[a]]);
  }
  return worst;
}

Incidence incidence_check(const DiscretizedMeasure& atoms, const CellReport& cells,
                          const LambdaAntichain& lambda) {
  const auto cyl = atom_cylinders(atoms, lambda);
  const std::size_t n = cells.integral.size();
  const std::size_t phi = lambda.phi();
  // Pairs (cell, cylinder) that share at least one atom.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(atoms.size());
  for (std::size_t a = 0; a < atoms.size(); ++a) pairs.emplace_back(cells.assignment[a], cyl[a]);
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  std::vector<std::size_t> per_cell(n, 0);
  std::vector<std::size_t> per_cyl(phi, 0);
  for (const auto& [c, s] : pairs) {
    ++per_cell[c];
    ++per_cyl[s];
  }
  Incidence inc;
  for (std::size_t v : per_cell) inc.cylinders_per_cell = std::max(inc.cylinders_per_cell, v);
  for (std::size_t v : per_cyl) inc.cells_per_cylinder = std::max(inc.cells_per_cylinder, v);
  return inc;
}

int pair_k(std::span<const std::size_t> phis, double pairing, std::size_t n) {
  int k = 0;
  for (std::size_t i = 0; i < phis.size(); ++i) {
    if (pairing * static_cast<double>(phis[i]) <= static_cast<double>(n)) k = static_cast<int>(i);
  }
  return k;
}

RatioTable ratio_table(const MoranSystem& system, const CylinderMeasure& measure,
                       const DiscretizedMeasure& atoms, double r, const RatioOptions& options) {
  // Antichains that still resolve on the atom cloud, k = 0, 1, ...
  std::vector<LambdaAntichain> lambdas;
  std::vector<std::size_t> phis;
  for (int k = 0;; ++k) {
    LambdaAntichain l = build_lambda(system, measure, k, r);
    if (l.words.max_length() > atoms.depth) break;
    const bool beyond = options.pairing * static_cast<double>(l.phi()) >
                        static_cast<double>(options.n_max);
    phis.push_back(l.phi());
    lambdas.push_back(std::move(l));
    if (beyond) break;
  }
  if (lambdas.empty()) throw PreconditionError("discretization too coarse for any antichain");

  const ErrorCurve curve = error_curve(atoms, options.n_min, options.n_max, r, options.lloyd);
  RatioTable table;
  table.monotone_violation = curve.monotone_violation;
  for (const auto& row : curve.rows) {
    const CellReport cells = voronoi_cells(atoms, row.book.points, r);
    const int k = pair_k(phis, options.pairing, row.n);
    const LambdaAntichain& lambda = lambdas[static_cast<std::size_t>(k)];
    const KappaStats kap = kappa_stats(row.book.points, lambda, system);
    RatioRow out;
    out.n = row.n;
    out.k = k;
    out.e_r = cells.distortion;
    out.j_low = cells.j_low;
    out.j_high = cells.j_high;
    const double nn = static_cast<double>(row.n);
    out.low_ratio = cells.distortion > 0.0 ? nn * cells.j_low / cells.distortion : 1.0;
    out.high_ratio = cells.distortion > 0.0 ? nn * cells.j_high / cells.distortion : 1.0;
    out.kappa_min = kap.kappa_min;
    out.kappa_max = kap.kappa_max;
    out.kappa_c = kap.kappa_c;
    out.coverage_max = coverage_check(atoms, row.book.points, lambda, system);
    table.rows.push_back(out);
  }
  return table;
}

Band band_of(std::span<const double> values) {
  Band b;
  if (values.empty()) return b;
  b.min = *std::min_element(values.begin(), values.end());
  b.max = *std::max_element(values.begin(), values.end());
  b.spread = b.min > 0.0 ? b.max / b.min : std::numeric_limits<double>::infinity();
  return b;
}

EnergySumReport energy_sum_check(const MoranSystem& system, const CylinderMeasure& measure,
                                 const DiscretizedMeasure& atoms, double r, int k_min, int k_max,
                                 double pairing, double tolerance, const LloydConfig& cfg) {
  if (k_min < 0 || k_max < k_min) throw RangeError("invalid k range");
  EnergySumReport rep;
  std::vector<double> er;
  std::vector<double> es;
  for (int k = k_min; k <= k_max; ++k) {
    const LambdaAntichain lambda = build_lambda(system, measure, k, r);
    EnergyRow row;
    row.k = k;
    row.phi = lambda.phi();
    row.n = static_cast<std::size_t>(std::ceil(pairing * static_cast<double>(row.phi)));
    row.e_r = lloyd(atoms, row.n, r, cfg).distortion;
    for (double e : lambda.energies) row.energy_sum += e;
    row.phi_eta_k = static_cast<double>(row.phi) * std::pow(lambda.eta, k);
    row.error_ratio = row.e_r / row.phi_eta_k;
    row.energy_ratio = row.energy_sum / row.phi_eta_k;
    er.push_back(row.error_ratio);
    es.push_back(row.energy_ratio);
    rep.rows.push_back(row);
  }
  rep.error_band = band_of(er);
  rep.energy_band = band_of(es);
  rep.pass = rep.error_band.spread <= tolerance && rep.energy_band.spread <= tolerance;
  return rep;
}

CellBoundReport cell_bound_check(const DiscretizedMeasure& atoms, const MoranSystem& system,
                                 const CylinderMeasure& measure, const Word& sigma,
                                 std::span<const Point> points, double r, double zeta,
                                 const ConstantsLedger& ledger) {
  const double h = ledger.value("H");
  if (points.size() < 2 || static_cast<double>(points.size()) != h) {
    throw PreconditionError("codebook must have exactly H >= 2 points");
  }
  const Box cell = realize(system, sigma);
  const double diam = cell.diameter();
  for (const Point& p : points) {
    if (point_box_distance(p, cell) > zeta * diam * (1.0 + 1e-12)) {
      throw PreconditionError("codepoint outside the zeta-neighbourhood of J_" + sigma.to_string());
    }
  }
  CellBoundReport rep;
  for (const Atom& a : atoms.atoms) {
    if (a.word.size() < sigma.size() || truncate(a.word, sigma.size()) != sigma) continue;
    double d2 = std::numeric_limits<double>::infinity();
    for (const Point& p : points) d2 = std::min(d2, squared_distance(a.x, p));
    rep.i_sigma += a.weight * std::pow(std::sqrt(d2), r);
  }
  const double mu = mass(measure, sigma);
  rep.energy = energy(measure, system, sigma, r);
  rep.lower = ledger.value("C1H") * rep.energy;
  rep.upper = std::pow(1.0 + zeta, r) * mu * std::pow(diam, r);
  rep.lower_pass = rep.i_sigma >= rep.lower;
  rep.upper_pass = rep.i_sigma <= rep.upper;
  return rep;
}

}  // namespace moranq
