#include "moranq/antichain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "moranq/errors.hpp"

namespace moranq {

double eta_r(const MoranSystem& system, const CylinderMeasure& measure, double r) {
  if (!(r > 0.0)) throw RangeError("order r must be positive");
  const double smin = system_bounds(system).s_min;
  return std::min(measure.p() * std::pow(smin, r), std::pow(8.0, -r));
}

namespace {

struct LambdaBuilder {
  const MoranSystem& system;
  const CylinderMeasure& measure;
  double r;
  double threshold;
  std::size_t cap;
  LambdaAntichain& out;
  std::vector<int> word;

  // Products are accumulated in the same order as mass() and
  // contraction_ratio() so the stored energies equal energy() bit for bit.
  void descend(double m, double s) {
    const std::size_t level = word.size() + 1;
    const LevelSpec& spec = system.level(level);
    for (int j = 1; j <= spec.branches(); ++j) {
      const double mc = m * measure.conditional(level, j);
      const double sc = s * spec.ratios[static_cast<std::size_t>(j - 1)];
      const double e = mc * std::pow(sc, r);
      word.push_back(j);
      if (e < threshold) {
        if (out.words.words.size() >= cap) {
          throw BudgetError("antichain for k = " + std::to_string(out.k) + " exceeds the cap of " +
                            std::to_string(cap) + " words");
        }
        out.words.words.emplace_back(word);
        out.energies.push_back(e);
      } else {
        descend(mc, sc);
      }
      word.pop_back();
    }
  }
};

}  // namespace

LambdaAntichain build_lambda(const MoranSystem& system, const CylinderMeasure& measure, int k,
                             double r, std::size_t cap) {
  if (k < 0) throw RangeError("k must be non-negative");
  LambdaAntichain out;
  out.k = k;
  out.r = r;
  out.eta = eta_r(system, measure, r);
  LambdaBuilder builder{system, measure, r, std::pow(out.eta, k), cap, out, {}};
  builder.descend(1.0, 1.0);
  return out;
}

int growth_h0(const MoranSystem& system, const CylinderMeasure& measure, double r) {
  const double eta = eta_r(system, measure, r);
  const double smax = system_bounds(system).s_max;
  const double base = (1.0 - measure.p()) * std::pow(smax, r);
  return static_cast<int>(std::floor(std::log(eta) / std::log(base))) + 1;
}

GrowthReport growth_check(const MoranSystem& system, const CylinderMeasure& measure, double r,
                          int k_max) {
  if (k_max < 1) throw RangeError("k_max must be at least 1");
  GrowthReport report;
  report.h0 = growth_h0(system, measure, r);
  report.n1 = std::pow(static_cast<double>(system_bounds(system).n_max), report.h0);
  std::size_t phi = build_lambda(system, measure, 0, r).phi();
  for (int k = 0; k < k_max; ++k) {
    const std::size_t next = build_lambda(system, measure, k + 1, r).phi();
    GrowthRow row;
    row.k = k;
    row.phi = phi;
    row.phi_next = next;
    row.factor = static_cast<double>(next) / static_cast<double>(phi);
    row.pass = phi <= next && static_cast<double>(next) <= report.n1 * static_cast<double>(phi);
    report.pass = report.pass && row.pass;
    report.rows.push_back(row);
    phi = next;
  }
  return report;
}

NeighborStructure neighbor_sets(const MoranSystem& system, const CylinderMeasure& measure,
                                const LambdaAntichain& lambda) {
  NeighborStructure out;
  out.r = lambda.r;
  const auto& words = lambda.words.words;
  const std::size_t count = words.size();
  out.entries.resize(count);
  double smax = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    auto& e = out.entries[i];
    e.sigma = words[i];
    e.cell = realize(system, words[i]);
    e.energy = i < lambda.energies.size() ? lambda.energies[i]
                                          : energy(measure, system, words[i], lambda.r);
    e.neighbors.push_back(i);
    smax = std::max(smax, e.cell.side);
  }

  // Sweep along the first axis; pairs farther apart than the largest
  // admissible reach cannot be neighbors.
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double la = out.entries[a].cell.lo[0];
    const double lb = out.entries[b].cell.lo[0];
    return la < lb || (la == lb && a < b);
  });
  for (std::size_t oi = 0; oi < count; ++oi) {
    const std::size_t i = order[oi];
    const Box& bi = out.entries[i].cell;
    const double reach = (bi.side + smax) / 4.0;
    for (std::size_t oj = oi + 1; oj < count; ++oj) {
      const std::size_t j = order[oj];
      const Box& bj = out.entries[j].cell;
      if (bj.lo[0] - (bi.lo[0] + bi.side) > reach) break;
      if (box_distance(bi, bj) <= bi.side / 4.0 + bj.side / 4.0) {
        out.entries[i].neighbors.push_back(j);
        out.entries[j].neighbors.push_back(i);
      }
    }
  }

  for (auto& e : out.entries) {
    std::sort(e.neighbors.begin(), e.neighbors.end());
    std::vector<Box> boxes;
    boxes.reserve(e.neighbors.size());
    double m = 0.0;
    for (std::size_t j : e.neighbors) {
      boxes.push_back(out.entries[j].cell);
      m += mass(measure, out.entries[j].sigma);
    }
    e.star_diameter = union_diameter(boxes);
    e.star_mass = m;
    e.star_energy = m * std::pow(e.star_diameter, lambda.r);
    out.max_m = std::max(out.max_m, e.neighbors.size());
  }
  return out;
}

const char* to_string(Grade grade) {
  switch (grade) {
    case Grade::kExactFormula:
      return "exact-formula";
    case Grade::kEmpiricalEstimate:
      return "empirical-estimate";
    case Grade::kBoundOnly:
      return "bound-only";
  }
  return "?";
}

const LedgerEntry& ConstantsLedger::entry(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return e;
  }
  throw RangeError("no ledger entry named " + name);
}

bool ConstantsLedger::has_value(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return e.value.has_value();
  }
  return false;
}

double ConstantsLedger::value(const std::string& name) const {
  const auto& e = entry(name);
  if (!e.value) throw RangeError("ledger entry " + name + " has no computable value");
  return *e.value;
}

namespace {

double covering_count(double eta, int q) {
  return std::pow(std::ceil(1.0 + 2.0 / eta), q);
}

std::size_t estimate_depth(const MoranSystem& system, std::size_t max_atoms) {
  std::size_t depth = 1;
  double count = system.branches(1);
  while (true) {
    const double next = count * system.branches(depth + 1);
    if (next > static_cast<double>(max_atoms)) break;
    count = next;
    ++depth;
  }
  return depth;
}

Word ones(std::size_t length) { return Word(std::vector<int>(length, 1)); }

}  // namespace

ConstantsLedger constants_ledger(const MoranSystem& system, const CylinderMeasure& measure,
                                 double r, int H, const LedgerOptions& options) {
  if (H < 1) throw RangeError("H must be at least 1");
  ConstantsLedger ledger;
  auto add = [&](std::string name, std::optional<double> value, Grade grade, std::string formula,
                 std::string inputs) {
    ledger.entries.push_back(
        LedgerEntry{std::move(name), value, grade, std::move(formula), std::move(inputs)});
  };
  constexpr Grade kExact = Grade::kExactFormula;
  constexpr Grade kEst = Grade::kEmpiricalEstimate;
  constexpr Grade kBound = Grade::kBoundOnly;

  const int q = system.dimension();
  const SystemBounds b = system_bounds(system);
  const double p = measure.p();
  const double eta = eta_r(system, measure, r);

  add("p", p, kExact, "min_k min_j m_{k,j}", "measure");
  add("s_min", b.s_min, kExact, "min_k min_j s_{k,j}", "system");
  add("s_max", b.s_max, kExact, "max_k max_j s_{k,j}", "system");
  add("N0", b.n_max, kExact, "max_k n_k", "system");
  add("eta_r", eta, kExact, "min{p s_min^r, 8^-r}", "p, s_min, r");

  // Relative geometry and conditional masses depend only on the level, so
  // one representative word per phase covers every word.
  double delta = 1.0;
  double d0 = 1.0;
  for (std::size_t phase = 0; phase < system.period(); ++phase) {
    const SeparationWitness w = interior_witness(system, ones(phase), options.k0);
    delta = std::min(delta, w.delta);
    double ratio = 1.0;
    for (std::size_t i = 1; i <= w.suffix.size(); ++i) {
      ratio *= measure.conditional(phase + i, w.suffix.at(i));
    }
    d0 = std::min(d0, ratio);
  }
  add("k0", options.k0, kExact, "witness search depth", "configuration");
  add("delta", delta, kExact, "min over phases of d(J_{s*tau}, boundary J_s) / s_s", "system, k0");
  add("D0", d0, kExact, "min over phases of mu(J_{s*tau}) / mu(J_s)", "measure, tau");

  const std::size_t est_depth = estimate_depth(system, options.estimate_atoms);
  const auto atoms = discretize(measure, system, est_depth);
  const double d_est =
      doubling_profile(atoms, options.estimate_samples, RadiusGrid::for_atoms(atoms)).d_est;
  add("D", d_est, kEst, "max sampled mu(B(x,2e)) / mu(B(x,e))",
      "atoms at depth " + std::to_string(est_depth));

  const int h0 = growth_h0(system, measure, r);
  add("H0", h0, kExact, "[log eta_r / log((1-p) s_max^r)] + 1", "eta_r, p, s_max, r");
  add("N1", std::pow(static_cast<double>(b.n_max), h0), kExact, "N0^H0", "N0, H0");

  add("H", H, kExact, "codebook size for the cell bounds", "configuration");
  const int k2 = static_cast<int>(std::floor(std::log(static_cast<double>(H)) / std::log(2.0))) + 1;
  add("k2", k2, kExact, "[log H / log 2] + 1", "H");
  add("C1H", d0 * std::pow(p, k2) * std::pow(delta * std::pow(b.s_min, k2), r), kExact,
      "D0 p^k2 (delta s_min^k2)^r", "D0, p, delta, s_min, k2, r");

  int k3 = 0;
  while (std::ldexp(1.0, k3) <= 45.0 / (16.0 * delta)) ++k3;
  add("k3", k3, kExact, "min{k : 2^k > 45/(16 delta)}", "delta");
  const double c2 = std::pow(eta / std::pow(d_est, k3), 1.0 / r);
  add("C2", c2, kEst, "(eta_r / D^k3)^(1/r)", "eta_r, D, k3, r");
  const double c3 = eta * std::pow(c2, r);
  add("C3", c3, kEst, "eta_r C2^r", "eta_r, C2");
  const double m0 = std::pow(5.0 * (1.0 + 1.0 / c2), q) * std::pow(2.0 * c2 * delta, -q);
  add("M0", m0, kEst, "(5(1 + 1/C2))^q (2 C2 delta)^-q", "C2, delta, q");
  const double d1 = c3 / m0 * std::pow(2.5 * (1.0 + 1.0 / c2), -r);
  add("D1", d1, kEst, "C3 / M0 (5/2 (1 + 1/C2))^-r", "C3, M0, C2, r");
  const double l0 = std::pow(49.0, q);
  add("L0", l0, kExact, "49^q", "q");

  const double t = frostman_exponent(p, b.s_min);
  add("t", t, kExact, "log(1-p) / log(s_min)", "p, s_min");
  double c4 = 0.0;
  for (std::size_t phase = 0; phase < system.period(); ++phase) {
    const MoranSystem sys = system.shifted(phase);
    const CylinderMeasure mu = measure.shifted(phase);
    const auto cloud = discretize(mu, sys, estimate_depth(sys, options.estimate_atoms));
    c4 = std::max(c4, frostman_estimate(cloud, p, b.s_min, RadiusGrid::for_atoms(cloud),
                                        options.estimate_samples)
                          .c_est);
  }
  add("C4", c4, kEst, "max sampled nu(B(x,e)) / e^t", "atoms, t");
  const double c4t = 1.25 * (1.0 + 1.0 / c2 + 1.0 / (c2 * c2));
  add("C4_tilde", c4t, kEst, "(5/4)(1 + 1/C2 + 1/C2^2)", "C2");
  add("C5", c4 * std::pow(c4t, t), kEst, "C4 C4_tilde^t", "C4, C4_tilde, t");

  const int k4 = static_cast<int>(std::floor(-std::log(16.0) / std::log(b.s_max))) + 1;
  add("k4", k4, kExact, "[-log 16 / log s_max] + 1", "s_max");
  const double c6 = std::pow(p, k4) * std::pow(16.0, -r);
  add("C6", c6, kExact, "p^k4 16^-r", "p, k4, r");
  const int k5 = static_cast<int>(std::floor(std::log(delta / 4.0) / std::log(b.s_max))) + 1;
  add("k5", k5, kExact, "[log(delta/4) / log s_max] + 1", "delta, s_max");
  add("C7", std::pow(p, k5) * std::pow(delta / 4.0, r), kBound,
      "min{xi_{M5-1} p^k0 s_min^k0, p^k5 (delta/4)^r}; value is the second term, an upper bound",
      "p, k5, delta, r");

  const double eps_h = std::pow(4.0 * H * c4, -1.0 / t);
  add("xi_H", 0.75 * std::pow(eps_h, r), kEst, "(3/4) eps_H^r with eps_H = (4 H C4)^(-1/t)",
      "H, C4, t, r");

  const double eta1 = std::pow(c6 * d1 / 2.0, 1.0 / r);
  const double m1 = covering_count(eta1, q);
  add("M1", m1, kBound, "M(eta) with eta = (C6 D1 / 2)^(1/r)", "C6, D1, r, q");
  add("M2", m1 + l0, kBound, "M1 + L0", "M1, L0");
  add("M3", std::nullopt, kBound,
      "M(eta) + M2 + L0 with eta = (D1 eta_r zeta_{M2,r} / 2)^(1/r); depends on zeta (external)",
      "D1, eta_r, zeta");
  return ledger;
}

long long covering_M(double eta, int q) {
  if (!(eta > 0.0 && eta <= 1.0)) throw RangeError("eta must lie in (0,1]");
  if (q < 1) throw RangeError("dimension must be positive");
  const double count = covering_count(eta, q);
  if (count > 9.0e18) throw RangeError("covering number overflows a 64-bit integer");
  return static_cast<long long>(count);
}

std::vector<Point> covering_net(double eta, int q) {
  const long long m = static_cast<long long>(std::ceil(1.0 + 2.0 / eta));
  (void)covering_M(eta, q);
  std::vector<double> coords;
  for (long long i = 0; i < m; ++i) {
    coords.push_back((static_cast<double>(i) + 0.5) / static_cast<double>(m));
  }
  std::vector<Point> net;
  for (double x : coords) {
    if (q == 1) {
      net.push_back({x, 0.0});
      continue;
    }
    for (double y : coords) net.push_back({x, y});
  }
  return net;
}

ComparabilityReport comparability_check(const NeighborStructure& structure,
                                        const CylinderMeasure& measure,
                                        const ConstantsLedger& ledger) {
  const double c2 = ledger.value("C2");
  const double c3 = ledger.value("C3");
  const double m0 = ledger.value("M0");
  const double d1 = ledger.value("D1");
  ComparabilityReport rep;
  bool first = true;
  for (const auto& e : structure.entries) {
    const double ms = mass(measure, e.sigma);
    for (std::size_t j : e.neighbors) {
      const auto& o = structure.entries[j];
      const double sr = o.cell.side / e.cell.side;
      const double mr = mass(measure, o.sigma) / ms;
      if (first) {
        rep.s_ratio_min = rep.s_ratio_max = sr;
        rep.mu_ratio_min = rep.mu_ratio_max = mr;
      }
      rep.s_ratio_min = std::min(rep.s_ratio_min, sr);
      rep.s_ratio_max = std::max(rep.s_ratio_max, sr);
      rep.mu_ratio_min = std::min(rep.mu_ratio_min, mr);
      rep.mu_ratio_max = std::max(rep.mu_ratio_max, mr);
      first = false;
    }
    const double star = e.star_energy / e.energy;
    if (&e == &structure.entries.front()) {
      rep.star_ratio_min = rep.star_ratio_max = star;
    }
    rep.star_ratio_min = std::min(rep.star_ratio_min, star);
    rep.star_ratio_max = std::max(rep.star_ratio_max, star);
    rep.max_m = std::max(rep.max_m, e.neighbors.size());
  }
  rep.s_pass = rep.s_ratio_min >= c2 && rep.s_ratio_max < 1.0 / c2;
  rep.mu_pass = rep.mu_ratio_min >= c3 && rep.mu_ratio_max <= 1.0 / c3;
  rep.m_pass = static_cast<double>(rep.max_m) <= m0;
  rep.star_pass = rep.star_ratio_min >= d1 && rep.star_ratio_max <= 1.0 / d1;
  rep.pass = rep.s_pass && rep.mu_pass && rep.m_pass && rep.star_pass;
  return rep;
}

}  // namespace moranq
