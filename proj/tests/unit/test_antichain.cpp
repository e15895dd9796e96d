#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "moranq/antichain.hpp"
#include "moranq/errors.hpp"
#include "moranq/quantizer.hpp"

using namespace moranq;
using doctest::Approx;

namespace {

struct Case {
  MoranSystem system;
  CylinderMeasure measure;
};

std::vector<Case> templates() {
  std::vector<Case> out;
  for (const auto& s : {MoranSystem::cantor(1.0 / 3.0), MoranSystem::binary_full(),
                        MoranSystem::carpet4(0.25), MoranSystem::alternating()}) {
    out.push_back({s, CylinderMeasure::uniform(s)});
  }
  return out;
}

// Brute-force stopping rule: every word up to `depth` whose parent energy is
// at least the threshold and whose own energy is below it.
std::set<Word> oracle_lambda(const MoranSystem& sys, const CylinderMeasure& mu, int k, double r,
                             std::size_t depth) {
  const double threshold = std::pow(eta_r(sys, mu, r), k);
  std::set<Word> out;
  for (std::size_t len = 1; len <= depth; ++len) {
    for (const Word& w : words_of_length(sys, len)) {
      if (energy(mu, sys, w.parent(), r) >= threshold && energy(mu, sys, w, r) < threshold) {
        out.insert(w);
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("eta_r") {
  const auto c = MoranSystem::cantor(1.0 / 3.0);
  CHECK(eta_r(c, CylinderMeasure::uniform(c), 2.0) == Approx(1.0 / 64.0));
  const auto b = MoranSystem::binary_full();
  CHECK(eta_r(b, CylinderMeasure(b, {{0.6, 0.4}}), 1.0) == Approx(0.125));
}

TEST_CASE("Cantor stopping-time antichains") {
  const auto c = MoranSystem::cantor(1.0 / 3.0);
  const auto mu = CylinderMeasure::uniform(c);
  const auto l1 = build_lambda(c, mu, 1, 2.0);
  CHECK(l1.phi() == 4);
  for (const Word& w : l1.words.words) CHECK(w.size() == 2);
  const auto l2 = build_lambda(c, mu, 2, 2.0);
  CHECK(l2.phi() == 8);
  for (const Word& w : l2.words.words) CHECK(w.size() == 3);
  const auto l0 = build_lambda(c, mu, 0, 2.0);
  CHECK(l0.phi() == 2);

  CHECK_THROWS_AS(build_lambda(c, mu, -1, 2.0), RangeError);
  CHECK_THROWS_AS(build_lambda(c, mu, 0, 0.0), RangeError);
  CHECK_THROWS_AS(build_lambda(c, mu, 6, 2.0, 100), BudgetError);
}

TEST_CASE("build_lambda matches the brute-force stopping rule") {
  for (const auto& [sys, mu] : templates()) {
    for (double r : {1.0, 2.0}) {
      for (int k = 0; k <= 3; ++k) {
        const auto lambda = build_lambda(sys, mu, k, r);
        const auto oracle = oracle_lambda(sys, mu, k, r, lambda.words.max_length() + 1);
        const std::set<Word> got(lambda.words.words.begin(), lambda.words.words.end());
        CHECK(got == oracle);
      }
    }
  }
}

TEST_CASE("growth check") {
  const auto c = MoranSystem::cantor(1.0 / 3.0);
  const auto mu = CylinderMeasure::uniform(c);
  CHECK(growth_h0(c, mu, 2.0) == 2);
  const auto rep = growth_check(c, mu, 2.0, 4);
  CHECK(rep.n1 == Approx(4.0));
  CHECK(rep.pass);
  REQUIRE(rep.rows.size() == 4);
  for (const auto& row : rep.rows) CHECK(row.factor <= 4.0);

  const auto q = MoranSystem::carpet4(0.25);
  CHECK(growth_check(q, CylinderMeasure::uniform(q), 2.0, 4).pass);
}

TEST_CASE("neighbor sets") {
  const auto c = MoranSystem::cantor(1.0 / 3.0);
  const auto mu = CylinderMeasure::uniform(c);
  const auto ns = neighbor_sets(c, mu, build_lambda(c, mu, 1, 2.0));
  CHECK(ns.max_m == 1);
  for (const auto& e : ns.entries) CHECK(e.m_sigma() == 1);

  const auto b = MoranSystem::binary_full();
  const auto bmu = CylinderMeasure::uniform(b);
  const auto bl = build_lambda(b, bmu, 2, 2.0);
  const auto bns = neighbor_sets(b, bmu, bl);
  for (std::size_t i = 0; i < bns.entries.size(); ++i) {
    const bool end = i == 0 || i + 1 == bns.entries.size();
    CHECK(bns.entries[i].m_sigma() == (end ? 2u : 3u));
  }

  LambdaAntichain root;
  root.eta = 1.0 / 64.0;
  root.words.words = {Word{}};
  root.energies = {1.0};
  const auto rns = neighbor_sets(c, mu, root);
  REQUIRE(rns.entries.size() == 1);
  CHECK(rns.entries[0].m_sigma() == 1);
  CHECK(rns.entries[0].star_energy == Approx(energy(mu, c, Word{}, 2.0)));
}

TEST_CASE("constants ledger for the uniform Cantor measure") {
  const auto c = MoranSystem::cantor(1.0 / 3.0);
  const auto mu = CylinderMeasure::uniform(c);
  const auto ledger = constants_ledger(c, mu, 2.0, 2);
  CHECK(ledger.value("eta_r") == Approx(1.0 / 64.0));
  CHECK(ledger.value("D0") == Approx(0.25));
  CHECK(ledger.value("delta") == Approx(2.0 / 9.0));
  CHECK(ledger.value("k2") == 2);
  CHECK(ledger.value("C1H") == Approx(1.0 / 26244.0).epsilon(1e-9));
  CHECK(ledger.value("L0") == 49);
  CHECK(ledger.value("k4") == 3);
  CHECK(ledger.value("C6") == Approx(1.0 / 2048.0));
  CHECK(ledger.value("H0") == 2);
  CHECK(ledger.value("N1") == 4);
  CHECK(ledger.entry("D0").grade == Grade::kExactFormula);
  CHECK(ledger.entry("C2").grade == Grade::kEmpiricalEstimate);
  CHECK_FALSE(ledger.has_value("M3"));
  CHECK_THROWS_AS(ledger.value("M3"), RangeError);
  CHECK_THROWS_AS(ledger.value("nope"), RangeError);

  const double c2 = ledger.value("C2");
  const double delta = ledger.value("delta");
  CHECK(ledger.value("M0") == Approx(5.0 * (1.0 + 1.0 / c2) / (2.0 * c2 * delta)).epsilon(1e-9));
  CHECK(ledger.value("C3") == Approx(ledger.value("eta_r") * c2 * c2).epsilon(1e-9));

  for (const auto& e : ledger.entries) CHECK_FALSE(e.inputs.empty());
  const auto q = MoranSystem::carpet4(0.25);
  CHECK(constants_ledger(q, CylinderMeasure::uniform(q), 2.0, 2).value("L0") == 49 * 49);
}

TEST_CASE("comparability") {
  const auto c = MoranSystem::cantor(1.0 / 3.0);
  const auto mu = CylinderMeasure::uniform(c);
  const auto ledger = constants_ledger(c, mu, 2.0, 2);
  for (int k = 1; k <= 4; ++k) {
    const auto rep = comparability_check(neighbor_sets(c, mu, build_lambda(c, mu, k, 2.0)), mu, ledger);
    CHECK(rep.pass);
    CHECK(rep.max_m == 1);
    CHECK(rep.s_ratio_min == Approx(1.0));
    CHECK(rep.s_ratio_max == Approx(1.0));
  }
  const auto b = MoranSystem::binary_full();
  const auto bmu = CylinderMeasure::uniform(b);
  const auto bledger = constants_ledger(b, bmu, 2.0, 2);
  for (int k = 1; k <= 5; ++k) {
    const auto rep =
        comparability_check(neighbor_sets(b, bmu, build_lambda(b, bmu, k, 2.0)), bmu, bledger);
    CHECK(rep.s_ratio_min >= 0.5);
    CHECK(rep.s_ratio_max <= 2.0);
    CHECK(rep.pass);
  }
}

TEST_CASE("covering integer") {
  CHECK(covering_M(1.0, 1) == 3);
  CHECK(covering_M(0.5, 2) == 25);
  CHECK_THROWS_AS(covering_M(0.0, 1), RangeError);
  CHECK_THROWS_AS(covering_M(1.5, 1), RangeError);

  const auto b = MoranSystem::binary_full();
  const auto atoms = discretize(CylinderMeasure::uniform(b), b, 10);
  const auto net = covering_net(0.25, 1);
  REQUIRE(net.size() == static_cast<std::size_t>(covering_M(0.25, 1)));
  CHECK(net.size() == 9);
  CHECK(distortion(atoms, net, 2.0) <= 0.0625);
}

TEST_CASE("property: covering nets reach every point within eta / 2") {
  for (double eta : {1.0, 0.7, 0.3, 0.11}) {
    for (int q : {1, 2}) {
      const auto net = covering_net(eta, q);
      CHECK(net.size() == static_cast<std::size_t>(covering_M(eta, q)));
      const int grid = 41;
      for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < (q == 2 ? grid : 1); ++j) {
          const Point x{i / double(grid - 1), q == 2 ? j / double(grid - 1) : 0.0};
          double best = 1e9;
          for (const Point& p : net) best = std::min(best, distance(x, p));
          CHECK(best <= eta / 2 + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("property: antichain invariants across templates") {
  for (const auto& [sys, mu] : templates()) {
    for (double r : {1.0, 2.0}) {
      std::set<std::size_t> max_ms;
      std::size_t prev_phi = 0;
      for (int k = 0; k <= 5; ++k) {
        const auto lambda = build_lambda(sys, mu, k, r);
        CHECK(is_maximal_antichain(lambda.words.words, sys.alphabet(), lambda.words.max_length()).maximal);
        const double lo = std::pow(lambda.eta, k + 1), hi = std::pow(lambda.eta, k);
        for (double e : lambda.energies) {
          CHECK(e >= lo);
          CHECK(e < hi);
        }
        CHECK(lambda.phi() >= prev_phi);
        prev_phi = lambda.phi();

        const auto ns = neighbor_sets(sys, mu, lambda);
        for (std::size_t i = 0; i < ns.entries.size(); ++i) {
          const auto& nb = ns.entries[i].neighbors;
          CHECK(std::binary_search(nb.begin(), nb.end(), i));
          for (std::size_t j : nb) {
            const auto& back = ns.entries[j].neighbors;
            CHECK(std::binary_search(back.begin(), back.end(), i));
          }
        }
        if (k >= 1) max_ms.insert(ns.max_m);
      }
      CHECK(max_ms.size() == 1);
    }
  }
}
