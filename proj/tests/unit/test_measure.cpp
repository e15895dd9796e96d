#include <doctest.h>

#include <cmath>
#include <random>

#include "moranq/errors.hpp"
#include "moranq/measure.hpp"

using namespace moranq;
using doctest::Approx;

namespace {

const MoranSystem& cantor() {
  static const MoranSystem s = MoranSystem::cantor(1.0 / 3.0);
  return s;
}

const MoranSystem& binary() {
  static const MoranSystem s = MoranSystem::binary_full();
  return s;
}

std::vector<double> xs_of(const DiscretizedMeasure& m) {
  std::vector<double> out;
  for (const Atom& a : m.atoms) out.push_back(a.x[0]);
  return out;
}

}  // namespace

TEST_CASE("cylinder masses") {
  const auto uc = CylinderMeasure::uniform(cantor());
  CHECK(mass(uc, Word{1, 2}) == Approx(0.25));
  CHECK(mass(uc, Word{}) == 1.0);
  const CylinderMeasure wb(binary(), {{0.6, 0.4}});
  CHECK(mass(wb, Word{2, 2}) == Approx(0.16));
  CHECK(wb.p() == Approx(0.4));
}

TEST_CASE("energies") {
  const auto uc = CylinderMeasure::uniform(cantor());
  CHECK(energy(uc, cantor(), Word{1}, 2.0) == Approx(1.0 / 18.0));
  CHECK(energy(uc, cantor(), Word{}, 3.7) == 1.0);
  const CylinderMeasure wb(binary(), {{0.6, 0.4}});
  CHECK(energy(wb, binary(), Word{1}, 1.0) == Approx(0.3));
}

TEST_CASE("measure validation names the level") {
  CHECK_THROWS_WITH_AS(CylinderMeasure(binary(), {{0.5, 0.4}}), doctest::Contains("level 1"),
                       ValidationError);
  CHECK_THROWS_AS(CylinderMeasure(binary(), {{1.0, 0.0}}), ValidationError);
  CHECK_THROWS_AS(CylinderMeasure(binary(), {{0.2, 0.3, 0.5}}), ValidationError);
  const auto alt = MoranSystem::alternating();
  CHECK_THROWS_WITH_AS(CylinderMeasure(alt, {{0.5, 0.5}, {0.3, 0.3, 0.3}}),
                       doctest::Contains("level 2"), ValidationError);
}

TEST_CASE("discretize places one atom at the centre of each cell") {
  const auto c2 = discretize(CylinderMeasure::uniform(cantor()), cantor(), 2);
  REQUIRE(c2.size() == 4);
  const std::vector<double> expect{1.0 / 18, 5.0 / 18, 13.0 / 18, 17.0 / 18};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(c2.atoms[i].x[0] == Approx(expect[i]));
    CHECK(c2.atoms[i].weight == Approx(0.25));
  }
  CHECK(c2.resolution == Approx(1.0 / 9.0));

  const auto b1 = discretize(CylinderMeasure::uniform(binary()), binary(), 1);
  CHECK(xs_of(b1) == std::vector<double>{0.25, 0.75});

  const auto carpet = MoranSystem::carpet4(0.25);
  const CylinderMeasure cm(carpet, {{0.1, 0.2, 0.3, 0.4}});
  const auto q1 = discretize(cm, carpet, 1);
  REQUIRE(q1.size() == 4);
  CHECK(q1.atoms[3].x[0] == Approx(0.875));
  CHECK(q1.atoms[3].x[1] == Approx(0.875));
  CHECK(q1.atoms[3].weight == Approx(0.4));
  CHECK(q1.atoms[1].x[0] == Approx(0.875));
  CHECK(q1.atoms[1].x[1] == Approx(0.125));

  CHECK_THROWS_AS(discretize(CylinderMeasure::uniform(binary()), binary(), 30), BudgetError);
}

TEST_CASE("ball mass") {
  const auto b10 = discretize(CylinderMeasure::uniform(binary()), binary(), 10);
  CHECK(std::abs(ball_mass(b10, Point{0.5, 0.0}, 0.25) - 0.5) <= 2 * b10.resolution);
  CHECK(ball_mass(b10, Point{0.3, 0.0}, 2.0) == Approx(1.0));
  const auto c10 = discretize(CylinderMeasure::uniform(cantor()), cantor(), 10);
  CHECK(ball_mass(c10, Point{0.5, 0.0}, 0.1) == 0.0);

  const BallMassIndex index(c10);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const Point x{u(rng), 0.0};
    const double eps = 0.5 * u(rng);
    CHECK(index(x, eps) == Approx(ball_mass(c10, x, eps)).epsilon(1e-12));
  }
}

TEST_CASE("doubling profiles") {
  const auto lebesgue = discretize(CylinderMeasure::uniform(binary()), binary(), 10);
  const auto prof = doubling_profile(lebesgue, 256, RadiusGrid::for_atoms(lebesgue));
  CHECK(prof.d_est <= 2.0 + 0.25);

  const auto cantor_trend = doubling_trend(CylinderMeasure::uniform(cantor()), cantor(), {8, 10, 12}, 256);
  CHECK(cantor_trend.spread <= 2.0);
  CHECK_FALSE(cantor_trend.diverging);

  const CylinderMeasure skew(binary(), {{0.9, 0.1}});
  const auto skew_trend = doubling_trend(skew, binary(), {8, 9, 10, 11, 12}, 0);
  CHECK(skew_trend.strictly_increasing);
  CHECK(skew_trend.diverging);

  const auto coarse = RadiusGrid{lebesgue.resolution, 1.0, 2.0};
  CHECK_THROWS_AS(doubling_profile(lebesgue, 16, coarse), PreconditionError);
}

TEST_CASE("conditional rescaling") {
  const auto uc = CylinderMeasure::uniform(cantor());
  const auto sub = rescale_conditional(uc, cantor(), Word{2, 1}, 8);
  const auto ref = discretize(uc, cantor(), 6);
  REQUIRE(sub.size() == ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    CHECK(sub.atoms[i].x[0] == Approx(ref.atoms[i].x[0]).epsilon(1e-12));
    CHECK(sub.atoms[i].weight == Approx(ref.atoms[i].weight).epsilon(1e-12));
  }

  const CylinderMeasure wb(binary(), {{0.6, 0.4}});
  const auto wsub = rescale_conditional(wb, binary(), Word{1}, 6);
  const auto wref = discretize(wb, binary(), 5);
  REQUIRE(wsub.size() == wref.size());
  for (std::size_t i = 0; i < wref.size(); ++i) {
    CHECK(wsub.atoms[i].x[0] == Approx(wref.atoms[i].x[0]));
    CHECK(wsub.atoms[i].weight == Approx(wref.atoms[i].weight));
  }

  // Period 2: the cloud under a level-1 word follows levels 2, 3, ...
  const auto alt = MoranSystem::alternating();
  const CylinderMeasure am(alt, {{0.3, 0.7}, {0.2, 0.5, 0.3}});
  const auto asub = rescale_conditional(am, alt, Word{1}, 5);
  const auto aref = discretize(am.shifted(1), alt.shifted(1), 4);
  REQUIRE(asub.size() == aref.size());
  double total = 0.0;
  for (std::size_t i = 0; i < aref.size(); ++i) {
    CHECK(asub.atoms[i].x[0] == Approx(aref.atoms[i].x[0]));
    CHECK(asub.atoms[i].weight == Approx(aref.atoms[i].weight));
    total += asub.atoms[i].weight;
  }
  CHECK(total == Approx(1.0));
}

TEST_CASE("Frostman exponent and constant") {
  CHECK(frostman_exponent(0.5, 1.0 / 3.0) == Approx(0.6309297535714575));
  CHECK(frostman_exponent(0.5, 0.5) == Approx(1.0));
  CHECK(frostman_exponent(0.4, 0.5) == Approx(std::log(0.6) / std::log(0.5)));
  CHECK_THROWS_AS(frostman_exponent(0.0, 0.5), PreconditionError);

  const auto leb = frostman_check(CylinderMeasure::uniform(binary()), binary(), 8, 256);
  CHECK(leb.t == Approx(1.0));
  CHECK(leb.c_fine == Approx(2.0).epsilon(0.05));
  CHECK(leb.pass);
}

TEST_CASE("property: mass conservation and p-bounds") {
  for (const auto& sys : {MoranSystem::cantor(1.0 / 3.0), MoranSystem::carpet4(0.25),
                          MoranSystem::alternating()}) {
    std::vector<std::vector<double>> masses;
    for (std::size_t k = 1; k <= sys.period(); ++k) {
      std::vector<double> m(static_cast<std::size_t>(sys.branches(k)));
      double total = 0.0;
      for (std::size_t j = 0; j < m.size(); ++j) total += (m[j] = 1.0 + double(j));
      for (double& v : m) v /= total;
      masses.push_back(m);
    }
    const CylinderMeasure mu(sys, masses);
    const double p = mu.p();
    for (std::size_t depth = 1; depth <= 4; ++depth) {
      double total = 0.0;
      for (const Word& w : words_of_length(sys, depth)) {
        total += mass(mu, w);
        const double parent = mass(mu, w.parent());
        CHECK(mass(mu, w) >= p * parent * (1 - 1e-12));
        CHECK(mass(mu, w) <= (1 - p) * parent * (1 + 1e-12));
        const double s_max = system_bounds(sys).s_max;
        const double e_parent = energy(mu, sys, w.parent(), 2.0);
        CHECK(energy(mu, sys, w, 2.0) <= (1 - p) * s_max * s_max * e_parent * (1 + 1e-12));
        CHECK(energy(mu, sys, w, 2.0) < e_parent);
      }
      CHECK(total == Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: discretization consistency of ball masses") {
  const auto mu = CylinderMeasure::uniform(cantor());
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t depth = 4; depth <= 8; ++depth) {
    const auto coarse = discretize(mu, cantor(), depth);
    const auto fine = discretize(mu, cantor(), depth + 1);
    for (int trial = 0; trial < 50; ++trial) {
      const Point x{u(rng), 0.0};
      const double eps = 0.3 * u(rng) + 1e-3;
      double boundary_weight = 0.0;
      for (const Atom& a : coarse.atoms) {
        if (std::abs(distance(a.x, x) - eps) <= coarse.resolution) boundary_weight += a.weight;
      }
      CHECK(std::abs(ball_mass(fine, x, eps) - ball_mass(coarse, x, eps)) <=
            boundary_weight + 1e-12);
    }
  }
}
