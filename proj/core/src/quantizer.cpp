#include "moranq/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "moranq/errors.hpp"

namespace moranq {

namespace {

double pow_r(double d, double r) {
  if (r == 2.0) return d * d;
  if (r == 1.0) return d;
  return std::pow(d, r);
}

double dist_pow(const Point& a, const Point& b, double r) {
  if (r == 2.0) return squared_distance(a, b);
  return pow_r(distance(a, b), r);
}

// Nearest codepoint for every atom, ties to the lowest index.
std::vector<std::size_t> nearest(const DiscretizedMeasure& atoms, std::span<const Point> points) {
  const std::size_t m = atoms.size();
  const std::size_t n = points.size();
  std::vector<std::size_t> out(m, 0);
  if (atoms.dim == 1 && n > 8) {
    // Codepoints sorted by (x, index): the nearest is the closest one on
    // either side, and among equal positions the first of the run.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return points[a][0] < points[b][0] || (points[a][0] == points[b][0] && a < b);
    });
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = points[order[i]][0];
    for (std::size_t i = 0; i < m; ++i) {
      const double x = atoms.atoms[i].x[0];
      const auto hi = static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), x) - xs.begin());
      std::size_t best = n;
      double best_d = std::numeric_limits<double>::infinity();
      auto consider = [&](std::size_t pos) {
        // First index of the run of equal positions.
        std::size_t first = pos;
        while (first > 0 && xs[first - 1] == xs[pos]) --first;
        const std::size_t idx = order[first];
        const double d = (x - xs[pos]) * (x - xs[pos]);
        if (d < best_d || (d == best_d && idx < best)) {
          best_d = d;
          best = idx;
        }
      };
      if (hi < n) consider(hi);
      if (hi > 0) consider(hi - 1);
      out[i] = best;
    }
    return out;
  }
  for (std::size_t i = 0; i < m; ++i) {
    const Point& x = atoms.atoms[i].x;
    std::size_t best = 0;
    double best_d = squared_distance(x, points[0]);
    for (std::size_t a = 1; a < n; ++a) {
      const double d = squared_distance(x, points[a]);
      if (d < best_d) {
        best_d = d;
        best = a;
      }
    }
    out[i] = best;
  }
  return out;
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Index i with probability weights[i] / sum; the last positive entry absorbs rounding.
std::size_t sample_index(std::span<const double> weights, double total, std::mt19937_64& rng) {
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last = i;
    if (u < acc) return i;
  }
  return last;
}

std::vector<Point> seed_points(const DiscretizedMeasure& atoms, std::size_t n,
                               std::mt19937_64& rng) {
  const std::size_t m = atoms.size();
  std::vector<double> w(m);
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) total += (w[i] = atoms.atoms[i].weight);
  std::vector<Point> pts;
  pts.push_back(atoms.atoms[sample_index(w, total, rng)].x);
  std::vector<double> d2(m);
  for (std::size_t i = 0; i < m; ++i) d2[i] = squared_distance(atoms.atoms[i].x, pts[0]);
  while (pts.size() < n) {
    total = 0.0;
    for (std::size_t i = 0; i < m; ++i) total += (w[i] = atoms.atoms[i].weight * d2[i]);
    const Point next = atoms.atoms[sample_index(w, total, rng)].x;
    pts.push_back(next);
    for (std::size_t i = 0; i < m; ++i) {
      d2[i] = std::min(d2[i], squared_distance(atoms.atoms[i].x, next));
    }
  }
  return pts;
}

double cell_cost(std::span<const Point> xs, std::span<const double> ws, const Point& c, double r) {
  double s = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) s += ws[i] * dist_pow(xs[i], c, r);
  return s;
}

std::uint64_t restart_seed(std::uint64_t seed, int restart) {
  return seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(restart) * 0xBF58476D1CE4E5B9ULL;
}

void check_lloyd_inputs(const DiscretizedMeasure& atoms, std::size_t n, double r) {
  if (n == 0) throw PreconditionError("codebook size must be at least 1");
  if (!(r >= 1.0)) throw PreconditionError("order r must be at least 1");
  const std::size_t distinct = distinct_atom_count(atoms);
  if (n > distinct) {
    throw PreconditionError("codebook size " + std::to_string(n) + " exceeds the " +
                            std::to_string(distinct) + " distinct atom locations");
  }
}

}  // namespace

CellSums assign_cells(const DiscretizedMeasure& atoms, std::span<const Point> points, double r) {
  if (points.empty()) throw PreconditionError("codebook must be non-empty");
  CellSums out;
  out.assignment = nearest(atoms, points);
  out.mass.assign(points.size(), 0.0);
  out.integral.assign(points.size(), 0.0);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const std::size_t a = out.assignment[i];
    const Atom& at = atoms.atoms[i];
    out.mass[a] += at.weight;
    out.integral[a] += at.weight * dist_pow(at.x, points[a], r);
  }
  for (double v : out.integral) out.total += v;
  return out;
}

double distortion(const DiscretizedMeasure& atoms, std::span<const Point> points, double r) {
  return assign_cells(atoms, points, r).total;
}

std::size_t distinct_atom_count(const DiscretizedMeasure& atoms) {
  std::vector<Point> xs;
  xs.reserve(atoms.size());
  for (const auto& a : atoms.atoms) xs.push_back(a.x);
  std::sort(xs.begin(), xs.end());
  return static_cast<std::size_t>(std::unique(xs.begin(), xs.end()) - xs.begin());
}

Point one_center(std::span<const Point> xs, std::span<const double> ws, int dim, double r,
                 double tol) {
  if (xs.empty()) throw PreconditionError("one_center needs at least one point");
  double wsum = 0.0;
  Point mean{0.0, 0.0};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    wsum += ws[i];
    mean[0] += ws[i] * xs[i][0];
    mean[1] += ws[i] * xs[i][1];
  }
  mean[0] /= wsum;
  mean[1] /= wsum;
  if (dim == 1) mean[1] = 0.0;
  if (r == 2.0 || xs.size() == 1) return xs.size() == 1 ? xs[0] : mean;

  if (dim == 1) {
    double lo = xs[0][0];
    double hi = xs[0][0];
    for (const auto& x : xs) {
      lo = std::min(lo, x[0]);
      hi = std::max(hi, x[0]);
    }
    const double width = hi - lo;
    // d/dc sum w |x - c|^r is non-decreasing in c.
    auto slope = [&](double c) {
      double g = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const double d = c - xs[i][0];
        if (d == 0.0) continue;
        g += ws[i] * (d > 0 ? 1.0 : -1.0) * pow_r(std::abs(d), r - 1.0);
      }
      return g;
    };
    for (int it = 0; it < 200 && hi - lo > tol * width; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (slope(mid) < 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return {0.5 * (lo + hi), 0.0};
  }

  double scale = 0.0;
  for (const auto& x : xs) scale = std::max(scale, distance(x, mean));
  if (scale == 0.0) return mean;
  Point c = mean;
  double fc = cell_cost(xs, ws, c, r);
  const double floor_d = 1e-15 * scale;
  for (int it = 0; it < 1000; ++it) {
    double sw = 0.0;
    Point num{0.0, 0.0};
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double d = std::max(distance(xs[i], c), floor_d);
      const double v = ws[i] * std::pow(d, r - 2.0);
      sw += v;
      num[0] += v * xs[i][0];
      num[1] += v * xs[i][1];
    }
    Point step{num[0] / sw - c[0], num[1] / sw - c[1]};
    bool moved = false;
    for (int h = 0; h < 40; ++h) {
      const Point cand{c[0] + step[0], c[1] + step[1]};
      const double fcand = cell_cost(xs, ws, cand, r);
      if (fcand < fc) {
        const double move = std::hypot(step[0], step[1]);
        c = cand;
        fc = fcand;
        moved = move >= tol * scale;
        break;
      }
      step[0] *= 0.5;
      step[1] *= 0.5;
    }
    if (!moved) break;
  }
  return c;
}

Codebook lloyd_from(const DiscretizedMeasure& atoms, std::vector<Point> start, double r,
                    const LloydConfig& cfg) {
  check_lloyd_inputs(atoms, start.size(), r);
  Codebook book;
  book.dim = atoms.dim;
  book.r = r;
  book.restarts = 1;
  book.seed = cfg.seed;
  std::vector<Point> pts = std::move(start);
  const std::size_t n = pts.size();
  CellSums sums = assign_cells(atoms, pts, r);
  double prev = sums.total;
  std::vector<std::vector<std::size_t>> members(n);

  auto repair_empty = [&]() {
    for (std::size_t a = 0; a < n; ++a) {
      if (sums.mass[a] > 0.0) continue;
      std::size_t worst = 0;
      double worst_v = -1.0;
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        const Atom& at = atoms.atoms[i];
        const double v = at.weight * dist_pow(at.x, pts[sums.assignment[i]], r);
        if (v > worst_v) {
          worst_v = v;
          worst = i;
        }
      }
      pts[a] = atoms.atoms[worst].x;
      sums = assign_cells(atoms, pts, r);
    }
  };

  for (int it = 0; it < cfg.max_iter; ++it) {
    repair_empty();
    prev = sums.total;
    for (auto& v : members) v.clear();
    for (std::size_t i = 0; i < atoms.size(); ++i) members[sums.assignment[i]].push_back(i);
    std::vector<Point> next = pts;
    std::vector<Point> xs;
    std::vector<double> ws;
    for (std::size_t a = 0; a < n; ++a) {
      if (members[a].empty()) continue;
      xs.clear();
      ws.clear();
      for (std::size_t i : members[a]) {
        xs.push_back(atoms.atoms[i].x);
        ws.push_back(atoms.atoms[i].weight);
      }
      const Point c = one_center(xs, ws, atoms.dim, r, cfg.tol);
      // Never accept a centre that does worse on its own cell.
      if (r == 2.0 || cell_cost(xs, ws, c, r) <= cell_cost(xs, ws, pts[a], r)) next[a] = c;
    }
    CellSums moved = assign_cells(atoms, next, r);
    book.iterations = it + 1;
    if (moved.total > prev) {
      // Rounding in the centre update; keep the previous book.
      if (moved.total > prev * (1.0 + 1e-12)) book.monotone = false;
      book.converged = true;
      break;
    }
    pts = std::move(next);
    sums = std::move(moved);
    if (prev - sums.total <= cfg.tol * prev) {
      book.converged = true;
      break;
    }
  }
  repair_empty();
  book.points = std::move(pts);
  book.distortion = sums.total;
  return book;
}

Codebook lloyd(const DiscretizedMeasure& atoms, std::size_t n, double r, const LloydConfig& cfg) {
  check_lloyd_inputs(atoms, n, r);
  const int restarts = std::max(1, cfg.restarts);
  std::vector<Codebook> runs(static_cast<std::size_t>(restarts));
  auto run = [&](int i) {
    std::mt19937_64 rng(restart_seed(cfg.seed, i));
    runs[static_cast<std::size_t>(i)] = lloyd_from(atoms, seed_points(atoms, n, rng), r, cfg);
  };
  const int threads = std::clamp(cfg.threads, 1, restarts);
  if (threads == 1) {
    for (int i = 0; i < restarts; ++i) run(i);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (int i = t; i < restarts; i += threads) run(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (runs[i].distortion < runs[best].distortion) best = i;
  }
  Codebook out = std::move(runs[best]);
  out.restarts = restarts;
  out.seed = cfg.seed;
  return out;
}

Codebook brute_force(const DiscretizedMeasure& atoms, std::size_t n, double r) {
  const std::size_t m = atoms.size();
  if (m > kOracleMaxAtoms || n > kOracleMaxPoints) {
    throw PreconditionError("oracle limited to " + std::to_string(kOracleMaxAtoms) + " atoms and " +
                            std::to_string(kOracleMaxPoints) + " points");
  }
  check_lloyd_inputs(atoms, n, r);
  const std::size_t subsets = std::size_t{1} << m;
  std::vector<double> cost(subsets, 0.0);
  std::vector<Point> centre(subsets, Point{0.0, 0.0});
  std::vector<Point> xs;
  std::vector<double> ws;
  for (std::size_t mask = 1; mask < subsets; ++mask) {
    xs.clear();
    ws.clear();
    for (std::size_t i = 0; i < m; ++i) {
      if (mask >> i & 1U) {
        xs.push_back(atoms.atoms[i].x);
        ws.push_back(atoms.atoms[i].weight);
      }
    }
    centre[mask] = one_center(xs, ws, atoms.dim, r, 1e-13);
    cost[mask] = cell_cost(xs, ws, centre[mask], r);
  }

  // Restricted growth strings with exactly n blocks enumerate each
  // partition once.
  std::vector<std::size_t> label(m, 0);
  std::vector<std::size_t> masks(n, 0);
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_masks;
  auto recurse = [&](auto&& self, std::size_t i, std::size_t used) -> void {
    if (m - i < n - used) return;
    if (i == m) {
      double total = 0.0;
      for (std::size_t b = 0; b < n; ++b) total += cost[masks[b]];
      if (total < best) {
        best = total;
        best_masks = masks;
      }
      return;
    }
    const std::size_t limit = std::min(used + 1, n);
    for (std::size_t b = 0; b < limit; ++b) {
      masks[b] |= std::size_t{1} << i;
      self(self, i + 1, std::max(used, b + 1));
      masks[b] &= ~(std::size_t{1} << i);
    }
  };
  recurse(recurse, 0, 0);

  Codebook book;
  book.dim = atoms.dim;
  book.r = r;
  book.converged = true;
  for (std::size_t b = 0; b < n; ++b) book.points.push_back(centre[best_masks[b]]);
  book.distortion = distortion(atoms, book.points, r);
  return book;
}

namespace {

// Starting books of size n + 1 grown from an n-point book: one adds the
// worst-served atom, the other splits the costliest cell with a 2-means.
std::vector<std::vector<Point>> grown_starts(const DiscretizedMeasure& atoms,
                                             const std::vector<Point>& prev, double r,
                                             const LloydConfig& cfg) {
  std::vector<std::vector<Point>> starts;
  const CellSums sums = assign_cells(atoms, prev, r);
  std::size_t worst = 0;
  double worst_v = -1.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const Atom& at = atoms.atoms[i];
    const double v = at.weight * dist_pow(at.x, prev[sums.assignment[i]], r);
    if (v > worst_v) {
      worst_v = v;
      worst = i;
    }
  }
  starts.push_back(prev);
  starts.back().push_back(atoms.atoms[worst].x);

  const auto costliest = static_cast<std::size_t>(
      std::max_element(sums.integral.begin(), sums.integral.end()) - sums.integral.begin());
  DiscretizedMeasure cell;
  cell.dim = atoms.dim;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (sums.assignment[i] == costliest) cell.atoms.push_back(atoms.atoms[i]);
  }
  if (distinct_atom_count(cell) >= 2) {
    const Codebook split = lloyd(cell, 2, r, cfg);
    starts.push_back(prev);
    starts.back()[costliest] = split.points[0];
    starts.back().push_back(split.points[1]);
  }
  return starts;
}

}  // namespace

ErrorCurve error_curve(const DiscretizedMeasure& atoms, std::size_t n_min, std::size_t n_max,
                       double r, const LloydConfig& cfg) {
  if (n_min < 1 || n_max < n_min) throw RangeError("invalid codebook size range");
  ErrorCurve curve;
  const std::size_t distinct = distinct_atom_count(atoms);
  for (std::size_t n = n_min; n <= n_max; ++n) {
    Codebook book = lloyd(atoms, n, r, cfg);
    if (!curve.rows.empty()) {
      for (auto& start : grown_starts(atoms, curve.rows.back().book.points, r, cfg)) {
        Codebook warm = lloyd_from(atoms, std::move(start), r, cfg);
        if (warm.distortion < book.distortion) {
          warm.restarts = book.restarts;
          book = std::move(warm);
        }
      }
      const bool must_decrease = n - 1 < distinct;
      if (must_decrease && !(book.distortion < curve.rows.back().e_r)) {
        LloydConfig again = cfg;
        again.restarts = std::max(1, cfg.restarts) * 2;
        Codebook retry = lloyd(atoms, n, r, again);
        if (retry.distortion < book.distortion) book = std::move(retry);
        if (!(book.distortion < curve.rows.back().e_r)) curve.monotone_violation = true;
      }
    }
    curve.rows.push_back(ErrorCurveRow{n, book.distortion, std::move(book)});
  }
  return curve;
}

double self_similar_variance(const MoranSystem& system, const CylinderMeasure& measure) {
  if (system.period() != 1 || measure.period() != 1) {
    throw PreconditionError("closed-form variance needs a period-1 system and measure");
  }
  const LevelSpec& spec = system.level(1);
  const int q = system.dimension();
  double ps = 0.0;
  double ps2 = 0.0;
  Point po{0.0, 0.0};
  for (int j = 1; j <= spec.branches(); ++j) {
    const double p = measure.conditional(1, j);
    const double s = spec.ratios[static_cast<std::size_t>(j - 1)];
    ps += p * s;
    ps2 += p * s * s;
    for (int a = 0; a < q; ++a) po[a] += p * spec.offsets[static_cast<std::size_t>(j - 1)][a];
  }
  Point mean{0.0, 0.0};
  for (int a = 0; a < q; ++a) mean[a] = po[a] / (1.0 - ps);
  double spread = 0.0;
  for (int j = 1; j <= spec.branches(); ++j) {
    const double p = measure.conditional(1, j);
    const double s = spec.ratios[static_cast<std::size_t>(j - 1)];
    double d2 = 0.0;
    for (int a = 0; a < q; ++a) {
      const double fm = spec.offsets[static_cast<std::size_t>(j - 1)][a] + s * mean[a];
      d2 += (fm - mean[a]) * (fm - mean[a]);
    }
    spread += p * d2;
  }
  return spread / (1.0 - ps2);
}

}  // namespace moranq
