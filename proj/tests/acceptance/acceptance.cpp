// End-to-end acceptance checks. Each criterion prints a single line
//   criterion <i>: PASS|FAIL  <measured values>
// and the process exits non-zero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "moranq/moranq.hpp"
#include "moranq_cli/app.hpp"

#ifndef MORANQ_CONFIG_DIR
#define MORANQ_CONFIG_DIR "configs"
#endif

using namespace moranq;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

LloydConfig single_thread() {
  LloydConfig cfg;
  cfg.threads = 1;
  return cfg;
}

Outcome lebesgue_sanity() {
  Timer timer;
  const auto sys = MoranSystem::binary_full();
  const auto mu = CylinderMeasure::uniform(sys);
  const auto atoms = discretize(mu, sys, 12);
  RatioOptions opt;
  opt.n_min = 1;
  opt.n_max = 16;
  opt.lloyd = single_thread();
  const RatioTable table = ratio_table(sys, mu, atoms, 2.0, opt);
  Outcome out;
  double worst_rel = 0.0, lo = 1.0, hi = 1.0;
  for (const RatioRow& row : table.rows) {
    const double target = 1.0 / (12.0 * double(row.n) * double(row.n));
    worst_rel = std::max(worst_rel, std::abs(row.e_r - target) / target);
    lo = std::min(lo, row.low_ratio);
    hi = std::max(hi, row.high_ratio);
  }
  const double elapsed = timer.seconds();
  out.pass = table.rows.size() == 16 && worst_rel <= 0.02 && lo >= 0.9 && hi <= 1.1 && elapsed < 60.0;

  // Oracle confirmation on the coarse cloud the exhaustive search can handle.
  const auto coarse = discretize(mu, sys, 3);
  double oracle_gap = 0.0;
  for (std::size_t n = 1; n <= 3; ++n) {
    const double bf = brute_force(coarse, n, 2.0).distortion;
    const double ll = lloyd(coarse, n, 2.0, single_thread()).distortion;
    oracle_gap = std::max(oracle_gap, std::abs(ll - bf) / bf);
  }
  out.pass = out.pass && oracle_gap <= 1e-9;
  out.detail = "max |e - 1/(12n^2)| / target = " + fmt("%.4f%%", 100 * worst_rel) +
               ", ratios in " + fmt("[%.4f, %.4f]", lo, hi) +
               ", coarse oracle gap " + fmt("%.1e", oracle_gap) + ", " + fmt("%.2f s", elapsed);
  return out;
}

Outcome cantor_variance() {
  const auto sys = MoranSystem::cantor(1.0 / 3.0);
  const auto mu = CylinderMeasure::uniform(sys);
  const double lloyd_value = lloyd(discretize(mu, sys, 10), 1, 2.0, single_thread()).distortion;
  const double closed = self_similar_variance(sys, mu);
  Outcome out;
  out.pass = std::abs(lloyd_value - 0.125) <= 0.001 && std::abs(closed - 0.125) <= 1e-12;
  out.detail = "Lloyd e^2_1 = " + fmt("%.8f", lloyd_value) + ", recursion = " + fmt("%.17g", closed);
  return out;
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int instances = 50;
  int agree = 0, below = 0;
  for (int t = 0; t < instances; ++t) {
    const int dim = 1 + static_cast<int>(rng() % 2);
    const std::size_t n = 1 + rng() % 3;
    const std::size_t m = n + rng() % (11 - n);
    DiscretizedMeasure atoms;
    atoms.dim = dim;
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      atoms.atoms.push_back(Atom{{u(rng), dim == 2 ? u(rng) : 0.0}, 0.05 + u(rng), Word{}});
      total += atoms.atoms.back().weight;
    }
    for (Atom& a : atoms.atoms) a.weight /= total;
    LloydConfig cfg = single_thread();
    cfg.restarts = 8;
    cfg.seed = static_cast<std::uint64_t>(t + 1);
    const double ll = lloyd(atoms, n, 2.0, cfg).distortion;
    const double bf = brute_force(atoms, n, 2.0).distortion;
    if (ll < bf * (1.0 - 1e-12)) ++below;
    if (std::abs(ll - bf) <= 1e-9 * bf) ++agree;
  }
  Outcome out;
  out.pass = agree >= 48 && below == 0;
  out.detail = std::to_string(agree) + "/" + std::to_string(instances) +
               " instances agree within 1e-9, " + std::to_string(below) + " below the oracle";
  return out;
}

struct Template {
  std::string name;
  MoranSystem system;
};

std::vector<Template> four_templates() {
  return {{"cantor", MoranSystem::cantor(1.0 / 3.0)},
          {"binary-full", MoranSystem::binary_full()},
          {"carpet4", MoranSystem::carpet4(0.25)},
          {"alternating", MoranSystem::alternating()}};
}

Outcome antichain_suite() {
  Outcome out;
  int checked = 0;
  for (const auto& [name, sys] : four_templates()) {
    const auto mu = CylinderMeasure::uniform(sys);
    for (double r : {1.0, 2.0}) {
      const double n1 = constants_ledger(sys, mu, r, 2).value("N1");
      std::vector<std::size_t> phi;
      for (int k = 0; k <= 5; ++k) {
        const auto lambda = build_lambda(sys, mu, k, r);
        const bool maximal =
            is_maximal_antichain(lambda.words.words, sys.alphabet(), lambda.words.max_length()).maximal;
        const double lo = std::pow(lambda.eta, k + 1), hi = std::pow(lambda.eta, k);
        bool sandwich = true;
        for (std::size_t i = 0; i < lambda.phi(); ++i) {
          const double e = energy(mu, sys, lambda.words.words[i], r);
          sandwich = sandwich && e >= lo && e < hi && e == lambda.energies[i];
        }
        if (!maximal || !sandwich) {
          out.pass = false;
          out.detail += name + " r=" + fmt("%g", r) + " k=" + std::to_string(k) +
                        (maximal ? " sandwich" : " maximality") + " violated; ";
        }
        phi.push_back(lambda.phi());
        ++checked;
      }
      for (std::size_t k = 0; k + 1 < phi.size(); ++k) {
        if (!(phi[k] <= phi[k + 1] && double(phi[k + 1]) <= n1 * double(phi[k]))) {
          out.pass = false;
          out.detail += name + " growth violated at k=" + std::to_string(k) + "; ";
        }
      }
    }
  }
  out.detail += std::to_string(checked) + " antichains checked (4 templates, r in {1,2}, k = 0..5)";
  return out;
}

Outcome neighbor_boundedness() {
  Outcome out;
  for (const auto& [name, sys] : four_templates()) {
    const auto mu = CylinderMeasure::uniform(sys);
    const double m0 = constants_ledger(sys, mu, 2.0, 2).value("M0");
    std::set<std::size_t> maxima;
    std::size_t min_m = 1000000;
    for (int k = 1; k <= 5; ++k) {
      const auto ns = neighbor_sets(sys, mu, build_lambda(sys, mu, k, 2.0));
      maxima.insert(ns.max_m);
      for (const auto& e : ns.entries) min_m = std::min(min_m, e.m_sigma());
    }
    const bool constant = maxima.size() == 1;
    const bool bounded = double(*maxima.rbegin()) <= m0;
    bool ok = constant && bounded;
    if (name == "cantor") ok = ok && *maxima.rbegin() == 1 && min_m == 1;
    out.pass = out.pass && ok;
    out.detail += name + " max M = " + std::to_string(*maxima.rbegin()) +
                  (constant ? "" : " (varies)") + (bounded ? "" : " (> M0)") + "; ";
  }
  return out;
}

// Spread of a ratio sequence and whether its top quartile leaves the band set
// by the first three quartiles.
struct BandCheck {
  Band all;
  Band early;
  bool widened = false;
};

BandCheck band_check(const std::vector<double>& values) {
  BandCheck b;
  b.all = band_of(values);
  const std::size_t cut = values.size() * 3 / 4;
  b.early = band_of(std::vector<double>(values.begin(), values.begin() + static_cast<long>(cut)));
  b.widened = b.all.min < b.early.min || b.all.max > b.early.max;
  return b;
}

Outcome weak_gersho_band() {
  Timer timer;
  Outcome out;
  struct Run {
    std::string name;
    MoranSystem sys;
    std::size_t depth, n_max;
  };
  for (const Run& run : {Run{"cantor", MoranSystem::cantor(1.0 / 3.0), 10, 64},
                         Run{"carpet4", MoranSystem::carpet4(0.25), 6, 32}}) {
    const auto mu = CylinderMeasure::uniform(run.sys);
    const auto atoms = discretize(mu, run.sys, run.depth);
    RatioOptions opt;
    opt.n_max = run.n_max;
    opt.lloyd = single_thread();
    const RatioTable table = ratio_table(run.sys, mu, atoms, 2.0, opt);
    std::vector<double> lows, highs;
    for (const RatioRow& row : table.rows) {
      lows.push_back(row.low_ratio);
      highs.push_back(row.high_ratio);
    }
    for (const auto& [label, seq] : {std::pair<const char*, const std::vector<double>&>{"low", lows},
                                     std::pair<const char*, const std::vector<double>&>{"high", highs}}) {
      const BandCheck b = band_check(seq);
      const bool ok = b.all.spread <= 30.0 && !b.widened;
      out.pass = out.pass && ok;
      out.detail += run.name + " " + label + " " + fmt("[%.4g, %.4g]", b.all.min, b.all.max) +
                    " spread " + fmt("%.3g", b.all.spread) +
                    (b.widened ? " widened in top quartile (first 3/4: " +
                                     fmt("[%.4g, %.4g])", b.early.min, b.early.max)
                               : "") +
                    "; ";
    }
  }
  const double elapsed = timer.seconds();
  out.pass = out.pass && elapsed < 600.0;
  out.detail += fmt("%.1f s", elapsed);
  return out;
}

Outcome energy_band() {
  const auto sys = MoranSystem::cantor(1.0 / 3.0);
  const auto mu = CylinderMeasure::uniform(sys);
  const auto atoms = discretize(mu, sys, 10);
  const EnergySumReport rep = energy_sum_check(sys, mu, atoms, 2.0, 1, 4, 1.0, 4.0, single_thread());
  const double first = rep.rows.front().energy_ratio;
  double drift = 0.0;
  std::string phis;
  for (const EnergyRow& row : rep.rows) {
    drift = std::max(drift, std::abs(row.energy_ratio - first));
    phis += (phis.empty() ? "" : ",") + std::to_string(row.phi);
  }
  Outcome out;
  const bool constant = drift <= 1e-12;
  out.pass = rep.error_band.spread <= 4.0 && rep.energy_band.spread <= 4.0 && constant;
  out.detail = "phi = " + phis + "; error-ratio spread " + fmt("%.3f", rep.error_band.spread) +
               ", energy-ratio spread " + fmt("%.3f", rep.energy_band.spread) +
               ", energy ratio drift " + fmt("%.3g", drift);
  return out;
}

Outcome optimal_geometry() {
  const auto sys = MoranSystem::cantor(1.0 / 3.0);
  const auto mu = CylinderMeasure::uniform(sys);
  const auto atoms = discretize(mu, sys, 10);
  const double l0 = constants_ledger(sys, mu, 2.0, 2).value("L0");
  Outcome out;
  for (int k = 0; k <= 3; ++k) {
    const auto lambda = build_lambda(sys, mu, k, 2.0);
    const std::size_t n = 4 * lambda.phi();
    const Codebook book = lloyd(atoms, n, 2.0, single_thread());
    const KappaStats st = kappa_stats(book.points, lambda, sys);
    const bool ok = st.kappa_min >= 1 && st.kappa_max <= 64 &&
                    double(st.kappa_c) <= l0 * double(lambda.phi());
    out.pass = out.pass && ok;
    out.detail += "k=" + std::to_string(k) + " n=" + std::to_string(n) + " kappa in [" +
                  std::to_string(st.kappa_min) + "," + std::to_string(st.kappa_max) +
                  "] kappa_c=" + std::to_string(st.kappa_c) + "; ";
  }
  return out;
}

Outcome non_doubling_detector() {
  const auto sys = MoranSystem::binary_full();
  const std::vector<std::size_t> depths{8, 9, 10, 11, 12};
  const auto skew = doubling_trend(CylinderMeasure(sys, {{0.9, 0.1}}), sys, depths, 0);
  const auto mild = doubling_trend(CylinderMeasure(sys, {{0.6, 0.4}}), sys, depths, 0);
  auto list = [](const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : " ") + fmt("%.4g", x);
    return s;
  };
  Outcome out;
  out.pass = skew.strictly_increasing && skew.diverging && mild.spread <= 2.0;
  out.detail = "(0.9,0.1) D_est " + list(skew.d_est) +
               (skew.diverging ? " [warning: diverging]" : "") + "; (0.6,0.4) D_est " +
               list(mild.d_est) + " spread " + fmt("%.3f", mild.spread);
  return out;
}

std::map<std::string, std::string> run_suite(const fs::path& out_root, int threads) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(MORANQ_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    const std::string stem = entry.path().stem().string();
    const fs::path dir = out_root / stem;
    for (const char* cmd : {"verify", "antichain", "constants", "quantize", "gersho"}) {
      std::ostringstream sink;
      const int code = cli::run({"moran-quant", cmd, "--config", entry.path().string(), "--out",
                                 dir.string(), "--threads", std::to_string(threads)},
                                sink, sink);
      if (code != cli::kExitOk && code != cli::kExitFailed) {
        throw Error(stem + " " + cmd + " exited with " + std::to_string(code) + ": " + sink.str());
      }
    }
    for (const auto& f : fs::directory_iterator(dir)) {
      std::ifstream in(f.path(), std::ios::binary);
      std::ostringstream bytes;
      bytes << in.rdbuf();
      files[stem + "/" + f.path().filename().string()] = bytes.str();
    }
  }
  return files;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "moranq_acceptance_determinism";
  fs::remove_all(root);
  const auto first = run_suite(root / "run1", 1);
  const auto second = run_suite(root / "run2", 1);
  const auto threaded = run_suite(root / "run3", 4);
  std::size_t csvs = 0, mismatched = 0;
  for (const auto& [name, bytes] : first) {
    if (name.size() > 4 && name.ends_with(".csv")) ++csvs;
    const auto a = second.find(name);
    const auto b = threaded.find(name);
    if (a == second.end() || a->second != bytes || b == threaded.end() || b->second != bytes) {
      ++mismatched;
    }
  }
  fs::remove_all(root);
  Outcome out;
  out.pass = mismatched == 0 && csvs > 0 && first.size() == second.size();
  out.detail = std::to_string(first.size()) + " artifacts (" + std::to_string(csvs) +
               " CSV) over 3 runs, " + std::to_string(mismatched) + " differ";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{
      lebesgue_sanity,   cantor_variance, oracle_equivalence, antichain_suite,
      neighbor_boundedness, weak_gersho_band, energy_band,   optimal_geometry,
      non_doubling_detector, determinism};
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      selected.push_back(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]...\n", argv[0]);
      return 2;
    }
  }
  if (selected.empty()) {
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) selected.push_back(i);
  }
  bool all = true;
  for (int c : selected) {
    if (c < 1 || c > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "no criterion %d\n", c);
      return 2;
    }
    Outcome o;
    try {
      o = criteria[static_cast<std::size_t>(c - 1)]();
    } catch (const std::exception& e) {
      o = Outcome{false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d: %s  %s\n", c, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
