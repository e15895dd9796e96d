#include "moranq_cli/app.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "moranq/moranq.hpp"
#include "moranq_cli/output.hpp"

#ifndef MORANQ_VERSION
#define MORANQ_VERSION "0.0.0"
#endif

namespace moranq::cli {

namespace fs = std::filesystem;

const char* version() { return MORANQ_VERSION; }

namespace {

void write_manifest(const ExperimentConfig& cfg, const std::string& command,
                    CommandResult& result) {
  const nlohmann::json doc = {
      {"tool", "moran-quant"},
      {"version", version()},
      {"command", command},
      {"config_hash", "fnv1a64:" + config_hash(cfg)},
      {"seed", cfg.quantizer.seed},
      {"artifacts", result.artifacts},
  };
  const std::string name = "manifest-" + command + ".json";
  atomic_write(fs::path(cfg.output) / name, doc.dump(2) + "\n");
  result.artifacts.push_back(name);
}

void emit(const ExperimentConfig& cfg, CommandResult& result, const std::string& name,
          std::string_view content) {
  atomic_write(fs::path(cfg.output) / name, content);
  result.artifacts.push_back(name);
}

std::vector<std::string> coordinate_header(int dim) {
  return dim == 2 ? std::vector<std::string>{"x1", "x2"} : std::vector<std::string>{"x1"};
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

int resolve_threads(int requested) {
  int threads = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(threads, 1);
  if (const char* env = std::getenv("MORAN_QUANT_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (*end != '\0' || cap < 1) {
      throw ConfigError(std::string("MORAN_QUANT_THREADS must be a positive integer, got '") + env +
                        "'");
    }
    threads = std::min<long>(threads, cap);
  }
  return threads;
}

CommandResult run_verify(const ExperimentConfig& cfg, std::ostream& log) {
  const MoranSystem system = build_system(cfg);
  const CylinderMeasure measure = build_measure(cfg, system);
  CommandResult result;
  Csv csv({"check", "value", "pass", "detail"});

  const ConstructionReport construction =
      verify_construction(system, static_cast<int>(cfg.depth), cfg.k0);
  csv.cell("construction").cell(construction.words_checked).cell(construction.pass);
  csv.cell(construction.violation).end_row();
  csv.cell("min_delta").cell(construction.min_delta).cell(construction.pass).empty().end_row();
  if (!construction.pass) {
    log << "construction check failed";
    if (construction.violation_word) log << " at word '" << construction.violation_word->to_string() << "'";
    log << ": " << construction.violation << "\n";
    result.status = kExitFailed;
  }

  const SystemBounds bounds = system_bounds(system);
  csv.cell("s_min").cell(bounds.s_min).cell(true).empty().end_row();
  csv.cell("s_max").cell(bounds.s_max).cell(true).empty().end_row();
  csv.cell("N0").cell(bounds.n_max).cell(true).empty().end_row();
  csv.cell("p").cell(measure.p()).cell(true).empty().end_row();

  try {
    const SeparationWitness w = interior_witness(system, Word{}, cfg.k0);
    csv.cell("root_witness_delta").cell(w.delta).cell(true).cell(w.suffix.to_string()).end_row();
  } catch (const NoWitnessError& e) {
    csv.cell("root_witness_delta").empty().cell(false).cell(e.what()).end_row();
    result.status = kExitFailed;
  }

  std::vector<std::size_t> depths = cfg.doubling_depths;
  if (depths.empty()) depths = {cfg.depth > 2 ? cfg.depth - 2 : 1, cfg.depth};
  depths.erase(std::unique(depths.begin(), depths.end()), depths.end());
  const DoublingTrend trend = doubling_trend(measure, system, depths, cfg.doubling_samples);
  for (std::size_t i = 0; i < trend.depths.size(); ++i) {
    csv.cell("doubling_d_est@" + std::to_string(trend.depths[i])).cell(trend.d_est[i]);
    csv.cell(!trend.diverging).empty().end_row();
  }
  csv.cell("doubling_spread").cell(trend.spread).cell(!trend.diverging);
  csv.cell(trend.strictly_increasing ? "strictly increasing" : "").end_row();
  if (trend.diverging) {
    log << "warning: doubling estimate grows from " << format_number(trend.d_est.front())
        << " to " << format_number(trend.d_est.back())
        << " across depths; the measure does not look doubling\n";
  }

  const std::size_t frost_depth = cfg.depth > 2 ? cfg.depth - 2 : 1;
  const FrostmanCheck frost = frostman_check(measure, system, frost_depth, cfg.doubling_samples);
  csv.cell("frostman_t").cell(frost.t).cell(true).empty().end_row();
  csv.cell("frostman_c@" + std::to_string(frost_depth)).cell(frost.c_coarse).cell(frost.pass);
  csv.empty().end_row();
  csv.cell("frostman_c@" + std::to_string(frost_depth + 2)).cell(frost.c_fine).cell(frost.pass);
  csv.empty().end_row();

  emit(cfg, result, "verify.csv", csv.text());
  log << "verify: " << construction.words_checked << " words, min delta "
      << format_number(construction.min_delta) << ", doubling spread "
      << format_number(trend.spread) << (construction.pass ? ", pass\n" : ", FAIL\n");
  write_manifest(cfg, "verify", result);
  return result;
}

CommandResult run_antichain(const ExperimentConfig& cfg, std::ostream& log) {
  const MoranSystem system = build_system(cfg);
  const CylinderMeasure measure = build_measure(cfg, system);
  CommandResult result;
  LedgerOptions options;
  options.k0 = cfg.k0;
  const ConstantsLedger ledger = constants_ledger(system, measure, cfg.r, cfg.H, options);

  Csv summary({"k", "phi", "max_M", "s_ratio_min", "s_ratio_max", "mu_ratio_min", "mu_ratio_max",
               "star_ratio_min", "star_ratio_max", "pass"});
  for (int k = 0; k <= cfg.k_max; ++k) {
    const LambdaAntichain lambda = build_lambda(system, measure, k, cfg.r);
    const NeighborStructure ns = neighbor_sets(system, measure, lambda);
    Csv csv({"word", "depth", "energy", "M_sigma", "star_diameter", "star_mass"});
    for (const NeighborEntry& e : ns.entries) {
      csv.cell(e.sigma.to_string()).cell(e.sigma.size()).cell(e.energy).cell(e.m_sigma());
      csv.cell(e.star_diameter).cell(e.star_mass).end_row();
    }
    emit(cfg, result, "antichain_k" + std::to_string(k) + ".csv", csv.text());
    const ComparabilityReport cmp = comparability_check(ns, measure, ledger);
    summary.cell(k).cell(lambda.phi()).cell(ns.max_m).cell(cmp.s_ratio_min).cell(cmp.s_ratio_max);
    summary.cell(cmp.mu_ratio_min).cell(cmp.mu_ratio_max).cell(cmp.star_ratio_min);
    summary.cell(cmp.star_ratio_max).cell(cmp.pass).end_row();
    log << "k=" << k << " phi=" << lambda.phi() << " max M=" << ns.max_m << "\n";
  }
  emit(cfg, result, "neighbors.csv", summary.text());

  const GrowthReport growth = growth_check(system, measure, cfg.r, cfg.k_max);
  Csv g({"k", "phi", "phi_next", "factor", "N1", "pass"});
  for (const GrowthRow& row : growth.rows) {
    g.cell(row.k).cell(row.phi).cell(row.phi_next).cell(row.factor).cell(growth.n1).cell(row.pass);
    g.end_row();
  }
  emit(cfg, result, "growth.csv", g.text());
  write_manifest(cfg, "antichain", result);
  return result;
}

CommandResult run_constants(const ExperimentConfig& cfg, std::ostream& log) {
  const MoranSystem system = build_system(cfg);
  const CylinderMeasure measure = build_measure(cfg, system);
  CommandResult result;
  LedgerOptions options;
  options.k0 = cfg.k0;
  const ConstantsLedger ledger = constants_ledger(system, measure, cfg.r, cfg.H, options);
  Csv csv({"name", "value", "grade", "formula"});
  for (const LedgerEntry& e : ledger.entries) {
    csv.cell(e.name);
    if (e.value) {
      csv.cell(*e.value);
    } else {
      csv.empty();
    }
    csv.cell(to_string(e.grade)).cell(e.formula).end_row();
    log << e.name << " = " << (e.value ? format_number(*e.value) : e.formula) << " ["
        << to_string(e.grade) << "]\n";
  }
  emit(cfg, result, "constants.csv", csv.text());
  write_manifest(cfg, "constants", result);
  return result;
}

CommandResult run_quantize(const ExperimentConfig& cfg, std::ostream& log, bool export_atoms) {
  check_codebook_range(cfg);
  const MoranSystem system = build_system(cfg);
  const CylinderMeasure measure = build_measure(cfg, system);
  const DiscretizedMeasure atoms = discretize(measure, system, cfg.depth, cfg.atom_budget);
  CommandResult result;
  const std::size_t n_last = cfg.n > 0 ? cfg.n : cfg.n_max;
  const std::size_t n_first = std::min(cfg.n_min, n_last);
  const ErrorCurve curve = error_curve(atoms, n_first, n_last, cfg.r, cfg.quantizer);

  const Codebook& book = curve.rows.back().book;
  const CellSums cells = assign_cells(atoms, book.points, cfg.r);
  Csv cb(concat(concat({"index"}, coordinate_header(atoms.dim)), {"cell_mass", "cell_distortion"}));
  for (std::size_t i = 0; i < book.points.size(); ++i) {
    cb.cell(i).cell(book.points[i][0]);
    if (atoms.dim == 2) cb.cell(book.points[i][1]);
    cb.cell(cells.mass[i]).cell(cells.integral[i]).end_row();
  }
  emit(cfg, result, "codebook.csv", cb.text());

  Csv cv({"n", "e_r_pow"});
  for (const ErrorCurveRow& row : curve.rows) cv.cell(row.n).cell(row.e_r).end_row();
  emit(cfg, result, "curve.csv", cv.text());

  if (export_atoms) {
    Csv ac(concat(coordinate_header(atoms.dim), {"weight", "word"}));
    for (const Atom& a : atoms.atoms) {
      ac.cell(a.x[0]);
      if (atoms.dim == 2) ac.cell(a.x[1]);
      ac.cell(a.weight).cell(a.word.to_string()).end_row();
    }
    emit(cfg, result, "atoms.csv", ac.text());
  }
  if (curve.monotone_violation) {
    log << "warning: error curve is not strictly decreasing even after doubled restarts\n";
  }
  log << "quantize: n=" << n_last << " e^r=" << format_number(book.distortion) << " ("
      << atoms.size() << " atoms, depth " << cfg.depth << ")\n";
  write_manifest(cfg, "quantize", result);
  return result;
}

CommandResult run_gersho(const ExperimentConfig& cfg, std::ostream& log, bool write_svg) {
  check_codebook_range(cfg);
  const MoranSystem system = build_system(cfg);
  const CylinderMeasure measure = build_measure(cfg, system);
  const DiscretizedMeasure atoms = discretize(measure, system, cfg.depth, cfg.atom_budget);
  CommandResult result;
  RatioOptions options;
  options.n_min = cfg.n_min;
  options.n_max = cfg.n_max;
  options.pairing = cfg.pairing;
  options.lloyd = cfg.quantizer;
  const RatioTable table = ratio_table(system, measure, atoms, cfg.r, options);

  Csv csv({"n", "k", "e_r", "j_low", "j_high", "low_ratio", "high_ratio", "kappa_min",
           "kappa_max", "kappa_c", "coverage_max"});
  std::vector<double> lows, highs;
  for (const RatioRow& row : table.rows) {
    csv.cell(row.n).cell(row.k).cell(row.e_r).cell(row.j_low).cell(row.j_high);
    csv.cell(row.low_ratio).cell(row.high_ratio).cell(row.kappa_min).cell(row.kappa_max);
    csv.cell(row.kappa_c).cell(row.coverage_max).end_row();
    lows.push_back(row.low_ratio);
    highs.push_back(row.high_ratio);
  }
  emit(cfg, result, "ratios.csv", csv.text());
  if (write_svg) {
    emit(cfg, result, "ratios.svg",
         ratio_svg(table, system.name() + ", r = " + format_number(cfg.r)));
  }
  const Band lo = band_of(lows), hi = band_of(highs);
  log << "gersho: " << table.rows.size() << " rows; n J_low / e in [" << format_number(lo.min)
      << ", " << format_number(lo.max) << "], n J_high / e in [" << format_number(hi.min) << ", "
      << format_number(hi.max) << "]\n";
  if (table.monotone_violation) log << "warning: error curve is not strictly decreasing\n";

  if (cfg.energy_k_max > 0) {
    const EnergySumReport rep =
        energy_sum_check(system, measure, atoms, cfg.r, cfg.energy_k_min, cfg.energy_k_max,
                         cfg.pairing, cfg.energy_tolerance, cfg.quantizer);
    Csv e({"k", "phi", "n", "e_r", "energy_sum", "phi_eta_k", "error_ratio", "energy_ratio"});
    for (const EnergyRow& row : rep.rows) {
      e.cell(row.k).cell(row.phi).cell(row.n).cell(row.e_r).cell(row.energy_sum);
      e.cell(row.phi_eta_k).cell(row.error_ratio).cell(row.energy_ratio).end_row();
    }
    emit(cfg, result, "energy.csv", e.text());
    log << "energy: error band spread " << format_number(rep.error_band.spread)
        << ", energy band spread " << format_number(rep.energy_band.spread) << " (tolerance "
        << format_number(cfg.energy_tolerance) << ")\n";
  }
  write_manifest(cfg, "gersho", result);
  return result;
}

namespace {

struct Overrides {
  std::string config;
  std::string out;
  double r = 0.0;
  std::size_t depth = 0, n = 0, n_min = 0, n_max = 0;
  int restarts = 0, max_iter = 0, k_max = 0, k0 = 0, H = 0, threads = 0;
  std::uint64_t seed = 0;
  double tol = 0.0, pairing = 0.0;
  bool atoms = false, no_svg = false;
  std::vector<CLI::Option*> opts;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("-c,--config", o.config, "JSON experiment configuration")->check(CLI::ExistingFile);
  o.opts.push_back(sub->add_option("-o,--out", o.out, "output directory"));
  o.opts.push_back(sub->add_option("--r", o.r, "quantization order r >= 1"));
  o.opts.push_back(sub->add_option("--depth", o.depth, "discretization depth L"));
  o.opts.push_back(sub->add_option("--seed", o.seed, "random seed"));
  o.opts.push_back(sub->add_option("--restarts", o.restarts, "Lloyd restarts"));
  o.opts.push_back(sub->add_option("--tol", o.tol, "Lloyd relative tolerance"));
  o.opts.push_back(sub->add_option("--max-iter", o.max_iter, "Lloyd iteration cap"));
  o.opts.push_back(sub->add_option("--n", o.n, "codebook size"));
  o.opts.push_back(sub->add_option("--n-min", o.n_min, "smallest n of a curve or table"));
  o.opts.push_back(sub->add_option("--n-max", o.n_max, "largest n of a curve or table"));
  o.opts.push_back(sub->add_option("--k-max", o.k_max, "largest antichain level"));
  o.opts.push_back(sub->add_option("--k0", o.k0, "separation search depth"));
  o.opts.push_back(sub->add_option("--H", o.H, "codebook size of the cell bounds"));
  o.opts.push_back(sub->add_option("--pairing", o.pairing, "multiplier m in k(n) = max{k : m phi_k <= n}"));
  sub->add_option("--threads", o.threads, "worker threads (0 = all cores)");
}

ExperimentConfig resolve(const Overrides& o, CLI::App* sub) {
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  auto given = [&](const char* name) { return sub->get_option(name)->count() > 0; };
  if (given("--out")) cfg.output = o.out;
  if (given("--r")) cfg.r = o.r;
  if (given("--depth")) cfg.depth = o.depth;
  if (given("--seed")) cfg.quantizer.seed = o.seed;
  if (given("--restarts")) cfg.quantizer.restarts = o.restarts;
  if (given("--tol")) cfg.quantizer.tol = o.tol;
  if (given("--max-iter")) cfg.quantizer.max_iter = o.max_iter;
  if (given("--n")) cfg.n = o.n;
  if (given("--n-min")) cfg.n_min = o.n_min;
  if (given("--n-max")) cfg.n_max = o.n_max;
  if (given("--k-max")) cfg.k_max = o.k_max;
  if (given("--k0")) cfg.k0 = o.k0;
  if (given("--H")) cfg.H = o.H;
  if (given("--pairing")) cfg.pairing = o.pairing;
  cfg.quantizer.threads = resolve_threads(o.threads);
  validate(cfg);
  return cfg;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Moran-set quantization experiments", "moran-quant"};
  app.set_version_flag("--version", std::string("moran-quant ") + version());
  app.require_subcommand(1);
  app.footer(
      "Flags override the matching configuration keys. MORAN_QUANT_THREADS caps the thread "
      "count.");
  Overrides o;
  CLI::App* verify = app.add_subcommand("verify", "check the construction, doubling and Frostman profiles");
  CLI::App* antichain = app.add_subcommand("antichain", "stopping-time antichains and neighbor sets");
  CLI::App* constants = app.add_subcommand("constants", "ledger of explicit constants");
  CLI::App* quantize = app.add_subcommand("quantize", "Lloyd codebook and error curve");
  CLI::App* gersho = app.add_subcommand("gersho", "Voronoi-cell ratio table and diagnostics");
  for (CLI::App* sub : {verify, antichain, constants, quantize, gersho}) add_common(sub, o);
  quantize->add_flag("--atoms", o.atoms, "also export the atom cloud as atoms.csv");
  gersho->add_flag("--no-svg", o.no_svg, "skip ratios.svg");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const ExperimentConfig cfg = resolve(o, sub);
    CommandResult result;
    if (sub == verify) result = run_verify(cfg, out);
    if (sub == antichain) result = run_antichain(cfg, out);
    if (sub == constants) result = run_constants(cfg, out);
    if (sub == quantize) result = run_quantize(cfg, out, o.atoms);
    if (sub == gersho) result = run_gersho(cfg, out, !o.no_svg);
    return result.status;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const BudgetError& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace moranq::cli
