#include "moranq_cli/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

namespace moranq::cli {

using nlohmann::json;

namespace {

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset; ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

std::string context(const ExperimentConfig& cfg, const std::string& path) {
  std::string out = cfg.source_name.empty() ? "<config>" : cfg.source_name;
  if (const std::size_t line = locate_key(cfg.source_text, path); line > 0) {
    out += ":" + std::to_string(line);
  }
  return out + ": key '" + path + "': ";
}

[[noreturn]] void fail(const ExperimentConfig& cfg, const std::string& path, const std::string& msg) {
  throw ConfigError(context(cfg, path) + msg);
}

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const ExperimentConfig& cfg, const json& obj, const std::string& prefix,
                    const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) fail(cfg, join(prefix, key), "unknown key");
  }
}

const json& object_at(const ExperimentConfig& cfg, const json& obj, const std::string& key,
                      const std::string& prefix) {
  const json& v = obj.at(key);
  if (!v.is_object()) fail(cfg, join(prefix, key), "expected an object");
  return v;
}

double number_at(const ExperimentConfig& cfg, const json& v, const std::string& path) {
  if (!v.is_number()) fail(cfg, path, "expected a number");
  return v.get<double>();
}

long long integer_at(const ExperimentConfig& cfg, const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(cfg, path, "expected an integer");
  return v.get<long long>();
}

std::size_t count_at(const ExperimentConfig& cfg, const json& v, const std::string& path) {
  const long long x = integer_at(cfg, v, path);
  if (x < 0) fail(cfg, path, "must be non-negative");
  return static_cast<std::size_t>(x);
}

int int_at(const ExperimentConfig& cfg, const json& v, const std::string& path) {
  const long long x = integer_at(cfg, v, path);
  if (x < -1000000 || x > 1000000) fail(cfg, path, "out of range");
  return static_cast<int>(x);
}

std::vector<double> numbers_at(const ExperimentConfig& cfg, const json& v, const std::string& path) {
  if (!v.is_array()) fail(cfg, path, "expected an array of numbers");
  std::vector<double> out;
  for (const json& x : v) out.push_back(number_at(cfg, x, path));
  return out;
}

void parse_system(ExperimentConfig& cfg, const json& sys) {
  reject_unknown(cfg, sys, "system", {"template", "gap", "rho", "dimension", "period", "levels"});
  std::string kind = sys.contains("levels") ? "periodic" : "cantor";
  if (sys.contains("template")) {
    if (!sys["template"].is_string()) fail(cfg, "system.template", "expected a string");
    kind = sys["template"].get<std::string>();
  }
  static const std::set<std::string> kinds{"cantor", "binary-full", "carpet4", "alternating",
                                           "periodic"};
  if (!kinds.contains(kind)) {
    fail(cfg, "system.template",
         "unknown template '" + kind +
             "' (expected cantor, binary-full, carpet4, alternating or periodic)");
  }
  cfg.system.kind = kind;
  if (sys.contains("gap")) cfg.system.gap = number_at(cfg, sys["gap"], "system.gap");
  if (sys.contains("rho")) cfg.system.rho = number_at(cfg, sys["rho"], "system.rho");
  if (kind != "periodic") {
    for (const char* key : {"dimension", "period", "levels"}) {
      if (sys.contains(key)) fail(cfg, join("system", key), "only valid for periodic systems");
    }
    return;
  }
  if (sys.contains("dimension")) {
    cfg.system.dimension = int_at(cfg, sys["dimension"], "system.dimension");
  }
  if (!sys.contains("levels")) fail(cfg, "system.levels", "periodic systems need levels");
  const json& levels = sys["levels"];
  if (!levels.is_array() || levels.empty()) {
    fail(cfg, "system.levels", "expected a non-empty array of level objects");
  }
  if (sys.contains("period")) {
    const std::size_t period = count_at(cfg, sys["period"], "system.period");
    if (period != levels.size()) {
      fail(cfg, "system.period",
           "period " + std::to_string(period) + " does not match " +
               std::to_string(levels.size()) + " levels");
    }
  }
  cfg.system.levels.clear();
  for (const json& level : levels) {
    if (!level.is_object()) fail(cfg, "system.levels", "expected a level object");
    reject_unknown(cfg, level, "system.levels", {"ratios", "offsets"});
    if (!level.contains("ratios") || !level.contains("offsets")) {
      fail(cfg, "system.levels", "each level needs ratios and offsets");
    }
    LevelSpec spec;
    spec.ratios = numbers_at(cfg, level["ratios"], "system.levels.ratios");
    const json& offsets = level["offsets"];
    if (!offsets.is_array()) fail(cfg, "system.levels.offsets", "expected an array");
    for (const json& o : offsets) {
      if (o.is_number()) {
        spec.offsets.push_back(Point{o.get<double>(), 0.0});
      } else if (o.is_array() && o.size() == 2 && o[0].is_number() && o[1].is_number()) {
        spec.offsets.push_back(Point{o[0].get<double>(), o[1].get<double>()});
      } else {
        fail(cfg, "system.levels.offsets", "offsets are numbers or [x, y] pairs");
      }
    }
    cfg.system.levels.push_back(std::move(spec));
  }
}

void parse_measure(ExperimentConfig& cfg, const json& m) {
  reject_unknown(cfg, m, "measure", {"uniform", "masses"});
  if (m.contains("uniform") && !m["uniform"].is_boolean()) {
    fail(cfg, "measure.uniform", "expected true or false");
  }
  const bool uniform_flag = m.value("uniform", !m.contains("masses"));
  if (uniform_flag && m.contains("masses")) {
    fail(cfg, "measure.masses", "give either uniform: true or masses, not both");
  }
  cfg.measure.uniform = uniform_flag;
  cfg.measure.masses.clear();
  if (uniform_flag) return;
  if (!m.contains("masses")) fail(cfg, "measure.masses", "missing mass vectors");
  const json& masses = m["masses"];
  if (!masses.is_array() || masses.empty()) {
    fail(cfg, "measure.masses", "expected an array of per-level mass arrays");
  }
  for (const json& level : masses) cfg.measure.masses.push_back(numbers_at(cfg, level, "measure.masses"));
}

}  // namespace

std::size_t locate_key(std::string_view text, std::string_view dotted_path) {
  std::size_t pos = 0;
  std::size_t found = std::string_view::npos;
  while (!dotted_path.empty()) {
    const std::size_t dot = dotted_path.find('.');
    const std::string_view part = dotted_path.substr(0, dot);
    dotted_path = dot == std::string_view::npos ? std::string_view{} : dotted_path.substr(dot + 1);
    const std::string quoted = "\"" + std::string(part) + "\"";
    found = std::string_view::npos;
    for (std::size_t at = text.find(quoted, pos); at != std::string_view::npos;
         at = text.find(quoted, at + 1)) {
      std::size_t after = at + quoted.size();
      while (after < text.size() && (text[after] == ' ' || text[after] == '\t' ||
                                     text[after] == '\n' || text[after] == '\r')) {
        ++after;
      }
      if (after < text.size() && text[after] == ':') {
        found = at;
        break;
      }
    }
    if (found == std::string_view::npos) return 0;
    pos = found + quoted.size();
  }
  return found == std::string_view::npos ? 0 : line_of_offset(text, found);
}

ExperimentConfig parse_config(std::string_view text, std::string source_name) {
  ExperimentConfig cfg;
  cfg.source_name = std::move(source_name);
  cfg.source_text = std::string(text);
  json doc;
  try {
    doc = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(cfg.source_name + ":" + std::to_string(line_of_offset(text, e.byte)) +
                      ": syntax error: " + e.what());
  }
  if (!doc.is_object()) throw ConfigError(cfg.source_name + ":1: the document must be an object");
  reject_unknown(cfg, doc, "",
                 {"system", "measure", "r", "depth", "n_range", "n", "k_max", "k0", "H",
                  "quantizer", "pairing", "energy", "doubling", "atom_budget", "output"});

  if (doc.contains("system")) parse_system(cfg, object_at(cfg, doc, "system", ""));
  if (doc.contains("measure")) parse_measure(cfg, object_at(cfg, doc, "measure", ""));
  if (doc.contains("r")) cfg.r = number_at(cfg, doc["r"], "r");
  if (doc.contains("depth")) cfg.depth = count_at(cfg, doc["depth"], "depth");
  if (doc.contains("n_range")) {
    const json& nr = doc["n_range"];
    if (!nr.is_array() || nr.size() != 2) fail(cfg, "n_range", "expected [n_min, n_max]");
    cfg.n_min = count_at(cfg, nr[0], "n_range");
    cfg.n_max = count_at(cfg, nr[1], "n_range");
  }
  if (doc.contains("n")) cfg.n = count_at(cfg, doc["n"], "n");
  if (doc.contains("k_max")) cfg.k_max = int_at(cfg, doc["k_max"], "k_max");
  if (doc.contains("k0")) cfg.k0 = int_at(cfg, doc["k0"], "k0");
  if (doc.contains("H")) cfg.H = int_at(cfg, doc["H"], "H");
  if (doc.contains("pairing")) cfg.pairing = number_at(cfg, doc["pairing"], "pairing");
  if (doc.contains("atom_budget")) cfg.atom_budget = count_at(cfg, doc["atom_budget"], "atom_budget");
  if (doc.contains("output")) {
    if (!doc["output"].is_string()) fail(cfg, "output", "expected a directory path");
    cfg.output = doc["output"].get<std::string>();
  }
  if (doc.contains("quantizer")) {
    const json& q = object_at(cfg, doc, "quantizer", "");
    reject_unknown(cfg, q, "quantizer", {"restarts", "seed", "tol", "max_iter"});
    if (q.contains("restarts")) cfg.quantizer.restarts = int_at(cfg, q["restarts"], "quantizer.restarts");
    if (q.contains("seed")) cfg.quantizer.seed = count_at(cfg, q["seed"], "quantizer.seed");
    if (q.contains("tol")) cfg.quantizer.tol = number_at(cfg, q["tol"], "quantizer.tol");
    if (q.contains("max_iter")) cfg.quantizer.max_iter = int_at(cfg, q["max_iter"], "quantizer.max_iter");
  }
  if (doc.contains("energy")) {
    const json& e = object_at(cfg, doc, "energy", "");
    reject_unknown(cfg, e, "energy", {"k_min", "k_max", "tolerance"});
    if (e.contains("k_min")) cfg.energy_k_min = int_at(cfg, e["k_min"], "energy.k_min");
    if (e.contains("k_max")) cfg.energy_k_max = int_at(cfg, e["k_max"], "energy.k_max");
    if (e.contains("tolerance")) cfg.energy_tolerance = number_at(cfg, e["tolerance"], "energy.tolerance");
  }
  if (doc.contains("doubling")) {
    const json& d = object_at(cfg, doc, "doubling", "");
    reject_unknown(cfg, d, "doubling", {"depths", "samples"});
    if (d.contains("depths")) {
      if (!d["depths"].is_array()) fail(cfg, "doubling.depths", "expected an array of depths");
      cfg.doubling_depths.clear();
      for (const json& x : d["depths"]) cfg.doubling_depths.push_back(count_at(cfg, x, "doubling.depths"));
    }
    if (d.contains("samples")) cfg.doubling_samples = count_at(cfg, d["samples"], "doubling.samples");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open configuration file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

MoranSystem build_system(const ExperimentConfig& config) {
  const SystemSpec& s = config.system;
  if (s.kind == "cantor") return MoranSystem::cantor(s.gap);
  if (s.kind == "binary-full") return MoranSystem::binary_full();
  if (s.kind == "carpet4") return MoranSystem::carpet4(s.rho);
  if (s.kind == "alternating") return MoranSystem::alternating();
  return MoranSystem(s.dimension, s.levels, "periodic");
}

CylinderMeasure build_measure(const ExperimentConfig& config, const MoranSystem& system) {
  if (config.measure.uniform) return CylinderMeasure::uniform(system);
  return CylinderMeasure(system, config.measure.masses);
}

void validate(const ExperimentConfig& cfg) {
  if (!(cfg.r >= 1.0)) fail(cfg, "r", "r must be at least 1");
  if (cfg.depth < 1) fail(cfg, "depth", "depth must be at least 1");
  if (cfg.n_min < 1 || cfg.n_max < cfg.n_min) fail(cfg, "n_range", "need 1 <= n_min <= n_max");
  if (cfg.k_max < 1) fail(cfg, "k_max", "k_max must be at least 1");
  if (cfg.k0 < 1) fail(cfg, "k0", "k0 must be at least 1");
  if (cfg.H < 2) fail(cfg, "H", "H must be at least 2");
  if (cfg.quantizer.restarts < 1) fail(cfg, "quantizer.restarts", "restarts must be at least 1");
  if (!(cfg.quantizer.tol > 0.0)) fail(cfg, "quantizer.tol", "tol must be positive");
  if (cfg.quantizer.max_iter < 1) fail(cfg, "quantizer.max_iter", "max_iter must be at least 1");
  if (!(cfg.pairing > 0.0)) fail(cfg, "pairing", "pairing multiplier must be positive");
  if (cfg.energy_k_max != 0 && (cfg.energy_k_min < 0 || cfg.energy_k_max < cfg.energy_k_min)) {
    fail(cfg, "energy.k_max", "need 0 <= k_min <= k_max");
  }
  if (!(cfg.energy_tolerance >= 1.0)) fail(cfg, "energy.tolerance", "tolerance factor must be >= 1");
  for (std::size_t d : cfg.doubling_depths) {
    if (d < 1) fail(cfg, "doubling.depths", "depths must be at least 1");
  }

  const std::string system_key = cfg.system.kind == "periodic" ? "system.levels" : "system";
  std::optional<MoranSystem> system;
  try {
    system.emplace(build_system(cfg));
  } catch (const ValidationError& e) {
    fail(cfg, system_key, e.what());
  }
  try {
    build_measure(cfg, *system);
  } catch (const ValidationError& e) {
    fail(cfg, cfg.measure.uniform ? "measure" : "measure.masses", e.what());
  }

  // Atom count of the discretization, compared against the budget before any
  // allocation happens.
  std::size_t depth = cfg.depth;
  for (std::size_t d : cfg.doubling_depths) depth = std::max(depth, d);
  double atoms = 1.0;
  for (std::size_t k = 1; k <= depth; ++k) atoms *= system->branches(k);
  if (atoms > static_cast<double>(cfg.atom_budget)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.0f", atoms);
    fail(cfg, depth == cfg.depth ? "depth" : "doubling.depths",
         "depth " + std::to_string(depth) + " needs " + buf + " atoms, above atom_budget " +
             std::to_string(cfg.atom_budget));
  }
}

void check_codebook_range(const ExperimentConfig& cfg) {
  const MoranSystem system = build_system(cfg);
  double atoms = 1.0;
  for (std::size_t k = 1; k <= cfg.depth; ++k) atoms *= system.branches(k);
  const std::size_t n_top = std::max(cfg.n_max, cfg.n);
  if (static_cast<double>(n_top) > atoms) {
    fail(cfg, cfg.n > cfg.n_max ? "n" : "n_range",
         "n = " + std::to_string(n_top) + " exceeds the " +
             std::to_string(static_cast<long long>(atoms)) + " atoms available at depth " +
             std::to_string(cfg.depth));
  }
}

std::string canonical_json(const ExperimentConfig& cfg) {
  json sys = {{"template", cfg.system.kind}};
  if (cfg.system.kind == "cantor") sys["gap"] = cfg.system.gap;
  if (cfg.system.kind == "carpet4") sys["rho"] = cfg.system.rho;
  if (cfg.system.kind == "periodic") {
    sys["dimension"] = cfg.system.dimension;
    json levels = json::array();
    for (const LevelSpec& l : cfg.system.levels) {
      json offsets = json::array();
      for (const Point& o : l.offsets) offsets.push_back({o[0], o[1]});
      levels.push_back({{"ratios", l.ratios}, {"offsets", offsets}});
    }
    sys["levels"] = levels;
  }
  json measure = {{"uniform", cfg.measure.uniform}};
  if (!cfg.measure.uniform) measure["masses"] = cfg.measure.masses;
  const json doc = {
      {"system", sys},
      {"measure", measure},
      {"r", cfg.r},
      {"depth", cfg.depth},
      {"n_range", {cfg.n_min, cfg.n_max}},
      {"n", cfg.n},
      {"k_max", cfg.k_max},
      {"k0", cfg.k0},
      {"H", cfg.H},
      {"quantizer",
       {{"restarts", cfg.quantizer.restarts},
        {"seed", cfg.quantizer.seed},
        {"tol", cfg.quantizer.tol},
        {"max_iter", cfg.quantizer.max_iter}}},
      {"pairing", cfg.pairing},
      {"energy",
       {{"k_min", cfg.energy_k_min},
        {"k_max", cfg.energy_k_max},
        {"tolerance", cfg.energy_tolerance}}},
      {"doubling", {{"depths", cfg.doubling_depths}, {"samples", cfg.doubling_samples}}},
      {"atom_budget", cfg.atom_budget},
  };
  return doc.dump();
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const ExperimentConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_json(config))));
  return buf;
}

}  // namespace moranq::cli
