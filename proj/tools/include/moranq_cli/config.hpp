#pragma once

// Experiment configuration for the moran-quant tool: a JSON document that
// names a Moran system, a cylinder measure and the numerical parameters of
// every subcommand.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "moranq/errors.hpp"
#include "moranq/geometry.hpp"
#include "moranq/measure.hpp"
#include "moranq/quantizer.hpp"

namespace moranq::cli {

// A configuration problem. The message carries "<source>:<line>: key '<k>': "
// context when the offending key can be located.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct SystemSpec {
  // "cantor", "binary-full", "carpet4", "alternating" or "periodic".
  std::string kind = "cantor";
  double gap = 1.0 / 3.0;  // cantor
  double rho = 0.25;       // carpet4
  int dimension = 1;       // periodic
  std::vector<LevelSpec> levels;
};

struct MeasureSpec {
  bool uniform = true;
  std::vector<std::vector<double>> masses;
};

struct ExperimentConfig {
  SystemSpec system;
  MeasureSpec measure;
  double r = 2.0;
  std::size_t depth = 10;
  std::size_t n_min = 1;
  std::size_t n_max = 16;
  std::size_t n = 0;  // quantize: single book size, 0 means n_max
  int k_max = 5;
  int k0 = 2;
  int H = 2;
  LloydConfig quantizer;
  double pairing = 1.0;
  int energy_k_min = 1;
  int energy_k_max = 0;  // 0 disables the energy-sum table
  double energy_tolerance = 4.0;
  std::vector<std::size_t> doubling_depths;  // empty: depth - 2 and depth
  std::size_t doubling_samples = 0;  // 0: every atom
  std::size_t atom_budget = kDefaultAtomBudget;
  std::string output = "out";

  // Where the document came from, for error context.
  std::string source_name;
  std::string source_text;
};

// Parses and type-checks a configuration document. Unknown keys are errors.
ExperimentConfig parse_config(std::string_view text, std::string source_name);

ExperimentConfig load_config(const std::string& path);

// Range checks and construction of the system and measure; run after flag
// overrides have been applied.
void validate(const ExperimentConfig& config);

// Throws ConfigError when the largest requested codebook exceeds the atom
// count at the configured depth.
void check_codebook_range(const ExperimentConfig& config);

MoranSystem build_system(const ExperimentConfig& config);
CylinderMeasure build_measure(const ExperimentConfig& config, const MoranSystem& system);

// Canonical JSON of every semantic field (output directory and thread count
// excluded).
std::string canonical_json(const ExperimentConfig& config);

std::uint64_t fnv1a64(std::string_view bytes);

// fnv1a64 of canonical_json, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

// 1-based line of the key at the dotted path (array indices omitted), or 0.
std::size_t locate_key(std::string_view text, std::string_view dotted_path);

}  // namespace moranq::cli
