#pragma once

// Subcommand pipelines of the moran-quant tool.

#include <iosfwd>
#include <string>
#include <vector>

#include "moranq_cli/config.hpp"

namespace moranq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;     // bad flags or configuration
inline constexpr int kExitRuntime = 2;   // library error, e.g. a budget overrun
inline constexpr int kExitFailed = 3;    // verify found a violation

const char* version();

struct CommandResult {
  int status = kExitOk;
  std::vector<std::string> artifacts;  // file names written into the output directory
};

// Each pipeline writes its artifacts and a manifest-<command>.json into
// config.output. Library errors propagate as exceptions.
CommandResult run_verify(const ExperimentConfig& config, std::ostream& log);
CommandResult run_antichain(const ExperimentConfig& config, std::ostream& log);
CommandResult run_constants(const ExperimentConfig& config, std::ostream& log);
CommandResult run_quantize(const ExperimentConfig& config, std::ostream& log, bool export_atoms);
CommandResult run_gersho(const ExperimentConfig& config, std::ostream& log, bool write_svg);

// Thread count for a requested value (0 = hardware concurrency), capped by
// the MORAN_QUANT_THREADS environment variable when set.
int resolve_threads(int requested);

// Full command-line entry point; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace moranq::cli
