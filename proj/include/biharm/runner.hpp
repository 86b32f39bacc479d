#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "biharm/config.hpp"

namespace biharm::cli {

// Process exit codes, one per failure class.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,         // bad command line
  kExitConfig = 2,        // config unreadable / invalid, or inconsistent with the discretization
  kExitNumerical = 3,     // solver breakdown, resampling refusal
  kExitConditioning = 4,  // Gram condition above the cap
  kExitIo = 5,            // output directory or file not writable
  kExitInternal = 70,
};

int exit_code_for(ErrorKind kind);

struct RunOptions {
  std::optional<std::string> output;  // overrides [experiment] output
  int threads = 1;
};

struct RunRecord {
  std::string name;
  std::vector<std::pair<std::string, std::string>> fields;
};

struct RunReport {
  std::string schema = "biharm/run/v1";
  std::string kind;
  std::vector<RunRecord> records;
  std::vector<std::string> files;  // relative to the output directory, in write order
  std::vector<std::pair<std::string, double>> timings;  // seconds; not written to disk
};

// Runs the pipeline for cfg.kind and writes its artifacts. On failure every
// file this run created is removed before the exception propagates.
RunReport run(const ExperimentConfig& cfg, const RunOptions& options = {});

std::string render_report(const RunReport& report);

}  // namespace biharm::cli
