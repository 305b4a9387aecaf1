#pragma once

#include <map>
#include <string>

namespace occtime {

/// Options keyed by long flag name without dashes ("alpha", "n", ...);
/// values are the raw strings given on the command line.
using CommandOptions = std::map<std::string, std::string>;

struct CommandOutput {
  std::string table;     // CSV or JSON, per the "format" option
  std::string manifest;  // JSON
  std::string summary;   // human-readable lines
  bool passed = true;    // every check the command performs passed
};

/// Runs one command: "density", "sample", "constants", or
/// "study/<name>" for name in occupation, localtime, optimal, logregime,
/// identity, consistency, figure1. Throws DomainError for bad options.
CommandOutput run_command(const std::string& command, const CommandOptions& options);

}  // namespace occtime
