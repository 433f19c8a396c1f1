#pragma once

#include <string>

#include <json.hpp>

#include "bbmlab/config.hpp"

namespace bbmlab {

struct CommandOutcome {
  bool checks_passed = true;
  std::string text;       // human-readable summary for the terminal
  nlohmann::json record;  // what was written, as JSON
  std::string manifest_hash;
};

/// Runs config.command and writes its artifacts under config.out.
/// Errors surface as bbmlab::Error; failed checks as checks_passed = false.
CommandOutcome run_command(const Config& config);

CommandOutcome cmd_simulate(const Config& config);
CommandOutcome cmd_verify(const Config& config);
CommandOutcome cmd_constants(const Config& config);
CommandOutcome cmd_fluctuations(const Config& config);
CommandOutcome cmd_stopping_line(const Config& config);

}  // namespace bbmlab
