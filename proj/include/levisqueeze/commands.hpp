#pragma once

#include "levisqueeze/config.hpp"
#include "levisqueeze/figures.hpp"
#include "levisqueeze/output.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace levisqueeze {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

const std::vector<std::string>& command_names();

struct Invocation {
  std::string command;
  std::string config_path;
  std::vector<std::string> overrides;  // "key=value"
  std::optional<std::string> out_path;
  std::optional<std::string> format;
  std::optional<std::string> figure;
};

struct CommandResult {
  Document doc;
  /// Command-specific provenance (solver settings, grids) for the sidecar.
  nlohmann::json provenance = nlohmann::json::object();
  /// False when a validation command ran but its check failed.
  bool passed = true;
  std::string failure;
};

OutputFormat default_format(const std::string& command);

/// Runs one command on a resolved config. Throws ValidationError /
/// NumericalError.
CommandResult execute(const std::string& command, const RunConfig& config);

/// Resolved document plus a "_provenance" block. Feeding it back as --config
/// reproduces the output file.
nlohmann::json make_sidecar(const std::string& command, const RunConfig& config, const CommandResult& result);

/// Loads the config, runs the command and writes the outputs. Returns the
/// process exit code; diagnostics go to `err`, and to `out` when no --out path
/// is given.
int run(const Invocation& inv, std::ostream& out, std::ostream& err);

}  // namespace levisqueeze
