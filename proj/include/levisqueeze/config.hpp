#pragma once

// Flat JSON run configuration. Keys are SystemParams field names plus the run
// keys listed in config_keys(); keys starting with '_' are ignored so that a
// sidecar file (which carries a "_provenance" block) is itself a valid config.

#include "levisqueeze/metrics.hpp"
#include "levisqueeze/models.hpp"
#include "levisqueeze/montecarlo.hpp"
#include "levisqueeze/output.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace levisqueeze {

struct ThresholdSpec {
  std::string axis = "lambda";
  double lo = 1.0;
  double hi = 2.0;
  double tol = 1e-6;
};

struct RunConfig {
  SystemParams params;
  ModelKind model = ModelKind::kFull;
  ModulatedVariant variant = ModulatedVariant::kMaintext;
  Evaluation evaluation{EvaluationKind::kSteady, 20.0, 0.0};
  SweepAxis sweep{"lambda", 0.1, 1.5, 15, AxisScale::kLinear};
  ThresholdSpec threshold;
  EnsembleSpec ensemble;
  std::string figure;
  std::optional<OutputFormat> format;

  /// The merged document (file keys plus --set overrides), without '_' keys.
  nlohmann::json document = nlohmann::json::object();

  bool is_set(std::string_view key) const { return document.contains(std::string(key)); }
};

/// Every accepted key, in a fixed order.
const std::vector<std::string>& config_keys();

/// Parses a JSON config. `origin` names the source in diagnostics
/// ("<origin>:<line>: key 'x': ...").
nlohmann::json parse_config_text(std::string_view text, std::string_view origin);

/// Applies one "key=value" override. The value is read as JSON when it parses
/// as a number, boolean or quoted string, and as a bare string otherwise.
void apply_override(nlohmann::json& document, std::string_view assignment);

/// Validates the merged document and resolves it into a RunConfig. `text` and
/// `origin` are used only to point diagnostics at the offending line.
RunConfig resolve_config(const nlohmann::json& document, std::string_view text = {},
                         std::string_view origin = "config");

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides);

}  // namespace levisqueeze
