#pragma once

#include "levisqueeze/config.hpp"
#include "levisqueeze/dynamics.hpp"
#include "levisqueeze/metrics.hpp"
#include "levisqueeze/output.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace levisqueeze {

/// Evolve-format table: t, mechanical block, v_sq, v_asq, eta, then the cavity
/// block for four-mode models and the rotating-frame mechanical block for
/// lab-frame models.
Table evolution_table(const EvolutionResult& run, bool lab_frame, double omega_x);

struct DepthOptimum {
  double alpha_crit = 0.0;  // stable side of the bracketed instability onset
  double alpha_opt = 0.0;
  SqueezingReport report;
};

struct DepthSearch {
  double alpha_max = 0.99;
  int grid_points = 40;
  double tolerance = 1e-7;
};

/// Steady-state v_sq of the dissipative model minimized over alpha: bisection
/// for the onset of instability in [0, alpha_max], a uniform grid on the
/// stable side, then golden-section refinement around the best grid point.
DepthOptimum optimize_over_depth(const SystemParams& params, const DepthSearch& search = {});

const std::vector<std::string>& figure_ids();

struct FigureResult {
  Document doc;
  /// Parameters and grid sizes of the procedure, stored in the sidecar.
  nlohmann::json procedure = nlohmann::json::object();
};

/// Figure defaults are overridden by any parameter key set in `config`.
FigureResult run_figure(const std::string& id, const RunConfig& config);

}  // namespace levisqueeze
