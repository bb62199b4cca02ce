#pragma once

// Model variants for a levitated particle coupled to a cavity mode by
// coherent scattering. All rates are in units of the mechanical frequency
// omega_x unless omega_x is set to something other than 1.

#include "levisqueeze/gaussian.hpp"

#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace levisqueeze {

struct SystemParams {
  double omega_x = 1.0;   // mechanical frequency
  double kappa = 0.2;     // cavity amplitude decay rate
  double gamma = 1e-9;    // mechanical damping rate (omega_x / Q_m)
  double delta = 5.0;     // detuning omega_cav - omega_tweezer
  double lambda = 0.3;    // coherent-scattering coupling
  double nbar = 2e7;      // bath occupation
  double nbar0 = 0.0;     // initial mechanical occupation
  double alpha = 0.0;     // trap modulation depth
  double phi = 0.0;       // trap modulation phase

  double quality_factor() const { return gamma > 0.0 ? omega_x / gamma : std::numeric_limits<double>::infinity(); }
  void set_quality_factor(double q);

  /// Throws ValidationError if any invariant is broken.
  void validate() const;

  /// Flat (name, value) snapshot in declaration order.
  std::vector<std::pair<std::string, double>> snapshot() const;

  /// Named access used by sweeps and the config layer. "quality_factor" is
  /// accepted and maps onto gamma.
  double get(std::string_view name) const;
  void set(std::string_view name, double value);
  static const std::vector<std::string>& field_names();
};

enum class EffectiveScheme { kDetuned, kModulatedMaintext, kModulatedAppendix };

/// Selects between the two published expressions for the effective frequency
/// of the modulated scheme. They differ by the static optical spring term.
enum class ModulatedVariant { kMaintext, kAppendix };

std::string_view to_string(EffectiveScheme scheme);
std::string_view to_string(ModulatedVariant variant);
ModulatedVariant parse_modulated_variant(std::string_view name);

struct EffectiveParams {
  double omega_eff = 0.0;
  double zeta_eff = 0.0;
  EffectiveScheme scheme = EffectiveScheme::kDetuned;
};

struct BogoliubovTransform {
  double u = 1.0;  // beta = u b + v b^dagger
  double v = 0.0;
  double alpha = 0.0;
  double phi = 0.0;
  double lambda_eff = 0.0;
};

// Full coherent-scattering model in the (X, Y, x, p) basis.
LinearGaussianModel build_full_cs(const SystemParams& params);

/// Lab-frame model with the trap amplitude modulated as 1 + alpha cos(2 omega_x t + phi).
/// The potential scales with the square of the factor and the scattering
/// coupling linearly.
LinearGaussianModel build_full_modulated(const SystemParams& params);
double modulation_factor(const SystemParams& params, double t);

EffectiveParams effective_detuned(const SystemParams& params);
/// Diffusion added to the momentum by the eliminated cavity: 4 lambda^2 kappa / (kappa^2 + delta^2).
double cavity_noise_detuned(const SystemParams& params);
LinearGaussianModel build_eliminated_detuned(const SystemParams& params);

/// Coupling at which omega_eff == zeta_eff: sqrt(omega_x (kappa^2 + delta^2) / (2 delta)).
double threshold_coupling(const SystemParams& params);

EffectiveParams effective_modulated(const SystemParams& params, ModulatedVariant variant);
/// Per-quadrature diffusion from cavity noise in the rotating frame: lambda^2 kappa / delta^2.
double cavity_noise_modulated(const SystemParams& params);
LinearGaussianModel build_eliminated_modulated(const SystemParams& params,
                                               ModulatedVariant variant = ModulatedVariant::kMaintext);

BogoliubovTransform bogoliubov(double alpha, double phi, double lambda);
/// Squeezed variance of the Bogoliubov vacuum, (2 - alpha) / (2 + alpha).
double bogoliubov_ground_variance(double alpha);

/// Rotating-frame model with delta = omega_x. Requires delta == omega_x.
LinearGaussianModel build_bogoliubov_dissipative(const SystemParams& params);

/// Cavity vacuum and a thermal mechanical state with occupation nbar0.
CovarianceMatrix initial_covariance(const QuadratureBasis& basis, double nbar0);

/// Lab-frame covariance expressed in the frame co-rotating with the free
/// mechanical motion after time t (only the mechanical rows/columns rotate).
Matrix to_rotating_frame(const Matrix& lab, const QuadratureBasis& basis, double omega_x, double t);

enum class ModelKind { kFull, kFullModulated, kEliminatedDetuned, kEliminatedModulated, kBogoliubov };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);
LinearGaussianModel build_model(ModelKind kind, const SystemParams& params,
                                ModulatedVariant variant = ModulatedVariant::kMaintext);
bool is_lab_frame(ModelKind kind);

}  // namespace levisqueeze
