#include "levisqueeze/models.hpp"

#include "levisqueeze/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace levisqueeze {

namespace {

constexpr int kX = 0;
constexpr int kY = 1;
constexpr int kx = 2;
constexpr int kp = 3;

void require_nonzero_detuning(const SystemParams& params, std::string_view what) {
  if (params.delta == 0.0) {
    throw ValidationError(std::string(what) + ": detuning must be nonzero");
  }
}

ModelDescriptor describe(std::string variant, const SystemParams& params) {
  return ModelDescriptor{std::move(variant), params.snapshot()};
}

Matrix full_diffusion(const SystemParams& p) {
  Matrix n = Matrix::Zero(4, 4);
  n(kX, kX) = 2.0 * p.kappa;
  n(kY, kY) = 2.0 * p.kappa;
  n(kp, kp) = 2.0 * p.gamma * (2.0 * p.nbar + 1.0);
  return n;
}

Matrix full_drift(const SystemParams& p, double modulation) {
  const double coupling = std::numbers::sqrt2 * p.lambda * modulation;
  Matrix a = Matrix::Zero(4, 4);
  a(kX, kX) = -p.kappa;
  a(kX, kY) = p.delta;
  a(kY, kX) = -p.delta;
  a(kY, kY) = -p.kappa;
  a(kY, kx) = coupling;
  a(kx, kp) = p.omega_x;
  a(kp, kX) = coupling;
  a(kp, kx) = -p.omega_x * modulation * modulation;
  a(kp, kp) = -p.gamma;
  return a;
}

}  // namespace

void SystemParams::set_quality_factor(double q) {
  if (!(q > 0.0)) {
    throw ValidationError("quality_factor must be positive");
  }
  gamma = omega_x / q;
}

void SystemParams::validate() const {
  for (const auto& [name, value] : snapshot()) {
    if (!std::isfinite(value)) {
      throw ValidationError("parameter '" + name + "' is not finite");
    }
  }
  if (!(omega_x > 0.0)) throw ValidationError("parameter 'omega_x' must be positive");
  if (!(kappa > 0.0)) throw ValidationError("parameter 'kappa' must be positive");
  if (gamma < 0.0) throw ValidationError("parameter 'gamma' must be non-negative");
  if (nbar < 0.0) throw ValidationError("parameter 'nbar' must be non-negative");
  if (nbar0 < 0.0) throw ValidationError("parameter 'nbar0' must be non-negative");
  if (alpha < 0.0 || alpha >= 1.0) throw ValidationError("parameter 'alpha' must lie in [0, 1)");
}

std::vector<std::pair<std::string, double>> SystemParams::snapshot() const {
  return {{"omega_x", omega_x}, {"kappa", kappa}, {"gamma", gamma}, {"delta", delta}, {"lambda", lambda},
          {"nbar", nbar},       {"nbar0", nbar0}, {"alpha", alpha}, {"phi", phi}};
}

const std::vector<std::string>& SystemParams::field_names() {
  static const std::vector<std::string> names = {"omega_x", "kappa", "gamma", "delta", "lambda",
                                                  "nbar",    "nbar0", "alpha", "phi"};
  return names;
}

double SystemParams::get(std::string_view name) const {
  if (name == "quality_factor") return quality_factor();
  for (const auto& [key, value] : snapshot()) {
    if (key == name) return value;
  }
  throw ValidationError("unknown parameter '" + std::string(name) + "'");
}

void SystemParams::set(std::string_view name, double value) {
  if (name == "omega_x") omega_x = value;
  else if (name == "kappa") kappa = value;
  else if (name == "gamma") gamma = value;
  else if (name == "quality_factor") set_quality_factor(value);
  else if (name == "delta") delta = value;
  else if (name == "lambda") lambda = value;
  else if (name == "nbar") nbar = value;
  else if (name == "nbar0") nbar0 = value;
  else if (name == "alpha") alpha = value;
  else if (name == "phi") phi = value;
  else throw ValidationError("unknown parameter '" + std::string(name) + "'");
}

std::string_view to_string(EffectiveScheme scheme) {
  switch (scheme) {
    case EffectiveScheme::kDetuned: return "detuned";
    case EffectiveScheme::kModulatedMaintext: return "modulated_maintext";
    case EffectiveScheme::kModulatedAppendix: return "modulated_appendix";
  }
  return "unknown";
}

std::string_view to_string(ModulatedVariant variant) {
  return variant == ModulatedVariant::kMaintext ? "maintext" : "appendix";
}

ModulatedVariant parse_modulated_variant(std::string_view name) {
  if (name == "maintext") return ModulatedVariant::kMaintext;
  if (name == "appendix") return ModulatedVariant::kAppendix;
  throw ValidationError("unknown effective-frequency variant '" + std::string(name) +
                        "' (expected maintext or appendix)");
}

LinearGaussianModel build_full_cs(const SystemParams& params) {
  params.validate();
  return LinearGaussianModel::constant(QuadratureBasis::cavity_mechanics(), full_drift(params, 1.0),
                                       full_diffusion(params), describe("full", params));
}

double modulation_factor(const SystemParams& params, double t) {
  return 1.0 + params.alpha * std::cos(2.0 * params.omega_x * t + params.phi);
}

LinearGaussianModel build_full_modulated(const SystemParams& params) {
  params.validate();
  const Matrix diffusion = full_diffusion(params);
  return LinearGaussianModel::time_dependent(
      QuadratureBasis::cavity_mechanics(),
      [params](double t) { return full_drift(params, modulation_factor(params, t)); },
      [diffusion](double) { return diffusion; }, describe("full-modulated", params));
}

EffectiveParams effective_detuned(const SystemParams& params) {
  require_nonzero_detuning(params, "effective_detuned");
  const double zeta =
      params.delta * params.lambda * params.lambda / (params.kappa * params.kappa + params.delta * params.delta);
  return {params.omega_x - zeta, zeta, EffectiveScheme::kDetuned};
}

double cavity_noise_detuned(const SystemParams& params) {
  require_nonzero_detuning(params, "cavity_noise_detuned");
  return 4.0 * params.lambda * params.lambda * params.kappa /
         (params.kappa * params.kappa + params.delta * params.delta);
}

LinearGaussianModel build_eliminated_detuned(const SystemParams& params) {
  params.validate();
  const EffectiveParams eff = effective_detuned(params);
  Matrix a(2, 2);
  a << 0.0, eff.omega_eff + eff.zeta_eff,
       -(eff.omega_eff - eff.zeta_eff), -params.gamma;
  Matrix n = Matrix::Zero(2, 2);
  n(1, 1) = 2.0 * params.gamma * (2.0 * params.nbar + 1.0) + cavity_noise_detuned(params);
  return LinearGaussianModel::constant(QuadratureBasis::mechanics(), a, n, describe("eliminated-detuned", params));
}

double threshold_coupling(const SystemParams& params) {
  if (!(params.delta > 0.0)) {
    throw ValidationError("threshold_coupling: detuning must be positive");
  }
  return std::sqrt(params.omega_x * (params.kappa * params.kappa + params.delta * params.delta) /
                   (2.0 * params.delta));
}

EffectiveParams effective_modulated(const SystemParams& params, ModulatedVariant variant) {
  require_nonzero_detuning(params, "effective_modulated");
  const double a = params.alpha;
  const double l2 = params.lambda * params.lambda;
  const double wd = params.omega_x * params.delta;
  const double zeta = a * (wd - 2.0 * l2) / (2.0 * params.delta);
  if (variant == ModulatedVariant::kMaintext) {
    return {(wd * a * a - 2.0 * l2 * (a + a * a)) / (4.0 * params.delta), zeta,
            EffectiveScheme::kModulatedMaintext};
  }
  return {(wd * a * a - 2.0 * l2 * (2.0 + a * a)) / (4.0 * params.delta), zeta,
          EffectiveScheme::kModulatedAppendix};
}

double cavity_noise_modulated(const SystemParams& params) {
  require_nonzero_detuning(params, "cavity_noise_modulated");
  return params.lambda * params.lambda * params.kappa / (params.delta * params.delta);
}

LinearGaussianModel build_eliminated_modulated(const SystemParams& params, ModulatedVariant variant) {
  params.validate();
  const EffectiveParams eff = effective_modulated(params, variant);
  const double s = std::sin(params.phi);
  const double c = std::cos(params.phi);
  const double w = eff.omega_eff;
  const double z = eff.zeta_eff;
  Matrix a(2, 2);
  a << -z * s, w - z * c,
       -w - z * c, z * s - params.gamma;
  const double cx = cavity_noise_modulated(params);
  Matrix n = Matrix::Zero(2, 2);
  n(0, 0) = cx;
  n(1, 1) = cx + 2.0 * params.gamma * (2.0 * params.nbar + 1.0);
  ModelDescriptor d = describe("eliminated-modulated", params);
  d.parameters.emplace_back(variant == ModulatedVariant::kMaintext ? "variant_maintext" : "variant_appendix", 1.0);
  return LinearGaussianModel::constant(QuadratureBasis::mechanics(), a, n, std::move(d));
}

BogoliubovTransform bogoliubov(double alpha, double phi, double lambda) {
  if (!(alpha >= 0.0) || alpha >= 2.0) {
    throw ValidationError("bogoliubov: modulation depth must lie in [0, 2)");
  }
  const double norm = std::sqrt(4.0 - alpha * alpha);
  BogoliubovTransform t;
  t.u = 2.0 / norm;
  t.v = alpha / norm;
  t.alpha = alpha;
  t.phi = phi;
  t.lambda_eff = lambda * std::sqrt((4.0 - alpha * alpha) / 8.0);
  return t;
}

double bogoliubov_ground_variance(double alpha) {
  if (!(alpha >= 0.0) || alpha >= 2.0) {
    throw ValidationError("bogoliubov_ground_variance: modulation depth must lie in [0, 2)");
  }
  return (2.0 - alpha) / (2.0 + alpha);
}

LinearGaussianModel build_bogoliubov_dissipative(const SystemParams& params) {
  params.validate();
  if (std::abs(params.delta - params.omega_x) > 1e-12 * params.omega_x) {
    throw ValidationError("bogoliubov model requires delta == omega_x (got delta = " +
                          std::to_string(params.delta) + ")");
  }
  const double a = params.alpha;
  const double s = std::sin(params.phi);
  const double c = std::cos(params.phi);

  // Parametric drive (omega_x alpha / 4)(alpha b^dag b + b^2 e^{i phi} + h.c.)
  // with b^2 e^{i phi} + h.c. = cos(phi)(x^2 - p^2) - sin(phi)(xp + px).
  const double drive = params.omega_x * a / 4.0;
  Matrix h = Matrix::Zero(4, 4);
  h(kx, kx) = 2.0 * drive * c + drive * a;
  h(kp, kp) = -2.0 * drive * c + drive * a;
  h(kx, kp) = h(kp, kx) = -2.0 * drive * s;

  // -(lambda / sqrt 2)[(b + (alpha/2) e^{-i phi} b^dag) c^dag + h.c.]
  const double g = -params.lambda / std::numbers::sqrt2;
  const double half = a / 2.0;
  h(kx, kX) = h(kX, kx) = g * (1.0 + half * c);
  h(kp, kY) = h(kY, kp) = g * (1.0 - half * c);
  h(kx, kY) = h(kY, kx) = -g * half * s;
  h(kp, kX) = h(kX, kp) = -g * half * s;

  Vector decay(4);
  decay << params.kappa, params.kappa, params.gamma / 2.0, params.gamma / 2.0;
  const Matrix drift = drift_from_quadratic(h, decay);

  Matrix n = Matrix::Zero(4, 4);
  n(kX, kX) = 2.0 * params.kappa;
  n(kY, kY) = 2.0 * params.kappa;
  n(kx, kx) = params.gamma * (2.0 * params.nbar + 1.0);
  n(kp, kp) = params.gamma * (2.0 * params.nbar + 1.0);
  return LinearGaussianModel::constant(QuadratureBasis::cavity_mechanics(), drift, n,
                                       describe("bogoliubov", params));
}

CovarianceMatrix initial_covariance(const QuadratureBasis& basis, double nbar0) {
  if (!(nbar0 >= 0.0)) {
    throw ValidationError("initial occupation must be non-negative");
  }
  Matrix v = Matrix::Identity(basis.dim(), basis.dim());
  for (const char* label : {"x", "p"}) {
    if (auto idx = basis.index_of(label)) v(*idx, *idx) = 2.0 * nbar0 + 1.0;
  }
  return CovarianceMatrix(v, basis);
}

Matrix to_rotating_frame(const Matrix& lab, const QuadratureBasis& basis, double omega_x, double t) {
  const auto ix = basis.index_of("x");
  const auto ip = basis.index_of("p");
  if (!ix || !ip) {
    throw ValidationError("to_rotating_frame: basis lacks x/p quadratures");
  }
  const double c = std::cos(omega_x * t);
  const double s = std::sin(omega_x * t);
  Matrix transform = Matrix::Identity(basis.dim(), basis.dim());
  // r_rot = R^T r_lab with R the free-evolution rotation [[c, s], [-s, c]].
  transform(*ix, *ix) = c;
  transform(*ix, *ip) = -s;
  transform(*ip, *ix) = s;
  transform(*ip, *ip) = c;
  return transform * lab * transform.transpose();
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kFull: return "full";
    case ModelKind::kFullModulated: return "full-modulated";
    case ModelKind::kEliminatedDetuned: return "eliminated-detuned";
    case ModelKind::kEliminatedModulated: return "eliminated-modulated";
    case ModelKind::kBogoliubov: return "bogoliubov";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  for (ModelKind k : {ModelKind::kFull, ModelKind::kFullModulated, ModelKind::kEliminatedDetuned,
                      ModelKind::kEliminatedModulated, ModelKind::kBogoliubov}) {
    if (to_string(k) == name) return k;
  }
  throw ValidationError("unknown model '" + std::string(name) +
                        "' (expected full, full-modulated, eliminated-detuned, eliminated-modulated or bogoliubov)");
}

LinearGaussianModel build_model(ModelKind kind, const SystemParams& params, ModulatedVariant variant) {
  switch (kind) {
    case ModelKind::kFull: return build_full_cs(params);
    case ModelKind::kFullModulated: return build_full_modulated(params);
    case ModelKind::kEliminatedDetuned: return build_eliminated_detuned(params);
    case ModelKind::kEliminatedModulated: return build_eliminated_modulated(params, variant);
    case ModelKind::kBogoliubov: return build_bogoliubov_dissipative(params);
  }
  throw ValidationError("unknown model kind");
}

bool is_lab_frame(ModelKind kind) {
  return kind == ModelKind::kFull || kind == ModelKind::kFullModulated || kind == ModelKind::kEliminatedDetuned;
}

}  // namespace levisqueeze
