#include "levisqueeze/config.hpp"

#include "levisqueeze/errors.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace levisqueeze {

namespace {

const std::vector<std::string> kRunKeys = {
    "model",        "variant",        "evaluation",     "t_end",          "dt",
    "sweep_axis",   "sweep_start",    "sweep_stop",     "sweep_points",   "sweep_scale",
    "threshold_axis", "threshold_lo", "threshold_hi",   "threshold_tol",  "n_traj",
    "mc_dt",        "seed",           "checkpoints",    "figure",         "format",
};

int line_of(std::string_view text, size_t offset) {
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + std::min(offset, text.size()), '\n'));
}

struct Locator {
  std::string_view text;
  std::string_view origin;

  std::string operator()(const std::string& key) const {
    const std::string quoted = "\"" + key + "\"";
    const size_t pos = text.find(quoted);
    if (pos == std::string_view::npos) {
      return std::string(text.empty() ? origin : std::string_view("--set")) + ": key '" + key + "'";
    }
    return std::string(origin) + ":" + std::to_string(line_of(text, pos)) + ": key '" + key + "'";
  }
};

class Reader {
 public:
  Reader(const nlohmann::json& doc, Locator where) : doc_(doc), where_(where) {}

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ValidationError(where_(key) + ": " + what);
  }

  std::optional<double> number(const std::string& key) const {
    if (!doc_.contains(key)) return std::nullopt;
    const auto& v = doc_.at(key);
    if (!v.is_number()) fail(key, "expected a number, got " + v.dump());
    return v.get<double>();
  }

  std::optional<long long> integer(const std::string& key) const {
    if (!doc_.contains(key)) return std::nullopt;
    const auto& v = doc_.at(key);
    if (!v.is_number_integer()) fail(key, "expected an integer, got " + v.dump());
    return v.get<long long>();
  }

  std::optional<std::uint64_t> unsigned_integer(const std::string& key) const {
    if (!doc_.contains(key)) return std::nullopt;
    const auto& v = doc_.at(key);
    if (!v.is_number_unsigned()) fail(key, "expected a non-negative integer, got " + v.dump());
    return v.get<std::uint64_t>();
  }

  std::optional<std::string> string(const std::string& key) const {
    if (!doc_.contains(key)) return std::nullopt;
    const auto& v = doc_.at(key);
    if (!v.is_string()) fail(key, "expected a string, got " + v.dump());
    return v.get<std::string>();
  }

  template <class F>
  auto parse(const std::string& key, const std::string& value, F&& fn) const {
    try {
      return fn(value);
    } catch (const ValidationError& e) {
      fail(key, e.what());
    }
  }

 private:
  const nlohmann::json& doc_;
  Locator where_;
};

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k = SystemParams::field_names();
    k.push_back("quality_factor");
    k.insert(k.end(), kRunKeys.begin(), kRunKeys.end());
    return k;
  }();
  return keys;
}

nlohmann::json parse_config_text(std::string_view text, std::string_view origin) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    throw ValidationError(std::string(origin) + ":" + std::to_string(line_of(text, byte)) +
                          ": malformed JSON (" + e.what() + ")");
  }
  if (!doc.is_object()) {
    throw ValidationError(std::string(origin) + ": config must be a JSON object");
  }
  return doc;
}

void apply_override(nlohmann::json& document, std::string_view assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ValidationError("--set '" + std::string(assignment) + "': expected key=value");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  nlohmann::json value = nlohmann::json::parse(raw, nullptr, false);
  if (value.is_discarded() || value.is_structured() || value.is_null()) value = raw;
  document[key] = value;
}

RunConfig resolve_config(const nlohmann::json& document, std::string_view text, std::string_view origin) {
  if (!document.is_object()) throw ValidationError(std::string(origin) + ": config must be a JSON object");
  const Locator where{text, origin};
  const Reader in(document, where);
  const auto& known = config_keys();

  RunConfig cfg;
  for (const auto& [key, value] : document.items()) {
    if (!key.empty() && key.front() == '_') continue;
    if (std::find(known.begin(), known.end(), key) == known.end()) in.fail(key, "unknown key");
    cfg.document[key] = value;
  }

  if (auto v = in.string("model")) cfg.model = in.parse("model", *v, parse_model_kind);
  if (auto v = in.string("variant")) cfg.variant = in.parse("variant", *v, parse_modulated_variant);
  if (auto v = in.string("evaluation")) cfg.evaluation.kind = in.parse("evaluation", *v, parse_evaluation);
  if (auto v = in.number("t_end")) cfg.evaluation.t_end = *v;
  if (auto v = in.number("dt")) cfg.evaluation.dt = *v;
  if (!(cfg.evaluation.t_end > 0.0)) in.fail("t_end", "must be positive");
  if (cfg.evaluation.dt < 0.0) in.fail("dt", "must be positive (or 0 for the default step)");

  for (const auto& name : SystemParams::field_names()) {
    if (auto v = in.number(name)) cfg.params.set(name, *v);
  }
  if (auto q = in.number("quality_factor")) {
    if (cfg.is_set("gamma")) in.fail("quality_factor", "conflicts with 'gamma'; set only one");
    if (!(*q > 0.0)) in.fail("quality_factor", "must be positive");
    cfg.params.set_quality_factor(*q);
  }
  if (cfg.model == ModelKind::kBogoliubov) {
    if (!cfg.is_set("delta")) {
      cfg.params.delta = cfg.params.omega_x;
    } else if (cfg.params.delta != cfg.params.omega_x) {
      in.fail("delta", "model 'bogoliubov' requires delta == omega_x");
    }
  }
  try {
    cfg.params.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(origin) + ": " + e.what());
  }

  if (auto v = in.string("sweep_axis")) cfg.sweep.name = *v;
  if (auto v = in.number("sweep_start")) cfg.sweep.start = *v;
  if (auto v = in.number("sweep_stop")) cfg.sweep.stop = *v;
  if (auto v = in.integer("sweep_points")) {
    if (*v < 1 || *v > 1000000) in.fail("sweep_points", "must lie in [1, 1e6]");
    cfg.sweep.points = static_cast<int>(*v);
  }
  if (auto v = in.string("sweep_scale")) cfg.sweep.scale = in.parse("sweep_scale", *v, parse_axis_scale);
  const auto& fields = SystemParams::field_names();
  const auto axis_ok = [&](const std::string& a) {
    return a == "quality_factor" || std::find(fields.begin(), fields.end(), a) != fields.end();
  };
  if (!axis_ok(cfg.sweep.name)) in.fail("sweep_axis", "'" + cfg.sweep.name + "' is not a parameter name");

  if (auto v = in.string("threshold_axis")) cfg.threshold.axis = *v;
  if (auto v = in.number("threshold_lo")) cfg.threshold.lo = *v;
  if (auto v = in.number("threshold_hi")) cfg.threshold.hi = *v;
  if (auto v = in.number("threshold_tol")) cfg.threshold.tol = *v;
  if (!axis_ok(cfg.threshold.axis)) {
    in.fail("threshold_axis", "'" + cfg.threshold.axis + "' is not a parameter name");
  }
  if (!(cfg.threshold.tol > 0.0)) in.fail("threshold_tol", "must be positive");

  if (auto v = in.integer("n_traj")) {
    if (*v < 2) in.fail("n_traj", "must be at least 2");
    cfg.ensemble.n_traj = *v;
  }
  if (auto v = in.number("mc_dt")) {
    if (!(*v > 0.0)) in.fail("mc_dt", "must be positive");
    cfg.ensemble.dt = *v;
  }
  if (auto v = in.unsigned_integer("seed")) cfg.ensemble.seed = *v;
  if (auto v = in.integer("checkpoints")) {
    if (*v < 1 || *v > 100000) in.fail("checkpoints", "must lie in [1, 1e5]");
    cfg.ensemble.checkpoints = static_cast<int>(*v);
  }
  cfg.ensemble.t_end = cfg.evaluation.t_end;

  if (auto v = in.string("figure")) cfg.figure = *v;
  if (auto v = in.string("format")) cfg.format = in.parse("format", *v, parse_output_format);
  return cfg;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  nlohmann::json doc = parse_config_text(text, path);
  std::string located = text;
  for (const auto& o : overrides) {
    apply_override(doc, o);
    // Overridden keys are reported against --set rather than the file line.
    const std::string key = o.substr(0, o.find('='));
    const std::string quoted = "\"" + key + "\"";
    for (size_t pos = located.find(quoted); pos != std::string::npos; pos = located.find(quoted, pos + 1)) {
      located.replace(pos, quoted.size(), std::string(quoted.size(), ' '));
    }
  }
  return resolve_config(doc, located, path);
}

}  // namespace levisqueeze
