#include "levisqueeze/commands.hpp"
#include "levisqueeze/config.hpp"
#include "levisqueeze/errors.hpp"
#include "levisqueeze/output.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <charconv>
#include <cstring>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace levisqueeze;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("levisqueeze_test_" + std::to_string(::getpid()) + "_" +
                                         std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name, const std::string& content = {}) const {
    const fs::path p = path_ / name;
    if (!content.empty()) std::ofstream(p, std::ios::binary) << content;
    return p.string();
  }

 private:
  fs::path path_;
  static inline int counter_ = 0;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string error_of(const std::string& text) {
  try {
    resolve_config(parse_config_text(text, "cfg.json"), text, "cfg.json");
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

int run_quiet(const Invocation& inv, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = run(inv, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

int shell(const std::string& cmd) {
  const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, DefaultsAndOverrides) {
  nlohmann::json doc = parse_config_text(R"({"model": "eliminated-detuned", "lambda": 0.5})", "c");
  apply_override(doc, "lambda=0.75");
  apply_override(doc, "sweep_scale=log");
  apply_override(doc, "variant=\"appendix\"");
  const RunConfig cfg = resolve_config(doc);
  EXPECT_EQ(cfg.model, ModelKind::kEliminatedDetuned);
  EXPECT_EQ(cfg.params.lambda, 0.75);
  EXPECT_EQ(cfg.sweep.scale, AxisScale::kLog);
  EXPECT_EQ(cfg.variant, ModulatedVariant::kAppendix);
  EXPECT_EQ(cfg.params.kappa, 0.2);
  EXPECT_TRUE(cfg.is_set("lambda"));
  EXPECT_FALSE(cfg.is_set("kappa"));
  EXPECT_THROW(apply_override(doc, "lambda"), ValidationError);
  EXPECT_THROW(apply_override(doc, "=3"), ValidationError);
}

TEST(Config, QualityFactorAndDissipativeDetuning) {
  RunConfig cfg = resolve_config(parse_config_text(R"({"quality_factor": 1e4})", "c"));
  EXPECT_DOUBLE_EQ(cfg.params.gamma, 1e-4);
  EXPECT_NE(error_of(R"({"quality_factor": 1e4, "gamma": 1e-4})").find("conflicts"), std::string::npos);
  cfg = resolve_config(parse_config_text(R"({"model": "bogoliubov", "omega_x": 2})", "c"));
  EXPECT_EQ(cfg.params.delta, 2.0);
  EXPECT_NE(error_of(R"({"model": "bogoliubov", "delta": 5})").find("delta == omega_x"), std::string::npos);
}

TEST(Config, DiagnosticsNameKeyAndLine) {
  const std::string unknown = "{\n  \"lambda\": 0.3,\n  \"lamda\": 0.4\n}";
  const std::string e1 = error_of(unknown);
  EXPECT_NE(e1.find("cfg.json:3"), std::string::npos) << e1;
  EXPECT_NE(e1.find("lamda"), std::string::npos) << e1;
  const std::string e2 = error_of("{\n\"kappa\": \"fast\"\n}");
  EXPECT_NE(e2.find("cfg.json:2"), std::string::npos) << e2;
  EXPECT_NE(e2.find("expected a number"), std::string::npos) << e2;
  const std::string e3 = error_of("{\n\"kappa\": 0.2,\n\"delta\" 5\n}");
  EXPECT_NE(e3.find("cfg.json:3"), std::string::npos) << e3;
  EXPECT_NE(e3.find("malformed"), std::string::npos) << e3;
  EXPECT_NE(error_of(R"({"kappa": -1})").find("kappa"), std::string::npos);
  EXPECT_NE(error_of(R"({"model": "fast"})").find("unknown model"), std::string::npos);
  EXPECT_NE(error_of(R"({"sweep_points": 2.5})").find("integer"), std::string::npos);
  EXPECT_NE(error_of(R"({"sweep_axis": "speed"})").find("not a parameter"), std::string::npos);
  EXPECT_NE(error_of("[1, 2]").find("object"), std::string::npos);
  EXPECT_EQ(error_of(R"({"_provenance": {"anything": 1}, "_note": "x"})"), "");
}

TEST(Output, ShortestRoundTripDoubles) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1e-9), "1e-09");
  EXPECT_EQ(format_double(2e7), "2e+07");
  EXPECT_EQ(format_double(1234.5), "1234.5");
  EXPECT_EQ(format_double(-0.0), "-0");
  EXPECT_EQ(format_double(std::nan("")), "nan");
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10000; ++i) {
    double x;
    const std::uint64_t bits = rng();
    std::memcpy(&x, &bits, sizeof x);
    if (!std::isfinite(x)) continue;
    const std::string s = format_double(x);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    ASSERT_EQ(back, x) << s;
  }
}

TEST(Output, CsvLayout) {
  Table t({"a", "b"});
  t.add_row({1.5, std::string("ok")});
  t.add_row({0.25, std::string("x, \"y\"")});
  std::ostringstream out;
  write_csv(out, t);
  EXPECT_EQ(out.str(), "a,b\n1.5,ok\n0.25,\"x, \"\"y\"\"\"\n");
  EXPECT_THROW(t.add_row({1.0}), std::logic_error);
}

TEST(Commands, ExitCodes) {
  TempDir dir;
  Invocation inv;
  inv.command = "steady";
  inv.config_path = dir.file("ok.json", R"({"model": "eliminated-detuned"})");
  EXPECT_EQ(run_quiet(inv), kExitOk);
  inv.overrides = {"lambda=1.7"};
  std::string err;
  EXPECT_EQ(run_quiet(inv, &err), kExitNumerical);
  EXPECT_NE(err.find("unstable"), std::string::npos);
  inv.overrides = {"lamda=1.7"};
  EXPECT_EQ(run_quiet(inv, &err), kExitValidation);
  EXPECT_NE(err.find("--set"), std::string::npos) << err;
  inv.overrides = {};
  inv.config_path = dir.file("missing.json");
  EXPECT_EQ(run_quiet(inv), kExitValidation);
  inv.config_path = dir.file("ok.json");
  inv.command = "stability";
  inv.overrides = {"model=full-modulated"};
  EXPECT_EQ(run_quiet(inv), kExitValidation);
  inv.command = "figure";
  inv.overrides = {};
  EXPECT_EQ(run_quiet(inv), kExitValidation);
  inv.figure = "fig9z";
  EXPECT_EQ(run_quiet(inv), kExitValidation);
}

TEST(Commands, ThresholdReport) {
  RunConfig cfg = resolve_config(parse_config_text(
      R"({"model": "eliminated-detuned", "threshold_lo": 1, "threshold_hi": 2, "threshold_tol": 1e-9})", "c"));
  const CommandResult r = execute("threshold", cfg);
  EXPECT_NEAR(r.doc.summary["value"].get<double>(), 1.5824, 1e-4);
  EXPECT_NEAR(r.doc.summary["value"].get<double>(), r.doc.summary["closed_form"].get<double>(), 1e-8);
}

TEST(Commands, EvolveTableColumns) {
  RunConfig cfg = resolve_config(parse_config_text(R"({"model": "eliminated-modulated", "alpha": 0.01, "t_end": 5})", "c"));
  const CommandResult r = execute("evolve", cfg);
  const std::vector<std::string> expect{"t", "Vxx", "Vxp", "Vpp", "v_sq", "v_asq", "eta"};
  EXPECT_EQ(r.doc.table.columns(), expect);
  cfg = resolve_config(parse_config_text(R"({"model": "full", "t_end": 1})", "c"));
  const CommandResult f = execute("evolve", cfg);
  EXPECT_EQ(f.doc.table.columns().size(), 7u + 7u + 3u);
  cfg.params.lambda = 0.0;
  cfg.params.nbar0 = 2.0;
  cfg.params.nbar = 0.0;
  const CommandResult z = execute("evolve", cfg);
  for (const auto& row : z.doc.table.rows()) EXPECT_NEAR(std::get<double>(row[4]), 5.0, 1e-6);
}

TEST(Commands, SidecarReproducesOutputBitForBit) {
  TempDir dir;
  const std::vector<std::pair<std::string, std::string>> jobs{
      {"evolve", R"({"model": "full", "t_end": 3, "lambda": 0.5})"},
      {"sweep", R"({"model": "bogoliubov", "sweep_axis": "alpha", "sweep_start": 0, "sweep_stop": 0.45,
                   "sweep_points": 10, "evaluation": "steady"})"},
      {"steady", R"({"model": "bogoliubov", "alpha": 0.1, "phi": 0.3, "quality_factor": 1e8})"},
      {"threshold", R"({"model": "eliminated-detuned"})"},
      {"figure", R"({"figure": "fig3a", "lambda": 0.35})"},
  };
  int k = 0;
  for (const auto& [command, config] : jobs) {
    Invocation first;
    first.command = command;
    first.config_path = dir.file("cfg" + std::to_string(k) + ".json", config);
    first.out_path = dir.file("out" + std::to_string(k));
    ASSERT_EQ(run_quiet(first), kExitOk) << command;
    Invocation again = first;
    again.config_path = sidecar_path(*first.out_path);
    again.out_path = dir.file("again" + std::to_string(k));
    ASSERT_EQ(run_quiet(again), kExitOk) << command;
    EXPECT_EQ(slurp(*first.out_path), slurp(*again.out_path)) << command;
    EXPECT_EQ(slurp(sidecar_path(*first.out_path)), slurp(sidecar_path(*again.out_path))) << command;
    const auto side = nlohmann::json::parse(slurp(sidecar_path(*first.out_path)));
    EXPECT_EQ(side["_provenance"]["command"], command);
    EXPECT_TRUE(side["_provenance"]["params"].contains("kappa"));
    ++k;
  }
}

TEST(Commands, FormatSelection) {
  TempDir dir;
  Invocation inv;
  inv.command = "steady";
  inv.config_path = dir.file("c.json", R"({"model": "eliminated-detuned"})");
  inv.out_path = dir.file("s.json");
  ASSERT_EQ(run_quiet(inv), kExitOk);
  EXPECT_TRUE(nlohmann::json::accept(slurp(*inv.out_path)));
  inv.format = "csv";
  ASSERT_EQ(run_quiet(inv), kExitOk);
  EXPECT_EQ(slurp(*inv.out_path).rfind("v_sq,v_asq,eta,angle", 0), 0u);
  EXPECT_EQ(nlohmann::json::parse(slurp(sidecar_path(*inv.out_path)))["format"], "csv");
}

TEST(Executable, ArgumentErrorsExitWithValidationCode) {
  TempDir dir;
  const std::string cli = LEVISQUEEZE_CLI;
  const std::string cfg = dir.file("c.json", R"({"model": "eliminated-detuned"})");
  EXPECT_EQ(shell(cli + " steady --config " + cfg), 0);
  EXPECT_EQ(shell(cli + " steady --config " + cfg + " --set lambda=0.4 --set kappa=0.3"), 0);
  EXPECT_EQ(shell(cli + " steady"), 2);
  EXPECT_EQ(shell(cli + " bogus --config " + cfg), 2);
  EXPECT_EQ(shell(cli + " steady --config " + cfg + " --format xml"), 2);
  EXPECT_EQ(shell(cli + " steady --config " + cfg + " --set lambda=9"), 3);
  EXPECT_EQ(shell(cli + " figure --config " + cfg + " --figure fig3a --out " + dir.file("f.csv")), 0);
  EXPECT_TRUE(fs::exists(dir.file("f.csv.json")));
}
