#include <cstdlib>
#include <filesystem>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>
#include <json.hpp>

#include "oamplex/error.hpp"
#include "oamplex/interchange.hpp"
#include "oamplex/scenario.hpp"
#include "test_support.hpp"

namespace oamplex {
namespace {

namespace fs = std::filesystem;

const fs::path kConfigDir = OAMPLEX_CONFIG_DIR;

ScenarioConfig load(const std::string& name) { return parse_config(read_text_file(kConfigDir / name)); }

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "oamplex_scenario_test" / name;
  fs::remove_all(dir);
  return dir;
}

Error error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "expected oamplex::Error";
  return Error(ErrorCode::IoError, "none");
}

const char* kTwoSources = R"j({
  "sources": [
    {"port": "A", "weight": 0.7, "terms": [[-2, 1.0, 0.0], [-4, 1.0, 0.0]]},
    {"port": "B", "weight": 0.4, "terms": [[1, 0.5, 0.0], [3, 0.8660254037844386, 0.0]]}
  ],
  "basis": [-4, -2, 1, 3]
})j";

TEST(ParseConfig, ReferenceConfigMatchesMixture) {
  const auto cfg = load("multiplexed_pair.json");
  ASSERT_EQ(cfg.sources.size(), 2u);
  EXPECT_EQ(cfg.basis, (std::vector<int>{-4, -2, 1, 3}));
  ASSERT_TRUE(cfg.measurement.has_value());
  EXPECT_EQ(cfg.measurement->exposure, 1e5);
  const auto result = run_scenario(cfg, {Command::Simulate, scratch("ref"), std::nullopt, false});
  EXPECT_LE((result.ideal.elements() - testing::multiplexed_reference()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ParseConfig, WeightSumInvariant) {
  const auto e = error_of([] { parse_config(kTwoSources); });
  EXPECT_EQ(e.code(), ErrorCode::ValidationError);
  EXPECT_NE(std::string(e.what()).find("weight-sum invariant"), std::string::npos);
}

TEST(ParseConfig, BasisCoverageInvariant) {
  std::string text = kTwoSources;
  text.replace(text.find("0.7"), 3, "0.6");
  text.replace(text.find("[3, "), 4, "[5, ");
  const auto e = error_of([&] { parse_config(text); });
  EXPECT_EQ(e.code(), ErrorCode::ValidationError);
  EXPECT_NE(std::string(e.what()).find("basis coverage invariant"), std::string::npos);
  EXPECT_NE(std::string(e.what()).find("sources[1].terms"), std::string::npos);
}

TEST(ParseConfig, SyntaxErrorReportsPosition) {
  const auto e = error_of([] { parse_config("{\n  \"basis\": [1, 2,\n  \"sources\" }"); });
  EXPECT_EQ(e.code(), ErrorCode::SyntaxError);
  EXPECT_NE(std::string(e.what()).find("line 3, column"), std::string::npos) << e.what();
}

TEST(ParseConfig, RejectsUnknownKeysAndBadValues) {
  EXPECT_EQ(error_of([] { parse_config(R"j({"basis": [1], "sources": [], "extra": 1})j"); }).code(), ErrorCode::ValidationError);
  EXPECT_EQ(error_of([] {
              parse_config(R"j({"basis": [1, 3], "sources": [{"port": "C", "weight": 1.0, "terms": [[1, 1, 0]]}]})j");
            }).code(),
            ErrorCode::ValidationError);
  EXPECT_EQ(error_of([] {
              parse_config(R"j({"basis": [1, 3], "sources": [{"port": "A", "weight": 1.0, "terms": [[1, 1, 0]]}],
                                "imperfections": {"eta": 1.5}})j");
            }).code(),
            ErrorCode::ValidationError);
}

TEST(ParseConfig, WavelengthIsOptionalMetadata) {
  const char* text = R"j({"basis": [1, 3], "sources": [{"port": "B", "weight": 1.0, "terms": [[1, 1, 0]]}]})j";
  const auto cfg = parse_config(text);
  EXPECT_EQ(parse_config(config_to_text(cfg)), cfg);
  EXPECT_EQ(error_of([] {
              parse_config(R"j({"basis": [1], "sources": [{"port": "B", "weight": 1.0, "wavelength_nm": -5, "terms": [[1, 1, 0]]}]})j");
            }).code(),
            ErrorCode::ValidationError);
}

TEST(ParseConfig, TextRoundTrip) {
  for (const char* name : {"multiplexed_pair.json", "even_petals.json", "phase_error.json"}) {
    const auto cfg = load(name);
    EXPECT_EQ(parse_config(config_to_text(cfg)), cfg) << name;
  }
}

TEST(RunScenario, ExactTomographyRecoversIdeal) {
  auto cfg = load("multiplexed_pair.json");
  const auto result = run_scenario(cfg, {Command::Tomography, scratch("exact"), std::nullopt, true});
  ASSERT_TRUE(result.fidelity.has_value());
  EXPECT_GE(*result.fidelity, 1.0 - 1e-10);
  EXPECT_NEAR(*result.dark_bright_ratio, 0.0, 1e-24);
}

TEST(RunScenario, PathPhaseErrorGivesTwelvePercentDarkPort) {
  const auto cfg = load("phase_error.json");
  const auto result = run_scenario(cfg, {Command::Simulate, scratch("eps"), std::nullopt, false});
  ASSERT_TRUE(result.dark_bright_ratio.has_value());
  EXPECT_NEAR(*result.dark_bright_ratio, 0.12, 1e-3);
}

TEST(RunScenario, RenderedBrightPortShowsFourLobes) {
  const auto cfg = load("even_petals.json");
  const auto out = scratch("render");
  const auto result = run_scenario(cfg, {Command::Render, out, std::nullopt, false});
  EXPECT_EQ(result.written.size(), 2u);
  const auto bytes = read_text_file(out / "bright.pgm");
  const auto image = decode_pgm(bytes, grid_of(cfg));
  EXPECT_EQ(angular_lobe_count(image, {0.5, 2.0}), 4);
}

TEST(RunScenario, OutputsAreByteIdenticalAcrossRuns) {
  const auto cfg = load("multiplexed_pair.json");
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  const auto ra = run_scenario(cfg, {Command::Tomography, a, std::nullopt, false});
  run_scenario(cfg, {Command::Tomography, b, std::nullopt, false});
  ASSERT_FALSE(ra.written.empty());
  for (const auto& path : ra.written) {
    const auto name = path.filename();
    EXPECT_EQ(read_text_file(a / name), read_text_file(b / name)) << name;
  }
  EXPECT_TRUE(fs::exists(a / "counts.json"));
  EXPECT_TRUE(fs::exists(a / "bright.pgm"));
}

TEST(RunScenario, ReportContents) {
  const auto cfg = load("multiplexed_pair.json");
  const auto out = scratch("report");
  run_scenario(cfg, {Command::Tomography, out, 99, false});
  const auto report = nlohmann::json::parse(read_text_file(out / "report.json"));
  EXPECT_EQ(report.at("command"), "tomography");
  EXPECT_EQ(report.at("seed"), 99);
  EXPECT_GE(report.at("fidelity").get<double>(), 0.95);
  EXPECT_NEAR(report.at("purity").at("ideal").get<double>(), 0.5, 1e-12);
}

TEST(RunScenario, TomographyNeedsMeasurementOrExact) {
  auto cfg = load("even_petals.json");
  EXPECT_EQ(error_of([&] { run_scenario(cfg, {Command::Tomography, scratch("nomeas"), std::nullopt, false}); }).code(),
            ErrorCode::ValidationError);
}

TEST(CompareFiles, FidelityOfFileWithItself) {
  const auto out = scratch("compare");
  run_scenario(load("multiplexed_pair.json"), {Command::Simulate, out, std::nullopt, false});
  const auto report = nlohmann::json::parse(compare_density_files(out / "ideal_rho.json", out / "bright_rho.json"));
  EXPECT_NEAR(report.at("fidelity").get<double>(), 1.0, 1e-10);
  EXPECT_NEAR(report.at("trace_distance").get<double>(), 0.0, 1e-10);
}

#ifdef OAMPLEX_CLI_PATH
struct CliRun {
  int status;
  std::string out;
  std::string err;
};

CliRun cli(const std::string& args) {
  const auto dir = fs::temp_directory_path() / "oamplex_scenario_test" /
                   ::testing::UnitTest::GetInstance()->current_test_info()->name();
  fs::create_directories(dir);
  const auto out = dir / "cli_stdout.txt";
  const auto err = dir / "cli_stderr.txt";
  const std::string command =
      std::string("\"") + OAMPLEX_CLI_PATH + "\" " + args + " > \"" + out.string() + "\" 2> \"" + err.string() + "\"";
  const int raw = std::system(command.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, read_text_file(out), read_text_file(err)};
}

TEST(Cli, TomographyThenFidelity) {
  const auto out = scratch("cli");
  const auto run = cli("tomography --config \"" + (kConfigDir / "multiplexed_pair.json").string() + "\" --out \"" +
                       out.string() + "\" --seed 5");
  ASSERT_EQ(run.status, 0) << run.err;
  EXPECT_NE(run.out.find("fidelity:"), std::string::npos);
  const auto fid = cli("fidelity \"" + (out / "ideal_rho.json").string() + "\" \"" + (out / "reconstructed_rho.json").string() + "\"");
  ASSERT_EQ(fid.status, 0) << fid.err;
  EXPECT_GE(nlohmann::json::parse(fid.out).at("fidelity").get<double>(), 0.95);
}

TEST(Cli, ConfigErrorsAreStructured) {
  const auto dir = scratch("cli_bad");
  const auto path = dir / "bad.json";
  write_text_file(path, kTwoSources);
  const auto run = cli("simulate --config \"" + path.string() + "\" --out \"" + dir.string() + "\"");
  EXPECT_EQ(run.status, 2);
  const auto record = nlohmann::json::parse(run.err);
  EXPECT_EQ(record.at("error"), "ValidationError");
  EXPECT_NE(record.at("message").get<std::string>().find("weight-sum invariant"), std::string::npos);
}

TEST(Cli, MissingSubcommandFails) { EXPECT_NE(cli("").status, 0); }
#endif

}  // namespace
}  // namespace oamplex
