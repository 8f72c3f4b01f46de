#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ctaudit/cli.hpp"
#include "ctaudit/dataset_io.hpp"

using namespace ctaudit;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

const std::string kData = CTAUDIT_TEST_DATA;

}  // namespace

TEST(Cli, AnalyzeShopsShowsMinusOneEighth) {
  const auto r = run({"analyze", "--dataset", "shops"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("-0.125"), std::string::npos);
}

TEST(Cli, AnalyzeOriginalJson) {
  const auto r = run({"analyze", "--dataset", "original", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["correlation_overview"][0]["pooled"]["display"], "0.158169");
  EXPECT_TRUE(j["all_checks_passed"].get<bool>());
}

TEST(Cli, InputErrorsExitTwo) {
  auto r = run({"analyze", "--input", kData + "/empty_strata.json"});
  EXPECT_EQ(r.code, 2);
  r = run({"analyze", "--input", kData + "/bad_margin.csv"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bad_margin.csv:3"), std::string::npos) << r.err;
  EXPECT_EQ(run({"analyze"}).code, 2);
  EXPECT_EQ(run({"analyze", "--dataset", "nope"}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"fisher", "--dataset", "original", "--mode", "sideways"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, FisherOneInN) {
  const auto r = run({"fisher", "--dataset", "original", "--mode", "stratified", "--nurses", "27"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("3.42638e+08"), std::string::npos) << r.out;
  const auto c = run({"fisher", "--dataset", "original", "--mode", "collapsed", "--format", "json"});
  EXPECT_EQ(nlohmann::json::parse(c.out)["one_in_n"]["display"], "141494");
}

TEST(Cli, SimpsonShops) {
  const auto r = run({"simpson", "--dataset", "shops"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("paradox: true"), std::string::npos);
  EXPECT_NE(r.out.find("49/81"), std::string::npos);
  EXPECT_NE(r.out.find("5/4"), std::string::npos);
}

TEST(Cli, SimpsonSingleStratumIsAnalysisError) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto path = dir / "ctaudit_single.csv";
  std::ofstream(path) << "A,1,2,3,4\n";
  EXPECT_EQ(run({"simpson", "--input", path.string()}).code, 3);
  std::filesystem::remove(path);
}

TEST(Cli, DiffOriginalDerksen) {
  const auto r = run({"diff", "original", "derksen", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["strata"][0]["stratum"], "JKZ");
  EXPECT_EQ(j["strata"][0]["cells"][0][0], "-4");
  EXPECT_EQ(run({"diff", "original", "shops"}).code, 3);
}

TEST(Cli, ReplicateExitCodes) {
  EXPECT_EQ(run({"replicate"}).code, 0);
  EXPECT_EQ(run({"replicate", "shops", "--format", "json"}).code, 0);

  auto j = to_json(embedded_dataset("original").table);
  j["strata"][1]["counts"][1][0] = 5;
  const auto path = std::filesystem::temp_directory_path() / "ctaudit_mutated.json";
  std::ofstream(path) << j.dump();
  const auto r = run({"replicate", "--input", path.string()});
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.out.find("MISMATCH"), std::string::npos);
  std::filesystem::remove(path);
}

TEST(Cli, SvgZeroAreaAndOutFile) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto in = dir / "ctaudit_flat.csv";
  std::ofstream(in) << "A,0,3,0,4\n";
  EXPECT_EQ(run({"svg", "--input", in.string()}).code, 3);

  const auto out = dir / "ctaudit_fig.svg";
  const auto r = run({"svg", "--dataset", "original", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(out);
  const std::string text((std::istreambuf_iterator<char>(f)), {});
  EXPECT_NE(text.find("0.40897"), std::string::npos);
  EXPECT_EQ(text, run({"svg", "--dataset", "original"}).out);
  std::filesystem::remove(in);
  std::filesystem::remove(out);
}

TEST(Cli, EverySubcommandSpeaksJson) {
  const std::vector<std::vector<std::string>> commands{
      {"analyze", "--dataset", "derksen"},
      {"fisher", "--dataset", "derksen"},
      {"binomial", "--dataset", "derksen"},
      {"simpson", "--dataset", "derksen"},
      {"replicate", "derksen"},
      {"simulate", "--dataset", "derksen", "--trials", "20000"},
      {"svg", "--dataset", "derksen"},
      {"diff", "original", "derksen"}};
  for (auto args : commands) {
    args.insert(args.end(), {"--format", "json"});
    const auto r = run(args);
    ASSERT_EQ(r.code, 0) << args[0] << ": " << r.err;
    EXPECT_TRUE(nlohmann::json::accept(r.out)) << args[0];
  }
}

TEST(Cli, ByteIdenticalOutput) {
  for (const std::string format : {"text", "json", "csv"}) {
    const std::vector<std::string> args{"simulate", "--model", "hypergeometric", "--dataset", "original",
                                        "--stratum", "RKZ2", "--k", "5", "--trials", "50000", "--seed", "9",
                                        "--format", format};
    EXPECT_EQ(run(args).out, run(args).out);
    const std::vector<std::string> a{"analyze", "--dataset", "original", "--format", format};
    EXPECT_EQ(run(a).out, run(a).out);
  }
}

TEST(Cli, SimulateFromFlagsAndTranspose) {
  const auto r = run({"simulate", "--draws", "203", "--p", "14/1531", "--k", "6", "--trials", "100000", "--format",
                      "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["within_3se"].get<bool>());
  EXPECT_EQ(run({"simulate", "--draws", "5", "--k", "1"}).code, 2);

  const auto t = run({"analyze", "--dataset", "original", "--transpose", "--format", "json"});
  ASSERT_EQ(t.code, 0);
  const auto tj = nlohmann::json::parse(t.out);
  EXPECT_EQ(tj["correlation_overview"][0]["pooled"]["display"], "0.158169");
  EXPECT_TRUE(tj["checks"].empty());
}
