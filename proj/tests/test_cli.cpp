#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "walras/cli.hpp"

using namespace walras;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "walras");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string sample(const std::string& name) { return std::string(WALRAS_SAMPLES_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("walras_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SolveSample) {
  auto r = run_cli({"solve", sample("e3.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = Json::parse(r.out);
  EXPECT_EQ(j["command"], "solve");
  EXPECT_EQ(j["result"]["prices"], Json::parse(R"(["1/1", "0/1"])"));
  EXPECT_EQ(j["result"]["welfare"], "9/1");
  EXPECT_EQ(j["result"]["verified"], true);
  EXPECT_EQ(j["config"]["route"], "auto");
  EXPECT_FALSE(j["config"].contains("threads"));
  auto lp = Json::parse(run_cli({"solve", sample("e3.json"), "--route", "lp"}).out);
  EXPECT_EQ(lp["result"]["prices"], j["result"]["prices"]);
}

TEST_F(CliTest, SolveMbvSample) {
  auto r = run_cli({"solve", sample("mbv_tree.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = Json::parse(r.out);
  EXPECT_EQ(j["result"]["prices"], Json::parse(R"(["2/1", "0/1", "0/1"])"));
  EXPECT_EQ(j["result"]["welfare"], "13/1");
  EXPECT_EQ(run_cli({"solve", sample("mbv_tree.json"), "--route", "assignment"}).code, 1);
}

TEST_F(CliTest, SamplesRoundTrip) {
  for (const char* name : {"e1.json", "e3.json", "e4.json", "mbv_tree.json"}) {
    Market mk = parse_market(slurp(sample(name)));
    EXPECT_EQ(market_from_json(market_json(mk)), mk) << name;
    EXPECT_EQ(dump(market_json(parse_market(dump(market_json(mk))))), dump(market_json(mk)));
  }
  EXPECT_EQ(parse_market(slurp(sample("e4.json"))), fixture_e4());
  EXPECT_EQ(parse_market(slurp(sample("e3.json"))), fixture_e3());
}

TEST_F(CliTest, GeneratorsRoundTrip) {
  for (const char* name : {"bad1", "bad2", "nonmin", "generic", "shatter", "e1", "e2", "e3", "e4"}) {
    auto r = run_cli({"gen", name, "--n", "4", "--seed", "3"});
    ASSERT_EQ(r.code, 0) << name << r.err;
    EXPECT_EQ(dump(market_json(parse_market(r.out))), r.out) << name;
  }
  EXPECT_EQ(parse_market(run_cli({"gen", "bad1", "--n", "5"}).out), gen_bad1(5));
}

TEST_F(CliTest, GenThenOverdemand) {
  ASSERT_EQ(run_cli({"gen", "bad1", "--n", "3", "--out", path("bad1.json")}).code, 0);
  auto r = run_cli({"overdemand", path("bad1.json"), "--rule", "encodable"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto goods = Json::parse(r.out)["result"]["overdemand"]["goods"];
  EXPECT_EQ(goods[2]["od"], 2);
  EXPECT_EQ(goods[2]["od_tiebreak"], 2);
  EXPECT_EQ(goods[0]["od"], 0);
  auto own = Json::parse(run_cli({"overdemand", path("bad1.json"), "--rule", "adversarial:0"}).out);
  EXPECT_EQ(own["result"]["overdemand"]["goods"][0]["takers"], Json::parse("[0]"));
}

TEST_F(CliTest, NonminPricesFile) {
  ASSERT_EQ(run_cli({"gen", "nonmin", "--n", "4", "--out", path("m.json"), "--prices-out", path("p.json")}).code,
            0);
  auto r = run_cli({"overdemand", path("m.json"), "--prices", path("p.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["result"]["overdemand"]["goods"][3]["od"], 3);
  EXPECT_EQ(run_cli({"gen", "bad1", "--prices-out", path("x.json")}).code, 2);
}

TEST_F(CliTest, SwapGraphOutputs) {
  auto r = run_cli({"swap-graph", sample("e3.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto g = Json::parse(r.out)["result"]["graph"];
  EXPECT_EQ(g["kind"], "unit_demand");
  ASSERT_EQ(g["edges"].size(), 1u);
  EXPECT_EQ(g["edges"][0]["from"], "1");
  EXPECT_EQ(g["edges"][0]["to"], "0");
  EXPECT_EQ(g["topological_order"], Json::parse(R"(["null", "1", "0"])"));
  auto dot = run_cli({"swap-graph", sample("e3.json"), "--format", "dot"});
  EXPECT_EQ(dot.out, to_dot(build_unit(fixture_e3(), PriceVector({Scalar(1), Scalar(0)}),
                                       {Bundle::single(0), Bundle::single(1)})));
  auto gs = Json::parse(run_cli({"swap-graph", sample("e4.json")}).out)["result"]["graph"];
  EXPECT_EQ(gs["kind"], "gross_substitutes");
  EXPECT_EQ(gs["edges"].size(), 2u);
}

TEST_F(CliTest, NonWalrasianPrices) {
  std::ofstream(path("p.json")) << R"(["0/1", "0/1"])";
  auto r = run_cli({"swap-graph", sample("e3.json"), "--prices", path("p.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(Json::parse(r.err)["error"], "precondition");
  auto w = run_cli({"overdemand", sample("e3.json"), "--prices", path("p.json"), "--warn-only"});
  EXPECT_EQ(w.code, 0);
  EXPECT_NE(w.err.find("warning"), std::string::npos);
}

TEST_F(CliTest, Genericity) {
  auto r = Json::parse(run_cli({"genericity", sample("e3.json")}).out)["result"]["unit"];
  EXPECT_EQ(r["generic"], true);
  EXPECT_EQ(r["mode"], "exact");
  auto e1 = Json::parse(run_cli({"genericity", sample("e1.json")}).out)["result"]["unit"];
  EXPECT_EQ(e1["generic"], false);
  EXPECT_TRUE(e1.contains("witness"));
  auto gm = Json::parse(run_cli({"genericity", sample("e4.json"), "--gamma", "2"}).out)["result"]["gmbv"];
  EXPECT_EQ(gm["generic"], false);
}

TEST_F(CliTest, PerturbAndCsv) {
  ASSERT_EQ(run_cli({"gen", "bad1", "--n", "3", "--out", path("b.json")}).code, 0);
  auto r = run_cli({"perturb", path("b.json"), "--trials", "20", "--csv", path("rows.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = Json::parse(r.out)["result"];
  EXPECT_EQ(j["first_run"]["checks"]["minimal"], true);
  std::string csv = slurp(path("rows.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "trial,indegree_ok,lemmas_ok,failure");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 21);
  EXPECT_EQ(run_cli({"perturb", path("b.json"), "--beta", "2"}).code, 1);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run_cli({"solve", path("missing.json")}).code, 2);
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"solve"}).code, 2);
  EXPECT_EQ(run_cli({"solve", sample("e3.json"), "--route", "magic"}).code, 2);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
  EXPECT_EQ(run_cli({"overdemand", sample("e3.json"), "--rule", "nonsense"}).code, 2);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
  std::ofstream(path("bad.json")) << "{\"m\": 2, \"supplies\": [1]";
  auto r = run_cli({"solve", path("bad.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(Json::parse(r.err)["error"], "parse");
  std::ofstream(path("extra.json")) << R"({"m": 1, "supplies": [1], "H": "1/1", "buyers": [], "colour": 1})";
  EXPECT_EQ(run_cli({"solve", path("extra.json")}).code, 1);
}

TEST_F(CliTest, ByteIdenticalAcrossThreads) {
  auto a = run_cli({"experiment", "bad2", "--n", "5", "--trials", "300", "--seed", "4", "--threads", "1"});
  auto b = run_cli({"experiment", "bad2", "--n", "5", "--trials", "300", "--seed", "4", "--threads", "4"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  auto c = run_cli({"experiment", "welfare-gen", "--n", "20", "--supply", "5", "--trials", "6", "--threads", "3",
                    "--format", "csv"});
  auto d = run_cli({"experiment", "welfare-gen", "--n", "20", "--supply", "5", "--trials", "6", "--threads", "1",
                    "--format", "csv"});
  EXPECT_EQ(c.out, d.out);
  EXPECT_EQ(c.out.substr(0, 5), "trial");
  auto s = Json::parse(run_cli({"experiment", "shatter", "--m", "4"}).out);
  EXPECT_EQ(s["result"]["summary"]["all_realized"], "true");
}
