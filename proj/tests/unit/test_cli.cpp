#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "walkcover/cli.hpp"

using namespace walkcover;

namespace {

const std::string data_dir = WALKCOVER_DATA_DIR;

std::string data(const char* name) { return data_dir + "/" + name; }

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

nlohmann::ordered_json json_of(const Run& r) { return nlohmann::ordered_json::parse(r.out); }

std::string temp_file(const std::string& name, const std::string& content) {
  auto path = std::filesystem::temp_directory_path() / ("walkcover_cli_" + name);
  std::ofstream(path) << content;
  return path.string();
}

}  // namespace

TEST(Cli, EstimatePathOfThree) {
  auto r = run({"estimate", "--input", data("path3.txt"), "--start", "a", "--epsilon", "0.001"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json_of(r);
  EXPECT_EQ(j["mode"], "cover-return");
  EXPECT_EQ(j["n"], 3);
  EXPECT_EQ(j["backend"], "rational");
  EXPECT_EQ(j["exact"], true);
  const Rational lo = parse_rational(j["lower"].get<std::string>());
  const Rational hi = parse_rational(j["upper"].get<std::string>());
  const Rational est = parse_rational(j["estimate"].get<std::string>());
  EXPECT_LE(lo, 8);
  EXPECT_GE(hi, 8);
  EXPECT_LT(abs(est - 8), Rational(1, 100));
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"mode", "n", "start", "estimate", "lower", "upper", "trunc_n",
                                            "delta_apriori", "delta_empirical", "backend", "exact",
                                            "wallclock_ms"}));
}

TEST(Cli, HittingTime) {
  auto r = run({"hitting", "--input", data("path3.txt"), "--from", "c", "--to", "a"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json_of(r)["value"], "4");
  auto t = run({"hitting", "--input", data("path3.txt"), "--from", "c", "--to", "a", "--output", "text"});
  EXPECT_EQ(t.out, "4\n");
}

TEST(Cli, SubsetContainingOnlyTheStartIsZero) {
  auto r = run({"estimate", "--input", data("edge.txt"), "--start", "a", "--epsilon", "0.01", "--mode",
                "subset", "--targets", data("just_a.txt")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json_of(r);
  EXPECT_EQ(j["estimate"], "0");
  EXPECT_EQ(j["lower"], "0");
  EXPECT_EQ(j["upper"], "0");
}

TEST(Cli, OtherModes) {
  auto cover = run({"estimate", "--input", data("star4.txt"), "--start", "c", "--epsilon", "0.001", "--mode",
                    "cover"});
  ASSERT_EQ(cover.code, 0) << cover.err;
  EXPECT_LE(parse_rational(json_of(cover)["lower"].get<std::string>()), 10);
  EXPECT_GE(parse_rational(json_of(cover)["upper"].get<std::string>()), 10);
  auto w = run({"estimate", "--input", data("weighted_edge.txt"), "--start", "a", "--epsilon", "0.001", "--mode",
                "weighted", "--units", "subdivided"});
  ASSERT_EQ(w.code, 0) << w.err;
  EXPECT_GE(parse_rational(json_of(w)["upper"].get<std::string>()), 8);
  auto wt = run({"estimate", "--input", data("weighted_tree.txt"), "--start", "hub", "--trunc-n", "16",
                 "--mode", "subset", "--targets", data("weighted_targets.txt")});
  EXPECT_EQ(wt.code, 0) << wt.err;
}

TEST(Cli, FloatBackendEmitsNumbers) {
  auto r = run({"estimate", "--input", data("path3.txt"), "--start", "b", "--trunc-n", "64", "--backend",
                "float"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json_of(r);
  EXPECT_TRUE(j["estimate"].is_number());
  EXPECT_EQ(j["exact"], false);
  EXPECT_EQ(j["backend"], "float");
  EXPECT_NEAR(j["estimate"].get<double>(), 6.0, 1e-6);
  auto m = run({"estimate", "--input", data("path3.txt"), "--start", "b", "--trunc-n", "32", "--backend",
                "float", "--precision", "160"});
  EXPECT_EQ(m.code, 0);
  EXPECT_EQ(json_of(m)["backend"], "float");
}

TEST(Cli, TextOutput) {
  auto r = run({"estimate", "--input", data("edge.txt"), "--start", "a", "--epsilon", "0.01", "--output",
                "text"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("estimate"), std::string::npos);
  EXPECT_NE(r.out.find("upper"), std::string::npos);
}

TEST(Cli, Oracles) {
  auto e = run({"oracle", "exact", "--input", data("path3.txt"), "--start", "a"});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_EQ(json_of(e)["fraction"], "8");
  auto m = run({"oracle", "mc", "--input", data("edge.txt"), "--start", "a", "--samples", "200", "--seed", "5"});
  ASSERT_EQ(m.code, 0) << m.err;
  EXPECT_EQ(json_of(m)["mean"], 2.0);
  EXPECT_EQ(json_of(m)["stddev"], 0.0);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({"estimate", "--help"}).code, 0);
  auto unknown = run({"estimate", "--input", data("path3.txt"), "--start", "a", "--epsilon", "0.1", "--bogus"});
  EXPECT_EQ(unknown.code, 2);
  EXPECT_NE(unknown.err.find("Usage"), std::string::npos);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"estimate", "--input", data("path3.txt"), "--start", "a"}).code, 2);
  EXPECT_EQ(run({"estimate", "--input", data("path3.txt"), "--start", "a", "--epsilon", "0.1", "--trunc-n", "8"})
                .code,
            2);
  EXPECT_EQ(run({"estimate", "--input", data("missing.txt"), "--start", "a", "--epsilon", "0.1"}).code, 2);
  EXPECT_EQ(run({"estimate", "--input", data("path3.txt"), "--start", "zz", "--epsilon", "0.1"}).code, 2);
  EXPECT_EQ(run({"estimate", "--input", data("path3.txt"), "--start", "a", "--epsilon", "abc"}).code, 2);
  EXPECT_EQ(run({"estimate", "--input", data("weighted_edge.txt"), "--start", "a", "--epsilon", "0.1"}).code, 2);
  auto cyclic = temp_file("cycle.txt", "a b\nb c\nc a\n");
  auto bad = run({"estimate", "--input", cyclic, "--start", "a", "--epsilon", "0.1"});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("cycle"), std::string::npos);
  auto tight = run({"estimate", "--input", data("star4.txt"), "--start", "x", "--epsilon", "1e-30", "--max-n",
                    "16"});
  EXPECT_EQ(tight.code, 3);
  auto big = temp_file("big.txt", [] {
    std::string s;
    for (int i = 0; i < 20; ++i) s += "v" + std::to_string(i) + " v" + std::to_string(i + 1) + "\n";
    return s;
  }());
  EXPECT_EQ(run({"oracle", "exact", "--input", big, "--start", "v0"}).code, 3);
}

TEST(Cli, JsonRoundTripIsByteIdentical) {
  for (auto backend : {"rational", "float"}) {
    auto r = run({"estimate", "--input", data("star4.txt"), "--start", "x", "--trunc-n", "24", "--backend",
                  backend});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(nlohmann::ordered_json::parse(r.out).dump() + "\n", r.out);
  }
}

TEST(Cli, RationalReportsIgnoreThreadCount) {
  std::string first;
  for (auto threads : {"1", "4", "8"}) {
    auto r = run({"estimate", "--input", data("weighted_tree.txt"), "--start", "ll", "--epsilon", "0.01",
                  "--mode", "weighted", "--backend", "rational", "--threads", threads});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json_of(r);
    j.erase("wallclock_ms");
    if (first.empty()) first = j.dump();
    EXPECT_EQ(j.dump(), first);
  }
}
