#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "projgen/cli.hpp"

namespace fs = std::filesystem;
using projgen::json;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Outcome o;
  o.code = projgen::cli::run(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string sample(const std::string& name) {
  const char* dir = std::getenv("PROJGEN_SAMPLES");
  return (fs::path(dir ? dir : PROJGEN_SAMPLES_DIR) / name).string();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("projgen_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

fs::path write_temp(const std::string& name, const std::string& text) {
  const fs::path p = scratch(name);
  std::ofstream(p) << text;
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string p; std::getline(ss, p, sep);) out.push_back(p);
  return out;
}

// Runs the installed executable through the shell; returns exit status and stdout.
Outcome run_binary(const std::string& args) {
  const char* exe = std::getenv("PROJGEN_CLI");
  if (!exe) exe = PROJGEN_CLI_PATH;
  Outcome o;
  const std::string cmd = std::string(exe) + " " + args + " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  std::array<char, 4096> buf{};
  for (std::size_t n; (n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0;) o.out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

}  // namespace

TEST(CliConstruct, MatrixUnitPasses) {
  const Outcome o = run({"construct", sample("e12.json")});
  ASSERT_EQ(o.code, 0) << o.err;
  const json r = json::parse(o.out);
  EXPECT_EQ(r["verdict"], "pass");
  EXPECT_EQ(r["k"], 3);
  EXPECT_EQ(r["delta_n"], 3);
  EXPECT_EQ(r["generation"]["family_dim"], 36);
  EXPECT_TRUE(r["bounds"]["all_pass"].get<bool>());
  EXPECT_TRUE(r["equivalence"]["pass"].get<bool>());
  EXPECT_FALSE(r.contains("wall_time_ms"));
  EXPECT_EQ(r["bounds"]["pairwise_products"].size(), 3u);
}

TEST(CliConstruct, FlagsOverrideDocumentOptions) {
  const Outcome o = run({"construct", sample("e12.json"), "--k", "4", "--epsilon", "0.02"});
  ASSERT_EQ(o.code, 0) << o.err;
  const json r = json::parse(o.out);
  EXPECT_EQ(r["k"], 4);
  EXPECT_DOUBLE_EQ(r["epsilon"].get<double>(), 0.02);
  EXPECT_EQ(r["generation"]["family_dim"], 64);
}

TEST(CliConstruct, PreconditionErrors) {
  EXPECT_EQ(run({"construct", sample("e12.json"), "--k", "2"}).code, 3);
  EXPECT_EQ(run({"construct", sample("e12.json"), "--epsilon", "0.2"}).code, 3);
  EXPECT_EQ(run({"construct", sample("e12.json"), "--epsilon", "0"}).code, 3);
  EXPECT_EQ(run({"construct", sample("e12.json"), "--epsilon", "-0.01"}).code, 3);
}

TEST(CliConstruct, ParseErrors) {
  EXPECT_EQ(run({"construct", write_temp("bad.json", "{ not json").string()}).code, 2);
  EXPECT_EQ(run({"construct", write_temp("shape.json", R"({"dimension": 2, "generators": [[[[1,0]]]]})").string()}).code,
            2);
  EXPECT_EQ(run({"construct", write_temp("nodim.json", R"({"generators": []})").string()}).code, 2);
  EXPECT_EQ(run({"construct", sample("e12.json"), "--report", "xml"}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  const Outcome missing = run({"construct", scratch("does_not_exist.json").string()});
  EXPECT_NE(missing.code, 0);
  EXPECT_FALSE(missing.err.empty());
}

TEST(CliConstruct, ReportIsByteStable) {
  const Outcome a = run({"construct", sample("diag.json")});
  const Outcome b = run({"construct", sample("diag.json")});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const Outcome t = run({"construct", sample("diag.json"), "--report", "text"});
  const Outcome u = run({"construct", sample("diag.json"), "--report", "text"});
  EXPECT_EQ(t.out, u.out);
  EXPECT_NE(t.out.find("verdict: pass"), std::string::npos);
}

TEST(CliConstruct, TimingIsOptIn) {
  const Outcome o = run({"construct", sample("scalars.json"), "--timing"});
  ASSERT_EQ(o.code, 0);
  EXPECT_TRUE(json::parse(o.out).contains("wall_time_ms"));
}

TEST(CliVerify, RoundTripSameVerdict) {
  const fs::path projections = scratch("e12_projections.json");
  const Outcome c = run({"construct", sample("e12.json"), "--out", projections.string()});
  ASSERT_EQ(c.code, 0) << c.err;
  const Outcome v = run({"verify", projections.string()});
  ASSERT_EQ(v.code, 0) << v.err;
  const json cr = json::parse(c.out);
  const json vr = json::parse(v.out);
  EXPECT_EQ(cr["verdict"], vr["verdict"]);
  EXPECT_EQ(vr["k"], 3);
  EXPECT_EQ(vr["generation"]["family_dim"], 36);
  EXPECT_NEAR(vr["bounds"]["max_pairwise_product"].get<double>(),
              cr["bounds"]["max_pairwise_product"].get<double>(), 1e-9);
}

TEST(CliVerify, DetectsTamperedProjections) {
  const fs::path projections = scratch("tampered.json");
  ASSERT_EQ(run({"construct", sample("e12.json"), "--out", projections.string()}).code, 0);
  json doc = json::parse(read_file(projections));
  // Replace p_1 by p_0: still projections, but the family no longer sums to T.
  doc["generators"][1] = doc["generators"][0];
  std::ofstream(projections) << doc.dump();
  EXPECT_EQ(run({"verify", projections.string()}).code, 1);
}

TEST(CliVerify, WrongProjectionCountIsPrecondition) {
  const fs::path projections = scratch("short.json");
  ASSERT_EQ(run({"construct", sample("e12.json"), "--out", projections.string()}).code, 0);
  EXPECT_EQ(run({"verify", projections.string(), "--k", "4"}).code, 3);
}

TEST(CliClosure, Dimensions) {
  const json e12 = json::parse(run({"closure", sample("e12.json")}).out);
  EXPECT_EQ(e12["closure_dim"], 4);
  EXPECT_TRUE(e12["full_algebra"].get<bool>());
  const json scalars = json::parse(run({"closure", sample("scalars.json")}).out);
  EXPECT_EQ(scalars["closure_dim"], 1);
  EXPECT_FALSE(scalars["full_algebra"].get<bool>());
  const json diag = json::parse(run({"closure", sample("diag.json")}).out);
  EXPECT_EQ(diag["closure_dim"], 2);
}

TEST(CliClosure, MaxDimCap) {
  const Outcome capped = run({"closure", sample("e12.json"), "--max-dim", "2"});
  EXPECT_EQ(capped.code, 1);
  EXPECT_FALSE(json::parse(capped.out)["saturated"].get<bool>());
  EXPECT_EQ(run({"closure", sample("e12.json"), "--max-dim", "4"}).code, 0);
}

TEST(CliSweep, GridRowsMonotone) {
  const Outcome o = run({"sweep", sample("e12.json"), "--grid", "0.001,0.01,0.05"});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto rows = lines(o.out);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0],
            "epsilon,max_pair_product,max_distance_to_unit,lambda_min,bound_16,bound_8,pair_pass,"
            "distance_pass,pass");
  double prev = -1.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto cells = split(rows[i], ',');
    ASSERT_EQ(cells.size(), 9u);
    EXPECT_EQ(cells[8], "1");
    const double product = std::stod(cells[1]);
    EXPECT_LE(product, std::stod(cells[4]));
    EXPECT_GT(product, prev);
    prev = product;
  }
}

TEST(CliSweep, LinspaceGridAndOutFile) {
  const fs::path csv = scratch("sweep.csv");
  const Outcome o = run({"sweep", sample("diag.json"), "--grid", "0.005:0.05:4", "--out", csv.string()});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_TRUE(o.out.empty());
  const auto rows = lines(read_file(csv));
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(split(rows[1], ',')[0], "0.0050000000000000001");
  EXPECT_EQ(split(rows[4], ',')[0], "0.050000000000000003");
}

TEST(CliSweep, EmptyGridAndBadPoints) {
  const Outcome empty = run({"sweep", sample("e12.json"), "--grid", "0.01:0.02:0"});
  EXPECT_EQ(empty.code, 0);
  EXPECT_EQ(lines(empty.out).size(), 1u);
  EXPECT_EQ(run({"sweep", sample("e12.json")}).code, 0);
  EXPECT_EQ(run({"sweep", sample("e12.json"), "--grid", "0.01,0.3"}).code, 3);
  EXPECT_EQ(run({"sweep", sample("e12.json"), "--grid", "0.01,abc"}).code, 2);
  EXPECT_EQ(run({"sweep", sample("e12.json"), "--grid", "1:2"}).code, 2);
}

TEST(CliPgen, Queries) {
  auto value = [](const std::vector<std::string>& args) {
    const Outcome o = run(args);
    EXPECT_EQ(o.code, 0) << o.err;
    for (const auto& l : lines(o.out))
      if (l.rfind("value: ", 0) == 0) return l.substr(7);
    return std::string("<missing>");
  };
  EXPECT_EQ(value({"pgen", "cuntz", "211"}), "11");
  EXPECT_EQ(value({"pgen", "cuntz(4)"}), "4");
  EXPECT_EQ(value({"pgen", "cuntz", "inf"}), "inf");
  EXPECT_EQ(value({"pgen", "uhf", "2^inf"}), "4");
  EXPECT_EQ(value({"pgen", "uhf", "3^inf*5"}), "3");
  EXPECT_EQ(value({"pgen", "torsion", "5"}), "3");
  EXPECT_EQ(value({"pgen", "torsion", "6"}), "undetermined");
  EXPECT_EQ(value({"pgen", "delta", "1"}), "3");
  EXPECT_EQ(value({"pgen", "delta", "4"}), "5");
  EXPECT_EQ(value({"pgen", "coprime", "210"}), "11");
  EXPECT_EQ(value({"pgen", "bezout", "5", "12"}), "5 2");
  EXPECT_EQ(value({"pgen", "amplification", "5"}), "2");
}

TEST(CliPgen, JsonReportAndErrors) {
  const Outcome o = run({"pgen", "cuntz", "13", "--report", "json"});
  ASSERT_EQ(o.code, 0);
  const json r = json::parse(o.out);
  EXPECT_EQ(r["value"], "5");
  EXPECT_EQ(r["family"], "cuntz(13)");
  EXPECT_EQ(run({"pgen", "cuntz", "1"}).code, 3);
  EXPECT_EQ(run({"pgen", "bezout", "4", "6"}).code, 3);
  EXPECT_EQ(run({"pgen", "delta", "0"}).code, 3);
  EXPECT_EQ(run({"pgen", "uhf", "4^2"}).code, 2);
  EXPECT_EQ(run({"pgen", "delta"}).code, 2);
  EXPECT_EQ(run({"pgen", "nonsense", "3"}).code, 2);
}

TEST(CliBinary, ExitCodesAndStdin) {
  EXPECT_EQ(run_binary("construct " + sample("e12.json")).code, 0);
  EXPECT_EQ(run_binary("construct " + sample("e12.json") + " --k 2").code, 3);
  EXPECT_EQ(run_binary("construct " + write_temp("bin_bad.json", "[").string()).code, 2);
  const Outcome piped = run_binary("closure - < " + sample("diag.json"));
  ASSERT_EQ(piped.code, 0);
  EXPECT_EQ(json::parse(piped.out)["closure_dim"], 2);
  const Outcome pgen = run_binary("pgen cuntz 211");
  EXPECT_EQ(pgen.code, 0);
  EXPECT_NE(pgen.out.find("value: 11"), std::string::npos);
  // The executable and the in-process driver produce identical reports.
  EXPECT_EQ(run_binary("construct " + sample("scalars.json")).out, run({"construct", sample("scalars.json")}).out);
}
