#include "cbf/cli.hpp"
#include "oracles/closed_forms.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "cbf");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cbf::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string model(const std::string& name) { return std::string(CBF_SOURCE_DIR) + "/models/" + name; }

class TempDir {
public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("cbf_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST(CliDiscriminant, BlowupPrintsCoefficient) {
  auto r = run({"discriminant", model("blowup.json")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("c_H = 1/2 (0.5)"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("witness = H'"), std::string::npos);
}

TEST(CliDiscriminant, InvalidModelNamesItem) {
  auto r = run({"discriminant", model("bad_horizontal.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("Def. 4.1(7)"), std::string::npos) << r.err;
}

TEST(CliDiscriminant, PropertyChecksAndCsv) {
  auto r = run({"discriminant", model("blowup.json"), "--check-translation", model("translation_H.json"),
                "--check-horizontal"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("translation identity: PASS"), std::string::npos);
  EXPECT_NE(r.out.find("horizontal irrelevance: PASS"), std::string::npos);

  auto csv = run({"discriminant", model("base2.json"), "--format", "csv"});
  EXPECT_EQ(csv.code, 0);
  EXPECT_EQ(csv.out,
            "# cbf-csv v1 command=discriminant\n"
            "component,c,c_decimal,lct,lct_decimal,witness\n"
            "z1,0,0,1,1,w1\n"
            "z2,5/8,0.625,3/8,0.375,w3\n");
}

TEST(CliDiscriminant, MissingAndMalformedFiles) {
  EXPECT_EQ(run({"discriminant", model("does_not_exist.json")}).code, 2);
  TempDir dir;
  write(dir / "broken.json", "{\"m\": 1,");
  EXPECT_EQ(run({"discriminant", dir / "broken.json"}).code, 2);
  write(dir / "s.json", "{\"elsewhere\": \"1\"}");
  EXPECT_EQ(run({"discriminant", model("blowup.json"), "--check-translation", dir / "s.json"}).code, 2);
}

TEST(CliKodaira, TypeMultipleAndDegree) {
  auto r = run({"kodaira", "--type", "II*"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("sigma: 5/6"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("multiplicities: 1 2 3 4 5 6 4 2 3"), std::string::npos);

  auto ib = run({"kodaira", "--type", "I*_b", "--b", "2", "--format", "csv"});
  EXPECT_EQ(ib.code, 0);
  EXPECT_NE(ib.out.find("I*_2,1 1 1 1 2 2 2,0 0 0 0 0 0 0,1/2,0.5,2"), std::string::npos) << ib.out;

  EXPECT_NE(run({"kodaira", "--multiple", "4"}).out.find("3/4"), std::string::npos);

  // II* + I_1 + a triple fiber: 5/6 + 0 + 2/3, moduli part 1/12
  auto d = run({"kodaira", "--degree", model("fibers.json")});
  EXPECT_EQ(d.code, 0) << d.err;
  EXPECT_NE(d.out.find("total: 19/12"), std::string::npos) << d.out;
}

TEST(CliKodaira, BadInput) {
  EXPECT_EQ(run({"kodaira"}).code, 2);
  EXPECT_EQ(run({"kodaira", "--type", "V"}).code, 2);
  EXPECT_EQ(run({"kodaira", "--type", "II", "--multiple", "2"}).code, 2);
  EXPECT_EQ(run({"kodaira", "--multiple", "1"}).code, 2);
}

TEST(CliIntegrate, NodeQuadratureCsv) {
  auto r = run({"integrate", model("node.json"), "--at", "1e-3,1e-2"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string header, columns, row1, row2;
  std::getline(in, header);
  std::getline(in, columns);
  std::getline(in, row1);
  std::getline(in, row2);
  EXPECT_EQ(header, "# cbf-csv v1 command=integrate method=quad seed=20240611 charts=1");
  EXPECT_EQ(columns, "point,value,stderr,region_dim,flags");
  auto fields = cbf::cli::split(row1, ',');
  ASSERT_EQ(fields.size(), 5u);
  EXPECT_EQ(fields[0], "0.001");
  EXPECT_NEAR(std::stod(fields[1]) / cbf::oracle::node_value(1e-3), 1.0, 1e-6);
  EXPECT_EQ(fields[2], "");
  EXPECT_EQ(fields[3], "1");
  EXPECT_EQ(cbf::cli::split(row2, ',')[0], "0.01");
}

TEST(CliIntegrate, MonteCarloIsReproducibleAndWritesOnlyOut) {
  TempDir dir;
  auto args = std::vector<std::string>{"integrate", model("base2.json"), "--at", "0.3/0.2,0.1", "--mc",
                                       "--samples", "20000", "--seed", "7"};
  auto a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("seed=7"), std::string::npos);

  auto with_out = args;
  with_out.insert(with_out.end(), {"--out", dir / "sub/v.csv"});
  auto c = run(with_out);
  EXPECT_EQ(c.code, 0);
  EXPECT_TRUE(c.out.empty());
  EXPECT_EQ(slurp(dir / "sub/v.csv"), a.out);
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::recursive_directory_iterator(dir.path())) ++entries;
  EXPECT_EQ(entries, 2u);  // sub/ and v.csv
}

TEST(CliIntegrate, ChartsAreSummed) {
  auto one = run({"integrate", model("node.json"), "--at", "0.01"});
  auto two = run({"integrate", model("node.json"), model("node.json"), "--at", "0.01"});
  ASSERT_EQ(two.code, 0);
  auto v1 = std::stod(cbf::cli::split(one.out.substr(one.out.rfind("0.01,")), ',')[1]);
  auto v2 = std::stod(cbf::cli::split(two.out.substr(two.out.rfind("0.01,")), ',')[1]);
  EXPECT_NEAR(v2, 2 * v1, 1e-9 * v2);
}

TEST(CliIntegrate, DegenerateAndInvalidPoints) {
  // z1 = w1, z2 = w1 w2 has an empty fiber when |z2| > |z1|
  TempDir dir;
  write(dir / "wedge.json", R"({"m": 2, "n": 0, "exponents": [[1, 1], [0, 1]], "base_divisor": ["z1", "z2"]})");
  auto r = run({"integrate", dir / "wedge.json", "--at", "0.1/0.5"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("0.1/0.5,0,,0,degenerate"), std::string::npos) << r.out;
  EXPECT_EQ(run({"integrate", model("node.json"), "--at", "1.5"}).code, 2);
  EXPECT_EQ(run({"integrate", model("node.json"), "--at", "0.1/0.2"}).code, 2);
  EXPECT_EQ(run({"integrate", model("node.json"), "--at", "abc"}).code, 2);
  EXPECT_EQ(run({"integrate", model("node.json"), "--at", "0.1", "--mc", "--quad"}).code, 2);
}

TEST(CliIntegrate, ThreadCapFromEnvironment) {
  ::setenv("CBF_THREADS", "0", 1);
  EXPECT_EQ(run({"integrate", model("node.json"), "--at", "0.1"}).code, 2);
  ::setenv("CBF_THREADS", "1", 1);
  auto serial = run({"integrate", model("base2.json"), "--at", "0.2,0.1,0.05", "--mc", "--samples", "5000"});
  ::setenv("CBF_THREADS", "3", 1);
  auto threaded = run({"integrate", model("base2.json"), "--at", "0.2,0.1,0.05", "--mc", "--samples", "5000"});
  ::unsetenv("CBF_THREADS");
  EXPECT_EQ(serial.code, 0);
  EXPECT_EQ(serial.out, threaded.out);
}

TEST(CliAsymptotics, NodePasses) {
  auto r = run({"asymptotics", model("node.json"), "--ray", "1"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("# result: PASS"), std::string::npos);
  EXPECT_NE(r.out.find("s,V,psi,flags\n"), std::string::npos);
}

TEST(CliAsymptotics, FailAndInvalid) {
  // the fitted pole order along (0,1) misses 5/8 by a few thousandths
  auto r = run({"asymptotics", model("base2.json"), "--ray", "0,1", "--tol", "1e-3"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("prediction: FAIL"), std::string::npos);
  EXPECT_EQ(run({"asymptotics", model("node.json"), "--ray", "1,0"}).code, 2);
  EXPECT_EQ(run({"asymptotics", model("node.json"), "--ray", "1", "--grid", "1e-1:1e-6"}).code, 2);
  EXPECT_EQ(run({"asymptotics", model("bad_horizontal.json"), "--ray", "1"}).code, 2);
}

TEST(CliAsymptotics, OutFileGetsCsvReportGoesToStdout) {
  TempDir dir;
  auto r = run({"asymptotics", model("base2.json"), "--ray", "0,1", "--grid", "1e-1:1e-4:10", "--out",
                dir / "ray.csv"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("result: PASS"), std::string::npos);
  EXPECT_EQ(r.out.find("s,V,psi"), std::string::npos);
  EXPECT_EQ(slurp(dir / "ray.csv").rfind("# cbf-csv v1 command=asymptotics", 0), 0u);
}

TEST(CliVerifyAll, EmptyMissingAndPlantedFailure) {
  TempDir dir;
  auto empty = run({"verify-all", dir.path().string()});
  EXPECT_EQ(empty.code, 0);
  EXPECT_NE(empty.err.find("warning"), std::string::npos);

  EXPECT_EQ(run({"verify-all", dir / "nope"}).code, 2);

  write(dir / "good.json", R"({"kind": "kodaira", "expect": {"II": "1/6"}})");
  write(dir / "planted.json", R"({"kind": "kodaira", "expect": {"III": "1/3"}})");
  auto r = run({"verify-all", dir.path().string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("FAIL  planted"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("PASS  good"), std::string::npos);
}

TEST(CliVerifyAll, ArtifactsAreDeterministic) {
  TempDir dir;
  write(dir / "mc.json", R"({"kind": "cross_validation", "model": )" + std::string("\"") + model("node.json") +
                             R"(", "points": [[0.5], [0.05]], "samples": 20000, "max_rel_stderr": 0.1})");
  write(dir / "inv.json", R"({"kind": "discriminant", "model": )" + std::string("\"") +
                              model("bad_horizontal.json") + R"(", "expect_invalid": 7})");
  auto a = run({"verify-all", dir.path().string(), "--seed", "5", "--out", dir / "a"});
  auto b = run({"verify-all", dir.path().string(), "--seed", "5", "--out", dir / "b"});
  ASSERT_EQ(a.code, 0) << a.out << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(slurp(dir / "a/summary.csv"), slurp(dir / "b/summary.csv"));
  EXPECT_EQ(slurp(dir / "a/mc.csv"), slurp(dir / "b/mc.csv"));
  EXPECT_FALSE(slurp(dir / "a/mc.csv").empty());
}

TEST(CliVerifyAll, BundledSuitePasses) {
  auto r = run({"verify-all", std::string(CBF_SOURCE_DIR) + "/suite"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("verify-all: PASS"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"discriminant", model("node.json"), "--format", "xml"}).code, 2);
}
