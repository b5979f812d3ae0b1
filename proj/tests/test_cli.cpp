#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "pjm/io.hpp"

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(PJM_CLI_PATH) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class Cli : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pjm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const fs::path path = dir_ / name;
    std::ofstream(path) << text;
    return path.string();
  }

  fs::path dir_;
};

const char* kExample = R"({"n": 2, "x": [0.3, -0.3], "b": [0.5, -0.5]})";

} // namespace

TEST_F(Cli, ForwardZeroPoint) {
  const CliRun r = run("forward -i " + write("z.json", R"({"n": 3, "x": [0, 0, 0], "b": [0, 0, 0]})"));
  ASSERT_EQ(r.code, 0);
  const pjm::Json j = pjm::parse_json(r.out);
  const auto edges = j["edges"].get<std::vector<double>>();
  ASSERT_EQ(edges.size(), 6u);
  EXPECT_NEAR(edges[1], 2.0 * std::cos(2.0 * M_PI / 3.0), 1e-10);
  EXPECT_NEAR(edges[2], 2.0 * std::cos(2.0 * M_PI / 3.0), 1e-10);
  EXPECT_NEAR(edges[3], 2.0 * std::cos(M_PI / 3.0), 1e-10);
  for (double v : j["h1"].get<std::vector<double>>()) EXPECT_EQ(v, 0.0);
  for (double v : j["h2"].get<std::vector<double>>()) EXPECT_EQ(v, 0.0);
}

TEST_F(Cli, ForwardExampleAndJacobianCsv) {
  const std::string csv = (dir_ / "jac.csv").string();
  const CliRun r = run("forward -i " + write("p.json", kExample) + " --jacobian-csv " + csv);
  ASSERT_EQ(r.code, 0);
  const pjm::Json j = pjm::parse_json(r.out);
  EXPECT_NEAR(j["h1"][0].get<double>(), -0.6, 1e-12);
  EXPECT_NEAR(j["h2"][0].get<double>(), 0.48085517183119141, 1e-12);
  EXPECT_TRUE(j["estimates"]["all_hold"].get<bool>());
  std::ifstream in(csv);
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first.substr(0, 3), "-2,");
}

TEST_F(Cli, ForwardIsByteDeterministic) {
  const std::string in = write("p.json", kExample);
  EXPECT_EQ(run("forward -i " + in).out, run("forward -i " + in).out);
}

TEST_F(Cli, MalformedJsonIsExitThree) {
  EXPECT_EQ(run("forward -i " + write("bad.json", "{\"n\": ")).code, 3);
  EXPECT_EQ(run("forward -i " + (dir_ / "missing.json").string()).code, 3);
}

TEST_F(Cli, InvalidInputIsExitOne) {
  EXPECT_EQ(run("forward -i " + write("bad.json", R"({"n": 2, "x": [1, 1], "b": [0, 0]})")).code, 1);
  EXPECT_EQ(run("forward --no-such-flag").code, 1);
}

TEST_F(Cli, InverseRoundTripOfForwardOutput) {
  const CliRun rp = run("random --n 5 --scale 0.8 --seed 4");
  ASSERT_EQ(rp.code, 0);
  const std::string pfile = write("p.json", rp.out);
  const CliRun fw = run("forward -i " + pfile);
  ASSERT_EQ(fw.code, 0);
  const CliRun inv = run("inverse -i " + write("h.json", fw.out));
  ASSERT_EQ(inv.code, 0);
  const pjm::Json want = pjm::parse_json(rp.out), got = pjm::parse_json(inv.out);
  for (const char* key : {"x", "b"}) {
    for (std::size_t k = 0; k < 5; ++k) {
      EXPECT_NEAR(got[key][k].get<double>(), want[key][k].get<double>(), 1e-8);
    }
  }
  EXPECT_TRUE(got.contains("trace"));
}

TEST_F(Cli, InverseZeroTarget) {
  const CliRun r = run("inverse --n 3 -i " + write("h.json", R"({"h1": [0, 0], "h2": [0, 0]})"));
  ASSERT_EQ(r.code, 0);
  const pjm::Json j = pjm::parse_json(r.out);
  for (double v : j["x"].get<std::vector<double>>()) EXPECT_LE(std::abs(v), 1e-10);
}

TEST_F(Cli, InverseDimensionMismatchIsExitOne) {
  EXPECT_EQ(run("inverse --n 4 -i " + write("h.json", R"({"h1": [0], "h2": [0]})")).code, 1);
}

TEST_F(Cli, InverseReadsStdin) {
  const std::string h = write("h.json", R"({"h1": [-0.6], "h2": [0.48085517183119141]})");
  const CliRun r = run("inverse -i - < " + h);
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(pjm::parse_json(r.out)["x"][0].get<double>(), 0.3, 1e-10);
}

TEST_F(Cli, CheckPassesAndDetectsInjectedEdgeError) {
  const std::string zero = write("z.json", R"({"n": 4, "x": [0, 0, 0, 0], "b": [0, 0, 0, 0]})");
  EXPECT_EQ(run("check -i " + zero).code, 0);
  const std::string p = write("p.json", run("random --n 6 --scale 0.8 --seed 11").out);
  // Everything holds here except the upper estimate e^{h+} <= 2c, which is
  // false for this instance.
  const CliRun ok = run("check -i " + p);
  EXPECT_EQ(ok.code, 2);
  const pjm::Json ok_report = pjm::parse_json(ok.out);
  for (const auto& c : ok_report["checks"]) {
    EXPECT_EQ(c["passed"].get<bool>(), c["name"] != "estimates") << c["name"];
  }
  const CliRun bad = run("check --inject-edge-error -i " + p);
  EXPECT_EQ(bad.code, 2);
  bool product_failed = false;
  const pjm::Json bad_report = pjm::parse_json(bad.out);
  for (const auto& c : bad_report["checks"]) {
    if (c["name"] == "product_identity") product_failed = !c["passed"].get<bool>();
  }
  EXPECT_TRUE(product_failed);
}

TEST_F(Cli, RandomIsDeterministic) {
  const CliRun a = run("random --n 4 --seed 9");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, run("random --n 4 --seed 9").out);
  EXPECT_NE(a.out, run("random --n 4 --seed 10").out);
  EXPECT_EQ(run("random --n 1").code, 1);
  EXPECT_EQ(run("random --n 3 --scale -1").code, 1);
}

TEST_F(Cli, QuasimomentumCsv) {
  const CliRun z = run("quasimomentum --grid 3 -i " + write("z.json", R"({"n": 2, "x": [0, 0], "b": [0, 0]})"));
  ASSERT_EQ(z.code, 0);
  std::istringstream lines(z.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "lambda,re_k,im_k");
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    EXPECT_EQ(line.substr(line.rfind(',') + 1), "0");
  }
  EXPECT_EQ(rows, 6);

  const CliRun e = run("quasimomentum --grid 3 -i " + write("p.json", kExample));
  ASSERT_EQ(e.code, 0);
  bool found = false;
  std::istringstream rows2(e.out);
  while (std::getline(rows2, line)) {
    if (line.rfind("0,", 0) == 0) {
      found = true;
      EXPECT_NEAR(std::stod(line.substr(line.rfind(',') + 1)), 0.76890942007287478, 1e-12);
    }
  }
  EXPECT_TRUE(found);
}

TEST_F(Cli, QuasimomentumGridZeroIsExitOne) {
  EXPECT_EQ(run("quasimomentum --grid 0 -i " + write("p.json", kExample)).code, 1);
}
