// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#ifndef BREGMAN_CLI_PATH
#error "BREGMAN_CLI_PATH must point at the built CLI"
#endif

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(BREGMAN_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  REQUIRE(file.good());
  std::ostringstream ss;
  ss << file.rdbuf();
  return ss.str();
}

std::string tmp_path(const std::string& name) {
  return std::string("/tmp/bregman_cli_test_") + name;
}

}  // namespace

TEST_CASE("envelope: schema and determinism") {
  const std::string out1 = tmp_path("env1.csv");
  const std::string out2 = tmp_path("env2.csv");
  const std::string args = "envelope --family bernoulli --param 0.8 --n 6 --reps 2 "
                           "--seed 11 --baselines laplace --baselines hedged --out ";
  REQUIRE(run(args + out1) == 0);
  REQUIRE(run(args + out2) == 0);
  const std::string a = slurp(out1);
  CHECK(a == slurp(out2));

  std::istringstream lines(a);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "method,rep,n,lower,upper,estimate");
  int rows = 0;
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 3 * 2 * 6);  // methods x reps x n
}

TEST_CASE("envelope: one row per method at reps=1, n=1") {
  const std::string out = tmp_path("env_single.csv");
  REQUIRE(run("envelope --family gaussian-mean --param 0 1 --n 1 --reps 1 --seed 5 "
              "--baselines laplace --baselines kk --out " + out) == 0);
  const std::string text = slurp(out);
  std::istringstream lines(text);
  std::string line;
  int rows = -1;  // skip header
  while (std::getline(lines, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 3);
}

TEST_CASE("coverage: json report shape and degenerate delta") {
  const std::string out = tmp_path("cov.json");
  REQUIRE(run("coverage --family bernoulli --param 0.8 --n 30 --reps 20 --seed 2 --out " +
              out) == 0);
  const std::string text = slurp(out);
  for (const char* key : {"\"family\"", "\"delta\"", "\"c\"", "\"reps\"", "\"n_max\"",
                          "\"violations\"", "\"violation_rate\"", "\"seed\""}) {
    INFO(key);
    CHECK(text.find(key) != std::string::npos);
  }
  // delta = 1 is degenerate but the report must still be well-formed
  REQUIRE(run("coverage --family bernoulli --param 0.5 --n 10 --reps 5 --delta 1.0 "
              "--seed 2 --out " + out) == 0);
  CHECK(slurp(out).find("\"violation_rate\"") != std::string::npos);
}

TEST_CASE("changepoint: schema and no-change behaviour of t_star >= horizon") {
  const std::string out = tmp_path("cp.csv");
  REQUIRE(run("changepoint --sigma0 1 --sigma1 4 --tstar 100 --n 30 --reps 3 --seed 9 "
              "--out " + out) == 0);
  std::istringstream lines(slurp(out));
  std::string header;
  std::getline(lines, header);
  CHECK(header == "rep,detection_time,detected");
}

TEST_CASE("set2d: grid csv plus sidecar json") {
  const std::string out = tmp_path("set2d.csv");
  // n = 0: the whole box is accepted
  REQUIRE(run("set2d --param 1 1 --n 0 --rows 4 --cols 4 --seed 3 --out " + out) == 0);
  {
    std::istringstream zero(slurp(out));
    std::string line;
    std::getline(zero, line);
    while (std::getline(zero, line)) {
      if (!line.empty()) CHECK(line.back() == '1');
    }
  }
  REQUIRE(run("set2d --param 1 1 --n 20 --rows 8 --cols 8 --seed 3 --out " + out) == 0);
  std::istringstream lines(slurp(out));
  std::string header;
  std::getline(lines, header);
  CHECK(header == "row,col,theta1,theta2,member");
  int rows = 0;
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 64);
  const std::string sidecar = slurp(out + ".json");
  CHECK(sidecar.find("\"resolution\"") != std::string::npos);
  CHECK(sidecar.find("\"box\"") != std::string::npos);
}

TEST_CASE("tune-c: one row per horizon") {
  const std::string out = tmp_path("tune.csv");
  REQUIRE(run("tune-c --family bernoulli --param 0.5 --n0 20 --n0 40 --reps 3 --seed 4 "
              "--out " + out) == 0);
  std::istringstream lines(slurp(out));
  std::string header;
  std::getline(lines, header);
  CHECK(header == "n0,c_star,width");
  int rows = 0;
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 2);
}

TEST_CASE("bandit-demo: subset property holds on every row") {
  const std::string out = tmp_path("bandit.csv");
  REQUIRE(run("bandit-demo --dim 3 --n 40 --seed 6 --out " + out) == 0);
  std::istringstream lines(slurp(out));
  std::string header;
  std::getline(lines, header);
  CHECK(header == "n,info_gain,radius_sq_paper,radius_ay,covered");
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    double n, gain, rsq, ray;
    int covered;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%d", &n, &gain, &rsq, &ray,
                        &covered) == 5);
    CHECK(rsq <= ray * ray + 1e-9);
    CHECK(gain >= 0.0);
  }
}

TEST_CASE("config file with flag override") {
  const std::string cfg = tmp_path("config.json");
  {
    std::ofstream f(cfg);
    f << R"({"family": "bernoulli", "param": [0.8], "n": 4, "reps": 2, "seed": 77})";
  }
  const std::string out1 = tmp_path("cfg1.csv");
  const std::string out2 = tmp_path("cfg2.csv");
  REQUIRE(run("envelope --config " + cfg + " --out " + out1) == 0);
  REQUIRE(run("envelope --config " + cfg + " --reps 1 --out " + out2) == 0);
  std::istringstream l1(slurp(out1)), l2(slurp(out2));
  int rows1 = -1, rows2 = -1;
  std::string line;
  while (std::getline(l1, line)) if (!line.empty()) ++rows1;
  while (std::getline(l2, line)) if (!line.empty()) ++rows2;
  CHECK(rows1 == 8);   // 2 reps x 4
  CHECK(rows2 == 4);   // flag overrides file
}

TEST_CASE("worker count does not change outputs") {
  const std::string out1 = tmp_path("w1.csv");
  const std::string out4 = tmp_path("w4.csv");
  const std::string args = "envelope --family exponential --param 1 --n 12 --reps 6 "
                           "--seed 21 --baselines kk --out ";
  REQUIRE(run(args + out1 + " --workers 1") == 0);
  REQUIRE(run(args + out4 + " --workers 4") == 0);
  CHECK(slurp(out1) == slurp(out4));
}

TEST_CASE("exit codes") {
  CHECK(run("coverage --family nosuch") == 2);
  CHECK(run("coverage --family bernoulli --reps 0") == 2);
  CHECK(run("coverage --family bernoulli --delta 1.5") == 2);
  CHECK(run("envelope --family gaussian-2d") == 2);
  CHECK(run("envelope --family exponential --baselines hedged") == 2);
  CHECK(run("coverage --family bernoulli --param 0.5 --n 5 --reps 2 --out "
            "/nonexistent-dir/x.json") == 4);
  CHECK(run("") == 2);
}
