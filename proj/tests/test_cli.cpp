#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "freeze/cli.hpp"
#include "freeze/errors.hpp"

using namespace freeze;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "freeze_lab");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) break;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

const char* kExampleFile =
    "N = 2\np = 2\ntheta = 0.5\nalpha_u = 0.3\n"
    "alpha.1.1 = 1\nalpha.1.2 = 2\nalpha.2.1 = 1.5\nalpha.2.2 = 3\n"
    "beta = 3\n";

}  // namespace

TEST_CASE("parse_config") {
  const auto cfg = parse_config(Command::Pressure, kExampleFile, {});
  CHECK(cfg.model.alpha[1][0] == 1.5);
  CHECK(*cfg.beta == 3.0);

  const auto over = parse_config(Command::Pressure, kExampleFile, {{"beta", "12.5"}});
  CHECK(*over.beta == 12.5);

  CHECK_THROWS_AS(parse_config(Command::Gamma, kExampleFile, {{"alpha.1.1", "-1"}}), ConfigError);
  CHECK_THROWS_AS(parse_config(Command::Gamma, kExampleFile, {{"bogus", "1"}}), ConfigError);
  CHECK_THROWS_AS(parse_config(Command::Gamma, "N = 2\np = 2\n", {}), ConfigError);
  CHECK_THROWS_AS(parse_config(Command::Gamma, kExampleFile, {{"theta", "0.5.1"}}), ConfigError);
  CHECK_THROWS_AS(parse_config(Command::Gamma, kExampleFile, {{"tol", "0"}}), ConfigError);
  CHECK_THROWS_AS(parse_config(Command::Sweep, kExampleFile, {}), ConfigError);
  CHECK_THROWS_AS(parse_config(Command::Pressure, kExampleFile, {{"beta", "0:1:3"}}), ConfigError);

  const auto r = parse_config(Command::Sweep, "", {{"beta", "0:40:81"}});
  const auto b = r.betas();
  REQUIRE(b.size() == 81);
  CHECK(b.front() == 0.0);
  CHECK(b.back() == 40.0);
  CHECK(b[1] == 0.5);
}

TEST_CASE("gamma subcommand") {
  const auto r = cli({"gamma"});
  CHECK(r.code == 0);
  const auto rows = csv(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][0] == "gamma");
  CHECK(rows[1][0] == "1.25");
  CHECK(rows[1][1] == "Z1");
}

TEST_CASE("sweep: 81 rows, increasing beta, byte-identical across runs and thread counts") {
  const auto a = cli({"sweep", "--beta", "0:40:81"});
  REQUIRE(a.code == 0);
  const auto rows = csv(a.out);
  REQUIRE(rows.size() == 82);
  for (std::size_t k = 2; k < rows.size(); ++k) CHECK(std::stod(rows[k][0]) > std::stod(rows[k - 1][0]));
  CHECK(cli({"sweep", "--beta", "0:40:81"}).out == a.out);
  CHECK(cli({"--threads", "1", "sweep", "--beta", "0:40:81"}).out == a.out);
  CHECK(cli({"--threads", "3", "sweep", "--beta", "0:40:81"}).out == a.out);
}

TEST_CASE("sweep past the solvable range labels asymptotic rows") {
  const auto r = cli({"sweep", "--beta", "500:700:3"});
  REQUIRE(r.code == 0);
  const auto rows = csv(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[1].back() == "solved");
  CHECK(rows[3].back() == "asymptotic-corrected");
  CHECK(cli({"--set", "alpha_u=0.1", "sweep", "--beta", "600:700:2"}).code == kExitNumerical);
}

TEST_CASE("measures: probabilities in [0,1] and rows sum to 1") {
  const auto r = cli({"measures", "--beta", "0:60:13"});
  REQUIRE(r.code == 0);
  const auto rows = csv(r.out);
  REQUIRE(rows.size() == 14);
  CHECK(rows[0][1] == "nu_O1");
  for (std::size_t k = 1; k < rows.size(); ++k) {
    double nu = 0, mu = 0;
    for (int c = 1; c <= 3; ++c) {
      const double v = std::stod(rows[k][c]);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      nu += v;
    }
    for (int c = 4; c <= 6; ++c) {
      const double v = std::stod(rows[k][c]);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      mu += v;
    }
    CHECK(std::abs(nu - 1) <= 1e-9);
    CHECK(std::abs(mu - 1) <= 1e-9);
  }
}

TEST_CASE("measures with cylinders appends a second table") {
  const auto r = cli({"measures", "--beta", "5", "--cylinders", "2"});
  REQUIRE(r.code == 0);
  const auto pos = r.out.find("\n\n");
  REQUIRE(pos != std::string::npos);
  const auto rows = csv(r.out.substr(pos + 2));
  CHECK(rows[0][1] == "word");
  CHECK(rows.size() == 1 + 2 * (2 + 4));
}

TEST_CASE("oracle subcommand") {
  const auto r = cli({"oracle", "--beta", "10", "--depth", "60"});
  REQUIRE(r.code == 0);
  const auto rows = csv(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][rows[0].size() - 2] == "lambda");
  CHECK(rows[0].back() == "bound");
  CHECK(cli({"oracle", "--beta", "1", "--depth", "30", "--tail", "capped"}).code == 0);
  CHECK(cli({"oracle", "--beta", "1", "--tail", "round"}).code == kExitConfig);
}

TEST_CASE("zones grid") {
  const auto r = cli({"zones", "--grid", "alpha_u=0.1:0.5:5", "alpha_p1=1.1:2.5:4"});
  REQUIRE(r.code == 0);
  CHECK(csv(r.out).size() == 21);
  CHECK(cli({"zones", "--grid", "alpha_u=0.1:0.5:5", "beta=1:2:2"}).code == kExitConfig);
}

TEST_CASE("subaction subcommand") {
  auto r = cli({"subaction"});
  REQUIRE(r.code == 0);
  CHECK(csv(r.out)[0].size() == 2);
  r = cli({"subaction", "--beta", "50"});
  REQUIRE(r.code == 0);
  CHECK(csv(r.out)[0].size() == 5);
}

TEST_CASE("exit codes") {
  CHECK(cli({"--set", "alpha.1.1=-1", "gamma"}).code == kExitConfig);
  CHECK(cli({"--config", "/nonexistent/file", "gamma"}).code == kExitConfig);
  CHECK(cli({"pressure"}).code == kExitConfig);
  CHECK(cli({"frobnicate"}).code == kExitConfig);
  const auto r = cli({"--set", "theta=1.5", "gamma"});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("theta") != std::string::npos);
  CHECK(cli({"pressure", "--beta", "900"}).code == 0);
  CHECK(cli({"--set", "alpha_u=0.1", "pressure", "--beta", "900"}).code == kExitNumerical);
}

TEST_CASE("config file plus flag override") {
  const std::string path = "freeze_lab_test_config.txt";
  {
    std::ofstream f(path);
    f << kExampleFile;
  }
  const auto r = cli({"--config", path, "pressure", "--beta", "12.5"});
  REQUIRE(r.code == 0);
  CHECK(csv(r.out)[1][0] == "12.5");
  std::remove(path.c_str());
}
