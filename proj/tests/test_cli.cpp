#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "dce_sphere/cli.hpp"
#include "dce_sphere/dynamics.hpp"

namespace fs = std::filesystem;
using dce::cli::run;
using json = nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "dce_sphere_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("grid parsing") {
  const auto g = dce::cli::parse_grid("0:3:0.1");
  REQUIRE(g.size() == 31);
  CHECK(g.back() == doctest::Approx(3.0));
  CHECK(dce::cli::parse_grid("1:1:1").size() == 1);
  CHECK_THROWS(dce::cli::parse_grid("0:3"));
  CHECK_THROWS(dce::cli::parse_grid("0:3:-1"));
  CHECK_THROWS(dce::cli::parse_grid("a:3:1"));
}

TEST_CASE("resonance series reproduce the published points") {
  const Result r = invoke({"resonance", "--smax", "3"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  CHECK(r.out.rfind("config,l,s,s_prime,x,y\n", 0) == 0);
  REQUIRE(rows.size() == 1 + 4 * 3);
  CHECK(rows[1][0] == "DD\xCC\x83");
  CHECK(std::stod(rows[1][4]) == doctest::Approx(2.0));
  CHECK(std::stod(rows[1][5]) == doctest::Approx(0.25));
  CHECK(std::stod(rows[2][5]) == doctest::Approx(2.0 / 9).epsilon(1e-9));
  CHECK(std::stod(rows[3][5]) == doctest::Approx(0.1875));
  CHECK(std::stod(rows[4][5]) == doctest::Approx(0.0625));

  const Result l1 = invoke({"resonance", "--bc", "dn", "--l", "1", "--smax", "1"});
  REQUIRE(l1.code == 0);
  const auto p = csv_rows(l1.out);
  CHECK(p[1][0] == "D\xCC\x83N");
  CHECK(std::abs(std::stod(p[1][4]) - 0.9140) < 2e-3);
  CHECK(std::abs(std::stod(p[1][5]) - 0.0494) < 2e-3);
}

TEST_CASE("validation errors exit with 1") {
  CHECK(invoke({"resonance", "--smax", "0"}).code == 1);
  CHECK(invoke({"map", "--smax", "0"}).code == 1);
  CHECK(invoke({"map", "--grid", "1:0:0.1"}).code == 1);
  CHECK(invoke({"bogus"}).code == 1);
  CHECK(invoke({"particles", "--ri", "2", "--ro", "1"}).code == 1);
  const Result r = invoke({"particles", "--bc", "nd", "--moving", "inner"});
  CHECK(r.code == 1);
  CHECK(r.err.find("moving shell must be Dirichlet") != std::string::npos);
}

TEST_CASE("numerical failures exit with 2") {
  const Result r = invoke({"particles", "--smax", "2", "--tol", "1e-14"});
  CHECK(r.code == 2);
  CHECK(r.err.find("not converged") != std::string::npos);
}

TEST_CASE("map output is sorted and independent of the worker count") {
  const std::vector<std::string> base = {"map", "--bc", "nd", "--lmax", "2", "--smax", "2",
                                         "--grid", "0:2:0.25"};
  auto one = base, four = base;
  one.insert(one.end(), {"--workers", "1"});
  four.insert(four.end(), {"--workers", "4"});
  const Result a = invoke(one), b = invoke(four);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto rows = csv_rows(a.out);
  CHECK(rows.size() == 1 + 3 * 2 * 9);
  CHECK(rows[1][3].empty());
  for (std::size_t i = 2; i < rows.size(); ++i) {
    if (rows[i][1] == rows[i - 1][1] && rows[i][2] == rows[i - 1][2]) {
      CHECK(std::stod(rows[i][4]) > std::stod(rows[i - 1][4]));
    }
  }
}

TEST_CASE("map points on the published curves") {
  const Result r = invoke({"map", "--bc", "dd", "--l", "1", "--s", "1", "--grid", "1:1:1",
                           "--format", "json"});
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["run"]["command"] == "map");
  REQUIRE(doc["records"].size() == 1);
  CHECK(doc["records"][0]["config"] == "DD");
  CHECK(doc["records"][0]["s_prime"].is_null());
  CHECK(std::abs(doc["records"][0]["y"].get<double>() - 2.04904) < 2e-3);
}

TEST_CASE("particles record and JSON round trip") {
  const fs::path first = scratch("first.json");
  const Result r = invoke({"particles", "--lmax", "1", "--smax", "8", "--eps", "1e-4",
                           "--out", first.string()});
  REQUIRE(r.code == 0);
  std::ifstream in(first);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const json doc = json::parse(text);
  CHECK(doc["method"] == "perturbative");
  REQUIRE(doc["modes"].size() == 2);
  double total = 0;
  for (const auto& m : doc["modes"]) {
    CHECK(m["N_total"].get<double>() ==
          doctest::Approx((2 * m["l"].get<int>() + 1) * m["N"].get<double>()));
    total += m["N_total"].get<double>();
  }
  CHECK(doc["total"].get<double>() == doctest::Approx(total));
  // Default drive: first DD resonance 2 pi, with varpi T = 50.
  CHECK(doc["run"]["varpi"].get<double>() == doctest::Approx(2 * M_PI));
  const double N = doc["modes"][0]["N"].get<double>();
  CHECK(N / std::pow(1e-4 * 50, 2) == doctest::Approx(0.25).epsilon(1e-2));

  const Result again = invoke({"particles", "--config", first.string()});
  REQUIRE(again.code == 0);
  CHECK(again.out == text);
}

TEST_CASE("flat config files; flags win") {
  const fs::path cfg = scratch("run.cfg");
  std::ofstream(cfg) << "# resonance options\nbc = nd\nsmax = 2\n";
  const Result r = invoke({"resonance", "--config", cfg.string(), "--smax", "1"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][0] == "ND\xCC\x83");
  CHECK(std::abs(std::stod(rows[1][5]) - 0.17493) < 2e-3);
}

TEST_CASE("zero amplitude gives zero particles") {
  const Result r = invoke({"particles", "--eps", "0"});
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["modes"][0]["N"].get<double>() == 0.0);
}

TEST_CASE("sampled trajectory through the general method") {
  const double eps = 1e-3, varpi = 2 * M_PI, T = 50 / varpi;
  const auto traj = dce::sample_motion({eps, varpi, T, 2.0}, 64);
  const fs::path csv = scratch("traj.csv");
  {
    std::ofstream f(csv);
    f.precision(17);
    f << "t,r,rdot\n";
    for (std::size_t k = 0; k < traj.t.size(); ++k)
      f << traj.t[k] << ',' << traj.r[k] << ',' << traj.rdot[k] << '\n';
  }
  const Result g = invoke({"particles", "--trajectory", csv.string(), "--smax", "8"});
  REQUIRE(g.code == 0);
  const json gd = json::parse(g.out);
  CHECK(gd["method"] == "general");
  CHECK(gd["modes"][0]["time_nodes"].get<int>() > 0);
  const Result p = invoke({"particles", "--smax", "8"});
  REQUIRE(p.code == 0);
  const double ng = gd["modes"][0]["N"].get<double>();
  const double np = json::parse(p.out)["modes"][0]["N"].get<double>();
  CHECK(std::abs(ng - np) / np < 1e-2);
}

TEST_CASE("selftest") {
  const Result r = invoke({"selftest"});
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("installed tool exit codes") {
  const std::string tool = DCE_TOOL_PATH;
  auto status = [&](const std::string& args) {
    const int raw = std::system((tool + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status("resonance --smax 2") == 0);
  CHECK(status("resonance --smax 0") == 1);
  CHECK(status("--help") == 0);
}
