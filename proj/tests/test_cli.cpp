#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "krein/csv.hpp"

using namespace krein;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "krein_qm");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_binary(const std::string& args) {
  const int status = std::system((std::string(KREIN_QM_PATH) + " " + args + " > /dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("bells command") {
  const Result r = run({"bells", "--p", "0.3", "--n", "10,40,160"});
  REQUIRE(r.code == 0);
  const CsvTable t = CsvTable::parse(r.out);
  CHECK(t.header() == std::vector<std::string>{"n", "k", "coeff_state", "coeff_projected"});
  CHECK(t.rows() == 213);
  CHECK(r.err.find("bells:") == 0);
}

TEST_CASE("propcheck command") {
  const Result r = run({"propcheck", "--wp", "1", "--wm", "2", "--omega", "0"});
  REQUIRE(r.code == 0);
  const CsvTable t = CsvTable::parse(r.out);
  REQUIRE(t.rows() == 1);
  CHECK(t.number(0, "lhs") == -0.25);
  CHECK(t.number(0, "rhs") == -0.25);
  CHECK(run({"propcheck", "--wp", "1", "--wm", "2", "--omega", "2"}).code == 1);
}

TEST_CASE("nu-contours command covers both models") {
  const Result r = run({"nu-contours", "--levels", "0.01,0.1", "--loe", "1"});
  REQUIRE(r.code == 0);
  const CsvTable t = CsvTable::parse(r.out);
  bool m31 = false, p31 = false;
  for (size_t i = 0; i < t.rows(); ++i) {
    m31 = m31 || t.cell(i, 3) == "3m1";
    p31 = p31 || t.cell(i, 3) == "3p1";
  }
  CHECK(m31);
  CHECK(p31);
  CHECK(run({"nu-contours", "--channel", "mu-x"}).code == 1);
}

TEST_CASE("osc and spectrum commands") {
  const Result osc = run({"osc", "--theta", "0.5", "--points", "9"});
  REQUIRE(osc.code == 0);
  CHECK(CsvTable::parse(osc.out).rows() == 9);

  const Result s2 = run({"spectrum2d", "--g-points", "2", "--g-max", "0.2", "--levels", "4"});
  REQUIRE(s2.code == 0);
  const CsvTable t = CsvTable::parse(s2.out);
  CHECK(t.rows() == 8);
  CHECK(t.cell(0, 4) == "positive");
  CHECK(t.cell(1, 4) == "negative");
}

TEST_CASE("numerical failures exit with 2") {
  const Result r = run({"spectrum2d", "--g-points", "1", "--convergence-tol", "1e-12"});
  CHECK(r.code == 2);
  CHECK(r.err.find("failed") != std::string::npos);
}

TEST_CASE("usage and configuration errors exit with 1") {
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"bells", "--n", "10,x"}).code == 1);
  CHECK(run({"bells", "--n", "2.5"}).code == 1);
  CHECK(run({"bells", "--nope", "1"}).code == 1);
  CHECK(run({"bells", "--p", "1.5"}).code == 1);
  CHECK(run({"bells", "--config", "/nonexistent/config.json"}).code == 1);
  CHECK(run({"bells", "--help"}).code == 0);

  const auto bad_key = temp_file("krein_cli_bad_key.json");
  std::ofstream(bad_key) << R"({"p": 0.3, "colour": "red"})";
  const Result r = run({"bells", "--config", bad_key.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("colour") != std::string::npos);

  const auto broken = temp_file("krein_cli_broken.json");
  std::ofstream(broken) << R"({"p": )";
  CHECK(run({"bells", "--config", broken.string()}).code == 1);
  std::filesystem::remove(bad_key);
  std::filesystem::remove(broken);
}

TEST_CASE("flags override the config file") {
  const auto config = temp_file("krein_cli_config.json");
  std::ofstream(config) << R"({"p": 0.5, "n": [4, 6]})";
  const Result from_file = run({"bells", "--config", config.string()});
  REQUIRE(from_file.code == 0);
  CHECK(CsvTable::parse(from_file.out).rows() == 5 + 7);
  CHECK(from_file.err.find("p = 0.5") != std::string::npos);

  const Result overridden = run({"bells", "--p", "0.2", "--config", config.string()});
  REQUIRE(overridden.code == 0);
  CHECK(overridden.err.find("p = 0.2") != std::string::npos);
  CHECK(CsvTable::parse(overridden.out).rows() == 12);
  std::filesystem::remove(config);
}

TEST_CASE("jobs from the environment") {
  setenv("KREIN_QM_JOBS", "zero", 1);
  CHECK(run({"propcheck"}).code == 1);
  setenv("KREIN_QM_JOBS", "2", 1);
  CHECK(run({"propcheck"}).code == 0);
  unsetenv("KREIN_QM_JOBS");
  CHECK(run({"propcheck", "--jobs", "-3"}).code == 1);
}

TEST_CASE("output files are re-parseable and repeatable") {
  const auto a = temp_file("krein_cli_a.csv"), b = temp_file("krein_cli_b.csv");
  for (const std::string cmd : {"bells", "osc", "propcheck", "nu-contours"}) {
    REQUIRE(run_binary(cmd + " --out " + a.string()) == 0);
    REQUIRE(run_binary(cmd + " --out " + b.string()) == 0);
    CHECK(slurp(a) == slurp(b));
    const CsvTable t = read_csv(a.string());
    CHECK(t.str() == slurp(a));
  }
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

TEST_CASE("selftest subsets") {
  const Result ok = run({"selftest", "--only", "4,9"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("PASS  4") != std::string::npos);
  CHECK(ok.out.find("selftest: 2/2 checks passed") != std::string::npos);
  CHECK(run({"selftest", "--only", "14"}).code == 1);

  const Result broken = run({"selftest", "--null-tol", "1", "--only", "4,5,12"});
  CHECK(broken.code == 2);
  CHECK(broken.out.find("FAIL") != std::string::npos);
}
