#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "splinewalk/cli.hpp"

using namespace splinewalk;

namespace {

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"splinewalk"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_command(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempFile {
  std::string path;
  explicit TempFile(std::string p) : path(std::move(p)) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("knots subcommand writes the documented schema") {
  TempFile out("/tmp/sw_cli_knots.csv");
  CHECK(run({"knots", "--layers", "2", "--width", "10", "--trials", "5", "--seed", "1",
             "--out", out.path}) == 0);
  const std::string text = slurp(out.path);
  CHECK(text.rfind("# splinewalk", 0) == 0);
  CHECK(text.find("# spec: knots") != std::string::npos);
  CHECK(text.find("# master_seed: 1") != std::string::npos);
  CHECK(text.find("l,n,trial,m,normalized_error") != std::string::npos);
}

TEST_CASE("identical invocations produce identical bytes") {
  TempFile a("/tmp/sw_cli_a.csv"), b("/tmp/sw_cli_b.csv");
  const std::vector<std::string> base = {"crossings", "--min-steps", "4", "--max-steps", "64",
                                         "--trials", "50", "--seed", "3"};
  auto with_out = [&](const std::string& path, const std::string& threads) {
    std::vector<std::string> v = {"--threads", threads};
    v.insert(v.end(), base.begin(), base.end());
    v.push_back("--out");
    v.push_back(path);
    return v;
  };
  CHECK(run(with_out(a.path, "1")) == 0);
  CHECK(run(with_out(b.path, "4")) == 0);
  CHECK(slurp(a.path) == slurp(b.path));
}

TEST_CASE("the deterministic flag controls the timestamp comment") {
  TempFile a("/tmp/sw_cli_det.csv");
  CHECK(run({"order-stats", "--n", "4", "--trials", "50", "--out", a.path}) == 0);
  CHECK(slurp(a.path).find("generated_at") == std::string::npos);
  CHECK(run({"order-stats", "--n", "4", "--trials", "50", "--no-deterministic", "--out",
             a.path}) == 0);
  CHECK(slurp(a.path).find("generated_at") != std::string::npos);
}

TEST_CASE("exit codes follow the 0/1/2 convention") {
  CHECK(run({"no-such-subcommand"}) == 2);
  CHECK(run({"knots", "--bogus-flag", "1"}) == 2);
  CHECK(run({"knots", "--trials", "0", "--out", "/tmp/sw_cli_x.csv"}) == 2);
  CHECK(run({"order-stats", "--dist", "laplace", "--out", "/tmp/sw_cli_x.csv"}) == 2);
  CHECK(run({"order-stats", "--n", "4", "--trials", "50", "--out",
             "/no/such/directory/out.csv"}) == 1);
  CHECK(run({"--help"}) == 0);
}

TEST_CASE("equivalence-check runs end to end") {
  TempFile out("/tmp/sw_cli_eq.csv");
  CHECK(run({"equivalence-check", "--seeds", "5", "--n", "100", "--out", out.path}) == 0);
  const std::string text = slurp(out.path);
  CHECK(text.find("max_abs_err") != std::string::npos);
  CHECK(text.find("trial,n,max_discrepancy") != std::string::npos);
}

TEST_CASE("fudge subcommands accept explicit factor lists") {
  TempFile out("/tmp/sw_cli_fudge.csv");
  CHECK(run({"fudge", "--coeff", "c1", "--factors", "0.5,1,2", "--n", "50", "--trials", "40",
             "--out", out.path}) == 0);
  const std::string text = slurp(out.path);
  CHECK(text.find("scale-c1") != std::string::npos);
  CHECK(run({"fudge", "--coeff", "cX", "--out", out.path}) == 2);
}
