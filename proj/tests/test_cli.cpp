// End-to-end checks of the command-line tool. The binary path arrives as the
// last command-line argument (wired up in CMakeLists).
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <cmath>
#include <string>

#include "json.hpp"

namespace {

std::string g_cli;
std::filesystem::path g_tmp;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

RunResult run(const std::string& args, const std::string& env = "") {
  auto out = g_tmp / "stdout.txt";
  auto err = g_tmp / "stderr.txt";
  std::string cmd = env + g_cli + " " + args + " > " + out.string() + " 2> " +
                    err.string();
  int rc = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

}  // namespace

TEST_CASE("de subcommand on a closed-form point") {
  auto r = run("de --c 3 --R 0 --learner one-skill");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("c,R,p,q,zeta,epsilon,iterations,status") == 0);
  // epsilon = 1 - e^-3
  CHECK(r.out.find("0.950212931632") != std::string::npos);
  CHECK(r.out.find(",ok") != std::string::npos);
}

TEST_CASE("bad flags exit with code 2") {
  CHECK(run("de --no-such-flag 1").exit_code == 2);
  CHECK(run("nonsense").exit_code == 2);
  CHECK(run("figure 99").exit_code == 2);
  CHECK(run("de --c 3 --R -1").exit_code == 2);  // rejected by validation
}

TEST_CASE("non-convergence exits 1 and is flagged in the status column") {
  auto r = run("de --c 3 --R 1.03 --max-iter 5");
  CHECK(r.exit_code == 1);
  CHECK(r.out.find("noconv") != std::string::npos);
}

TEST_CASE("a tabulated profile can replace the built-in learners") {
  auto csv = g_tmp / "profile.csv";
  {
    std::ofstream f(csv);
    // the 1-skill profile tabulated on a fine grid
    f << "rho_1,psuc_1\n";
    for (double rho = 0.0; rho <= 12.0; rho += 0.01)
      f << rho << "," << std::exp(-rho) << "\n";
  }
  auto a = run("de --c 3 --R 2 --profile-csv " + csv.string());
  auto b = run("de --c 3 --R 2 --learner one-skill");
  REQUIRE(a.exit_code == 0);
  // converged epsilon agrees up to the interpolation error of the table
  auto epsilon_of = [](const std::string& s) {
    auto pos = s.rfind("\n3,2,");
    std::string row = s.substr(pos + 1);
    // c,R,p,q,zeta,epsilon,...
    std::size_t start = 0;
    for (int commas = 0; commas < 5; ++commas) start = row.find(',', start) + 1;
    return std::stod(row.substr(start));
  };
  CHECK(epsilon_of(a.out) ==
        doctest::Approx(epsilon_of(b.out)).epsilon(1e-3));
}

TEST_CASE("identical invocations produce byte-identical output") {
  std::string args =
      "simulate --c 3 --R 2 --skills 2000 --trials 4 --test-texts 2000 "
      "--seed 9 --threads 4";
  auto a = run(args);
  auto b = run(args);
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);

  auto c = run("de --c 2,3 --R-min 0.5 --R-max 1.5 --R-step 0.25 --threads 3");
  auto d = run("de --c 2,3 --R-min 0.5 --R-max 1.5 --R-step 0.25 --threads 1");
  CHECK(c.out == d.out);  // worker count must not affect output
}

TEST_CASE("json output is valid and carries the glossary field names") {
  auto r = run("de --c 3 --R 1.5 --format json");
  REQUIRE(r.exit_code == 0);
  auto parsed = nlohmann::json::parse(r.out);
  REQUIRE(parsed.is_array());
  REQUIRE(parsed.size() == 1);
  for (const char* key : {"c", "R", "p", "q", "zeta", "epsilon", "status"})
    CHECK(parsed[0].contains(key));
  CHECK(parsed[0]["status"] == "ok");

  auto h = run("hierarchy --R 2 --Rf 2 --format json");
  auto hp = nlohmann::json::parse(h.out);
  for (const char* key : {"p_f", "zeta_f", "epsilon_f"})
    CHECK(hp[0].contains(key));

  auto p = run("percolation --c 3 --R 1.5 --format json");
  auto pp = nlohmann::json::parse(p.out);
  for (const char* key : {"mu_s", "mu_t", "p_G"}) CHECK(pp[0].contains(key));
}

TEST_CASE("config file merges under command-line flags") {
  auto cfgfile = g_tmp / "sweep.cfg";
  {
    std::ofstream f(cfgfile);
    f << "c=5\nR=0\nlearner=one-skill\n";
  }
  // config alone: c=5, R=0 -> epsilon = 1 - e^-5
  auto a = run("de --config " + cfgfile.string());
  REQUIRE(a.exit_code == 0);
  CHECK(a.out.find("0.993262053001") != std::string::npos);
  // the flag wins over the config value
  auto b = run("de --config " + cfgfile.string() + " --c 3");
  REQUIRE(b.exit_code == 0);
  CHECK(b.out.find("0.950212931632") != std::string::npos);
  CHECK(b.out.find("0.993262053001") == std::string::npos);
}

TEST_CASE("output files land in SEMLEARN_OUT_DIR") {
  auto dir = g_tmp / "outdir";
  std::filesystem::remove_all(dir);
  auto r = run("de --c 3 --R 1 --out point.csv",
               "SEMLEARN_OUT_DIR=" + dir.string() + " ");
  REQUIRE(r.exit_code == 0);
  CHECK(std::filesystem::exists(dir / "point.csv"));
  auto body = slurp(dir / "point.csv");
  CHECK(body.find("c,R,p,q,zeta,epsilon") == 0);
  CHECK(body.find("\r") == std::string::npos);  // LF endings only
}

TEST_CASE("region subcommand reports the minimum-R row") {
  auto r = run(
      "region --cmin 2.4 --cmax 3 --rmin 0.5 --rmax 1.5 --step 0.1 "
      "--out " +
      (g_tmp / "region.csv").string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("minimum R for a giant component") != std::string::npos);
  auto body = slurp(g_tmp / "region.csv");
  CHECK(body.rfind("c,R,condition_value,giant_exists", 0) == 0);
}

TEST_CASE("compress subcommand measures a corpus") {
  auto r = run("compress --skills 2000 --c 3 --R 2 --corpus 5000 --seed 3");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("expected_bits") != std::string::npos);
  CHECK(r.out.find("measured_payload_bits") != std::string::npos);
}

TEST_CASE("multiclass coupled mode emits per-class columns") {
  auto r = run(
      "multiclass --mode coupled-near-far --c1 3 --c2 7 --beta-list 0.9 "
      "--R 3");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("R,beta,p_1,p_2,zeta_1,zeta_2") == 0);
}

int main(int argc, char** argv) {
  doctest::Context ctx;
  // the harness appends the CLI path after "--"
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a.rfind("--cli=", 0) == 0) g_cli = a.substr(6);
  }
  if (g_cli.empty()) {
    std::fprintf(stderr, "usage: test_cli --cli=<path-to-binary>\n");
    return 1;
  }
  g_tmp = std::filesystem::temp_directory_path() / "semlearn_cli_test";
  std::filesystem::create_directories(g_tmp);
  ctx.applyCommandLine(argc, argv);
  return ctx.run();
}
