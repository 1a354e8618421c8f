// End-to-end tests of the command-line tool: spawns the real binary, feeds it
// JSON files, and checks outputs, exit codes, and the manifest contract.
// The binary path comes from PENCILSPEC_CLI (set by the test harness).

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "pencilspec/coefficients.hpp"
#include "pencilspec/jsonio.hpp"
#include "pencilspec/types.hpp"

using namespace pencilspec;
namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* env = std::getenv("PENCILSPEC_CLI");
  if (env && *env) return env;
  return "./pencilspec";  // running from the build directory by hand
}

struct Sandbox {
  std::string dir;
  Sandbox() {
    char tmpl[] = "/tmp/pencilspec_cli_XXXXXX";
    char* d = mkdtemp(tmpl);
    REQUIRE(d != nullptr);
    dir = d;
  }
  ~Sandbox() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string path(const std::string& name) const { return dir + "/" + name; }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(bool(in), "cannot open " << path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(bool(out));
  out << text;
}

struct RunResult {
  int code = -1;
  std::string out, err;
};

RunResult run_cli(const Sandbox& sb, const std::string& args) {
  const std::string so = sb.path("stdout.txt"), se = sb.path("stderr.txt");
  const std::string cmd =
      "\"" + cli_path() + "\" " + args + " >\"" + so + "\" 2>\"" + se + "\"";
  int status = std::system(cmd.c_str());
  RunResult r;
  REQUIRE(status != -1);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(so);
  r.err = slurp(se);
  return r;
}

// rows of a comma-separated numeric table, header skipped
std::vector<std::vector<double>> parse_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  bool first = true;
  while (std::getline(lines, line)) {
    if (first || line.empty()) {
      first = false;
      continue;
    }
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

std::string free_problem_json() {
  return dump_problem(make_free(0.0, kPi, 129));
}

std::string integer_subspectrum_json(int kmax, bool even_only = false) {
  Subspectrum sub;
  for (int k = -kmax; k <= kmax; ++k) {
    if (k == 0) continue;
    if (even_only && k % 2 != 0) continue;
    sub.values.push_back(Cplx(double(k), 0.0));
  }
  sub.omega0_mod1 = 0.0;
  return dump_subspectrum(sub);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help succeeds and argument errors exit 2") {
  Sandbox sb;
  CHECK(run_cli(sb, "--help").code == 0);
  CHECK(run_cli(sb, "").code == 2);                 // a subcommand is required
  CHECK(run_cli(sb, "forward").code == 2);          // missing required options
  spit(sb.path("p.json"), free_problem_json());
  spit(sb.path("f1.json"), "{\"op\":\"const\",\"value\":1}");
  RunResult r = run_cli(sb, "forward --problem \"" + sb.path("p.json") +
                                "\" --lambda-grid 0:1:2 --f1 \"" +
                                sb.path("f1.json") + "\" --out \"" +
                                sb.path("o.csv") + "\"");
  CHECK(r.code == 2);  // --f1 without --f2
  CHECK(r.err.find("together") != std::string::npos);
}

TEST_CASE("forward writes the closed-form table for the free problem") {
  Sandbox sb;
  spit(sb.path("p.json"), free_problem_json());
  const std::string out = sb.path("table.csv");
  RunResult r = run_cli(sb, "forward --problem \"" + sb.path("p.json") +
                                "\" --lambda-grid 0.25:2.25:9 --out \"" + out +
                                "\"");
  REQUIRE_MESSAGE(r.code == 0, r.err);

  const std::string text = slurp(out);
  const std::string header =
      "lambda_re,lambda_im,S_re,S_im,S1_re,S1_im,C_re,C_im,C1_re,C1_im,"
      "delta_re,delta_im,wronskian_re,wronskian_im";
  CHECK(text.substr(0, header.size()) == header);

  auto rows = parse_csv(text);
  REQUIRE(rows.size() == 9);
  for (const auto& row : rows) {
    REQUIRE(row.size() == 14);
    const double lam = row[0];
    CHECK(row[1] == 0.0);
    CHECK(std::abs(row[2] - std::sin(lam * kPi) / lam) < 1e-9);   // S
    CHECK(std::abs(row[4] - std::cos(lam * kPi)) < 1e-9);         // S^[1]
    CHECK(std::abs(row[6] - std::cos(lam * kPi)) < 1e-9);         // C
    // Dirichlet pair: delta is S itself
    CHECK(std::abs(row[10] - row[2]) < 1e-15);
    CHECK(std::abs(row[11] - row[3]) < 1e-15);
    CHECK(std::abs(Cplx(row[12], row[13]) - Cplx(1.0)) < 1e-8);   // wronskian
  }

  const std::string man = slurp(out + ".manifest.json");
  CHECK(man.find("\"forward\"") != std::string::npos);
  CHECK(man.find("p.json") != std::string::npos);
}

TEST_CASE("forward combines boundary function files into delta") {
  Sandbox sb;
  spit(sb.path("p.json"), free_problem_json());
  spit(sb.path("f1.json"), "{\"op\":\"const\",\"value\":1}");
  spit(sb.path("f2.json"), "{\"op\":\"poly\",\"coeffs\":[0,1]}");
  const std::string out = sb.path("table.csv");
  RunResult r = run_cli(
      sb, "forward --problem \"" + sb.path("p.json") +
              "\" --lambda-grid 0.3:2.1:7 --f1 \"" + sb.path("f1.json") +
              "\" --f2 \"" + sb.path("f2.json") + "\" --out \"" + out + "\"");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  for (const auto& row : parse_csv(slurp(out))) {
    const Cplx lam(row[0], row[1]), S(row[2], row[3]), S1(row[4], row[5]);
    const Cplx delta(row[10], row[11]);
    CHECK(std::abs(delta - (S1 + lam * S)) < 1e-10);
  }
}

TEST_CASE("spectrum finds the free Dirichlet eigenvalues and reruns are byte-identical") {
  Sandbox sb;
  spit(sb.path("p.json"), free_problem_json());
  const std::string out = sb.path("sub.json");
  const std::string args = "spectrum --problem \"" + sb.path("p.json") +
                           "\" --box 0.45:3.6:-1:1 --out \"" + out + "\"";
  RunResult r = run_cli(sb, args);
  REQUIRE_MESSAGE(r.code == 0, r.err);

  Subspectrum sub = parse_subspectrum(slurp(out));
  REQUIRE(sub.values.size() == 3);
  for (int k = 1; k <= 3; ++k)
    CHECK(std::abs(sub.values[k - 1] - Cplx(double(k))) < 1e-8);
  CHECK(std::abs(sub.omega0_mod1) < 1e-15);

  const std::string bytes = slurp(out);
  const std::string man = slurp(out + ".manifest.json");
  fs::remove(out);
  fs::remove(out + ".manifest.json");
  REQUIRE(run_cli(sb, args).code == 0);
  CHECK(slurp(out) == bytes);
  CHECK(slurp(out + ".manifest.json") == man);
}

TEST_CASE("invert reconstructs vanishing kernels from integer data") {
  Sandbox sb;
  spit(sb.path("sub.json"), integer_subspectrum_json(10));
  const std::string out = sb.path("triple.json");
  const std::string weyl = sb.path("weyl.json");
  RunResult r = run_cli(sb, "invert --subspectrum \"" + sb.path("sub.json") +
                                "\" --trunc 12 --out \"" + out +
                                "\" --emit-weyl \"" + weyl + "\"");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("invert:") != std::string::npos);

  BoundaryTriple bt = parse_triple(slurp(out));
  CHECK(std::abs(bt.omega0) < 1e-12);
  double worst = 0.0;
  for (const Cplx& v : bt.K) worst = std::max(worst, std::abs(v));
  for (const Cplx& v : bt.N) worst = std::max(worst, std::abs(v));
  CHECK(worst < 1e-7);

  // free residues: M at theta = n is n/pi
  WeylData wd = parse_weyl(slurp(weyl));
  REQUIRE(wd.rows.size() >= 4);
  for (const WeylRow& row : wd.rows) {
    REQUIRE(row.nu == 0);
    CHECK(std::abs(row.value - row.theta / kPi) < 1e-6);
  }
}

TEST_CASE("invert refuses data that underdetermines the moment system") {
  Sandbox sb;
  spit(sb.path("sub.json"), integer_subspectrum_json(10, /*even_only=*/true));
  const std::string out = sb.path("triple.json");
  RunResult r = run_cli(sb, "invert --subspectrum \"" + sb.path("sub.json") +
                                "\" --trunc 12 --out \"" + out + "\"");
  CHECK(r.code == 4);
  CHECK(r.err.find("rank-deficient") != std::string::npos);
  CHECK(!fs::exists(out));
}

TEST_CASE("schema problems exit 2") {
  Sandbox sb;
  spit(sb.path("bad.json"), "{ this is not json");
  RunResult r = run_cli(sb, "invert --subspectrum \"" + sb.path("bad.json") +
                                "\" --out \"" + sb.path("o.json") + "\"");
  CHECK(r.code == 2);
  CHECK(r.err.find("invalid JSON") != std::string::npos);

  spit(sb.path("extra.json"),
       "{\"values\":[1,2,3,-1,-2,-3],\"omega0_mod1\":0,\"surprise\":1}");
  r = run_cli(sb, "invert --subspectrum \"" + sb.path("extra.json") +
                      "\" --out \"" + sb.path("o.json") + "\"");
  CHECK(r.code == 2);
  CHECK(r.err.find("unknown key") != std::string::npos);

  spit(sb.path("p.json"), free_problem_json());
  r = run_cli(sb, "forward --problem \"" + sb.path("p.json") +
                      "\" --lambda-grid 0:1:2 --out "
                      "/nonexistent-dir-zzz/out.csv");
  CHECK(r.code == 2);
  CHECK(r.err.find("cannot write file") != std::string::npos);
}

TEST_CASE("check exits 4 on engineered simultaneous zeros but writes the report") {
  Sandbox sb;
  std::string vals = "{\"values\":[";
  bool first = true;
  for (int k = -6; k <= 6; ++k) {
    if (k == 0) continue;
    if (!first) vals += ",";
    vals += std::to_string(k);
    first = false;
  }
  vals += "],\"omega0_mod1\":0}";
  spit(sb.path("sub.json"), vals);
  // f1 = sin(pi lambda) and f2 = lambda - 2 vanish together at the data
  // point lambda = 2
  spit(sb.path("f1.json"),
       "{\"op\":\"sin\",\"arg\":{\"op\":\"axpb\",\"a\":3.141592653589793,"
       "\"b\":0}}");
  spit(sb.path("f2.json"), "{\"op\":\"poly\",\"coeffs\":[-2,1]}");

  const std::string rep = sb.path("report.json");
  RunResult r = run_cli(sb, "check --subspectrum \"" + sb.path("sub.json") +
                                "\" --f1 \"" + sb.path("f1.json") +
                                "\" --f2 \"" + sb.path("f2.json") +
                                "\" --report \"" + rep + "\"");
  CHECK(r.code == 4);
  const std::string report = slurp(rep);
  CHECK(report.find("\"ok\": false") != std::string::npos);

  // the same data under the Dirichlet pair passes every check
  RunResult ok = run_cli(sb, "check --subspectrum \"" + sb.path("sub.json") +
                                 "\" --report \"" + rep + "\"");
  CHECK(ok.code == 0);
  CHECK(slurp(rep).find("\"ok\": true") != std::string::npos);
}

TEST_CASE("half exits 3 when the spectrum tail defeats the enumeration") {
  Sandbox sb;
  // one-sided list with a 0.4 offset step planted in its upper half: the
  // tail block averages disagree beyond the guard
  HalfProblem hp;
  hp.known_half = make_free(kPi, 2.0 * kPi, 65);
  for (int k = 1; k <= 24; ++k)
    hp.spectrum.push_back(Cplx(0.5 * k + (k >= 13 ? 0.4 : 0.0), 0.0));
  hp.known_mean = 0.0;
  spit(sb.path("half.json"), dump_half(hp));
  RunResult r = run_cli(sb, "half --problem \"" + sb.path("half.json") +
                                "\" --out \"" + sb.path("left.json") + "\"");
  CHECK(r.code == 3);
  CHECK(r.err.find("estimate_omega0") != std::string::npos);
}

TEST_CASE("roundtrip on the free problem reports near-zero errors") {
  Sandbox sb;
  spit(sb.path("p.json"), free_problem_json());
  const std::string out = sb.path("errors.csv");
  RunResult r = run_cli(sb, "roundtrip --problem \"" + sb.path("p.json") +
                                "\" --trunc 48 --out \"" + out + "\"");
  REQUIRE_MESSAGE(r.code == 0, r.err);

  std::map<std::string, double> table;
  std::istringstream lines(slurp(out));
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    table[line.substr(0, comma)] = std::stod(line.substr(comma + 1));
  }
  REQUIRE(table.count("kernel_l2"));
  REQUIRE(table.count("theta_max"));
  REQUIRE(table.count("p_rel_l2"));
  REQUIRE(table.count("sigma_rel_l2"));
  CHECK(table["kernel_l2"] < 1e-6);
  CHECK(table["theta_max"] < 1e-6);
  CHECK(table["p_rel_l2"] < 1e-2);
  CHECK(table["sigma_rel_l2"] < 1e-2);
}

}  // TEST_SUITE
