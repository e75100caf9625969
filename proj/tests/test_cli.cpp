#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef COVPAIR_CLI_PATH
#error "COVPAIR_CLI_PATH must be defined"
#endif
#ifndef COVPAIR_GOLDEN_DIR
#error "COVPAIR_GOLDEN_DIR must be defined"
#endif

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args, bool keep_stderr = false) {
  const std::string cmd =
      std::string(COVPAIR_CLI_PATH) + " " + args + (keep_stderr ? " 2>&1" : " 2>/dev/null");
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf;
  while (std::size_t got = fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string golden(const std::string& name) {
  return std::string(COVPAIR_GOLDEN_DIR) + "/" + name;
}

void check_against_golden(const std::string& args, const std::string& golden_name,
                          int expect_exit = 0) {
  const auto r = run_cli(args);
  CHECK(r.exit_code == expect_exit);
  CHECK(r.out == read_file(golden(golden_name)));
}

}  // namespace

TEST_CASE("golden records per subcommand") {
  check_against_golden("density --rho 0.5 --sigma 0.5 --n 3 --x 0 --y 0", "density.jsonl");
  check_against_golden("density --rho 0 --sigma 0 --n 2 --x 0 --y 0", "density_infinite.jsonl");
  check_against_golden("density --rho 0.5 --sigma 0.5 --n 4 --x 0.5 --y -0.25 --form specialized",
                       "density_specialized.jsonl");
  check_against_golden("cf --rho 0.5 --sigma 0.5 --n 1 --u 1 --v 1", "cf.jsonl");
  check_against_golden("cf --rho 0.5 --sigma 0.5 --n 2 --u 0.3 --v -0.4 --form reduced",
                       "cf_reduced.jsonl");
  check_against_golden("cf3 --rho 0.5 --sigma 0.5 --u 1 --v 0 --w 0", "cf3.jsonl");
  check_against_golden("prob --rho 0.5 --sigma 0.5 --n 3", "prob.jsonl");
  check_against_golden("marginal --rho 0 --n 1 --x 1", "marginal.jsonl");
  check_against_golden("invert --rho 0.5 --sigma 0.5 --n 3 --x 0.5 --y 0.25", "invert.jsonl");
  check_against_golden("simulate --rho 0.5 --sigma 0.5 --n 3 --reps 2000 --seed 42",
                       "simulate.jsonl");
  // the record echoes the --data path byte for byte: stage at the fixed
  // location the golden was generated with
  {
    std::ifstream src(golden("h0_sample.csv"), std::ios::binary);
    std::ofstream dst("/tmp/covpair_golden_h0.csv", std::ios::binary);
    dst << src.rdbuf();
  }
  check_against_golden("test --data /tmp/covpair_golden_h0.csv --sigma 0.5", "test.jsonl");
  std::remove("/tmp/covpair_golden_h0.csv");
}

TEST_CASE("records parse as JSON and echo the inputs") {
  const auto r = run_cli("prob --rho 0.5 --sigma 0.5 --n 2 --x0 0.25 --y0 -0.5");
  CHECK(r.exit_code == 0);
  const auto rec = nlohmann::json::parse(r.out);
  CHECK(rec.at("command") == "prob");
  CHECK(rec.at("schema_version") == "1");
  CHECK(rec.at("parameters").at("rho") == 0.5);
  CHECK(rec.at("parameters").at("sigma") == 0.5);
  CHECK(rec.at("parameters").at("n") == 2);
  CHECK(rec.at("parameters").at("x0") == 0.25);
  CHECK(rec.at("parameters").at("y0") == -0.5);
  CHECK(rec.at("parameters").at("abs_tol") == 1e-9);
  CHECK(rec.at("result").at("value").is_number());
  CHECK(rec.at("result").at("converged") == true);
}

TEST_CASE("exit code 2 on validation failures, stdout stays clean") {
  auto r = run_cli("density --rho 0.9 --sigma 0 --n 1 --x 0 --y 0");
  CHECK(r.exit_code == 2);
  CHECK(r.out.empty());
  // the human message lands on stderr and names the constraint
  r = run_cli("density --rho 0.9 --sigma 0 --n 1 --x 0 --y 0", /*keep_stderr=*/true);
  CHECK(r.out.find("1 - 2*rho^2 + sigma > 0") != std::string::npos);

  CHECK(run_cli("density --rho 0.5 --sigma 0.5 --n 7 --x 0 --y 0 --form specialized").exit_code ==
        2);
  CHECK(run_cli("density --bogus-flag 1").exit_code == 2);
  CHECK(run_cli("prob --rho 0.5 --sigma 0.5").exit_code == 2);  // missing --n
  CHECK(run_cli("test --data " + golden("h0_sample.csv") + " --sigma 1.5").exit_code == 2);
}

TEST_CASE("exit code 3 on I/O failures") {
  CHECK(run_cli("test --data /nonexistent/h0.csv --sigma 0.5").exit_code == 3);
  CHECK(run_cli("simulate --rho 0 --sigma 0 --n 1 --reps 10 --seed 1 --emit-samples "
                "/nonexistent_dir/out.csv")
            .exit_code == 3);
}

TEST_CASE("exit code 4 on non-convergence, best-effort record still emitted") {
  const auto r = run_cli("prob --rho 0.5 --sigma 0.5 --n 2 --max-subdiv 3");
  CHECK(r.exit_code == 4);
  const auto rec = nlohmann::json::parse(r.out);
  CHECK(rec.at("result").at("converged") == false);
  CHECK(rec.at("result").at("value").is_number());
}

TEST_CASE("help exits zero") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("density --help").exit_code == 0);
}

TEST_CASE("seed fully determines simulate output") {
  const std::string cmd = "simulate --rho 0.5 --sigma 0.5 --n 2 --reps 5000 --seed 7";
  const auto a = run_cli(cmd);
  const auto b = run_cli(cmd);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  const auto c = run_cli("simulate --rho 0.5 --sigma 0.5 --n 2 --reps 5000 --seed 8");
  CHECK(a.out != c.out);
}

TEST_CASE("emit-samples writes the documented CSV") {
  const std::string path = "/tmp/covpair_cli_samples.csv";
  std::remove(path.c_str());
  const auto r = run_cli("simulate --rho 0.5 --sigma 0.5 --n 2 --reps 41 --seed 3 --emit-samples " +
                         path);
  CHECK(r.exit_code == 0);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "g_ac,g_bc");
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 41);
  std::remove(path.c_str());
}

TEST_CASE("test subcommand estimates sigma when not supplied") {
  const auto r = run_cli("test --data " + golden("h0_sample.csv"));
  CHECK(r.exit_code == 0);
  const auto rec = nlohmann::json::parse(r.out);
  CHECK(rec.at("result").at("sigma_source") == "estimated");
  const double p = rec.at("result").at("p_value").get<double>();
  CHECK(p >= 0.0);
  CHECK(p <= 1.0);
}

TEST_CASE("malformed CSV is a validation failure") {
  const std::string path = "/tmp/covpair_cli_bad.csv";
  {
    std::ofstream out(path);
    out << "a,b,c\n1.0,2.0\n";
  }
  CHECK(run_cli("test --data " + path + " --sigma 0.5").exit_code == 2);
  {
    std::ofstream out(path);
    out << "x,y,z\n1.0,2.0,3.0\n";
  }
  CHECK(run_cli("test --data " + path + " --sigma 0.5").exit_code == 2);
  std::remove(path.c_str());
}
