// Drives the installed command-line binary as a subprocess and checks exit
// codes, console output, and the files it writes.  The binary path comes in
// through the DCTC_SIM_BINARY compile definition.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace {

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr combined
};

CommandResult run_cli(const std::string& args) {
  const std::string cmd = std::string(DCTC_SIM_BINARY) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string output;
  char buf[4096];
  while (std::size_t got = std::fread(buf, 1, sizeof(buf), pipe)) output.append(buf, got);
  const int status = pclose(pipe);
  CommandResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = std::move(output);
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream oss;
  oss << in.rdbuf();
  return oss.str();
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream iss(text);
  std::string line;
  while (std::getline(iss, line)) lines.push_back(line);
  return lines;
}

// Drop the trailing wall_time field of a results row; it is the one column
// that legitimately differs between identical runs.
std::string strip_last_field(const std::string& line) {
  const auto pos = line.find_last_of(',');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

}  // namespace

TEST_CASE("configuration errors exit with code 2", "[cli][errors]") {
  CHECK(run_cli("--no-such-flag").exit_code == 2);
  CHECK(run_cli("--command clone --d 3 --povm sic --n 100").exit_code == 2);
  CHECK(run_cli("--command frobnicate").exit_code == 2);
  CHECK(run_cli("--d 2").exit_code == 2);  // no command
  CHECK(run_cli("--command clone --mode sideways").exit_code == 2);
  const CommandResult missing_config = run_cli("--command clone --config /no/such/file.json");
  CHECK(missing_config.exit_code == 2);
  CHECK(missing_config.output.find("config") != std::string::npos);
}

TEST_CASE("dimension-cap violations exit with code 3", "[cli][errors]") {
  // Dense mode with seven clones requires a 4^15-dimensional circuit.
  const CommandResult r = run_cli("--command clone --mode dense --n 7 --seed 1");
  CHECK(r.exit_code == 3);
  CHECK(r.output.find("exceeds dense cap") != std::string::npos);
}

TEST_CASE("help exits cleanly", "[cli]") {
  const CommandResult r = run_cli("--help");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("--command") != std::string::npos);
}

TEST_CASE("validate runs the named checks and reports pass lines", "[cli][validate]") {
  const CommandResult r = run_cli("--command validate --smoke");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("[PASS] fixed-point-structure") != std::string::npos);
  CHECK(r.output.find("[PASS] tomography-round-trip") != std::string::npos);
  CHECK(r.output.find("[FAIL]") == std::string::npos);
  CHECK(r.output.find("all 10 checks passed") != std::string::npos);
}

TEST_CASE("an injected reconstruction fault is caught and exits with code 1",
          "[cli][validate]") {
  const CommandResult r = run_cli("--command validate --smoke --inject-frame-fault");
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("[FAIL] tomography-round-trip") != std::string::npos);
}

TEST_CASE("clone honors config files with explicit flags taking precedence", "[cli][config]") {
  const std::string config_path = "cli_test_config.json";
  {
    std::ofstream cfg(config_path);
    cfg << R"({"command": "clone", "d": 2, "n": [500], "seed": 9, "mode": "structured"})";
  }
  const CommandResult from_config = run_cli("--config " + config_path);
  CHECK(from_config.exit_code == 0);
  CHECK(from_config.output.find("N=500") != std::string::npos);

  const CommandResult overridden = run_cli("--config " + config_path + " --n 200");
  CHECK(overridden.exit_code == 0);
  CHECK(overridden.output.find("N=200") != std::string::npos);

  std::remove(config_path.c_str());
}

TEST_CASE("clone runs are reproducible and write one results row", "[cli][clone]") {
  const std::string out = "cli_test_clone.csv";
  const std::string args = "--command clone --n 400 --seed 31 --out " + out;
  const CommandResult a = run_cli(args);
  REQUIRE(a.exit_code == 0);
  const std::string first = slurp(out);
  const CommandResult b = run_cli(args);
  REQUIRE(b.exit_code == 0);
  const std::string second = slurp(out);

  const std::vector<std::string> lines_a = split_lines(first);
  const std::vector<std::string> lines_b = split_lines(second);
  REQUIRE(lines_a.size() == 2);  // header + one row
  CHECK(lines_a[0] ==
        "seed,d,N,povm,mode,fidelity,trace_distance,max_freq_error,wall_time");
  REQUIRE(lines_b.size() == 2);
  CHECK(strip_last_field(lines_a[1]) == strip_last_field(lines_b[1]));
  std::remove(out.c_str());
}

TEST_CASE("sweep writes rows, quantile summary, and an svg plot deterministically",
          "[cli][sweep]") {
  const std::string out_a = "cli_test_sweep_a.csv";
  const std::string out_b = "cli_test_sweep_b.csv";
  const std::string common = "--command sweep --n 50 --n 200 --trials 3 --seed 7 --out ";
  REQUIRE(run_cli(common + out_a).exit_code == 0);
  REQUIRE(run_cli(common + out_b).exit_code == 0);

  const std::vector<std::string> rows_a = split_lines(slurp(out_a));
  const std::vector<std::string> rows_b = split_lines(slurp(out_b));
  REQUIRE(rows_a.size() == 7);  // header + 2 sample counts x 3 trials
  for (std::size_t i = 0; i < rows_a.size(); ++i)
    CHECK(strip_last_field(rows_a[i]) == strip_last_field(rows_b[i]));

  const std::string summary = slurp("cli_test_sweep_a.summary.csv");
  CHECK(split_lines(summary).size() == 3);  // header + one row per sample count
  CHECK(summary.find("median_infidelity") != std::string::npos);

  const std::string svg = slurp("cli_test_sweep_a.svg");
  CHECK(svg.rfind("<svg", 0) == 0);

  for (const std::string stem : {out_a, out_b}) std::remove(stem.c_str());
  std::remove("cli_test_sweep_a.summary.csv");
  std::remove("cli_test_sweep_a.svg");
  std::remove("cli_test_sweep_b.summary.csv");
  std::remove("cli_test_sweep_b.svg");
}

TEST_CASE("fixed-point reports one residual per iteration", "[cli][fixed-point]") {
  const std::string out = "cli_test_residuals.csv";
  const CommandResult r =
      run_cli("--command fixed-point --d 2 --n 3 --seed 5 --out " + out);
  REQUIRE(r.exit_code == 0);
  CHECK(r.output.find("converged=yes") != std::string::npos);
  CHECK(r.output.find("iterations=3") != std::string::npos);
  CHECK(r.output.find("eigenvalue-1 multiplicity=1") != std::string::npos);

  const std::vector<std::string> lines = split_lines(slurp(out));
  REQUIRE(lines.size() == 4);  // header + one row per iteration
  CHECK(lines[0] == "iteration,residual");
  CHECK(lines[3].rfind("3,", 0) == 0);
  std::remove(out.c_str());
}

TEST_CASE("nonlinear prints the separation of the composed map", "[cli][nonlinear]") {
  const CommandResult r = run_cli("--command nonlinear --n 40000 --seed 11");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("input separation") != std::string::npos);
  CHECK(r.output.find("output separation") != std::string::npos);
  CHECK(run_cli("--command nonlinear --d 3 --povm random").exit_code == 2);
}

TEST_CASE("discriminate reports a success rate over its trials", "[cli][discriminate]") {
  const CommandResult r = run_cli("--command discriminate --n 20000 --trials 6 --seed 3");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("success rate=1") != std::string::npos);
  CHECK(r.output.find("(6/6)") != std::string::npos);
}
