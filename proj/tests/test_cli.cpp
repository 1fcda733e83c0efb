#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#ifndef CBS_CLI_BIN
#error "CBS_CLI_BIN must point at the command line binary"
#endif

#include <sys/wait.h>

namespace {

struct RunResult {
  int status = -1;
  std::string output;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const std::string capture = "cli_capture_" + std::to_string(counter++) + ".txt";
  const std::string cmd = std::string(CBS_CLI_BIN) + " " + args + " > " + capture + " 2>&1";
  const int raw = std::system(cmd.c_str());
  RunResult res;
  if (raw != -1 && WIFEXITED(raw)) res.status = WEXITSTATUS(raw);
  res.output = slurp(capture);
  std::remove(capture.c_str());
  return res;
}

int data_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("channel,", 0) == 0) continue;  // column header
    ++rows;
  }
  return rows;
}

const std::string kSchema =
    "channel,s,delta,theta,L1,L2_tot,C2_tot,I2_tot,L2_el,C2_el,alpha_tot,alpha_el,mode,kl";

}  // namespace

TEST_CASE("Help and error paths set the documented exit codes") {
  const auto help = run_cli("--help");
  REQUIRE(help.status == 0);
  REQUIRE(help.output.find("sweep") != std::string::npos);
  REQUIRE(help.output.find("verify") != std::string::npos);
  REQUIRE(help.output.find("dump") != std::string::npos);

  REQUIRE(run_cli("sweep --no-such-flag").status == 2);
  REQUIRE(run_cli("sweep --s-points 0").status == 2);
  REQUIRE(run_cli("sweep --preset fig9").status == 2);
  // Log grid starting at zero is unusable.
  REQUIRE(run_cli("sweep --s-min 0 --s-log --s-points 3 --nodes-angular 8").status == 2);
  // Unwritable output path.
  REQUIRE(run_cli("sweep --s-points 1 --nodes-angular 8 --out /no/such/dir/x.csv").status == 2);
}

TEST_CASE("Sweep output carries the schema header and grid") {
  const auto res = run_cli(
      "sweep --channel hparh --s-min 0.5 --s-max 2 --s-points 3 --nodes-angular 8 --out -");
  REQUIRE(res.status == 0);
  REQUIRE(res.output.find(kSchema + "\n") != std::string::npos);
  REQUIRE(res.output.find("hparh,") != std::string::npos);
  REQUIRE(res.output.find(",phase,") != std::string::npos);
  REQUIRE(data_rows(res.output) == 3);
}

TEST_CASE("Sweep output is deterministic and independent of the job count") {
  const std::string flags =
      "sweep --channel hperph --s-min 0.2 --s-max 5 --s-points 4 --s-log "
      "--delta 0.3 --nodes-angular 8 --out ";
  const auto a = run_cli(flags + "cli_a.csv --jobs 1");
  const auto b = run_cli(flags + "cli_b.csv --jobs 1");
  const auto c = run_cli(flags + "cli_c.csv --jobs 3");
  REQUIRE(a.status == 0);
  REQUIRE(b.status == 0);
  REQUIRE(c.status == 0);
  const std::string ra = slurp("cli_a.csv"), rb = slurp("cli_b.csv"), rc = slurp("cli_c.csv");
  REQUIRE(!ra.empty());
  REQUIRE(ra == rb);
  REQUIRE(ra == rc);
  std::remove("cli_a.csv");
  std::remove("cli_b.csv");
  std::remove("cli_c.csv");
}

TEST_CASE("Zero saturation rows report undefined enhancements") {
  const auto res = run_cli(
      "sweep --channel hperph --s-min 0 --s-max 0 --s-points 1 --nodes-angular 8 --out -");
  REQUIRE(res.status == 0);
  REQUIRE(res.output.find("nan") != std::string::npos);
}

TEST_CASE("Presets seed the grid and explicit flags override it") {
  const auto res = run_cli("sweep --preset fig2 --s-points 4 --nodes-angular 8 --out -");
  REQUIRE(res.status == 0);
  REQUIRE(data_rows(res.output) == 4);

  // fig3 scans several detunings for the preserved-helicity channel.
  const auto fig3 = run_cli("sweep --preset fig3 --s-points 2 --nodes-angular 8 --out -");
  REQUIRE(fig3.status == 0);
  REQUIRE(data_rows(fig3.output) == 2 * 4);
}

TEST_CASE("Verification battery is filterable by name") {
  const auto res = run_cli("verify --only truncation");
  REQUIRE(res.status == 0);
  REQUIRE(res.output.find("[PASS]") != std::string::npos);
  REQUIRE(res.output.find("1/1") != std::string::npos);

  REQUIRE(run_cli("verify --only no_such_check").status == 2);
}

TEST_CASE("Generator dump prints labeled matrix entries") {
  const auto res = run_cli(
      "dump --channel hparh --s 1 --delta 0.2 --costheta 0.3 --phi 0.5 --r12 12 --out -");
  REQUIRE(res.status == 0);
  REQUIRE(res.output.rfind("A ", 0) == 0);
  REQUIRE(res.output.find("\nV ") != std::string::npos);
  REQUIRE(res.output.find("\nj ") != std::string::npos);
}
