#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

const std::string kCli = POSCTRL_CLI_PATH;
const std::string kDir = POSCTRL_SCENARIO_DIR;

struct CmdResult {
  int exit_code = -1;
  std::string out;  // stdout and stderr combined
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

CmdResult run(const std::string& args) {
  static int counter = 0;
  const std::string capture =
      "/tmp/posctrl_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++);
  const std::string cmd = kCli + " " + args + " >" + capture + " 2>&1";
  const int raw = std::system(cmd.c_str());
  CmdResult res;
  res.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  res.out = slurp(capture);
  std::remove(capture.c_str());
  return res;
}

std::string scn(const std::string& name) { return kDir + "/" + name; }

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run("--help").exit_code == 0);
  CHECK(run("").exit_code == 2);
  CHECK(run("frobnicate").exit_code == 2);
  CHECK(run("validate").exit_code == 2);  // missing scenario argument
  CHECK(run("validate " + scn("missing.scn")).exit_code == 2);
  CHECK(run("reproduce ex9").exit_code == 2);
}

TEST_CASE("validate separates holding from violated assumptions") {
  const CmdResult ok = run("validate " + scn("ex3.scn"));
  CHECK(ok.exit_code == 0);
  CHECK(ok.out.find("holds") != std::string::npos);

  const CmdResult bad = run("validate " + scn("ex1.scn"));
  CHECK(bad.exit_code == 1);
  CHECK(bad.out.find("violated") != std::string::npos);

  CHECK(run("validate --print-derived " + scn("ex3.scn")).exit_code == 0);
}

TEST_CASE("solve prices the game and flags divergence") {
  const CmdResult fin = run("solve " + scn("ex3.scn"));
  CHECK(fin.exit_code == 0);
  CHECK(fin.out.find("13.200180973157") != std::string::npos);

  // Exclusive flags are a usage error.
  CHECK(run("solve --horizon 5 --infinite " + scn("ex3.scn")).exit_code == 2);

  // The benchmark plant's fixed point diverges.
  const CmdResult div = run("solve --infinite " + scn("ex1.scn"));
  CHECK(div.exit_code == 1);
  CHECK(div.out.find("diverge") != std::string::npos);

  const CmdResult conv = run("solve --infinite " + scn("ex2.scn"));
  CHECK(conv.exit_code == 0);
  CHECK(conv.out.find("converged") != std::string::npos);
}

TEST_CASE("zeros reports the unstable stealthy direction") {
  const CmdResult z = run("zeros " + scn("ex1.scn"));
  CHECK(z.exit_code == 0);
  CHECK(z.out.find("1.0426") != std::string::npos);

  // Two attack channels against one output row: no isolated zeros.
  const CmdResult none = run("zeros " + scn("ex2.scn"));
  CHECK(none.exit_code == 1);
  CHECK(none.out.find("non-minimal") != std::string::npos);
}

TEST_CASE("attack subcommand builds both schedule kinds") {
  CHECK(run("attack --zero-dynamics " + scn("ex1.scn")).exit_code == 0);
  CHECK(run("attack --worst-case " + scn("ex3.scn")).exit_code == 0);
  CHECK(run("attack --zero-dynamics --worst-case " + scn("ex1.scn")).exit_code == 2);
}

TEST_CASE("margin sweep prints critical horizons") {
  const CmdResult sw = run("margin --alpha-sweep 1,5,15,25 " + scn("ex2.scn"));
  CHECK(sw.exit_code == 0);
  CHECK(sw.out.find("t* = 1,") != std::string::npos);
  CHECK(sw.out.find("t* = 11,") != std::string::npos);
  CHECK(sw.out.find("t* = none") != std::string::npos);

  const std::string out = "/tmp/posctrl_cli_sweep_" + std::to_string(::getpid()) + ".csv";
  CHECK(run("margin --alpha-sweep 1,25 --out " + out + " " + scn("ex2.scn")).exit_code == 0);
  const std::string csv = slurp(out);
  std::remove(out.c_str());
  CHECK(csv.rfind("idx,alpha1,alpha2,finite,t_star,full_horizon_margin\n", 0) == 0);
}

TEST_CASE("robust compares two scenarios that differ only in A") {
  const CmdResult ok = run("robust " + scn("ex3.scn") + " " + scn("ex3r.scn"));
  CHECK(ok.exit_code == 0);
  CHECK(ok.out.find("admissibility: yes") != std::string::npos);
  CHECK(ok.out.find("ch1: 46") != std::string::npos);

  // Structurally different plants are a usage error, not a finding.
  CHECK(run("robust " + scn("ex3.scn") + " " + scn("ex1.scn")).exit_code == 2);
}

TEST_CASE("simulate writes the pinned trajectory format deterministically") {
  const std::string out1 = "/tmp/posctrl_cli_sim1_" + std::to_string(::getpid()) + ".csv";
  const std::string out2 = "/tmp/posctrl_cli_sim2_" + std::to_string(::getpid()) + ".csv";
  const std::string cmd = "simulate --control static --attack none --out ";
  CHECK(run(cmd + out1 + " " + scn("ex2.scn")).exit_code == 0);
  CHECK(run(cmd + out2 + " " + scn("ex2.scn")).exit_code == 0);

  const std::string csv1 = slurp(out1);
  const std::string csv2 = slurp(out2);
  std::remove(out1.c_str());
  std::remove(out2.c_str());
  CHECK(csv1.rfind("t,x1,x2,u1,u2,u3,a1,a2,y1,stage_cost,cum_cost\n", 0) == 0);
  CHECK(csv1 == csv2);

  // The stealthy ray stays invisible and bounded over the scenario horizon.
  const CmdResult stealth = run("simulate --attack zero-dynamics " + scn("ex1.scn"));
  CHECK(stealth.exit_code == 0);
}

TEST_CASE("bundled pipelines reproduce end to end") {
  for (const std::string which : {"ex1", "ex2", "ex3"}) {
    const CmdResult rep = run("reproduce " + which);
    CAPTURE(which);
    CAPTURE(rep.out);
    CHECK(rep.exit_code == 0);
    CHECK(rep.out.find("PASS") != std::string::npos);
    CHECK(rep.out.find("FAIL") == std::string::npos);
  }
}
