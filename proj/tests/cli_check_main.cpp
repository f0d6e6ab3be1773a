// End-to-end checks of the wvsim binary: exit codes, schemas, reproducibility.
// argv[1] = path to the wvsim binary, argv[2] = scenario directory.

#include "wvsim/result.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

int g_failures = 0;

void check(bool ok, const std::string& what) {
  std::printf("%-4s %s\n", ok ? "ok" : "FAIL", what.c_str());
  if (!ok) ++g_failures;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct RunResult {
  int exit_code = -1;
  std::string stdout_text;
};

RunResult run_cmd(const std::string& bin, const std::string& args) {
  const std::string out = std::filesystem::temp_directory_path() / "wvsim_cli_out.txt";
  const std::string cmd = bin + " " + args + " > " + out + " 2> /dev/null";
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.stdout_text = read_file(out);
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: wvsim_cli_check <wvsim-binary> <scenario-dir>\n";
    return 1;
  }
  const std::string bin = argv[1];
  const std::string scenarios = argv[2];
  const std::string tmp = std::filesystem::temp_directory_path();

  {
    RunResult r = run_cmd(bin, "scenario list");
    check(r.exit_code == 0, "scenario list exits 0");
    for (const std::string name : {"mach_zehnder", "dark_port_mz", "nested", "cheshire_cat",
                                   "salih_single_outer"}) {
      check(r.stdout_text.find(name) != std::string::npos, "scenario list mentions " + name);
    }
  }
  {
    RunResult r = run_cmd(bin, "scenario show --scenario nested");
    check(r.exit_code == 0, "scenario show exits 0");
    check(r.stdout_text == read_file(scenarios + "/nested.wv"),
          "scenario show matches the shipped nested.wv");
  }
  {
    RunResult r = run_cmd(bin, "weakvalue --scenario nested --detector D2 --segment A");
    check(r.exit_code == 0, "weakvalue exits 0");
    wvsim::ResultEnvelope env = wvsim::parse_envelope(r.stdout_text, wvsim::Format::Json);
    const auto& p = std::get<wvsim::WeakValuePayload>(env.payload);
    check(std::abs(p.result.value - wvsim::Complex(1, 0)) < 1e-12, "weakvalue of A is 1");
    check(env.analysis == "weakvalue", "envelope carries the analysis kind");
  }
  {
    RunResult r = run_cmd(bin, "weakvalue --scenario " + scenarios +
                                   "/nested.wv --detector D2 --segments B,C --format csv");
    check(r.exit_code == 0, "weakvalue from a scenario file exits 0");
    check(r.stdout_text.find("value_re,value_im") != std::string::npos,
          "weakvalue csv header present");
  }
  {
    RunResult r = run_cmd(bin, "trace-map --scenario nested --detector D2 --format csv");
    check(r.exit_code == 0, "trace-map exits 0");
    check(r.stdout_text.find("segment,cut,wire") != std::string::npos, "trace-map csv header");
  }
  {
    RunResult r = run_cmd(bin,
                          "pointer-sweep --scenario nested --detector D2 --segment C "
                          "--sigma 1 --points 10 --format csv");
    check(r.exit_code == 0, "pointer-sweep exits 0");
    check(r.stdout_text.find(
              "lambda,mean_shift,first_order_mean_shift,residual_norm,success_probability") !=
              std::string::npos,
          "pointer-sweep csv header");
    int rows = 0;
    for (char ch : r.stdout_text) rows += ch == '\n';
    check(rows == 12, "pointer-sweep emits 10 rows plus header lines");
  }
  {
    const std::string args =
        "ensemble --scenario nested --detector D2 --segment A --lambda 0.01 --sigma 1 "
        "--n 20000 --seed 7";
    RunResult a = run_cmd(bin, args);
    RunResult b = run_cmd(bin, args);
    check(a.exit_code == 0, "ensemble exits 0");
    check(a.stdout_text == b.stdout_text, "seeded ensemble output is bit-reproducible");
    wvsim::ResultEnvelope env = wvsim::parse_envelope(a.stdout_text, wvsim::Format::Json);
    check(env.seed.has_value() && *env.seed == 7, "ensemble envelope records the seed");
    const auto& p = std::get<wvsim::EnsemblePayload>(env.payload);
    check(std::abs(p.estimate - 1.0) < 3 * p.stderr_est, "ensemble estimate brackets 1.0");
  }
  {
    RunResult r = run_cmd(bin, "fringe-sweep --points 25 --format csv");
    check(r.exit_code == 0, "fringe-sweep exits 0");
    check(r.stdout_text.find("theta_b,theta_c,D,V,leak,dv_sum") != std::string::npos,
          "fringe-sweep csv header");
  }
  {
    const std::string out = tmp + "/wvsim_out.json";
    std::remove(out.c_str());
    RunResult r = run_cmd(bin, "weakvalue --scenario nested --detector D2 --segment A --out " + out);
    check(r.exit_code == 0, "weakvalue --out exits 0");
    check(!read_file(out).empty(), "--out writes the envelope to the file");
  }
  {
    RunResult r = run_cmd(bin, "weakvalue --scenario nested --detector D2 --no-such-flag");
    check(r.exit_code == 2, "unknown flag exits 2");
  }
  {
    RunResult r = run_cmd(bin, "weakvalue --scenario /does/not/exist.wv --detector D2 --segment A");
    check(r.exit_code == 2, "missing scenario file exits 2");
  }
  {
    const std::string bad = tmp + "/bad.wv";
    std::ofstream f(bad);
    f << "version 1\nmode a\nbs a r=0.5\n";
    f.close();
    RunResult r = run_cmd(bin, "weakvalue --scenario " + bad + " --detector D2 --segment A");
    check(r.exit_code == 2, "parse error exits 2");
  }
  {
    // orthogonal postselection: identity circuit, postselect the empty port
    const std::string orth = tmp + "/orthogonal.wv";
    std::ofstream f(orth);
    f << "version 1\nmode a\nmode b\nidentity a\nsegment s 0 a\ndetector D b\ninput : |a>\n";
    f.close();
    RunResult r = run_cmd(bin, "weakvalue --scenario " + orth + " --detector D --segment s");
    check(r.exit_code == 3, "orthogonal postselection exits 3");
  }
  {
    RunResult r = run_cmd(bin, "weakvalue --scenario salih_single_outer --salih-m 4 "
                               "--mirrors on --detector D0 --segment bob2_in");
    check(r.exit_code == 0, "salih weakvalue with M=4 exits 0");
    wvsim::ResultEnvelope env = wvsim::parse_envelope(r.stdout_text, wvsim::Format::Json);
    const auto& p = std::get<wvsim::WeakValuePayload>(env.payload);
    check(std::abs(p.result.value) < 1e-10, "Bob segment weak value is zero");
  }

  std::printf("%s: %d failure(s)\n", g_failures == 0 ? "cli checks passed" : "cli checks FAILED",
              g_failures);
  return g_failures;
}
