// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <string>

#include "doctest.h"
#include "lapa/io.hpp"

namespace {

struct CmdResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::string text;
  if (FILE* f = std::fopen(path.c_str(), "rb")) {
    char buffer[4096];
    std::size_t n;
    while ((n = std::fread(buffer, 1, sizeof(buffer), f)) > 0) text.append(buffer, n);
    std::fclose(f);
  }
  return text;
}

CmdResult run_cli(const std::string& args, const std::string& tag) {
  const std::string out_path = "cli_" + tag + ".out";
  const std::string err_path = "cli_" + tag + ".err";
  const std::string cmd =
      std::string(LAPA_CLI_PATH) + " " + args + " >" + out_path + " 2>" + err_path;
  const int status = std::system(cmd.c_str());
  CmdResult result;
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return result;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("version flag succeeds") {
  const auto r = run_cli("--version", "version");
  CHECK(r.code == 0);
  CHECK(r.out.find(lapa::version) != std::string::npos);
}

TEST_CASE("assign output is stable across identical invocations") {
  const auto a = run_cli("assign --random-users 20 --tau 10 --seed 7 --m 20", "stable_a");
  const auto b = run_cli("assign --random-users 20 --tau 10 --seed 7 --m 20", "stable_b");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(!a.out.empty());

  const auto parsed = lapa::assignment_from_json(lapa::Json::parse(a.out));
  CHECK(parsed.tau() == 10);
  CHECK(parsed.n_users() == 20);
}

TEST_CASE("tau equal to the user count produces singleton groups") {
  const auto r = run_cli("assign --random-users 5 --tau 5 --seed 3", "singleton");
  CHECK(r.code == 0);
  const auto parsed = lapa::assignment_from_json(lapa::Json::parse(r.out));
  for (const auto& group : parsed.groups()) CHECK(group.size() == 1);
}

TEST_CASE("crafted four-user drop reproduces the hand-traced pairing") {
  const double pi = std::numbers::pi;
  const lapa::UserDrop drop({{100.0, pi / 6.0, 3.0},
                             {200.0, 4.0, 3.0},
                             {800.0, std::asin(0.25), 3.0},
                             {900.0, 5.0 * pi / 6.0, 3.0}});
  lapa::write_text_file("cli_drop4.json", lapa::drop_to_json(drop).dump() + "\n");

  const auto r = run_cli(
      "assign --drop cli_drop4.json --tau 2 --m 8 --tmatrix cli_t.csv --report cli_rep.json",
      "crafted");
  CHECK(r.code == 0);
  const auto parsed = lapa::assignment_from_json(lapa::Json::parse(r.out));
  CHECK(parsed.groups()[0] == std::vector<int>{0, 2});
  CHECK(parsed.groups()[1] == std::vector<int>{1, 3});

  const std::string tmatrix = slurp("cli_t.csv");
  CHECK(tmatrix ==
        "pilot_1,pilot_2\n"
        "1,2\n"
        "3,4\n");

  const auto report = lapa::Json::parse(slurp("cli_rep.json"));
  CHECK(report["pairs"].size() == 4);  // two ordered pairs per two-user group
  CHECK(report["total"].get<double>() > 0.0);
  CHECK(report["total_db"].is_number());
  std::remove("cli_drop4.json");
  std::remove("cli_t.csv");
  std::remove("cli_rep.json");
}

TEST_CASE("malformed drop files fail with exit 3 naming the field") {
  lapa::write_text_file("cli_bad.json",
                        R"({"users": [{"r": 100, "theta": 0.1, "k_factor": 1},
                                      {"r": -5, "theta": 0.1, "k_factor": 1}]})");
  const auto r = run_cli("assign --drop cli_bad.json --tau 1", "badfield");
  CHECK(r.code == 3);
  CHECK(r.err.find("users[2].r") != std::string::npos);
  std::remove("cli_bad.json");

  const auto missing = run_cli("assign --drop cli_nonexistent.json --tau 1", "missing");
  CHECK(missing.code == 4);
}

TEST_CASE("oversized tau fails validation") {
  const auto r = run_cli("assign --random-users 4 --tau 9", "bigtau");
  CHECK(r.code == 3);
  CHECK(r.err.find("tau") != std::string::npos);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli("sweep", "nokind").code == 2);
  CHECK(run_cli("sweep --kind nonsense", "badkind").code == 2);
  CHECK(run_cli("frobnicate", "badsub").code == 2);
  CHECK(run_cli("assign --random-users 4", "notau").code == 2);  // --tau required
}

TEST_CASE("empty sweep lists are rejected with exit 3") {
  const auto r = run_cli("sweep --kind interference --m-sweep , --trials 2", "emptysweep");
  CHECK(r.code == 3);
  CHECK(r.err.find("m_sweep") != std::string::npos);
}

TEST_CASE("sweep output is byte-identical across thread counts and manifest reruns") {
  const std::string base =
      "sweep --kind interference --trials 16 --m-sweep 8,16 --seed 3 --n-users 8 --tau 4";
  CHECK(run_cli(base + " --threads 1 --out cli_s1.csv", "s1").code == 0);
  CHECK(run_cli(base + " --threads 2 --out cli_s2.csv", "s2").code == 0);
  const std::string csv1 = slurp("cli_s1.csv");
  CHECK(!csv1.empty());
  CHECK(csv1 == slurp("cli_s2.csv"));

  CHECK(run_cli("sweep --from-manifest cli_s1.csv.manifest.json --threads 2 --out cli_s3.csv",
                "s3")
            .code == 0);
  CHECK(csv1 == slurp("cli_s3.csv"));

  for (const char* f : {"cli_s1.csv", "cli_s2.csv", "cli_s3.csv", "cli_s1.csv.manifest.json",
                        "cli_s2.csv.manifest.json", "cli_s3.csv.manifest.json"})
    std::remove(f);
}

TEST_CASE("rate sweep with tau = T yields all-zero rates") {
  const auto r = run_cli(
      "sweep --kind rate --n-users 4 --tau 2 --coherence-t 2 --trials 2 --fades 2 "
      "--m-sweep 8 --out cli_zero.csv",
      "zerorate");
  CHECK(r.code == 0);
  const std::string csv = slurp("cli_zero.csv");
  CHECK(csv.find("location-aware,,,0,") != std::string::npos);
  CHECK(csv.find("random,,,0,") != std::string::npos);
  std::remove("cli_zero.csv");
  std::remove("cli_zero.csv.manifest.json");
}

TEST_CASE("kernel sweep prints the 0.04 peak and is bit-stable") {
  const auto a = run_cli("kernel --m 20 --points 401", "kern_a");
  const auto b = run_cli("kernel --m 20 --points 401", "kern_b");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("\n0,0.04\n") != std::string::npos);
  CHECK(run_cli("kernel --points 10", "kern_even").code == 3);
}

}  // TEST_SUITE
