#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#ifndef SUBHJ_CLI_PATH
#error "SUBHJ_CLI_PATH must point at the built binary"
#endif

using nlohmann::json;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::filesystem::path work_dir() {
  auto d = std::filesystem::temp_directory_path() / "subhj_cli_tests";
  std::filesystem::create_directories(d);
  return d;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) return {};
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

CliResult run_cli(const std::string& args) {
  auto out_file = work_dir() / "stdout.txt";
  auto err_file = work_dir() / "stderr.txt";
  std::string cmd = std::string(SUBHJ_CLI_PATH) + " " + args + " > " +
                    out_file.string() + " 2> " + err_file.string();
  const int raw = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  return r;
}

std::string write_config(const std::string& name, const json& j) {
  auto path = work_dir() / name;
  std::ofstream os(path);
  os << j.dump(2);
  return path.string();
}

std::string fresh_out(const std::string& name) {
  auto d = work_dir() / name;
  std::filesystem::remove_all(d);
  return d.string();
}

json solve_config() {
  return json{
      {"group", {{"kind", "abelian"}, {"n", 2}}},
      {"domain", {{"lo", {0.0, 0.0}}, {"hi", {1.0, 1.0}}}},
      {"hamiltonian",
       {{"alpha", 1.25},
        {"pieces", {{{"zset", {{"kind", "ball"}, {"r", 1.0}}}}}},
        {"extension", {{"margin", {0.25, 0.25}}}}}},
      {"grid", {{"spacing", 0.125}, {"stencil_directions", 8}}},
      {"task", "solve"},
      {"seed", 5},
      {"solve", {{"g", "0"}}},
  };
}

json manifest_of(const std::string& out_dir) {
  auto text = slurp(std::filesystem::path(out_dir) / "manifest.json");
  REQUIRE_FALSE(text.empty());
  return json::parse(text);
}

}  // namespace

TEST_CASE("the binary reports a version and insists on a subcommand") {
  CHECK(run_cli("--version").code == 0);
  CHECK(run_cli("").code != 0);
  CHECK(run_cli("solve").code != 0);  // --config is required
}

TEST_CASE("a successful solve leaves outputs and a manifest behind") {
  auto out = fresh_out("ok");
  auto cfg = write_config("ok.json", solve_config());
  auto r = run_cli("solve -c " + cfg + " -o " + out);

  CHECK(r.code == 0);
  CHECK(r.out.rfind("subhj solve: ok", 0) == 0);
  CHECK(r.out.find("w.csv") != std::string::npos);

  auto m = manifest_of(out);
  CHECK(m["status"] == "ok");
  CHECK(m["task"] == "solve");
  CHECK(m["produced_files"] == json::array({"w.csv", "bcc.json"}));
  CHECK(m["validation"]["ok"] == true);
  CHECK(m["config_hash"].get<std::string>().size() == 16);
  CHECK(m["seed"] == 5);
  CHECK(m["summary"]["status"] == "ok");
  CHECK(m.contains("timestamp"));
  for (const auto& f : m["produced_files"])
    CHECK(std::filesystem::exists(std::filesystem::path(out) / f.get<std::string>()));
}

TEST_CASE("broken configuration files exit with code two and a manifest") {
  auto out = fresh_out("broken");
  auto path = work_dir() / "broken.json";
  {
    std::ofstream os(path);
    os << "{ nope";
  }
  auto r = run_cli("solve -c " + path.string() + " -o " + out);
  CHECK(r.code == 2);
  CHECK(r.err.find("parse error") != std::string::npos);
  auto m = manifest_of(out);
  CHECK(m["status"] == "config_error");
  CHECK(m["config_hash"].is_null());
}

TEST_CASE("the config task must match the chosen subcommand") {
  auto out = fresh_out("mismatch");
  auto cfg = write_config("mismatch.json", solve_config());
  auto r = run_cli("distance -c " + cfg + " -o " + out);
  CHECK(r.code == 2);
  CHECK(r.err.find("does not match") != std::string::npos);
  CHECK(manifest_of(out)["status"] == "config_error");
}

TEST_CASE("a geometry that breaks its own bounds stops before the task") {
  auto j = solve_config();
  j["hamiltonian"]["alpha"] = 1.2;
  j["hamiltonian"]["pieces"] = {{{"zset", {{"kind", "ball"}, {"r", 2.0}}}}};
  auto out = fresh_out("invalid");
  auto cfg = write_config("invalid.json", j);
  auto r = run_cli("solve -c " + cfg + " -o " + out);

  CHECK(r.code == 3);
  auto m = manifest_of(out);
  CHECK(m["status"] == "validation_failed");
  CHECK(m["validation"]["ok"] == false);
  auto reason = m["failure_reason"].get<std::string>();
  CHECK(reason.find("sandwich") != std::string::npos);
}

TEST_CASE("task failures exit with code one and record their reason") {
  auto j = solve_config();
  j["task"] = "distance";
  j.erase("solve");
  j["domain"]["interior"] = "x1 < 0.4 || x1 > 0.6";
  j["distance"] = {{"source", {0.25, 0.5}}, {"targets", {{0.75, 0.5}}}};
  auto out = fresh_out("unreachable");
  auto cfg = write_config("unreachable.json", j);
  auto r = run_cli("distance -c " + cfg + " -o " + out);

  CHECK(r.code == 1);
  auto m = manifest_of(out);
  CHECK(m["status"] == "task_failed");
  CHECK(m["failure_reason"] == "distance: a target is unreachable");
}

TEST_CASE("identical runs produce identical outputs up to the timestamp") {
  auto cfg = write_config("det.json", solve_config());
  auto out1 = fresh_out("det1");
  auto out2 = fresh_out("det2");
  REQUIRE(run_cli("solve -c " + cfg + " -o " + out1).code == 0);
  REQUIRE(run_cli("solve -c " + cfg + " -o " + out2).code == 0);

  CHECK(slurp(out1 + "/w.csv") == slurp(out2 + "/w.csv"));
  CHECK(slurp(out1 + "/bcc.json") == slurp(out2 + "/bcc.json"));
  auto m1 = manifest_of(out1);
  auto m2 = manifest_of(out2);
  m1.erase("timestamp");
  m2.erase("timestamp");
  CHECK(m1 == m2);
}

TEST_CASE("command line overrides replace the config's seed and spacing") {
  auto j = solve_config();
  j["task"] = "verify";
  j.erase("solve");
  j["grid"]["spacing"] = 0.0625;
  j["verify"] = {{"g", "0"}, {"radii", {0.125, 0.0625}}, {"probe_count", 4}};
  auto cfg = write_config("seeded.json", j);

  auto out1 = fresh_out("seed1");
  auto out2 = fresh_out("seed2");
  auto out3 = fresh_out("seed3");
  REQUIRE(run_cli("verify -c " + cfg + " -o " + out1 + " --seed 11").code == 0);
  REQUIRE(run_cli("verify -c " + cfg + " -o " + out2 + " --seed 11").code == 0);
  REQUIRE(run_cli("verify -c " + cfg + " -o " + out3 + " --seed 12").code == 0);

  CHECK(manifest_of(out1)["seed"] == 11);
  CHECK(slurp(out1 + "/verify.json") == slurp(out2 + "/verify.json"));
  CHECK(slurp(out1 + "/verify.json") != slurp(out3 + "/verify.json"));

  auto coarse = fresh_out("coarse");
  auto scfg = write_config("coarse.json", solve_config());
  REQUIRE(run_cli("solve -c " + scfg + " -o " + coarse + " --spacing 0.25").code == 0);
  auto fine = fresh_out("fine");
  REQUIRE(run_cli("solve -c " + scfg + " -o " + fine).code == 0);
  auto count_lines = [](const std::string& text) {
    return std::count(text.begin(), text.end(), '\n');
  };
  CHECK(count_lines(slurp(coarse + "/w.csv")) < count_lines(slurp(fine + "/w.csv")));
}
