#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "subhj/config.hpp"
#include "subhj/tasks.hpp"
#include "subhj/version.hpp"

namespace {

using nlohmann::json;

int thread_cap() {
  const char* env = std::getenv("SUBHJ_THREADS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return n >= 1 ? n : 1;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const std::string& out_dir, const json& body) {
  std::filesystem::create_directories(out_dir);
  json m = body;
  m["timestamp"] = utc_now();
  subhj::write_json((std::filesystem::path(out_dir) / "manifest.json").string(), m);
}

struct CliArgs {
  std::string config_path;
  std::string out_override;
  std::int64_t seed_override = -1;
  double spacing_override = 0.0;
  int directions_override = 0;
};

int run(const std::string& task, const CliArgs& args) {
  json manifest = {{"version", subhj::kVersion},
                   {"task", task},
                   {"threads", thread_cap()},
                   {"config_hash", nullptr},
                   {"produced_files", json::array()}};
  std::string out_dir = args.out_override.empty() ? "." : args.out_override;

  subhj::RunConfig rc;
  try {
    json j = subhj::load_config_file(args.config_path);
    if (!j.contains("task"))
      j["task"] = task;
    else if (j.at("task").get<std::string>() != task)
      throw subhj::ConfigError("config: task \"" + j.at("task").get<std::string>() +
                               "\" does not match the " + task + " subcommand");
    rc = subhj::parse_config(j);
    if (!args.out_override.empty()) rc.out_dir = args.out_override;
    if (args.seed_override >= 0) rc.seed = static_cast<std::uint64_t>(args.seed_override);
    if (args.spacing_override > 0.0) rc.grid.spacing = args.spacing_override;
    if (args.directions_override > 0) rc.grid.directions = args.directions_override;
    out_dir = rc.out_dir;
    manifest["config_hash"] = rc.config_hash;
    manifest["seed"] = rc.seed;
  } catch (const std::exception& e) {
    manifest["status"] = "config_error";
    manifest["failure_reason"] = e.what();
    write_manifest(out_dir, manifest);
    std::fprintf(stderr, "subhj: %s\n", e.what());
    return 2;
  }

  const auto validation = subhj::validate_config(rc);
  manifest["validation"] = {{"ok", validation.ok},
                            {"samples", validation.samples},
                            {"directions", validation.directions},
                            {"issues", validation.issues.size()}};
  if (!validation.ok) {
    const auto& worst = validation.issues.front();
    manifest["status"] = "validation_failed";
    manifest["failure_reason"] =
        "hamiltonian violates its sandwich bounds (" + worst.kind + ")";
    write_manifest(out_dir, manifest);
    std::fprintf(stderr, "subhj: hamiltonian fails validation at %zu sample(s)\n",
                 validation.issues.size());
    return 3;
  }

  try {
    const auto outcome = subhj::run_task(rc);
    manifest["produced_files"] = outcome.files;
    manifest["summary"] = outcome.summary;
    manifest["status"] = outcome.status == 0 ? "ok" : "task_failed";
    if (outcome.status != 0) manifest["failure_reason"] = outcome.failure;
    write_manifest(out_dir, manifest);
    if (outcome.status == 0) {
      std::printf("subhj %s: ok", task.c_str());
      for (const auto& f : outcome.files) std::printf(" %s", f.c_str());
      std::printf("\n");
    } else {
      std::fprintf(stderr, "subhj %s: %s\n", task.c_str(), outcome.failure.c_str());
    }
    return outcome.status;
  } catch (const std::exception& e) {
    manifest["status"] = "task_failed";
    manifest["failure_reason"] = e.what();
    write_manifest(out_dir, manifest);
    std::fprintf(stderr, "subhj %s: %s\n", task.c_str(), e.what());
    return 1;
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"distances and Dirichlet solutions for discontinuous Hamiltonians "
               "on Carnot groups"};
  app.set_version_flag("--version", std::string(subhj::kVersion));
  app.require_subcommand(1);

  CliArgs args;
  std::string picked;
  for (const char* name :
       {"distance", "solve", "verify", "compare", "stability", "probe"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("-c,--config", args.config_path, "run configuration (JSON)")
        ->required();
    sub->add_option("-o,--out", args.out_override, "output directory override");
    sub->add_option("--seed", args.seed_override, "seed override");
    sub->add_option("--spacing", args.spacing_override, "grid spacing override");
    sub->add_option("--directions", args.directions_override,
                    "stencil direction count override");
    sub->callback([&picked, name] { picked = name; });
  }

  CLI11_PARSE(app, argc, argv);
  return run(picked, args);
}
