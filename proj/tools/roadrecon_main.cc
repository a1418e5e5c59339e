// Command-line front end: roadrecon <stage|all|print-config> [flags]

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "roadrecon/errors.h"
#include "roadrecon/pipeline/config.h"
#include "roadrecon/pipeline/pipeline.h"

namespace {

constexpr int kExitPipelineError = 1;
constexpr int kExitConfigError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Road map reconstruction toolkit"};
  std::string command;
  std::string config_path;
  uint64_t seed = 0;
  int workers = 0;
  std::string out_dir;
  std::string commands = "all print-config";
  for (auto s : roadrecon::AllStages()) commands += std::string(" ") + roadrecon::StageName(s);
  app.add_option("command", command, "Stage to run: " + commands)->required();
  app.add_option("--config", config_path, "JSON run configuration");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for all randomness");
  auto* workers_opt = app.add_option("--workers", workers, "Concurrent clips in reconstruct");
  auto* out_opt = app.add_option("--out", out_dir, "Run directory");
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  roadrecon::RunConfig config;
  try {
    if (!config_path.empty()) config = roadrecon::LoadRunConfig(config_path);
    if (seed_opt->count()) {
      config.seed = seed;
      config.scene.seed = seed;
    }
    if (workers_opt->count()) config.workers = workers;
    if (out_opt->count()) config.out_dir = out_dir;
    config.Validate();
    if (command != "all" && command != "print-config") roadrecon::ParseStage(command);
  } catch (const roadrecon::Error& e) {
    std::cerr << "error: " << e.name() << ": " << e.what() << "\n";
    return kExitConfigError;
  }
  if (command == "print-config") {
    std::cout << roadrecon::RunConfigToJson(config) << "\n";
    return 0;
  }

  try {
    for (const auto& r : roadrecon::RunCommand(command, config)) {
      std::printf("%-12s %8.3f s  %zu files  %s\n", roadrecon::StageName(r.stage), r.wall_time_s,
                  r.files.size(), r.directory.c_str());
    }
  } catch (const roadrecon::ConfigError& e) {
    std::cerr << "error: " << e.name() << ": " << e.what() << "\n";
    return kExitConfigError;
  } catch (const roadrecon::Error& e) {
    std::cerr << "error: " << e.name() << ": " << e.what() << "\n";
    return kExitPipelineError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPipelineError;
  }
  return 0;
}
