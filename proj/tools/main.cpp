// Copyright 2026 The rkky Authors
// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <thread>

#include "commands.hpp"
#include "rkky/errors.hpp"

namespace {

int default_threads() {
  if (const char* env = std::getenv("RKKY_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

int report(int code, std::string_view kind, const std::string& message) {
  nlohmann::json err{{"error", kind}, {"message", message}};
  std::cerr << err.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace rkky::cli;
  CLI::App app{"Fermion-mediated interactions in trapped lattices"};
  app.set_version_flag("--version", RKKY_VERSION);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  int threads = default_threads();
  std::vector<std::string> overrides;

  const std::map<std::string, std::function<int(Context&)>> commands{
      {"spectrum", cmd_spectrum},       {"kernel", cmd_kernel},
      {"couplings", cmd_couplings},     {"scan-ratios", cmd_scan_ratios},
      {"chain", cmd_chain},             {"scan-phase", cmd_scan_phase},
      {"crossover", cmd_crossover},     {"kagome", cmd_kagome},
  };
  for (const auto& [name, fn] : commands) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "key = value recipe file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads (default $RKKY_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--set", overrides, "key=value override, repeatable");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  Context ctx;
  ctx.out = out_dir;
  ctx.threads = threads;
  try {
    for (auto* sub : app.get_subcommands()) ctx.command = sub->get_name();
    if (!config_path.empty()) ctx.config = rkky::Config::load(config_path);
    for (const auto& o : overrides) ctx.config.set(std::string_view(o));
    std::filesystem::create_directories(ctx.out);
    return commands.at(ctx.command)(ctx);
  } catch (const rkky::Error& e) {
    const int code = e.code() == rkky::ErrorCode::config_error ? 2 : 3;
    return report(code, rkky::to_string(e.code()), e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return report(2, "io_error", e.what());
  } catch (const std::exception& e) {
    return report(3, "internal_error", e.what());
  }
}
