// ergo command-line driver: batch experiments over weights, operators and
// transfer comparisons, emitting JSON/CSV reports.
//
// Exit codes: 0 success, 1 failed transfer comparison, 2 config error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "ergo/config.hpp"
#include "ergo/runner.hpp"

namespace {

int run_with_config(const std::string& command, const std::string& config_path,
                    const std::string& out_dir,
                    std::optional<int> threads_override,
                    std::optional<std::uint64_t> seed_override) {
  ergo::ExperimentConfig cfg;
  try {
    cfg = ergo::load_config(config_path);
  } catch (const ergo::ConfigParseError& e) {
    for (const auto& err : e.errors) std::cerr << err.to_string() << "\n";
    return 2;
  }
  if (threads_override) cfg.threads = *threads_override;
  if (seed_override) cfg.seed = *seed_override;

  ergo::RunResult result;
  try {
    if (command == "check-weight")
      result = ergo::run_check_weight(cfg);
    else if (command == "apply")
      result = ergo::run_apply(cfg);
    else if (command == "verify")
      result = ergo::run_verify(cfg);
    else
      result = ergo::run_sweep(cfg);
  } catch (const ergo::ConfigParseError& e) {
    for (const auto& err : e.errors) std::cerr << err.to_string() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << config_path << ": 0: " << e.what() << "\n";
    return 2;
  }

  std::cout << result.text;
  auto emit = [&](const std::string& rel, const std::string& body) -> bool {
    if (rel.empty()) return true;
    std::filesystem::path path(rel);
    if (!out_dir.empty() && path.is_relative())
      path = std::filesystem::path(out_dir) / path;
    if (path.has_parent_path()) {
      std::error_code ec;
      std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      std::cerr << path.string() << ": 0: cannot open for writing\n";
      return false;
    }
    out << body;
    return true;
  };
  if (!emit(cfg.out_json, result.json_text)) return 2;
  if (!emit(cfg.out_csv, result.csv_text)) return 2;
  return result.comparisons_failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weighted transfer-principle toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config file")
        ->required();
    sub->add_option("--out", out_dir, "directory for report files");
    sub->add_option("--threads", threads, "worker threads (overrides config)");
    sub->add_option("--seed", seed, "seed (overrides config)");
  };

  add_common(app.add_subcommand(
      "check-weight", "A_p / A_1 / A_infinity constants of the weight"));
  add_common(app.add_subcommand(
      "apply", "evaluate the configured operator, write point,value CSV"));
  add_common(app.add_subcommand(
      "verify", "estimate inequality constants and run comparisons"));
  add_common(
      app.add_subcommand("sweep", "strong constants across truncation values"));

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();
  return run_with_config(command, config_path, out_dir, threads, seed);
}
