#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "loopgrating/error.hpp"
#include "loopgrating/sweep/runner.hpp"

namespace lg = loopgrating;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

unsigned resolve_threads(int cli_threads) {
  if (cli_threads >= 0) return static_cast<unsigned>(cli_threads);
  if (const char* env = std::getenv("LOOPGRATING_THREADS"); env && *env) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(env, &used);
      if (used == std::string(env).size() && v >= 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    throw lg::Error(lg::ErrorCode::OutOfRange, "LOOPGRATING_THREADS must be a non-negative integer");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Loop-phase controlled non-Hermitian atomic grating simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", lg::sweep::kToolVersion);

  std::string config_path;
  std::string out_dir;
  int threads = -1;

  auto* run = app.add_subcommand("run", "Run the scenario described by a config file");
  run->add_option("config", config_path, "Config file (key = value)")->required();
  run->add_option("--out", out_dir, "Output directory (overrides output.dir)");
  run->add_option("--threads", threads, "Worker threads (0 = all cores; env LOOPGRATING_THREADS)")
      ->check(CLI::NonNegativeNumber);

  auto* list = app.add_subcommand("list", "List the available scenarios");
  bool show_keys = false;
  list->add_flag("--keys", show_keys, "Also list every config key with its default");

  auto* validate = app.add_subcommand("validate", "Parse and validate a config file, print the resolved values");
  validate->add_option("config", config_path, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*list) {
      for (const auto& s : lg::sweep::list_scenarios())
        std::cout << s.name << "\tFig. " << s.figure << "\t" << s.description << "\n";
      if (show_keys) {
        std::cout << "\n";
        for (const auto& k : lg::sweep::config_keys()) std::cout << k << "\n";
      }
      return 0;
    }
    const auto cfg = lg::sweep::load_config(config_path);
    if (*validate) {
      for (const auto& [k, v] : cfg.resolved()) std::cout << k << " = " << v << "\n";
      return 0;
    }
    const lg::Parallel par{resolve_threads(threads)};
    const auto manifest = lg::sweep::run_scenario(cfg, out_dir.empty() ? cfg.output_dir : out_dir, par);
    std::cout << "scenario " << manifest.scenario << ": wrote " << manifest.files.size() << " files to "
              << (out_dir.empty() ? cfg.output_dir : out_dir) << "\n";
    return 0;
  } catch (const lg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lg::is_config_error(e.code()) ? kExitConfig : kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
