// stinsim command-line entry point.
//
//   stinsim run --preset fig6 [--set key=value]... [--seed N] [--trials N]
//               [--out DIR] [--parallel N]
//   stinsim run --config run.cfg ...
//   stinsim run --manifest results/manifest.json    # bit-exact rerun
//   stinsim config --preset fig3                    # print resolved config
//   stinsim presets
//
// Exit codes: 0 ok, 2 configuration error, 3 runtime error, 4 I/O error.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "stinsim/stinsim.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitIo = 4;

struct SourceOptions {
  std::string preset;
  std::string config_path;
  std::string manifest_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
};

void add_source_options(CLI::App* cmd, SourceOptions& opts) {
  auto* preset = cmd->add_option("--preset", opts.preset,
                                 "fig3_beamforming|fig4_pilots|fig6_mc_vs_sc|custom (or fig3/fig4/fig6)");
  auto* config = cmd->add_option("--config", opts.config_path, "key = value configuration file");
  auto* manifest = cmd->add_option("--manifest", opts.manifest_path, "rerun the config stored in a manifest");
  preset->excludes(config)->excludes(manifest);
  config->excludes(manifest);
  cmd->add_option("--set", opts.overrides, "override one key, e.g. ntn.altitude_km=600")
      ->allow_extra_args(false);
  cmd->add_option("--seed", opts.seed, "master seed");
  cmd->add_option("--trials", opts.trials, "Monte Carlo trials (per seed for fig4)");
}

stinsim::ExperimentConfig resolve_config(const SourceOptions& opts) {
  stinsim::ExperimentConfig base;
  if (!opts.manifest_path.empty()) {
    base = stinsim::config_from_manifest(opts.manifest_path);
  } else if (!opts.config_path.empty()) {
    base = stinsim::parse_config_file(opts.config_path);
  } else if (!opts.preset.empty()) {
    try {
      base = stinsim::preset(opts.preset);
    } catch (const stinsim::DomainError& e) {
      throw stinsim::ConfigError(e.what());
    }
  } else {
    throw stinsim::ConfigError("one of --preset, --config or --manifest is required");
  }
  std::vector<stinsim::KeyValue> kv;
  for (const auto& o : opts.overrides) kv.push_back(stinsim::parse_override(o));
  if (opts.seed) kv.emplace_back("run.seed", std::to_string(*opts.seed));
  if (opts.trials) kv.emplace_back("run.trials", std::to_string(*opts.trials));
  return stinsim::apply_overrides(std::move(base), kv);
}

std::string default_out_dir() {
  if (const char* env = std::getenv("STINSIM_OUT_DIR"); env && *env) return env;
  return "results";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo coverage simulator for multi-connectivity in satellite-terrestrial networks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(stinsim::kVersion));

  SourceOptions run_opts;
  std::string out_dir = default_out_dir();
  unsigned parallel = std::max(1u, std::thread::hardware_concurrency());
  auto* run = app.add_subcommand("run", "run an experiment and write CSV curves plus a manifest");
  add_source_options(run, run_opts);
  run->add_option("--out", out_dir, "output directory (default $STINSIM_OUT_DIR or ./results)");
  run->add_option("--parallel", parallel, "worker threads")->check(CLI::PositiveNumber);

  SourceOptions show_opts;
  auto* show = app.add_subcommand("config", "print the resolved configuration");
  add_source_options(show, show_opts);

  auto* presets = app.add_subcommand("presets", "list preset names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (presets->parsed()) {
      for (const char* name : {"fig3_beamforming", "fig4_pilots", "fig6_mc_vs_sc", "custom"}) {
        std::cout << name << "\n";
      }
      return 0;
    }
    if (show->parsed()) {
      std::cout << stinsim::write_config(resolve_config(show_opts));
      return 0;
    }

    const auto config = resolve_config(run_opts);
    const auto start = std::chrono::steady_clock::now();
    const auto result = stinsim::run_experiment(config, parallel);
    auto manifest = stinsim::make_manifest(config);
    manifest.runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto& path : stinsim::write_results(result, manifest, out_dir)) {
      std::cout << path.string() << "\n";
    }
    std::cerr << "completed " << stinsim::to_string(config.scenario) << " in " << manifest.runtime_s
              << " s\n";
    return 0;
  } catch (const stinsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const stinsim::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
