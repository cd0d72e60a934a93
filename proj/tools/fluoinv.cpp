#include <iostream>

#include <CLI11.hpp>

#include "fluoinv/cli/commands.hpp"
#include "fluoinv/cli/presets.hpp"

int main(int argc, char** argv) {
  using namespace fluoinv::cli;
  CLI::App app{"Reconstruct the absorption source of a fluorescence diffusion model from terminal point data."};
  app.require_subcommand(1);
  app.set_version_flag("--version", FLUOINV_VERSION);

  Options opts;
  std::string config, out = "out", preset;
  std::uint64_t seed = 0;
  int threads = 0;

  std::string presets;
  for (const auto& n : preset_names()) presets += (presets.empty() ? "" : ", ") + n;

  const std::vector<std::pair<std::string, std::string>> subs = {
      {"forward", "solve the forward problem, write g = u_m(T) and u_e(T)"},
      {"p1", "fit f and S f from noisy point data"},
      {"p2", "recover q with the fixed-point iteration"},
      {"rates", "Monte-Carlo convergence rates over an n ladder"},
      {"spectral", "Dirichlet and smoothing-pencil eigenvalue diagnostics"},
      {"verify", "property battery (positivity, monotonicity, energy, stability)"}};
  for (const auto& [name, help] : subs) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "base seed (u64), overrides the config");
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--threads", threads, "OpenMP threads for trial loops (0 = default)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--preset", preset, "built-in configuration: " + presets);
    sub->callback([&, name] { opts.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  auto* active = app.get_subcommands().front();
  if (active->count("--config")) opts.config = config;
  if (active->count("--seed")) opts.seed = seed;
  if (active->count("--preset")) opts.preset = preset;
  opts.out = out;
  opts.threads = threads;
  return run_command(opts, std::cout, std::cerr);
}
