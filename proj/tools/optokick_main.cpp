#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

#include "optokick/cli.hpp"
#include "optokick/constants.hpp"

namespace cli = optokick::cli;

int main(int argc, char** argv) {
  CLI::App app{"two-pulse single-photon optomechanical fringe simulator"};
  app.set_version_flag("--version", optokick::version_string);
  app.require_subcommand(1);

  std::string config, methods, out;
  std::uint64_t seed = 0;
  int theta_points = 0;
  bool optimize = false;

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config, "INI parameter file")->required();
  };
  auto add_sweep_flags = [&](CLI::App* sub) {
    sub->add_option("--methods", methods,
                    "comma-separated subset of exact,gaussian,doppler,lorentzian");
    sub->add_option("--out", out, "output directory (default from config)");
    sub->add_option("--seed", seed, "seed echoed into output metadata");
    sub->add_option("--theta-points", theta_points, "fringe grid size over one period");
  };

  auto* sweep = app.add_subcommand("sweep", "compute fringe curves and visibilities");
  add_config(sweep);
  add_sweep_flags(sweep);

  auto* visibility = app.add_subcommand("visibility", "visibility report with closed forms");
  add_config(visibility);
  add_sweep_flags(visibility);
  visibility->add_flag("--optimize-detuning", optimize,
                       "scan the probe detuning and compare with the closed-form optimum");

  auto* counts = app.add_subcommand("counts", "simulate a photon-counting campaign");
  add_config(counts);
  counts->add_option("--out", out, "output directory (default from config)");
  counts->add_option("--seed", seed, "counting RNG seed (overrides config)");

  auto* validate = app.add_subcommand("validate", "check the protocol assumptions");
  add_config(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::exit_bad_config;
  }

  CLI::App* sub = app.get_subcommands().front();
  cli::RunConfig cfg;
  try {
    cfg = cli::load_config(config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::exit_bad_config;
  }
  auto given = [&](const char* name) {
    const CLI::Option* o = sub->get_option_no_throw(name);
    return o != nullptr && o->count() > 0;
  };
  cli::Overrides ov;
  if (given("--methods")) ov.methods = methods;
  if (given("--out")) ov.out_dir = out;
  if (given("--seed")) ov.seed = seed;
  if (given("--theta-points")) ov.theta_points = theta_points;
  cli::apply_overrides(cfg, ov);

  if (sub == sweep) return cli::cmd_sweep(cfg);
  if (sub == visibility) return cli::cmd_visibility(cfg, optimize);
  if (sub == counts) return cli::cmd_counts(cfg);
  return cli::cmd_validate(cfg);
}
