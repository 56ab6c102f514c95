// Command-line front end. Run `gjnlab <subcommand> --config file.json`.

#include <cstdlib>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "gjn/app/commands.hpp"
#include "gjn/app/config.hpp"
#include "gjn/error.hpp"

int main(int argc, char** argv) {
  CLI::App cli{"Multiscale heavy-traffic experiments for generalized Jackson networks"};
  cli.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out_dir;
  gjn::app::CommandOptions options;

  for (const std::string& name : gjn::app::subcommands()) {
    CLI::App* sub = cli.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment config (JSON)")->envname("GJNLAB_CONFIG")->required();
    sub->add_option("--seed", seed, "master seed, overrides the config")->envname("GJNLAB_SEED");
    sub->add_option("--workers", workers, "worker threads")->envname("GJNLAB_WORKERS")->check(CLI::PositiveNumber);
    sub->add_option("--out", out_dir, "output directory")->envname("GJNLAB_OUT");
    sub->add_flag("--emit-plot-data", options.emit_plot_data, "write long-format CSVs for plotting")
        ->envname("GJNLAB_EMIT_PLOT_DATA");
  }

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string name = cli.get_subcommands().front()->get_name();
  try {
    const gjn::app::ExperimentConfig config = gjn::app::load_config(config_path, {seed, workers, out_dir});
    return gjn::app::run_command(name, config, options, std::cout);
  } catch (const gjn::Error& e) {
    std::cerr << "gjnlab " << name << ": " << e.what() << "\n";
    return gjn::app::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "gjnlab " << name << ": " << e.what() << "\n";
    return 3;
  }
}
