#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "semispec/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Semiclassical spectra of -h^2 Laplace + iV"};
  app.require_subcommand(1);

  semispec::CliRequest req;
  std::string config, out;
  unsigned threads = 0;
  long dense_cap = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "Experiment config file");
    sub->add_option("--out", out, "Output directory (overrides [output] dir)");
    sub->add_option("--threads", threads, "Worker threads, 0 = auto (fallback: SEMISPEC_THREADS)");
    sub->add_option("--dense-cap", dense_cap, "Largest N for dense eigen/exponential routines");
  };
  for (const char* name : {"spectrum", "sweep", "pseudo", "decay", "gl"}) {
    add_common(app.add_subcommand(name));
  }
  CLI::App* models = app.add_subcommand("models", "Model-operator checks");
  models->require_subcommand(1);
  add_common(models->add_subcommand("validate", "Discretized models against closed-form spectra"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << nlohmann::json{{"error", "config"}, {"type", "usage"}, {"message", e.what()}}.dump() << "\n";
    return semispec::exit_code(semispec::ErrorKind::Config);
  }

  CLI::App* sub = app.get_subcommands().front();
  req.command = sub->get_name();
  CLI::App* leaf = sub;
  if (req.command == "models") {
    leaf = sub->get_subcommands().front();
    req.subcommand = leaf->get_name();
  }
  if (leaf->count("--config")) req.config_path = config;
  if (leaf->count("--out")) req.out_dir = out;
  if (leaf->count("--threads")) req.threads = threads;
  if (leaf->count("--dense-cap")) req.dense_cap = dense_cap;
  return semispec::run_command(req, std::cout, std::cerr);
}
