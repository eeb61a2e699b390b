// Experiment driver for the singular-target Metropolis toolkit.
//
//   singular-mcmc <mode> --config cfg.json [--model ...] [--coord ...]
//                 [--n ...] [--sigma ...] [--seed ...] [--out ...]
//
// Modes: sample, theory, oracle, fit, tune, schedule, fig1, fig2, fig3.
// CLI flags override fields of the JSON config.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "singular_mcmc/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Metropolis acceptance-rate toolkit for singular target distributions"};
  app.require_subcommand(1);

  std::string config_path;
  std::string model, output, input;
  std::vector<int> coords;
  std::vector<double> n_values, sigma_values;
  long sweeps = -1;
  std::uint64_t seed = 0;
  bool seed_given = false;
  double target_u = -1.0, a_const = -1.0;

  const std::vector<std::string> modes = {"sample", "theory", "oracle",  "fit", "tune",
                                          "schedule", "fig1",  "fig2", "fig3"};
  for (const std::string& mode : modes) {
    CLI::App* sub = app.add_subcommand(mode);
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--model", model, "builtin model id (w2w2 | w2w4)");
    sub->add_option("--coord", coords, "coordinate index (1-based)");
    sub->add_option("--n", n_values, "scale constant grid");
    sub->add_option("--sigma", sigma_values, "step size grid");
    sub->add_option("--sweeps", sweeps, "sweeps per measurement run");
    sub->add_option("--seed", seed, "master RNG seed")->each([&](const std::string&) { seed_given = true; });
    sub->add_option("--out", output, "output file path");
    sub->add_option("--input", input, "input CSV (fit mode)");
    sub->add_option("--target-u", target_u, "target acceptance rate (tune mode)");
    sub->add_option("--a-const", a_const, "schedule constant A");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    namespace exp = singular_mcmc::experiment;
    exp::ExperimentConfig config =
        config_path.empty() ? exp::ExperimentConfig::from_json(nlohmann::json::object())
                            : exp::ExperimentConfig::load(config_path);
    config.mode = app.get_subcommands().front()->get_name();
    if (!model.empty()) config.model = model;
    if (!coords.empty()) config.coords = coords;
    if (!n_values.empty()) config.n_grid = n_values;
    if (!sigma_values.empty()) config.sigma_grid = sigma_values;
    if (sweeps > 0) config.sweeps = sweeps;
    if (seed_given) config.seed = seed;
    if (!output.empty()) config.output = output;
    if (!input.empty()) config.input = input;
    if (target_u > 0.0) config.target_u = target_u;
    if (a_const > 0.0) config.a_const = a_const;
    return exp::run(config);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "singular-mcmc: %s\n", e.what());
    return 1;
  }
}
