#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "singular_mcmc/estimator.hpp"

namespace singular_mcmc::experiment {

//! n-ladder used by replica-assisted measurement runs.
struct LadderSpec {
  std::string type = "geometric";  // "geometric" | "explicit"
  double base = 1.0;
  double ratio = 10.0;
  std::vector<double> values;
};

struct TuneSettings {
  int iterations = 200;
  long sweeps_per_iteration = 500;
  double a0 = 1.0;
  int k0 = 20;
  double sigma0 = 1.0;
};

//! A full experiment description; single JSON document, CLI flags override
//! individual fields. The seed is mandatory (no wall-clock default).
struct ExperimentConfig {
  std::string mode;                  // sample | theory | oracle | fit | tune | schedule | fig1 | fig2 | fig3
  std::string model = "w2w4";
  std::vector<int> coords = {1, 2};  // 1-based, matching the CSV schema
  std::vector<double> n_grid;        // defaults to 1e4..1e10, decade steps
  std::vector<double> sigma_grid;    // defaults to 10^{0.5k}, k = 0..8
  long sweeps = 1'000'000;
  long burn_in = -1;  // -1: 10% of sweeps
  long swap_interval = 10;
  LadderSpec ladder;
  std::optional<std::uint64_t> seed;
  std::string output = "results.csv";
  std::string input;        // measurement CSV for fit mode
  double target_u = 0.234;  // tune mode
  double a_const = 1.0;     // schedule / fig3
  TuneSettings tune;

  void validate() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  static ExperimentConfig load(const std::string& path);
};

//! One line of the results CSV (header:
//! model,coord,n,sigma,U,stderr,source,seed,sweeps). stderr is present iff
//! source == "mcmc"; coord is 1-based.
struct ResultRow {
  std::string model;
  int coord = 1;
  double n = 0.0;
  double sigma = 0.0;
  double U = 0.0;
  std::optional<double> stderr_u;
  std::string source;
  std::uint64_t seed = 0;
  long sweeps = 0;
};

std::string format_double(double x);  // shortest round-trip decimal

std::vector<estimator::Measurement> read_measurement_csv(const std::string& path, int coord_1based);

//! Executes the configured mode, writes the output file(s) and a run
//! manifest (<output>.manifest.json with a config echo and content hashes).
//! Returns 0 on success.
int run(const ExperimentConfig& config);

}  // namespace singular_mcmc::experiment
