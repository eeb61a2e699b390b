#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "singular_mcmc/model.hpp"
#include "singular_mcmc/sampler.hpp"
#include "singular_mcmc/theory.hpp"

namespace singular_mcmc::estimator {

//! One measured acceptance rate. coord is 0-based.
struct Measurement {
  double n = 0.0;
  double sigma = 0.0;
  int coord = 0;
  double U = 0.0;
  double stderr_u = 0.0;
};

//! Result of regressing log U + log sigma on [1, log n, log log n].
//! delta_lambda estimates lambda_i - lambda, delta_m estimates m_i - m.
struct ExponentFit {
  double delta_lambda = 0.0;
  double delta_m = 0.0;
  double intercept = 0.0;
  std::array<std::array<double, 3>, 3> covariance{};
  double residual_rms = 0.0;
};

//! Weighted least squares (weights 1/stderr^2 on log U; unit weights where
//! stderr is zero). The 1/sigma factor is imposed, not estimated: the
//! response is log U + log sigma, so rows may mix step sizes.
//! Requires >= 4 distinct n values, all > e, and a single shared coord.
ExponentFit fit_exponents(std::span<const Measurement> data);

//! Replica-assisted measurement of the average acceptance rate at one
//! (coord, sigma, n) cell: a geometric n-ladder up to the target n, mixing
//! proposals per rung from the constant-acceptance schedule, and the
//! measurement proposal on the top rung.
struct MeasureConfig {
  long sweeps = 1'000'000;
  long burn_in = -1;  // -1: 10% of sweeps
  long swap_interval = 10;
  double ladder_base = 1.0;
  double ladder_ratio = 10.0;
  std::vector<double> ladder;  // explicit rung n values (overrides geometric)
  std::uint64_t seed = 1;
};

struct CellRequest {
  int coord = 0;
  double sigma = 1.0;
};

//! Measure several (coord, sigma) cells at the same n in a single replica run.
std::vector<AcceptanceRecord> measure_cells(const TargetModel& model, const PoleSpectrum& spec,
                                            std::span<const CellRequest> cells,
                                            const MeasureConfig& config);

Measurement measure_U(const TargetModel& model, const PoleSpectrum& spec, int coord, double sigma,
                      const MeasureConfig& config);

//! Stochastic-approximation step-size tuning toward a target acceptance rate:
//! log sigma_{k+1} = log sigma_k + a_k (U_k - target), a_k = a0 / max(1, k-k0),
//! with per-iteration steps clamped to +-max_step in log sigma.
struct TuneConfig {
  int iterations = 200;
  long sweeps_per_iteration = 500;
  double a0 = 1.0;
  int k0 = 20;
  double max_step = 1.0;
  double sigma0 = 1.0;
  double sigma_min = 1e-8;
  double sigma_max = 1e8;
  double mixing_sigma = 1.0;  // step size for the non-tuned coordinates
  long warmup_sweeps = 5000;
  std::uint64_t seed = 1;
};

struct TuneResult {
  double sigma_star = 0.0;
  double achieved_U = 0.0;
  double stderr_u = 0.0;
  int iterations = 0;
};

TuneResult autotune_sigma(const TargetModel& model, int coord, double target_U,
                          const TuneConfig& config);

//! For each n in the grid, sets sigma from the coordinate's constant-
//! acceptance schedule and measures U. `measure` defaults to the sampler;
//! tests may substitute a closed-form evaluator for a noise-free dry run.
struct ScheduleRow {
  double n = 0.0;
  double sigma_scheduled = 0.0;
  double U = 0.0;
  double stderr_u = 0.0;
};

using MeasureFn = std::function<Measurement(const TargetModel&, const PoleSpectrum&, int coord,
                                            double sigma, const MeasureConfig&)>;

std::vector<ScheduleRow> schedule_verification(const TargetModel& model, const PoleSpectrum& spec,
                                               int coord, std::span<const double> n_grid,
                                               double A_const, const MeasureConfig& config,
                                               const MeasureFn& measure = measure_U);

}  // namespace singular_mcmc::estimator
