#include "singular_mcmc/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include "singular_mcmc/rng.hpp"

namespace singular_mcmc::estimator {

namespace {

using theory::ScheduleCase;

std::array<std::array<double, 3>, 3> invert3(const std::array<std::array<double, 3>, 3>& a) {
  auto cof = [&](int r0, int r1, int c0, int c1) {
    return a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0];
  };
  double det = a[0][0] * cof(1, 2, 1, 2) - a[0][1] * cof(1, 2, 0, 2) + a[0][2] * cof(1, 2, 0, 1);
  if (!(std::abs(det) > 1e-300)) throw std::runtime_error("fit_exponents: rank-deficient design matrix");
  std::array<std::array<double, 3>, 3> inv;
  inv[0][0] = cof(1, 2, 1, 2) / det;
  inv[0][1] = -cof(0, 2, 1, 2) / det;
  inv[0][2] = cof(0, 1, 1, 2) / det;
  inv[1][0] = -cof(1, 2, 0, 2) / det;
  inv[1][1] = cof(0, 2, 0, 2) / det;
  inv[1][2] = -cof(0, 1, 0, 2) / det;
  inv[2][0] = cof(1, 2, 0, 1) / det;
  inv[2][1] = -cof(0, 2, 0, 1) / det;
  inv[2][2] = cof(0, 1, 0, 1) / det;
  return inv;
}

//! Mixing step sizes per rung: the coordinate's constant-acceptance schedule
//! with A = 1, clamped. Rungs at n <= e (where the log-corrected schedules
//! are undefined) just use 4*sqrt(2).
std::vector<ProposalSpec> mixing_proposals(const PoleSpectrum& spec, double n_rung) {
  std::vector<ProposalSpec> props;
  for (int c = 0; c < static_cast<int>(spec.per_coord.size()); ++c) {
    double sigma = theory::kFourSqrtTwo;
    if (n_rung > std::numbers::e) {
      ScheduleCase sched = theory::classify_case(spec, c);
      sigma = theory::schedule_sigma(sched, spec, c, n_rung, 1.0);
    }
    props.push_back({c, std::clamp(sigma, 1e-8, 1e8)});
  }
  return props;
}

std::vector<double> geometric_ladder(double base, double ratio, double top) {
  if (!(base > 0.0) || !(ratio > 1.0)) throw std::invalid_argument("measure: bad ladder spec");
  std::vector<double> rungs{base};
  while (rungs.back() * ratio < top * 0.999) rungs.push_back(rungs.back() * ratio);
  if (rungs.back() < top * 0.999)
    rungs.push_back(top);
  else
    rungs.back() = top;
  return rungs;
}

}  // namespace

ExponentFit fit_exponents(std::span<const Measurement> data) {
  if (data.empty()) throw std::invalid_argument("fit_exponents: empty measurement set");
  std::set<double> distinct_n;
  int coord = data.front().coord;
  for (const Measurement& m : data) {
    if (m.coord != coord) throw std::invalid_argument("fit_exponents: all rows must share a coord");
    if (!(m.n > std::numbers::e)) throw std::invalid_argument("fit_exponents: all n must exceed e");
    if (!(m.U > 0.0)) throw std::invalid_argument("fit_exponents: U must be positive");
    if (!(m.sigma > 0.0)) throw std::invalid_argument("fit_exponents: sigma must be positive");
    distinct_n.insert(m.n);
  }
  if (distinct_n.size() < 4)
    throw std::invalid_argument("fit_exponents: need >= 4 distinct n values, got " +
                                std::to_string(distinct_n.size()));

  std::array<std::array<double, 3>, 3> xtx{};
  std::array<double, 3> xty{};
  for (const Measurement& m : data) {
    double logn = std::log(m.n);
    std::array<double, 3> x{1.0, logn, std::log(logn)};
    double y = std::log(m.U) + std::log(m.sigma);
    double se = m.stderr_u > 0.0 ? m.stderr_u / m.U : 1.0;  // stderr of log U
    double w = 1.0 / (se * se);
    for (int i = 0; i < 3; ++i) {
      xty[i] += w * x[i] * y;
      for (int j = 0; j < 3; ++j) xtx[i][j] += w * x[i] * x[j];
    }
  }
  auto cov = invert3(xtx);
  std::array<double, 3> beta{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) beta[i] += cov[i][j] * xty[j];

  ExponentFit fit;
  fit.intercept = beta[0];
  fit.delta_lambda = -beta[1];
  fit.delta_m = beta[2];
  fit.covariance = cov;
  double ss = 0.0;
  for (const Measurement& m : data) {
    double logn = std::log(m.n);
    double pred = beta[0] + beta[1] * logn + beta[2] * std::log(logn);
    double r = std::log(m.U) + std::log(m.sigma) - pred;
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / static_cast<double>(data.size()));
  return fit;
}

std::vector<AcceptanceRecord> measure_cells(const TargetModel& model, const PoleSpectrum& spec,
                                            std::span<const CellRequest> cells,
                                            const MeasureConfig& config) {
  if (cells.empty()) throw std::invalid_argument("measure_cells: no cells requested");
  spec.validate();

  std::vector<double> rungs = config.ladder;
  if (rungs.empty()) rungs = geometric_ladder(config.ladder_base, config.ladder_ratio, model.n());
  if (rungs.size() < 2) rungs.insert(rungs.begin(), rungs.front() * 0.1);

  ReplicaLadderConfig ladder;
  ladder.n_values = rungs;
  ladder.swap_interval = config.swap_interval;
  for (double n_rung : rungs) ladder.proposals.push_back(mixing_proposals(spec, n_rung));
  std::size_t n_mixing = ladder.proposals.back().size();
  for (const CellRequest& cell : cells) ladder.proposals.back().push_back({cell.coord, cell.sigma});

  long burn_in = config.burn_in >= 0 ? config.burn_in : config.sweeps / 10;
  ReplicaResult run = replica_exchange_run(model, ladder, config.sweeps, burn_in, config.seed);

  const std::vector<AcceptanceRecord>& top = run.records.back();
  return {top.begin() + static_cast<long>(n_mixing), top.end()};
}

Measurement measure_U(const TargetModel& model, const PoleSpectrum& spec, int coord, double sigma,
                      const MeasureConfig& config) {
  CellRequest cell{coord, sigma};
  AcceptanceRecord rec = measure_cells(model, spec, {&cell, 1}, config).front();
  return Measurement{model.n(), sigma, coord, rec.mean_u, rec.stderr_u};
}

TuneResult autotune_sigma(const TargetModel& model, int coord, double target_U,
                          const TuneConfig& config) {
  if (!(target_U > 0.0 && target_U < 1.0))
    throw std::invalid_argument("autotune_sigma: target_U must lie in (0, 1)");
  if (coord < 0 || coord >= model.dim()) throw std::invalid_argument("autotune_sigma: coord out of range");

  std::mt19937_64 rng = make_stream(config.seed, 0);
  ChainState state = ChainState::make(model, model.sample_prior(rng));

  // Mixing moves on every coordinate (including the tuned one) keep the
  // chain moving even while the tuned step size sits in a low-acceptance
  // regime; they do not bias the u-value estimate.
  std::vector<ProposalSpec> mixing;
  for (int c = 0; c < model.dim(); ++c) mixing.push_back({c, config.mixing_sigma});

  ProposalSpec tuned{coord, config.sigma0};
  for (long t = 0; t < config.warmup_sweeps; ++t) {
    for (const ProposalSpec& p : mixing) metropolis_step(model, state, p, rng);
    metropolis_step(model, state, tuned, rng);
  }

  double log_sigma = std::log(config.sigma0);
  double u_hat = 0.0;
  int bound_hits = 0;
  for (int k = 0; k < config.iterations; ++k) {
    tuned.sigma = std::exp(log_sigma);
    double sum_u = 0.0;
    for (long t = 0; t < config.sweeps_per_iteration; ++t) {
      for (const ProposalSpec& p : mixing) metropolis_step(model, state, p, rng);
      sum_u += metropolis_step(model, state, tuned, rng).u_value;
    }
    u_hat = sum_u / static_cast<double>(config.sweeps_per_iteration);
    double a_k = config.a0 / std::max(1, k - config.k0);
    double step = std::clamp(a_k * (u_hat - target_U), -config.max_step, config.max_step);
    log_sigma += step;
    if (std::exp(log_sigma) < config.sigma_min || std::exp(log_sigma) > config.sigma_max) {
      log_sigma = std::clamp(log_sigma, std::log(config.sigma_min), std::log(config.sigma_max));
      if (++bound_hits > 10)
        throw std::runtime_error("autotune_sigma: failed to bracket target, stuck at sigma bound " +
                                 std::to_string(std::exp(log_sigma)));
    }
  }

  // Final measurement at the tuned step size.
  tuned.sigma = std::exp(log_sigma);
  detail::BatchAccumulator acc(config.sweeps_per_iteration * 20);
  for (long t = 0; t < config.sweeps_per_iteration * 20; ++t) {
    for (const ProposalSpec& p : mixing) metropolis_step(model, state, p, rng);
    acc.add(metropolis_step(model, state, tuned, rng).u_value);
  }
  return TuneResult{tuned.sigma, acc.mean(), acc.stderr_mean(), config.iterations};
}

std::vector<ScheduleRow> schedule_verification(const TargetModel& model, const PoleSpectrum& spec,
                                               int coord, std::span<const double> n_grid,
                                               double A_const, const MeasureConfig& config,
                                               const MeasureFn& measure) {
  if (n_grid.size() < 4) throw std::invalid_argument("schedule_verification: need >= 4 grid points");
  for (std::size_t i = 1; i < n_grid.size(); ++i)
    if (!(n_grid[i] > n_grid[i - 1]))
      throw std::invalid_argument("schedule_verification: n_grid must be increasing");

  ScheduleCase sched = theory::classify_case(spec, coord);
  std::vector<ScheduleRow> rows;
  std::uint64_t s = config.seed;
  for (double n : n_grid) {
    double sigma = theory::schedule_sigma(sched, spec, coord, n, A_const);
    MeasureConfig cell_config = config;
    cell_config.seed = splitmix64(s);
    Measurement m = measure(model.with_n(n), spec, coord, sigma, cell_config);
    rows.push_back(ScheduleRow{n, sigma, m.U, m.stderr_u});
  }
  return rows;
}

}  // namespace singular_mcmc::estimator
