#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "singular_mcmc/model.hpp"

namespace singular_mcmc {

//! One-coordinate Gaussian proposal: w'_coord = w_coord + N(0, sigma^2).
struct ProposalSpec {
  int coord = 0;      // 0-based
  double sigma = 1.0;

  void validate(int dim) const;
};

struct ChainState {
  std::vector<double> w;
  double cached_potential = 0.0;
  double cached_log_prior = 0.0;
  long step_count = 0;

  static ChainState make(const TargetModel& model, std::vector<double> w);
  double log_unnormalized_density(const TargetModel& model) const {
    return -model.n() * cached_potential + cached_log_prior;
  }
};

//! Per-(coord, sigma, n) acceptance accounting. mean_u averages the
//! analytically known u(w, w') = min(1, r) over proposals, not the 0/1
//! accept coin; both estimate the same expectation, the former with lower
//! variance. stderr comes from batch means.
struct AcceptanceRecord {
  int coord = 0;
  double sigma = 0.0;
  double n = 0.0;
  long proposals = 0;
  long accepts = 0;
  double mean_u = 0.0;
  double stderr_u = 0.0;
};

namespace detail {
//! Batch-means accumulator; >= 20 batches as long as enough samples arrive.
class BatchAccumulator {
 public:
  explicit BatchAccumulator(long expected_samples, int target_batches = 50);
  void add(double x);
  long count() const { return count_; }
  double mean() const;
  double stderr_mean() const;

 private:
  long batch_size_;
  long count_ = 0;
  double sum_ = 0.0;
  double batch_sum_ = 0.0;
  long in_batch_ = 0;
  std::vector<double> batch_means_;
};
}  // namespace detail

struct StepResult {
  double u_value = 0.0;  // min(1, r), recorded whether or not accepted
  bool accepted = false;
};

//! One Metropolis update along prop.coord. On rejection the state is
//! unchanged except step_count. Throws std::runtime_error on a non-finite
//! log-density difference.
StepResult metropolis_step(const TargetModel& model, ChainState& state, const ProposalSpec& prop,
                           std::mt19937_64& rng);

struct ChainResult {
  ChainState state;
  std::vector<AcceptanceRecord> records;  // one per entry of `props`
};

//! One sweep = one metropolis_step per ProposalSpec in the given order.
//! Records accumulate after burn_in sweeps. Deterministic given the rng
//! state.
ChainResult run_chain(const TargetModel& model, std::vector<double> init,
                      const std::vector<ProposalSpec>& props, long sweeps, long burn_in,
                      std::mt19937_64& rng);

//! Replica-exchange ladder over increasing n values. Each rung carries its
//! own proposal list; `measure` marks proposals whose records are wanted.
struct ReplicaLadderConfig {
  std::vector<double> n_values;                       // non-decreasing
  std::vector<std::vector<ProposalSpec>> proposals;   // per rung
  long swap_interval = 10;                            // sweeps between swap attempts

  void validate() const;
};

//! Acceptance probability for exchanging states between a rung at
//! temperature-parameter n_a holding potential value f_a and one at n_b
//! holding f_b: min(1, exp((n_a - n_b) * (f_a - f_b))).
double swap_probability(double n_a, double n_b, double f_a, double f_b);

struct SwapStats {
  std::vector<long> attempts;  // per adjacent pair (rung k, k+1)
  std::vector<long> accepts;
};

struct ReplicaResult {
  std::vector<std::vector<AcceptanceRecord>> records;  // [rung][proposal]
  std::vector<ChainState> states;
  SwapStats swaps;
};

//! Rungs evolve independently between swap barriers, each on its own RNG
//! stream; adjacent pairs then swap with probability
//! min(1, exp((n_a - n_b)(f(w_a) - f(w_b)))), alternating even/odd pairs.
//! Bit-reproducible for a given seed.
ReplicaResult replica_exchange_run(const TargetModel& base, const ReplicaLadderConfig& config,
                                   long sweeps, long burn_in, std::uint64_t seed);

}  // namespace singular_mcmc
