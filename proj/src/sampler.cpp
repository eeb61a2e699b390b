#include "singular_mcmc/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "singular_mcmc/rng.hpp"

namespace singular_mcmc {

void ProposalSpec::validate(int dim) const {
  if (coord < 0 || coord >= dim) throw std::invalid_argument("ProposalSpec: coord out of range");
  if (!(sigma > 0.0)) throw std::invalid_argument("ProposalSpec: sigma must be positive");
}

ChainState ChainState::make(const TargetModel& model, std::vector<double> w) {
  ChainState s;
  s.cached_potential = model.potential(w);
  s.cached_log_prior = model.log_prior(w);
  s.w = std::move(w);
  return s;
}

namespace detail {

BatchAccumulator::BatchAccumulator(long expected_samples, int target_batches)
    : batch_size_(std::max<long>(1, expected_samples / std::max(1, target_batches))) {}

void BatchAccumulator::add(double x) {
  sum_ += x;
  ++count_;
  batch_sum_ += x;
  if (++in_batch_ == batch_size_) {
    batch_means_.push_back(batch_sum_ / static_cast<double>(batch_size_));
    batch_sum_ = 0.0;
    in_batch_ = 0;
  }
}

double BatchAccumulator::mean() const {
  return count_ > 0 ? sum_ / static_cast<double>(count_) : 0.0;
}

double BatchAccumulator::stderr_mean() const {
  const std::size_t b = batch_means_.size();
  if (b < 2) return 0.0;
  double m = 0.0;
  for (double x : batch_means_) m += x;
  m /= static_cast<double>(b);
  double var = 0.0;
  for (double x : batch_means_) var += (x - m) * (x - m);
  var /= static_cast<double>(b - 1);
  return std::sqrt(var / static_cast<double>(b));
}

}  // namespace detail

StepResult metropolis_step(const TargetModel& model, ChainState& state, const ProposalSpec& prop,
                           std::mt19937_64& rng) {
  prop.validate(model.dim());

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  const double old_coord = state.w[static_cast<std::size_t>(prop.coord)];
  const double proposed = old_coord + prop.sigma * gauss(rng);
  const double coin = unif(rng);  // drawn unconditionally: fixed stream shape

  state.w[static_cast<std::size_t>(prop.coord)] = proposed;
  double new_potential = model.potential(state.w);
  double new_log_prior = model.log_prior(state.w);
  double delta = -model.n() * (new_potential - state.cached_potential) +
                 (new_log_prior - state.cached_log_prior);
  if (std::isnan(delta)) {
    std::ostringstream msg;
    msg << "metropolis_step: non-finite log-density difference at w=(";
    state.w[static_cast<std::size_t>(prop.coord)] = old_coord;
    for (std::size_t j = 0; j < state.w.size(); ++j) msg << (j ? "," : "") << state.w[j];
    msg << "), w'_coord" << prop.coord << "=" << proposed;
    throw std::runtime_error(msg.str());
  }

  StepResult result;
  result.u_value = std::exp(std::min(0.0, delta));
  result.accepted = coin < result.u_value;
  if (result.accepted) {
    state.cached_potential = new_potential;
    state.cached_log_prior = new_log_prior;
  } else {
    state.w[static_cast<std::size_t>(prop.coord)] = old_coord;
  }
  ++state.step_count;
  return result;
}

namespace {

struct RecordAccumulator {
  AcceptanceRecord record;
  detail::BatchAccumulator acc;
};

std::vector<RecordAccumulator> make_accumulators(const TargetModel& model,
                                                 const std::vector<ProposalSpec>& props,
                                                 long measured_sweeps) {
  std::vector<RecordAccumulator> out;
  out.reserve(props.size());
  for (const ProposalSpec& p : props) {
    p.validate(model.dim());
    RecordAccumulator ra{AcceptanceRecord{p.coord, p.sigma, model.n(), 0, 0, 0.0, 0.0},
                         detail::BatchAccumulator(measured_sweeps)};
    out.push_back(std::move(ra));
  }
  return out;
}

void sweep(const TargetModel& model, ChainState& state, const std::vector<ProposalSpec>& props,
           std::vector<RecordAccumulator>& accs, bool measure, std::mt19937_64& rng) {
  for (std::size_t j = 0; j < props.size(); ++j) {
    StepResult r = metropolis_step(model, state, props[j], rng);
    if (measure) {
      accs[j].record.proposals += 1;
      accs[j].record.accepts += r.accepted ? 1 : 0;
      accs[j].acc.add(r.u_value);
    }
  }
}

std::vector<AcceptanceRecord> finalize(std::vector<RecordAccumulator>& accs) {
  std::vector<AcceptanceRecord> out;
  out.reserve(accs.size());
  for (RecordAccumulator& ra : accs) {
    ra.record.mean_u = ra.acc.mean();
    ra.record.stderr_u = ra.acc.stderr_mean();
    out.push_back(ra.record);
  }
  return out;
}

}  // namespace

ChainResult run_chain(const TargetModel& model, std::vector<double> init,
                      const std::vector<ProposalSpec>& props, long sweeps, long burn_in,
                      std::mt19937_64& rng) {
  if (!(sweeps > burn_in) || burn_in < 0)
    throw std::invalid_argument("run_chain: requires sweeps > burn_in >= 0");
  ChainState state = ChainState::make(model, std::move(init));
  auto accs = make_accumulators(model, props, sweeps - burn_in);
  for (long t = 0; t < sweeps; ++t) sweep(model, state, props, accs, t >= burn_in, rng);
  return ChainResult{std::move(state), finalize(accs)};
}

double swap_probability(double n_a, double n_b, double f_a, double f_b) {
  double exponent = (n_a - n_b) * (f_a - f_b);
  if (std::isnan(exponent)) throw std::runtime_error("swap_probability: non-finite exponent");
  return std::exp(std::min(0.0, exponent));
}

void ReplicaLadderConfig::validate() const {
  if (n_values.size() < 2) throw std::invalid_argument("ReplicaLadderConfig: need >= 2 rungs");
  if (proposals.size() != n_values.size())
    throw std::invalid_argument("ReplicaLadderConfig: proposals and n_values must align");
  for (std::size_t k = 1; k < n_values.size(); ++k)
    if (!(n_values[k] >= n_values[k - 1]))
      throw std::invalid_argument("ReplicaLadderConfig: n_values must be non-decreasing");
  if (swap_interval < 1) throw std::invalid_argument("ReplicaLadderConfig: swap_interval >= 1");
}

ReplicaResult replica_exchange_run(const TargetModel& base, const ReplicaLadderConfig& config,
                                   long sweeps, long burn_in, std::uint64_t seed) {
  config.validate();
  if (!(sweeps > burn_in) || burn_in < 0)
    throw std::invalid_argument("replica_exchange_run: requires sweeps > burn_in >= 0");

  const std::size_t rungs = config.n_values.size();
  std::mt19937_64 swap_rng = make_stream(seed, 0);

  std::vector<TargetModel> models;
  std::vector<std::mt19937_64> rngs;
  std::vector<ChainState> states;
  std::vector<std::vector<RecordAccumulator>> accs;
  models.reserve(rungs);
  for (std::size_t k = 0; k < rungs; ++k) {
    models.push_back(base.with_n(config.n_values[k]));
    rngs.push_back(make_stream(seed, k + 1));
    states.push_back(ChainState::make(models[k], models[k].sample_prior(rngs[k])));
    accs.push_back(make_accumulators(models[k], config.proposals[k], sweeps - burn_in));
  }

  SwapStats swaps;
  swaps.attempts.assign(rungs - 1, 0);
  swaps.accepts.assign(rungs - 1, 0);

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  long done = 0;
  long block_index = 0;
  while (done < sweeps) {
    long block = std::min<long>(config.swap_interval, sweeps - done);
    for (std::size_t k = 0; k < rungs; ++k)
      for (long t = 0; t < block; ++t)
        sweep(models[k], states[k], config.proposals[k], accs[k], done + t >= burn_in, rngs[k]);
    done += block;

    if (done < sweeps) {
      std::size_t parity = static_cast<std::size_t>(block_index % 2);
      for (std::size_t k = parity; k + 1 < rungs; k += 2) {
        double p = swap_probability(config.n_values[k], config.n_values[k + 1],
                                    states[k].cached_potential, states[k + 1].cached_potential);
        swaps.attempts[k] += 1;
        if (unif(swap_rng) < p) {
          swaps.accepts[k] += 1;
          std::swap(states[k].w, states[k + 1].w);
          std::swap(states[k].cached_potential, states[k + 1].cached_potential);
          std::swap(states[k].cached_log_prior, states[k + 1].cached_log_prior);
        }
      }
      ++block_index;
    }
  }

  ReplicaResult result;
  result.records.reserve(rungs);
  for (std::size_t k = 0; k < rungs; ++k) result.records.push_back(finalize(accs[k]));
  result.states = std::move(states);
  result.swaps = std::move(swaps);
  return result;
}

}  // namespace singular_mcmc
