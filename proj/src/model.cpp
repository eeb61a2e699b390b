#include "singular_mcmc/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace singular_mcmc {

PriorSpec PriorSpec::standard_normal(int dim) {
  PriorSpec spec;
  spec.kind = Kind::StandardNormal;
  spec.log_density = [dim](std::span<const double> w) {
    double q = 0.0;
    for (double x : w) q += x * x;
    return -0.5 * q - 0.5 * dim * std::log(2.0 * std::numbers::pi);
  };
  spec.sample = [dim](std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> w(static_cast<std::size_t>(dim));
    for (double& x : w) x = gauss(rng);
    return w;
  };
  return spec;
}

PriorSpec PriorSpec::custom(std::function<double(std::span<const double>)> log_density,
                            std::function<std::vector<double>(std::mt19937_64&)> sample) {
  PriorSpec spec;
  spec.kind = Kind::Custom;
  spec.log_density = std::move(log_density);
  spec.sample = std::move(sample);
  return spec;
}

void PoleSpectrum::validate() const {
  if (lambda <= 0.0 || mult < 1) throw std::invalid_argument("PoleSpectrum: lambda > 0 and mult >= 1 required");
  for (std::size_t i = 0; i < per_coord.size(); ++i) {
    const Coord& c = per_coord[i];
    bool ok = c.lambda_i > lambda || (c.lambda_i == lambda && c.mult_i <= mult);
    if (!ok || c.lambda_i <= 0.0 || c.mult_i < 1)
      throw std::invalid_argument("PoleSpectrum: coordinate " + std::to_string(i + 1) +
                                  " violates lambda_i > lambda or (lambda_i = lambda, m_i <= m)");
  }
}

TargetModel::TargetModel(std::string name, int dim, PotentialFn potential, PriorSpec prior, double n)
    : name_(std::move(name)), dim_(dim), potential_(std::move(potential)), prior_(std::move(prior)), n_(n) {
  if (dim_ < 1) throw std::invalid_argument("TargetModel: dim must be positive");
  if (!(n_ > 0.0)) throw std::invalid_argument("TargetModel: n must be positive");
  if (!potential_) throw std::invalid_argument("TargetModel: potential handle required");
  std::vector<double> origin(static_cast<std::size_t>(dim_), 0.0);
  double f0 = potential_(origin);
  if (f0 != 0.0) throw std::invalid_argument("TargetModel: f(0) must be 0, got " + std::to_string(f0));
}

void TargetModel::check_dim(std::span<const double> w) const {
  if (static_cast<int>(w.size()) != dim_)
    throw std::invalid_argument("TargetModel '" + name_ + "': expected dim " + std::to_string(dim_) +
                                ", got " + std::to_string(w.size()));
}

double TargetModel::potential(std::span<const double> w) const {
  check_dim(w);
  double f = potential_(w);
  if (std::isnan(f) || f < 0.0)
    throw std::domain_error("TargetModel '" + name_ + "': potential returned " + std::to_string(f) +
                            " (must be finite and >= 0)");
  return f;
}

double TargetModel::log_prior(std::span<const double> w) const {
  check_dim(w);
  return prior_.log_density(w);
}

double TargetModel::log_unnormalized_density(std::span<const double> w) const {
  return -n_ * potential(w) + log_prior(w);
}

std::vector<double> TargetModel::sample_prior(std::mt19937_64& rng) const {
  return prior_.sample(rng);
}

TargetModel TargetModel::with_n(double n) const {
  return TargetModel(name_, dim_, potential_, prior_, n);
}

bool is_builtin_model(std::string_view id) { return id == "w2w2" || id == "w2w4"; }

TargetModel make_builtin_model(std::string_view id, double n) {
  if (id == "w2w2") {
    PotentialFn f = [](std::span<const double> w) {
      return w[0] * w[0] * w[1] * w[1];
    };
    return TargetModel("w2w2", 2, std::move(f), PriorSpec::standard_normal(2), n);
  }
  if (id == "w2w4") {
    PotentialFn f = [](std::span<const double> w) {
      double y2 = w[1] * w[1];
      return w[0] * w[0] * y2 * y2;
    };
    return TargetModel("w2w4", 2, std::move(f), PriorSpec::standard_normal(2), n);
  }
  throw std::invalid_argument("unknown builtin model '" + std::string(id) + "' (expected w2w2 or w2w4)");
}

PoleSpectrum builtin_spectrum(std::string_view id) {
  PoleSpectrum s;
  if (id == "w2w2") {
    s.lambda = 0.5;
    s.mult = 2;
    s.per_coord = {{0.5, 1}, {0.5, 1}};
  } else if (id == "w2w4") {
    s.lambda = 0.25;
    s.mult = 1;
    s.per_coord = {{0.25, 1}, {0.5, 2}};
  } else {
    throw std::invalid_argument("unknown builtin model '" + std::string(id) + "'");
  }
  s.validate();
  return s;
}

TargetModel make_flat_model(int dim, PriorSpec prior, double n) {
  PotentialFn f = [](std::span<const double>) { return 0.0; };
  return TargetModel("flat", dim, std::move(f), std::move(prior), n);
}

}  // namespace singular_mcmc
