#pragma once

#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace singular_mcmc {

using PotentialFn = std::function<double(std::span<const double>)>;

//! Prior density phi(w). StandardNormal is the default used by every built-in
//! experiment; Custom lets tests register step functions, boxes, etc.
struct PriorSpec {
  enum class Kind { StandardNormal, Custom };

  Kind kind = Kind::StandardNormal;
  std::function<double(std::span<const double>)> log_density;
  std::function<std::vector<double>(std::mt19937_64&)> sample;

  static PriorSpec standard_normal(int dim);
  static PriorSpec custom(std::function<double(std::span<const double>)> log_density,
                          std::function<std::vector<double>(std::mt19937_64&)> sample);
};

//! Pole location/order data for the zeta functions of a potential:
//! (lambda, m) for zeta(z) and (lambda_i, m_i) for each coordinate's zeta_i(z).
struct PoleSpectrum {
  struct Coord {
    double lambda_i = 0.0;
    int mult_i = 0;
  };

  double lambda = 0.0;
  int mult = 0;
  std::vector<Coord> per_coord;

  //! Admissibility: each coordinate must satisfy lambda_i > lambda, or
  //! lambda_i == lambda with mult_i <= mult. Throws std::invalid_argument.
  void validate() const;
};

//! Target family p(w) = (1/Z) exp(-n f(w)) phi(w). Z is never materialized;
//! everything downstream works with log-density differences or the oracle.
//! Immutable after construction and safe to share across threads.
class TargetModel {
 public:
  TargetModel(std::string name, int dim, PotentialFn potential, PriorSpec prior, double n);

  //! f(w); throws std::domain_error if the handle returns a negative value.
  double potential(std::span<const double> w) const;

  double log_prior(std::span<const double> w) const;

  //! -n f(w) + log phi(w). The normalization Z is omitted.
  double log_unnormalized_density(std::span<const double> w) const;

  std::vector<double> sample_prior(std::mt19937_64& rng) const;

  int dim() const { return dim_; }
  double n() const { return n_; }
  const std::string& name() const { return name_; }
  const PriorSpec& prior() const { return prior_; }

  //! Same potential and prior at a different scale constant (replica rungs).
  TargetModel with_n(double n) const;

 private:
  void check_dim(std::span<const double> w) const;

  std::string name_;
  int dim_;
  PotentialFn potential_;
  PriorSpec prior_;
  double n_;
};

//! The two potentials of the numerical experiments, with their known pole
//! spectra: "w2w2" (f = w1^2 w2^2) and "w2w4" (f = w1^2 w2^4).
bool is_builtin_model(std::string_view id);
TargetModel make_builtin_model(std::string_view id, double n);
PoleSpectrum builtin_spectrum(std::string_view id);

//! Flat potential f == 0 over a given prior; used by calibration tests.
TargetModel make_flat_model(int dim, PriorSpec prior, double n = 1.0);

}  // namespace singular_mcmc
