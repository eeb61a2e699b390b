#pragma once

#include <stdexcept>

#include "singular_mcmc/model.hpp"

namespace singular_mcmc::oracle {

//! Controls for the nested adaptive quadrature. Panel budgets are per
//! one-dimensional integral; halving/doubling them is the grid-refinement
//! knob the stability tests exercise.
struct QuadratureSpec {
  int outer_panels = 2048;
  int inner_panels = 4096;
  double prior_half_width_sds = 8.0;       // truncation of the w domain
  double proposal_half_width_sigmas = 8.0;  // truncation of the w' integral
  double z_rel_tol = 1e-11;
  double u_rel_tol = 1e-6;

  void validate() const {
    if (outer_panels < 64 || inner_panels < 64)
      throw std::invalid_argument("QuadratureSpec: panel budgets must be >= 64");
  }
};

struct OracleValue {
  double value = 0.0;
  double error = 0.0;  // absolute error estimate
};

struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

//! Z = int dw exp(-n f(w)) phi(w), by nested adaptive quadrature (d = 2).
OracleValue quad_Z(const TargetModel& model, const QuadratureSpec& spec = {});

//! Z_i = int dw |w_i| exp(-n f(w)) phi(w). coord is 0-based.
OracleValue quad_Zi(const TargetModel& model, int coord, const QuadratureSpec& spec = {});

//! Exact average acceptance rate
//!   U = int dw p(w) int dw' min(1, p(w')/p(w)) N(w'_i; w_i, sigma^2)
//! with no asymptotic approximation anywhere. coord is 0-based.
OracleValue oracle_U(const TargetModel& model, int coord, double sigma,
                     const QuadratureSpec& spec = {});

}  // namespace singular_mcmc::oracle
