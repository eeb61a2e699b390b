#pragma once

#include <functional>
#include <span>
#include <vector>

namespace singular_mcmc::quadrature {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // absolute error estimate
  long evals = 0;
};

//! Adaptive Gauss-Kronrod (7-15) integration of f over [a, b].
//!
//! `breakpoints` seeds the initial panel set; points outside (a, b) are
//! ignored. Panels are bisected worst-error-first until the tolerance is met
//! or `max_panels` is reached. The final sum runs over panels sorted by left
//! endpoint, so the result does not depend on refinement order.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     std::span<const double> breakpoints, double rel_tol, double abs_tol,
                     int max_panels);

//! Symmetric breakpoint ladder for integrands with structure at many scales
//! near the origin: {0, +-half_width*ratio^-k} for k = 0..decades, plus any
//! extra points. Sorted, deduplicated.
std::vector<double> scale_ladder(double half_width, int decades, std::span<const double> extra = {});

}  // namespace singular_mcmc::quadrature
