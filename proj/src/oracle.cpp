#include "singular_mcmc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "singular_mcmc/quadrature.hpp"

namespace singular_mcmc::oracle {

namespace quad = singular_mcmc::quadrature;

namespace {

constexpr int kScaleDecades = 14;

void require_2d(const TargetModel& model, const char* where) {
  if (model.dim() != 2)
    throw std::invalid_argument(std::string(where) + ": oracle supports d = 2 only, model has d = " +
                                std::to_string(model.dim()));
}

void check_converged(const OracleValue& v, const char* where) {
  if (!(std::abs(v.value) > 0.0) || v.error > 0.10 * std::abs(v.value))
    throw ConvergenceError(std::string(where) + ": quadrature failed to converge (value = " +
                           std::to_string(v.value) + ", error = " + std::to_string(v.error) +
                           "); refine the grid spec");
}

//! Nested 2-D integral of weight(w) * exp(-n f(w)) * phi(w) over the
//! truncated prior box. The inner (w1) integral gets a multi-scale
//! breakpoint ladder so the exp(-n f) ridge along the axes is resolved at
//! every n.
OracleValue integrate_weighted(const TargetModel& model, const QuadratureSpec& spec,
                               const std::function<double(double, double)>& weight) {
  spec.validate();
  const double half_width = spec.prior_half_width_sds;
  auto ladder = quad::scale_ladder(half_width, kScaleDecades);

  double inner_rel_err = 0.0;
  auto outer_fn = [&](double y) {
    auto inner_fn = [&](double x) {
      const double w[2] = {x, y};
      double lp = -model.n() * model.potential(w) + model.log_prior(w);
      return weight(x, y) * std::exp(lp);
    };
    quad::QuadResult r = quad::integrate(inner_fn, -half_width, half_width, ladder,
                                         spec.z_rel_tol * 0.1, 0.0, spec.inner_panels);
    if (r.value != 0.0) inner_rel_err = std::max(inner_rel_err, r.error / std::abs(r.value));
    return r.value;
  };
  quad::QuadResult outer = quad::integrate(outer_fn, -half_width, half_width, ladder,
                                           spec.z_rel_tol, 0.0, spec.outer_panels);
  return OracleValue{outer.value, outer.error + inner_rel_err * std::abs(outer.value)};
}

}  // namespace

OracleValue quad_Z(const TargetModel& model, const QuadratureSpec& spec) {
  require_2d(model, "quad_Z");
  OracleValue v = integrate_weighted(model, spec, [](double, double) { return 1.0; });
  check_converged(v, "quad_Z");
  return v;
}

OracleValue quad_Zi(const TargetModel& model, int coord, const QuadratureSpec& spec) {
  require_2d(model, "quad_Zi");
  if (coord < 0 || coord >= 2) throw std::invalid_argument("quad_Zi: coord out of range");
  auto weight = [coord](double x, double y) { return coord == 0 ? std::abs(x) : std::abs(y); };
  OracleValue v = integrate_weighted(model, spec, weight);
  check_converged(v, "quad_Zi");
  return v;
}

OracleValue oracle_U(const TargetModel& model, int coord, double sigma, const QuadratureSpec& spec) {
  require_2d(model, "oracle_U");
  if (coord < 0 || coord >= 2) throw std::invalid_argument("oracle_U: coord out of range");
  if (!(sigma > 0.0)) throw std::invalid_argument("oracle_U: sigma must be positive");
  spec.validate();

  OracleValue z = quad_Z(model, spec);

  const double half_width = spec.prior_half_width_sds;
  const double t_half = spec.proposal_half_width_sigmas * sigma;
  const double gauss_norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
  auto ladder = quad::scale_ladder(half_width, kScaleDecades);

  double mid_rel_err = 0.0;
  double t_rel_err = 0.0;

  // Expected acceptance for one proposal from w = (x, y) along `coord`.
  auto accept_given_state = [&](double x, double y) {
    const double w0[2] = {x, y};
    double lp0 = -model.n() * model.potential(w0) + model.log_prior(w0);
    double wi = (coord == 0) ? x : y;

    auto u_fn = [&](double t) {  // t is the proposed value of coordinate `coord`
      double w1[2] = {x, y};
      w1[coord] = t;
      double lp1 = -model.n() * model.potential(w1) + model.log_prior(w1);
      double u = std::exp(std::min(0.0, lp1 - lp0));
      double dt = (t - wi) / sigma;
      return u * gauss_norm * std::exp(-0.5 * dt * dt);
    };
    // The acceptance probability u(t) has structure at |t| <= |w_i| but also
    // a decay zone near the origin whose width depends on n and the frozen
    // coordinate; seed a full multi-scale ladder so no scale between
    // machine granularity and the proposal width can hide inside one panel.
    const double awi = std::abs(wi);
    const double extra[] = {awi, -awi, 2.0 * awi, -2.0 * awi, wi - sigma, wi + sigma};
    std::vector<double> cuts = quad::scale_ladder(t_half, 18, extra);
    quad::QuadResult r = quad::integrate(u_fn, wi - t_half, wi + t_half, cuts,
                                         spec.u_rel_tol * 1e-3, 1e-300, spec.inner_panels);
    if (r.value != 0.0) t_rel_err = std::max(t_rel_err, r.error / std::abs(r.value));
    return std::exp(lp0) * r.value;
  };

  auto outer_fn = [&](double y) {
    auto mid_fn = [&](double x) { return accept_given_state(x, y); };
    quad::QuadResult r = quad::integrate(mid_fn, -half_width, half_width, ladder,
                                         spec.u_rel_tol * 0.01, 0.0, spec.inner_panels);
    if (r.value != 0.0) mid_rel_err = std::max(mid_rel_err, r.error / std::abs(r.value));
    return r.value;
  };
  quad::QuadResult outer = quad::integrate(outer_fn, -half_width, half_width, ladder,
                                           spec.u_rel_tol, 0.0, spec.outer_panels);

  double value = outer.value / z.value;
  // Propagate every nesting level and never claim better than the requested
  // tolerance: the inner levels' truncation is systematic, not random.
  double rel_floor = std::max({outer.value != 0.0 ? outer.error / std::abs(outer.value) : 0.0,
                               mid_rel_err, t_rel_err, spec.u_rel_tol});
  double error = rel_floor * std::abs(value) + std::abs(value) * z.error / std::abs(z.value);
  OracleValue v{std::clamp(value, 0.0, 1.0), error};
  check_converged(v, "oracle_U");
  return v;
}

}  // namespace singular_mcmc::oracle
