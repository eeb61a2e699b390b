#include "singular_mcmc/theory.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace singular_mcmc::theory {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLog2 = std::numbers::ln2;

void require_n_above_e(double n, const char* where) {
  if (!(n > std::numbers::e))
    throw std::domain_error(std::string(where) + ": requires n > e, got n = " + std::to_string(n));
}

void require_positive_sigma(double sigma, const char* where) {
  if (!(sigma > 0.0))
    throw std::domain_error(std::string(where) + ": requires sigma > 0");
}

const PoleSpectrum::Coord& coord_spec(const PoleSpectrum& spec, int coord, const char* where) {
  if (coord < 0 || coord >= static_cast<int>(spec.per_coord.size()))
    throw std::invalid_argument(std::string(where) + ": coordinate index out of range");
  return spec.per_coord[static_cast<std::size_t>(coord)];
}

}  // namespace

std::string formula_name(FormulaId id) {
  switch (id) {
    case FormulaId::Theorem1Main: return "Theorem1Main";
    case FormulaId::AppendixA_U1: return "AppendixA_U1";
    case FormulaId::AppendixB_U1: return "AppendixB_U1";
    case FormulaId::AppendixB_U2: return "AppendixB_U2";
    case FormulaId::Lemma2_Z: return "Lemma2_Z";
    case FormulaId::Lemma2_Zi: return "Lemma2_Zi";
    case FormulaId::AppendixA_Z: return "AppendixA_Z";
    case FormulaId::AppendixA_Z1: return "AppendixA_Z1";
    case FormulaId::AppendixB_Z: return "AppendixB_Z";
    case FormulaId::AppendixB_Z1: return "AppendixB_Z1";
    case FormulaId::AppendixB_Z2: return "AppendixB_Z2";
  }
  throw std::invalid_argument("formula_name: unknown formula id");
}

ScheduleCase classify_case(const PoleSpectrum& spec, int coord) {
  spec.validate();
  const PoleSpectrum::Coord& c = coord_spec(spec, coord, "classify_case");
  if (c.lambda_i > spec.lambda) return ScheduleCase::Case1;
  if (c.mult_i < spec.mult) return ScheduleCase::Case2;
  return ScheduleCase::Case3;
}

double theorem1_U(double n, double sigma, const PoleSpectrum& spec, int coord, double c) {
  spec.validate();
  require_n_above_e(n, "theorem1_U");
  require_positive_sigma(sigma, "theorem1_U");
  const PoleSpectrum::Coord& cs = coord_spec(spec, coord, "theorem1_U");
  double dl = cs.lambda_i - spec.lambda;
  int dm = cs.mult_i - spec.mult;
  return std::pow(std::log(n), dm) * std::pow(n, -dl) * c * kFourSqrtTwo / sigma;
}

double appendixA_U1(double n, double sigma) {
  require_positive_sigma(sigma, "appendixA_U1");
  double denom = std::log(n) + 4.0 * kLog2 - kEulerGamma;
  if (!(denom > 0.0)) throw std::domain_error("appendixA_U1: log n + 4 log 2 - gamma must be positive");
  return 8.0 * std::sqrt(kPi) / (sigma * denom);
}

double appendixB_U1(double sigma) {
  require_positive_sigma(sigma, "appendixB_U1");
  return 8.0 / sigma * std::tgamma(0.75) / std::tgamma(0.25);
}

double appendixB_U2(double n, double sigma) {
  require_n_above_e(n, "appendixB_U2");
  require_positive_sigma(sigma, "appendixB_U2");
  double logn = std::log(n);
  double lead = std::pow(2.0, 2.25) / sigma * logn / std::pow(n, 0.25);
  double gq = std::tgamma(0.25);
  return lead * std::tgamma(0.5) / (gq * gq) * (1.0 + (5.0 * kLog2 - 2.0 * kEulerGamma) / logn);
}

double lemma2_Z(double n, const PoleSpectrum& spec, double g_const) {
  require_n_above_e(n, "lemma2_Z");
  if (!(g_const > 0.0)) throw std::invalid_argument("lemma2_Z: g_const must be positive");
  return std::pow(std::log(n), spec.mult - 1) * std::pow(n, -spec.lambda) * g_const * std::tgamma(spec.lambda);
}

double lemma2_Zi(double n, const PoleSpectrum& spec, int coord, double g_const) {
  require_n_above_e(n, "lemma2_Zi");
  if (!(g_const > 0.0)) throw std::invalid_argument("lemma2_Zi: g_const must be positive");
  const PoleSpectrum::Coord& c = coord_spec(spec, coord, "lemma2_Zi");
  return std::pow(std::log(n), c.mult_i - 1) * std::pow(n, -c.lambda_i) * g_const * std::tgamma(c.lambda_i);
}

double appendix_Z_closed(double n, FormulaId which) {
  double logn = std::log(n);
  double gq = std::tgamma(0.25);
  switch (which) {
    case FormulaId::AppendixA_Z:
      require_n_above_e(n, "appendix_Z_closed(AppendixA_Z)");
      return 0.5 / std::sqrt(kPi) * logn / std::sqrt(n) * (1.0 + (4.0 * kLog2 - kEulerGamma) / logn);
    case FormulaId::AppendixA_Z1:
      if (!(n > 0.0)) throw std::domain_error("appendix_Z_closed: n must be positive");
      return 1.0 / (std::sqrt(2.0) * std::sqrt(n));
    case FormulaId::AppendixB_Z:
      if (!(n > 0.0)) throw std::domain_error("appendix_Z_closed: n must be positive");
      return std::pow(n, -0.25) * std::pow(2.0, -1.75) / kPi * gq * gq;
    case FormulaId::AppendixB_Z1:
      if (!(n > 0.0)) throw std::domain_error("appendix_Z_closed: n must be positive");
      return std::pow(n, -0.25) * std::pow(2.0, -1.25) / kPi * std::tgamma(0.75) * gq;
    case FormulaId::AppendixB_Z2:
      require_n_above_e(n, "appendix_Z_closed(AppendixB_Z2)");
      return logn / std::sqrt(n) * 0.25 / kPi * std::tgamma(0.5) *
             (1.0 + (5.0 * kLog2 - 2.0 * kEulerGamma) / logn);
    default:
      throw std::invalid_argument("appendix_Z_closed: not a Z-type formula id");
  }
}

double schedule_sigma(ScheduleCase sched, const PoleSpectrum& spec, int coord, double n, double A_const) {
  if (!(A_const > 0.0)) throw std::invalid_argument("schedule_sigma: A_const must be positive");
  if (classify_case(spec, coord) != sched)
    throw std::invalid_argument("schedule_sigma: requested case does not match the coordinate's spectrum");
  const PoleSpectrum::Coord& c = coord_spec(spec, coord, "schedule_sigma");
  switch (sched) {
    case ScheduleCase::Case1:
      require_n_above_e(n, "schedule_sigma(Case1)");
      return kFourSqrtTwo * A_const * std::pow(std::log(n), c.mult_i - spec.mult) *
             std::pow(n, -(c.lambda_i - spec.lambda));
    case ScheduleCase::Case2:
      require_n_above_e(n, "schedule_sigma(Case2)");
      return kFourSqrtTwo * A_const / std::pow(std::log(n), spec.mult - c.mult_i);
    case ScheduleCase::Case3:
      return kFourSqrtTwo * A_const;
  }
  throw std::invalid_argument("schedule_sigma: unknown case");
}

}  // namespace singular_mcmc::theory
