#pragma once

#include <string>

#include "singular_mcmc/model.hpp"

namespace singular_mcmc::theory {

inline constexpr double kEulerGamma = 0.57721566490153286;
inline constexpr double kFourSqrtTwo = 5.656854249492380195;  // 4*sqrt(2)

enum class FormulaId {
  Theorem1Main,
  AppendixA_U1,
  AppendixB_U1,
  AppendixB_U2,
  Lemma2_Z,
  Lemma2_Zi,
  AppendixA_Z,
  AppendixA_Z1,
  AppendixB_Z,
  AppendixB_Z1,
  AppendixB_Z2,
};

std::string formula_name(FormulaId id);

struct TheoryPrediction {
  double value = 0.0;
  FormulaId formula = FormulaId::Theorem1Main;
  double n = 0.0;
  double sigma = 0.0;
  double constant = 1.0;  // the free constant c (Theorem 1) or A(lambda, lambda_i)
};

//! Behavior classes of the acceptance-rate asymptotics for one coordinate.
enum class ScheduleCase {
  Case1,  // lambda < lambda_i      : U decays polynomially in n
  Case2,  // lambda = lambda_i, m > m_i : U decays like 1/(log n)^{m-m_i}
  Case3,  // lambda = lambda_i, m = m_i : U independent of n
};

//! coord is a 0-based coordinate index.
ScheduleCase classify_case(const PoleSpectrum& spec, int coord);

//! Main asymptotic term: U = (log n)^{m_i-m} / n^{lambda_i-lambda} * c*4*sqrt(2)/sigma.
double theorem1_U(double n, double sigma, const PoleSpectrum& spec, int coord, double c = 1.0);

//! Closed form for f = w1^2 w2^2 (both coordinates, case 2):
//! U1 = 8 sqrt(pi) / (sigma (log n + 4 log 2 - gamma)).
double appendixA_U1(double n, double sigma);

//! Closed form for f = w1^2 w2^4, coordinate w1 (case 3):
//! U1 = (8/sigma) Gamma(3/4)/Gamma(1/4). Independent of n.
double appendixB_U1(double sigma);

//! Closed form for f = w1^2 w2^4, coordinate w2 (case 1):
//! U2 = (2^{9/4}/sigma) (log n / n^{1/4}) Gamma(1/2)/Gamma(1/4)^2
//!      * (1 + (5 log 2 - 2 gamma)/log n).
//! The sub-leading constant is 5 log 2 - 2 gamma, consistent with the Z2
//! derivation below and confirmed against direct quadrature.
double appendixB_U2(double n, double sigma);

//! Generic asymptotics Z = (log n)^{m-1} n^{-lambda} g Gamma(lambda).
double lemma2_Z(double n, const PoleSpectrum& spec, double g_const);
double lemma2_Zi(double n, const PoleSpectrum& spec, int coord, double g_const);

//! The five exact partition-function asymptotics:
//!   AppendixA_Z  = (1/(2 sqrt(pi))) (log n / sqrt(n)) (1 + (4 log 2 - gamma)/log n)
//!   AppendixA_Z1 = 1 / (sqrt(2) sqrt(n))
//!   AppendixB_Z  = n^{-1/4} (2^{-7/4}/pi) Gamma(1/4)^2
//!   AppendixB_Z1 = n^{-1/4} (2^{-5/4}/pi) Gamma(3/4) Gamma(1/4)
//!   AppendixB_Z2 = (log n / sqrt(n)) (1/(4 pi)) Gamma(1/2) (1 + (5 log 2 - 2 gamma)/log n)
double appendix_Z_closed(double n, FormulaId which);

//! Step-size schedule keeping U constant across n for the coordinate's case:
//!   Case 1: sigma = 4 sqrt(2) A (log n)^{m_i-m} / n^{lambda_i-lambda}
//!   Case 2: sigma = 4 sqrt(2) A / (log n)^{m-m_i}
//!   Case 3: sigma = 4 sqrt(2) A
double schedule_sigma(ScheduleCase sched, const PoleSpectrum& spec, int coord, double n, double A_const = 1.0);

}  // namespace singular_mcmc::theory
