#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>
#include <vector>

#include "singular_mcmc/estimator.hpp"
#include "singular_mcmc/model.hpp"
#include "singular_mcmc/oracle.hpp"
#include "singular_mcmc/theory.hpp"

using namespace singular_mcmc;
using namespace singular_mcmc::estimator;

namespace {

// U = (log n) n^{-1/4} * c_scale * 4 sqrt(2) / sigma, i.e. delta_lambda = 1/4
// and delta_m = 1 exactly.
std::vector<Measurement> synthetic_case1(double c_scale, double sigma) {
  const PoleSpectrum spec = builtin_spectrum("w2w4");
  std::vector<Measurement> data;
  for (double n = 1e4; n <= 1e10 + 1.0; n *= 10.0)
    data.push_back({n, sigma, 1, c_scale * theory::theorem1_U(n, sigma, spec, 1), 0.0});
  return data;
}

}  // namespace

TEST_CASE("fit_exponents recovers exact power laws to 1e-10") {
  const std::vector<Measurement> data = synthetic_case1(1.0, 1e3);
  ExponentFit fit = fit_exponents(data);
  CHECK(fit.delta_lambda == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(fit.delta_m == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::exp(fit.intercept) == doctest::Approx(theory::kFourSqrtTwo).epsilon(1e-10));
  CHECK(fit.residual_rms < 1e-10);
  for (int i = 0; i < 3; ++i) CHECK(fit.covariance[i][i] >= 0.0);
}

TEST_CASE("fit_exponents imposes the 1/sigma law, so rows may mix step sizes") {
  std::vector<Measurement> data = synthetic_case1(1.0, 1e3);
  std::vector<Measurement> mixed = data;
  for (std::size_t i = 0; i < mixed.size(); ++i) {
    const double k = 1.0 + 0.5 * static_cast<double>(i);
    mixed[i].sigma *= k;
    mixed[i].U /= k;
  }
  ExponentFit a = fit_exponents(data);
  ExponentFit b = fit_exponents(mixed);
  CHECK(a.delta_lambda == doctest::Approx(b.delta_lambda).epsilon(1e-12));
  CHECK(a.delta_m == doctest::Approx(b.delta_m).epsilon(1e-12));
}

TEST_CASE("fit_exponents is equivariant under rescaling of U") {
  ExponentFit base = fit_exponents(synthetic_case1(1.0, 1e3));
  ExponentFit scaled = fit_exponents(synthetic_case1(7.5, 1e3));
  CHECK(scaled.delta_lambda == doctest::Approx(base.delta_lambda).epsilon(1e-10));
  CHECK(scaled.delta_m == doctest::Approx(base.delta_m).epsilon(1e-10));
  CHECK(scaled.intercept - base.intercept == doctest::Approx(std::log(7.5)).epsilon(1e-10));
}

TEST_CASE("fit_exponents tolerates one percent multiplicative noise") {
  std::vector<Measurement> data = synthetic_case1(1.0, 1e3);
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g(0.0, 0.01);
  for (Measurement& m : data) {
    m.U *= std::exp(g(rng));
    m.stderr_u = 0.01 * m.U;
  }
  ExponentFit fit = fit_exponents(data);
  CHECK(std::abs(fit.delta_lambda - 0.25) < 0.02);
  CHECK(std::abs(fit.delta_m - 1.0) < 0.4);
  CHECK(fit.residual_rms > 0.0);
}

TEST_CASE("fit_exponents input validation") {
  std::vector<Measurement> data = synthetic_case1(1.0, 1e3);
  data.resize(3);
  CHECK_THROWS_AS(fit_exponents(data), std::invalid_argument);

  data = synthetic_case1(1.0, 1e3);
  data[2].coord = 0;
  CHECK_THROWS_AS(fit_exponents(data), std::invalid_argument);

  data = synthetic_case1(1.0, 1e3);
  data[0].U = 0.0;
  CHECK_THROWS_AS(fit_exponents(data), std::invalid_argument);

  data = synthetic_case1(1.0, 1e3);
  data[0].n = 2.0;  // <= e
  CHECK_THROWS_AS(fit_exponents(data), std::invalid_argument);

  // Identical n everywhere: rank-deficient design.
  data = synthetic_case1(1.0, 1e3);
  for (Measurement& m : data) m.n = 1e6;
  CHECK_THROWS((void)fit_exponents(data));
}

TEST_CASE("measure_U agrees with the quadrature oracle") {
  const TargetModel model = make_builtin_model("w2w2", 1e4);
  const PoleSpectrum spec = builtin_spectrum("w2w2");
  MeasureConfig cfg;
  cfg.sweeps = 400000;
  cfg.seed = 5;
  Measurement m = measure_U(model, spec, 0, 10.0, cfg);
  oracle::QuadratureSpec qspec;
  qspec.u_rel_tol = 1e-4;
  const double exact = oracle::oracle_U(model, 0, 10.0, qspec).value;
  CHECK(std::abs(m.U - exact) < 4.0 * m.stderr_u);
  CHECK(m.n == 1e4);
  CHECK(m.sigma == 10.0);
  CHECK(m.coord == 0);
}

TEST_CASE("measure_cells is deterministic and labels cells correctly") {
  const TargetModel model = make_builtin_model("w2w4", 1e4);
  const PoleSpectrum spec = builtin_spectrum("w2w4");
  const std::vector<CellRequest> cells{{0, 10.0}, {1, 31.6}, {0, 100.0}};
  MeasureConfig cfg;
  cfg.sweeps = 100000;
  cfg.seed = 42;
  std::vector<AcceptanceRecord> a = measure_cells(model, spec, cells, cfg);
  std::vector<AcceptanceRecord> b = measure_cells(model, spec, cells, cfg);
  REQUIRE(a.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a[i].coord == cells[i].coord);
    CHECK(a[i].sigma == cells[i].sigma);
    CHECK(a[i].n == 1e4);
    CHECK(a[i].mean_u == b[i].mean_u);
    CHECK(a[i].stderr_u == b[i].stderr_u);
    CHECK(a[i].mean_u > 0.0);
  }
  cfg.seed = 43;
  std::vector<AcceptanceRecord> c = measure_cells(model, spec, cells, cfg);
  CHECK(c[0].mean_u != a[0].mean_u);
}

TEST_CASE("autotune reaches a moderate target on the flat target") {
  const TargetModel flat = make_flat_model(2, PriorSpec::standard_normal(2), 1.0);
  TuneConfig cfg;
  cfg.iterations = 120;
  cfg.sweeps_per_iteration = 400;
  cfg.warmup_sweeps = 1000;
  cfg.seed = 3;
  TuneResult hi = autotune_sigma(flat, 0, 0.8, cfg);
  CHECK(std::abs(hi.achieved_U - 0.8) < 0.05);
  TuneResult rerun = autotune_sigma(flat, 0, 0.8, cfg);
  CHECK(rerun.sigma_star == hi.sigma_star);

  TuneResult lo = autotune_sigma(flat, 0, 0.3, cfg);
  CHECK(std::abs(lo.achieved_U - 0.3) < 0.05);
  CHECK(lo.sigma_star > hi.sigma_star);  // lower target needs bigger steps
}

TEST_CASE("autotune lands near the closed-form step size in the singular regime") {
  // For f = w1^2 w2^4 at n = 1e8, coordinate 1, the target 2.7039e-3 is met
  // near sigma = 280 (the closed-form constant, deflated by the window
  // normalization 2 sqrt(pi)).
  const TargetModel model = make_builtin_model("w2w4", 1e8);
  TuneConfig cfg;
  cfg.iterations = 300;
  cfg.sweeps_per_iteration = 2000;
  cfg.a0 = 250.0;
  cfg.k0 = 30;
  cfg.sigma0 = 10.0;
  cfg.warmup_sweeps = 20000;
  cfg.seed = 8;
  TuneResult res = autotune_sigma(model, 0, 2.7039e-3, cfg);
  CHECK(res.sigma_star > 283.0 / 1.4);
  CHECK(res.sigma_star < 283.0 * 1.4);
}

TEST_CASE("autotune input validation") {
  const TargetModel flat = make_flat_model(2, PriorSpec::standard_normal(2), 1.0);
  TuneConfig cfg;
  CHECK_THROWS_AS(autotune_sigma(flat, 0, 0.0, cfg), std::invalid_argument);
  CHECK_THROWS_AS(autotune_sigma(flat, 0, 1.5, cfg), std::invalid_argument);
  CHECK_THROWS_AS(autotune_sigma(flat, 5, 0.3, cfg), std::invalid_argument);
}

TEST_CASE("schedule_verification is exactly flat under the theory evaluator") {
  const TargetModel model = make_builtin_model("w2w4", 1.0);
  const PoleSpectrum spec = builtin_spectrum("w2w4");
  const std::vector<double> grid{1e4, 1e5, 1e6, 1e7, 1e8};
  MeasureConfig cfg;
  MeasureFn theory_eval = [](const TargetModel& m, const PoleSpectrum& s, int coord, double sigma,
                             const MeasureConfig&) {
    return Measurement{m.n(), sigma, coord, theory::theorem1_U(m.n(), sigma, s, coord), 0.0};
  };
  for (int coord : {0, 1}) {
    std::vector<ScheduleRow> rows = schedule_verification(model, spec, coord, grid, 2.0, cfg, theory_eval);
    REQUIRE(rows.size() == grid.size());
    for (const ScheduleRow& r : rows) CHECK(r.U == doctest::Approx(0.5).epsilon(1e-12));
  }

  const std::vector<double> tiny{1e4, 1e5};
  CHECK_THROWS_AS(schedule_verification(model, spec, 0, tiny, 1.0, cfg, theory_eval),
                  std::invalid_argument);
  const std::vector<double> unsorted{1e5, 1e4, 1e6, 1e7};
  CHECK_THROWS_AS(schedule_verification(model, spec, 0, unsorted, 1.0, cfg, theory_eval),
                  std::invalid_argument);
}

TEST_CASE("schedule_verification holds U roughly constant in sampled runs") {
  const TargetModel model = make_builtin_model("w2w4", 1.0);
  const PoleSpectrum spec = builtin_spectrum("w2w4");
  const std::vector<double> grid{1e3, 1e4, 1e5, 1e6};
  MeasureConfig cfg;
  cfg.sweeps = 200000;
  cfg.seed = 17;
  std::vector<ScheduleRow> rows = schedule_verification(model, spec, 0, grid, 1.0, cfg);
  double lo = rows[0].U, hi = rows[0].U;
  for (const ScheduleRow& r : rows) {
    lo = std::min(lo, r.U);
    hi = std::max(hi, r.U);
    CHECK(r.sigma_scheduled == doctest::Approx(theory::kFourSqrtTwo).epsilon(1e-12));
  }
  CHECK(hi / lo < 1.2);
}
