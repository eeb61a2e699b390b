// End-to-end acceptance checks for the sampler + theory + oracle toolkit.
// Each criterion prints exactly one [PASS]/[FAIL] line; the exit status is
// the number of failed criteria. The checks are listed in the order they
// gate a release:
//   1. measured U scales like 1/sigma at fixed large n
//   2. fitted n-exponents match the pole spectrum of both potentials
//   3. the case-2 logarithmic decay matches the closed form up to one scale
//   4. constant-acceptance schedules hold U flat across n
//   5. sampler and independent quadrature oracle agree cell by cell
//   6. quadrature converges to the closed-form asymptotics as n grows
//   7. the closed forms satisfy their exact algebraic identities
//   8. core sampler/estimator properties (balance, invariance, determinism)

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "singular_mcmc/estimator.hpp"
#include "singular_mcmc/experiment.hpp"
#include "singular_mcmc/model.hpp"
#include "singular_mcmc/oracle.hpp"
#include "singular_mcmc/rng.hpp"
#include "singular_mcmc/sampler.hpp"
#include "singular_mcmc/theory.hpp"

using namespace singular_mcmc;

namespace {

int g_failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", index, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(double x) { return experiment::format_double(x); }

// Weighted least-squares slope of y against x.
double wls_slope(const std::vector<double>& x, const std::vector<double>& y,
                 const std::vector<double>& w) {
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += w[i] * (x[i] - mx) * (y[i] - my);
    den += w[i] * (x[i] - mx) * (x[i] - mx);
  }
  return num / den;
}

std::vector<AcceptanceRecord> measure(const std::string& model_id, double n,
                                      const std::vector<estimator::CellRequest>& cells,
                                      long sweeps, std::uint64_t seed) {
  const TargetModel model = make_builtin_model(model_id, n);
  const PoleSpectrum spec = builtin_spectrum(model_id);
  estimator::MeasureConfig cfg;
  cfg.sweeps = sweeps;
  cfg.seed = seed;
  return estimator::measure_cells(model, spec, cells, cfg);
}

// ---------------------------------------------------------------- criterion 1

void criterion1() {
  const double n = 1e8;
  const std::vector<double> sigmas{1e2, std::pow(10.0, 2.5), 1e3, std::pow(10.0, 3.5), 1e4};
  bool pass = true;
  std::ostringstream detail;
  for (const std::string& model : {std::string("w2w2"), std::string("w2w4")}) {
    const long sweeps = model == "w2w4" ? 8'000'000 : 2'000'000;
    for (int coord : {0, 1}) {
      std::vector<estimator::CellRequest> cells;
      for (double s : sigmas) cells.push_back({coord, s});
      auto records = measure(model, n, cells, sweeps, 101 + coord + (model == "w2w4" ? 10 : 0));
      std::vector<double> x, y, w;
      for (const auto& r : records) {
        x.push_back(std::log(r.sigma));
        y.push_back(std::log(r.mean_u));
        const double rel = r.stderr_u / r.mean_u;
        w.push_back(1.0 / (rel * rel));
      }
      const double slope = wls_slope(x, y, w);
      if (std::abs(slope + 1.0) > 0.1) pass = false;
      detail << model << "/w" << coord + 1 << " slope=" << fmt(slope) << " ";
    }
  }
  report(1, "U scales like 1/sigma at n = 1e8 over sigma in [1e2, 1e4]", pass, detail.str());
}

// ------------------------------------------------------- criteria 2 and 3

struct ExponentScan {
  std::vector<estimator::Measurement> w2w2_c1;  // reused by criterion 3
};

ExponentScan criterion2() {
  const double sigma = 1e3;
  std::vector<double> n_grid;
  for (double n = 1e4; n <= 1e10 + 1.0; n *= 10.0) n_grid.push_back(n);

  struct Scan {
    std::string model;
    int coord;          // 0-based
    double lo, hi;      // admissible delta_lambda band
    long sweeps;
  };
  const std::vector<Scan> scans{
      {"w2w4", 1, 0.20, 0.30, 2'000'000},
      {"w2w4", 0, -0.05, 0.05, 2'000'000},
      {"w2w2", 0, -0.05, 0.05, 1'000'000},
      {"w2w2", 1, -0.05, 0.05, 1'000'000},
  };

  ExponentScan saved;
  bool pass = true;
  std::ostringstream detail;
  for (const Scan& scan : scans) {
    std::vector<estimator::Measurement> data;
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
      auto records = measure(scan.model, n_grid[i], {{scan.coord, sigma}}, scan.sweeps,
                             200 + 20 * scan.coord + (scan.model == "w2w4" ? 100 : 0) + i);
      const AcceptanceRecord& r = records.front();
      data.push_back({r.n, r.sigma, r.coord, r.mean_u, r.stderr_u});
    }
    if (scan.model == "w2w2" && scan.coord == 0) saved.w2w2_c1 = data;
    estimator::ExponentFit fit = estimator::fit_exponents(data);
    if (fit.delta_lambda < scan.lo || fit.delta_lambda > scan.hi) pass = false;
    detail << scan.model << "/w" << scan.coord + 1 << " dl=" << fmt(fit.delta_lambda) << " ";
  }
  report(2, "fitted n-exponents match the pole spectrum", pass, detail.str());
  return saved;
}

void criterion3(const std::vector<estimator::Measurement>& rows) {
  // U * sigma against 8 sqrt(pi) / (log n + 4 log 2 - gamma), one free scale.
  std::vector<double> y, m;
  for (const auto& r : rows) {
    y.push_back(r.U * r.sigma);
    m.push_back(8.0 * std::sqrt(std::numbers::pi) /
                (std::log(r.n) + 4.0 * std::log(2.0) - theory::kEulerGamma));
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    num += y[i] * m[i];
    den += m[i] * m[i];
  }
  const double scale = num / den;
  double worst = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i)
    worst = std::max(worst, std::abs(y[i] / (scale * m[i]) - 1.0));
  report(3, "case-2 decay matches the closed form after one rescale", worst <= 0.15,
         "max relative deviation " + fmt(worst) + ", scale " + fmt(scale));
}

// ---------------------------------------------------------------- criterion 4

void criterion4() {
  struct Run {
    std::string model;
    int coord;
    std::vector<double> grid;
    double a_const;     // schedule amplitude; larger values keep the
                        // scheduled sigma well above the |w_i| scale where
                        // the asymptotics hold
    double tolerance;   // max/min ratio bound
  };
  std::vector<double> full, high;
  for (double n = 1e4; n <= 1e10 + 1.0; n *= 10.0) full.push_back(n);
  for (double n = 1e6; n <= 1e10 + 1.0; n *= 10.0) high.push_back(n);
  const std::vector<Run> runs{
      {"w2w4", 0, full, 1.0, 1.20},  // case 3: constant sigma
      {"w2w4", 1, high, 2.0, 1.30},  // case 1
      {"w2w2", 0, high, 5.0, 1.30},  // case 2
  };

  bool pass = true;
  std::ostringstream detail;
  int run_index = 0;
  for (const Run& run : runs) {
    const TargetModel model = make_builtin_model(run.model, run.grid.back());
    const PoleSpectrum spec = builtin_spectrum(run.model);
    estimator::MeasureConfig cfg;
    cfg.sweeps = 1'000'000;
    cfg.seed = 400 + run_index++;
    auto rows = estimator::schedule_verification(model, spec, run.coord, run.grid, run.a_const, cfg);
    double lo = rows.front().U, hi = rows.front().U;
    for (const auto& r : rows) {
      lo = std::min(lo, r.U);
      hi = std::max(hi, r.U);
    }
    if (hi / lo > run.tolerance) pass = false;
    detail << run.model << "/w" << run.coord + 1 << " max/min=" << fmt(hi / lo) << " ";
  }
  report(4, "scheduled step sizes hold U constant across n", pass, detail.str());
}

// ---------------------------------------------------------------- criterion 5

void criterion5() {
  struct Group {
    std::string model;
    double n;
    std::vector<estimator::CellRequest> cells;
  };
  const std::vector<Group> groups{
      {"w2w2", 1e4, {{0, 1e2}, {0, 1e3}}},
      {"w2w2", 1e8, {{0, 1e2}, {0, 1e3}}},
      {"w2w4", 1e4, {{0, 1e2}, {0, 1e3}, {1, 1e2}, {1, 1e3}}},
      {"w2w4", 1e8, {{0, 1e2}, {0, 1e3}, {1, 1e2}, {1, 1e3}}},
  };
  oracle::QuadratureSpec qspec;
  qspec.u_rel_tol = 1e-4;

  bool pass = true;
  int checked = 0;
  double worst_pull = 0.0;
  std::ostringstream detail;
  int g = 0;
  for (const Group& group : groups) {
    auto records = measure(group.model, group.n, group.cells, 8'000'000, 500 + g++);
    const TargetModel model = make_builtin_model(group.model, group.n);
    for (const auto& r : records) {
      oracle::OracleValue exact = oracle::oracle_U(model, r.coord, r.sigma, qspec);
      const double band = std::sqrt(r.stderr_u * r.stderr_u + exact.error * exact.error);
      const double pull = std::abs(r.mean_u - exact.value) / band;
      worst_pull = std::max(worst_pull, pull);
      if (pull > 3.0) {
        pass = false;
        detail << group.model << "/w" << r.coord + 1 << " n=" << fmt(group.n)
               << " s=" << fmt(r.sigma) << " pull=" << fmt(pull) << " ";
      }
      ++checked;
    }
  }
  std::ostringstream summary;
  summary << checked << " cells, worst |mcmc - oracle| = " << fmt(worst_pull)
          << " combined stderr " << detail.str();
  report(5, "sampler agrees with the quadrature oracle within 3 stderr", pass && checked == 12,
         summary.str());
}

// ---------------------------------------------------------------- criterion 6

void criterion6() {
  using theory::FormulaId;
  struct Chain {
    std::string label;
    std::string model;
    FormulaId closed;
    int zi_coord;  // -1: quad_Z, else quad_Zi coordinate
  };
  const std::vector<Chain> chains{
      {"A_Z", "w2w2", FormulaId::AppendixA_Z, -1},
      {"A_Z1", "w2w2", FormulaId::AppendixA_Z1, 0},
      {"B_Z", "w2w4", FormulaId::AppendixB_Z, -1},
      {"B_Z1", "w2w4", FormulaId::AppendixB_Z1, 0},
      {"B_Z2", "w2w4", FormulaId::AppendixB_Z2, 1},
  };
  const std::vector<double> n_grid{1e4, 1e6, 1e8};

  bool pass = true;
  std::ostringstream detail;
  for (const Chain& chain : chains) {
    std::vector<double> dev;
    for (double n : n_grid) {
      const TargetModel model = make_builtin_model(chain.model, n);
      const double quad = chain.zi_coord < 0 ? oracle::quad_Z(model).value
                                             : oracle::quad_Zi(model, chain.zi_coord).value;
      dev.push_back(std::abs(quad / theory::appendix_Z_closed(n, chain.closed) - 1.0));
    }
    const bool monotone = dev[0] > dev[1] && dev[1] > dev[2];
    const bool small = dev[2] <= 0.10;
    if (!monotone || !small) pass = false;
    detail << chain.label << " dev=" << fmt(dev[0]) << ">" << fmt(dev[1]) << ">" << fmt(dev[2])
           << " ";
  }
  report(6, "quadrature converges to the closed-form asymptotics", pass, detail.str());
}

// ---------------------------------------------------------------- criterion 7

void criterion7() {
  using theory::FormulaId;
  bool pass = true;
  std::ostringstream detail;
  double worst = 0.0;
  auto check = [&](double lhs, double rhs) {
    const double rel = std::abs(lhs / rhs - 1.0);
    worst = std::max(worst, rel);
    if (rel > 1e-12) pass = false;
  };

  const PoleSpectrum w2w2 = builtin_spectrum("w2w2");
  const PoleSpectrum w2w4 = builtin_spectrum("w2w4");
  for (double n : {1e4, 1e6, 1e8, 1e10}) {
    for (double sigma : {1e-2, 1.0, 1e2, 1e4}) {
      // U_i = (4 sqrt 2 / sigma) Z_i / Z across both appendix families.
      check(theory::appendixA_U1(n, sigma),
            theory::kFourSqrtTwo / sigma * theory::appendix_Z_closed(n, FormulaId::AppendixA_Z1) /
                theory::appendix_Z_closed(n, FormulaId::AppendixA_Z));
      check(theory::appendixB_U1(sigma),
            theory::kFourSqrtTwo / sigma * theory::appendix_Z_closed(n, FormulaId::AppendixB_Z1) /
                theory::appendix_Z_closed(n, FormulaId::AppendixB_Z));
      check(theory::appendixB_U2(n, sigma),
            theory::kFourSqrtTwo / sigma * theory::appendix_Z_closed(n, FormulaId::AppendixB_Z2) /
                theory::appendix_Z_closed(n, FormulaId::AppendixB_Z));
      // Exact 1/sigma scaling of the theorem across all coordinates.
      for (auto [spec, coord] : {std::pair{&w2w2, 0}, {&w2w4, 0}, {&w2w4, 1}})
        check(2.0 * theory::theorem1_U(n, 2.0 * sigma, *spec, coord),
              theory::theorem1_U(n, sigma, *spec, coord));
    }
    // Scheduled sigma closes Theorem 1 at U = 1 for every case.
    for (auto [spec, coord] : {std::pair{&w2w2, 0}, {&w2w4, 0}, {&w2w4, 1}}) {
      const auto sched = theory::classify_case(*spec, coord);
      const double s = theory::schedule_sigma(sched, *spec, coord, n, 2.5);
      check(theory::theorem1_U(n, s, *spec, coord, 2.5), 1.0);
    }
  }
  detail << "worst relative defect " << fmt(worst);
  report(7, "closed forms satisfy their algebraic identities to 1e-12", pass, detail.str());
}

// ---------------------------------------------------------------- criterion 8

bool prop_detailed_balance(std::ostringstream& log) {
  const std::array<double, 3> weight{0.2, 0.5, 0.3};
  PriorSpec prior = PriorSpec::custom(
      [weight](std::span<const double> w) {
        const double x = w[0];
        if (x < -1.5 || x > 1.5) return -std::numeric_limits<double>::infinity();
        return std::log(weight[static_cast<std::size_t>(x < -0.5 ? 0 : (x < 0.5 ? 1 : 2))]);
      },
      [](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> u(-1.5, 1.5);
        return std::vector<double>{u(rng)};
      });
  const TargetModel model = make_flat_model(1, prior, 1.0);
  ChainState state = ChainState::make(model, {0.0});
  std::mt19937_64 rng = make_stream(801, 0);
  auto cell_of = [](double x) { return x < -0.5 ? 0 : (x < 0.5 ? 1 : 2); };
  std::array<std::array<long, 3>, 3> counts{};
  const long steps = 1'000'000;
  int prev = 1;
  for (long t = 0; t < steps; ++t) {
    metropolis_step(model, state, {0, 1.0}, rng);
    const int cur = cell_of(state.w[0]);
    counts[static_cast<std::size_t>(prev)][static_cast<std::size_t>(cur)] += 1;
    prev = cur;
  }
  double worst = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b)
      worst = std::max(worst, std::abs(counts[a][b] - counts[b][a]) / static_cast<double>(steps));
  log << "balance=" << fmt(worst) << " ";
  return worst < 1e-2;
}

bool prop_shift_invariance(std::ostringstream& log) {
  auto base_log = [](std::span<const double> w) { return -0.5 * (w[0] * w[0] + w[1] * w[1]); };
  auto sampler = [](std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    return std::vector<double>{g(rng), g(rng)};
  };
  auto f = [](std::span<const double> w) { return w[0] * w[0] * w[1] * w[1]; };
  const TargetModel m0("m0", 2, f, PriorSpec::custom(base_log, sampler), 1e3);
  const TargetModel m5(
      "m5", 2, f,
      PriorSpec::custom([base_log](std::span<const double> w) { return base_log(w) + 5.0; },
                        sampler),
      1e3);
  std::mt19937_64 r1 = make_stream(802, 0);
  std::mt19937_64 r2 = make_stream(802, 0);
  const std::vector<ProposalSpec> props{{0, 1.0}, {1, 1.0}};
  ChainResult a = run_chain(m0, {0.2, -0.4}, props, 50000, 0, r1);
  ChainResult b = run_chain(m5, {0.2, -0.4}, props, 50000, 0, r2);
  const bool ok = a.state.w == b.state.w && a.records[0].mean_u == b.records[0].mean_u;
  log << "shift=" << (ok ? "exact" : "BROKEN") << " ";
  return ok;
}

bool prop_rejection_immutability(std::ostringstream& log) {
  const TargetModel model = make_builtin_model("w2w4", 1e12);
  ChainState state = ChainState::make(model, {0.4, 0.6});
  std::mt19937_64 rng = make_stream(803, 0);
  long rejects = 0;
  for (int t = 0; t < 5000; ++t) {
    const std::vector<double> before = state.w;
    StepResult r = metropolis_step(model, state, {t % 2, 5.0}, rng);
    if (!r.accepted) {
      ++rejects;
      if (state.w != before) {
        log << "rejection=BROKEN ";
        return false;
      }
    }
  }
  log << "rejection=clean(" << rejects << ") ";
  return rejects > 1000;
}

bool prop_run_determinism(std::ostringstream& log) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "singular_mcmc_acceptance";
  fs::create_directories(dir);
  experiment::ExperimentConfig c;
  c.mode = "sample";
  c.model = "w2w4";
  c.coords = {1, 2};
  c.n_grid = {1e4};
  c.sigma_grid = {10.0};
  c.sweeps = 50000;
  c.seed = 804;
  c.output = (dir / "rep_a.csv").string();
  experiment::run(c);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string first = slurp(c.output);
  c.output = (dir / "rep_b.csv").string();
  experiment::run(c);
  const bool ok = !first.empty() && slurp(c.output) == first;
  log << "determinism=" << (ok ? "byte-identical" : "BROKEN") << " ";
  return ok;
}

bool prop_fit_recovery(std::ostringstream& log) {
  const PoleSpectrum spec = builtin_spectrum("w2w4");
  std::vector<estimator::Measurement> data;
  for (double n = 1e4; n <= 1e10 + 1.0; n *= 10.0)
    data.push_back({n, 50.0, 1, theory::theorem1_U(n, 50.0, spec, 1), 0.0});
  estimator::ExponentFit fit = estimator::fit_exponents(data);
  const bool ok =
      std::abs(fit.delta_lambda - 0.25) < 1e-10 && std::abs(fit.delta_m - 1.0) < 1e-10;
  log << "fit(dl=" << fmt(fit.delta_lambda) << ",dm=" << fmt(fit.delta_m) << ")";
  return ok;
}

void criterion8() {
  std::ostringstream log;
  bool pass = true;
  pass &= prop_detailed_balance(log);
  pass &= prop_shift_invariance(log);
  pass &= prop_rejection_immutability(log);
  pass &= prop_run_determinism(log);
  pass &= prop_fit_recovery(log);
  report(8, "sampler and estimator property suite", pass, log.str());
}

}  // namespace

int main() {
  criterion1();
  ExponentScan scan = criterion2();
  criterion3(scan.w2w2_c1);
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  std::printf("%s: %d/8 criteria passed\n", g_failures == 0 ? "SUCCESS" : "FAILURE",
              8 - g_failures);
  return g_failures;
}
