#include "singular_mcmc/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "singular_mcmc/oracle.hpp"
#include "singular_mcmc/rng.hpp"
#include "singular_mcmc/theory.hpp"

namespace singular_mcmc::experiment {

using nlohmann::json;

namespace {

const char* kCsvHeader = "model,coord,n,sigma,U,stderr,source,seed,sweeps";

int worker_count() {
  if (const char* env = std::getenv("SINGULAR_MCMC_THREADS")) {
    int k = std::atoi(env);
    if (k >= 1) return k;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

//! Deterministic fan-out: results are produced into a pre-sized slot array,
//! so the output order never depends on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  int workers = std::min<std::size_t>(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = static_cast<std::size_t>(w); i < count; i += static_cast<std::size_t>(workers))
          body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << data;
}

std::vector<double> default_n_grid() {
  return {1e4, 1e5, 1e6, 1e7, 1e8, 1e9, 1e10};
}

std::vector<double> default_sigma_grid() {
  std::vector<double> g;
  for (int k = 0; k <= 8; ++k) g.push_back(std::pow(10.0, 0.5 * k));
  return g;
}

std::string csv_row(const ResultRow& r) {
  std::ostringstream ss;
  ss << r.model << ',' << r.coord << ',' << format_double(r.n) << ',' << format_double(r.sigma)
     << ',' << format_double(r.U) << ',';
  if (r.stderr_u) ss << format_double(*r.stderr_u);
  ss << ',' << r.source << ',' << r.seed << ',' << r.sweeps;
  return ss.str();
}

estimator::MeasureConfig measure_config(const ExperimentConfig& c, std::uint64_t cell_seed) {
  estimator::MeasureConfig mc;
  mc.sweeps = c.sweeps;
  mc.burn_in = c.burn_in;
  mc.swap_interval = c.swap_interval;
  mc.ladder_base = c.ladder.base;
  mc.ladder_ratio = c.ladder.ratio;
  if (c.ladder.type == "explicit") mc.ladder = c.ladder.values;
  mc.seed = cell_seed;
  return mc;
}

std::uint64_t cell_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master + 0x51ed2701u;
  for (std::uint64_t i = 0; i <= index; ++i) splitmix64(s);
  return splitmix64(s);
}

//! The exact closed-form acceptance rate for a builtin (model, coordinate).
std::pair<double, theory::FormulaId> closed_form_U(const std::string& model, int coord0, double n,
                                                   double sigma) {
  if (model == "w2w2") return {theory::appendixA_U1(n, sigma), theory::FormulaId::AppendixA_U1};
  if (coord0 == 0) return {theory::appendixB_U1(sigma), theory::FormulaId::AppendixB_U1};
  return {theory::appendixB_U2(n, sigma), theory::FormulaId::AppendixB_U2};
}

struct OutputCollector {
  std::vector<std::string> lines;

  explicit OutputCollector(const std::string& header) { lines.push_back(header); }
  std::string str() const {
    std::string out;
    for (const std::string& l : lines) {
      out += l;
      out += '\n';
    }
    return out;
  }
};

void write_manifest(const ExperimentConfig& config, const std::vector<std::string>& outputs,
                    const std::string& status) {
  json m;
  m["schema_version"] = 1;
  m["config"] = config.to_json();
  m["status"] = status;
  m["outputs"] = json::array();
  for (const std::string& path : outputs) {
    json o;
    o["path"] = path;
    std::ostringstream hex;
    hex << std::hex << fnv1a64(read_file(path));
    o["fnv1a64"] = hex.str();
    m["outputs"].push_back(o);
  }
  write_file(config.output + ".manifest.json", m.dump(2) + "\n");
}

struct Cell {
  int coord0;
  double n;
  double sigma;
};

std::vector<Cell> grid_cells(const ExperimentConfig& c) {
  std::vector<Cell> cells;
  for (int coord : c.coords)
    for (double n : c.n_grid)
      for (double sigma : c.sigma_grid) cells.push_back({coord - 1, n, sigma});
  return cells;
}

void run_sample(const ExperimentConfig& c, OutputCollector& out) {
  PoleSpectrum spec = builtin_spectrum(c.model);
  // one replica run per n value, measuring every (coord, sigma) cell at once
  std::vector<std::vector<ResultRow>> per_n(c.n_grid.size());
  parallel_for(c.n_grid.size(), [&](std::size_t i) {
    double n = c.n_grid[i];
    TargetModel model = make_builtin_model(c.model, n);
    std::vector<estimator::CellRequest> cells;
    for (int coord : c.coords)
      for (double sigma : c.sigma_grid) cells.push_back({coord - 1, sigma});
    std::uint64_t s = cell_seed(*c.seed, i);
    auto records = estimator::measure_cells(model, spec, cells, measure_config(c, s));
    for (const AcceptanceRecord& r : records)
      per_n[i].push_back(ResultRow{c.model, r.coord + 1, n, r.sigma, r.mean_u, r.stderr_u, "mcmc", s,
                                   c.sweeps});
  });
  for (int coord : c.coords)
    for (std::size_t i = 0; i < c.n_grid.size(); ++i)
      for (const ResultRow& r : per_n[i])
        if (r.coord == coord) out.lines.push_back(csv_row(r));
}

void run_theory(const ExperimentConfig& c, OutputCollector& out) {
  for (const Cell& cell : grid_cells(c)) {
    auto [u, id] = closed_form_U(c.model, cell.coord0, cell.n, cell.sigma);
    out.lines.push_back(csv_row(ResultRow{c.model, cell.coord0 + 1, cell.n, cell.sigma, u,
                                          std::nullopt, "theory:" + theory::formula_name(id), *c.seed,
                                          0}));
  }
}

void run_oracle(const ExperimentConfig& c, OutputCollector& out) {
  std::vector<Cell> cells = grid_cells(c);
  std::vector<std::string> lines(cells.size());
  parallel_for(cells.size(), [&](std::size_t i) {
    const Cell& cell = cells[i];
    TargetModel model = make_builtin_model(c.model, cell.n);
    oracle::OracleValue u = oracle::oracle_U(model, cell.coord0, cell.sigma);
    oracle::OracleValue z = oracle::quad_Z(model);
    oracle::OracleValue zi = oracle::quad_Zi(model, cell.coord0);
    std::ostringstream ss;
    ss << c.model << ',' << cell.coord0 + 1 << ',' << format_double(cell.n) << ','
       << format_double(cell.sigma) << ',' << format_double(u.value) << ',' << format_double(u.error)
       << ',' << format_double(z.value) << ',' << format_double(z.error) << ','
       << format_double(zi.value) << ',' << format_double(zi.error);
    lines[i] = ss.str();
  });
  out.lines.assign(1, "model,coord,n,sigma,U,U_err,Z,Z_err,Zi,Zi_err");
  out.lines.insert(out.lines.end(), lines.begin(), lines.end());
}

void run_schedule(const ExperimentConfig& c, OutputCollector& out) {
  PoleSpectrum spec = builtin_spectrum(c.model);
  for (int coord : c.coords) {
    TargetModel model = make_builtin_model(c.model, c.n_grid.back());
    auto rows = estimator::schedule_verification(model, spec, coord - 1, c.n_grid, c.a_const,
                                                 measure_config(c, *c.seed));
    for (const auto& r : rows)
      out.lines.push_back(csv_row(
          ResultRow{c.model, coord, r.n, r.sigma_scheduled, r.U, r.stderr_u, "mcmc", *c.seed, c.sweeps}));
  }
}

json fit_to_json(const estimator::ExponentFit& fit) {
  json j;
  j["delta_lambda"] = fit.delta_lambda;
  j["delta_m"] = fit.delta_m;
  j["intercept"] = fit.intercept;
  j["residual_rms"] = fit.residual_rms;
  j["covariance"] = json::array();
  for (const auto& row : fit.covariance) j["covariance"].push_back(std::vector<double>(row.begin(), row.end()));
  return j;
}

//! fig1: U vs sigma at the largest n; fig2: U vs n at the first sigma;
//! fig3: U vs n under the constant-acceptance schedule. The theory column is
//! the main-term curve rescaled to match the simulation at the right
//! endpoint.
void run_fig(const ExperimentConfig& c, OutputCollector& out) {
  PoleSpectrum spec = builtin_spectrum(c.model);
  out.lines.assign(1, "model,coord,x,U_mcmc,stderr,U_theory");

  for (int coord : c.coords) {
    int coord0 = coord - 1;
    std::vector<double> xs;
    std::vector<ResultRow> rows;
    if (c.mode == "fig1") {
      double n = c.n_grid.back();
      TargetModel model = make_builtin_model(c.model, n);
      std::vector<estimator::CellRequest> cells;
      for (double sigma : c.sigma_grid) cells.push_back({coord0, sigma});
      auto records =
          estimator::measure_cells(model, spec, cells, measure_config(c, cell_seed(*c.seed, coord)));
      std::vector<double> theory_vals;
      for (const auto& r : records) {
        xs.push_back(r.sigma);
        rows.push_back(ResultRow{c.model, coord, n, r.sigma, r.mean_u, r.stderr_u, "mcmc", *c.seed,
                                 c.sweeps});
        theory_vals.push_back(theory::theorem1_U(n, r.sigma, spec, coord0));
      }
      double anchor = rows.back().U / theory_vals.back();
      for (std::size_t i = 0; i < rows.size(); ++i) {
        std::ostringstream ss;
        ss << c.model << ',' << coord << ',' << format_double(xs[i]) << ','
           << format_double(rows[i].U) << ',' << format_double(*rows[i].stderr_u) << ','
           << format_double(theory_vals[i] * anchor);
        out.lines.push_back(ss.str());
      }
    } else if (c.mode == "fig2") {
      double sigma = c.sigma_grid.front();
      std::vector<std::pair<ResultRow, double>> collected(c.n_grid.size());
      parallel_for(c.n_grid.size(), [&](std::size_t i) {
        double n = c.n_grid[i];
        TargetModel model = make_builtin_model(c.model, n);
        std::uint64_t s = cell_seed(*c.seed, coord * 100 + i);
        auto m = estimator::measure_U(model, spec, coord0, sigma, measure_config(c, s));
        collected[i] = {ResultRow{c.model, coord, n, sigma, m.U, m.stderr_u, "mcmc", s, c.sweeps},
                        theory::theorem1_U(n, sigma, spec, coord0)};
      });
      double anchor = collected.back().first.U / collected.back().second;
      for (std::size_t i = 0; i < collected.size(); ++i) {
        std::ostringstream ss;
        ss << c.model << ',' << coord << ',' << format_double(c.n_grid[i]) << ','
           << format_double(collected[i].first.U) << ',' << format_double(*collected[i].first.stderr_u)
           << ',' << format_double(collected[i].second * anchor);
        out.lines.push_back(ss.str());
      }
    } else {  // fig3
      TargetModel model = make_builtin_model(c.model, c.n_grid.back());
      auto sched = estimator::schedule_verification(model, spec, coord0, c.n_grid, c.a_const,
                                                    measure_config(c, cell_seed(*c.seed, coord)));
      double anchor = sched.back().U;
      for (const auto& r : sched) {
        std::ostringstream ss;
        ss << c.model << ',' << coord << ',' << format_double(r.n) << ',' << format_double(r.U) << ','
           << format_double(r.stderr_u) << ',' << format_double(anchor);
        out.lines.push_back(ss.str());
      }
    }
  }
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

void ExperimentConfig::validate() const {
  static const std::vector<std::string> modes = {"sample", "theory", "oracle",  "fit", "tune",
                                                 "schedule", "fig1",  "fig2", "fig3"};
  if (std::find(modes.begin(), modes.end(), mode) == modes.end())
    throw std::invalid_argument("config: unknown mode '" + mode + "'");
  if (!seed) throw std::invalid_argument("config: seed is required (no wall-clock default)");
  if (mode != "fit" && !is_builtin_model(model))
    throw std::invalid_argument("config: unknown model '" + model + "'");
  if (coords.empty()) throw std::invalid_argument("config: coords must be non-empty");
  for (int c : coords)
    if (c < 1 || c > 2) throw std::invalid_argument("config: coords are 1-based indices (1 or 2)");
  if (n_grid.empty() || sigma_grid.empty())
    throw std::invalid_argument("config: n_grid and sigma_grid must be non-empty");
  for (double n : n_grid)
    if (!(n > 0.0)) throw std::invalid_argument("config: n_grid values must be positive");
  for (double s : sigma_grid)
    if (!(s > 0.0)) throw std::invalid_argument("config: sigma_grid values must be positive");
  if (sweeps <= 0) throw std::invalid_argument("config: sweeps must be positive");
  if (mode == "fit" && input.empty()) throw std::invalid_argument("config: fit mode requires input");
  if (!(target_u > 0.0 && target_u < 1.0))
    throw std::invalid_argument("config: target_u must lie in (0, 1)");
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  c.n_grid = default_n_grid();
  c.sigma_grid = default_sigma_grid();
  if (j.contains("mode")) c.mode = j["mode"].get<std::string>();
  if (j.contains("model")) c.model = j["model"].get<std::string>();
  if (j.contains("coords")) c.coords = j["coords"].get<std::vector<int>>();
  if (j.contains("n_grid")) c.n_grid = j["n_grid"].get<std::vector<double>>();
  if (j.contains("sigma_grid")) c.sigma_grid = j["sigma_grid"].get<std::vector<double>>();
  if (j.contains("sweeps")) c.sweeps = j["sweeps"].get<long>();
  if (j.contains("burn_in")) c.burn_in = j["burn_in"].get<long>();
  if (j.contains("swap_interval")) c.swap_interval = j["swap_interval"].get<long>();
  if (j.contains("ladder")) {
    const json& l = j["ladder"];
    if (l.contains("type")) c.ladder.type = l["type"].get<std::string>();
    if (l.contains("base")) c.ladder.base = l["base"].get<double>();
    if (l.contains("ratio")) c.ladder.ratio = l["ratio"].get<double>();
    if (l.contains("values")) c.ladder.values = l["values"].get<std::vector<double>>();
  }
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("output")) c.output = j["output"].get<std::string>();
  if (j.contains("input")) c.input = j["input"].get<std::string>();
  if (j.contains("target_u")) c.target_u = j["target_u"].get<double>();
  if (j.contains("a_const")) c.a_const = j["a_const"].get<double>();
  if (j.contains("tune")) {
    const json& t = j["tune"];
    if (t.contains("iterations")) c.tune.iterations = t["iterations"].get<int>();
    if (t.contains("sweeps_per_iteration"))
      c.tune.sweeps_per_iteration = t["sweeps_per_iteration"].get<long>();
    if (t.contains("a0")) c.tune.a0 = t["a0"].get<double>();
    if (t.contains("k0")) c.tune.k0 = t["k0"].get<int>();
    if (t.contains("sigma0")) c.tune.sigma0 = t["sigma0"].get<double>();
  }
  return c;
}

json ExperimentConfig::to_json() const {
  json j;
  j["mode"] = mode;
  j["model"] = model;
  j["coords"] = coords;
  j["n_grid"] = n_grid;
  j["sigma_grid"] = sigma_grid;
  j["sweeps"] = sweeps;
  j["burn_in"] = burn_in;
  j["swap_interval"] = swap_interval;
  j["ladder"]["type"] = ladder.type;
  j["ladder"]["base"] = ladder.base;
  j["ladder"]["ratio"] = ladder.ratio;
  j["ladder"]["values"] = ladder.values;
  if (seed) j["seed"] = *seed;
  j["output"] = output;
  j["input"] = input;
  j["target_u"] = target_u;
  j["a_const"] = a_const;
  j["tune"]["iterations"] = tune.iterations;
  j["tune"]["sweeps_per_iteration"] = tune.sweeps_per_iteration;
  j["tune"]["a0"] = tune.a0;
  j["tune"]["k0"] = tune.k0;
  j["tune"]["sigma0"] = tune.sigma0;
  return j;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config " + path + ": " + e.what());
  }
  return from_json(j);
}

std::vector<estimator::Measurement> read_measurement_csv(const std::string& path, int coord_1based) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  if (line.rfind("model,coord,n,sigma,U,stderr", 0) != 0)
    throw std::runtime_error(path + ": unexpected CSV header '" + line + "'");
  std::vector<estimator::Measurement> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() < 7)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed row");
    if (fields[6].rfind("mcmc", 0) != 0) continue;
    int coord = std::stoi(fields[1]);
    if (coord != coord_1based) continue;
    estimator::Measurement m;
    m.coord = coord - 1;
    m.n = std::stod(fields[2]);
    m.sigma = std::stod(fields[3]);
    m.U = std::stod(fields[4]);
    m.stderr_u = fields[5].empty() ? 0.0 : std::stod(fields[5]);
    rows.push_back(m);
  }
  return rows;
}

int run(const ExperimentConfig& config) {
  config.validate();
  std::vector<std::string> outputs;
  try {
    if (config.mode == "fit") {
      auto data = read_measurement_csv(config.input, config.coords.front());
      estimator::ExponentFit fit = estimator::fit_exponents(data);
      write_file(config.output, fit_to_json(fit).dump(2) + "\n");
      outputs.push_back(config.output);
    } else if (config.mode == "tune") {
      TargetModel model = make_builtin_model(config.model, config.n_grid.front());
      estimator::TuneConfig tc;
      tc.iterations = config.tune.iterations;
      tc.sweeps_per_iteration = config.tune.sweeps_per_iteration;
      tc.a0 = config.tune.a0;
      tc.k0 = config.tune.k0;
      tc.sigma0 = config.tune.sigma0;
      tc.seed = *config.seed;
      auto result = estimator::autotune_sigma(model, config.coords.front() - 1, config.target_u, tc);
      json j;
      j["sigma_star"] = result.sigma_star;
      j["achieved_U"] = result.achieved_U;
      j["stderr"] = result.stderr_u;
      j["model"] = config.model;
      j["coord"] = config.coords.front();
      j["n"] = config.n_grid.front();
      j["target_u"] = config.target_u;
      write_file(config.output, j.dump(2) + "\n");
      outputs.push_back(config.output);
    } else {
      OutputCollector out(kCsvHeader);
      if (config.mode == "sample")
        run_sample(config, out);
      else if (config.mode == "theory")
        run_theory(config, out);
      else if (config.mode == "oracle")
        run_oracle(config, out);
      else if (config.mode == "schedule")
        run_schedule(config, out);
      else
        run_fig(config, out);
      write_file(config.output, out.str());
      outputs.push_back(config.output);
    }
  } catch (...) {
    write_manifest(config, outputs, "partial");
    throw;
  }
  write_manifest(config, outputs, "ok");
  return 0;
}

}  // namespace singular_mcmc::experiment
