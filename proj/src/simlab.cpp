#include "blockmax/simlab.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace blockmax {

namespace {

const std::set<std::string> kEstimatorKinds = {"sliding", "disjoint", "agg",
                                               "bc_naive", "bc_agg",   "bc_reg"};

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// One concrete estimator cell of the experiment: a named estimator at one
// x-axis block size, with its derived block-size set.
struct Cell {
  std::string kind;
  int m = 0;
  std::vector<int> M;  // aggregation set where applicable
  int m_prime = 1;
};

WeightScheme make_weights(const std::vector<int>& M, WeightKind kind) {
  return kind == WeightKind::harmonic ? harmonic_weights(M) : uniform_weights(M);
}

}  // namespace

void ExperimentSpec::validate() const {
  if (!model.has_value()) throw std::invalid_argument("experiment: model not set");
  if (n < 2) throw std::invalid_argument("experiment: n must be >= 2");
  if (reps < 1) throw std::invalid_argument("experiment: reps must be >= 1");
  if (grid.empty()) throw std::invalid_argument("experiment: empty grid");
  if (m_values.empty()) throw std::invalid_argument("experiment: empty m set");
  if (estimators.empty()) throw std::invalid_argument("experiment: empty estimator list");
  if (agg_width < 1) throw std::invalid_argument("experiment: agg_width must be >= 1");
  if (workers < 1) throw std::invalid_argument("experiment: workers must be >= 1");
  for (const std::string& e : estimators)
    if (!kEstimatorKinds.count(e))
      throw std::invalid_argument("experiment: unknown estimator '" + e + "'");
  for (int m : m_values) {
    if (m < 1 || m + agg_width - 1 > n)
      throw std::invalid_argument("experiment: block size " + std::to_string(m) +
                                  " invalid against n");
  }
  const int d = model->base->dim();
  for (const Point& u : grid)
    if (static_cast<int>(u.size()) != d)
      throw std::invalid_argument("experiment: grid dimension mismatch");
}

namespace {

std::vector<Cell> expand_cells(const ExperimentSpec& spec) {
  std::vector<Cell> cells;
  for (const std::string& kind : spec.estimators) {
    for (int m : spec.m_values) {
      const bool bias_corrected = kind.rfind("bc_", 0) == 0;
      if (bias_corrected && m == spec.bc_m_prime) continue;  // x-axis starts past m'
      Cell c{kind, m, {}, spec.bc_m_prime};
      if (kind == "agg" || kind == "bc_agg") {
        c.M = block_range(m, m + spec.agg_width - 1);
      } else if (kind == "bc_reg") {
        c.M = block_range(m, m + spec.agg_width - 1);
        c.M.insert(c.M.begin(), spec.bc_m_prime);
      }
      if (kind == "bc_agg")
        for (int k : c.M)
          if (k == spec.bc_m_prime)
            throw std::invalid_argument("experiment: bc_agg window contains m'");
      cells.push_back(std::move(c));
    }
  }
  return cells;
}

// block sizes the sliding value table must cover
std::vector<int> sliding_sizes_needed(const ExperimentSpec& spec,
                                      const std::vector<Cell>& cells, bool need_rho) {
  std::set<int> sizes;
  for (const Cell& c : cells) {
    if (c.kind == "disjoint") continue;
    sizes.insert(c.m);
    if (c.kind.rfind("bc_", 0) == 0) sizes.insert(c.m_prime);
    for (int k : c.M) sizes.insert(k);
  }
  if (need_rho)
    for (int k : spec.rho_cfg.M) sizes.insert(k);
  return {sizes.begin(), sizes.end()};
}

}  // namespace

SummaryTable run(const ExperimentSpec& spec, bool keep_point_rows) {
  spec.validate();
  const MovingMaxSpec& model = *spec.model;
  const CopulaPtr truth_model = attractor_of(model);  // throws when unavailable

  const std::vector<Cell> cells = expand_cells(spec);
  const size_t n_cells = cells.size();
  const size_t n_grid = spec.grid.size();

  bool need_rho = false;
  for (const Cell& c : cells)
    if (c.kind.rfind("bc_", 0) == 0 && spec.rho.penalized) need_rho = true;
  RhoConfig rho_cfg = spec.rho_cfg;
  if (need_rho && rho_cfg.M.empty())
    rho_cfg = RhoConfig::simulation_defaults(model.base->dim());
  if (need_rho) rho_cfg.validate();

  const std::vector<int> sliding_sizes = sliding_sizes_needed(spec, cells, need_rho);
  std::vector<int> disjoint_sizes;
  for (const Cell& c : cells)
    if (c.kind == "disjoint") disjoint_sizes.push_back(c.m);
  std::sort(disjoint_sizes.begin(), disjoint_sizes.end());
  disjoint_sizes.erase(std::unique(disjoint_sizes.begin(), disjoint_sizes.end()),
                       disjoint_sizes.end());

  // evaluation points: experiment grid first, then the rho aggregation set
  std::vector<Point> eval_points = spec.grid;
  const size_t rho_offset = eval_points.size();
  if (need_rho)
    eval_points.insert(eval_points.end(), rho_cfg.U.begin(), rho_cfg.U.end());

  const WeightScheme rho_ws =
      need_rho ? (rho_cfg.weights.empty() ? harmonic_weights(rho_cfg.M)
                                          : WeightScheme(rho_cfg.M, rho_cfg.weights))
               : harmonic_weights({1, 2});

  // per-replication storage so the reduction order never depends on workers
  std::vector<std::vector<double>> rep_values(
      static_cast<size_t>(spec.reps),
      std::vector<double>(n_cells * n_grid, std::numeric_limits<double>::quiet_NaN()));
  std::vector<std::vector<uint8_t>> rep_ok(
      static_cast<size_t>(spec.reps), std::vector<uint8_t>(n_cells, 0));

  const auto run_replication = [&](long r) {
    RngStream rng = RngStream::substream(spec.master_seed, static_cast<uint64_t>(r));
    const Matrix data = generate(model, spec.n, rng);
    const ValueTable sliding(data, sliding_sizes, eval_points, BlockScheme::sliding);
    std::optional<ValueTable> disjoint;
    if (!disjoint_sizes.empty())
      disjoint.emplace(data, disjoint_sizes, spec.grid, BlockScheme::disjoint);

    // second-order parameter: one estimate per replication, shared by all
    // bias-corrected estimators (mirrors the simulation protocol)
    double rho_hat = spec.rho.fixed_value;
    bool rho_ok = true;
    if (need_rho) {
      double acc = 0.0;
      long used = 0;
      std::vector<double> ys(rho_cfg.M.size());
      for (size_t ui = 0; ui < rho_cfg.U.size(); ++ui) {
        for (size_t i = 0; i < rho_cfg.M.size(); ++i)
          ys[i] = sliding.value(rho_cfg.M[i], rho_offset + ui);
        const Flagged f = rho_penalized_curve(rho_ws.block_set, ys, rho_ws.weights, rho_cfg);
        if (f.defined) {
          acc += f.value;
          ++used;
        }
      }
      rho_ok = used > 0;
      if (rho_ok) rho_hat = acc / static_cast<double>(used);
    }

    std::vector<double>& out = rep_values[static_cast<size_t>(r)];
    std::vector<uint8_t>& ok = rep_ok[static_cast<size_t>(r)];
    for (size_t ci = 0; ci < n_cells; ++ci) {
      const Cell& c = cells[ci];
      const bool bias_corrected = c.kind.rfind("bc_", 0) == 0;
      if (bias_corrected && spec.rho.penalized && !rho_ok) continue;  // cell fails
      try {
        for (size_t g = 0; g < n_grid; ++g) {
          double v;
          if (c.kind == "sliding") {
            v = sliding.value(c.m, g);
          } else if (c.kind == "disjoint") {
            v = disjoint->value(c.m, g);
          } else if (c.kind == "agg") {
            const WeightScheme ws = make_weights(c.M, spec.weights);
            v = 0.0;
            for (size_t i = 0; i < ws.block_set.size(); ++i)
              v += ws.weights[i] * sliding.value(ws.block_set[i], g);
          } else if (c.kind == "bc_naive") {
            v = bc_naive_value(sliding.value(c.m, g), sliding.value(c.m_prime, g), c.m,
                               c.m_prime, rho_hat);
          } else if (c.kind == "bc_agg") {
            const WeightScheme ws = make_weights(c.M, spec.weights);
            const double y_prime = sliding.value(c.m_prime, g);
            v = 0.0;
            for (size_t i = 0; i < ws.block_set.size(); ++i)
              v += ws.weights[i] * bc_naive_value(y_prime, sliding.value(ws.block_set[i], g),
                                                  c.m_prime, ws.block_set[i], rho_hat);
          } else {  // bc_reg
            const WeightScheme ws = make_weights(c.M, spec.weights);
            std::vector<double> ys(ws.block_set.size());
            for (size_t i = 0; i < ws.block_set.size(); ++i)
              ys[i] = sliding.value(ws.block_set[i], g);
            v = bc_regression_value(ws.block_set, ys, ws.weights,
                                    *std::min_element(ws.block_set.begin(),
                                                      ws.block_set.end()),
                                    rho_hat)
                    .c_inf;
          }
          out[ci * n_grid + g] = v;
        }
        ok[ci] = 1;
      } catch (const std::exception&) {
        ok[ci] = 0;  // per-cell failure, recorded below
      }
    }
  };

  if (spec.workers == 1) {
    for (long r = 0; r < spec.reps; ++r) run_replication(r);
  } else {
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    const int nw = static_cast<int>(std::min<long>(spec.workers, spec.reps));
    pool.reserve(static_cast<size_t>(nw));
    for (int w = 0; w < nw; ++w)
      pool.emplace_back([&] {
        for (;;) {
          const long r = next.fetch_add(1);
          if (r >= spec.reps) return;
          run_replication(r);
        }
      });
    for (std::thread& t : pool) t.join();
  }

  // ordered reduction
  std::vector<double> truth(n_grid);
  for (size_t g = 0; g < n_grid; ++g) truth[g] = truth_model->cdf(spec.grid[g]);

  SummaryTable table;
  for (size_t ci = 0; ci < n_cells; ++ci) {
    long n_ok = 0;
    for (long r = 0; r < spec.reps; ++r) n_ok += rep_ok[static_cast<size_t>(r)][ci];
    const long fails = spec.reps - n_ok;
    double avg_bias2 = 0.0, avg_var = 0.0;
    std::vector<double> pt_bias2(n_grid, 0.0), pt_var(n_grid, 0.0);
    if (n_ok > 0) {
      for (size_t g = 0; g < n_grid; ++g) {
        double sum = 0.0, sumsq = 0.0;
        for (long r = 0; r < spec.reps; ++r) {
          if (!rep_ok[static_cast<size_t>(r)][ci]) continue;
          const double v = rep_values[static_cast<size_t>(r)][ci * n_grid + g];
          sum += v;
          sumsq += v * v;
        }
        const double mean = sum / static_cast<double>(n_ok);
        const double var = sumsq / static_cast<double>(n_ok) - mean * mean;
        const double bias2 = (mean - truth[g]) * (mean - truth[g]);
        pt_bias2[g] = bias2;
        pt_var[g] = var;
        avg_bias2 += bias2;
        avg_var += var;
      }
      avg_bias2 /= static_cast<double>(n_grid);
      avg_var /= static_cast<double>(n_grid);
    }
    const Cell& c = cells[ci];
    const double s = spec.scale;
    table.rows.push_back({spec.name, c.kind, c.m, "bias2", s * avg_bias2});
    table.rows.push_back({spec.name, c.kind, c.m, "var", s * avg_var});
    table.rows.push_back({spec.name, c.kind, c.m, "mse", s * (avg_bias2 + avg_var)});
    if (fails > 0) {
      const double rate = static_cast<double>(fails) / static_cast<double>(spec.reps);
      table.rows.push_back({spec.name, c.kind, c.m, "fail_rate", rate});
      if (rate > 0.01)
        std::cerr << "[blockmax] warning: estimator " << c.kind << " at m=" << c.m
                  << " failed in " << fails << "/" << spec.reps << " replications\n";
    }
    if (keep_point_rows) {
      for (size_t g = 0; g < n_grid; ++g) {
        table.point_rows.push_back(
            {spec.name, c.kind, c.m, spec.grid[g], "bias2", s * pt_bias2[g]});
        table.point_rows.push_back(
            {spec.name, c.kind, c.m, spec.grid[g], "var", s * pt_var[g]});
        table.point_rows.push_back({spec.name, c.kind, c.m, spec.grid[g], "mse",
                                    s * (pt_bias2[g] + pt_var[g])});
      }
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// presets
// ---------------------------------------------------------------------------

namespace {

const double kBetaStudy = std::log(2.0) / std::log(2.0 - 0.25);

Matrix lag_row(const std::vector<double>& coeffs) {
  Matrix m(1, static_cast<long>(coeffs.size()));
  for (size_t j = 0; j < coeffs.size(); ++j) m(0, static_cast<long>(j)) = coeffs[j];
  return m;
}

std::vector<double> alternating_lag(int d) {
  std::vector<double> a(static_cast<size_t>(d));
  for (int j = 0; j < d; ++j) a[static_cast<size_t>(j)] = (j % 2 == 0) ? 0.25 : 0.75;
  return a;
}

std::vector<Point> preset_grid(int d) {
  if (d == 2) return tensor_grid(axis(0.1, 0.9, 0.1), 2);
  if (d == 4) return tensor_grid({0.25, 0.50, 0.75}, 4);
  return tensor_grid({0.25, 0.75}, 8);
}

}  // namespace

ExperimentSpec preset(const std::string& name) {
  CopulaPtr base;
  std::vector<double> lag;
  int d = 2;
  if (name == "M1" || name == "M2") {
    base = std::make_shared<OuterPowerClayton>(1.0, kBetaStudy, 2);
  } else if (name == "M3" || name == "M4") {
    base = std::make_shared<TCopula>(5, 0.5, 2);
  } else if (name == "M5") {
    base = std::make_shared<TCopula>(3, 0.25, 2);
  } else if (name == "M6" || name == "M7") {
    d = 4;
    base = std::make_shared<OuterPowerClayton>(1.0, kBetaStudy, 4);
  } else if (name == "M8" || name == "M9") {
    d = 4;
    base = std::make_shared<TCopula>(5, 0.5, 4);
  } else if (name == "M10") {
    d = 4;
    base = std::make_shared<TCopula>(3, 0.25, 4);
  } else if (name == "M11" || name == "M12") {
    d = 8;
    base = std::make_shared<OuterPowerClayton>(1.0, kBetaStudy, 8);
  } else if (name == "M13" || name == "M14") {
    d = 8;
    base = std::make_shared<TCopula>(5, 0.5, 8);
  } else if (name == "M15") {
    d = 8;
    base = std::make_shared<TCopula>(3, 0.25, 8);
  } else {
    throw std::invalid_argument("unknown preset '" + name + "' (expected M1..M15)");
  }
  const bool moving = name == "M2" || name == "M4" || name == "M5" || name == "M7" ||
                      name == "M9" || name == "M10" || name == "M12" || name == "M14" ||
                      name == "M15";
  if (moving) lag = d == 2 ? std::vector<double>{0.25, 0.5} : alternating_lag(d);

  ExperimentSpec spec;
  spec.name = name;
  spec.model = moving ? MovingMaxSpec(base, lag_row(lag)) : MovingMaxSpec::iid(base);
  spec.n = 1000;
  spec.reps = 200;  // desk scale; the study's full scale is 1000
  spec.grid = preset_grid(d);
  spec.m_values = block_range(1, 20);
  spec.estimators = {"sliding", "disjoint", "agg", "bc_naive", "bc_agg", "bc_reg"};
  spec.rho_cfg = RhoConfig::simulation_defaults(d);
  return spec;
}

// ---------------------------------------------------------------------------
// csv / manifest
// ---------------------------------------------------------------------------

void emit(const SummaryTable& table, std::ostream& os) {
  os << "model,estimator,m,stat,value\n";
  for (const SummaryRow& r : table.rows)
    os << r.model << ',' << r.estimator << ',' << r.m << ',' << r.stat << ','
       << fmt17(r.value) << '\n';
}

void emit(const SummaryTable& table, const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("emit: cannot open '" + path + "' for writing");
  emit(table, os);
  if (!os.good()) throw std::runtime_error("emit: write failure on '" + path + "'");
}

void emit_points(const SummaryTable& table, const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("emit_points: cannot open '" + path + "'");
  os << "model,estimator,m,point,stat,value\n";
  for (const PointRow& r : table.point_rows) {
    os << r.model << ',' << r.estimator << ',' << r.m << ',';
    for (size_t j = 0; j < r.u.size(); ++j) os << (j ? ":" : "") << fmt17(r.u[j]);
    os << ',' << r.stat << ',' << fmt17(r.value) << '\n';
  }
  if (!os.good()) throw std::runtime_error("emit_points: write failure on '" + path + "'");
}

SummaryTable parse_summary(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("parse_summary: cannot open '" + path + "'");
  SummaryTable table;
  std::string line;
  if (!std::getline(is, line) || line != "model,estimator,m,stat,value")
    throw std::runtime_error("parse_summary: bad header in '" + path + "'");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    SummaryRow row;
    std::string m_str, value_str;
    if (!std::getline(ls, row.model, ',') || !std::getline(ls, row.estimator, ',') ||
        !std::getline(ls, m_str, ',') || !std::getline(ls, row.stat, ',') ||
        !std::getline(ls, value_str))
      throw std::runtime_error("parse_summary: bad row '" + line + "'");
    row.m = std::stoi(m_str);
    row.value = std::stod(value_str);
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string manifest_json(const ExperimentSpec& spec) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["name"] = spec.name;
  j["seed"] = spec.master_seed;
  j["n"] = spec.n;
  j["reps"] = spec.reps;
  j["scale"] = spec.scale;
  j["estimators"] = spec.estimators;
  j["m_values"] = spec.m_values;
  j["agg_width"] = spec.agg_width;
  j["bc_m_prime"] = spec.bc_m_prime;
  j["weights"] = spec.weights == WeightKind::harmonic ? "harmonic" : "uniform";
  j["rho"] = spec.rho.penalized ? "pen_agg" : ("fixed:" + fmt17(spec.rho.fixed_value));
  if (spec.model.has_value()) {
    nlohmann::json model;
    for (const auto& [k, v] : spec.model->base->descriptor()) model[k] = v;
    model["p"] = spec.model->order;
    std::vector<std::vector<double>> lags;
    for (long i = 0; i < spec.model->lag_coeffs.rows(); ++i) {
      std::vector<double> row;
      for (long jj = 0; jj < spec.model->lag_coeffs.cols(); ++jj)
        row.push_back(spec.model->lag_coeffs(i, jj));
      lags.push_back(std::move(row));
    }
    model["lag_coeffs"] = lags;
    j["model"] = model;
  }
  j["grid_points"] = spec.grid.size();
  return j.dump(2) + "\n";
}

void write_manifest(const ExperimentSpec& spec, const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("write_manifest: cannot open '" + path + "'");
  os << manifest_json(spec);
}

Matrix read_data_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_data_csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("read_data_csv: empty file '" + path + "'");
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) row.push_back(std::stod(tok));
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("read_data_csv: ragged rows in '" + path + "'");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("read_data_csv: no data rows in '" + path + "'");
  Matrix m(static_cast<long>(rows.size()), static_cast<long>(rows.front().size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t jj = 0; jj < rows[i].size(); ++jj)
      m(static_cast<long>(i), static_cast<long>(jj)) = rows[i][jj];
  return m;
}

void write_data_csv(const Matrix& data, const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("write_data_csv: cannot open '" + path + "'");
  for (long j = 0; j < data.cols(); ++j) os << (j ? "," : "") << "x" << (j + 1);
  os << '\n';
  for (long i = 0; i < data.rows(); ++i) {
    for (long j = 0; j < data.cols(); ++j) os << (j ? "," : "") << fmt17(data(i, j));
    os << '\n';
  }
}

}  // namespace blockmax
