// Command-line lab for block-maxima copula estimation: Monte Carlo
// experiments, one-shot estimation on CSV data, asymptotic variance tables
// and second-order parameter estimation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "blockmax/asymptotics.hpp"
#include "blockmax/simlab.hpp"

namespace {

using namespace blockmax;

std::vector<int> parse_block_set(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    std::vector<int> out;
    std::istringstream is(text);
    std::string tok;
    while (std::getline(is, tok, ',')) out.push_back(std::stoi(tok));
    return out;
  }
  return block_range(std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2)));
}

std::vector<double> parse_axis(const std::string& text) {
  std::istringstream is(text);
  std::string lo, hi, step;
  if (!std::getline(is, lo, ':') || !std::getline(is, hi, ':') || !std::getline(is, step))
    throw CLI::ValidationError("grid", "expected lo:hi:step");
  return axis(std::stod(lo), std::stod(hi), std::stod(step));
}

RhoSpec parse_rho(const std::string& text) {
  RhoSpec rho;
  if (text == "pen_agg") {
    rho.penalized = true;
  } else if (text.rfind("fixed:", 0) == 0) {
    rho.penalized = false;
    rho.fixed_value = std::stod(text.substr(6));
  } else {
    throw CLI::ValidationError("rho", "expected pen_agg or fixed:<value>");
  }
  return rho;
}

int cmd_simulate(const std::string& preset_name, long n, long reps, bool full_scale,
                 int workers, uint64_t seed, const std::string& out_dir, bool per_point) {
  ExperimentSpec spec = preset(preset_name);
  spec.n = n;
  spec.reps = full_scale ? 1000 : reps;
  spec.workers = workers;
  spec.master_seed = seed;
  std::filesystem::create_directories(out_dir);
  const SummaryTable table = run(spec, per_point);
  emit(table, out_dir + "/summary.csv");
  if (per_point) emit_points(table, out_dir + "/points.csv");
  write_manifest(spec, out_dir + "/manifest.json");
  std::cout << "wrote " << out_dir << "/summary.csv (" << table.rows.size() << " rows)\n";
  return 0;
}

int cmd_estimate(const std::string& input, const std::string& estimator, int m, int m_prime,
                 const std::string& m_set, const std::string& weights_name,
                 const std::string& rho_text, const std::string& grid_text,
                 const std::string& out_path) {
  const Matrix data = read_data_csv(input);
  if (data.cols() < 2) throw std::runtime_error("estimate: need at least two data columns");
  if (has_ties(data))
    std::cerr << "[blockmax] warning: input columns contain ties; "
                 "the library assumes continuous margins\n";
  const int d = static_cast<int>(data.cols());
  const std::vector<Point> grid = tensor_grid(parse_axis(grid_text), d);

  const RhoSpec rho_spec = parse_rho(rho_text);
  double rho = rho_spec.fixed_value;
  if (rho_spec.penalized) {
    RhoConfig cfg = RhoConfig::simulation_defaults(d);
    while (!cfg.M.empty() && cfg.M.back() > data.rows() / 4) cfg.M.pop_back();
    const RhoAggregate agg = rho_pen_aggregated(data, cfg);
    rho = agg.value;
    std::cout << "rho_hat=" << rho << " (defined at " << agg.used << "/"
              << agg.used + agg.skipped << " points)\n";
  }

  const auto weights_of = [&](const std::vector<int>& M) {
    return weights_name == "uniform" ? uniform_weights(M) : harmonic_weights(M);
  };

  std::vector<double> values;
  if (estimator == "sliding") {
    values = sliding_estimator(data, m, grid);
  } else if (estimator == "disjoint") {
    values = disjoint_estimator(data, m, grid);
  } else if (estimator == "agg") {
    values = aggregated_estimator(data, weights_of(parse_block_set(m_set)), grid);
  } else if (estimator == "bc_naive") {
    values = bc_naive(data, m, m_prime, rho, grid);
  } else if (estimator == "bc_agg") {
    values = bc_aggregated(data, m_prime, weights_of(parse_block_set(m_set)), rho, grid);
  } else if (estimator == "bc_reg") {
    values = bc_regression(data, 0, weights_of(parse_block_set(m_set)), rho, grid).c_inf;
  } else {
    throw std::runtime_error("estimate: unknown estimator '" + estimator + "'");
  }

  std::ofstream os(out_path, std::ios::trunc);
  if (!os) throw std::runtime_error("estimate: cannot open '" + out_path + "'");
  for (int j = 0; j < d; ++j) os << "u" << (j + 1) << ",";
  os << "value\n";
  char buf[40];
  for (size_t g = 0; g < grid.size(); ++g) {
    for (int j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", grid[g][static_cast<size_t>(j)]);
      os << buf << ",";
    }
    std::snprintf(buf, sizeof buf, "%.17g", values[g]);
    os << buf << "\n";
  }
  std::cout << "wrote " << out_path << " (" << grid.size() << " points)\n";
  return 0;
}

int cmd_variance(double beta, const std::string& diag_text, double a,
                 const std::string& out_path) {
  const GumbelHougaard copula(beta, 2);
  std::ofstream os(out_path, std::ios::trunc);
  if (!os) throw std::runtime_error("variance: cannot open '" + out_path + "'");
  os << "u,a,var_sliding,var_disjoint,ratio\n";
  char buf[160];
  for (double u : parse_axis(diag_text)) {
    const Point p{u, u};
    const double vs = var_sliding_hat(copula, p, a);
    const double vd = var_disjoint_hat(copula, p);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", u, a, vs, vd,
                  vs > 0 ? vd / vs : std::numeric_limits<double>::quiet_NaN());
    os << buf;
  }
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_rho(const std::string& preset_name, long n, uint64_t seed) {
  const ExperimentSpec spec = preset(preset_name);
  RngStream rng = RngStream::substream(seed, 0);
  const Matrix data = generate(*spec.model, n, rng);
  RhoConfig cfg = RhoConfig::simulation_defaults(spec.model->base->dim());
  const RhoAggregate agg = rho_pen_aggregated(data, cfg);
  std::cout << "rho_hat=" << agg.value << " used=" << agg.used << " skipped=" << agg.skipped
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"block-maxima copula estimation lab"};
  app.set_config("--config", "", "flat key=value config file mirroring the flags");
  app.require_subcommand(1);

  // simulate
  std::string preset_name = "M1", out_dir = "out";
  long n = 1000, reps = 200;
  bool full_scale = false, per_point = false;
  int workers = 1;
  uint64_t seed = 1000003;
  auto* sim = app.add_subcommand("simulate", "run a Monte Carlo experiment preset");
  sim->add_option("--preset", preset_name, "model preset M1..M15");
  sim->add_option("--n", n, "sample size");
  sim->add_option("--reps", reps, "replications (desk scale default 200)");
  sim->add_flag("--full-scale", full_scale, "use the study's 1000 replications");
  sim->add_option("--workers", workers, "worker threads (output is identical for any count)");
  sim->add_option("--seed", seed, "master seed");
  sim->add_option("--out", out_dir, "output directory");
  sim->add_flag("--per-point", per_point, "also write per-grid-point statistics");

  // estimate
  std::string input, estimator = "sliding", m_set = "10..19", rho_text = "fixed:-1";
  std::string grid_text = "0.1:0.9:0.1", weights_name = "harmonic", est_out = "est.csv";
  int m = 10, m_prime = 1;
  auto* est = app.add_subcommand("estimate", "estimate the limit copula from CSV data");
  est->add_option("--input", input, "data CSV (header row, one column per coordinate)")
      ->required();
  est->add_option("--estimator", estimator,
                  "sliding|disjoint|agg|bc_naive|bc_agg|bc_reg");
  est->add_option("--m", m, "block size");
  est->add_option("--m-prime", m_prime, "companion block size for bias correction");
  est->add_option("--M", m_set, "block-size set, range lo..hi or comma list");
  est->add_option("--weights", weights_name, "harmonic|uniform");
  est->add_option("--rho", rho_text, "fixed:<val>|pen_agg");
  est->add_option("--grid", grid_text, "evaluation axis lo:hi:step, tensorized");
  est->add_option("--out", est_out, "output CSV");

  // variance
  double beta = 1.0, a_scale = 1.0;
  std::string diag_text = "0.01:0.99:0.01", var_out = "var.csv";
  auto* var = app.add_subcommand("variance", "asymptotic variance table (Gumbel-Hougaard)");
  var->add_option("--beta", beta, "Gumbel-Hougaard shape (>= 1)");
  var->add_option("--grid-diag", diag_text, "diagonal axis lo:hi:step");
  var->add_option("--a", a_scale, "block-length scale of the sliding variance");
  var->add_option("--out", var_out, "output CSV");

  // rho
  std::string rho_preset = "M1";
  long rho_n = 4000;
  uint64_t rho_seed = 1000003;
  auto* rho = app.add_subcommand("rho", "estimate the second-order parameter on fresh data");
  rho->add_option("--preset", rho_preset, "model preset M1..M15");
  rho->add_option("--n", rho_n, "sample size");
  rho->add_option("--seed", rho_seed, "seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed())
      return cmd_simulate(preset_name, n, reps, full_scale, workers, seed, out_dir,
                          per_point);
    if (est->parsed())
      return cmd_estimate(input, estimator, m, m_prime, m_set, weights_name, rho_text,
                          grid_text, est_out);
    if (var->parsed()) return cmd_variance(beta, diag_text, a_scale, var_out);
    if (rho->parsed()) return cmd_rho(rho_preset, rho_n, rho_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
