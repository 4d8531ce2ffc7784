#ifndef BLOCKMAX_SIMLAB_HPP
#define BLOCKMAX_SIMLAB_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "blockmax/estimators.hpp"
#include "blockmax/series.hpp"

namespace blockmax {

enum class WeightKind { harmonic, uniform };

/// Second-order parameter source for the bias-corrected estimators:
/// either a fixed value or the penalized aggregated estimate per replication.
struct RhoSpec {
  bool penalized = true;
  double fixed_value = -1.0;
};

/// Monte Carlo experiment description. The estimator roster is expanded per
/// block size m the way the simulation study configures them: `agg` uses
/// M = {m,...,m+width-1}, `bc_naive` pairs m with m', `bc_agg` aggregates
/// bc_naive(m', k) over the same window, `bc_reg` regresses on {m', m,...}.
struct ExperimentSpec {
  std::string name = "custom";
  std::optional<MovingMaxSpec> model;
  long n = 1000;
  long reps = 200;
  std::vector<Point> grid;
  std::vector<int> m_values;
  std::vector<std::string> estimators;  // subset of {sliding,disjoint,agg,bc_naive,bc_agg,bc_reg}
  int agg_width = 10;
  int bc_m_prime = 1;
  WeightKind weights = WeightKind::harmonic;
  RhoSpec rho;
  RhoConfig rho_cfg;
  uint64_t master_seed = 1000003;
  int workers = 1;
  double scale = 1e4;  // output scaling, matching the figures' 10^4 axis

  void validate() const;
};

struct SummaryRow {
  std::string model;
  std::string estimator;
  int m = 0;
  std::string stat;  // mse | bias2 | var | fail_rate
  double value = 0.0;
};

struct PointRow {
  std::string model;
  std::string estimator;
  int m = 0;
  Point u;
  std::string stat;
  double value = 0.0;
};

/// Long-format experiment output; values carry the spec's scale factor.
/// mse = bias2 + var holds exactly per cell (population variance over the
/// successful replication subset).
struct SummaryTable {
  std::vector<SummaryRow> rows;
  std::vector<PointRow> point_rows;  // filled when requested
};

/// Run the experiment: per replication, derive an independent stream from
/// (master_seed, rep), generate data, evaluate every estimator at every
/// (m, u), then reduce in replication order. Output is bit-identical for any
/// worker count. Estimator failures are counted per cell and reported as a
/// fail_rate row; cells with failures beyond 1% are flagged on stderr.
SummaryTable run(const ExperimentSpec& spec, bool keep_point_rows = false);

/// Simulation-study presets M1..M15. Truth (the attractor) is unavailable for
/// the d >= 3 t-copula models, so run() rejects M8-M10 and M13-M15.
ExperimentSpec preset(const std::string& name);

/// CSV writers/readers (header model,estimator,m,stat,value). Writing is an
/// idempotent overwrite; doubles round-trip exactly.
void emit(const SummaryTable& table, const std::string& path);
void emit(const SummaryTable& table, std::ostream& os);
void emit_points(const SummaryTable& table, const std::string& path);
SummaryTable parse_summary(const std::string& path);

/// Reproducibility manifest (spec + seed + library version) as JSON.
std::string manifest_json(const ExperimentSpec& spec);
void write_manifest(const ExperimentSpec& spec, const std::string& path);

/// Data CSV: header row, one column per coordinate.
Matrix read_data_csv(const std::string& path);
void write_data_csv(const Matrix& data, const std::string& path);

}  // namespace blockmax

#endif  // BLOCKMAX_SIMLAB_HPP
