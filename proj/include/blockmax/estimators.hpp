#ifndef BLOCKMAX_ESTIMATORS_HPP
#define BLOCKMAX_ESTIMATORS_HPP

#include <map>
#include <span>
#include <vector>

#include "blockmax/blocks.hpp"
#include "blockmax/core.hpp"

namespace blockmax {

/// Block-size set with positive weights summing to one. Raw weights are
/// normalized at construction.
struct WeightScheme {
  std::vector<int> block_set;
  std::vector<double> weights;

  WeightScheme(std::vector<int> sizes, std::vector<double> raw_weights);
};

WeightScheme harmonic_weights(const std::vector<int>& block_set);
WeightScheme uniform_weights(const std::vector<int>& block_set);

/// {lo, lo+1, ..., hi}.
std::vector<int> block_range(int lo, int hi);

/// Precomputed empirical copula values C_hat_{n,k}(u) for a set of block
/// sizes and evaluation points under one blocking scheme. Pure function of
/// the data; estimators and the experiment runner combine entries linearly.
class ValueTable {
 public:
  ValueTable(const Matrix& data, const std::vector<int>& sizes,
             const std::vector<Point>& points,
             BlockScheme scheme = BlockScheme::sliding);

  double value(int block_size, size_t point_index) const;
  const std::vector<int>& sizes() const { return sizes_; }
  const std::vector<Point>& points() const { return points_; }

 private:
  std::vector<int> sizes_;
  std::vector<Point> points_;
  std::map<int, size_t> row_of_;
  Matrix vals_;
};

// --- estimators of the limit copula -----------------------------------------

std::vector<double> sliding_estimator(const Matrix& data, int m,
                                      const std::vector<Point>& grid);
std::vector<double> disjoint_estimator(const Matrix& data, int m,
                                       const std::vector<Point>& grid);

/// sum_{k in M} w_k C_hat_{n,k}(u) over sliding blocks.
std::vector<double> aggregated_estimator(const Matrix& data, const WeightScheme& scheme,
                                         const std::vector<Point>& grid);

/// Naive bias-corrected estimator from two block sizes:
/// C_hat_{n,m} - (C_hat_{n,m'} - C_hat_{n,m}) / ((m'/m)^rho - 1).
/// Symmetric in (m, m').
std::vector<double> bc_naive(const Matrix& data, int m, int m_prime, double rho,
                             const std::vector<Point>& grid);

/// Aggregated bias correction: sum_{k in M} w_k bc_naive(m', k); m' not in M.
std::vector<double> bc_aggregated(const Matrix& data, int m_prime,
                                  const WeightScheme& scheme, double rho,
                                  const std::vector<Point>& grid);

/// Weighted least-squares fit of C_hat_{n,k}(u) on (1, (k/m_ref)^rho); the
/// intercept estimates the limit copula, the slope estimates phi(m_ref)S(u).
struct RegressionEstimate {
  std::vector<double> c_inf;
  std::vector<double> b_m;
};

/// m_ref = 0 selects the default reference min(M); c_inf does not depend on it.
RegressionEstimate bc_regression(const Matrix& data, int m_ref, const WeightScheme& scheme,
                                 double rho, const std::vector<Point>& grid);

// --- estimators of the second-order parameter rho ---------------------------

/// log_a of the block-size difference ratio minus one, evaluated at a single
/// point. Undefined (flagged) when the ratio degenerates.
Flagged rho_naive(const Matrix& data, int m_rho, double a, const Point& u);

struct RhoConfig {
  double K_lo = -2.0;      // search interval [K', K''], K' < K'' < 0
  double K_hi = -0.1;
  double eta = 0.5;        // penalty strength
  double grid_step = 0.01; // search grid resolution
  int m_rho = 0;           // regressor reference; 0 = min(M)
  std::vector<int> M;      // block-size set, >= 2 distinct sizes
  std::vector<Point> U;    // aggregation points (rho_pen_aggregated)
  std::vector<double> weights;  // raw weights over M; empty = harmonic

  void validate() const;
  /// Settings of the simulation study: K' = -2, K'' = -0.1, eta = 1/2,
  /// M = {2..50}, U = {(.10,...),(.11,...),...,(.50,...)} diagonal, d-variate.
  static RhoConfig simulation_defaults(int d = 2);
};

/// Penalized profile least-squares estimator of rho at one point: minimizes
/// RSS(rho) + (eta/|rho|) * min RSS over rho in [K_lo, K_hi] on a grid with a
/// golden-section refinement; ties break toward the more negative rho.
Flagged rho_penalized(const Matrix& data, const RhoConfig& cfg, const Point& u);

struct RhoAggregate {
  double value = 0.0;
  long used = 0;
  long skipped = 0;
};

/// Mean of rho_penalized over cfg.U, skipping (and counting) undefined
/// points; throws if every point is undefined.
RhoAggregate rho_pen_aggregated(const Matrix& data, const RhoConfig& cfg);

// --- curve layer -------------------------------------------------------------
// The same arithmetic on precomputed value curves y_k = C_hat_{n,k}(u); used
// by the operations above, by the experiment runner, and directly by tests
// that feed exact second-order inputs.

double bc_naive_value(double y_m, double y_m_prime, int m, int m_prime, double rho);

/// rho_naive on precomputed estimates at block sizes m, <m a>, <m a^2>.
Flagged rho_naive_value(double y_m, double y_ma, double y_ma2, double a);

struct RegressionFit {
  double c_inf = 0.0;
  double b_m = 0.0;
};

RegressionFit bc_regression_value(std::span<const int> sizes, std::span<const double> ys,
                                  std::span<const double> ws, int m_ref, double rho);

/// Profile RSS of the fit y_k ~ b0 + b1 (k/m_rho)^rho at fixed rho.
double profile_rss(std::span<const int> sizes, std::span<const double> ys,
                   std::span<const double> ws, int m_rho, double rho,
                   double* b0 = nullptr, double* b1 = nullptr);

Flagged rho_penalized_curve(std::span<const int> sizes, std::span<const double> ys,
                            std::span<const double> ws, const RhoConfig& cfg);

}  // namespace blockmax

#endif  // BLOCKMAX_ESTIMATORS_HPP
