#include "blockmax/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace blockmax {

namespace {

std::string describe_set(std::span<const int> sizes) {
  std::ostringstream os;
  os << "{";
  for (size_t i = 0; i < sizes.size(); ++i) os << (i ? "," : "") << sizes[i];
  os << "}";
  return os.str();
}

void check_rho(double rho) {
  if (!(rho < 0.0) || !std::isfinite(rho))
    throw std::invalid_argument("rho must be a finite negative real");
}

// Golden-section minimization on [lo,hi] to absolute tolerance on the argument.
template <class F>
double golden_min(const F& f, double lo, double hi, double tol) {
  const double gr = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

}  // namespace

WeightScheme::WeightScheme(std::vector<int> sizes, std::vector<double> raw_weights)
    : block_set(std::move(sizes)), weights(std::move(raw_weights)) {
  if (block_set.empty()) throw std::invalid_argument("WeightScheme: empty block set");
  if (block_set.size() != weights.size())
    throw std::invalid_argument("WeightScheme: size/weight length mismatch");
  std::set<int> seen;
  for (int k : block_set) {
    if (k < 1) throw std::invalid_argument("WeightScheme: block sizes must be >= 1");
    if (!seen.insert(k).second)
      throw std::invalid_argument("WeightScheme: duplicate block size " + std::to_string(k));
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("WeightScheme: weights must be positive");
    total += w;
  }
  for (double& w : weights) w /= total;
}

WeightScheme harmonic_weights(const std::vector<int>& block_set) {
  std::vector<double> w(block_set.size());
  for (size_t i = 0; i < block_set.size(); ++i) w[i] = 1.0 / block_set[i];
  return WeightScheme(block_set, std::move(w));
}

WeightScheme uniform_weights(const std::vector<int>& block_set) {
  return WeightScheme(block_set, std::vector<double>(block_set.size(), 1.0));
}

std::vector<int> block_range(int lo, int hi) {
  if (lo < 1 || hi < lo) throw std::invalid_argument("block_range: bad bounds");
  std::vector<int> v(static_cast<size_t>(hi - lo + 1));
  std::iota(v.begin(), v.end(), lo);
  return v;
}

ValueTable::ValueTable(const Matrix& data, const std::vector<int>& sizes,
                       const std::vector<Point>& points, BlockScheme scheme)
    : sizes_(sizes), points_(points) {
  vals_ = Matrix(static_cast<long>(sizes_.size()), static_cast<long>(points_.size()));
  for (size_t r = 0; r < sizes_.size(); ++r) {
    if (!row_of_.emplace(sizes_[r], r).second)
      throw std::invalid_argument("ValueTable: duplicate block size");
    const BlockMaximaPanel panel = scheme == BlockScheme::sliding
                                       ? sliding_maxima(data, sizes_[r])
                                       : disjoint_maxima(data, sizes_[r]);
    const PseudoObservations pseudo = pseudo_observations(panel);
    const std::vector<double> vals = empirical_copula(pseudo, points_);
    for (size_t g = 0; g < vals.size(); ++g)
      vals_(static_cast<long>(r), static_cast<long>(g)) = vals[g];
  }
}

double ValueTable::value(int block_size, size_t point_index) const {
  const auto it = row_of_.find(block_size);
  if (it == row_of_.end())
    throw std::invalid_argument("ValueTable: block size " + std::to_string(block_size) +
                                " not present");
  return vals_(static_cast<long>(it->second), static_cast<long>(point_index));
}

std::vector<double> sliding_estimator(const Matrix& data, int m,
                                      const std::vector<Point>& grid) {
  return empirical_copula(pseudo_observations(sliding_maxima(data, m)), grid);
}

std::vector<double> disjoint_estimator(const Matrix& data, int m,
                                       const std::vector<Point>& grid) {
  return empirical_copula(pseudo_observations(disjoint_maxima(data, m)), grid);
}

std::vector<double> aggregated_estimator(const Matrix& data, const WeightScheme& scheme,
                                         const std::vector<Point>& grid) {
  const ValueTable table(data, scheme.block_set, grid);
  std::vector<double> out(grid.size(), 0.0);
  for (size_t i = 0; i < scheme.block_set.size(); ++i)
    for (size_t g = 0; g < grid.size(); ++g)
      out[g] += scheme.weights[i] * table.value(scheme.block_set[i], g);
  return out;
}

double bc_naive_value(double y_m, double y_m_prime, int m, int m_prime, double rho) {
  check_rho(rho);
  if (m == m_prime) throw std::invalid_argument("bc_naive: block sizes must differ");
  if (m > m_prime) {  // the estimator is symmetric; canonicalize so it is exact
    std::swap(m, m_prime);
    std::swap(y_m, y_m_prime);
  }
  const double denom =
      std::pow(static_cast<double>(m_prime) / static_cast<double>(m), rho) - 1.0;
  if (std::fabs(denom) < 1e-10)
    throw std::runtime_error("bc_naive: degenerate denominator (m'/m)^rho - 1 at m=" +
                             std::to_string(m) + ", m'=" + std::to_string(m_prime));
  return y_m - (y_m_prime - y_m) / denom;
}

std::vector<double> bc_naive(const Matrix& data, int m, int m_prime, double rho,
                             const std::vector<Point>& grid) {
  const ValueTable table(data, m == m_prime ? std::vector<int>{m}
                                            : std::vector<int>{m, m_prime}, grid);
  std::vector<double> out(grid.size());
  for (size_t g = 0; g < grid.size(); ++g)
    out[g] = bc_naive_value(table.value(m, g), table.value(m_prime, g), m, m_prime, rho);
  return out;
}

std::vector<double> bc_aggregated(const Matrix& data, int m_prime,
                                  const WeightScheme& scheme, double rho,
                                  const std::vector<Point>& grid) {
  check_rho(rho);
  for (int k : scheme.block_set)
    if (k == m_prime)
      throw std::invalid_argument("bc_aggregated: m' = " + std::to_string(m_prime) +
                                  " must not belong to M");
  std::vector<int> sizes = scheme.block_set;
  sizes.push_back(m_prime);
  const ValueTable table(data, sizes, grid);
  std::vector<double> out(grid.size(), 0.0);
  for (size_t g = 0; g < grid.size(); ++g) {
    const double y_prime = table.value(m_prime, g);
    for (size_t i = 0; i < scheme.block_set.size(); ++i) {
      const int k = scheme.block_set[i];
      out[g] += scheme.weights[i] *
                bc_naive_value(y_prime, table.value(k, g), m_prime, k, rho);
    }
  }
  return out;
}

RegressionFit bc_regression_value(std::span<const int> sizes, std::span<const double> ys,
                                  std::span<const double> ws, int m_ref, double rho) {
  check_rho(rho);
  if (sizes.size() < 2)
    throw std::invalid_argument("bc_regression: need at least two block sizes");
  // moment matrix (mu_0 mu_1; mu_1 mu_2), mu_v = sum_k w_k (k/m_ref)^{v rho}
  double mu0 = 0.0, mu1 = 0.0, mu2 = 0.0, r0 = 0.0, r1 = 0.0;
  for (size_t i = 0; i < sizes.size(); ++i) {
    const double x = std::pow(static_cast<double>(sizes[i]) / m_ref, rho);
    mu0 += ws[i];
    mu1 += ws[i] * x;
    mu2 += ws[i] * x * x;
    r0 += ws[i] * ys[i];
    r1 += ws[i] * x * ys[i];
  }
  const double tr = mu0 + mu2;
  const double disc = std::sqrt(std::max((mu0 - mu2) * (mu0 - mu2) + 4.0 * mu1 * mu1, 0.0));
  const double lmin = 0.5 * (tr - disc), lmax = 0.5 * (tr + disc);
  if (!(lmin > 0.0) || lmax / lmin > 1e12)
    throw std::runtime_error("bc_regression: singular moment matrix for M = " +
                             describe_set(sizes));
  const double det = mu0 * mu2 - mu1 * mu1;
  return {(mu2 * r0 - mu1 * r1) / det, (mu0 * r1 - mu1 * r0) / det};
}

RegressionEstimate bc_regression(const Matrix& data, int m_ref, const WeightScheme& scheme,
                                 double rho, const std::vector<Point>& grid) {
  check_rho(rho);
  if (m_ref == 0) m_ref = *std::min_element(scheme.block_set.begin(), scheme.block_set.end());
  if (m_ref < 1) throw std::invalid_argument("bc_regression: bad reference block size");
  const ValueTable table(data, scheme.block_set, grid);
  RegressionEstimate est;
  est.c_inf.resize(grid.size());
  est.b_m.resize(grid.size());
  std::vector<double> ys(scheme.block_set.size());
  for (size_t g = 0; g < grid.size(); ++g) {
    for (size_t i = 0; i < scheme.block_set.size(); ++i)
      ys[i] = table.value(scheme.block_set[i], g);
    const RegressionFit fit =
        bc_regression_value(scheme.block_set, ys, scheme.weights, m_ref, rho);
    est.c_inf[g] = fit.c_inf;
    est.b_m[g] = fit.b_m;
  }
  return est;
}

Flagged rho_naive_value(double y_m, double y_ma, double y_ma2, double a) {
  if (!(a > 0.0) || a == 1.0)
    throw std::invalid_argument("rho_naive: a must be positive and != 1");
  const double den = y_ma - y_m;
  if (std::fabs(den) < 1e-14) return {};  // undefined at this u
  const double ratio = (y_ma2 - y_m) / den - 1.0;
  if (!(ratio > 0.0)) return {};  // undefined at this u
  return {std::log(ratio) / std::log(a), true};
}

Flagged rho_naive(const Matrix& data, int m_rho, double a, const Point& u) {
  if (!(a > 0.0) || a == 1.0)
    throw std::invalid_argument("rho_naive: a must be positive and != 1");
  const int m1 = m_rho;
  const int m2 = static_cast<int>(trunc_index(m_rho * a));
  const int m3 = static_cast<int>(trunc_index(m_rho * a * a));
  if (m1 == m2 || m2 == m3 || m1 == m3)
    throw std::invalid_argument(
        "rho_naive: block sizes " + std::to_string(m1) + ", " + std::to_string(m2) + ", " +
        std::to_string(m3) + " collapse; increase m_rho or move a away from 1");
  const ValueTable table(data, {m1, m2, m3}, {u});
  return rho_naive_value(table.value(m1, 0), table.value(m2, 0), table.value(m3, 0), a);
}

void RhoConfig::validate() const {
  if (!(K_lo < K_hi && K_hi < 0.0))
    throw std::invalid_argument("RhoConfig: need K_lo < K_hi < 0");
  if (!(eta >= 0.0)) throw std::invalid_argument("RhoConfig: eta must be >= 0");
  if (!(grid_step > 0.0)) throw std::invalid_argument("RhoConfig: grid_step must be > 0");
  std::set<int> distinct(M.begin(), M.end());
  if (distinct.size() < 2)
    throw std::invalid_argument("RhoConfig: M must contain at least two distinct sizes");
  if (!weights.empty() && weights.size() != M.size())
    throw std::invalid_argument("RhoConfig: weights length must match M");
  for (const Point& u : U)
    for (double x : u)
      if (!(x > 0.0 && x < 1.0))
        throw std::invalid_argument("RhoConfig: U must lie in the open unit cube");
}

RhoConfig RhoConfig::simulation_defaults(int d) {
  RhoConfig cfg;
  cfg.M = block_range(2, 50);
  cfg.U = diagonal_grid(axis(0.10, 0.50, 0.01), d);
  return cfg;
}

Flagged rho_penalized_curve(std::span<const int> sizes, std::span<const double> ys,
                            std::span<const double> ws, const RhoConfig& cfg) {
  cfg.validate();
  const int m_rho = cfg.m_rho > 0
                        ? cfg.m_rho
                        : *std::min_element(sizes.begin(), sizes.end());
  const auto rss = [&](double rho) { return profile_rss(sizes, ys, ws, m_rho, rho); };

  std::vector<double> candidates;
  for (long i = 0;; ++i) {
    const double rho = cfg.K_lo + static_cast<double>(i) * cfg.grid_step;
    if (rho > cfg.K_hi + 1e-12) break;
    candidates.push_back(std::min(rho, cfg.K_hi));
  }
  if (candidates.empty() || candidates.back() < cfg.K_hi - 1e-12)
    candidates.push_back(cfg.K_hi);

  // Ties (exact or floating-point level) break toward the more negative rho:
  // the most negative candidate within a relative margin of the minimum wins.
  const auto tie_margin = [](double vmin) { return 1e-12 * std::fabs(vmin) + 1e-28; };
  const auto scan = [&](const auto& f, std::vector<double>* vals) {
    vals->resize(candidates.size());
    double vmin = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < candidates.size(); ++i) {
      (*vals)[i] = f(candidates[i]);
      vmin = std::min(vmin, (*vals)[i]);
    }
    for (size_t i = 0; i < candidates.size(); ++i)
      if ((*vals)[i] <= vmin + tie_margin(vmin)) return i;
    return size_t{0};
  };
  const auto bracket = [&](size_t idx) {
    const double lo = idx > 0 ? candidates[idx - 1] : cfg.K_lo;
    const double hi = idx + 1 < candidates.size() ? candidates[idx + 1] : cfg.K_hi;
    return std::pair{lo, hi};
  };

  std::vector<double> rss_grid;
  const size_t best = scan(rss, &rss_grid);
  if (!std::isfinite(rss_grid[best])) return {};  // profile fit degenerate everywhere
  auto [blo, bhi] = bracket(best);
  const double rho_star = golden_min(rss, blo, bhi, 1e-4);
  const double min_rss = std::min(rss(rho_star), rss_grid[best]);

  // min RSS = 0 (exactly or at floating-point noise level) makes the penalty
  // factor vanish: pure profile-RSS minimization.
  const double penalty_scale = min_rss > tie_margin(0.0) ? cfg.eta * min_rss : 0.0;
  const auto objective = [&](double rho) {
    return rss(rho) + penalty_scale / std::fabs(rho);
  };
  std::vector<double> obj_grid;
  const size_t fbest = scan(objective, &obj_grid);
  auto [flo, fhi] = bracket(fbest);
  const double refined = golden_min(objective, flo, fhi, 1e-4);
  double result = candidates[fbest];
  if (objective(refined) + tie_margin(obj_grid[fbest]) < obj_grid[fbest]) result = refined;
  return {result, true};
}

double profile_rss(std::span<const int> sizes, std::span<const double> ys,
                   std::span<const double> ws, int m_rho, double rho, double* b0,
                   double* b1) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, sy = 0.0, sxy = 0.0;
  std::vector<double> xs(sizes.size());
  for (size_t i = 0; i < sizes.size(); ++i) {
    xs[i] = std::pow(static_cast<double>(sizes[i]) / m_rho, rho);
    s0 += ws[i];
    s1 += ws[i] * xs[i];
    s2 += ws[i] * xs[i] * xs[i];
    sy += ws[i] * ys[i];
    sxy += ws[i] * xs[i] * ys[i];
  }
  const double det = s0 * s2 - s1 * s1;
  if (!(det > 1e-300)) return std::numeric_limits<double>::infinity();
  const double beta1 = (s0 * sxy - s1 * sy) / det;
  const double beta0 = (sy - beta1 * s1) / s0;
  if (b0) *b0 = beta0;
  if (b1) *b1 = beta1;
  double rss = 0.0;
  for (size_t i = 0; i < sizes.size(); ++i) {
    const double r = ys[i] - beta0 - beta1 * xs[i];
    rss += ws[i] * r * r;
  }
  return rss;
}

Flagged rho_penalized(const Matrix& data, const RhoConfig& cfg, const Point& u) {
  cfg.validate();
  const WeightScheme ws = cfg.weights.empty() ? harmonic_weights(cfg.M)
                                              : WeightScheme(cfg.M, cfg.weights);
  const ValueTable table(data, cfg.M, {u});
  std::vector<double> ys(cfg.M.size());
  for (size_t i = 0; i < cfg.M.size(); ++i) ys[i] = table.value(cfg.M[i], 0);
  return rho_penalized_curve(ws.block_set, ys, ws.weights, cfg);
}

RhoAggregate rho_pen_aggregated(const Matrix& data, const RhoConfig& cfg) {
  cfg.validate();
  if (cfg.U.empty()) throw std::invalid_argument("rho_pen_aggregated: U must be nonempty");
  const WeightScheme ws = cfg.weights.empty() ? harmonic_weights(cfg.M)
                                              : WeightScheme(cfg.M, cfg.weights);
  const ValueTable table(data, cfg.M, cfg.U);
  RhoAggregate agg;
  std::vector<double> ys(cfg.M.size());
  for (size_t g = 0; g < cfg.U.size(); ++g) {
    for (size_t i = 0; i < cfg.M.size(); ++i) ys[i] = table.value(cfg.M[i], g);
    const Flagged r = rho_penalized_curve(ws.block_set, ys, ws.weights, cfg);
    if (r.defined) {
      agg.value += r.value;
      ++agg.used;
    } else {
      ++agg.skipped;
    }
  }
  if (agg.used == 0)
    throw std::runtime_error("rho_pen_aggregated: estimator undefined at every point of U");
  agg.value /= static_cast<double>(agg.used);
  return agg;
}

}  // namespace blockmax
