#include "blockmax/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

#include "blockmax/quadrature.hpp"
#include "blockmax/rng.hpp"

namespace blockmax {

namespace {

void check_query(const CovarianceQuery& q) {
  if (!q.copula) throw std::invalid_argument("covariance query: null copula");
  if (!(q.a > 0.0) || !(q.c > 0.0) || q.a > q.c)
    throw std::invalid_argument("covariance query: need 0 < a <= c");
  if (static_cast<int>(q.u.size()) != q.copula->dim() ||
      static_cast<int>(q.v.size()) != q.copula->dim())
    throw std::invalid_argument("covariance query: point dimension mismatch");
}

// u^(1/s) componentwise, in log space.
Point root_point(const Point& u, double s) {
  Point r(u.size());
  for (size_t j = 0; j < u.size(); ++j)
    r[j] = u[j] == 0.0 ? 0.0 : std::exp(std::log(u[j]) / s);
  return r;
}

// componentwise min of v^(1/c) and u^(1/a), in log space.
Point root_min(const Point& v, double c, const Point& u, double a) {
  Point r(u.size());
  for (size_t j = 0; j < u.size(); ++j) {
    if (u[j] == 0.0 || v[j] == 0.0) {
      r[j] = 0.0;
    } else {
      r[j] = std::exp(std::min(std::log(v[j]) / c, std::log(u[j]) / a));
    }
  }
  return r;
}

Point marginal_point(const Point& u, size_t j) {
  Point p(u.size(), 1.0);
  p[j] = u[j];
  return p;
}

}  // namespace

double gamma_quadrature(const CovarianceQuery& q, double abs_tol) {
  check_query(q);
  const Copula& cop = *q.copula;
  const double a = q.a, c = q.c;
  const double big_a = cop.limit_cdf(root_point(q.u, a));
  const double big_b = cop.limit_cdf(root_point(q.v, c));
  const double mn = cop.limit_cdf(root_min(q.v, c, q.u, a));
  const double product = (c + a) * cop.limit_cdf(q.v) * cop.limit_cdf(q.u);
  // A zero factor kills every integrand (all exponents are positive inside
  // the integration ranges), leaving only the product term.
  if (big_a <= 0.0 || big_b <= 0.0) return 0.0;  // then the product term is 0 too
  if (mn <= 0.0) return -product;
  const double la = std::log(big_a), lb = std::log(big_b), lm = std::log(mn);
  const auto seg1 = [&](double xi) {
    return std::exp(-xi * la + (xi + a) * lm + (c - xi - a) * lb);
  };
  const auto seg2 = [&](double) { return std::exp((c - a) * lb + a * lm); };
  const auto seg3 = [&](double xi) {
    return std::exp(xi * lb + (c - xi) * lm + (xi + a - c) * la);
  };
  double total = adaptive_quadrature(seg1, -a, 0.0, abs_tol);
  if (c > a) total += adaptive_quadrature(seg2, 0.0, c - a, abs_tol);
  total += adaptive_quadrature(seg3, c - a, c, abs_tol);
  return total - product;
}

double gamma_closed_form(const CovarianceQuery& q) {
  check_query(q);
  const Copula& cop = *q.copula;
  const double a = q.a, c = q.c;
  Point v_ac(q.v.size());
  Point v_rest(q.v.size());
  Point wmin(q.v.size());
  for (size_t j = 0; j < q.v.size(); ++j) {
    v_ac[j] = q.v[j] == 0.0 ? 0.0 : std::exp(std::log(q.v[j]) * (a / c));
    v_rest[j] = q.v[j] == 0.0 ? 0.0 : std::exp(std::log(q.v[j]) * (1.0 - a / c));
    wmin[j] = std::min(v_ac[j], q.u[j]);
  }
  const double p = cop.limit_cdf(wmin);
  const double qq = cop.limit_cdf(v_ac) * cop.limit_cdf(q.u);
  if (p == qq) return 0.0;
  if (p == 0.0) return -(c + a) * cop.limit_cdf(q.v) * cop.limit_cdf(q.u);
  const double lp = std::log(p), lq = std::log(qq);
  const double ratio = std::fabs(lp - lq) < 1e-12 ? p : (p - qq) / (lp - lq);
  return cop.limit_cdf(v_rest) * (2.0 * a * ratio + (c - a) * p - (c + a) * qq);
}

double gamma_sliding(const Copula& copula, const Point& u, double a, const Point& v,
                     double c, CovRoute route) {
  CovarianceQuery q;
  q.copula = &copula;
  if (a <= c) {
    q.u = u;
    q.v = v;
    q.a = a;
    q.c = c;
  } else {  // Cov is symmetric; swap the grid points
    q.u = v;
    q.v = u;
    q.a = c;
    q.c = a;
  }
  return route == CovRoute::closed_form ? gamma_closed_form(q) : gamma_quadrature(q);
}

double gamma_disjoint(const Copula& copula, const Point& u, const Point& v) {
  Point mn(u.size());
  for (size_t j = 0; j < u.size(); ++j) mn[j] = std::min(u[j], v[j]);
  return copula.limit_cdf(mn) - copula.limit_cdf(u) * copula.limit_cdf(v);
}

namespace {

// Coefficients (1, -dC_1(u), ..., -dC_d(u)) and points (u, u^(1), ..., u^(d))
// of the estimated-margins limit expansion.
struct Expansion {
  std::vector<double> coef;
  std::vector<Point> pts;
};

Expansion expansion_terms(const Copula& copula, const Point& u) {
  Expansion e;
  e.coef.push_back(1.0);
  e.pts.push_back(u);
  for (size_t j = 0; j < u.size(); ++j) {
    e.coef.push_back(-copula.limit_partial(static_cast<int>(j), u));
    e.pts.push_back(marginal_point(u, j));
  }
  return e;
}

}  // namespace

double var_sliding_hat(const Copula& copula, const Point& u, double a, CovRoute route) {
  const Expansion e = expansion_terms(copula, u);
  double var = 0.0;
  for (size_t i = 0; i < e.pts.size(); ++i)
    for (size_t j = 0; j < e.pts.size(); ++j)
      var += e.coef[i] * e.coef[j] * gamma_sliding(copula, e.pts[i], a, e.pts[j], a, route);
  return var;
}

double var_disjoint_hat(const Copula& copula, const Point& u) {
  const Expansion e = expansion_terms(copula, u);
  double var = 0.0;
  for (size_t i = 0; i < e.pts.size(); ++i)
    for (size_t j = 0; j < e.pts.size(); ++j)
      var += e.coef[i] * e.coef[j] * gamma_disjoint(copula, e.pts[i], e.pts[j]);
  return var;
}

namespace {

template <class CovFn>
std::vector<std::vector<double>> cov_matrix(const Copula& copula,
                                            const std::vector<Point>& pts,
                                            const CovFn& cov) {
  std::vector<Expansion> exps;
  exps.reserve(pts.size());
  for (const Point& u : pts) exps.push_back(expansion_terms(copula, u));
  std::vector<std::vector<double>> m(pts.size(), std::vector<double>(pts.size(), 0.0));
  for (size_t r = 0; r < pts.size(); ++r) {
    for (size_t s = r; s < pts.size(); ++s) {
      double acc = 0.0;
      for (size_t i = 0; i < exps[r].pts.size(); ++i)
        for (size_t j = 0; j < exps[s].pts.size(); ++j)
          acc += exps[r].coef[i] * exps[s].coef[j] * cov(exps[r].pts[i], exps[s].pts[j]);
      m[r][s] = m[s][r] = acc;
    }
  }
  return m;
}

}  // namespace

std::vector<std::vector<double>> cov_matrix_sliding(const Copula& copula,
                                                    const std::vector<Point>& pts) {
  return cov_matrix(copula, pts, [&](const Point& x, const Point& y) {
    return gamma_sliding(copula, x, 1.0, y, 1.0);
  });
}

std::vector<std::vector<double>> cov_matrix_disjoint(const Copula& copula,
                                                     const std::vector<Point>& pts) {
  return cov_matrix(copula, pts,
                    [&](const Point& x, const Point& y) { return gamma_disjoint(copula, x, y); });
}

std::vector<double> symmetric_eigenvalues(std::vector<std::vector<double>> m) {
  const size_t n = m.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (size_t i = 0; i < n; ++i)
      for (size_t j = i + 1; j < n; ++j) off += m[i][j] * m[i][j];
    if (off < 1e-30) break;
    for (size_t p = 0; p < n; ++p) {
      for (size_t q = p + 1; q < n; ++q) {
        if (std::fabs(m[p][q]) < 1e-300) continue;
        const double theta = 0.5 * (m[q][q] - m[p][p]) / m[p][q];
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double cth = 1.0 / std::sqrt(t * t + 1.0), s = t * cth;
        for (size_t k = 0; k < n; ++k) {
          const double mkp = m[k][p], mkq = m[k][q];
          m[k][p] = cth * mkp - s * mkq;
          m[k][q] = s * mkp + cth * mkq;
        }
        for (size_t k = 0; k < n; ++k) {
          const double mpk = m[p][k], mqk = m[q][k];
          m[p][k] = cth * mpk - s * mqk;
          m[q][k] = s * mpk + cth * mqk;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (size_t i = 0; i < n; ++i) eig[i] = m[i][i];
  std::sort(eig.begin(), eig.end());
  return eig;
}

DominanceReport variance_dominance_check(const Copula& copula,
                                         const std::vector<Point>& grid, int random_sets,
                                         int max_k, uint64_t seed) {
  DominanceReport rep;
  rep.differences.reserve(grid.size());
  rep.min_difference = std::numeric_limits<double>::infinity();
  for (const Point& u : grid) {
    const double diff = var_disjoint_hat(copula, u) - var_sliding_hat(copula, u, 1.0);
    rep.differences.push_back(diff);
    rep.min_difference = std::min(rep.min_difference, diff);
  }
  rep.min_eigenvalue = std::numeric_limits<double>::infinity();
  RngStream rng(seed);
  const int d = copula.dim();
  for (int s = 0; s < random_sets; ++s) {
    const int k = 1 + static_cast<int>(rng.next_u64() % static_cast<uint64_t>(max_k));
    std::vector<Point> pts;
    pts.reserve(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) {
      Point u(static_cast<size_t>(d));
      for (int j = 0; j < d; ++j) u[static_cast<size_t>(j)] = 0.02 + 0.96 * rng.uniform();
      pts.push_back(std::move(u));
    }
    const auto covd = cov_matrix_disjoint(copula, pts);
    const auto covs = cov_matrix_sliding(copula, pts);
    std::vector<std::vector<double>> diff(pts.size(), std::vector<double>(pts.size()));
    for (size_t i = 0; i < pts.size(); ++i)
      for (size_t j = 0; j < pts.size(); ++j) diff[i][j] = covd[i][j] - covs[i][j];
    const double mineig = symmetric_eigenvalues(std::move(diff)).front();
    rep.set_min_eigenvalues.push_back(mineig);
    rep.min_eigenvalue = std::min(rep.min_eigenvalue, mineig);
  }
  if (grid.empty()) rep.min_difference = 0.0;
  if (random_sets == 0) rep.min_eigenvalue = 0.0;
  return rep;
}

}  // namespace blockmax
