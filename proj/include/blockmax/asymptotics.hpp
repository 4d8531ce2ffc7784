#ifndef BLOCKMAX_ASYMPTOTICS_HPP
#define BLOCKMAX_ASYMPTOTICS_HPP

#include <vector>

#include "blockmax/copulas.hpp"
#include "blockmax/core.hpp"

namespace blockmax {

/// Query for the limiting covariance of the sliding-blocks empirical process
/// between grid points (u, a) and (v, c); the functional is defined for
/// a <= c, callers with a > c use symmetry of the covariance.
struct CovarianceQuery {
  Point u;
  Point v;
  double a = 1.0;
  double c = 1.0;
  const Copula* copula = nullptr;  // provides C_inf and its partials
};

/// Covariance by adaptive quadrature of the three block-overlap integrals
/// minus the product term; absolute tolerance on each integral.
double gamma_quadrature(const CovarianceQuery& q, double abs_tol = 1e-10);

/// Covariance by the closed three-branch expression (requires max-stability
/// of C_inf); the removable log-ratio singularity is evaluated by its limit.
double gamma_closed_form(const CovarianceQuery& q);

enum class CovRoute { closed_form, quadrature };

/// Symmetric wrapper: Cov(C(u,a), C(v,c)) for any ordering of a and c.
double gamma_sliding(const Copula& copula, const Point& u, double a, const Point& v,
                     double c, CovRoute route = CovRoute::closed_form);

/// Disjoint-blocks covariance C_inf(u ^ v) - C_inf(u) C_inf(v).
double gamma_disjoint(const Copula& copula, const Point& u, const Point& v);

/// Asymptotic variance of the estimated-margins limit process at (u, a):
/// the (d+1)-term linear combination with coefficients (1, -dC_1, ..., -dC_d)
/// expanded over gamma (sliding) or over the disjoint covariance.
double var_sliding_hat(const Copula& copula, const Point& u, double a = 1.0,
                       CovRoute route = CovRoute::closed_form);
double var_disjoint_hat(const Copula& copula, const Point& u);

/// Cross-covariances of the estimated-margins limits at a finite point set.
std::vector<std::vector<double>> cov_matrix_sliding(const Copula& copula,
                                                    const std::vector<Point>& pts);
std::vector<std::vector<double>> cov_matrix_disjoint(const Copula& copula,
                                                     const std::vector<Point>& pts);

/// Eigenvalues of a small symmetric matrix (cyclic Jacobi), ascending.
std::vector<double> symmetric_eigenvalues(std::vector<std::vector<double>> m);

struct DominanceReport {
  std::vector<double> differences;      // varD - varS per grid point
  double min_difference = 0.0;
  std::vector<double> set_min_eigenvalues;  // min eig of CovD - CovS per random set
  double min_eigenvalue = 0.0;
};

/// Pointwise variance dominance over a grid plus Loewner checks on random
/// point sets of size <= max_k.
DominanceReport variance_dominance_check(const Copula& copula,
                                         const std::vector<Point>& grid,
                                         int random_sets = 100, int max_k = 4,
                                         uint64_t seed = 1);

}  // namespace blockmax

#endif  // BLOCKMAX_ASYMPTOTICS_HPP
