#ifndef BLOCKMAX_SPECIAL_HPP
#define BLOCKMAX_SPECIAL_HPP

namespace blockmax::special {

/// Regularized incomplete beta function I_x(a,b).
double incbeta(double a, double b, double x);

/// Regularized lower incomplete gamma P(a,x).
double gamma_p(double a, double x);

/// Standard normal CDF and quantile.
double norm_cdf(double x);
double norm_quantile(double p);

/// Student t CDF, quantile and density with (possibly non-integer) df nu > 0.
double t_cdf(double x, double nu);
double t_quantile(double p, double nu);
double t_pdf(double x, double nu);

/// Chi-square quantile (df nu > 0), used by the quasi-Monte Carlo t CDF.
double chi2_quantile(double p, double nu);

}  // namespace blockmax::special

#endif  // BLOCKMAX_SPECIAL_HPP
