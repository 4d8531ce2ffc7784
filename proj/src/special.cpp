#include "blockmax/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace blockmax::special {

namespace {

// Continued fraction for the incomplete beta (Lentz's method).
double betacf(double a, double b, double x) {
  const double tiny = 1e-300;
  const int max_iter = 300;
  const double eps = 1e-16;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

// Lower incomplete gamma by series (x < a+1).
double gamma_p_series(double a, double x) {
  double ap = a, sum = 1.0 / a, del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper incomplete gamma by continued fraction (x >= a+1).
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double incbeta(double a, double b, double x) {
  if (a <= 0 || b <= 0) throw std::invalid_argument("incbeta: a,b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double lbeta = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  const double front = std::exp(lbeta + a * std::log(x) + b * std::log(1.0 - x));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double gamma_p(double a, double x) {
  if (a <= 0) throw std::invalid_argument("gamma_p: a must be positive");
  if (x <= 0) return 0.0;
  return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw std::invalid_argument("norm_quantile: p outside [0,1]");
  }
  // Acklam's rational approximation, then one Halley step.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1.0 - plow;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= phigh) {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = norm_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

double t_pdf(double x, double nu) {
  const double lc = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                    0.5 * std::log(nu * 3.14159265358979323846);
  return std::exp(lc - 0.5 * (nu + 1.0) * std::log1p(x * x / nu));
}

double t_cdf(double x, double nu) {
  if (nu <= 0) throw std::invalid_argument("t_cdf: nu must be positive");
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  const double p = 0.5 * incbeta(0.5 * nu, 0.5, nu / (nu + x * x));
  return x >= 0 ? 1.0 - p : p;
}

double t_quantile(double p, double nu) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw std::invalid_argument("t_quantile: p outside [0,1]");
  }
  if (p == 0.5) return 0.0;
  // Newton from a normal start, safeguarded by bisection on a bracket.
  double x = norm_quantile(p);
  if (nu < 5.0) x *= std::sqrt(nu / std::max(nu - 2.0, 0.5));
  double lo = -1e10, hi = 1e10;
  for (int it = 0; it < 100; ++it) {
    const double f = t_cdf(x, nu) - p;
    if (f > 0)
      hi = std::min(hi, x);
    else
      lo = std::max(lo, x);
    const double dfdx = t_pdf(x, nu);
    double step = f / std::max(dfdx, 1e-300);
    double xn = x - step;
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (std::fabs(xn - x) < 1e-14 * std::max(1.0, std::fabs(x))) return xn;
    x = xn;
  }
  return x;
}

double chi2_quantile(double p, double nu) {
  if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("chi2_quantile: p outside [0,1)");
  if (p == 0.0) return 0.0;
  // Wilson-Hilferty start, then safeguarded Newton on gamma_p(nu/2, x/2).
  const double z = norm_quantile(p);
  const double h = 2.0 / (9.0 * nu);
  double x = nu * std::pow(1.0 - h + z * std::sqrt(h), 3.0);
  if (!(x > 0)) x = 1e-8;
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 200; ++it) {
    const double f = gamma_p(0.5 * nu, 0.5 * x) - p;
    if (f > 0)
      hi = std::min(hi, x);
    else
      lo = std::max(lo, x);
    const double pdf = 0.5 * std::exp((0.5 * nu - 1.0) * std::log(0.5 * x) - 0.5 * x -
                                      std::lgamma(0.5 * nu));
    double xn = x - f / std::max(pdf, 1e-300);
    if (!(xn > lo && (std::isinf(hi) || xn < hi)))
      xn = std::isinf(hi) ? 2.0 * x : 0.5 * (lo + hi);
    if (std::fabs(xn - x) < 1e-12 * std::max(1.0, std::fabs(x))) return xn;
    x = xn;
  }
  return x;
}

}  // namespace blockmax::special
