#ifndef BLOCKMAX_QUADRATURE_HPP
#define BLOCKMAX_QUADRATURE_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace blockmax {

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights on [-1,1].
inline constexpr double kGK15Nodes[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,                0.207784955007898,
    0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
inline constexpr double kGK15Weights[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
inline constexpr double kG7Weights[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870};

template <class F>
void gk15(const F& f, double lo, double hi, double* value, double* err) {
  const double h = 0.5 * (hi - lo), c = 0.5 * (lo + hi);
  double k = 0.0, g = 0.0;
  for (int i = 0; i < 15; ++i) {
    const double fx = f(c + h * kGK15Nodes[i]);
    k += kGK15Weights[i] * fx;
    if (i % 2 == 1) g += kG7Weights[i / 2] * fx;
  }
  *value = k * h;
  const double diff = std::fabs(k - g) * std::fabs(h);
  *err = std::pow(200.0 * diff, 1.5);
  if (!std::isfinite(*err) || *err > diff) *err = diff;
}

template <class F>
double adaptive_gk_rec(const F& f, double lo, double hi, double tol, int depth,
                       double* achieved) {
  double v, e;
  gk15(f, lo, hi, &v, &e);
  if (e <= tol || depth <= 0) {
    *achieved += e;
    return v;
  }
  const double mid = 0.5 * (lo + hi);
  return adaptive_gk_rec(f, lo, mid, 0.5 * tol, depth - 1, achieved) +
         adaptive_gk_rec(f, mid, hi, 0.5 * tol, depth - 1, achieved);
}

}  // namespace detail

/// Adaptive 1-d quadrature (Gauss-Kronrod 7-15 with interval bisection) to an
/// absolute tolerance. Throws if the tolerance cannot be certified.
template <class F>
double adaptive_quadrature(const F& f, double lo, double hi, double abs_tol,
                           int max_depth = 40) {
  if (hi <= lo) return 0.0;
  double achieved = 0.0;
  const double v = detail::adaptive_gk_rec(f, lo, hi, abs_tol, max_depth, &achieved);
  if (achieved > 10.0 * abs_tol)
    throw std::runtime_error("adaptive_quadrature: tolerance not reached, achieved " +
                             std::to_string(achieved));
  return v;
}

}  // namespace blockmax

#endif  // BLOCKMAX_QUADRATURE_HPP
