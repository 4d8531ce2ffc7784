#include "blockmax/series.hpp"

#include <cmath>
#include <stdexcept>

namespace blockmax {

MovingMaxSpec::MovingMaxSpec(CopulaPtr base_model, Matrix lags)
    : base(std::move(base_model)), order(static_cast<int>(lags.rows())),
      lag_coeffs(std::move(lags)) {
  if (!base) throw std::invalid_argument("MovingMaxSpec: null base copula");
  const int d = base->dim();
  if (order > 0 && lag_coeffs.cols() != d)
    throw std::invalid_argument("MovingMaxSpec: coefficient columns must match dimension");
  all_coeffs = Matrix(order + 1, d);
  for (int j = 0; j < d; ++j) {
    double tail = 0.0;
    for (int i = 0; i < order; ++i) {
      const double a = lag_coeffs(i, j);
      if (!(a >= 0.0) || !std::isfinite(a))
        throw std::invalid_argument("MovingMaxSpec: coefficients must be nonnegative");
      tail += a;
      all_coeffs(i + 1, j) = a;
    }
    const double a0 = 1.0 - tail;
    if (a0 < -1e-12)
      throw std::invalid_argument("MovingMaxSpec: lag coefficients of a column exceed 1");
    all_coeffs(0, j) = std::max(a0, 0.0);
  }
}

MovingMaxSpec MovingMaxSpec::iid(CopulaPtr base_model) {
  if (!base_model) throw std::invalid_argument("MovingMaxSpec: null base copula");
  const int d = base_model->dim();
  return MovingMaxSpec(std::move(base_model), Matrix(0, d));
}

Matrix generate(const MovingMaxSpec& spec, long n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("generate: n must be >= 1");
  const int d = spec.base->dim();
  const int p = spec.order;
  const Matrix w = spec.base->sample(n + p, rng);
  if (p == 0) return w;
  Matrix out(n, d);
  for (long t = 0; t < n; ++t) {
    for (int j = 0; j < d; ++j) {
      double m = 0.0;
      for (int i = 0; i <= p; ++i) {
        const double a = spec.all_coeffs(i, j);
        if (a == 0.0) continue;  // w^{1/0} = 0 by convention
        m = std::max(m, std::pow(w(t + p - i, j), 1.0 / a));
      }
      out(t, j) = m;
    }
  }
  return out;
}

CopulaPtr attractor_of(const MovingMaxSpec& spec) { return spec.base->attractor(); }

}  // namespace blockmax
