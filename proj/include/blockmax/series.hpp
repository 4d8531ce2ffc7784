#ifndef BLOCKMAX_SERIES_HPP
#define BLOCKMAX_SERIES_HPP

#include "blockmax/copulas.hpp"
#include "blockmax/core.hpp"
#include "blockmax/rng.hpp"

namespace blockmax {

/// Moving-maximum process of order p driven by i.i.d. innovations from a base
/// copula: U_tj = max_{i=0..p} W_{t-i,j}^{1/a_ij}, with the convention
/// w^{1/0} = 0 (zero coefficients contribute nothing).
///
/// Coefficient rows are supplied for lags 1..p only; the lag-0 row is derived
/// as a_0j = 1 - sum_{i>=1} a_ij and validated nonnegative, so each column
/// sums to one. p = 0 reduces to an i.i.d. stream from the base copula.
struct MovingMaxSpec {
  CopulaPtr base;
  int order = 0;       // p
  Matrix lag_coeffs;   // p x d, rows are lags 1..p
  Matrix all_coeffs;   // (p+1) x d, row 0 derived

  MovingMaxSpec(CopulaPtr base_model, Matrix lags);
  static MovingMaxSpec iid(CopulaPtr base_model);
};

/// n stationary rows of the process; p extra innovation rows are generated and
/// discarded as warm-up so the output is stationary from row 1.
Matrix generate(const MovingMaxSpec& spec, long n, RngStream& rng);

/// The extreme-value attractor of the process's block-maxima copulas, which
/// coincides with the base copula's i.i.d. attractor.
CopulaPtr attractor_of(const MovingMaxSpec& spec);

}  // namespace blockmax

#endif  // BLOCKMAX_SERIES_HPP
