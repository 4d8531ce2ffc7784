#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "blockmax/blocks.hpp"
#include "blockmax/series.hpp"

using namespace blockmax;

namespace {

const double kBetaStudy = std::log(2.0) / std::log(1.75);

MovingMaxSpec model_m2() {
  auto base = std::make_shared<OuterPowerClayton>(1.0, kBetaStudy, 2);
  Matrix lag(1, 2);
  lag(0, 0) = 0.25;
  lag(0, 1) = 0.5;
  return MovingMaxSpec(base, lag);
}

double ks_statistic_uniform(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    d = std::max(d, std::fabs((i + 1) / n - xs[i]));
    d = std::max(d, std::fabs(xs[i] - i / n));
  }
  return d;
}

}  // namespace

TEST_CASE("spec validation and derived lag-0 coefficients") {
  auto base = std::make_shared<GumbelHougaard>(2.0, 2);
  Matrix lag(1, 2);
  lag(0, 0) = 0.25;
  lag(0, 1) = 0.5;
  const MovingMaxSpec spec(base, lag);
  CHECK(spec.order == 1);
  CHECK(spec.all_coeffs(0, 0) == doctest::Approx(0.75));
  CHECK(spec.all_coeffs(0, 1) == doctest::Approx(0.5));
  for (int j = 0; j < 2; ++j) {
    double s = 0.0;
    for (int i = 0; i <= spec.order; ++i) s += spec.all_coeffs(i, j);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-15));
  }
  Matrix bad(1, 2);
  bad(0, 0) = 1.25;  // column would need a negative lag-0 coefficient
  bad(0, 1) = 0.5;
  CHECK_THROWS_AS(MovingMaxSpec(base, bad), std::invalid_argument);
  Matrix neg(1, 2);
  neg(0, 0) = -0.1;
  neg(0, 1) = 0.5;
  CHECK_THROWS_AS(MovingMaxSpec(base, neg), std::invalid_argument);
}

TEST_CASE("order zero reproduces the innovation stream row for row") {
  auto base = std::make_shared<GumbelHougaard>(1.7, 2);
  const MovingMaxSpec spec = MovingMaxSpec::iid(base);
  RngStream r1(5), r2(5);
  const Matrix series = generate(spec, 500, r1);
  const Matrix raw = base->sample(500, r2);
  for (long i = 0; i < 500; ++i)
    for (int j = 0; j < 2; ++j) CHECK(series(i, j) == raw(i, j));
}

TEST_CASE("unit lag-0 coefficients reproduce the innovations despite p = 1") {
  auto base = std::make_shared<GumbelHougaard>(1.7, 2);
  Matrix lag(1, 2, 0.0);  // a_1j = 0 so a_0j = 1; w^{1/0} = 0 never evaluated
  const MovingMaxSpec spec(base, lag);
  RngStream r1(6), r2(6);
  const Matrix series = generate(spec, 300, r1);
  const Matrix raw = base->sample(301, r2);  // one burn-in innovation row
  for (long i = 0; i < 300; ++i)
    for (int j = 0; j < 2; ++j) CHECK(series(i, j) == raw(i + 1, j));
}

TEST_CASE("moving maximum recursion matches a direct reimplementation") {
  const MovingMaxSpec spec = model_m2();
  RngStream r1(7), r2(7);
  const Matrix series = generate(spec, 400, r1);
  const Matrix w = spec.base->sample(401, r2);
  for (long t = 0; t < 400; ++t)
    for (int j = 0; j < 2; ++j) {
      const double a0 = spec.all_coeffs(0, j), a1 = spec.all_coeffs(1, j);
      const double expect =
          std::max(std::pow(w(t + 1, j), 1.0 / a0), std::pow(w(t, j), 1.0 / a1));
      CHECK(series(t, j) == expect);
    }
}

TEST_CASE("margins of the generated series are uniform") {
  const MovingMaxSpec spec = model_m2();
  RngStream rng(8);
  const Matrix series = generate(spec, 10000, rng);
  const double ks_crit = 1.628 / std::sqrt(10000.0);
  for (long j = 0; j < 2; ++j) CHECK(ks_statistic_uniform(series.column(j)) < ks_crit);
}

TEST_CASE("deterministic replay") {
  const MovingMaxSpec spec = model_m2();
  RngStream r1(99), r2(99);
  const Matrix a = generate(spec, 1000, r1), b = generate(spec, 1000, r2);
  for (long i = 0; i < 1000; ++i)
    for (int j = 0; j < 2; ++j) CHECK(a(i, j) == b(i, j));
}

TEST_CASE("stationarity: lagged-pair distribution agrees across halves") {
  const MovingMaxSpec spec = model_m2();
  RngStream rng(11);
  const long n = 20000;
  const Matrix s = generate(spec, n, rng);
  const double qs[] = {0.25, 0.5, 0.75};
  for (double q1 : qs)
    for (double q2 : qs)
      for (double q3 : qs)
        for (double q4 : qs) {
          long c1 = 0, c2 = 0;
          const long half = n / 2;
          for (long t = 0; t + 1 < half; ++t)
            c1 += s(t, 0) <= q1 && s(t, 1) <= q2 && s(t + 1, 0) <= q3 && s(t + 1, 1) <= q4;
          for (long t = half; t + 1 < n; ++t)
            c2 += s(t, 0) <= q1 && s(t, 1) <= q2 && s(t + 1, 0) <= q3 && s(t + 1, 1) <= q4;
          const double f1 = static_cast<double>(c1) / (half - 1);
          const double f2 = static_cast<double>(c2) / (half - 1);
          CHECK(std::fabs(f1 - f2) < 0.02);
        }
}

TEST_CASE("attractor of the process equals the base attractor") {
  CHECK(attractor_of(model_m2())->family() == "gumbel");
  auto gh = std::make_shared<GumbelHougaard>(2.5, 2);
  CHECK(attractor_of(MovingMaxSpec::iid(gh))->cdf({0.4, 0.6}) ==
        doctest::Approx(gh->cdf({0.4, 0.6})).epsilon(1e-15));
  auto t2 = std::make_shared<TCopula>(5, 0.5, 2);
  Matrix lag(1, 2);
  lag(0, 0) = 0.25;
  lag(0, 1) = 0.5;
  CHECK(attractor_of(MovingMaxSpec(t2, lag))->family() == "t_ev");
  auto t4 = std::make_shared<TCopula>(5, 0.5, 4);
  CHECK_THROWS_AS(attractor_of(MovingMaxSpec::iid(t4)), std::runtime_error);
}

TEST_CASE("block-maxima copula of the process approaches the attractor") {
  const MovingMaxSpec spec = model_m2();
  RngStream rng(123);
  const long n = 50000;
  const int m = 50;
  const Matrix s = generate(spec, n, rng);
  const auto pseudo = pseudo_observations(sliding_maxima(s, m));
  const auto truth = attractor_of(spec);
  double sup = 0.0;
  for (double u = 0.1; u < 0.95; u += 0.1)
    for (double v = 0.1; v < 0.95; v += 0.1)
      sup = std::max(sup, std::fabs(empirical_copula(pseudo, {u, v}) - truth->cdf({u, v})));
  CHECK(sup < 0.015);
}
