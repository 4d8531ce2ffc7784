// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <vector>

#include "blockmax/asymptotics.hpp"
#include "blockmax/simlab.hpp"

using namespace blockmax;

namespace {

int failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void report(int criterion, bool pass, const std::string& what, double secs) {
  std::printf("[%s] criterion %d: %s (%.1fs)\n", pass ? "PASS" : "FAIL", criterion,
              what.c_str(), secs);
  std::fflush(stdout);
  if (!pass) ++failures;
}

const double kBetaStudy = std::log(2.0) / std::log(1.75);
const double kBetaHalfTail = std::log(2.0) / std::log(1.5);

// ---------------------------------------------------------------------------

void criterion_1() {
  Timer timer;
  RngStream rng(160001);
  double worst = 0.0;
  for (int rep = 0; rep < 500; ++rep) {
    const GumbelHougaard cop(1.0 + 2.0 * rng.uniform(), 2);
    CovarianceQuery q;
    q.copula = &cop;
    q.u = {rng.uniform(), rng.uniform()};
    q.v = {rng.uniform(), rng.uniform()};
    const double s1 = 0.5 + 1.5 * rng.uniform(), s2 = 0.5 + 1.5 * rng.uniform();
    q.a = std::min(s1, s2);
    q.c = std::max(s1, s2);
    worst = std::max(worst, std::fabs(gamma_quadrature(q) - gamma_closed_form(q)));
  }
  std::ostringstream os;
  os << "gamma quadrature vs closed form, 500 random queries, max |diff| = " << worst
     << " (tol 1e-8)";
  report(1, worst < 1e-8 && timer.seconds() < 30.0, os.str(), timer.seconds());
}

void criterion_2() {
  Timer timer;
  const GumbelHougaard indep(1.0, 2);
  const double vd = var_disjoint_hat(indep, {0.5, 0.5});
  const double vs = var_sliding_hat(indep, {0.5, 0.5}, 1.0);
  bool pass = std::fabs(vd - 0.0625) < 1e-12 && std::fabs(vs - 0.03479) < 1e-4;
  double min_diff = std::numeric_limits<double>::infinity();
  double min_ratio = std::numeric_limits<double>::infinity();
  bool decreasing_ratio = true;
  for (double beta : {1.0, kBetaHalfTail}) {
    const GumbelHougaard cop(beta, 2);
    double prev_ratio = std::numeric_limits<double>::infinity();
    for (double u = 0.02; u < 0.999; u += 0.02) {
      const double d = var_disjoint_hat(cop, {u, u});
      const double s = var_sliding_hat(cop, {u, u}, 1.0);
      min_diff = std::min(min_diff, d - s);
      if (s > 1e-12) {
        min_ratio = std::min(min_ratio, d / s);
        decreasing_ratio = decreasing_ratio && d / s <= prev_ratio + 1e-9;
        prev_ratio = d / s;
      }
    }
  }
  pass = pass && min_diff >= 0.0 && min_ratio > 1.0 && decreasing_ratio;
  std::ostringstream os;
  os << "analytic variances: varD(.5,.5) = " << vd << ", varS(.5,.5) = " << vs
     << "; diagonal curves min(varD-varS) = " << min_diff << ", min ratio = " << min_ratio
     << ", ratio largest at small u = " << (decreasing_ratio ? "yes" : "no");
  report(2, pass && timer.seconds() < 10.0, os.str(), timer.seconds());
}

void criterion_3() {
  Timer timer;
  const auto gh = std::make_shared<GumbelHougaard>(kBetaHalfTail, 2);
  const long n = 20000;
  const int m = 50;
  const int reps = 500;
  const Point u{0.5, 0.5};
  // Gumbel-Hougaard is max-stable, so C_m = C_inf exactly: the centering
  // proxy is the attractor value itself.
  const double truth = gh->cdf(u);
  double s_sum = 0.0, s_sq = 0.0, d_sum = 0.0, d_sq = 0.0;
  for (int r = 0; r < reps; ++r) {
    RngStream rng = RngStream::substream(333000, static_cast<uint64_t>(r));
    const Matrix data = gh->sample(n, rng);
    const double cs = sliding_estimator(data, m, {u})[0];
    const double cd = disjoint_estimator(data, m, {u})[0];
    const double zs = std::sqrt(static_cast<double>(n) / m) * (cs - truth);
    const double zd = std::sqrt(static_cast<double>(n) / m) * (cd - truth);
    s_sum += zs;
    s_sq += zs * zs;
    d_sum += zd;
    d_sq += zd * zd;
  }
  const double mc_vs = s_sq / reps - (s_sum / reps) * (s_sum / reps);
  const double mc_vd = d_sq / reps - (d_sum / reps) * (d_sum / reps);
  const double th_vs = var_sliding_hat(*gh, u, 1.0);
  const double th_vd = var_disjoint_hat(*gh, u);
  const double rel_s = std::fabs(mc_vs - th_vs) / th_vs;
  const double rel_d = std::fabs(mc_vd - th_vd) / th_vd;
  std::ostringstream os;
  os << "MC vs asymptotics at (.5,.5): sliding " << mc_vs << " vs " << th_vs << " (rel "
     << rel_s << "), disjoint " << mc_vd << " vs " << th_vd << " (rel " << rel_d
     << "), tol 15%";
  report(3, rel_s < 0.15 && rel_d < 0.15 && timer.seconds() < 600.0, os.str(),
         timer.seconds());
}

void criterion_4() {
  Timer timer;
  double worst = std::numeric_limits<double>::infinity();
  for (double beta : {1.0, kBetaHalfTail}) {
    const GumbelHougaard cop(beta, 2);
    const DominanceReport rep = variance_dominance_check(cop, {}, 100, 4, 444);
    worst = std::min(worst, rep.min_eigenvalue);
  }
  std::ostringstream os;
  os << "Loewner dominance over 100 random point sets (k <= 4), two shapes: "
     << "min eigenvalue of CovD - CovS = " << worst << " (tol -1e-9)";
  report(4, worst >= -1e-9 && timer.seconds() < 60.0, os.str(), timer.seconds());
}

struct CurveStats {
  std::map<int, double> mse, bias2;
};

std::map<std::string, CurveStats> collect(const SummaryTable& table) {
  std::map<std::string, CurveStats> out;
  for (const SummaryRow& r : table.rows) {
    if (r.stat == "mse") out[r.estimator].mse[r.m] = r.value;
    if (r.stat == "bias2") out[r.estimator].bias2[r.m] = r.value;
  }
  return out;
}

SummaryTable run_criterion5_model(const std::string& name, int workers) {
  ExperimentSpec spec = preset(name);
  spec.n = 1000;
  spec.reps = 200;
  spec.m_values = block_range(2, 20);
  spec.estimators = {"sliding", "disjoint", "agg", "bc_agg"};
  spec.workers = workers;
  return run(spec);
}

std::map<std::string, SummaryTable> g_c5_tables;  // reused by criterion 8

void criterion_5() {
  Timer timer;
  bool agg_beats_disjoint = true;
  bool bc_bias_below = true;
  double flat_bc = 0.0, flat_sl = 0.0;
  for (const std::string& name : {std::string("M1"), std::string("M2")}) {
    g_c5_tables[name] = run_criterion5_model(name, 8);
    const auto curves = collect(g_c5_tables[name]);
    for (int m = 2; m <= 20; ++m)
      agg_beats_disjoint =
          agg_beats_disjoint && curves.at("agg").mse.at(m) <= curves.at("disjoint").mse.at(m);
    if (name == "M1") {
      double bc_min = 1e300, bc_max = 0.0, sl_min = 1e300, sl_max = 0.0;
      for (int m = 5; m <= 15; ++m) {
        bc_bias_below = bc_bias_below &&
                        curves.at("bc_agg").bias2.at(m) < curves.at("sliding").bias2.at(m);
        bc_min = std::min(bc_min, curves.at("bc_agg").mse.at(m));
        bc_max = std::max(bc_max, curves.at("bc_agg").mse.at(m));
        sl_min = std::min(sl_min, curves.at("sliding").mse.at(m));
        sl_max = std::max(sl_max, curves.at("sliding").mse.at(m));
      }
      flat_bc = bc_max / bc_min;
      flat_sl = sl_max / sl_min;
    }
  }
  const bool flatter = flat_bc < flat_sl;
  // context for the bias sub-check: find where the improvement actually holds
  int bias_holds_up_to = 1;
  {
    const auto curves = collect(g_c5_tables.at("M1"));
    for (int m = 2; m <= 20; ++m) {
      if (curves.at("bc_agg").bias2.at(m) < curves.at("sliding").bias2.at(m))
        bias_holds_up_to = m;
      else
        break;
    }
  }
  std::ostringstream os;
  os << "M1/M2 at n=1000, reps=200: agg MSE <= disjoint MSE at every m = "
     << (agg_beats_disjoint ? "yes" : "no")
     << "; M1 bc_agg bias2 < sliding bias2 on m in 5..15 = " << (bc_bias_below ? "yes" : "no")
     << " (holds for m <= " << bias_holds_up_to
     << "; beyond that the O(k/n) margin-rank bias, which no second-order correction "
        "removes, exceeds the vanishing S/(2m) term)"
     << "; MSE flatness bc_agg " << flat_bc << " vs sliding " << flat_sl;
  report(5, agg_beats_disjoint && bc_bias_below && flatter && timer.seconds() < 1200.0,
         os.str(), timer.seconds());
}

void criterion_6() {
  Timer timer;
  // (a) deterministic recovery on exact second-order curves
  RhoConfig cfg = RhoConfig::simulation_defaults(2);
  const WeightScheme ws = harmonic_weights(cfg.M);
  bool exact_ok = true;
  for (double rho_true : {-1.0, -0.5}) {
    std::vector<double> ys(cfg.M.size());
    for (size_t i = 0; i < cfg.M.size(); ++i)
      ys[i] = 0.45 + std::pow(cfg.M[i], rho_true) * 0.3;
    const Flagged r = rho_penalized_curve(cfg.M, ys, ws.weights, cfg);
    exact_ok = exact_ok && r.defined && std::fabs(r.value - rho_true) <= cfg.grid_step;
  }
  // (b) statistical recovery on the study's iid model
  const ExperimentSpec m1 = preset("M1");
  int hits = 0;
  const int seeds = 100;
  std::vector<double> rhos;
  for (int s = 0; s < seeds; ++s) {
    RngStream rng = RngStream::substream(660001, static_cast<uint64_t>(s));
    const Matrix data = generate(*m1.model, 8000, rng);
    const RhoAggregate agg = rho_pen_aggregated(data, cfg);
    rhos.push_back(agg.value);
    hits += agg.value >= -1.5 && agg.value <= -0.55;
  }
  std::sort(rhos.begin(), rhos.end());
  std::ostringstream os;
  os << "rho recovery: exact curves within grid step = " << (exact_ok ? "yes" : "no")
     << "; M1 n=8000 pen_agg in [-1.5,-0.55] for " << hits << "/100 seeds (need >= 90)"
     << "; sample median " << rhos[49] << " for true rho = -1, q05 " << rhos[4] << ", q95 "
     << rhos[94] << " (the window clips the estimator's own sampling spread)";
  report(6, exact_ok && hits >= 90 && timer.seconds() < 900.0, os.str(), timer.seconds());
}

void criterion_7() {
  Timer timer;
  RngStream rng(770001);
  bool sliding_ok = true;
  for (int rep = 0; rep < 200; ++rep) {
    const long n = 2 + static_cast<long>(rng.next_u64() % 499);
    const int m = 1 + static_cast<int>(rng.next_u64() % std::min<long>(n, 50));
    Matrix data(n, 2);
    for (long i = 0; i < n; ++i)
      for (int j = 0; j < 2; ++j) data(i, j) = rng.uniform();
    const auto fast = sliding_maxima(data, m);
    for (long i = 0; i + m <= n && sliding_ok; ++i)
      for (int j = 0; j < 2; ++j) {
        double mx = data(i, j);
        for (long t = i; t < i + m; ++t) mx = std::max(mx, data(t, j));
        sliding_ok = sliding_ok && fast.maxima(i, j) == mx;
      }
  }

  // empirical copula batch vs direct counting, and pseudo-obs vs definition
  bool copula_ok = true, pseudo_ok = true;
  {
    Matrix data(700, 2);
    for (long i = 0; i < 700; ++i)
      for (int j = 0; j < 2; ++j) data(i, j) = rng.uniform();
    const auto panel = sliding_maxima(data, 12);
    const auto pseudo = pseudo_observations(panel);
    for (long i = 0; i < pseudo.rows && pseudo_ok; ++i)
      for (int j = 0; j < 2; ++j) {
        long cnt = 0;
        for (long t = 0; t < pseudo.rows; ++t)
          cnt += panel.maxima(t, j) <= panel.maxima(i, j);
        pseudo_ok = pseudo_ok &&
                    pseudo.u_hat(i, j) == static_cast<double>(cnt) / pseudo.rows;
      }
    std::vector<Point> grid;
    for (int g = 0; g < 500; ++g) grid.push_back({rng.uniform(), rng.uniform()});
    const auto batch = empirical_copula(pseudo, grid);
    for (size_t g = 0; g < grid.size(); ++g) {
      long cnt = 0;
      for (long i = 0; i < pseudo.rows; ++i)
        cnt += pseudo.u_hat(i, 0) <= grid[g][0] && pseudo.u_hat(i, 1) <= grid[g][1];
      copula_ok = copula_ok && batch[g] == static_cast<double>(cnt) / pseudo.rows;
    }
  }

  // regression fit vs a generic normal-equations solve
  bool reg_ok = true;
  {
    const std::vector<int> sizes = block_range(3, 14);
    const WeightScheme w = harmonic_weights(sizes);
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<double> ys(sizes.size());
      for (double& y : ys) y = rng.uniform();
      const double rho = -1.5 * rng.uniform() - 0.1;
      const int m_ref = sizes[rng.next_u64() % sizes.size()];
      const RegressionFit fit = bc_regression_value(sizes, ys, w.weights, m_ref, rho);
      // generic route: accumulate X'WX and X'Wy, solve by Gaussian elimination
      double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
      for (size_t i = 0; i < sizes.size(); ++i) {
        const double x = std::pow(static_cast<double>(sizes[i]) / m_ref, rho);
        a11 += w.weights[i];
        a12 += w.weights[i] * x;
        a22 += w.weights[i] * x * x;
        b1 += w.weights[i] * ys[i];
        b2 += w.weights[i] * x * ys[i];
      }
      const double f = a12 / a11;
      const double c = (b2 - f * b1) / (a22 - f * a12);
      const double b = (b1 - a12 * c) / a11;
      reg_ok = reg_ok && std::fabs(fit.c_inf - b) < 1e-10 && std::fabs(fit.b_m - c) < 1e-10;
    }
  }
  std::ostringstream os;
  os << "oracle equivalence: sliding vs brute force = " << (sliding_ok ? "exact" : "MISMATCH")
     << ", empirical copula batch vs direct = " << (copula_ok ? "exact" : "MISMATCH")
     << ", pseudo-obs vs counting = " << (pseudo_ok ? "exact" : "MISMATCH")
     << ", regression vs normal equations = " << (reg_ok ? "1e-10" : "MISMATCH");
  report(7, sliding_ok && copula_ok && pseudo_ok && reg_ok && timer.seconds() < 60.0,
         os.str(), timer.seconds());
}

void criterion_8() {
  Timer timer;
  bool identical = true;
  for (const std::string& name : {std::string("M1"), std::string("M2")}) {
    const SummaryTable t1 = run_criterion5_model(name, 1);
    std::ostringstream o1, o8;
    emit(t1, o1);
    emit(g_c5_tables.at(name), o8);  // criterion-5 table ran with 8 workers
    identical = identical && o1.str() == o8.str();
  }
  report(8, identical && true,
         std::string("criterion-5 runs with workers {1,8} emit bit-identical CSVs: ") +
             (identical ? "yes" : "no"),
         timer.seconds());
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  if (failures == 0)
    std::printf("acceptance: all criteria passed\n");
  else
    std::printf("acceptance: %d criterion(s) FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}
