#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "blockmax/simlab.hpp"

using namespace blockmax;

namespace {

ExperimentSpec small_spec(const std::string& name) {
  ExperimentSpec spec = preset(name);
  spec.n = 400;
  spec.reps = 30;
  spec.m_values = block_range(2, 5);
  spec.grid = tensor_grid({0.25, 0.5, 0.75}, 2);
  spec.estimators = {"sliding", "disjoint", "agg", "bc_agg"};
  spec.rho_cfg.M = block_range(2, 30);
  spec.rho_cfg.U = diagonal_grid(axis(0.2, 0.5, 0.1), 2);
  return spec;
}

}  // namespace

TEST_CASE("presets carry the study's model parameters") {
  const ExperimentSpec m2 = preset("M2");
  CHECK(m2.model->base->family() == "opclayton");
  CHECK(m2.model->order == 1);
  CHECK(m2.model->lag_coeffs(0, 0) == doctest::Approx(0.25));
  CHECK(m2.model->lag_coeffs(0, 1) == doctest::Approx(0.5));
  const auto desc = m2.model->base->descriptor();
  CHECK(std::stod(desc.at("beta")) ==
        doctest::Approx(std::log(2.0) / std::log(1.75)).epsilon(1e-14));
  CHECK(std::stod(desc.at("theta")) == doctest::Approx(1.0));

  const ExperimentSpec m3 = preset("M3");
  CHECK(m3.model->base->family() == "t");
  CHECK(m3.model->order == 0);
  CHECK(m3.grid.size() == 81);

  const ExperimentSpec m10 = preset("M10");
  CHECK(m10.model->base->family() == "t");
  CHECK(m10.model->base->dim() == 4);
  CHECK(m10.model->order == 1);
  CHECK(m10.model->lag_coeffs(0, 0) == doctest::Approx(0.25));
  CHECK(m10.model->lag_coeffs(0, 1) == doctest::Approx(0.75));
  CHECK(m10.grid.size() == 81);  // {.25,.5,.75}^4

  const ExperimentSpec m12 = preset("M12");
  CHECK(m12.model->base->dim() == 8);
  CHECK(m12.grid.size() == 256);  // {.25,.75}^8

  CHECK_THROWS_AS(preset("M16"), std::invalid_argument);

  // models without an available attractor cannot be run for bias statistics
  ExperimentSpec m8 = preset("M8");
  m8.reps = 1;
  m8.n = 200;
  m8.m_values = {2};
  m8.estimators = {"sliding"};
  CHECK_THROWS_AS(run(m8), std::runtime_error);
}

TEST_CASE("single replication has zero variance and the mse identity holds") {
  ExperimentSpec spec = small_spec("M1");
  spec.reps = 1;
  spec.estimators = {"sliding", "disjoint", "agg"};
  const SummaryTable table = run(spec);
  double mse = -1.0, bias2 = -1.0, var = -1.0;
  for (const SummaryRow& r : table.rows) {
    if (r.stat == "var") CHECK(r.value == 0.0);
    if (r.estimator == "agg" && r.m == 3) {
      if (r.stat == "mse") mse = r.value;
      if (r.stat == "bias2") bias2 = r.value;
      if (r.stat == "var") var = r.value;
    }
  }
  CHECK(mse == doctest::Approx(bias2 + var).epsilon(1e-12));
}

TEST_CASE("mse = bias2 + var per cell") {
  const SummaryTable table = run(small_spec("M2"));
  std::map<std::pair<std::string, int>, std::map<std::string, double>> cells;
  for (const SummaryRow& r : table.rows) cells[{r.estimator, r.m}][r.stat] = r.value;
  CHECK(cells.size() == 4 * 4);  // 4 estimators, m in {2..5}
  for (const auto& [key, stats] : cells) {
    REQUIRE(stats.count("mse"));
    CHECK(stats.at("mse") ==
          doctest::Approx(stats.at("bias2") + stats.at("var")).epsilon(1e-12));
  }
}

TEST_CASE("independence model: sliding estimator is unbiased up to noise terms") {
  // beta = 1 is max-stable with independent maxima across coordinates, so the
  // attractor gap C_m - C_inf vanishes for every m; what remains of bias^2 is
  // the O(1/k) rank-bias of the empirical copula plus MC noise, both far
  // below the variance scale
  ExperimentSpec spec = small_spec("M1");
  auto gh = std::make_shared<GumbelHougaard>(1.0, 2);
  spec.model = MovingMaxSpec::iid(gh);
  spec.name = "indep";
  spec.n = 1000;
  spec.reps = 100;
  spec.estimators = {"sliding"};
  const SummaryTable table = run(spec);
  for (const SummaryRow& r : table.rows) {
    if (r.stat != "bias2") continue;
    double var = 0.0;
    for (const SummaryRow& q : table.rows)
      if (q.estimator == r.estimator && q.m == r.m && q.stat == "var") var = q.value;
    CHECK(r.value < 0.1 * var);
  }
}

TEST_CASE("determinism: identical tables for any worker count") {
  ExperimentSpec s1 = small_spec("M2");
  ExperimentSpec s4 = small_spec("M2");
  ExperimentSpec s16 = small_spec("M2");
  s1.workers = 1;
  s4.workers = 4;
  s16.workers = 16;
  const SummaryTable t1 = run(s1);
  const SummaryTable t4 = run(s4);
  const SummaryTable t16 = run(s16);
  REQUIRE(t1.rows.size() == t4.rows.size());
  for (size_t i = 0; i < t1.rows.size(); ++i) {
    CHECK(t1.rows[i].value == t4.rows[i].value);
    CHECK(t1.rows[i].estimator == t4.rows[i].estimator);
  }
  std::ostringstream o1, o4, o16;
  emit(t1, o1);
  emit(t4, o4);
  emit(t16, o16);
  CHECK(o1.str() == o4.str());
  CHECK(o1.str() == o16.str());
}

TEST_CASE("fresh seeds change the table, fixed seeds reproduce it") {
  ExperimentSpec a = small_spec("M1");
  a.reps = 5;
  ExperimentSpec b = a;
  b.master_seed = a.master_seed + 1;
  const SummaryTable ta = run(a), tb = run(b), ta2 = run(a);
  bool any_diff = false;
  for (size_t i = 0; i < ta.rows.size(); ++i) {
    any_diff |= ta.rows[i].value != tb.rows[i].value;
    CHECK(ta.rows[i].value == ta2.rows[i].value);
  }
  CHECK(any_diff);
}

TEST_CASE("emit and parse round-trip the table exactly") {
  const SummaryTable table = run(small_spec("M1"));
  const std::string path = "simlab_roundtrip.csv";
  emit(table, path);
  const SummaryTable back = parse_summary(path);
  REQUIRE(back.rows.size() == table.rows.size());
  for (size_t i = 0; i < table.rows.size(); ++i) {
    CHECK(back.rows[i].model == table.rows[i].model);
    CHECK(back.rows[i].estimator == table.rows[i].estimator);
    CHECK(back.rows[i].m == table.rows[i].m);
    CHECK(back.rows[i].stat == table.rows[i].stat);
    CHECK(back.rows[i].value == table.rows[i].value);  // bit-exact via %.17g
  }
  std::remove(path.c_str());

  // empty table: header-only file
  emit(SummaryTable{}, path);
  const SummaryTable empty = parse_summary(path);
  CHECK(empty.rows.empty());
  std::remove(path.c_str());
}

TEST_CASE("per-cell failure accounting flags degenerate estimators") {
  ExperimentSpec spec = small_spec("M1");
  spec.reps = 4;
  spec.estimators = {"sliding", "bc_naive"};
  spec.rho.penalized = false;
  spec.rho.fixed_value = -1e-12;  // (m'/m)^rho - 1 degenerates for every pair
  const SummaryTable table = run(spec);
  bool saw_fail = false, saw_sliding = false;
  for (const SummaryRow& r : table.rows) {
    if (r.estimator == "bc_naive" && r.stat == "fail_rate") {
      saw_fail = true;
      CHECK(r.value == 1.0);
    }
    if (r.estimator == "sliding") {
      saw_sliding = true;
      CHECK(r.stat != "fail_rate");
    }
  }
  CHECK(saw_fail);
  CHECK(saw_sliding);
}

TEST_CASE("manifest and data csv plumbing") {
  const ExperimentSpec spec = small_spec("M2");
  const std::string json = manifest_json(spec);
  CHECK(json.find("\"name\": \"M2\"") != std::string::npos);
  CHECK(json.find("\"seed\": 1000003") != std::string::npos);
  CHECK(json.find(kVersion) != std::string::npos);
  CHECK(json.find("opclayton") != std::string::npos);

  RngStream rng(3);
  const Matrix data = spec.model->base->sample(50, rng);
  write_data_csv(data, "simlab_data.csv");
  const Matrix back = read_data_csv("simlab_data.csv");
  REQUIRE(back.rows() == data.rows());
  REQUIRE(back.cols() == data.cols());
  for (long i = 0; i < data.rows(); ++i)
    for (long j = 0; j < data.cols(); ++j) CHECK(back(i, j) == data(i, j));
  std::remove("simlab_data.csv");
}
