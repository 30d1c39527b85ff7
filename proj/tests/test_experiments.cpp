#include "sinekan/experiments.hpp"
#include "sinekan/model_spec.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

using namespace sinekan;

namespace {

SweepConfig quick_config() {
  SweepConfig c;
  c.starts = 2;
  c.max_iter_per_param = 5;
  c.threads = 1;
  return c;
}

}  // namespace

TEST_CASE("1d grid") {
  CHECK(make_grid_1d(2) == std::vector<double>{0.01, 1.0});
  const auto g = make_grid_1d(100);
  CHECK(g.size() == 100);
  CHECK(g.front() == 0.01);
  CHECK(g.back() == 1.0);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] - g[i - 1] == doctest::Approx(0.01).epsilon(1e-12));
  for (int n : {2, 3, 17, 400}) {
    const auto h = make_grid_1d(n);
    for (std::size_t i = 1; i < h.size(); ++i) CHECK(h[i] > h[i - 1]);
  }
  CHECK_THROWS_AS(make_grid_1d(1), std::invalid_argument);
}

TEST_CASE("2d grid") {
  const Matrix g = make_grid_2d(2);
  CHECK(g.rows() == 4);
  const double want[4][2] = {{0.01, 0.01}, {0.01, 1}, {1, 0.01}, {1, 1}};
  for (int i = 0; i < 4; ++i) {
    CHECK(g(i, 0) == want[i][0]);
    CHECK(g(i, 1) == want[i][1]);
  }
  CHECK(make_grid_2d(100).rows() == 10000);
  CHECK(make_grid_2d(7).rows() == 49);
  CHECK_THROWS_AS(make_grid_2d(1), std::invalid_argument);
}

TEST_CASE("datasets") {
  const auto d = sample_1d(parse_func_1d("f2"), 50);
  CHECK(d.inputs.rows() == 50);
  CHECK(d.targets.rows() == 50);
  CHECK(d.func_id == "f2");
  CHECK(d.inputs.minCoeff() > 0.0);
  CHECK(d.targets.allFinite());
  const auto d2 = sample_2d(parse_func_2d("rosenbrock"), 10);
  CHECK(d2.inputs.rows() == 100);
  CHECK(d2.targets(0, 0) == eval_2d(BenchFunction2D::rosenbrock(), 0.01, 0.01));
}

TEST_CASE("fourier on a sine in its span") {
  SampledDataset d;
  const auto g = make_grid_1d(100);
  d.inputs.resize(100, 1);
  d.targets.resize(100, 1);
  for (int i = 0; i < 100; ++i) {
    d.inputs(i, 0) = g[i];
    d.targets(i, 0) = std::sin(2 * std::numbers::pi * g[i]);
  }
  d.func_id = "sin2pi";
  d.grid_n = 100;
  for (int k : {1, 3, 8}) {
    const SweepRow r = fit_cell(d, "fourier:K=" + std::to_string(k), quick_config());
    CHECK(r.ok);
    CHECK(r.rel_l2 < 1e-6);
    CHECK(r.term_reason == "linear");
  }
}

TEST_CASE("sinekan1d reaches zero on a zero target") {
  SampledDataset d;
  d.inputs.resize(30, 1);
  d.targets = Matrix::Zero(30, 1);
  for (int i = 0; i < 30; ++i) d.inputs(i, 0) = 0.01 + 0.03 * i;
  auto model = make_model(ModelSpec::parse("sinekan1d:G=4"), 1);
  auto p = make_fit_problem(*model, d.inputs, d.targets);
  p.initial = model->init_params(5);
  SolverConfig cfg;
  cfg.max_iterations = 400;
  const FitReport r = fit(p, cfg);
  CHECK(r.final_cost <= r.initial_cost);
  CHECK(r.final_cost < 1e-20);
  // relative error is undefined on a zero target; the cell is reported failed, not crashed.
  const SweepRow row = [&] {
    try {
      return fit_cell(d, "sinekan1d:G=4", quick_config());
    } catch (const std::domain_error&) {
      SweepRow failed;
      failed.ok = false;
      return failed;
    }
  }();
  CHECK_FALSE(row.ok);
}

TEST_CASE("1d sweep shape and bookkeeping") {
  const auto cfg = quick_config();
  const SweepResult r = run_1d_sweep({"f1", "f4"}, {25, 50}, {"sinekan1d:G=3", "fourier:K=3"}, cfg);
  CHECK(r.rows.size() == 2 * 2 * 2);
  std::set<std::uint64_t> seeds;
  for (const auto& row : r.rows) {
    CHECK(row.ok);
    CHECK(row.param_count == spec_param_count(ModelSpec::parse(row.model_spec), 1));
    CHECK(row.flops == model_flops(ModelSpec::parse(row.model_spec), 1, cfg.cost));
    CHECK(row.final_cost <= row.initial_cost);
    CHECK(row.starts == (row.model_spec.rfind("fourier", 0) == 0 ? 1 : 2));
    seeds.insert(row.seed);
  }
  CHECK(seeds.size() == r.rows.size());
  // Config order: func, then grid, then model.
  CHECK(r.rows[0].func == "f1");
  CHECK(r.rows[1].model_spec == "fourier:K=3");
  CHECK(r.rows[2].grid_n == 50);
  CHECK(r.rows[4].func == "f4");
}

TEST_CASE("sweep csv is deterministic and thread independent") {
  auto cfg = quick_config();
  const auto a = run_1d_sweep({"f2", "f3"}, {25, 40}, {"sinekan1d:G=3", "fourier:K=4"}, cfg).to_csv();
  const auto b = run_1d_sweep({"f2", "f3"}, {25, 40}, {"sinekan1d:G=3", "fourier:K=4"}, cfg).to_csv();
  cfg.threads = 3;
  const auto c = run_1d_sweep({"f2", "f3"}, {25, 40}, {"sinekan1d:G=3", "fourier:K=4"}, cfg).to_csv();
  CHECK(a == b);
  CHECK(a == c);
  CHECK(a.find("# cost_model={\"add\":1,\"mul\":1,\"relu\":1.5,\"sin\":12}") != std::string::npos);
  CHECK(a.find("func,model_spec,grid_n,param_count,flops,rel_l2,final_cost,iters,term_reason,seed,starts\n") != std::string::npos);
  cfg.root_seed = 43;
  CHECK(run_1d_sweep({"f2"}, {25}, {"sinekan1d:G=3"}, cfg).rows[0].seed !=
        run_1d_sweep({"f2"}, {25}, {"sinekan1d:G=3"}, quick_config()).rows[0].seed);
}

TEST_CASE("csv round trip") {
  auto cfg = quick_config();
  cfg.holdout = true;
  const auto r = run_2d_sweep({"gauss2d"}, {{"sinekan2:G1=2,H=3,G2=2", 0}, {"fourier2d:K1=1,K2=2", 0}}, cfg, 8);
  const auto parsed = parse_sweep_csv(r.to_csv());
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0].model_spec == "sinekan2:G1=2,H=3,G2=2");
  CHECK(parsed[1].model_spec == "fourier2d:K1=1,K2=2");
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(parsed[i].rel_l2 == r.rows[i].rel_l2);
    CHECK(parsed[i].flops == r.rows[i].flops);
    CHECK(parsed[i].seed == r.rows[i].seed);
    CHECK(parsed[i].holdout_rel_l2 == r.rows[i].holdout_rel_l2);
    CHECK(parsed[i].holdout_rel_l2 > 0);
  }
}

TEST_CASE("ladder expansion") {
  const auto cells = expand_ladder({"sinekan2", "mlp:relu", "mlp:sine", "fourier2d"}, {50, 100, 200, 400, 800}, 2);
  CHECK(cells.size() == 20);
  CHECK_THROWS_AS(expand_ladder({"mlp:relu"}, {100, 50}, 2), std::invalid_argument);
  CHECK_THROWS_AS(expand_ladder({"mlp:relu"}, {100, 100}, 2), std::invalid_argument);
}

TEST_CASE("fourier error is non-increasing along the ladder") {
  auto cfg = quick_config();
  std::vector<CellModel> cells;
  for (int b : {50, 100, 200, 400, 800}) cells.push_back({ladder_spec("fourier2d", b, 2).to_string(), b});
  const auto r = run_2d_sweep({"gauss2d", "rosenbrock"}, cells, cfg, 30);
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    if (r.rows[i].func != r.rows[i - 1].func) continue;
    CHECK(r.rows[i].rel_l2 <= r.rows[i - 1].rel_l2 * (1 + 1e-10));
  }
}

TEST_CASE("2d sweep bookkeeping and budget gain") {
  auto cfg = quick_config();
  cfg.max_iter_per_param = 100;
  cfg.max_iter_cap = 60;
  const auto cells = expand_ladder({"sinekan2", "mlp:sine"}, {50, 200}, 2);
  const auto r = run_2d_sweep({"rosenbrock"}, cells, cfg, 20);
  CHECK(r.rows.size() == 4);
  for (const auto& row : r.rows) {
    CHECK(row.param_count == spec_param_count(ModelSpec::parse(row.model_spec), 2));
    CHECK(row.flops == model_flops(ModelSpec::parse(row.model_spec), 2, cfg.cost));
    CHECK(row.grid_n == 20);
  }
  // rows: sinekan2@50, mlp@50, sinekan2@200, mlp@200 or grouped by family; find by spec.
  double small = -1, large = -1;
  for (const auto& row : r.rows) {
    if (row.model_spec.rfind("sinekan2", 0) != 0) continue;
    (row.budget == 50 ? small : large) = row.rel_l2;
  }
  CHECK(large < small);
}
