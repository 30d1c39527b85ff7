#pragma once

#include "sinekan/benchfns.hpp"
#include "sinekan/metrics.hpp"
#include "sinekan/models.hpp"
#include "sinekan/solver.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace sinekan {

inline constexpr const char* kLibraryVersion = "0.1.0";

/// Inputs (one row per point) with target values for one benchmark.
struct SampledDataset {
  Matrix inputs;
  Matrix targets;  // one column
  std::string func_id;
  std::string grid_spec;  // e.g. "uniform1d:n=100:[0.01,1]"
  int grid_n = 0;
};

/// n uniformly spaced points, first 0.01, last 1.0.
/// Throws std::invalid_argument if n < 2.
std::vector<double> make_grid_1d(int n_points);

/// Cartesian product of make_grid_1d(n) with itself, n^2 rows, x-major
/// (row i * n + j holds (x_i, y_j)).
Matrix make_grid_2d(int n_per_axis);

SampledDataset sample_1d(const BenchFunction1D& func, int n_points);
SampledDataset sample_2d(const BenchFunction2D& func, int n_per_axis);

struct SweepConfig {
  SolverConfig solver;
  int max_iter_per_param = 100;
  // Hard cap on solver iterations per start; 0 means no cap.
  int max_iter_cap = 0;
  int starts = 5;  // nonlinear models; linear models always use one solve
  std::uint64_t root_seed = 42;
  CostModel cost = CostModel::paper_defaults();
  int k_terms = 5;
  // Also report error on a 2x denser grid over the same range.
  bool holdout = false;
  // 0 = std::thread::hardware_concurrency().
  int threads = 0;
  // Called once per finished cell from worker threads (serialized).
  std::function<void(const std::string&)> log;
};

/// A model to fit, optionally tagged with the parameter budget that produced it.
struct CellModel {
  std::string spec;
  int budget = 0;
};

struct SweepRow {
  std::string func;
  std::string model_spec;
  int grid_n = 0;
  long param_count = 0;
  double flops = 0.0;
  double rel_l2 = 0.0;
  double final_cost = 0.0;
  double initial_cost = 0.0;
  int iterations = 0;
  std::string term_reason;
  std::uint64_t seed = 0;
  int starts = 1;
  int budget = 0;
  double holdout_rel_l2 = 0.0;
  bool ok = true;
  std::string error;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  SweepConfig config;
  int input_dim = 1;
  bool has_budgets = false;

  /// Comment header lines (version, cost model, solver config, ladder) then
  /// the column header and one line per row:
  ///   func,model_spec,grid_n,param_count,flops,rel_l2,final_cost,iters,
  ///   term_reason,seed,starts[,holdout_rel_l2]
  std::string to_csv() const;
};

/// Every (function, grid size, model) cell, in that nesting order. Error is
/// measured on the grid used for fitting. Failed cells are recorded with
/// term_reason "failed" and ok = false; the sweep continues.
/// Throws std::invalid_argument on empty lists or malformed specs.
SweepResult run_1d_sweep(const std::vector<std::string>& func_ids, const std::vector<int>& grid_sizes,
                         const std::vector<std::string>& model_specs, const SweepConfig& config);

/// Every (function, model) cell on an n x n grid (default 100 x 100).
SweepResult run_2d_sweep(const std::vector<std::string>& func_ids, const std::vector<CellModel>& models,
                         const SweepConfig& config, int grid_n = 100);

/// Expands families x budgets into concrete models via ladder_spec. Budgets
/// must be strictly ascending.
std::vector<CellModel> expand_ladder(const std::vector<std::string>& families,
                                     const std::vector<int>& budgets, int input_dim);

/// Fits one model to one dataset with the shared protocol and returns the
/// filled row. Linear-in-parameter models use the minimum-norm linear solve.
SweepRow fit_cell(const SampledDataset& data, const std::string& model_spec,
                  const SweepConfig& config, const SampledDataset* holdout = nullptr);

/// Seed for one cell: derive_seed(root_seed, "func|spec|grid_n").
std::uint64_t cell_seed(std::uint64_t root_seed, const std::string& func,
                        const std::string& spec, int grid_n);

/// Parses rows written by SweepResult::to_csv (comment lines skipped).
std::vector<SweepRow> parse_sweep_csv(const std::string& text);

/// Shortest round-trip decimal form used for every number in CSV/JSON output.
std::string format_number(double v);

}  // namespace sinekan
