#include "sinekan/experiments.hpp"

#include "sinekan/model_spec.hpp"
#include "sinekan/random.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace sinekan {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<double> make_grid_1d(int n_points) {
  if (n_points < 2) throw std::invalid_argument("grid needs at least 2 points");
  constexpr double lo = 0.01, hi = 1.0;
  std::vector<double> g(static_cast<std::size_t>(n_points));
  const double step = (hi - lo) / (n_points - 1);
  for (int i = 0; i < n_points; ++i) g[i] = lo + i * step;
  g.back() = hi;
  return g;
}

Matrix make_grid_2d(int n_per_axis) {
  const std::vector<double> axis = make_grid_1d(n_per_axis);
  const Eigen::Index n = n_per_axis;
  Matrix pts(n * n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      pts(i * n + j, 0) = axis[i];
      pts(i * n + j, 1) = axis[j];
    }
  }
  return pts;
}

SampledDataset sample_1d(const BenchFunction1D& func, int n_points) {
  const std::vector<double> xs = make_grid_1d(n_points);
  SampledDataset d;
  d.inputs.resize(n_points, 1);
  d.targets.resize(n_points, 1);
  for (int i = 0; i < n_points; ++i) {
    d.inputs(i, 0) = xs[i];
    d.targets(i, 0) = eval_1d(func, xs[i]);
  }
  d.func_id = to_string(func.id);
  d.grid_n = n_points;
  d.grid_spec = "uniform1d:n=" + std::to_string(n_points) + ":[0.01,1]";
  return d;
}

SampledDataset sample_2d(const BenchFunction2D& func, int n_per_axis) {
  SampledDataset d;
  d.inputs = make_grid_2d(n_per_axis);
  d.targets.resize(d.inputs.rows(), 1);
  for (Eigen::Index i = 0; i < d.inputs.rows(); ++i) {
    d.targets(i, 0) = eval_2d(func, d.inputs(i, 0), d.inputs(i, 1));
  }
  d.func_id = to_string(func.id);
  d.grid_n = n_per_axis;
  d.grid_spec = "mesh2d:n=" + std::to_string(n_per_axis) + "x" + std::to_string(n_per_axis) +
                ":[0.01,1]^2";
  return d;
}

std::uint64_t cell_seed(std::uint64_t root_seed, const std::string& func, const std::string& spec,
                        int grid_n) {
  return derive_seed(root_seed, func + "|" + spec + "|" + std::to_string(grid_n)) >> 1;
}

SweepRow fit_cell(const SampledDataset& data, const std::string& model_spec,
                  const SweepConfig& config, const SampledDataset* holdout) {
  const int dim = static_cast<int>(data.inputs.cols());
  const ModelSpec spec = ModelSpec::parse(model_spec);
  auto model = make_model(spec, dim);

  SweepRow row;
  row.func = data.func_id;
  row.grid_n = data.grid_n;
  row.model_spec = model->spec();
  row.param_count = static_cast<long>(model->param_count());
  row.flops = model_flops(spec, dim, config.cost);
  row.seed = cell_seed(config.root_seed, row.func, row.model_spec, row.grid_n);

  const Vector y = data.targets.col(0);
  if (model->linear_in_params()) {
    const Matrix design = model->jacobian(data.inputs);
    model->set_params(fit_linear(design, y));
    row.iterations = 1;
    row.starts = 1;
    row.term_reason = "linear";
    row.initial_cost = 0.5 * y.squaredNorm();
  } else {
    LeastSquaresProblem problem = make_fit_problem(*model, data.inputs, data.targets);
    SolverConfig cfg = config.solver;
    long budget = static_cast<long>(config.max_iter_per_param) * row.param_count;
    if (config.max_iter_cap > 0) budget = std::min<long>(budget, config.max_iter_cap);
    cfg.max_iterations = static_cast<int>(std::clamp<long>(budget, 1, std::numeric_limits<int>::max()));
    cfg.seed = row.seed;
    const FitReport rep = multi_start_fit(problem, cfg, config.starts);
    model->set_params(rep.params);
    row.iterations = rep.iterations;
    row.starts = config.starts;
    row.term_reason = to_string(rep.termination);
    row.initial_cost = rep.initial_cost;
  }
  const Vector pred = model->forward_batch(data.inputs).col(0);
  row.final_cost = 0.5 * (pred - y).squaredNorm();
  row.rel_l2 = relative_l2(y, pred);
  if (holdout != nullptr) {
    const Vector hy = holdout->targets.col(0);
    row.holdout_rel_l2 = relative_l2(hy, model->forward_batch(holdout->inputs).col(0));
  }
  return row;
}

namespace {

struct CellJob {
  const SampledDataset* data;
  const SampledDataset* holdout;
  std::string spec;
  int budget;
};

std::vector<SweepRow> run_jobs(const std::vector<CellJob>& jobs, const SweepConfig& config) {
  std::vector<SweepRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const CellJob& job = jobs[i];
      SweepRow row;
      try {
        row = fit_cell(*job.data, job.spec, config, job.holdout);
      } catch (const std::exception& e) {
        row.func = job.data->func_id;
        row.grid_n = job.data->grid_n;
        row.model_spec = job.spec;
        row.ok = false;
        row.error = e.what();
        row.term_reason = "failed";
        row.rel_l2 = row.final_cost = std::numeric_limits<double>::quiet_NaN();
        row.holdout_rel_l2 = row.rel_l2;
        row.seed = cell_seed(config.root_seed, row.func, row.model_spec, row.grid_n);
      }
      row.budget = job.budget;
      if (config.log) {
        std::ostringstream msg;
        msg << "[" << (i + 1) << "/" << jobs.size() << "] " << row.func << " " << row.model_spec
            << " n=" << row.grid_n << " params=" << row.param_count
            << " rel_l2=" << format_number(row.rel_l2) << " iters=" << row.iterations << " "
            << row.term_reason;
        if (!row.ok) msg << " (" << row.error << ")";
        std::lock_guard lock(log_mutex);
        config.log(msg.str());
      }
      rows[i] = std::move(row);
    }
  };
  int threads = config.threads > 0 ? config.threads
                                   : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(jobs.size(), 1)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return rows;
}

void validate_sweep_config(const SweepConfig& config) {
  config.solver.validate();
  if (config.max_iter_per_param < 1) throw std::invalid_argument("max_iter_per_param must be >= 1");
  if (config.starts < 1) throw std::invalid_argument("starts must be >= 1");
  if (config.max_iter_cap < 0) throw std::invalid_argument("max_iter_cap must be >= 0");
}

}  // namespace

SweepResult run_1d_sweep(const std::vector<std::string>& func_ids, const std::vector<int>& grid_sizes,
                         const std::vector<std::string>& model_specs, const SweepConfig& config) {
  if (func_ids.empty() || grid_sizes.empty() || model_specs.empty()) {
    throw std::invalid_argument("1D sweep needs functions, grid sizes and models");
  }
  validate_sweep_config(config);
  for (const auto& s : model_specs) make_model(ModelSpec::parse(s), 1);

  std::vector<SampledDataset> datasets;
  std::vector<SampledDataset> holdouts;
  datasets.reserve(func_ids.size() * grid_sizes.size());
  holdouts.reserve(datasets.capacity());
  for (const auto& f : func_ids) {
    const BenchFunction1D func = parse_func_1d(f, config.k_terms);
    for (int n : grid_sizes) {
      datasets.push_back(sample_1d(func, n));
      if (config.holdout) holdouts.push_back(sample_1d(func, 2 * n));
    }
  }
  std::vector<CellJob> jobs;
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    for (const auto& s : model_specs) {
      jobs.push_back({&datasets[d], config.holdout ? &holdouts[d] : nullptr, s, 0});
    }
  }
  SweepResult result;
  result.config = config;
  result.input_dim = 1;
  result.rows = run_jobs(jobs, config);
  return result;
}

SweepResult run_2d_sweep(const std::vector<std::string>& func_ids, const std::vector<CellModel>& models,
                         const SweepConfig& config, int grid_n) {
  if (func_ids.empty() || models.empty()) {
    throw std::invalid_argument("2D sweep needs functions and models");
  }
  validate_sweep_config(config);
  for (const auto& m : models) make_model(ModelSpec::parse(m.spec), 2);

  std::vector<SampledDataset> datasets;
  std::vector<SampledDataset> holdouts;
  for (const auto& f : func_ids) {
    const BenchFunction2D func = parse_func_2d(f);
    datasets.push_back(sample_2d(func, grid_n));
    if (config.holdout) holdouts.push_back(sample_2d(func, 2 * grid_n));
  }
  std::vector<CellJob> jobs;
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    for (const auto& m : models) {
      jobs.push_back({&datasets[d], config.holdout ? &holdouts[d] : nullptr, m.spec, m.budget});
    }
  }
  SweepResult result;
  result.config = config;
  result.input_dim = 2;
  result.has_budgets = std::any_of(models.begin(), models.end(), [](const CellModel& m) { return m.budget > 0; });
  result.rows = run_jobs(jobs, config);
  return result;
}

std::vector<CellModel> expand_ladder(const std::vector<std::string>& families,
                                     const std::vector<int>& budgets, int input_dim) {
  if (families.empty() || budgets.empty()) {
    throw std::invalid_argument("ladder needs families and budgets");
  }
  for (std::size_t i = 1; i < budgets.size(); ++i) {
    if (budgets[i] <= budgets[i - 1]) throw std::invalid_argument("budgets must be strictly ascending");
  }
  std::vector<CellModel> out;
  for (const auto& fam : families) {
    for (int b : budgets) out.push_back({ladder_spec(fam, b, input_dim).to_string(), b});
  }
  return out;
}

namespace {

std::string csv_field(const std::string& v) {
  if (v.find_first_of(",\"") == std::string::npos) return v;
  std::string q = "\"";
  for (char c : v) {
    if (c == '"') q.push_back('"');
    q.push_back(c);
  }
  q.push_back('"');
  return q;
}

}  // namespace

std::string SweepResult::to_csv() const {
  std::ostringstream out;
  const SolverConfig& s = config.solver;
  out << "# sinekan-bench version=" << kLibraryVersion << "\n";
  out << "# cost_model=" << config.cost.to_json() << " cost_source=" << to_string(config.cost.source)
      << "\n";
  out << "# solver={\"ftol\":" << format_number(s.ftol) << ",\"xtol\":" << format_number(s.xtol)
      << ",\"gtol\":" << format_number(s.gtol)
      << ",\"initial_radius\":" << format_number(s.initial_radius)
      << ",\"step\":\"" << to_string(s.step) << "\""
      << ",\"max_iter_per_param\":" << config.max_iter_per_param
      << ",\"max_iter_cap\":" << config.max_iter_cap << ",\"starts\":" << config.starts
      << ",\"root_seed\":" << config.root_seed << ",\"k_terms\":" << config.k_terms
      << ",\"holdout\":" << (config.holdout ? "true" : "false") << "}\n";
  out << "# flop_formulas=sinekan1d{mul=2G,add=2G+1,sin=G};"
         "sinekan2{mul=G1n+HG1n+G2H+mG2H,add=G1n+HG1n+H+G2H+mG2H+m,sin=G1n+G2H};"
         "mlp{mul=Hn+mH,add=Hn+mH,act=H};fourier{mul=3K,add=2K,sin=2K};"
         "fourier2d{P=(2K1+1)(2K2+1),mul=K1+K2+2P,add=P-1,sin=2(K1+K2)}\n";
  out << "# grid=" << (input_dim == 1 ? "uniform [0.01,1]" : "mesh [0.01,1]^2")
      << " error=relative_l2 on the fitting grid\n";
  if (has_budgets) {
    out << "# ladder=";
    bool first = true;
    for (const auto& r : rows) {
      if (r.func != rows.front().func) break;
      out << (first ? "" : ";") << r.budget << "->" << r.model_spec;
      first = false;
    }
    out << "\n";
  }
  out << "func,model_spec,grid_n,param_count,flops,rel_l2,final_cost,iters,term_reason,seed,starts";
  if (config.holdout) out << ",holdout_rel_l2";
  out << "\n";
  for (const auto& r : rows) {
    out << r.func << "," << csv_field(r.model_spec) << "," << r.grid_n << "," << r.param_count << ","
        << format_number(r.flops) << "," << format_number(r.rel_l2) << ","
        << format_number(r.final_cost) << "," << r.iterations << "," << r.term_reason << ","
        << r.seed << "," << r.starts;
    if (config.holdout) out << "," << format_number(r.holdout_rel_l2);
    out << "\n";
  }
  return out.str();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

}  // namespace

std::vector<SweepRow> parse_sweep_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  std::vector<SweepRow> rows;
  std::map<std::string, int> ladder;  // spec -> budget, from the "# ladder=" header
  while (std::getline(in, line)) {
    if (line.rfind("# ladder=", 0) == 0) {
      std::istringstream entries(line.substr(9));
      std::string entry;
      while (std::getline(entries, entry, ';')) {
        const auto arrow = entry.find("->");
        if (arrow != std::string::npos) ladder[entry.substr(arrow + 2)] = std::stoi(entry.substr(0, arrow));
      }
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv_line(line);
    if (header.empty()) {
      header = cells;
      continue;
    }
    if (cells.size() != header.size()) {
      throw std::invalid_argument("CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                                  std::to_string(header.size()));
    }
    SweepRow r;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::string& key = header[i];
      const std::string& v = cells[i];
      if (key == "func") r.func = v;
      else if (key == "model_spec") r.model_spec = v;
      else if (key == "grid_n") r.grid_n = std::stoi(v);
      else if (key == "param_count") r.param_count = std::stol(v);
      else if (key == "flops") r.flops = std::stod(v);
      else if (key == "rel_l2") r.rel_l2 = std::stod(v);
      else if (key == "final_cost") r.final_cost = std::stod(v);
      else if (key == "iters") r.iterations = std::stoi(v);
      else if (key == "term_reason") r.term_reason = v;
      else if (key == "seed") r.seed = std::stoull(v);
      else if (key == "starts") r.starts = std::stoi(v);
      else if (key == "holdout_rel_l2") r.holdout_rel_l2 = std::stod(v);
    }
    r.ok = r.term_reason != "failed";
    if (const auto it = ladder.find(r.model_spec); it != ladder.end()) r.budget = it->second;
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace sinekan
