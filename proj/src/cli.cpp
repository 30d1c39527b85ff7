#include "sinekan/cli.hpp"

#include "sinekan/benchfns.hpp"
#include "sinekan/constructive.hpp"
#include "sinekan/metrics.hpp"
#include "sinekan/model_spec.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

namespace sinekan::cli {

namespace fs = std::filesystem;

namespace {

struct SharedFlags {
  std::string out_dir = "out";
  std::uint64_t seed = 42;
  int starts = 5;
  int max_iter_per_param = 100;
  int max_iter = 0;
  double ftol = 1e-10;
  double xtol = 1e-10;
  double gtol = 1e-10;
  std::string step = "exact";
  std::string cost_model = "paper";
  bool plots = true;
  bool keep_going = false;
  bool holdout = false;
  int threads = 0;
  int k_terms = 5;
  bool quiet = false;
};

void add_shared(CLI::App* cmd, SharedFlags& f) {
  cmd->add_option("--out", f.out_dir, "Output directory (created if absent)");
  cmd->add_option("--seed", f.seed, "Root seed");
  cmd->add_option("--starts", f.starts, "Starts per nonlinear fit")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iter-per-param", f.max_iter_per_param,
                  "Solver iterations per fitted parameter")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-iter", f.max_iter, "Hard cap on solver iterations per start (0 = none)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--ftol", f.ftol, "Relative cost-decrease tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--xtol", f.xtol, "Relative step tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--gtol", f.gtol, "Scaled gradient tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--step", f.step, "Trust-region step: exact or dogleg")
      ->check(CLI::IsMember({"exact", "dogleg"}));
  cmd->add_option("--cost-model", f.cost_model, "FLOP weights: paper, torchlike or measured")
      ->check(CLI::IsMember({"paper", "torchlike", "measured"}));
  cmd->add_flag("--plots,!--no-plots", f.plots, "Write SVG plots");
  cmd->add_flag("--keep-going", f.keep_going, "Exit 0 even if some cells fail");
  cmd->add_flag("--holdout", f.holdout, "Also report error on a 2x denser grid");
  cmd->add_option("--threads", f.threads, "Worker threads (0 = hardware concurrency)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--k-terms", f.k_terms, "Summands in f2/f3")->check(CLI::PositiveNumber);
  cmd->add_flag("--quiet", f.quiet, "No per-cell log lines");
}

CostModel resolve_cost(const std::string& name) {
  if (name == "torchlike") return CostModel::torch_like();
  if (name == "measured") return measure_costs(20000, 1024);
  return CostModel::paper_defaults();
}

SweepConfig sweep_config(const SharedFlags& f, std::ostream& err) {
  SweepConfig c;
  c.solver.ftol = f.ftol;
  c.solver.xtol = f.xtol;
  c.solver.gtol = f.gtol;
  c.solver.step = f.step == "dogleg" ? StepMethod::Dogleg : StepMethod::Exact;
  c.max_iter_per_param = f.max_iter_per_param;
  c.max_iter_cap = f.max_iter;
  c.starts = f.starts;
  c.root_seed = f.seed;
  c.cost = resolve_cost(f.cost_model);
  c.k_terms = f.k_terms;
  c.holdout = f.holdout;
  c.threads = f.threads;
  if (!f.quiet) c.log = [&err](const std::string& line) { err << line << "\n"; };
  return c;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + path.string());
  file << text;
}

int sweep_exit_code(const SweepResult& result, const SharedFlags& f, std::ostream& err) {
  std::size_t failed = 0;
  for (const auto& r : result.rows) failed += r.ok ? 0 : 1;
  if (failed == 0) return 0;
  err << failed << " of " << result.rows.size() << " cells failed\n";
  if (failed == result.rows.size()) return 1;
  return f.keep_going ? 0 : 1;
}

std::string family_of(const std::string& spec) {
  const auto colon = spec.find(':');
  std::string fam = spec.substr(0, colon);
  if (fam == "mlp") fam += spec.find("act=sine") != std::string::npos ? ":sine" : ":relu";
  return fam;
}

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  // Accepts both repeated flags and ';'-separated items. Commas belong to
  // model specs, so they are not separators.
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ';')) {
      if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

int cmd_bench1d(const SharedFlags& f, std::vector<std::string> funcs, std::vector<int> grids,
                std::vector<std::string> models, std::ostream& out, std::ostream& err) {
  const SweepConfig cfg = sweep_config(f, err);
  const SweepResult result = run_1d_sweep(funcs, grids, split_list(models), cfg);
  fs::create_directories(f.out_dir);
  const std::string csv = result.to_csv();
  const fs::path csv_path = fs::path(f.out_dir) / "bench1d.csv";
  write_file(csv_path, csv);
  out << "wrote " << csv_path.string() << " (" << result.rows.size() << " rows)\n";
  if (f.plots) {
    for (const auto& [func, chart] : plots_from_1d_csv(csv)) {
      const fs::path p = fs::path(f.out_dir) / ("bench1d_" + func + ".svg");
      write_file(p, render_svg({chart}));
      out << "wrote " << p.string() << "\n";
    }
  }
  return sweep_exit_code(result, f, err);
}

int cmd_bench2d(const SharedFlags& f, std::vector<std::string> funcs, std::vector<std::string> models,
                std::vector<int> budgets, int grid_n, std::ostream& out, std::ostream& err) {
  const SweepConfig cfg = sweep_config(f, err);
  std::vector<CellModel> cells;
  std::vector<std::string> families;
  for (const auto& m : split_list(models)) {
    if (m.find('=') != std::string::npos) {
      cells.push_back({m, 0});
    } else if (is_family_name(m)) {
      families.push_back(m);
    } else {
      throw std::invalid_argument("unknown model family or spec: " + m);
    }
  }
  if (!families.empty()) {
    for (auto& c : expand_ladder(families, budgets, 2)) cells.push_back(std::move(c));
  }
  const SweepResult result = run_2d_sweep(funcs, cells, cfg, grid_n);
  fs::create_directories(f.out_dir);
  const std::string csv = result.to_csv();
  const fs::path csv_path = fs::path(f.out_dir) / "bench2d.csv";
  write_file(csv_path, csv);
  out << "wrote " << csv_path.string() << " (" << result.rows.size() << " rows)\n";
  if (f.plots) {
    for (const auto& [func, panels] : plots_from_2d_csv(csv)) {
      const fs::path p = fs::path(f.out_dir) / ("bench2d_" + func + ".svg");
      write_file(p, render_svg(panels));
      out << "wrote " << p.string() << "\n";
    }
  }
  return sweep_exit_code(result, f, err);
}

nlohmann::json construction_json(const constructive::SineConstruction& c, const std::string& func,
                                 const std::string& rule, std::uint64_t seed) {
  nlohmann::json j;
  j["func"] = func;
  j["N"] = c.degree;
  j["alpha"] = c.alpha;
  j["frequency_rule"] = rule;
  j["seed"] = seed;
  j["attempts"] = c.attempts;
  j["phases"] = c.phases;
  j["frequencies"] = c.frequencies;
  j["amplitudes"] = c.amplitudes;
  j["condition_number"] = c.condition;
  j["errors"] = {{"bernstein", c.bernstein_error},
                 {"taylor_tail", c.taylor_tail},
                 {"solve_residual", c.solve_residual},
                 {"certificate", c.certificate},
                 {"grid_sup_error", c.grid_sup_error},
                 {"grid_argmax", c.grid_argmax},
                 {"sum_abs_amplitudes", c.sum_abs_amplitudes},
                 {"grid_points", constructive::kSupGridPoints}};
  j["version"] = kLibraryVersion;
  return j;
}

int cmd_construct(const std::string& out_dir, const std::string& func, int degree, double alpha,
                  const std::string& rule, std::uint64_t seed, int k_terms, std::ostream& out,
                  std::ostream& err) {
  const auto target = construct_target(func, k_terms);
  const auto freq_rule =
      rule == "spread" ? constructive::FrequencyRule::Spread : constructive::FrequencyRule::ZeroAnchored;
  constructive::SineConstruction c;
  try {
    c = constructive::construct_sine_approx(target, degree, alpha, freq_rule, seed);
  } catch (const constructive::IllConditionedError& e) {
    err << "construct failed: " << e.what() << "\n";
    return 3;
  }
  out << "sinusoidal construction for " << func << "\n"
      << "  N = " << c.degree << ", alpha = " << format_number(c.alpha) << ", rule = " << rule
      << ", attempts = " << c.attempts << "\n"
      << "  condition number     " << format_number(c.condition) << "\n"
      << "  bernstein error      " << format_number(c.bernstein_error) << "\n"
      << "  taylor tail bound    " << format_number(c.taylor_tail) << "\n"
      << "  solve residual       " << format_number(c.solve_residual) << "\n"
      << "  certificate          " << format_number(c.certificate) << "\n"
      << "  grid sup-error       " << format_number(c.grid_sup_error) << " at x = "
      << format_number(c.grid_argmax) << "\n";
  const nlohmann::json j = construction_json(c, func, rule, seed);
  out << j.dump() << "\n";
  fs::create_directories(out_dir);
  const fs::path p = fs::path(out_dir) / ("construct_" + func + "_N" + std::to_string(degree) + ".json");
  write_file(p, j.dump(2) + "\n");
  out << "wrote " << p.string() << "\n";
  return 0;
}

int cmd_flops(const std::string& cost_model, bool measure, long iterations, int batch,
              const std::vector<std::string>& models, int input_dim, std::ostream& out) {
  CostModel c;
  if (measure || cost_model == "measured") {
    c = measure_costs(iterations, batch);
  } else if (cost_model == "torchlike") {
    c = CostModel::torch_like();
  }
  out << c.to_json() << "\n";
  if (c.source == CostSource::Measured) {
    out << "# timings_ns add=" << format_number(c.add_ns) << " mul=" << format_number(c.mul_ns)
        << " relu=" << format_number(c.relu_ns) << " sin=" << format_number(c.sin_ns)
        << " iterations=" << iterations << " batch=" << batch << "\n";
  }
  for (const auto& m : split_list(models)) {
    const ModelSpec spec = ModelSpec::parse(m);
    out << spec.to_string() << " params=" << spec_param_count(spec, input_dim)
        << " flops=" << format_number(model_flops(spec, input_dim, c)) << "\n";
  }
  return 0;
}

}  // namespace

std::function<double(double)> construct_target(const std::string& name, int k_terms) {
  if (name == "const1") return [](double) { return 1.0; };
  if (name == "identity") return [](double x) { return x; };
  if (name == "square") return [](double x) { return x * x; };
  if (name == "sin3") return [](double x) { return std::sin(3.0 * x); };
  if (is_1d_id(name)) {
    const BenchFunction1D f = parse_func_1d(name, k_terms);
    return [f](double x) { return x > 0.0 ? eval_1d(f, x) : 0.0; };
  }
  throw std::invalid_argument("unknown construct target: " + name);
}

std::vector<std::pair<std::string, LineChart>> plots_from_1d_csv(const std::string& csv) {
  const auto rows = parse_sweep_csv(csv);
  std::vector<std::pair<std::string, LineChart>> out;
  std::map<std::string, std::size_t> func_index;
  for (const auto& r : rows) {
    auto [it, inserted] = func_index.emplace(r.func, out.size());
    if (inserted) {
      LineChart chart;
      chart.title = r.func + ": error vs grid size";
      chart.x_label = "grid size";
      chart.y_label = "relative L2 error";
      chart.log_y = true;
      out.emplace_back(r.func, chart);
    }
    LineChart& chart = out[it->second].second;
    auto s = std::find_if(chart.series.begin(), chart.series.end(),
                          [&](const Series& x) { return x.label == r.model_spec; });
    if (s == chart.series.end()) {
      chart.series.push_back({r.model_spec, {}, {}});
      s = std::prev(chart.series.end());
    }
    s->x.push_back(r.grid_n);
    s->y.push_back(r.rel_l2);
  }
  return out;
}

std::vector<std::pair<std::string, std::vector<LineChart>>> plots_from_2d_csv(const std::string& csv) {
  const auto rows = parse_sweep_csv(csv);
  std::vector<std::pair<std::string, std::vector<LineChart>>> out;
  std::map<std::string, std::size_t> func_index;
  for (const auto& r : rows) {
    auto [it, inserted] = func_index.emplace(r.func, out.size());
    if (inserted) {
      LineChart by_params;
      by_params.title = r.func + ": error vs parameters";
      by_params.x_label = "parameters";
      by_params.y_label = "relative L2 error";
      by_params.log_x = true;
      LineChart by_flops = by_params;
      by_flops.title = r.func + ": error vs FLOPs";
      by_flops.x_label = "FLOPs per evaluation";
      out.emplace_back(r.func, std::vector<LineChart>{by_params, by_flops});
    }
    auto& panels = out[it->second].second;
    const std::string fam = family_of(r.model_spec);
    for (int p = 0; p < 2; ++p) {
      auto& chart = panels[p];
      auto s = std::find_if(chart.series.begin(), chart.series.end(),
                            [&](const Series& x) { return x.label == fam; });
      if (s == chart.series.end()) {
        chart.series.push_back({fam, {}, {}});
        s = std::prev(chart.series.end());
      }
      s->x.push_back(p == 0 ? static_cast<double>(r.param_count) : r.flops);
      s->y.push_back(r.rel_l2);
    }
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"SineKAN function-approximation benchmarks"};
  app.require_subcommand(1);

  SharedFlags b1;
  std::vector<std::string> funcs1 = {"f1", "f2", "f3", "f4", "f5"};
  std::vector<int> grids = {25, 50, 100, 200, 400};
  std::vector<std::string> models1 = {"sinekan1d:G=8", "fourier:K=8"};
  auto* bench1d = app.add_subcommand("bench1d", "1D error vs grid size sweep");
  add_shared(bench1d, b1);
  bench1d->add_option("--funcs", funcs1, "Function ids (f1..f5)")->delimiter(',');
  bench1d->add_option("--grids", grids, "Grid sizes")->delimiter(',');
  bench1d->add_option("--models", models1, "Model specs (repeat the flag or separate with ';')");

  SharedFlags b2;
  std::vector<std::string> funcs2 = {"gauss2d", "rosenbrock"};
  std::vector<std::string> models2 = {"sinekan2", "mlp:relu", "mlp:sine", "fourier2d"};
  std::vector<int> budgets = {50, 100, 200, 400, 800};
  int grid_n = 100;
  auto* bench2d = app.add_subcommand("bench2d", "2D error vs parameters / FLOPs sweep");
  add_shared(bench2d, b2);
  bench2d->add_option("--funcs", funcs2, "Function ids (gauss2d, rosenbrock)")->delimiter(',');
  bench2d->add_option("--models", models2,
                      "Model families expanded over --budgets, or explicit specs");
  bench2d->add_option("--budgets", budgets, "Parameter budgets (ascending)")->delimiter(',');
  bench2d->add_option("--grid-n", grid_n, "Points per axis")->check(CLI::Range(2, 100000));

  std::string c_out = "out";
  std::string c_func = "f1";
  int c_degree = 8;
  double c_alpha = 1.0;
  std::string c_rule = "zero";
  std::uint64_t c_seed = 42;
  int c_k = 5;
  auto* construct = app.add_subcommand("construct", "Explicit sinusoidal construction certificate");
  construct->add_option("--out", c_out, "Output directory");
  construct->add_option("--func", c_func, "f1..f5, const1, identity, square or sin3");
  construct->add_option("--N", c_degree, "Degree N")->check(CLI::Range(1, constructive::kMaxDegree));
  construct->add_option("--alpha", c_alpha, "Phase base in (0, pi/2]")
      ->check(CLI::Range(1e-12, std::numbers::pi / 2));
  construct->add_option("--rule", c_rule, "Frequency rule: zero or spread")
      ->check(CLI::IsMember({"zero", "spread"}));
  construct->add_option("--seed", c_seed, "Seed for frequency resampling");
  construct->add_option("--k-terms", c_k, "Summands in f2/f3")->check(CLI::PositiveNumber);

  std::string f_cost = "paper";
  bool f_measure = false;
  long f_iterations = 100000;
  int f_batch = 1024;
  std::vector<std::string> f_models;
  int f_dim = 1;
  auto* flops = app.add_subcommand("flops", "Print the FLOP cost model");
  flops->add_option("--cost-model", f_cost, "paper, torchlike or measured")
      ->check(CLI::IsMember({"paper", "torchlike", "measured"}));
  flops->add_flag("--measure", f_measure, "Time the primitive kernels");
  flops->add_option("--iterations", f_iterations, "Timing iterations")->check(CLI::PositiveNumber);
  flops->add_option("--batch-size", f_batch, "Array length per kernel call")->check(CLI::PositiveNumber);
  flops->add_option("--models", f_models, "Also print per-model costs for these specs");
  flops->add_option("--input-dim", f_dim, "Input dimension for --models")->check(CLI::Range(1, 2));

  // CLI11 consumes a reversed vector without the program name.
  std::vector<std::string> reversed;
  for (std::size_t i = args.size(); i > 1; --i) reversed.push_back(args[i - 1]);
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (*bench1d) return cmd_bench1d(b1, funcs1, grids, models1, out, err);
    if (*bench2d) return cmd_bench2d(b2, funcs2, models2, budgets, grid_n, out, err);
    if (*construct) return cmd_construct(c_out, c_func, c_degree, c_alpha, c_rule, c_seed, c_k, out, err);
    if (*flops) return cmd_flops(f_cost, f_measure, f_iterations, f_batch, f_models, f_dim, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace sinekan::cli
