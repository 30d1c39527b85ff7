#pragma once

#include "sinekan/models.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sinekan {

enum class Termination { Ftol, Xtol, Gtol, MaxIter };

std::string to_string(Termination t);

/// How the trust-region subproblem is solved.
///   Dogleg: Gauss-Newton / Cauchy dogleg path.
///   Exact:  Levenberg-Marquardt parameter chosen so the step lands on the
///           trust-region boundary (More-Sorensen iteration on Cholesky
///           factors).
enum class StepMethod { Dogleg, Exact };

std::string to_string(StepMethod m);

struct SolverConfig {
  int max_iterations = 100;
  double ftol = 1e-10;
  double xtol = 1e-10;
  double gtol = 1e-10;
  // Initial radius is initial_radius * ||D p0|| (or initial_radius when
  // p0 = 0), D being the column scaling.
  double initial_radius = 1.0;
  std::uint64_t seed = 42;
  StepMethod step = StepMethod::Exact;

  /// Throws std::invalid_argument when a tolerance is not positive or
  /// max_iterations < 1.
  void validate() const;
};

/// Residuals r(p) (predictions minus targets) and their Jacobian.
struct LeastSquaresProblem {
  Eigen::Index num_residuals = 0;
  Eigen::Index num_params = 0;
  std::function<void(const Vector& p, Vector& r)> residual;
  std::function<void(const Vector& p, Matrix& jac)> jacobian;
  // Empty vectors mean unbounded. Individual entries may be +-infinity.
  Vector lower;
  Vector upper;
  Vector initial;
  // Optional seeded initializer used by multi_start_fit.
  std::function<Vector(std::uint64_t seed)> initializer;

  bool bounded() const { return lower.size() > 0 || upper.size() > 0; }
};

struct FitReport {
  Vector params;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  // cost_history[0] is the initial cost; one entry per iteration after it.
  std::vector<double> cost_history;
  int iterations = 0;
  int jacobian_evaluations = 0;
  int residual_evaluations = 0;
  int accepted_steps = 0;
  Termination termination = Termination::MaxIter;
  std::uint64_t seed = 0;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bounded nonlinear least squares, trust-region style:
///   minimize 0.5 ||r(p)||^2  subject to lower <= p <= upper.
///
/// Variables are scaled by Jacobian column norms (floored at 1e-8, updated
/// as the running maximum). Bounds are handled by freezing variables held
/// at an active bound and projecting trial points onto the box, so every
/// iterate is feasible. Steps are accepted only on strict cost decrease.
///
/// Throws SolverError if r or J is non-finite at the initial point, and
/// std::invalid_argument for malformed problems.
FitReport fit(const LeastSquaresProblem& problem, const SolverConfig& config);

/// Minimum-norm solution of min ||X beta - y||_2 via a complete
/// orthogonal decomposition.
Vector fit_linear(const Matrix& design, const Vector& targets);

/// Runs fit from initializer(seed), initializer(seed + 1), ... and returns
/// the report with the smallest final cost (earliest start wins ties).
/// Without an initializer every start uses problem.initial.
FitReport multi_start_fit(const LeastSquaresProblem& problem, const SolverConfig& config,
                          int n_starts);

/// Residual problem for fitting `model` to (inputs, targets), where
/// targets has one row per sample and one column per model output.
/// The returned callbacks hold their own copy of the model.
LeastSquaresProblem make_fit_problem(const Model& model, const Matrix& inputs,
                                     const Matrix& targets);

}  // namespace sinekan
