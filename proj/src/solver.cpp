#include "sinekan/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace sinekan {

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Ftol: return "ftol";
    case Termination::Xtol: return "xtol";
    case Termination::Gtol: return "gtol";
    case Termination::MaxIter: return "maxiter";
  }
  return "?";
}

std::string to_string(StepMethod m) { return m == StepMethod::Dogleg ? "dogleg" : "exact"; }

void SolverConfig::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (!(ftol > 0.0) || !(xtol > 0.0) || !(gtol > 0.0)) {
    throw std::invalid_argument("solver tolerances must be positive");
  }
  if (!(initial_radius > 0.0)) throw std::invalid_argument("initial_radius must be positive");
}

namespace {

constexpr double kScaleFloor = 1e-8;

bool all_finite(const Vector& v) { return v.allFinite(); }

double half_sq(const Vector& r) { return 0.5 * r.squaredNorm(); }

// Trust-region subproblem in scaled variables:
//   minimize g.u + 0.5 u.H u  subject to ||u|| <= radius,
// where H = Js^T Js and g = Js^T r.
class Subproblem {
 public:
  Subproblem(Matrix hessian, Vector grad, StepMethod method)
      : h_(std::move(hessian)), g_(std::move(grad)), method_(method) {
    const Eigen::Index n = g_.size();
    max_diag_ = n > 0 ? h_.diagonal().maxCoeff() : 0.0;
    if (method_ == StepMethod::Dogleg) prepare_dogleg();
  }

  Vector solve(double radius) {
    return method_ == StepMethod::Dogleg ? dogleg(radius) : exact(radius);
  }

 private:
  // Cholesky of H + shift I. Returns false if not positive definite.
  bool factor(double shift, Eigen::LLT<Matrix>& llt) const {
    Matrix a = h_;
    a.diagonal().array() += shift;
    llt.compute(a);
    return llt.info() == Eigen::Success;
  }

  // Gauss-Newton step with the smallest diagonal shift that makes the
  // normal matrix numerically positive definite.
  void prepare_dogleg() {
    const double base = std::max(max_diag_, 1e-300);
    Eigen::LLT<Matrix> llt;
    double shift = 0.0;
    for (int attempt = 0; attempt < 40; ++attempt) {
      if (factor(shift, llt)) {
        gn_ = -llt.solve(g_);
        if (gn_.allFinite()) break;
      }
      shift = shift == 0.0 ? 1e-14 * base : shift * 10.0;
    }
    const double gHg = g_.dot(h_ * g_);
    const double gg = g_.squaredNorm();
    cauchy_ = gHg > 0.0 ? Vector(-(gg / gHg) * g_) : Vector(-g_);
  }

  Vector dogleg(double radius) const {
    const double gn_norm = gn_.norm();
    if (gn_norm <= radius) return gn_;
    const double c_norm = cauchy_.norm();
    if (c_norm >= radius) return cauchy_ * (radius / c_norm);
    // Solve ||cauchy + tau (gn - cauchy)|| = radius for tau in [0, 1].
    const Vector d = gn_ - cauchy_;
    const double a = d.squaredNorm();
    const double b = 2.0 * cauchy_.dot(d);
    const double c = cauchy_.squaredNorm() - radius * radius;
    const double disc = std::max(b * b - 4.0 * a * c, 0.0);
    const double tau = a > 0.0 ? (-b + std::sqrt(disc)) / (2.0 * a) : 0.0;
    return cauchy_ + std::clamp(tau, 0.0, 1.0) * d;
  }

  // More-Sorensen style search for lambda >= 0 with ||u(lambda)|| ~ radius,
  // u(lambda) = -(H + lambda I)^{-1} g. The hard case is not treated
  // specially; the safeguarded bracket still returns a step inside the
  // region.
  Vector exact(double radius) {
    const Eigen::Index n = g_.size();
    if (n == 0) return Vector();
    const double gnorm = g_.norm();
    if (gnorm == 0.0) return Vector::Zero(n);

    const double tiny = 1e-14 * std::max(max_diag_, 1e-300);
    Eigen::LLT<Matrix> llt;
    if (factor(tiny, llt)) {
      Vector u = -llt.solve(g_);
      if (u.allFinite() && u.norm() <= radius) return u;
    }

    double lo = 0.0;
    double hi = gnorm / radius + h_.cwiseAbs().colwise().sum().maxCoeff();
    double lambda = std::max(last_lambda_, gnorm / radius * 1e-3);
    lambda = std::clamp(lambda, tiny, hi);
    Vector best;
    for (int it = 0; it < 30; ++it) {
      if (!factor(lambda, llt)) {
        lo = lambda;
        lambda = std::min(std::max(10.0 * lambda, 0.5 * (lo + hi)), hi);
        continue;
      }
      Vector u = -llt.solve(g_);
      const double unorm = u.norm();
      if (unorm <= radius) best = u;
      if (std::abs(unorm - radius) <= 0.1 * radius) {
        last_lambda_ = lambda;
        return u;
      }
      if (unorm > radius) {
        lo = lambda;
      } else {
        hi = lambda;
      }
      // Newton step on 1/||u|| - 1/radius.
      const Vector q = llt.matrixL().solve(u);
      const double qn2 = q.squaredNorm();
      double next = lambda;
      if (qn2 > 0.0) {
        next = lambda + (unorm * unorm / qn2) * (unorm - radius) / radius;
      }
      if (!(next > lo && next < hi)) next = lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * hi;
      if (next <= 0.0) next = 0.5 * (lo + hi);
      lambda = next;
    }
    last_lambda_ = lambda;
    if (best.size() == n) return best;
    // Fall back to the steepest-descent boundary point.
    return -g_ * (radius / gnorm);
  }

  Matrix h_;
  Vector g_;
  StepMethod method_;
  double max_diag_ = 0.0;
  Vector gn_;
  Vector cauchy_;
  double last_lambda_ = 0.0;
};

struct Box {
  Vector lower;
  Vector upper;

  Box(const LeastSquaresProblem& problem) {
    const Eigen::Index n = problem.num_params;
    const double inf = std::numeric_limits<double>::infinity();
    lower = problem.lower.size() > 0 ? problem.lower : Vector::Constant(n, -inf);
    upper = problem.upper.size() > 0 ? problem.upper : Vector::Constant(n, inf);
  }

  Vector project(const Vector& p) const { return p.cwiseMax(lower).cwiseMin(upper); }
};

}  // namespace

FitReport fit(const LeastSquaresProblem& problem, const SolverConfig& config) {
  config.validate();
  const Eigen::Index n = problem.num_params;
  const Eigen::Index m = problem.num_residuals;
  if (!problem.residual || !problem.jacobian) {
    throw std::invalid_argument("least-squares problem needs residual and jacobian callbacks");
  }
  if (problem.initial.size() != n) {
    throw std::invalid_argument("initial point length does not match num_params");
  }
  if ((problem.lower.size() > 0 && problem.lower.size() != n) ||
      (problem.upper.size() > 0 && problem.upper.size() != n)) {
    throw std::invalid_argument("bound vectors must match num_params");
  }
  const Box box(problem);
  if ((box.lower.array() > box.upper.array()).any()) {
    throw std::invalid_argument("lower bound exceeds upper bound");
  }
  if ((problem.initial.array() < box.lower.array()).any() ||
      (problem.initial.array() > box.upper.array()).any()) {
    throw std::invalid_argument("initial point lies outside the bounds");
  }

  FitReport report;
  report.seed = config.seed;
  Vector p = problem.initial;
  Vector r(m);
  problem.residual(p, r);
  ++report.residual_evaluations;
  if (r.size() != m) throw std::invalid_argument("residual length does not match num_residuals");
  if (!all_finite(r)) throw SolverError("non-finite residual at the initial point");
  Matrix jac(m, n);
  problem.jacobian(p, jac);
  ++report.jacobian_evaluations;
  if (jac.rows() != m || jac.cols() != n) {
    throw std::invalid_argument("jacobian shape does not match the problem");
  }
  if (!jac.allFinite()) throw SolverError("non-finite jacobian at the initial point");

  double cost = half_sq(r);
  report.initial_cost = cost;
  report.cost_history.push_back(cost);

  Vector scale = jac.colwise().norm().transpose().cwiseMax(kScaleFloor);
  double radius = config.initial_radius;
  {
    const double pn = scale.cwiseProduct(p).norm();
    if (pn > 0.0) radius *= pn;
  }

  Vector trial_r(m);
  bool need_model = true;
  std::vector<Eigen::Index> free_idx;
  Vector grad;
  std::unique_ptr<Subproblem> sub;
  Matrix jfree;
  report.termination = Termination::MaxIter;

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    if (need_model) {
      grad = jac.transpose() * r;
      // Variables pinned at a bound with the descent direction pointing
      // outward are frozen for this step.
      free_idx.clear();
      for (Eigen::Index i = 0; i < n; ++i) {
        const bool at_lower = p[i] <= box.lower[i] && grad[i] > 0.0;
        const bool at_upper = p[i] >= box.upper[i] && grad[i] < 0.0;
        if (!at_lower && !at_upper) free_idx.push_back(i);
      }
      const Eigen::Index nf = static_cast<Eigen::Index>(free_idx.size());
      Vector gs(nf);
      jfree.resize(m, nf);
      for (Eigen::Index j = 0; j < nf; ++j) {
        const Eigen::Index i = free_idx[j];
        jfree.col(j) = jac.col(i) / scale[i];
        gs[j] = grad[i] / scale[i];
      }
      if (nf == 0 || gs.cwiseAbs().maxCoeff() <= config.gtol) {
        report.termination = Termination::Gtol;
        break;
      }
      Matrix h = Matrix::Zero(nf, nf);
      h.selfadjointView<Eigen::Lower>().rankUpdate(jfree.transpose());
      h.triangularView<Eigen::StrictlyUpper>() = h.transpose();
      sub = std::make_unique<Subproblem>(std::move(h), std::move(gs), config.step);
      need_model = false;
    }

    ++report.iterations;
    const Vector u = sub->solve(radius);
    Vector step = Vector::Zero(n);
    for (Eigen::Index j = 0; j < u.size(); ++j) {
      const Eigen::Index i = free_idx[j];
      step[i] = u[j] / scale[i];
    }
    const Vector trial = box.project(p + step);
    step = trial - p;
    const double step_scaled = scale.cwiseProduct(step).norm();
    const double p_scaled = scale.cwiseProduct(p).norm();

    const Vector jstep = jac * step;
    const double predicted = -(grad.dot(step) + 0.5 * jstep.squaredNorm());

    problem.residual(trial, trial_r);
    ++report.residual_evaluations;
    const bool finite = all_finite(trial_r);
    const double trial_cost = finite ? half_sq(trial_r) : std::numeric_limits<double>::infinity();
    const double actual = cost - trial_cost;
    const double ratio = predicted > 0.0 ? actual / predicted : -1.0;

    if (!finite || ratio < 0.25) {
      radius = 0.25 * std::min(radius, std::max(step_scaled, 1e-300));
    } else if (ratio > 0.75 && step_scaled >= 0.95 * radius) {
      radius = 2.0 * radius;
    }

    const bool accept = finite && actual > 0.0 && ratio > 1e-4;
    if (accept) {
      p = trial;
      r = trial_r;
      cost = trial_cost;
      ++report.accepted_steps;
      problem.jacobian(p, jac);
      ++report.jacobian_evaluations;
      if (!jac.allFinite()) {
        throw SolverError("non-finite jacobian at an accepted iterate");
      }
      scale = scale.cwiseMax(jac.colwise().norm().transpose());
      need_model = true;
    }
    report.cost_history.push_back(cost);

    if (accept && actual < config.ftol * trial_cost + std::numeric_limits<double>::min() &&
        ratio > 0.25) {
      report.termination = Termination::Ftol;
      break;
    }
    if (accept && cost == 0.0) {
      report.termination = Termination::Ftol;
      break;
    }
    const double xtol_scale = config.xtol * (config.xtol + p_scaled);
    if ((accept && step_scaled < xtol_scale) || radius < xtol_scale) {
      report.termination = Termination::Xtol;
      break;
    }
  }

  report.params = p;
  report.final_cost = cost;
  return report;
}

Vector fit_linear(const Matrix& design, const Vector& targets) {
  if (design.rows() != targets.size()) {
    throw std::invalid_argument("design matrix rows do not match the number of targets");
  }
  if (design.cols() == 0) return Vector();
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(design);
  return cod.solve(targets);
}

FitReport multi_start_fit(const LeastSquaresProblem& problem, const SolverConfig& config,
                          int n_starts) {
  if (n_starts < 1) throw std::invalid_argument("n_starts must be >= 1");
  FitReport best;
  bool have = false;
  std::string last_error;
  for (int s = 0; s < n_starts; ++s) {
    SolverConfig cfg = config;
    cfg.seed = config.seed + static_cast<std::uint64_t>(s);
    LeastSquaresProblem start = problem;
    if (problem.initializer) start.initial = problem.initializer(cfg.seed);
    try {
      FitReport rep = fit(start, cfg);
      if (!have || rep.final_cost < best.final_cost) {
        best = std::move(rep);
        have = true;
      }
    } catch (const SolverError& e) {
      last_error = e.what();
    }
  }
  if (!have) throw SolverError("all starts failed: " + last_error);
  return best;
}

LeastSquaresProblem make_fit_problem(const Model& model, const Matrix& inputs,
                                     const Matrix& targets) {
  if (inputs.rows() != targets.rows()) {
    throw std::invalid_argument("inputs and targets differ in sample count");
  }
  if (targets.cols() != model.output_dim()) {
    throw std::invalid_argument("target columns do not match the model output dimension");
  }
  std::shared_ptr<const Model> proto = model.clone();
  // Row-major flattening matches the sample-major jacobian row layout.
  Vector flat_targets(targets.size());
  for (Eigen::Index s = 0; s < targets.rows(); ++s) {
    for (Eigen::Index o = 0; o < targets.cols(); ++o) {
      flat_targets[s * targets.cols() + o] = targets(s, o);
    }
  }
  auto shared_inputs = std::make_shared<const Matrix>(inputs);

  LeastSquaresProblem problem;
  problem.num_residuals = flat_targets.size();
  problem.num_params = model.param_count();
  problem.initial = model.params();
  problem.residual = [proto, shared_inputs, flat_targets](const Vector& p, Vector& r) {
    auto local = proto->clone();
    local->set_params(p);
    const Matrix out = local->forward_batch(*shared_inputs);
    r.resize(flat_targets.size());
    for (Eigen::Index s = 0; s < out.rows(); ++s) {
      for (Eigen::Index o = 0; o < out.cols(); ++o) {
        r[s * out.cols() + o] = out(s, o) - flat_targets[s * out.cols() + o];
      }
    }
  };
  problem.jacobian = [proto, shared_inputs](const Vector& p, Matrix& jac) {
    auto local = proto->clone();
    local->set_params(p);
    jac = local->jacobian(*shared_inputs);
  };
  problem.initializer = [proto](std::uint64_t seed) { return proto->init_params(seed); };
  return problem;
}

}  // namespace sinekan
