#include "sinekan/constructive.hpp"

#include "sinekan/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace sinekan::constructive {

using std::numbers::pi;

namespace {

// sin(alpha + l pi / 2) without rounding the multiple of pi/2.
double shifted_sine(double alpha, int l) {
  switch (l & 3) {
    case 0: return std::sin(alpha);
    case 1: return std::cos(alpha);
    case 2: return -std::sin(alpha);
    default: return -std::cos(alpha);
  }
}

long double factorial(int n) {
  long double f = 1.0L;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

long double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0L;
  k = std::min(k, n - k);
  long double c = 1.0L;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

}  // namespace

std::vector<double> taylor_sine_coeffs(int degree, double omega, double alpha) {
  if (degree < 0) throw std::invalid_argument("Taylor degree must be >= 0");
  std::vector<double> c(static_cast<std::size_t>(degree) + 1);
  double scale = 1.0;  // omega^l / l!
  for (int l = 0; l <= degree; ++l) {
    if (l > 0) scale *= omega / l;
    c[l] = scale * shifted_sine(alpha, l);
  }
  return c;
}

double taylor_sine_eval(int degree, double omega, double alpha, double x) {
  if (degree < 0) throw std::invalid_argument("Taylor degree must be >= 0");
  double term = 1.0;  // (omega x)^l / l!
  double sum = 0.0;
  for (int l = 0; l <= degree; ++l) {
    if (l > 0) term *= omega * x / l;
    sum += term * shifted_sine(alpha, l);
  }
  return sum;
}

double remainder_bound(int degree) {
  if (degree < 0) throw std::invalid_argument("Taylor degree must be >= 0");
  double bound = 1.0;
  for (int i = 1; i <= degree + 1; ++i) bound *= 2.0 * pi / i;
  return bound;
}

double bernstein_eval(std::span<const double> samples, double x) {
  if (samples.size() < 2) throw std::invalid_argument("Bernstein evaluation needs N >= 1");
  std::vector<double> beta(samples.begin(), samples.end());
  const double y = 1.0 - x;
  for (std::size_t r = beta.size() - 1; r > 0; --r) {
    for (std::size_t i = 0; i < r; ++i) beta[i] = y * beta[i] + x * beta[i + 1];
  }
  return beta[0];
}

double PolynomialCoeffs::eval(double x) const {
  double acc = 0.0;
  for (auto it = b.rbegin(); it != b.rend(); ++it) acc = acc * x + *it;
  return acc;
}

PolynomialCoeffs bernstein_to_monomial(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("need at least one sample");
  const int n = static_cast<int>(samples.size()) - 1;
  PolynomialCoeffs out;
  out.b.resize(samples.size());
  for (int l = 0; l <= n; ++l) {
    long double diff = 0.0L;  // l-th forward difference at 0
    for (int i = 0; i <= l; ++i) {
      const long double sign = ((l - i) & 1) ? -1.0L : 1.0L;
      diff += sign * binomial(l, i) * static_cast<long double>(samples[i]);
    }
    out.b[l] = static_cast<double>(binomial(n, l) * diff);
  }
  return out;
}

Matrix build_lemma4_matrix(std::span<const double> omegas, std::span<const double> alphas) {
  if (omegas.size() != alphas.size() || omegas.empty()) {
    throw std::invalid_argument("need equally many (>= 1) frequencies and phases");
  }
  const auto n = static_cast<Eigen::Index>(omegas.size());
  Matrix m(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double power = 1.0;
    for (Eigen::Index l = 0; l < n; ++l) {
      if (l > 0) power *= omegas[k];
      m(l, k) = power * shifted_sine(alphas[k], static_cast<int>(l));
    }
  }
  return m;
}

AmplitudeSolution solve_amplitudes(const PolynomialCoeffs& coeffs,
                                   std::span<const double> alphas,
                                   std::span<const double> omegas) {
  const std::size_t size = coeffs.b.size();
  if (size == 0 || alphas.size() != size || omegas.size() != size) {
    throw std::invalid_argument("coefficients, phases and frequencies must have equal length");
  }
  const Matrix m = build_lemma4_matrix(omegas, alphas);
  const auto n = static_cast<Eigen::Index>(size);

  if (n == 1) {
    // Scalar case: keep it exact, A_0 = b_0 / sin(alpha_0).
    if (!(std::abs(m(0, 0)) > 0.0)) {
      throw IllConditionedError("amplitude matrix is singular", std::numeric_limits<double>::infinity());
    }
    AmplitudeSolution out;
    out.amplitudes = Vector::Constant(1, coeffs.b[0] / m(0, 0));
    out.condition = 1.0;
    out.residual = std::abs(static_cast<double>(static_cast<long double>(coeffs.b[0]) -
                                                static_cast<long double>(m(0, 0)) * out.amplitudes[0]));
    return out;
  }

  std::vector<long double> rhs(size);
  for (std::size_t l = 0; l < size; ++l) {
    rhs[l] = static_cast<long double>(coeffs.b[l]) * factorial(static_cast<int>(l));
  }

  // Row then column equilibration.
  Vector row_scale(n), col_scale(n);
  Matrix e = m;
  for (Eigen::Index l = 0; l < n; ++l) {
    const double mx = e.row(l).cwiseAbs().maxCoeff();
    if (!(mx > 0.0) || !std::isfinite(mx)) {
      throw IllConditionedError("amplitude matrix has a zero or non-finite row",
                                std::numeric_limits<double>::infinity());
    }
    row_scale[l] = 1.0 / mx;
    e.row(l) *= row_scale[l];
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const double mx = e.col(k).cwiseAbs().maxCoeff();
    if (!(mx > 0.0)) {
      throw IllConditionedError("amplitude matrix has a zero column",
                                std::numeric_limits<double>::infinity());
    }
    col_scale[k] = 1.0 / mx;
    e.col(k) *= col_scale[k];
  }

  const Eigen::JacobiSVD<Matrix> svd(e);
  const auto& sv = svd.singularValues();
  const double smin = sv[n - 1];
  const double cond = smin > 0.0 ? sv[0] / smin : std::numeric_limits<double>::infinity();
  if (!(cond <= kMaxCondition)) {
    throw IllConditionedError(
        "amplitude matrix is ill-conditioned (condition estimate " + std::to_string(cond) + ")",
        cond);
  }

  const Eigen::ColPivHouseholderQR<Matrix> qr(e);
  auto residual_of = [&](const Vector& a) {
    std::vector<long double> res(size);
    for (Eigen::Index l = 0; l < n; ++l) {
      long double acc = rhs[l];
      for (Eigen::Index k = 0; k < n; ++k) {
        acc -= static_cast<long double>(m(l, k)) * static_cast<long double>(a[k]);
      }
      res[l] = acc;
    }
    return res;
  };
  auto scaled_rhs = [&](const std::vector<long double>& v) {
    Vector out(n);
    for (Eigen::Index l = 0; l < n; ++l) out[l] = static_cast<double>(v[l]) * row_scale[l];
    return out;
  };

  Vector amplitudes = col_scale.cwiseProduct(qr.solve(scaled_rhs(rhs)));
  for (int step = 0; step < 2; ++step) {
    const auto res = residual_of(amplitudes);
    amplitudes += col_scale.cwiseProduct(qr.solve(scaled_rhs(res)));
  }

  AmplitudeSolution out;
  out.amplitudes = amplitudes;
  out.condition = cond;
  const auto res = residual_of(amplitudes);
  long double total = 0.0L;
  for (Eigen::Index l = 0; l < n; ++l) total += std::fabs(res[l]) / factorial(static_cast<int>(l));
  out.residual = static_cast<double>(total);
  if (!amplitudes.allFinite()) {
    throw IllConditionedError("amplitude solve produced non-finite values", cond);
  }
  return out;
}

std::vector<double> rule_frequencies(FrequencyRule rule, int degree) {
  if (degree < 0) throw std::invalid_argument("degree must be >= 0");
  std::vector<double> w(static_cast<std::size_t>(degree) + 1);
  const int shift = rule == FrequencyRule::Spread ? 1 : 0;
  for (int k = 0; k <= degree; ++k) w[k] = 2.0 * pi * (k + shift) / (degree + 1);
  return w;
}

std::vector<double> construction_phases(int degree, double alpha) {
  std::vector<double> a(static_cast<std::size_t>(degree) + 1);
  for (int k = 0; k <= degree; ++k) a[k] = (k + 1) * alpha / (degree + 2);
  return a;
}

double SineConstruction::eval(double x) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < amplitudes.size(); ++k) {
    sum += amplitudes[k] * std::sin(frequencies[k] * x + phases[k]);
  }
  return sum;
}

std::vector<double> unit_grid(int n) {
  if (n < 2) throw std::invalid_argument("grid needs at least two points");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[i] = static_cast<double>(i) / (n - 1);
  return g;
}

SineConstruction construct_sine_approx(const std::function<double(double)>& f, int degree,
                                       double alpha, FrequencyRule rule, std::uint64_t seed) {
  if (degree < 1 || degree > kMaxDegree) {
    throw std::invalid_argument("construction degree must be in [1, " +
                                std::to_string(kMaxDegree) + "]");
  }
  if (!(alpha > 0.0 && alpha <= pi / 2)) {
    throw std::invalid_argument("phase base alpha must lie in (0, pi/2]");
  }

  std::vector<double> samples(static_cast<std::size_t>(degree) + 1);
  for (int l = 0; l <= degree; ++l) samples[l] = f(static_cast<double>(l) / degree);
  const PolynomialCoeffs coeffs = bernstein_to_monomial(samples);

  SineConstruction out;
  out.degree = degree;
  out.alpha = alpha;
  out.phases = construction_phases(degree, alpha);

  const std::vector<double> base = rule_frequencies(rule, degree);
  std::vector<double> omegas = base;
  Rng rng(seed);
  constexpr int kRetries = 8;
  AmplitudeSolution sol;
  bool solved = false;
  double last_cond = 0.0;
  for (int attempt = 0; attempt <= kRetries && !solved; ++attempt) {
    if (attempt > 0) {
      const double spacing = 2.0 * pi / (degree + 1);
      for (std::size_t k = 0; k < omegas.size(); ++k) {
        omegas[k] = std::clamp(base[k] + rng.uniform(-0.5, 0.5) * spacing, 0.0, 2.0 * pi);
      }
    }
    try {
      sol = solve_amplitudes(coeffs, out.phases, omegas);
      out.attempts = attempt + 1;
      solved = true;
    } catch (const IllConditionedError& e) {
      last_cond = e.condition();
    }
  }
  if (!solved) {
    throw IllConditionedError("amplitude system stayed ill-conditioned after " +
                                  std::to_string(kRetries) + " frequency resamples (condition " +
                                  std::to_string(last_cond) + ")",
                              last_cond);
  }

  out.frequencies = omegas;
  out.amplitudes.assign(sol.amplitudes.data(), sol.amplitudes.data() + sol.amplitudes.size());
  out.condition = sol.condition;
  out.solve_residual = sol.residual;
  for (double a : out.amplitudes) out.sum_abs_amplitudes += std::abs(a);
  out.taylor_tail = out.sum_abs_amplitudes * remainder_bound(degree);

  const std::vector<double> grid = unit_grid(kSupGridPoints);
  double bern = 0.0;
  for (double x : grid) bern = std::max(bern, std::abs(f(x) - bernstein_eval(samples, x)));
  out.bernstein_error = bern;
  out.certificate = out.bernstein_error + out.taylor_tail + out.solve_residual;

  const SupErrorReport sup = verify_construction(out, f, grid);
  out.grid_sup_error = sup.sup_error;
  out.grid_argmax = sup.argmax;
  return out;
}

SupErrorReport verify_construction(const SineConstruction& construction,
                                   const std::function<double(double)>& f,
                                   std::span<const double> grid) {
  SupErrorReport rep;
  for (double x : grid) {
    const double err = std::abs(f(x) - construction.eval(x));
    if (err > rep.sup_error || (std::isnan(err) && !std::isnan(rep.sup_error))) {
      rep.sup_error = err;
      rep.argmax = x;
    }
  }
  return rep;
}

}  // namespace sinekan::constructive
