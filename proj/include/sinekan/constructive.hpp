#pragma once

// Explicit sinusoidal approximation of a continuous function on [0, 1]:
//
//   f  ->  Bernstein polynomial B_N(f)  ->  monomial coefficients b_l
//      ->  amplitudes A_k solving  sum_k A_k w_k^l sin(a_k + l pi/2) = b_l l!
//
// so that sum_k A_k T_N(w_k, a_k, x) = B_N(f, x), where T_N is the degree-N
// Taylor polynomial of sin(w x + a). The resulting sum of true sines differs
// from f by at most the Bernstein error plus the Taylor tail plus the linear
// solve residual; all three are reported.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace sinekan::constructive {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Largest degree accepted by the construction pipeline.
inline constexpr int kMaxDegree = 16;
/// Condition estimate above which the amplitude system is rejected.
inline constexpr double kMaxCondition = 1e12;
/// Uniform points on [0, 1] used for grid sup-errors.
inline constexpr int kSupGridPoints = 10001;

/// Coefficients c_l = w^l sin(a + l pi/2) / l!, l = 0..N (0^0 = 1).
std::vector<double> taylor_sine_coeffs(int degree, double omega, double alpha);

/// T_N(w, a, x) = sum_{l=0}^N w^l sin(a + l pi/2) x^l / l!.
double taylor_sine_eval(int degree, double omega, double alpha, double x);

/// (2 pi)^{N+1} / (N+1)!, the uniform bound on |sin(w x + a) - T_N| over
/// x in [0, 1] for w in [0, 2 pi].
double remainder_bound(int degree);

/// Bernstein polynomial with values f(l/N), l = 0..N, evaluated at x by de
/// Casteljau's recurrence. Throws std::invalid_argument for fewer than two
/// samples.
double bernstein_eval(std::span<const double> samples, double x);

/// Monomial coefficients b_0..b_N of a polynomial p(x) = sum b_l x^l.
struct PolynomialCoeffs {
  std::vector<double> b;

  int degree() const { return static_cast<int>(b.size()) - 1; }
  double eval(double x) const;
};

/// Expands the Bernstein polynomial of the samples into monomial form:
/// b_l = C(N, l) sum_{i=0}^l (-1)^{l-i} C(l, i) f(i/N), accumulated in
/// extended precision.
PolynomialCoeffs bernstein_to_monomial(std::span<const double> samples);

/// M[l][k] = w_k^l sin(a_k + l pi/2), l, k = 0..N.
Matrix build_lemma4_matrix(std::span<const double> omegas, std::span<const double> alphas);

struct AmplitudeSolution {
  Vector amplitudes;
  /// 2-norm condition number of the row/column equilibrated matrix.
  double condition = 0.0;
  /// sum_l |b_l l! - (M A)_l| / l!, a bound on
  /// sup_{x in [0,1]} |p(x) - sum_k A_k T_N(w_k, a_k, x)|.
  double residual = 0.0;
};

class IllConditionedError : public std::runtime_error {
 public:
  IllConditionedError(const std::string& what, double condition)
      : std::runtime_error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

/// Solves M A = (b_l l!) with equilibration, column-pivoted QR and two
/// steps of iterative refinement (residuals in extended precision).
/// Throws IllConditionedError when the condition estimate exceeds
/// kMaxCondition or the matrix is numerically singular, and
/// std::invalid_argument on size mismatches.
AmplitudeSolution solve_amplitudes(const PolynomialCoeffs& coeffs,
                                   std::span<const double> alphas,
                                   std::span<const double> omegas);

/// Frequency selection for the amplitude system.
///   ZeroAnchored: w_k = 2 pi k / (N + 1)        (w_0 = 0)
///   Spread:       w_k = 2 pi (k + 1) / (N + 1)  (all nonzero)
enum class FrequencyRule { ZeroAnchored, Spread };

std::vector<double> rule_frequencies(FrequencyRule rule, int degree);

/// Phases (k + 1) alpha / (N + 2), k = 0..N: linearly spaced and strictly
/// inside (0, alpha) so every sin(a_k + l pi/2) is nonzero.
std::vector<double> construction_phases(int degree, double alpha);

struct SineConstruction {
  int degree = 0;
  double alpha = 1.0;
  std::vector<double> phases;
  std::vector<double> frequencies;
  std::vector<double> amplitudes;
  double condition = 0.0;
  int attempts = 1;

  // Error certificate. certificate = bernstein_error + taylor_tail +
  // solve_residual bounds the grid sup-error.
  double bernstein_error = 0.0;  // grid sup |f - B_N f|
  double taylor_tail = 0.0;      // sum |A_k| (2 pi)^{N+1} / (N+1)!
  double solve_residual = 0.0;
  double sum_abs_amplitudes = 0.0;
  double certificate = 0.0;
  double grid_sup_error = 0.0;   // grid sup |f - sum A_k sin(w_k x + a_k)|
  double grid_argmax = 0.0;

  double eval(double x) const;
};

/// Runs the pipeline for f on [0, 1]. If the amplitude system is
/// ill-conditioned, the frequencies are jittered with a generator seeded by
/// `seed` and retried up to 8 times.
/// Throws std::invalid_argument when degree is outside [1, kMaxDegree] or
/// alpha is outside (0, pi/2], and IllConditionedError (carrying the last
/// condition estimate) when every attempt fails.
SineConstruction construct_sine_approx(const std::function<double(double)>& f, int degree,
                                       double alpha = 1.0,
                                       FrequencyRule rule = FrequencyRule::ZeroAnchored,
                                       std::uint64_t seed = 42);

struct SupErrorReport {
  double sup_error = 0.0;
  double argmax = 0.0;
};

/// Max |f(x) - construction(x)| over the given points.
SupErrorReport verify_construction(const SineConstruction& construction,
                                   const std::function<double(double)>& f,
                                   std::span<const double> grid);

/// n uniform points on [0, 1] including both ends.
std::vector<double> unit_grid(int n);

}  // namespace sinekan::constructive
