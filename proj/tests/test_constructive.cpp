#include "sinekan/constructive.hpp"
#include "sinekan/random.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace sinekan;
using namespace sinekan::constructive;

namespace {

constexpr double kPi = std::numbers::pi;

// Coefficient l of sum_k A_k T_N(w_k, a_k, x), accumulated in long double.
std::vector<double> expand(const Vector& amps, std::span<const double> w, std::span<const double> a) {
  const std::size_t n = a.size();
  std::vector<double> out(n);
  for (std::size_t l = 0; l < n; ++l) {
    long double acc = 0;
    long double fact = 1;
    for (std::size_t j = 2; j <= l; ++j) fact *= j;
    for (std::size_t k = 0; k < n; ++k) {
      acc += amps[k] * std::pow(static_cast<long double>(w[k]), static_cast<long double>(l)) *
             std::sin(static_cast<long double>(a[k]) + l * std::numbers::pi_v<long double> / 2) / fact;
    }
    out[l] = static_cast<double>(acc);
  }
  return out;
}

std::vector<double> sample(const std::function<double(double)>& f, int n) {
  std::vector<double> s(n + 1);
  for (int l = 0; l <= n; ++l) s[l] = f(static_cast<double>(l) / n);
  return s;
}

double bernstein_sup(const std::function<double(double)>& f, int n) {
  const auto s = sample(f, n);
  double worst = 0;
  for (double x : unit_grid(2001)) worst = std::max(worst, std::abs(f(x) - bernstein_eval(s, x)));
  return worst;
}

}  // namespace

TEST_CASE("taylor sine examples") {
  for (int n : {0, 3, 12}) {
    for (double x : {0.0, 0.4, 1.0}) CHECK(taylor_sine_eval(n, 0.0, kPi / 3, x) == doctest::Approx(0.8660254037844386).epsilon(1e-15));
  }
  CHECK(taylor_sine_eval(1, 1.0, 0.0, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
  const double t = taylor_sine_eval(12, 2.0, 0.3, 0.7);
  CHECK(std::abs(t - std::sin(1.7)) <= remainder_bound(12));
  CHECK(remainder_bound(12) == doctest::Approx(std::pow(2 * kPi, 13) / 6227020800.0).epsilon(1e-14));
  CHECK(std::abs(t - std::sin(1.7)) < 1e-6);
  CHECK(taylor_sine_coeffs(5, 1.3, 0.4)[0] == std::sin(0.4));
  CHECK(taylor_sine_coeffs(5, 0.0, 0.4)[0] == std::sin(0.4));
}

TEST_CASE("remainder bound") {
  CHECK(remainder_bound(0) == doctest::Approx(2 * kPi).epsilon(1e-15));
  CHECK(remainder_bound(11) == doctest::Approx(std::pow(2 * kPi, 12) / 479001600.0).epsilon(1e-14));
  CHECK(remainder_bound(11) == doctest::Approx(7.903536371318465).epsilon(1e-13));
  for (int n = 5; n < 30; ++n) {
    CHECK(remainder_bound(n + 1) / remainder_bound(n) == doctest::Approx(2 * kPi / (n + 2)).epsilon(1e-13));
    CHECK(remainder_bound(n + 1) < remainder_bound(n));
  }
}

TEST_CASE("lemma 1 bound holds on random draws") {
  Rng rng(2024);
  int violations = 0;
  for (int i = 0; i < 200; ++i) {
    const int n = static_cast<int>(rng.next() % 13);
    const double w = rng.uniform(0, 2 * kPi);
    const double a = rng.uniform(0, kPi / 2);
    const double x = rng.uniform();
    violations += std::abs(std::sin(w * x + a) - taylor_sine_eval(n, w, a, x)) <= remainder_bound(n) ? 0 : 1;
  }
  CHECK(violations == 0);
}

TEST_CASE("bernstein examples") {
  for (int n : {1, 4, 9}) {
    const auto c = std::vector<double>(n + 1, 2.5);
    const auto lin = sample([](double x) { return x; }, n);
    for (double x : unit_grid(101)) {
      CHECK(std::abs(bernstein_eval(c, x) - 2.5) < 1e-12);
      CHECK(std::abs(bernstein_eval(lin, x) - x) < 1e-12);
    }
  }
  const std::vector<double> sq = {0.0, 0.25, 1.0};
  CHECK(std::abs(bernstein_eval(sq, 0.5) - 0.375) < 1e-12);
}

TEST_CASE("bernstein endpoints and convergence") {
  auto f = [](double x) { return std::sin(3 * x) + x * x * x; };
  for (int n : {3, 8, 16, 32}) {
    const auto s = sample(f, n);
    CHECK(bernstein_eval(s, 0.0) == s.front());
    CHECK(std::abs(bernstein_eval(s, 1.0) - s.back()) < 1e-15);
  }
  auto g = [](double x) { return std::sin(3 * x); };
  double prev = INFINITY;
  for (int n : {8, 16, 32, 64}) {
    const double e = bernstein_sup(g, n);
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("bernstein to monomial") {
  CHECK(bernstein_to_monomial(std::vector<double>(5, 3.0)).b == std::vector<double>{3, 0, 0, 0, 0});
  const auto lin = bernstein_to_monomial(std::vector<double>{0, 1.0 / 3, 2.0 / 3, 1});
  CHECK(std::abs(lin.b[0]) < 1e-15);
  CHECK(lin.b[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(lin.b[2]) < 1e-14);
  CHECK(std::abs(lin.b[3]) < 1e-14);
  const auto sq = bernstein_to_monomial(std::vector<double>{0, 0.25, 1});
  CHECK(sq.b[0] == 0.0);
  CHECK(sq.b[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(sq.b[2] == doctest::Approx(0.5).epsilon(1e-15));
  // The monomial form evaluates to the Bernstein value.
  Rng rng(1);
  for (int n : {2, 7, 12}) {
    std::vector<double> s(n + 1);
    for (auto& v : s) v = rng.uniform(-1, 1);
    const auto c = bernstein_to_monomial(s);
    for (double x : unit_grid(51)) CHECK(c.eval(x) == doctest::Approx(bernstein_eval(s, x)).epsilon(1e-9).scale(1));
  }
}

TEST_CASE("lemma 4 matrix") {
  const std::vector<double> a0 = {kPi / 4};
  const std::vector<double> w0 = {1.7};
  const Matrix m0 = build_lemma4_matrix(w0, a0);
  CHECK(m0.rows() == 1);
  CHECK(m0(0, 0) == doctest::Approx(0.7071067811865476).epsilon(1e-15));

  const std::vector<double> w = {0.0, 1.0, 2.0};
  const std::vector<double> a = {0.2, 0.4, 0.6};
  const Matrix m = build_lemma4_matrix(w, a);
  CHECK(m(1, 0) == 0.0);
  CHECK(m(2, 0) == 0.0);
  CHECK(m(0, 0) == std::sin(0.2));
  CHECK(m(2, 2) == doctest::Approx(4 * std::sin(0.6 + kPi)).epsilon(1e-14));
  const std::vector<double> wn = {1.0, 2.0, 3.5};
  CHECK(std::abs(build_lemma4_matrix(wn, a).determinant()) > 1e-6);
}

TEST_CASE("solve amplitudes") {
  PolynomialCoeffs one{{3.0}};
  const std::vector<double> a0 = {kPi / 6};
  const std::vector<double> w0 = {0.0};
  CHECK(solve_amplitudes(one, a0, w0).amplitudes[0] == 3.0 / std::sin(kPi / 6));
  CHECK(solve_amplitudes(one, a0, w0).amplitudes[0] == doctest::Approx(6.0).epsilon(1e-15));

  const auto phases = construction_phases(4, 1.0);
  const auto freqs = rule_frequencies(FrequencyRule::ZeroAnchored, 4);
  CHECK(solve_amplitudes(PolynomialCoeffs{std::vector<double>(5, 0.0)}, phases, freqs).amplitudes.isZero(0));
}

TEST_CASE("singular systems report their condition") {
  const std::vector<double> w = {1.0, 1.0, 2.0};
  const std::vector<double> a = {0.2, 0.4, 0.6};
  try {
    solve_amplitudes(PolynomialCoeffs{{1.0, 0.0, 0.0}}, a, std::vector<double>{1.0, 1.0, 1.0});
    FAIL("expected IllConditionedError");
  } catch (const IllConditionedError& e) {
    CHECK(e.condition() > kMaxCondition);
  }
  CHECK_NOTHROW(solve_amplitudes(PolynomialCoeffs{{1.0, 0.0, 0.0}}, a, w));
}

TEST_CASE("lemma 4 round trip") {
  Rng rng(77);
  for (FrequencyRule rule : {FrequencyRule::ZeroAnchored, FrequencyRule::Spread}) {
    for (int n : {2, 4, 8}) {
      if (rule == FrequencyRule::Spread && n > 4) continue;  // hopeless conditioning beyond N = 4
      PolynomialCoeffs b;
      b.b.resize(n + 1);
      for (auto& v : b.b) v = rng.uniform(-1, 1);
      const auto phases = construction_phases(n, 1.0);
      const auto freqs = rule_frequencies(rule, n);
      const auto sol = solve_amplitudes(b, phases, freqs);
      CHECK(sol.condition > 0);
      const auto back = expand(sol.amplitudes, freqs, phases);
      double num = 0, den = 0;
      for (int l = 0; l <= n; ++l) {
        num = std::max(num, std::abs(back[l] - b.b[l]));
        den = std::max(den, std::abs(b.b[l]));
      }
      INFO("N=", n, " rule=", static_cast<int>(rule));
      CHECK(num / den < 1e-6);
    }
  }
}

TEST_CASE("phases and frequencies") {
  const auto p = construction_phases(6, 1.2);
  for (int k = 0; k <= 6; ++k) CHECK(p[k] == doctest::Approx((k + 1) * 1.2 / 8).epsilon(1e-15));
  for (int k = 1; k < 6; ++k) CHECK((p[k + 1] - p[k]) == doctest::Approx(p[1] - p[0]).epsilon(1e-14));
  CHECK(p.front() > 0);
  CHECK(p.back() < kPi / 2);
  const auto z = rule_frequencies(FrequencyRule::ZeroAnchored, 6);
  const auto s = rule_frequencies(FrequencyRule::Spread, 6);
  CHECK(z[0] == 0.0);
  CHECK(s[6] == doctest::Approx(2 * kPi));
  for (double w : z) CHECK((w >= 0 && w <= 2 * kPi));
}

TEST_CASE("construction end to end") {
  auto zero = construct_sine_approx([](double) { return 0.0; }, 5);
  for (double a : zero.amplitudes) CHECK(a == 0.0);
  CHECK(zero.grid_sup_error == 0.0);
  CHECK(verify_construction(zero, [](double) { return 0.0; }, unit_grid(101)).sup_error == 0.0);

  auto one = construct_sine_approx([](double) { return 1.0; }, 4);
  const auto g1000 = unit_grid(1000);
  CHECK(verify_construction(one, [](double) { return 1.0; }, g1000).sup_error <= one.solve_residual + one.taylor_tail);
  CHECK(one.grid_sup_error < 1e-6);

  auto id = [](double x) { return x; };
  auto lin = construct_sine_approx(id, 6);
  CHECK(lin.bernstein_error < 1e-12);
  CHECK(lin.grid_sup_error <= lin.certificate);
  CHECK(lin.certificate == doctest::Approx(lin.bernstein_error + lin.taylor_tail + lin.solve_residual));
  CHECK(lin.taylor_tail == doctest::Approx(lin.sum_abs_amplitudes * remainder_bound(6)));
  // Finer grids never report a smaller sup than a sub-grid.
  CHECK(verify_construction(lin, id, unit_grid(2001)).sup_error >= verify_construction(lin, id, unit_grid(11)).sup_error);
  // Evaluation uses true sines.
  CHECK(lin.eval(0.3) == doctest::Approx([&] {
          double s = 0;
          for (int k = 0; k <= 6; ++k) s += lin.amplitudes[k] * std::sin(lin.frequencies[k] * 0.3 + lin.phases[k]);
          return s;
        }()));
}

TEST_CASE("construction preconditions and retries") {
  auto f = [](double x) { return x * x; };
  CHECK_THROWS_AS(construct_sine_approx(f, 0), std::invalid_argument);
  CHECK_THROWS_AS(construct_sine_approx(f, kMaxDegree + 1), std::invalid_argument);
  CHECK_THROWS_AS(construct_sine_approx(f, 4, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(construct_sine_approx(f, 4, 2.0), std::invalid_argument);
  const auto c12 = construct_sine_approx(f, 12);
  CHECK(c12.condition <= kMaxCondition);
  CHECK(std::isfinite(c12.certificate));
  // Spread frequencies at N = 8 exceed the threshold and are resampled or rejected.
  try {
    const auto s = construct_sine_approx(f, 8, 1.0, FrequencyRule::Spread);
    CHECK(s.attempts > 1);
  } catch (const IllConditionedError& e) {
    CHECK(e.condition() > kMaxCondition);
  }
  // N = 16 sits at the edge: either a resample clears the threshold or it fails loudly.
  try {
    const auto c16 = construct_sine_approx(f, 16);
    CHECK(c16.condition <= kMaxCondition);
    CHECK(c16.attempts > 1);
  } catch (const IllConditionedError& e) {
    CHECK(e.condition() > kMaxCondition);
  }
}
