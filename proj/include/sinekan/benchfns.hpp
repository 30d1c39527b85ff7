#pragma once

#include <string>
#include <string_view>

namespace sinekan {

// One-dimensional benchmark targets, all defined on (0, 1].
//   f1: exp(-1/x) sin(1/x)
//   f2: sum_{k=1..K} exp(k x / pi) sin(k x)
//   f3: sum_{k=1..K} exp(-1/x) sin(k x + pi / k)
//   f4: x^(1/5) sin(1/x)
//   f5: x^(4/5) sin(1/x)
enum class Func1D { F1, F2, F3, F4, F5 };

struct BenchFunction1D {
  Func1D id = Func1D::F1;
  // Number of summands for f2/f3; ignored for the others.
  int k_terms = 5;
};

enum class Func2D { GaussianWells, Rosenbrock };

// GaussianWells: x^2 + y^2 - a exp(-((x-1)^2 + y^2)/c) - b exp(-((x+1)^2 + y^2)/d)
// Rosenbrock:    (a - x)^2 + b (y - x^2)^2           (c, d unused)
struct BenchFunction2D {
  Func2D id = Func2D::GaussianWells;
  double a = 1.5;
  double b = 1.0;
  double c = 0.5;
  double d = 0.5;

  static BenchFunction2D gaussian_wells();
  static BenchFunction2D rosenbrock();
};

/// Throws std::domain_error if x <= 0 or k_terms < 1.
double eval_1d(const BenchFunction1D& func, double x);
double eval_2d(const BenchFunction2D& func, double x, double y);

// Stable string ids: f1..f5, gauss2d, rosenbrock.
std::string to_string(Func1D id);
std::string to_string(Func2D id);
bool is_1d_id(std::string_view name);
bool is_2d_id(std::string_view name);
/// Throws std::invalid_argument for unknown names.
BenchFunction1D parse_func_1d(std::string_view name, int k_terms = 5);
BenchFunction2D parse_func_2d(std::string_view name);

}  // namespace sinekan
