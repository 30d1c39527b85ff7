#include "sinekan/benchfns.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sinekan {

BenchFunction2D BenchFunction2D::gaussian_wells() {
  return {Func2D::GaussianWells, 1.5, 1.0, 0.5, 0.5};
}

BenchFunction2D BenchFunction2D::rosenbrock() {
  return {Func2D::Rosenbrock, 1.0, 2.0, 0.0, 0.0};
}

double eval_1d(const BenchFunction1D& func, double x) {
  if (!(x > 0.0)) {
    throw std::domain_error("benchmark functions are defined for x > 0");
  }
  if (func.k_terms < 1) {
    throw std::domain_error("k_terms must be >= 1");
  }
  using std::numbers::pi;
  const double inv = 1.0 / x;
  switch (func.id) {
    case Func1D::F1:
      // exp(-1/x) underflows to 0 near the origin, which is the correct limit.
      return std::exp(-inv) * std::sin(inv);
    case Func1D::F2: {
      double sum = 0.0;
      for (int k = 1; k <= func.k_terms; ++k) {
        sum += std::exp(k * x / pi) * std::sin(k * x);
      }
      return sum;
    }
    case Func1D::F3: {
      double sum = 0.0;
      for (int k = 1; k <= func.k_terms; ++k) {
        sum += std::sin(k * x + pi / k);
      }
      return std::exp(-inv) * sum;
    }
    case Func1D::F4:
      return std::pow(x, 0.2) * std::sin(inv);
    case Func1D::F5:
      return std::pow(x, 0.8) * std::sin(inv);
  }
  throw std::logic_error("unhandled Func1D");
}

double eval_2d(const BenchFunction2D& func, double x, double y) {
  switch (func.id) {
    case Func2D::GaussianWells: {
      if (!(func.c > 0.0) || !(func.d > 0.0)) throw std::domain_error("gaussian wells needs c, d > 0");
      const double left = std::exp(-((x - 1.0) * (x - 1.0) + y * y) / func.c);
      const double right = std::exp(-((x + 1.0) * (x + 1.0) + y * y) / func.d);
      return x * x + y * y - func.a * left - func.b * right;
    }
    case Func2D::Rosenbrock: {
      const double u = func.a - x;
      const double v = y - x * x;
      return u * u + func.b * v * v;
    }
  }
  throw std::logic_error("unhandled Func2D");
}

std::string to_string(Func1D id) {
  switch (id) {
    case Func1D::F1: return "f1";
    case Func1D::F2: return "f2";
    case Func1D::F3: return "f3";
    case Func1D::F4: return "f4";
    case Func1D::F5: return "f5";
  }
  return "?";
}

std::string to_string(Func2D id) {
  return id == Func2D::GaussianWells ? "gauss2d" : "rosenbrock";
}

bool is_1d_id(std::string_view name) {
  return name == "f1" || name == "f2" || name == "f3" || name == "f4" || name == "f5";
}

bool is_2d_id(std::string_view name) { return name == "gauss2d" || name == "rosenbrock"; }

BenchFunction1D parse_func_1d(std::string_view name, int k_terms) {
  static constexpr Func1D ids[] = {Func1D::F1, Func1D::F2, Func1D::F3, Func1D::F4, Func1D::F5};
  for (Func1D id : ids) {
    if (name == to_string(id)) return {id, k_terms};
  }
  throw std::invalid_argument("unknown 1D function id: " + std::string(name));
}

BenchFunction2D parse_func_2d(std::string_view name) {
  if (name == "gauss2d") return BenchFunction2D::gaussian_wells();
  if (name == "rosenbrock") return BenchFunction2D::rosenbrock();
  throw std::invalid_argument("unknown 2D function id: " + std::string(name));
}

}  // namespace sinekan
