#include "sinekan/metrics.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace sinekan {

std::string to_string(CostSource s) {
  switch (s) {
    case CostSource::PaperDefaults: return "paper";
    case CostSource::TorchLike: return "torchlike";
    case CostSource::Measured: return "measured";
  }
  return "?";
}

CostModel CostModel::torch_like() {
  CostModel c;
  c.relu = 1.0;
  c.sin = 3.5;
  c.source = CostSource::TorchLike;
  return c;
}

namespace {

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string CostModel::to_json() const {
  return "{\"add\":" + shortest(add) + ",\"mul\":" + shortest(mul) + ",\"relu\":" +
         shortest(relu) + ",\"sin\":" + shortest(sin) + "}";
}

CostModel CostModel::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("cost model JSON: ") + e.what());
  }
  CostModel c;
  for (const char* key : {"add", "mul", "relu", "sin"}) {
    if (!j.contains(key) || !j[key].is_number()) {
      throw std::invalid_argument(std::string("cost model JSON lacks numeric '") + key + "'");
    }
  }
  c.add = j["add"].get<double>();
  c.mul = j["mul"].get<double>();
  c.relu = j["relu"].get<double>();
  c.sin = j["sin"].get<double>();
  c.source = CostSource::Measured;
  if (c.add == 1.0 && c.mul == 1.0 && c.relu == 1.5 && c.sin == 12.0) {
    c.source = CostSource::PaperDefaults;
  } else if (c.add == 1.0 && c.mul == 1.0 && c.relu == 1.0 && c.sin == 3.5) {
    c.source = CostSource::TorchLike;
  }
  c.validate();
  return c;
}

void CostModel::validate() const {
  if (!(add > 0.0) || !(mul > 0.0) || !(relu > 0.0) || !(sin > 0.0)) {
    throw std::invalid_argument("cost model weights must be positive");
  }
}

double relative_l2(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_fit) {
  if (y_true.size() != y_fit.size()) {
    throw std::invalid_argument("relative_l2: length mismatch");
  }
  if (y_true.size() == 0) throw std::invalid_argument("relative_l2: empty input");
  const double denom = y_true.norm();
  if (denom == 0.0) throw std::domain_error("relative_l2: reference vector has zero norm");
  return (y_true - y_fit).norm() / denom;
}

OpCounts model_op_counts(const ModelSpec& spec, int input_dim) {
  const double n = input_dim;
  const double m = spec.output_dim;
  OpCounts c;
  switch (spec.family) {
    case ModelFamily::SineKan1D: {
      const double g = spec.grid;
      c.mul = 2.0 * g;
      c.add = 2.0 * g + 1.0;
      c.sin = g;
      break;
    }
    case ModelFamily::SineKan2: {
      const double g1 = spec.grid1, h = spec.hidden, g2 = spec.grid2;
      c.mul = g1 * n + h * g1 * n + g2 * h + m * g2 * h;
      c.add = g1 * n + h * g1 * n + h + g2 * h + m * g2 * h + m;
      c.sin = g1 * n + g2 * h;
      break;
    }
    case ModelFamily::Mlp: {
      const double h = spec.hidden;
      c.mul = h * n + m * h;
      c.add = h * n + m * h;
      if (spec.activation == Activation::ReLU) {
        c.relu = h;
      } else {
        c.sin = h;
      }
      break;
    }
    case ModelFamily::Fourier: {
      const double kx = spec.harmonics_x, ky = spec.harmonics_y;
      if (input_dim == 1) {
        c.mul = 3.0 * kx;
        c.add = 2.0 * kx;
        c.sin = 2.0 * kx;
      } else {
        const double p = (2.0 * kx + 1.0) * (2.0 * ky + 1.0);
        c.mul = kx + ky + 2.0 * p;
        c.add = p - 1.0;
        c.sin = 2.0 * (kx + ky);
      }
      break;
    }
  }
  return c;
}

double model_flops(const ModelSpec& spec, int input_dim, const CostModel& cost) {
  return model_op_counts(spec, input_dim).weighted(cost);
}

namespace {

template <class Kernel>
double time_kernel(long iterations, std::vector<double>& out, Kernel&& kernel) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  for (long it = 0; it < iterations; ++it) {
    kernel();
    // Keep the loop from being hoisted or elided.
    asm volatile("" : : "g"(out.data()) : "memory");
  }
  const auto stop = clock::now();
  return std::chrono::duration<double, std::nano>(stop - start).count();
}

}  // namespace

CostModel measure_costs(long iterations, int batch_size) {
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  const std::size_t n = static_cast<std::size_t>(batch_size);
  std::vector<double> a(n), b(n), out(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n);
    b[i] = 0.5 + static_cast<double>(i % 7) * 0.125;
  }

  const double t_add = time_kernel(iterations, out, [&] {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
  });
  const double t_mul = time_kernel(iterations, out, [&] {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
  });
  const double t_relu = time_kernel(iterations, out, [&] {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::max(a[i], 0.0);
  });
  const double t_sin = time_kernel(iterations, out, [&] {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::sin(a[i]);
  });

  constexpr double kMinResolvableNs = 1e6;  // 1 ms per kernel
  if (std::min({t_add, t_mul, t_relu, t_sin}) < kMinResolvableNs) {
    throw std::runtime_error(
        "kernel timings below timer resolution; increase the iteration count");
  }

  const double per = static_cast<double>(iterations) * static_cast<double>(n);
  CostModel c;
  c.source = CostSource::Measured;
  c.add_ns = t_add / per;
  c.mul_ns = t_mul / per;
  c.relu_ns = t_relu / per;
  c.sin_ns = t_sin / per;
  c.add = 1.0;
  c.mul = t_mul / t_add;
  c.relu = t_relu / t_add;
  c.sin = t_sin / t_add;
  return c;
}

}  // namespace sinekan
