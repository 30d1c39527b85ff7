#pragma once

#include "sinekan/model_spec.hpp"

#include <Eigen/Dense>

#include <string>

namespace sinekan {

enum class CostSource { PaperDefaults, TorchLike, Measured };

std::string to_string(CostSource s);

/// Relative cost of one primitive operation, in units of one addition.
struct CostModel {
  double add = 1.0;
  double mul = 1.0;
  double relu = 1.5;
  double sin = 12.0;
  CostSource source = CostSource::PaperDefaults;

  // Raw per-element kernel timings in nanoseconds; only set when measured.
  double add_ns = 0.0;
  double mul_ns = 0.0;
  double relu_ns = 0.0;
  double sin_ns = 0.0;

  static CostModel paper_defaults() { return {}; }
  /// sin = 3.5, relu = 1.
  static CostModel torch_like();

  /// {"add":1,"mul":1,"relu":1.5,"sin":12} with shortest round-trip
  /// number formatting.
  std::string to_json() const;
  /// Reads the four weights; throws std::invalid_argument on missing keys or
  /// non-positive weights.
  static CostModel from_json(const std::string& text);

  /// Throws std::invalid_argument unless every weight is > 0.
  void validate() const;
};

/// ||y_true - y_fit||_2 / ||y_true||_2.
/// Throws std::invalid_argument on length mismatch or empty input and
/// std::domain_error when ||y_true|| = 0.
double relative_l2(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_fit);

/// Primitive operation counts for one forward evaluation of a model.
struct OpCounts {
  double add = 0.0;
  double mul = 0.0;
  double relu = 0.0;
  double sin = 0.0;

  double weighted(const CostModel& cost) const {
    return add * cost.add + mul * cost.mul + relu * cost.relu + sin * cost.sin;
  }
};

/// Per-family counting rules (n inputs, m outputs):
///
///   sinekan1d  mul 2G, add 2G + 1, sin G
///   sinekan2   per sinusoid term: one mul (frequency), one add (phase),
///              one sin; per amplitude: one mul and one accumulate add;
///              one add per bias.
///                mul = G1 n + H G1 n + G2 H + m G2 H
///                add = G1 n + H G1 n + H + G2 H + m G2 H + m
///                sin = G1 n + G2 H
///   mlp        each dense row of width w costs w mul and w add (w - 1
///              accumulates plus the bias):
///                mul = H n + m H, add = H n + m H, relu or sin = H
///   fourier    per harmonic and axis: one mul (2 pi k t / L), one sin and
///              one cos (costed as sin); per non-constant coefficient one mul
///              and one accumulate add. 2D adds one mul per tensor-product
///              basis function.
///                1D: mul = 3K, add = 2K, sin = 2K
///                2D: mul = K1 + K2 + 2P, add = P - 1, sin = 2 (K1 + K2),
///                    P = (2 K1 + 1)(2 K2 + 1)
OpCounts model_op_counts(const ModelSpec& spec, int input_dim);

/// Weighted cost of one forward evaluation.
double model_flops(const ModelSpec& spec, int input_dim, const CostModel& cost);

/// Times add, mul, relu and sine over contiguous arrays of `batch_size`
/// doubles, repeated `iterations` times, and returns weights normalized so
/// that add = 1. Must run on a quiet thread for meaningful numbers.
/// Throws std::runtime_error when a kernel's total time is too short to
/// resolve.
CostModel measure_costs(long iterations, int batch_size);

}  // namespace sinekan
