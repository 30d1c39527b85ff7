#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <string>

namespace sinekan {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class Activation { ReLU, Sine };

/// A parameterized function family with a flat parameter view.
///
/// Batches are matrices with one row per sample and one column per input
/// dimension. Forward output has one row per sample and one column per
/// output. Jacobian rows are sample-major, then output: row
/// `sample * output_dim() + out` holds d output[out] / d params.
///
/// forward_batch and jacobian are const and safe to call concurrently;
/// set_params needs exclusive access.
class Model {
 public:
  virtual ~Model() = default;

  virtual int input_dim() const = 0;
  virtual int output_dim() const = 0;
  virtual Eigen::Index param_count() const = 0;

  virtual Vector params() const = 0;
  /// Throws std::invalid_argument on a length mismatch.
  virtual void set_params(const Vector& p) = 0;

  virtual Matrix forward_batch(const Matrix& xs) const = 0;
  virtual Matrix jacobian(const Matrix& xs) const = 0;

  /// Deterministic initial parameter vector; does not modify the model.
  virtual Vector init_params(std::uint64_t seed) const = 0;

  /// Canonical config string, e.g. "sinekan1d:G=16".
  virtual std::string spec() const = 0;
  virtual std::unique_ptr<Model> clone() const = 0;

  /// True when outputs are linear in the parameters (the Jacobian is
  /// then parameter-independent and the fit is a linear least-squares solve).
  virtual bool linear_in_params() const { return false; }

  /// Single-sample convenience wrapper around forward_batch.
  Vector forward(const Vector& x) const;

 protected:
  void check_batch(const Matrix& xs) const;
  void check_param_length(const Vector& p) const;
};

/// y = sum_{k=1..G} A_k sin(w_k x + k/(G+1)) + b
///
/// Parameter layout: [A_1..A_G, w_1..w_G, b]. The phases are fixed and
/// never part of the parameter vector.
class SineKan1D final : public Model {
 public:
  explicit SineKan1D(int grid_size);

  int grid_size() const { return grid_size_; }
  const Vector& amplitudes() const { return amplitudes_; }
  const Vector& frequencies() const { return frequencies_; }
  double bias() const { return bias_; }
  const Vector& phases() const { return phases_; }

  int input_dim() const override { return 1; }
  int output_dim() const override { return 1; }
  Eigen::Index param_count() const override { return 2 * grid_size_ + 1; }
  Vector params() const override;
  void set_params(const Vector& p) override;
  Matrix forward_batch(const Matrix& xs) const override;
  Matrix jacobian(const Matrix& xs) const override;
  Vector init_params(std::uint64_t seed) const override;
  std::string spec() const override;
  std::unique_ptr<Model> clone() const override { return std::make_unique<SineKan1D>(*this); }

 private:
  int grid_size_;
  Vector amplitudes_;
  Vector frequencies_;
  double bias_ = 0.0;
  Vector phases_;
};

struct SineKan2Shape {
  int input_dim = 2;   // n
  int grid1 = 8;       // G1
  int hidden = 16;     // H
  int grid2 = 8;       // G2
  int output_dim = 1;  // m
};

/// Two stacked sinusoidal layers:
///
///   y_j = sum_k sum_l A[j,k,l] sin(w_k x_l + k/(G1+1) + l pi/(n+1)) + b_j
///   z_m = sum_q sum_j B[m,q,j] sin(v_q y_j + j/(G2+1) + q pi/(H+1)) + c_m
///
/// with k = 1..G1, l = 1..n, q = 1..G2, j = 1..H. The phase offsets are
/// fixed constants.
///
/// Parameter layout, layer by layer: A (row-major over j,k,l), w, b, then
/// B (row-major over m,q,j), v, c.
class SineKan2Layer final : public Model {
 public:
  explicit SineKan2Layer(SineKan2Shape shape);

  const SineKan2Shape& shape() const { return shape_; }
  /// Phase grids, row-major: phase1(k, l) and phase2(q, j), zero-based.
  const Matrix& phase1() const { return phase1_; }
  const Matrix& phase2() const { return phase2_; }

  int input_dim() const override { return shape_.input_dim; }
  int output_dim() const override { return shape_.output_dim; }
  Eigen::Index param_count() const override;
  Vector params() const override { return params_; }
  void set_params(const Vector& p) override;
  Matrix forward_batch(const Matrix& xs) const override;
  Matrix jacobian(const Matrix& xs) const override;
  Vector init_params(std::uint64_t seed) const override;
  std::string spec() const override;
  std::unique_ptr<Model> clone() const override { return std::make_unique<SineKan2Layer>(*this); }

 private:
  // Offsets into params_.
  Eigen::Index off_w_ = 0, off_b_ = 0, off_B_ = 0, off_v_ = 0, off_c_ = 0;
  SineKan2Shape shape_;
  Vector params_;
  Matrix phase1_;  // G1 x n
  Matrix phase2_;  // G2 x H
};

/// Truncated Fourier series with fixed frequencies 2 pi k / L.
///
/// 1D layout: [a_0, a_1..a_K, b_1..b_K] for
///   a_0 + sum_k a_k cos(2 pi k x / L) + b_k sin(2 pi k x / L).
///
/// 2D uses the full tensor-product basis u_i(x) u_j(y) where, per axis,
/// u_0 = 1, u_{2k-1} = cos(2 pi k t / L), u_{2k} = sin(2 pi k t / L). The
/// coefficient grid is (2 K1 + 1) x (2 K2 + 1), stored row-major over (i, j).
class FourierModel final : public Model {
 public:
  /// 1D series with K harmonics.
  explicit FourierModel(int harmonics, double period = 1.0);
  /// 2D tensor-product series with K1 harmonics in x and K2 in y.
  FourierModel(int harmonics_x, int harmonics_y, double period = 1.0);

  int dimension() const { return dimension_; }
  int harmonics_x() const { return kx_; }
  int harmonics_y() const { return ky_; }

  int input_dim() const override { return dimension_; }
  int output_dim() const override { return 1; }
  Eigen::Index param_count() const override;
  Vector params() const override { return coeffs_; }
  void set_params(const Vector& p) override;
  Matrix forward_batch(const Matrix& xs) const override;
  Matrix jacobian(const Matrix& xs) const override;
  Vector init_params(std::uint64_t seed) const override;
  std::string spec() const override;
  std::unique_ptr<Model> clone() const override { return std::make_unique<FourierModel>(*this); }
  bool linear_in_params() const override { return true; }

 private:
  void axis_basis(double t, int harmonics, double* out) const;

  int dimension_;
  int kx_;
  int ky_;
  double period_;
  Vector coeffs_;
};

struct MlpShape {
  int input_dim = 2;
  int hidden = 32;
  int output_dim = 1;
  Activation activation = Activation::ReLU;
};

/// out = W2 act(W1 x + beta1) + beta2.
/// Layout: W1 (row-major H x n), beta1, W2 (row-major m x H), beta2.
class MlpModel final : public Model {
 public:
  explicit MlpModel(MlpShape shape);

  const MlpShape& shape() const { return shape_; }

  int input_dim() const override { return shape_.input_dim; }
  int output_dim() const override { return shape_.output_dim; }
  Eigen::Index param_count() const override;
  Vector params() const override { return params_; }
  void set_params(const Vector& p) override;
  Matrix forward_batch(const Matrix& xs) const override;
  Matrix jacobian(const Matrix& xs) const override;
  Vector init_params(std::uint64_t seed) const override;
  std::string spec() const override;
  std::unique_ptr<Model> clone() const override { return std::make_unique<MlpModel>(*this); }

 private:
  MlpShape shape_;
  Vector params_;
};

}  // namespace sinekan
