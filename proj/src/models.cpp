#include "sinekan/models.hpp"

#include "sinekan/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace sinekan {

using std::numbers::pi;

namespace {

void require_positive(int value, const char* what) {
  if (value < 1) {
    throw std::invalid_argument(std::string(what) + " must be >= 1");
  }
}

void fill_uniform(Rng& rng, Eigen::Ref<Vector> out, double bound) {
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = rng.uniform(-bound, bound);
}

}  // namespace

// ---------------------------------------------------------------------------
// Model

Vector Model::forward(const Vector& x) const {
  Matrix xs(1, x.size());
  xs.row(0) = x.transpose();
  return forward_batch(xs).row(0).transpose();
}

void Model::check_batch(const Matrix& xs) const {
  if (xs.cols() != input_dim()) {
    throw std::invalid_argument("input dimension mismatch: model expects " +
                                std::to_string(input_dim()) + ", got " +
                                std::to_string(xs.cols()));
  }
}

void Model::check_param_length(const Vector& p) const {
  if (p.size() != param_count()) {
    throw std::invalid_argument("parameter vector length " + std::to_string(p.size()) +
                                " does not match param_count " +
                                std::to_string(param_count()));
  }
}

// ---------------------------------------------------------------------------
// SineKan1D

SineKan1D::SineKan1D(int grid_size) : grid_size_(grid_size) {
  require_positive(grid_size, "grid size G");
  amplitudes_ = Vector::Zero(grid_size);
  frequencies_ = Vector::Zero(grid_size);
  phases_.resize(grid_size);
  for (int k = 1; k <= grid_size; ++k) {
    phases_[k - 1] = static_cast<double>(k) / (grid_size + 1);
  }
}

Vector SineKan1D::params() const {
  Vector p(param_count());
  p << amplitudes_, frequencies_, bias_;
  return p;
}

void SineKan1D::set_params(const Vector& p) {
  check_param_length(p);
  amplitudes_ = p.head(grid_size_);
  frequencies_ = p.segment(grid_size_, grid_size_);
  bias_ = p[2 * grid_size_];
}

Matrix SineKan1D::forward_batch(const Matrix& xs) const {
  check_batch(xs);
  Matrix out(xs.rows(), 1);
  for (Eigen::Index s = 0; s < xs.rows(); ++s) {
    const double x = xs(s, 0);
    double y = bias_;
    for (int k = 0; k < grid_size_; ++k) {
      y += amplitudes_[k] * std::sin(frequencies_[k] * x + phases_[k]);
    }
    out(s, 0) = y;
  }
  return out;
}

Matrix SineKan1D::jacobian(const Matrix& xs) const {
  check_batch(xs);
  const int g = grid_size_;
  Matrix jac(xs.rows(), param_count());
  for (Eigen::Index s = 0; s < xs.rows(); ++s) {
    const double x = xs(s, 0);
    for (int k = 0; k < g; ++k) {
      const double arg = frequencies_[k] * x + phases_[k];
      jac(s, k) = std::sin(arg);
      jac(s, g + k) = amplitudes_[k] * x * std::cos(arg);
    }
    jac(s, 2 * g) = 1.0;
  }
  return jac;
}

Vector SineKan1D::init_params(std::uint64_t seed) const {
  Rng rng(seed);
  const int g = grid_size_;
  Vector p = Vector::Zero(param_count());
  fill_uniform(rng, p.head(g), 1.0 / std::sqrt(static_cast<double>(g)));
  for (int k = 1; k <= g; ++k) p[g + k - 1] = 2.0 * pi * k / g;
  return p;
}

std::string SineKan1D::spec() const { return "sinekan1d:G=" + std::to_string(grid_size_); }

// ---------------------------------------------------------------------------
// SineKan2Layer

SineKan2Layer::SineKan2Layer(SineKan2Shape shape) : shape_(shape) {
  require_positive(shape.input_dim, "input dim n");
  require_positive(shape.grid1, "grid size G1");
  require_positive(shape.hidden, "hidden width H");
  require_positive(shape.grid2, "grid size G2");
  require_positive(shape.output_dim, "output dim m");
  const Eigen::Index n = shape.input_dim, g1 = shape.grid1, h = shape.hidden,
                     g2 = shape.grid2, m = shape.output_dim;
  off_w_ = h * g1 * n;
  off_b_ = off_w_ + g1;
  off_B_ = off_b_ + h;
  off_v_ = off_B_ + m * g2 * h;
  off_c_ = off_v_ + g2;
  params_ = Vector::Zero(off_c_ + m);

  phase1_.resize(g1, n);
  for (Eigen::Index k = 0; k < g1; ++k) {
    for (Eigen::Index l = 0; l < n; ++l) {
      phase1_(k, l) = static_cast<double>(k + 1) / (g1 + 1) + (l + 1) * pi / (n + 1);
    }
  }
  phase2_.resize(g2, h);
  for (Eigen::Index q = 0; q < g2; ++q) {
    for (Eigen::Index j = 0; j < h; ++j) {
      phase2_(q, j) = static_cast<double>(j + 1) / (g2 + 1) + (q + 1) * pi / (h + 1);
    }
  }
}

Eigen::Index SineKan2Layer::param_count() const { return params_.size(); }

void SineKan2Layer::set_params(const Vector& p) {
  check_param_length(p);
  params_ = p;
}

Matrix SineKan2Layer::forward_batch(const Matrix& xs) const {
  check_batch(xs);
  const Eigen::Index n = shape_.input_dim, g1 = shape_.grid1, h = shape_.hidden,
                     g2 = shape_.grid2, m = shape_.output_dim;
  const double* A = params_.data();
  const double* w = A + off_w_;
  const double* b = A + off_b_;
  const double* B = A + off_B_;
  const double* v = A + off_v_;
  const double* c = A + off_c_;

  Matrix out(xs.rows(), m);
  Vector s1(g1 * n);
  Vector y(h);
  Vector s2(g2 * h);
  for (Eigen::Index s = 0; s < xs.rows(); ++s) {
    for (Eigen::Index k = 0; k < g1; ++k) {
      for (Eigen::Index l = 0; l < n; ++l) {
        s1[k * n + l] = std::sin(w[k] * xs(s, l) + phase1_(k, l));
      }
    }
    for (Eigen::Index j = 0; j < h; ++j) {
      double acc = b[j];
      const double* row = A + j * g1 * n;
      for (Eigen::Index i = 0; i < g1 * n; ++i) acc += row[i] * s1[i];
      y[j] = acc;
    }
    for (Eigen::Index q = 0; q < g2; ++q) {
      for (Eigen::Index j = 0; j < h; ++j) {
        s2[q * h + j] = std::sin(v[q] * y[j] + phase2_(q, j));
      }
    }
    for (Eigen::Index o = 0; o < m; ++o) {
      double acc = c[o];
      const double* row = B + o * g2 * h;
      for (Eigen::Index i = 0; i < g2 * h; ++i) acc += row[i] * s2[i];
      out(s, o) = acc;
    }
  }
  return out;
}

Matrix SineKan2Layer::jacobian(const Matrix& xs) const {
  check_batch(xs);
  const Eigen::Index n = shape_.input_dim, g1 = shape_.grid1, h = shape_.hidden,
                     g2 = shape_.grid2, m = shape_.output_dim;
  const double* A = params_.data();
  const double* w = A + off_w_;
  const double* b = A + off_b_;
  const double* B = A + off_B_;
  const double* v = A + off_v_;

  Matrix jac = Matrix::Zero(xs.rows() * m, param_count());
  Vector s1(g1 * n), c1(g1 * n);
  Vector y(h);
  Vector s2(g2 * h), c2(g2 * h);
  Vector g(h);
  for (Eigen::Index s = 0; s < xs.rows(); ++s) {
    for (Eigen::Index k = 0; k < g1; ++k) {
      for (Eigen::Index l = 0; l < n; ++l) {
        const double arg = w[k] * xs(s, l) + phase1_(k, l);
        s1[k * n + l] = std::sin(arg);
        c1[k * n + l] = std::cos(arg);
      }
    }
    for (Eigen::Index j = 0; j < h; ++j) {
      double acc = b[j];
      const double* row = A + j * g1 * n;
      for (Eigen::Index i = 0; i < g1 * n; ++i) acc += row[i] * s1[i];
      y[j] = acc;
    }
    for (Eigen::Index q = 0; q < g2; ++q) {
      for (Eigen::Index j = 0; j < h; ++j) {
        const double arg = v[q] * y[j] + phase2_(q, j);
        s2[q * h + j] = std::sin(arg);
        c2[q * h + j] = std::cos(arg);
      }
    }
    for (Eigen::Index o = 0; o < m; ++o) {
      const Eigen::Index r = s * m + o;
      const double* Bo = B + o * g2 * h;
      // Layer 2 parameters.
      for (Eigen::Index i = 0; i < g2 * h; ++i) jac(r, off_B_ + o * g2 * h + i) = s2[i];
      g.setZero();
      for (Eigen::Index q = 0; q < g2; ++q) {
        double dv = 0.0;
        for (Eigen::Index j = 0; j < h; ++j) {
          const double bc = Bo[q * h + j] * c2[q * h + j];
          dv += bc * y[j];
          g[j] += bc * v[q];
        }
        jac(r, off_v_ + q) = dv;
      }
      jac(r, off_c_ + o) = 1.0;
      // Layer 1 parameters through dz/dy_j = g_j.
      for (Eigen::Index j = 0; j < h; ++j) {
        for (Eigen::Index i = 0; i < g1 * n; ++i) jac(r, j * g1 * n + i) = g[j] * s1[i];
        jac(r, off_b_ + j) = g[j];
      }
      for (Eigen::Index k = 0; k < g1; ++k) {
        double dw = 0.0;
        for (Eigen::Index l = 0; l < n; ++l) {
          double ga = 0.0;
          for (Eigen::Index j = 0; j < h; ++j) ga += g[j] * A[(j * g1 + k) * n + l];
          dw += ga * xs(s, l) * c1[k * n + l];
        }
        jac(r, off_w_ + k) = dw;
      }
    }
  }
  return jac;
}

Vector SineKan2Layer::init_params(std::uint64_t seed) const {
  Rng rng(seed);
  const Eigen::Index n = shape_.input_dim, g1 = shape_.grid1, h = shape_.hidden,
                     g2 = shape_.grid2, m = shape_.output_dim;
  Vector p = Vector::Zero(param_count());
  fill_uniform(rng, p.head(off_w_), 1.0 / std::sqrt(static_cast<double>(g1 * n)));
  for (Eigen::Index k = 1; k <= g1; ++k) p[off_w_ + k - 1] = 2.0 * pi * k / g1;
  fill_uniform(rng, p.segment(off_B_, m * g2 * h), 1.0 / std::sqrt(static_cast<double>(g2 * h)));
  for (Eigen::Index q = 1; q <= g2; ++q) p[off_v_ + q - 1] = 2.0 * pi * q / g2;
  return p;
}

std::string SineKan2Layer::spec() const {
  std::string s = "sinekan2:G1=" + std::to_string(shape_.grid1) +
                  ",H=" + std::to_string(shape_.hidden) +
                  ",G2=" + std::to_string(shape_.grid2);
  if (shape_.output_dim != 1) s += ",m=" + std::to_string(shape_.output_dim);
  return s;
}

// ---------------------------------------------------------------------------
// FourierModel

FourierModel::FourierModel(int harmonics, double period)
    : dimension_(1), kx_(harmonics), ky_(0), period_(period) {
  if (harmonics < 0) throw std::invalid_argument("harmonic count K must be >= 0");
  if (!(period > 0.0)) throw std::invalid_argument("period must be positive");
  coeffs_ = Vector::Zero(param_count());
}

FourierModel::FourierModel(int harmonics_x, int harmonics_y, double period)
    : dimension_(2), kx_(harmonics_x), ky_(harmonics_y), period_(period) {
  if (harmonics_x < 0 || harmonics_y < 0) {
    throw std::invalid_argument("harmonic counts must be >= 0");
  }
  if (!(period > 0.0)) throw std::invalid_argument("period must be positive");
  coeffs_ = Vector::Zero(param_count());
}

Eigen::Index FourierModel::param_count() const {
  if (dimension_ == 1) return 2 * kx_ + 1;
  return static_cast<Eigen::Index>(2 * kx_ + 1) * (2 * ky_ + 1);
}

void FourierModel::set_params(const Vector& p) {
  check_param_length(p);
  coeffs_ = p;
}

void FourierModel::axis_basis(double t, int harmonics, double* out) const {
  const double base = 2.0 * pi / period_;
  out[0] = 1.0;
  for (int k = 1; k <= harmonics; ++k) {
    out[2 * k - 1] = std::cos(base * k * t);
    out[2 * k] = std::sin(base * k * t);
  }
}

Matrix FourierModel::jacobian(const Matrix& xs) const {
  check_batch(xs);
  Matrix design(xs.rows(), param_count());
  if (dimension_ == 1) {
    std::vector<double> u(2 * kx_ + 1);
    for (Eigen::Index s = 0; s < xs.rows(); ++s) {
      axis_basis(xs(s, 0), kx_, u.data());
      design(s, 0) = 1.0;
      for (int k = 1; k <= kx_; ++k) {
        design(s, k) = u[2 * k - 1];
        design(s, kx_ + k) = u[2 * k];
      }
    }
    return design;
  }
  const int nx = 2 * kx_ + 1, ny = 2 * ky_ + 1;
  std::vector<double> ux(nx), uy(ny);
  for (Eigen::Index s = 0; s < xs.rows(); ++s) {
    axis_basis(xs(s, 0), kx_, ux.data());
    axis_basis(xs(s, 1), ky_, uy.data());
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) design(s, i * ny + j) = ux[i] * uy[j];
    }
  }
  return design;
}

Matrix FourierModel::forward_batch(const Matrix& xs) const { return jacobian(xs) * coeffs_; }

Vector FourierModel::init_params(std::uint64_t) const { return Vector::Zero(param_count()); }

std::string FourierModel::spec() const {
  if (dimension_ == 1) return "fourier:K=" + std::to_string(kx_);
  if (kx_ == ky_) return "fourier2d:K=" + std::to_string(kx_);
  return "fourier2d:K1=" + std::to_string(kx_) + ",K2=" + std::to_string(ky_);
}

// ---------------------------------------------------------------------------
// MlpModel

MlpModel::MlpModel(MlpShape shape) : shape_(shape) {
  require_positive(shape.input_dim, "input dim n");
  require_positive(shape.hidden, "hidden width H");
  require_positive(shape.output_dim, "output dim m");
  params_ = Vector::Zero(param_count());
}

Eigen::Index MlpModel::param_count() const {
  const Eigen::Index n = shape_.input_dim, h = shape_.hidden, m = shape_.output_dim;
  return h * n + h + m * h + m;
}

void MlpModel::set_params(const Vector& p) {
  check_param_length(p);
  params_ = p;
}

namespace {

struct MlpView {
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> w1;
  Eigen::Map<const Vector> beta1;
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> w2;
  Eigen::Map<const Vector> beta2;

  MlpView(const Vector& p, Eigen::Index n, Eigen::Index h, Eigen::Index m)
      : w1(p.data(), h, n),
        beta1(p.data() + h * n, h),
        w2(p.data() + h * n + h, m, h),
        beta2(p.data() + h * n + h + m * h, m) {}
};

}  // namespace

Matrix MlpModel::forward_batch(const Matrix& xs) const {
  check_batch(xs);
  const MlpView view(params_, shape_.input_dim, shape_.hidden, shape_.output_dim);
  Matrix pre = (xs * view.w1.transpose()).rowwise() + view.beta1.transpose();
  if (shape_.activation == Activation::ReLU) {
    pre = pre.cwiseMax(0.0);
  } else {
    pre = pre.array().sin().matrix();
  }
  return (pre * view.w2.transpose()).rowwise() + view.beta2.transpose();
}

Matrix MlpModel::jacobian(const Matrix& xs) const {
  check_batch(xs);
  const Eigen::Index n = shape_.input_dim, h = shape_.hidden, m = shape_.output_dim;
  const MlpView view(params_, n, h, m);
  const Matrix pre = (xs * view.w1.transpose()).rowwise() + view.beta1.transpose();
  Matrix act(pre.rows(), h), dact(pre.rows(), h);
  if (shape_.activation == Activation::ReLU) {
    act = pre.cwiseMax(0.0);
    dact = (pre.array() > 0.0).cast<double>().matrix();
  } else {
    act = pre.array().sin().matrix();
    dact = pre.array().cos().matrix();
  }

  const Eigen::Index off_b1 = h * n, off_w2 = off_b1 + h, off_b2 = off_w2 + m * h;
  Matrix jac = Matrix::Zero(xs.rows() * m, param_count());
  for (Eigen::Index s = 0; s < xs.rows(); ++s) {
    for (Eigen::Index o = 0; o < m; ++o) {
      const Eigen::Index r = s * m + o;
      for (Eigen::Index i = 0; i < h; ++i) {
        const double gi = view.w2(o, i) * dact(s, i);
        for (Eigen::Index p = 0; p < n; ++p) jac(r, i * n + p) = gi * xs(s, p);
        jac(r, off_b1 + i) = gi;
        jac(r, off_w2 + o * h + i) = act(s, i);
      }
      jac(r, off_b2 + o) = 1.0;
    }
  }
  return jac;
}

Vector MlpModel::init_params(std::uint64_t seed) const {
  Rng rng(seed);
  const Eigen::Index n = shape_.input_dim, h = shape_.hidden, m = shape_.output_dim;
  Vector p(param_count());
  const double bound1 = 1.0 / std::sqrt(static_cast<double>(n));
  const double bound2 = 1.0 / std::sqrt(static_cast<double>(h));
  fill_uniform(rng, p.head(h * n + h), bound1);
  fill_uniform(rng, p.tail(m * h + m), bound2);
  return p;
}

std::string MlpModel::spec() const {
  std::string s = "mlp:H=" + std::to_string(shape_.hidden) + ",act=" +
                  (shape_.activation == Activation::ReLU ? "relu" : "sine");
  if (shape_.output_dim != 1) s += ",m=" + std::to_string(shape_.output_dim);
  return s;
}

}  // namespace sinekan
