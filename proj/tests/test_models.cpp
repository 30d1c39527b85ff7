#include "sinekan/model_spec.hpp"
#include "sinekan/models.hpp"
#include "sinekan/random.hpp"
#include "sinekan/solver.hpp"

#include "fd_oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace sinekan;

namespace {

Matrix scalar(double x) { return Matrix::Constant(1, 1, x); }

Vector random_vector(Rng& rng, Eigen::Index n, double scale) {
  Vector v(n);
  for (auto& x : v) x = rng.uniform(-scale, scale);
  return v;
}

Matrix random_inputs(Rng& rng, int samples, int dim) {
  Matrix xs(samples, dim);
  for (Eigen::Index i = 0; i < xs.size(); ++i) xs.data()[i] = rng.uniform(0.01, 1.0);
  return xs;
}

}  // namespace

TEST_CASE("forward examples") {
  SineKan1D m(1);
  m.set_params((Vector(3) << 0.0, 3.7, 7.0).finished());
  for (double x : {0.01, 0.3, 1.0}) CHECK(m.forward_batch(scalar(x))(0, 0) == 7.0);

  m.set_params((Vector(3) << 1.0, 0.0, 0.0).finished());
  for (double x : {0.01, 0.3, 1.0}) CHECK(m.forward_batch(scalar(x))(0, 0) == doctest::Approx(0.479425538604203).epsilon(1e-15));

  MlpModel mlp({1, 1, 1, Activation::ReLU});
  mlp.set_params((Vector(4) << -1.0, 0.0, 1.0, 0.0).finished());
  CHECK(mlp.forward_batch(scalar(0.5))(0, 0) == 0.0);

  FourierModel f(1);
  f.set_params((Vector(3) << 0.0, 1.0, 0.0).finished());
  CHECK(std::abs(f.forward_batch(scalar(0.25))(0, 0)) < 1e-15);
}

TEST_CASE("param counts") {
  CHECK(SineKan1D(2).param_count() == 5);
  CHECK(SineKan1D(2).params().size() == 5);
  CHECK(SineKan1D(16).param_count() == 33);
  CHECK(SineKan2Layer({2, 4, 8, 4, 1}).param_count() == 113);
  CHECK(MlpModel({2, 10, 1, Activation::ReLU}).param_count() == 41);
  CHECK(FourierModel(8).param_count() == 17);
  CHECK(FourierModel(2, 3).param_count() == 5 * 7);
  // General formula H*G1*n + G1 + H + m*G2*H + G2 + m with m = 3.
  CHECK(SineKan2Layer({2, 3, 5, 4, 3}).param_count() == 5 * 3 * 2 + 3 + 5 + 3 * 4 * 5 + 4 + 3);
}

TEST_CASE("params round trip") {
  Rng rng(7);
  std::vector<std::unique_ptr<Model>> models;
  models.push_back(std::make_unique<SineKan1D>(5));
  models.push_back(std::make_unique<SineKan2Layer>(SineKan2Shape{2, 3, 4, 3, 2}));
  models.push_back(std::make_unique<FourierModel>(4));
  models.push_back(std::make_unique<FourierModel>(2, 3));
  models.push_back(std::make_unique<MlpModel>(MlpShape{2, 6, 1, Activation::Sine}));
  for (auto& m : models) {
    const Vector v = random_vector(rng, m->param_count(), 3.0);
    m->set_params(v);
    CHECK(m->params() == v);
    CHECK_THROWS_AS(m->set_params(Vector::Zero(m->param_count() + 1)), std::invalid_argument);
  }
}

TEST_CASE("jacobian examples") {
  SineKan1D m(3);
  Rng rng(3);
  m.set_params(random_vector(rng, 7, 2.0));
  Matrix xs(4, 1);
  xs << 0.1, 0.4, 0.7, 1.0;
  const Matrix j = m.jacobian(xs);
  CHECK(j.col(6) == Vector::Ones(4));

  SineKan1D g1(1);
  g1.set_params((Vector(3) << 1.0, 0.0, 0.0).finished());
  CHECK(g1.jacobian(scalar(1.0))(0, 1) == doctest::Approx(0.8775825618903728).epsilon(1e-15));
}

TEST_CASE("jacobian matches central differences for every family") {
  std::vector<std::unique_ptr<Model>> models;
  models.push_back(std::make_unique<SineKan1D>(6));
  models.push_back(std::make_unique<SineKan2Layer>(SineKan2Shape{2, 3, 4, 3, 2}));
  models.push_back(std::make_unique<FourierModel>(5));
  models.push_back(std::make_unique<FourierModel>(2, 3));
  models.push_back(std::make_unique<MlpModel>(MlpShape{2, 5, 2, Activation::Sine}));
  models.push_back(std::make_unique<MlpModel>(MlpShape{2, 5, 1, Activation::ReLU}));
  for (auto& m : models) {
    for (int draw = 0; draw < 20; ++draw) {
      Rng rng(derive_seed(draw, m->spec()));
      m->set_params(random_vector(rng, m->param_count(), 1.5));
      const Matrix xs = random_inputs(rng, 9, m->input_dim());
      INFO(m->spec(), " draw ", draw);
      CHECK(relative_diff(m->jacobian(xs), fd_jacobian(*m, xs)) < 1e-5);
    }
  }
}

TEST_CASE("init params") {
  SineKan1D m(4);
  CHECK(m.init_params(9) == m.init_params(9));
  CHECK(m.init_params(9) != m.init_params(10));
  const Vector p = m.init_params(9);
  for (int k = 1; k <= 4; ++k) CHECK(p[4 + k - 1] == doctest::Approx(2 * std::numbers::pi * k / 4));
  CHECK(p[8] == 0.0);
  CHECK(FourierModel(5).init_params(1).isZero(0));
  CHECK(FourierModel(2, 2).init_params(1).isZero(0));
  MlpModel mlp({2, 8, 1, Activation::ReLU});
  const Vector q = mlp.init_params(3);
  CHECK(q == mlp.init_params(3));
  CHECK(q.head(16).cwiseAbs().maxCoeff() <= 1 / std::sqrt(2.0));
}

TEST_CASE("sinekan1d homogeneity") {
  Rng rng(11);
  SineKan1D m(5);
  const Vector p = random_vector(rng, 11, 2.0);
  m.set_params(p);
  const Matrix xs = random_inputs(rng, 30, 1);
  const Matrix y = m.forward_batch(xs);
  for (double c : {-3.0, 0.5, 2.0}) {
    Vector q = p;
    q.head(5) *= c;
    q[10] *= c;
    m.set_params(q);
    CHECK((m.forward_batch(xs) - c * y).cwiseAbs().maxCoeff() <= 1e-14 * y.cwiseAbs().maxCoeff() * std::abs(c) + 1e-15);
  }
}

TEST_CASE("fourier is linear in its parameters") {
  Rng rng(5);
  for (auto* m : {static_cast<Model*>(new FourierModel(6)), static_cast<Model*>(new FourierModel(2, 3))}) {
    std::unique_ptr<Model> owned(m);
    const Matrix xs = random_inputs(rng, 25, m->input_dim());
    const Vector p1 = random_vector(rng, m->param_count(), 1.0);
    const Vector p2 = random_vector(rng, m->param_count(), 1.0);
    auto eval = [&](const Vector& p) {
      m->set_params(p);
      return Matrix(m->forward_batch(xs));
    };
    CHECK((eval(p1 + p2) - eval(p1) - eval(p2)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((eval(2.5 * p1) - 2.5 * eval(p1)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(m->linear_in_params());
  }
}

TEST_CASE("sinekan2 with zero outer amplitudes outputs the bias") {
  Rng rng(8);
  SineKan2Layer m({2, 3, 4, 3, 2});
  Vector p = random_vector(rng, m.param_count(), 2.0);
  // B occupies the block of m*G2*H entries after A, w and b.
  const Eigen::Index a = 4 * 3 * 2, w = 3, b = 4, outer = 2 * 3 * 4, v = 3;
  p.segment(a + w + b, outer).setZero();
  m.set_params(p);
  const Matrix ys = m.forward_batch(random_inputs(rng, 40, 2));
  for (Eigen::Index i = 0; i < ys.rows(); ++i) {
    CHECK(ys(i, 0) == p[a + w + b + outer + v]);
    CHECK(ys(i, 1) == p[a + w + b + outer + v + 1]);
  }
}

TEST_CASE("phases are fixed and strictly inside (0, pi/2)") {
  SineKan1D m(6);
  for (int k = 1; k <= 6; ++k) CHECK(m.phases()[k - 1] == doctest::Approx(k / 7.0).epsilon(1e-15));
  SineKan2Layer m2({2, 3, 4, 2, 1});
  CHECK(m2.phase1()(0, 0) == doctest::Approx(1.0 / 4 + std::numbers::pi / 3));
  CHECK(m2.phase2()(1, 3) == doctest::Approx(4.0 / 3 + 2 * std::numbers::pi / 5));

  const Vector before = m.phases();
  const Matrix p1 = m2.phase1(), p2 = m2.phase2();
  Matrix xs(50, 1);
  Matrix ys(50, 1);
  for (int i = 0; i < 50; ++i) {
    xs(i, 0) = 0.01 + 0.02 * i;
    ys(i, 0) = std::sin(10 * xs(i, 0));
  }
  SolverConfig cfg;
  cfg.max_iterations = 50;
  const FitReport r = fit(make_fit_problem(m, xs, ys), cfg);
  m.set_params(r.params);
  CHECK(m.phases() == before);

  Matrix xs2(30, 2);
  Matrix ys2(30, 1);
  for (int i = 0; i < 30; ++i) {
    xs2(i, 0) = 0.03 * (i + 1);
    xs2(i, 1) = 1 - 0.03 * i;
    ys2(i, 0) = xs2(i, 0) * xs2(i, 1);
  }
  auto problem = make_fit_problem(m2, xs2, ys2);
  problem.initial = m2.init_params(1);
  m2.set_params(fit(problem, cfg).params);
  CHECK(m2.phase1() == p1);
  CHECK(m2.phase2() == p2);
}

TEST_CASE("specs") {
  CHECK(ModelSpec::parse("sinekan1d:G=16").to_string() == "sinekan1d:G=16");
  CHECK(ModelSpec::parse("sinekan2:G1=8,H=16,G2=8").to_string() == "sinekan2:G1=8,H=16,G2=8");
  CHECK(ModelSpec::parse("mlp:H=32,act=relu").to_string() == "mlp:H=32,act=relu");
  CHECK(ModelSpec::parse("fourier:K=12").to_string() == "fourier:K=12");
  CHECK(make_model(ModelSpec::parse("sinekan2:G1=4,H=8,G2=4"), 2)->param_count() == 113);
  CHECK(spec_param_count(ModelSpec::parse("mlp:H=10,act=sine"), 2) == 41);
  CHECK_THROWS_AS(ModelSpec::parse("transformer:L=3"), std::invalid_argument);
  CHECK_THROWS_AS(ModelSpec::parse("sinekan1d:G=0"), std::invalid_argument);
}

TEST_CASE("ladder lands within 10% of each budget") {
  for (const char* fam : {"sinekan2", "mlp:relu", "mlp:sine", "fourier2d"}) {
    for (int budget : {50, 100, 200, 400, 800}) {
      const auto n = spec_param_count(ladder_spec(fam, budget, 2), 2);
      INFO(fam, " ", budget, " -> ", n);
      CHECK(std::abs(n - budget) <= 0.1 * budget);
    }
  }
}
