#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "adm/linalg.hpp"
#include "adm/problems.hpp"
#include "adm/rng.hpp"

using namespace adm;

namespace {

Vector random_vector(Rng& rng, int n) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

Vector central_difference(const LossTerm& f, const Vector& x, double h) {
  Vector g(x.size());
  Vector p = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    p[i] = x[i] + h;
    const double up = f.value(p);
    p[i] = x[i] - h;
    const double down = f.value(p);
    p[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

}  // namespace

TEST_CASE("gen_lasso_stream is reproducible byte for byte") {
  const Dataset a = gen_lasso_stream(99, 20, 30, 5, 1e-2);
  const Dataset b = gen_lasso_stream(99, 20, 30, 5, 1e-2);
  std::stringstream sa, sb;
  a.serialize(sa);
  b.serialize(sb);
  CHECK(sa.str() == sb.str());

  std::stringstream sc(sa.str());
  const Dataset c = Dataset::parse(sc);
  CHECK((c.features - a.features).cwiseAbs().maxCoeff() == 0.0);
  CHECK((c.targets - a.targets).norm() == 0.0);
  CHECK((c.x0 - a.x0).norm() == 0.0);
}

TEST_CASE("gen_lasso_stream shape and normalization") {
  const Dataset d = gen_lasso_stream(7, 100, 1000, 100, 1e-2);
  CHECK(d.size() == 100);
  CHECK(d.dim() == 1000);
  int nnz = 0;
  for (int i = 0; i < d.dim(); ++i) {
    if (d.x0[i] != 0.0) ++nnz;
  }
  CHECK(nnz == 100);
  for (int j = 0; j < d.dim(); ++j) {
    CHECK(d.features.col(j).norm() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("gen_lasso_stream with zero noise is exact") {
  const Dataset d = gen_lasso_stream(3, 15, 10, 3, 0.0);
  const Vector expected = d.features * d.x0 / 15.0;
  CHECK((d.targets - expected).norm() == 0.0);
}

TEST_CASE("gen_lasso_stream rejects bad parameters") {
  CHECK_THROWS_AS(gen_lasso_stream(1, 10, 5, 6, 0.0), ParameterError);
}

TEST_CASE("gen_tv_signal") {
  const Vector flat = gen_tv_signal(5, 40, 0);
  CHECK((flat - Vector::Ones(40)).norm() == 0.0);

  const Vector sig = gen_tv_signal(5, 200, 5);
  CHECK(sig.minCoeff() >= 1.0);
  CHECK(sig.maxCoeff() <= 10.0);
  CHECK((gen_tv_signal(5, 200, 5) - sig).norm() == 0.0);
  CHECK((gen_tv_signal(6, 200, 5) - sig).norm() != 0.0);
}

TEST_CASE("loss values and subgradients at landmark points") {
  Vector a(2);
  a << 1, 0;

  SUBCASE("squared loss at an interpolating point") {
    const LossTerm f = LossTerm::squared(a, 1.0);
    Vector x(2);
    x << 1, 5;
    CHECK(f.value(x) == 0.0);
    CHECK(f.subgradient(x).norm() == 0.0);
  }

  SUBCASE("hinge with satisfied margin") {
    const LossTerm f = LossTerm::hinge(a, +1);
    Vector x(2);
    x << 2, 0;
    CHECK(f.value(x) == 0.0);
    CHECK(f.subgradient(x).norm() == 0.0);
  }

  SUBCASE("hinge with violated margin") {
    const LossTerm f = LossTerm::hinge(a, +1);
    Vector x(2);
    x << -1, 0;
    CHECK(f.value(x) == doctest::Approx(2.0));
    CHECK(f.subgradient(x)[0] == doctest::Approx(-1.0));
  }
}

TEST_CASE("subgradients match central finite differences") {
  Rng rng(31);
  Vector a = random_vector(rng, 4);
  a /= a.norm();
  const LossTerm losses[] = {
      LossTerm::squared(a, 0.3),
      LossTerm::logistic(a, +1),
      LossTerm::logistic(a, -1),
      LossTerm::hinge(a, +1),
      LossTerm::linear(a),
  };
  const double h = 1e-6;
  for (const LossTerm& f : losses) {
    int checked = 0;
    for (int trial = 0; trial < 50; ++trial) {
      const Vector x = random_vector(rng, 4);
      if (f.kind() == LossTerm::Kind::Hinge &&
          std::abs(1.0 - f.label() * a.dot(x)) < 1e-6) {
        continue;  // kink
      }
      const Vector fd = central_difference(f, x, h);
      CHECK((f.subgradient(x) - fd).cwiseAbs().maxCoeff() <= 1e-5);
      ++checked;
    }
    CHECK(checked >= 45);
  }
}

TEST_CASE("regularizer prox closed forms") {
  SUBCASE("zero") {
    Rng rng(1);
    const Vector w = random_vector(rng, 6);
    CHECK((Regularizer::zero().prox(w, 2.0) - w).norm() == 0.0);
  }

  SUBCASE("l1 soft threshold branches") {
    Vector w(3);
    w << 3, 0.5, -3;
    const Vector z = Regularizer::l1(1.0).prox(w, 1.0);
    CHECK(z[0] == doctest::Approx(2.0));
    CHECK(z[1] == doctest::Approx(0.0));
    CHECK(z[2] == doctest::Approx(-2.0));
  }

  SUBCASE("box clamp") {
    Vector b(2), w(2);
    b << 1, 1;
    w << 2, 0;
    const Vector z = Regularizer::box(b).prox(w, 1.0);
    CHECK(z[0] == doctest::Approx(1.0));
    CHECK(z[1] == doctest::Approx(0.0));
  }

  SUBCASE("squared_l2 shrink") {
    Vector w(2);
    w << 3, -3;
    const Vector z = Regularizer::squared_l2(1.0).prox(w, 2.0);
    CHECK(z[0] == doctest::Approx(2.0 * 3.0 / 4.0));
  }

  SUBCASE("simplex projection") {
    Vector w(3);
    w << 0.4, 0.3, 0.3;
    CHECK((Regularizer::simplex().prox(w, 1.0) - w).norm() <= 1e-12);
    Vector far(3);
    far << 5, 0, 0;
    const Vector z = Regularizer::simplex().prox(far, 1.0);
    CHECK(z.sum() == doctest::Approx(1.0));
    CHECK(z.minCoeff() >= 0.0);
    CHECK(z[0] == doctest::Approx(1.0));
  }
}

TEST_CASE("prox optimality conditions") {
  Rng rng(47);

  SUBCASE("l1: 0 in subdifferential + rho (z - w)") {
    const double lambda = 0.7;
    const Regularizer g = Regularizer::l1(lambda);
    for (int trial = 0; trial < 50; ++trial) {
      const Vector w = random_vector(rng, 8);
      const double rho = 0.2 + 2.0 * rng.uniform();
      const Vector z = g.prox(w, rho);
      for (int i = 0; i < 8; ++i) {
        const double v = rho * (w[i] - z[i]);  // must lie in lambda * d|z_i|
        if (z[i] > 0.0) {
          CHECK(v == doctest::Approx(lambda).epsilon(1e-9));
        } else if (z[i] < 0.0) {
          CHECK(v == doctest::Approx(-lambda).epsilon(1e-9));
        } else {
          CHECK(std::abs(v) <= lambda + 1e-9);
        }
      }
    }
  }

  SUBCASE("box: KKT sign conditions") {
    Vector b = Vector::Ones(5);
    const Regularizer g = Regularizer::box(b);
    for (int trial = 0; trial < 50; ++trial) {
      const Vector w = random_vector(rng, 5) * 2.0;
      const double rho = 0.5 + rng.uniform();
      const Vector z = g.prox(w, rho);
      for (int i = 0; i < 5; ++i) {
        CHECK(z[i] <= b[i] + 1e-12);
        const double mult = rho * (w[i] - z[i]);  // normal-cone element
        if (z[i] < b[i] - 1e-12) {
          CHECK(std::abs(mult) <= 1e-12);
        } else {
          CHECK(mult >= -1e-12);
        }
      }
    }
  }
}

TEST_CASE("regularizer values") {
  Vector z(2);
  z << 1, -2;
  CHECK(Regularizer::l1(0.5).value(z) == doctest::Approx(1.5));
  CHECK(Regularizer::squared_l2(2.0).value(z) == doctest::Approx(10.0));
  Vector b = Vector::Ones(2);
  CHECK(Regularizer::box(b).value(z) == 0.0);
  Vector over(2);
  over << 2, 0;
  CHECK(std::isinf(Regularizer::box(b).value(over)));
}

TEST_CASE("lambda_from_fraction") {
  Dataset d;
  d.features = Matrix::Identity(3, 3);
  d.targets.resize(3);
  d.targets << 1, -2, 0.5;
  d.x0 = Vector::Zero(3);
  CHECK(lambda_from_fraction(0.0, d) == 0.0);
  CHECK(lambda_from_fraction(1.0, d) == doctest::Approx(2.0 / 3.0));

  const Dataset s = gen_lasso_stream(11, 40, 60, 6, 1e-2);
  const Vector atb = s.features.transpose() * s.targets;
  const double oracle = 0.5 * atb.cwiseAbs().maxCoeff() / 40.0;
  CHECK(lambda_from_fraction(0.5, s) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("subgradient bound covers sampled gradients") {
  const Dataset d = gen_lasso_stream(13, 25, 12, 4, 1e-2);
  const double gf = estimate_subgradient_bound(d, 10.0);
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    Vector x = random_vector(rng, 12);
    if (x.norm() > 10.0) x *= 10.0 / x.norm();
    const int i = static_cast<int>(rng.uniform_int(25));
    CHECK(d.loss(i).subgradient(x).norm() <= gf + 1e-9);
  }
}

TEST_CASE("constraint spec caches spectral bounds and shapes") {
  Rng rng(53);
  Matrix a(3, 3);
  a << 2, 0.1, 0, 0.1, 1.5, 0, 0, 0, 1.0;
  const Matrix b = -Matrix::Identity(3, 3);
  const ConstraintSpec cs = ConstraintSpec::make(a, b, Vector::Zero(3));
  CHECK(cs.a_shape == ConstraintSpec::Shape::General);
  CHECK(cs.b_shape == ConstraintSpec::Shape::NegIdentity);
  CHECK(cs.lambda_max_b == doctest::Approx(spectral_bound(b)).epsilon(1e-8));
  CHECK(cs.lambda_max_a == doctest::Approx(spectral_bound(a)).epsilon(1e-8));
  CHECK(cs.lambda_min_a > 0.0);

  const ConstraintSpec id = ConstraintSpec::make(
      Matrix::Identity(2, 2), bidiagonal_matrix(2), Vector::Zero(2));
  CHECK(id.a_shape == ConstraintSpec::Shape::Identity);
  CHECK(id.b_shape == ConstraintSpec::Shape::UpperBidiagonal);
}
