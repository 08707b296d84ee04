#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "adm/baselines.hpp"
#include "adm/linalg.hpp"
#include "adm/online.hpp"
#include "adm/rng.hpp"

using namespace adm;

namespace {

Vector random_vector(Rng& rng, int n) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

ConstraintSpec consensus_spec(int n) {
  return ConstraintSpec::make(Matrix::Identity(n, n), -Matrix::Identity(n, n),
                              Vector::Zero(n));
}

}  // namespace

TEST_CASE("fobos basics") {
  SUBCASE("zero gradient, zero regularizer: no movement") {
    BaselineState s = BaselineState::zeros(3);
    const BaselineState next =
        fobos_step(s, LossTerm::linear(Vector::Zero(3)), Regularizer::zero(), 2.0);
    CHECK(next.z.norm() == 0.0);
    CHECK(next.t == 1);
  }

  SUBCASE("l1 stage is a soft threshold of the half step") {
    Rng rng(3);
    BaselineState s = BaselineState::zeros(4);
    s.z = random_vector(rng, 4);
    const LossTerm f = LossTerm::squared(random_vector(rng, 4), 0.5);
    const double rho_t = 1.5, lambda = 0.2;
    const BaselineState next = fobos_step(s, f, Regularizer::l1(lambda), rho_t);
    const Vector half = s.z - f.subgradient(s.z) / rho_t;
    CHECK((next.z - soft_threshold(half, lambda / rho_t)).norm() == 0.0);
  }

  SUBCASE("box indicator makes it projected gradient") {
    Rng rng(5);
    BaselineState s = BaselineState::zeros(3);
    s.z = random_vector(rng, 3);
    const LossTerm f = LossTerm::squared(random_vector(rng, 3), -0.2);
    const Vector b = Vector::Ones(3);
    const double rho_t = 2.0;
    const BaselineState via_fobos =
        fobos_step(s, f, Regularizer::box(b), rho_t);
    const BaselineState via_ogd =
        ogd_step(s, f, Regularizer::box(b), 1.0 / rho_t);
    CHECK((via_fobos.z - via_ogd.z).norm() == 0.0);
  }
}

TEST_CASE("ogd basics") {
  SUBCASE("interior point with zero gradient stays put") {
    BaselineState s = BaselineState::zeros(2);
    s.z << 0.5, 0.5;
    const BaselineState next = ogd_step(s, LossTerm::linear(Vector::Zero(2)),
                                        Regularizer::box(Vector::Ones(2)), 0.1);
    CHECK((next.z - s.z).norm() == 0.0);
  }

  SUBCASE("clamp at the box") {
    BaselineState s = BaselineState::zeros(2);
    s.z << 2.0, 0.5;
    const BaselineState next = ogd_step(s, LossTerm::linear(Vector::Zero(2)),
                                        Regularizer::box(Vector::Ones(2)), 0.1);
    CHECK(next.z[0] == doctest::Approx(1.0));
    CHECK(next.z[1] == doctest::Approx(0.5));
  }

  SUBCASE("non-indicator regularizer is refused") {
    BaselineState s = BaselineState::zeros(2);
    CHECK_THROWS_AS(ogd_step(s, LossTerm::linear(Vector::Zero(2)),
                             Regularizer::l1(0.1), 0.1),
                    ParameterError);
  }

  SUBCASE("decreasing steps on a fixed quadratic do not lose ground") {
    // minimize (a.x - b)^2 over the box [-2, 2]^2
    Vector a(2);
    a << 1.0, 0.5;
    const LossTerm f = LossTerm::squared(a, 0.75);
    const Regularizer box = Regularizer::box(Vector::Constant(2, 2.0));
    BaselineState s = BaselineState::zeros(2);
    s.z << -2.0, -2.0;
    const double start_gap = f.value(s.z);
    double avg_gap = 0.0;
    const int rounds = 400;
    for (int t = 1; t <= rounds; ++t) {
      s = ogd_step(s, f, box, 1.0 / std::sqrt(static_cast<double>(t)));
      avg_gap += f.value(s.z);
    }
    avg_gap /= rounds;
    CHECK(f.value(s.z) <= start_gap);
    CHECK(avg_gap <= start_gap);  // unconstrained minimum value is 0
  }
}

TEST_CASE("rda basics") {
  SUBCASE("zero average gradient with l1 keeps the origin") {
    BaselineState s = BaselineState::zeros(3);
    const BaselineState next = rda_step(s, LossTerm::linear(Vector::Zero(3)),
                                        Regularizer::l1(0.4), 2.0);
    CHECK(next.z.norm() == 0.0);
  }

  SUBCASE("g = 0 gives the closed-form dual average") {
    Rng rng(7);
    BaselineState s = BaselineState::zeros(4);
    const double gamma = 3.0;
    std::vector<LossTerm> losses;
    for (int t = 0; t < 5; ++t) {
      losses.push_back(LossTerm::linear(random_vector(rng, 4)));
    }
    Vector gsum = Vector::Zero(4);
    for (int t = 0; t < 5; ++t) {
      const Vector at_z = losses[t].subgradient(s.z);
      gsum += at_z;
      s = rda_step(s, losses[t], Regularizer::zero(), gamma);
      const double sqt = std::sqrt(static_cast<double>(t + 1));
      const Vector expect = -sqt * (gsum / (t + 1)) / gamma;
      CHECK((s.z - expect).norm() <= 1e-12);
    }
  }

  SUBCASE("five-round scalar trace against hand arithmetic") {
    // f_t(z) = (a_t z - b_t)^2 in one dimension, g = 0.1 |z|, gamma = 2
    const double gamma = 2.0, lambda = 0.1;
    const double as[5] = {1.0, -0.5, 2.0, 1.5, -1.0};
    const double bs[5] = {0.5, 0.25, -1.0, 0.75, 0.1};
    BaselineState s = BaselineState::zeros(1);
    double gsum = 0.0;
    for (int t = 0; t < 5; ++t) {
      Vector a(1);
      a << as[t];
      const LossTerm f = LossTerm::squared(a, bs[t]);
      const double grad = 2.0 * as[t] * (as[t] * s.z[0] - bs[t]);
      gsum += grad;
      s = rda_step(s, f, Regularizer::l1(lambda), gamma);
      const double sqt = std::sqrt(static_cast<double>(t + 1));
      const double gbar = gsum / (t + 1);
      // argmin gbar z + lambda |z| + gamma/(2 sqrt(t)) z^2
      double expect = 0.0;
      if (gbar > lambda) expect = -(gbar - lambda) * sqt / gamma;
      if (gbar < -lambda) expect = -(gbar + lambda) * sqt / gamma;
      CHECK(s.z[0] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("baseline steps are deterministic") {
  Rng rng(11);
  BaselineState a = BaselineState::zeros(3);
  BaselineState b = BaselineState::zeros(3);
  const LossTerm f = LossTerm::squared(random_vector(rng, 3), 0.3);
  for (int t = 1; t <= 20; ++t) {
    a = rda_step(a, f, Regularizer::l1(0.1), 2.0);
    b = rda_step(b, f, Regularizer::l1(0.1), 2.0);
  }
  CHECK((a.z - b.z).norm() == 0.0);
}

TEST_CASE("consensus OADM linearized at z reproduces fobos") {
  Rng rng(13);
  const int n = 6;
  const double rho = 2.0, lambda = 0.15;
  const Dataset data = gen_lasso_stream(21, 30, n, 2, 1e-2);

  XUpdateOptions opts;
  opts.mode = XUpdateMode::LinearizedLoss;
  opts.anchor = LinearizationAnchor::PreviousZ;
  OnlineAdm oadm(OnlineProblem{consensus_spec(n), Regularizer::l1(lambda)},
                 Schedule::eta_zero(rho), opts);
  BaselineState fobos = BaselineState::zeros(n);

  for (int t = 0; t < 100; ++t) {
    const LossTerm f = data.loss(t % data.size());
    oadm.step(f);
    fobos = fobos_step(fobos, f, Regularizer::l1(lambda), rho);
    CHECK((oadm.state().z - fobos.z).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("consensus OADM with a box indicator reproduces projected OGD") {
  const int n = 4;
  const double rho = 1.5;
  const Dataset data = gen_lasso_stream(22, 25, n, 2, 1e-2);
  const Regularizer box = Regularizer::box(Vector::Constant(n, 0.5));

  XUpdateOptions opts;
  opts.mode = XUpdateMode::LinearizedLoss;
  opts.anchor = LinearizationAnchor::PreviousZ;
  OnlineAdm oadm(OnlineProblem{consensus_spec(n), box},
                 Schedule::eta_zero(rho), opts);
  BaselineState ogd = BaselineState::zeros(n);

  for (int t = 0; t < 100; ++t) {
    const LossTerm f = data.loss(t % data.size());
    oadm.step(f);
    ogd = ogd_step(ogd, f, box, 1.0 / rho);
    CHECK((oadm.state().z - ogd.z).cwiseAbs().maxCoeff() <= 1e-12);
  }
}
