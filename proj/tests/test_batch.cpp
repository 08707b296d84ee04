#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "adm/batch.hpp"
#include "adm/harness.hpp"
#include "adm/linalg.hpp"
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

BatchProblem small_lasso(std::uint64_t seed, int n_examples, int dim, double q) {
  const Dataset data = gen_lasso_stream(seed, n_examples, dim, dim / 4, 1e-2);
  const double lambda = lambda_from_fraction(q, data);
  return BatchProblem{
      consensus_spec(dim),
      QuadraticObjective::least_squares(data.features, data.targets,
                                        1.0 / n_examples),
      Regularizer::l1(lambda)};
}

// f(x) = ||x - target||^2
BatchProblem quadratic_consensus(const Vector& target, Regularizer g) {
  const int n = static_cast<int>(target.size());
  QuadraticObjective f;
  f.h = 2.0 * Matrix::Identity(n, n);
  f.q = -2.0 * target;
  f.f0 = target.squaredNorm();
  return BatchProblem{consensus_spec(n), std::move(f), std::move(g)};
}

}  // namespace

TEST_CASE("all-zero state is a fixed point of the trivial problem") {
  const int n = 3;
  BatchProblem p{consensus_spec(n), QuadraticObjective::zero(n),
                 Regularizer::zero()};
  BatchAdm solver(p, 1.0);
  auto [next, rr] = solver.step(solver.initial_state());
  CHECK(next.x.norm() == 0.0);
  CHECK(next.z.norm() == 0.0);
  CHECK(next.y.norm() == 0.0);
  CHECK(rr.r_cross == 0.0);
  CHECK(rr.r_full == 0.0);
}

TEST_CASE("dual update arithmetic") {
  // A = I, B = -I, c = 0, rho = 2: y_{t+1} = y_t + 2 (x_{t+1} - z_{t+1})
  Vector target(1);
  target << 1.0;
  BatchProblem p = quadratic_consensus(target, Regularizer::zero());
  BatchAdm solver(p, 2.0);
  IterateState s = solver.initial_state();
  s.x << 1.0;
  auto [next, rr] = solver.step(s);
  CHECK(next.y[0] == doctest::Approx(2.0 * (next.x[0] - next.z[0])).epsilon(1e-15));
}

TEST_CASE("one step of a 2-dim lasso instance matches hand-assembled forms") {
  Rng rng(71);
  Matrix m(3, 2);
  m << 1, 0.5, -0.3, 1.2, 0.7, -0.1;
  Vector b(3);
  b << 0.4, -0.2, 0.9;
  const double lambda = 0.3;
  const double rho = 1.7;
  BatchProblem p{consensus_spec(2),
                 QuadraticObjective::least_squares(m, b, 1.0),
                 Regularizer::l1(lambda)};
  BatchAdm solver(p, rho);

  IterateState s = solver.initial_state();
  s.z = random_vector(rng, 2);
  s.y = random_vector(rng, 2);
  auto [next, rr] = solver.step(s);

  // x-step: (2 M^T M + rho I) x = 2 M^T b - y + rho z
  const Matrix k = 2.0 * m.transpose() * m + rho * Matrix::Identity(2, 2);
  const Vector rhs = 2.0 * m.transpose() * b - s.y + rho * s.z;
  const Vector x_expect = solve_spd(k, rhs);
  CHECK((next.x - x_expect).norm() <= 1e-10);

  // z-step: soft threshold of x + y/rho at lambda/rho
  const Vector z_expect = soft_threshold(Vector(next.x + s.y / rho), lambda / rho);
  CHECK((next.z - z_expect).norm() <= 1e-10);

  // y-step
  const Vector y_expect = s.y + rho * (next.x - next.z);
  CHECK((next.y - y_expect).norm() <= 1e-12);
}

TEST_CASE("residual monotonicity along whole runs") {
  const BatchProblem problems[] = {
      small_lasso(1, 20, 16, 0.5),
      small_lasso(2, 30, 8, 0.1),
      quadratic_consensus(Vector::Ones(5), Regularizer::squared_l2(0.4)),
  };
  for (const BatchProblem& p : problems) {
    for (double rho : {0.5, 1.0, 4.0}) {
      BatchAdm solver(p, rho);
      const auto traj = solver.run(300);
      for (std::size_t t = 0; t < traj.residuals.size(); ++t) {
        CHECK(traj.residuals[t].r_full <= traj.residuals[t].r_cross + 1e-9);
        if (t > 0) {
          CHECK(traj.residuals[t].r_cross <= traj.residuals[t - 1].r_full + 1e-9);
        }
      }
    }
  }
}

TEST_CASE("per-step objective bound against the reference comparator") {
  const BatchProblem p = small_lasso(5, 25, 10, 0.3);
  const ReferenceSolution ref = reference_optimum(p);
  REQUIRE(ref.converged);
  const double rho = 1.3;
  BatchAdm solver(p, rho);
  const auto traj = solver.run(200);
  const Vector bz_star = p.cs.b * ref.z;
  for (std::size_t t = 0; t + 1 < traj.states.size(); ++t) {
    const IterateState& cur = traj.states[t];
    const IterateState& nxt = traj.states[t + 1];
    const double lhs = p.objective(nxt.x, nxt.z) - ref.p_star;
    const double rhs =
        (cur.y.squaredNorm() - nxt.y.squaredNorm()) / (2.0 * rho) -
        rho / 2.0 * p.cs.residual(nxt.x, cur.z).squaredNorm() +
        rho / 2.0 *
            ((bz_star - p.cs.b * cur.z).squaredNorm() -
             (bz_star - p.cs.b * nxt.z).squaredNorm());
    CHECK(lhs <= rhs + 1e-8);
  }
}

TEST_CASE("telescoped residual bound per step") {
  const BatchProblem p = small_lasso(6, 25, 12, 0.4);
  const ReferenceSolution ref = reference_optimum(p);
  const double rho = 0.9;
  BatchAdm solver(p, rho);
  const auto traj = solver.run(200);
  const Vector bz_star = p.cs.b * ref.z;
  for (std::size_t t = 0; t + 1 < traj.states.size(); ++t) {
    const IterateState& cur = traj.states[t];
    const IterateState& nxt = traj.states[t + 1];
    const double lhs = traj.residuals[t].r_cross;
    const double rhs =
        (bz_star - p.cs.b * cur.z).squaredNorm() -
        (bz_star - p.cs.b * nxt.z).squaredNorm() +
        ((ref.y - cur.y).squaredNorm() - (ref.y - nxt.y).squaredNorm()) /
            (rho * rho);
    CHECK(lhs <= rhs + 1e-8);
  }
}

TEST_CASE("the dual equals rho times the summed violations") {
  const BatchProblem p = small_lasso(7, 20, 9, 0.4);
  const double rho = 2.1;
  BatchAdm solver(p, rho);
  const auto traj = solver.run(60);
  Vector acc = Vector::Zero(p.cs.rows());
  for (std::size_t t = 1; t < traj.states.size(); ++t) {
    acc += p.cs.residual(traj.states[t].x, traj.states[t].z);
  }
  CHECK((traj.states.back().y - rho * acc).norm() <= 1e-9);
}

TEST_CASE("subgradient certificates") {
  SUBCASE("quadratic f: certificate equals the gradient") {
    const BatchProblem p = small_lasso(8, 20, 7, 0.4);
    BatchAdm solver(p, 1.1);
    IterateState s = solver.initial_state();
    for (int t = 0; t < 5; ++t) {
      auto [next, rr] = solver.step(s);
      const auto [f_cert, g_cert] = solver.subgradient_certificates(s, next);
      CHECK((f_cert - p.f.grad(next.x)).cwiseAbs().maxCoeff() <= 1e-9);
      s = next;
    }
  }

  SUBCASE("l1 g: certificate lies in the subdifferential, coordinatewise") {
    const double lambda = 0.25;
    BatchProblem p = small_lasso(9, 22, 8, 0.0);
    p.g = Regularizer::l1(lambda);
    BatchAdm solver(p, 1.0);
    IterateState s = solver.initial_state();
    for (int t = 0; t < 10; ++t) {
      auto [next, rr] = solver.step(s);
      const auto [f_cert, g_cert] = solver.subgradient_certificates(s, next);
      for (int i = 0; i < next.z.size(); ++i) {
        if (next.z[i] > 1e-12) {
          CHECK(g_cert[i] == doctest::Approx(lambda).epsilon(1e-7));
        } else if (next.z[i] < -1e-12) {
          CHECK(g_cert[i] == doctest::Approx(-lambda).epsilon(1e-7));
        } else {
          CHECK(std::abs(g_cert[i]) <= lambda + 1e-7);
        }
      }
      s = next;
    }
  }

  SUBCASE("zero g: certificate vanishes") {
    BatchProblem p = quadratic_consensus(Vector::Ones(4), Regularizer::zero());
    BatchAdm solver(p, 1.5);
    IterateState s = solver.initial_state();
    for (int t = 0; t < 5; ++t) {
      auto [next, rr] = solver.step(s);
      const auto [f_cert, g_cert] = solver.subgradient_certificates(s, next);
      CHECK(g_cert.norm() <= 1e-10);
      s = next;
    }
  }

  SUBCASE("convexity inequality at probe points") {
    const BatchProblem p = small_lasso(10, 20, 6, 0.3);
    BatchAdm solver(p, 1.0);
    IterateState s = solver.initial_state();
    Rng rng(3);
    for (int t = 0; t < 3; ++t) {
      auto [next, rr] = solver.step(s);
      const auto [f_cert, g_cert] = solver.subgradient_certificates(s, next);
      for (int probe = 0; probe < 20; ++probe) {
        const Vector px = random_vector(rng, 6);
        CHECK(p.f.value(px) >=
              p.f.value(next.x) + f_cert.dot(px - next.x) - 1e-7);
        const Vector pz = random_vector(rng, 6);
        CHECK(p.g.value(pz) >=
              p.g.value(next.z) + g_cert.dot(pz - next.z) - 1e-7);
      }
      s = next;
    }
  }
}

TEST_CASE("run_batch averages") {
  const BatchProblem p = small_lasso(11, 18, 6, 0.4);
  BatchAdm solver(p, 1.0);
  const auto traj = solver.run(1);
  CHECK((traj.xbar - traj.states[1].x).norm() == 0.0);
  CHECK((traj.zbar - traj.states[1].z).norm() == 0.0);
}

TEST_CASE("ergodic objective rate") {
  const BatchProblem p = small_lasso(12, 30, 20, 0.4);
  const ReferenceSolution ref = reference_optimum(p);
  REQUIRE(ref.converged);
  const double dz2 = ref.z.squaredNorm();
  for (double rho : {0.5, 2.0}) {
    BatchAdm solver(p, rho);
    IterateState s = solver.initial_state();
    Vector xsum = Vector::Zero(20), zsum = Vector::Zero(20);
    for (long t = 1; t <= 500; ++t) {
      auto [next, rr] = solver.step(s);
      s = next;
      xsum += s.x;
      zsum += s.z;
      const double gap =
          p.objective(xsum / t, zsum / t) - ref.p_star;
      CHECK(gap <= p.cs.lambda_max_b * dz2 * rho / (2.0 * t) + 1e-8);
    }
  }
}

TEST_CASE("residual rate") {
  const BatchProblem p = small_lasso(13, 30, 20, 0.4);
  const ReferenceSolution ref = reference_optimum(p);
  const double dy2 = ref.y.squaredNorm();
  const double dz2 = ref.z.squaredNorm();
  for (double rho : {0.5, 2.0}) {
    BatchAdm solver(p, rho);
    const auto traj = solver.run(500);
    for (std::size_t t = 0; t < traj.residuals.size(); ++t) {
      const double bound =
          (p.cs.lambda_max_b * dz2 + dy2 / (rho * rho)) / static_cast<double>(t + 1);
      CHECK(traj.residuals[t].r_full <= bound + 1e-8);
    }
  }
}

TEST_CASE("vi machinery") {
  const BatchProblem p = small_lasso(14, 16, 4, 0.4);

  SUBCASE("gap vanishes at identical points") {
    Rng rng(5);
    ViPoint w{random_vector(rng, 4), random_vector(rng, 4), random_vector(rng, 4)};
    CHECK(vi_gap(w, w, p) == 0.0);
  }

  SUBCASE("coupling matrix is antisymmetric") {
    // w^T M w = x.A^T y + z.B^T y - y.(A x + B z) = 0
    Rng rng(6);
    for (int trial = 0; trial < 100; ++trial) {
      const Vector x = random_vector(rng, 4);
      const Vector z = random_vector(rng, 4);
      const Vector y = random_vector(rng, 4);
      const double quad = x.dot(p.cs.a.transpose() * y) +
                          z.dot(p.cs.b.transpose() * y) -
                          y.dot(p.cs.a * x + p.cs.b * z);
      CHECK(std::abs(quad) <= 1e-9);
    }
  }

  SUBCASE("ergodic gap is bounded by L / T") {
    // 1-dim problem: f(x) = (x - 1)^2, g = 0.3 |z|, x = z
    QuadraticObjective f;
    f.h = 2.0 * Matrix::Identity(1, 1);
    f.q = Vector::Constant(1, -2.0);
    f.f0 = 1.0;
    BatchProblem q{consensus_spec(1), f, Regularizer::l1(0.3)};
    const double rho = 1.0;
    BatchAdm solver(q, rho);
    IterateState s = solver.initial_state();
    Vector xs = Vector::Zero(1), zs = Vector::Zero(1), ys = Vector::Zero(1);
    for (long t = 1; t <= 1000; ++t) {
      auto [next, rr] = solver.step(s);
      s = next;
      xs += s.x;
      zs += s.z;
      ys += s.y;
      if (t == 10 || t == 100 || t == 1000) {
        const ViPoint wbar{xs / t, zs / t, ys / t};
        for (double px = -2.0; px <= 2.01; px += 0.4) {
          for (double pz = -2.0; pz <= 2.01; pz += 0.4) {
            for (double py = -2.0; py <= 2.01; py += 0.4) {
              ViPoint w{Vector::Constant(1, px), Vector::Constant(1, pz),
                        Vector::Constant(1, py)};
              const double cap =
                  rho / 2.0 * (q.cs.a * w.x - q.cs.c).squaredNorm() +
                  w.y.squaredNorm() / (2.0 * rho);
              CHECK(vi_gap(wbar, w, q) <= cap / t + 1e-8);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("capability errors") {
  // general B with an l1 regularizer has no exact z-step
  Rng rng(9);
  Matrix b(3, 3);
  b << 1, 0.2, 0, 0, 1, 0.2, 0, 0, 1;
  const ConstraintSpec cs =
      ConstraintSpec::make(Matrix::Identity(3, 3), b, Vector::Zero(3));
  BatchProblem p{cs, QuadraticObjective::zero(3), Regularizer::l1(0.1)};
  BatchAdm solver(p, 1.0);
  CHECK_THROWS_AS(solver.step(solver.initial_state()), CapabilityError);
}
