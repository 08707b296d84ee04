#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "adm/bregman.hpp"
#include "adm/dense.hpp"
#include "adm/linalg.hpp"
#include "adm/problems.hpp"

namespace adm {

// Primal/dual triple plus the round index: the solver's whole mutable state.
struct IterateState {
  Vector x;
  Vector z;
  Vector y;
  long round = 0;

  static IterateState zeros(Eigen::Index n1, Eigen::Index n2, Eigen::Index m,
                            long round = 0) {
    return IterateState{Vector::Zero(n1), Vector::Zero(n2), Vector::Zero(m),
                        round};
  }
};

// Squared residuals of the optimality conditions. After the step producing
// iterate t+1: r_cross = ||A x_{t+1} + B z_t - c||^2, and
// r_full = ||A x_{t+1} + B z_{t+1} - c||^2 + ||B(z_{t+1} - z_t)||^2.
struct ResidualRecord {
  double r_cross = 0.0;
  double r_full = 0.0;
};

// f(x) = 1/2 x^T H x + q^T x + f0.
struct QuadraticObjective {
  Matrix h;
  Vector q;
  double f0 = 0.0;

  static QuadraticObjective zero(Eigen::Index n);
  // scale * ||M x - b||^2
  static QuadraticObjective least_squares(const Eigen::Ref<const Matrix>& m,
                                          const Eigen::Ref<const Vector>& b,
                                          double scale);
  // scale * sum of quadratic-form loss terms
  static QuadraticObjective from_terms(const std::vector<LossTerm>& terms,
                                       double scale);

  double value(const Eigen::Ref<const Vector>& x) const {
    return 0.5 * x.dot(h * x) + q.dot(x) + f0;
  }
  Vector grad(const Eigen::Ref<const Vector>& x) const { return h * x + q; }
  Eigen::Index dim() const { return q.size(); }
};

struct BatchProblem {
  ConstraintSpec cs;
  QuadraticObjective f;
  Regularizer g;

  double objective(const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& z) const {
    return f.value(x) + g.value(z);
  }
};

namespace detail {

// System matrix of the x-subproblem
//   min 1/2 x^T H x + q^T x + <y, Ax> + rho/2 ||Ax + Bz - c||^2
//       + eta * B_phi(x, x_prev)
// for quadratic/mahalanobis phi. eta == 0 skips the divergence terms, which
// keeps the batch and eta=0 online paths on identical arithmetic.
Matrix x_system(const Matrix& h, const Matrix& ata, double rho, double eta,
                const Divergence& phi);
Vector x_rhs(const Vector& q, const ConstraintSpec& cs,
             const Eigen::Ref<const Vector>& z,
             const Eigen::Ref<const Vector>& y, double rho, double eta,
             const Divergence& phi, const Eigen::Ref<const Vector>& x_prev);

// z-subproblem: exact when B = +-I (prox of g) or when g is zero/squared_l2
// (SPD solve); anything else is a capability error.
Vector z_update(const ConstraintSpec& cs, const Regularizer& g,
                const Eigen::Ref<const Vector>& x_new,
                const Eigen::Ref<const Vector>& y, double rho,
                const SpdSolver* cached_gram = nullptr);
Matrix z_system(const ConstraintSpec& cs, const Regularizer& g, double rho);
bool z_update_needs_solver(const ConstraintSpec& cs, const Regularizer& g);

}  // namespace detail

class BatchAdm {
 public:
  BatchAdm(BatchProblem problem, double rho);

  const BatchProblem& problem() const { return problem_; }
  double rho() const { return rho_; }

  IterateState initial_state() const {
    return IterateState::zeros(problem_.cs.x_dim(), problem_.cs.z_dim(),
                               problem_.cs.rows());
  }

  std::pair<IterateState, ResidualRecord> step(const IterateState& s) const;

  // Candidate subgradients generated by consecutive iterates:
  //   -A^T(y_{t+1} + rho(B z_t - B z_{t+1})) for f at x_{t+1},
  //   -B^T y_{t+1}                           for g at z_{t+1}.
  std::pair<Vector, Vector> subgradient_certificates(
      const IterateState& prev, const IterateState& next) const;

  struct Trajectory {
    std::vector<IterateState> states;       // states[0] = all-zero start
    std::vector<ResidualRecord> residuals;  // residuals[t]: step t -> t+1
    std::vector<double> objectives;         // f + g at each generated iterate
    Vector xbar;                            // mean of generated x_1..x_T
    Vector zbar;
  };
  Trajectory run(long rounds) const;

 private:
  BatchProblem problem_;
  double rho_;
  std::unique_ptr<SpdSolver> x_solver_;
  std::unique_ptr<SpdSolver> z_solver_;
};

// Stacked point of the variational-inequality formulation.
struct ViPoint {
  Vector x;
  Vector z;
  Vector y;
};

// h(wt) - h(w) + <wt - w, F(wt)> with F(w) = Mw + q built from (A, B, c);
// nonpositive at a saddle point for every probe w.
double vi_gap(const ViPoint& wt, const ViPoint& w, const BatchProblem& p);

// Columns: t, objective, r_cross, r_full, y_norm.
void write_trajectory_csv(std::ostream& os, const BatchAdm::Trajectory& traj);

}  // namespace adm
