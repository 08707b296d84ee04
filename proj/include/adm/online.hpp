#pragma once

#include <Eigen/LU>
#include <memory>
#include <optional>
#include <vector>

#include "adm/batch.hpp"
#include "adm/bregman.hpp"
#include "adm/problems.hpp"
#include "adm/rng.hpp"

namespace adm {

// Step-size schedules. rho(t)/eta(t) are the values used by the update that
// produces iterate t; the solver evaluates them at round + 1, matching the
// usual time-varying-parameter convention.
class Schedule {
 public:
  enum class Kind {
    Constant,               // fixed rho, eta
    SqrtHorizon,            // rho = sqrt(T), eta = Gf sqrt(T) / (Dx sqrt(2 alpha))
    StronglyConvex,         // eta_t = beta1 t, rho_t = beta2 t / lambda_max_B
    EtaLinear,              // fixed rho, eta_t = beta1 t
    EtaZeroConstant,        // eta = 0, fixed rho
    EtaZeroSqrtHorizon,     // eta = 0, rho = Gf sqrt(T) / (Dz sqrt(lmin_A lmax_B))
    EtaZeroStronglyConvex,  // eta = 0, rho_t = beta2 t / lambda_max_B
  };

  static Schedule constant(double rho, double eta);
  static Schedule sqrt_horizon(long horizon, double gf, double dx, double alpha);
  static Schedule strongly_convex(double beta1, double beta2,
                                  double lambda_max_b);
  static Schedule eta_linear(double rho, double beta1);
  static Schedule eta_zero(double rho);
  static Schedule eta_zero_sqrt_horizon(long horizon, double gf, double dz,
                                        double lambda_min_a,
                                        double lambda_max_b);
  static Schedule eta_zero_strongly_convex(double beta2, double lambda_max_b);

  Kind kind() const { return kind_; }
  double rho(long t) const;
  double eta(long t) const;
  bool eta_is_zero() const;
  long horizon() const { return horizon_; }

 private:
  explicit Schedule(Kind k) : kind_(k) {}

  Kind kind_;
  double rho_ = 1.0;
  double eta_ = 0.0;
  double beta1_ = 0.0;
  double beta2_ = 0.0;
  double lambda_max_b_ = 0.0;
  long horizon_ = 0;
};

// Constants feeding the regret-bound formulas. All are measured from the data
// and the reference comparator (never guessed): dz = ||z*||, dx =
// sqrt(B_phi(x*, 0)), gf from the dataset, d = max_t ||y_t||, f_floor = the
// observed floor of the per-round gap, clipped at 0.
struct BoundConstants {
  double gf = 0.0;
  double dx = 0.0;
  double dz = 0.0;
  double d = 0.0;
  double f_floor = 0.0;
  double alpha = 1.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double lambda_max_b = 0.0;
  double lambda_min_a = 0.0;
};

struct RegretBounds {
  std::optional<double> r1;
  std::optional<double> rc;
  std::optional<double> r2;
};

// Right-hand sides of the regret theorems applicable to the schedule kind at
// horizon T. Unsupported kinds raise ParameterError.
RegretBounds evaluate_bounds(const BoundConstants& c, const Schedule& s,
                             long horizon);

// Constant bound on sum_t ||A x_{t+1} + B z_{t+1} - c||^2 under a bounded
// dual (4 D^2 for rho = sqrt(T); 2 pi D^2 lmaxB^2 / (3 beta2^2) for the
// strongly convex schedule).
double violation_sum_bound(const BoundConstants& c, const Schedule& s);

// eta = 0, strongly convex g, bounded dual: constant R^c bound
// pi lmaxB^2 / (3 beta2^2) * (D^2 + Gf^2 / lminA).
double eta_zero_rc_constant_bound(const BoundConstants& c);

// Expectation-rate bounds of the stochastic setting at rho = sqrt(T):
// objective gap and squared constraint violation of the averaged iterates.
struct StochasticBounds {
  double objective_gap;
  double violation_sq;
};
StochasticBounds stochastic_rate_bounds(const BoundConstants& c, long horizon);

struct RoundRecord {
  long t = 0;
  double loss = 0.0;       // f_t at the presented x_t
  double g_value = 0.0;    // g at the presented z_t
  double violation_sq = 0.0;
  double r1_increment = 0.0;
  double rc_increment = 0.0;
  std::optional<double> r2_increment;
  double rho = 0.0;
  double eta = 0.0;
};

// Running R1 / R2 / Rc sums against a fixed comparator, plus the per-round
// log they are re-derivable from.
class RegretLedger {
 public:
  RegretLedger(Vector comparator_x, Vector comparator_z)
      : comparator_x_(std::move(comparator_x)),
        comparator_z_(std::move(comparator_z)) {}

  const Vector& comparator_x() const { return comparator_x_; }
  const Vector& comparator_z() const { return comparator_z_; }

  void record(const RoundRecord& r);

  double r1() const { return r1_; }
  double rc() const { return rc_; }
  std::optional<double> r2() const { return r2_; }
  const std::vector<RoundRecord>& log() const { return log_; }
  double recompute_rc() const;

 private:
  Vector comparator_x_;
  Vector comparator_z_;
  double r1_ = 0.0;
  double rc_ = 0.0;
  std::optional<double> r2_;
  std::vector<RoundRecord> log_;
};

struct OnlineProblem {
  ConstraintSpec cs;
  Regularizer g;
};

enum class XUpdateMode {
  Exact,              // full subproblem, closed form required
  LinearizedPenalty,  // quadratic penalty linearized, f kept
  LinearizedLoss,     // f linearized, penalty kept
  MirrorDescent,      // both linearized
  Comid,              // smooth part of f linearized, nonsmooth kept
};

// Where LinearizedLoss takes the subgradient: the previous x (default) or the
// previous z, the choice that reproduces forward-backward splitting in the
// consensus setting.
enum class LinearizationAnchor { PreviousX, PreviousZ };

struct XUpdateOptions {
  XUpdateMode mode = XUpdateMode::Exact;
  LinearizationAnchor anchor = LinearizationAnchor::PreviousX;
  Divergence phi = Divergence::quadratic();        // exact / LinearizedLoss
  std::optional<Divergence> phi_prime;             // cases with both linearized
  bool fast_paths = true;
};

class OnlineAdm {
 public:
  OnlineAdm(OnlineProblem problem, Schedule schedule, XUpdateOptions opts = {});

  const OnlineProblem& problem() const { return problem_; }
  const Schedule& schedule() const { return schedule_; }
  const IterateState& state() const { return state_; }
  void reset();

  struct StepRecord {
    ResidualRecord residuals;
    double rho = 0.0;
    double eta = 0.0;
  };
  // One pass through the three updates with this round's loss.
  StepRecord step(const LossTerm& f_t);

  // x resolving A x = c - B z_t exactly; requires invertible A.
  bool xhat_available() const;
  Vector xhat() const;

  // Exposed for verification: the x-subproblem solution from an arbitrary
  // state at given step sizes.
  Vector x_update(const LossTerm& f, const IterateState& s, double rho,
                  double eta) const;

 private:
  Vector exact_x(const LossTerm& f, const IterateState& s, double rho,
                 double eta) const;
  Vector linearized_penalty_x(const LossTerm& f, const IterateState& s,
                              double rho, double eta) const;
  Vector linearized_loss_x(const LossTerm& f, const IterateState& s, double rho,
                           double eta) const;
  Vector mirror_descent_x(const Vector& direction, const IterateState& s,
                          double eta) const;
  Vector comid_x(const LossTerm& f, const IterateState& s, double rho,
                 double eta) const;
  Vector prox_gradient_x(const LossTerm& f, const Vector& drift,
                         const IterateState& s, double eta) const;
  const Divergence& prime() const;

  const Matrix& ata() const;  // built on first dense x-solve

  OnlineProblem problem_;
  Schedule schedule_;
  XUpdateOptions opts_;
  IterateState state_;
  mutable std::optional<Matrix> ata_;
  mutable std::optional<Eigen::PartialPivLU<Matrix>> a_lu_;
  mutable std::unique_ptr<SpdSolver> prime_metric_solver_;
  std::unique_ptr<SpdSolver> z_solver_;  // reused while rho stays constant
  double z_solver_rho_ = 0.0;
};

Vector xhat_solve(const ConstraintSpec& cs, const Eigen::Ref<const Vector>& z);

// Ledger entry for one played round: presented state, loss, updated state.
RoundRecord make_round_record(const LossTerm& f, const Regularizer& g,
                              const ConstraintSpec& cs,
                              const IterateState& presented,
                              const IterateState& updated,
                              const std::optional<Vector>& xhat,
                              const RegretLedger& ledger, double rho,
                              double eta);

// Uniform draw from the dataset followed by the solver's configured update;
// requires a linearized mode (the sampled subgradient is all that is used).
// Returns the sampled index.
int stochastic_step(OnlineAdm& solver, const Dataset& data, Rng& rng);

// Inequality-constrained setting: min sum_t f_t(x) s.t. A x = a, B x <= b,
// handled through the slack z = B x with box regularizer z <= b and
// per-constraint duals u, v.
struct TwoBlockState {
  Vector x;
  Vector z;
  Vector u;
  Vector v;
  long round = 1;
};

class ProjectionFreeAdm {
 public:
  struct Config {
    double rho_u = 1.0;
    double rho_v = 1.0;
    double eta = 0.0;
  };

  ProjectionFreeAdm(Matrix a_eq, Vector a_rhs, Matrix b_in, Vector b_rhs,
                    Config config);

  const TwoBlockState& state() const { return state_; }
  const Config& config() const { return config_; }

  // x-update in closed form for quadratic-form losses, otherwise f is
  // linearized at x_t; z-update is the elementwise min with the box bound;
  // dual updates exact.
  void step(const LossTerm& f_t);

  double equality_violation_sq() const;  // ||A x - a||^2
  double slack_violation_sq() const;     // ||B x - z||^2
  Vector inequality_gap() const;         // B x - b (componentwise)

 private:
  Matrix a_eq_;
  Vector a_rhs_;
  Matrix b_in_;
  Vector b_rhs_;
  Config config_;
  Matrix base_;  // rho_u A^T A + rho_v B^T B + eta I
  std::unique_ptr<SpdSolver> base_solver_;
  TwoBlockState state_;
};

}  // namespace adm
