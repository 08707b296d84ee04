#include "adm/online.hpp"

#include <cmath>
#include <numbers>

namespace adm {

namespace {

bool is_scaled_identity(const Matrix& m, double* scale) {
  if (m.rows() != m.cols()) return false;
  const double tau = m(0, 0);
  if (m != Matrix(tau * Matrix::Identity(m.rows(), m.cols()))) return false;
  *scale = tau;
  return true;
}

// argmin max(0, 1 - l a.x) + mu/2 ||x - w||^2
Vector hinge_prox(const LossTerm& f, const Vector& w, double mu) {
  const Vector& a = f.direction();
  const double l = static_cast<double>(f.label());
  const double anorm2 = a.squaredNorm();
  if (anorm2 == 0.0) return w;
  const double margin = 1.0 - l * a.dot(w);
  if (margin <= 0.0) return w;
  const double gamma = std::min(1.0, mu * margin / anorm2);
  return w + (gamma / mu) * l * a;
}

}  // namespace

Schedule Schedule::constant(double rho, double eta) {
  if (rho <= 0.0) throw ParameterError("schedule: rho <= 0");
  if (eta < 0.0) throw ParameterError("schedule: eta < 0");
  Schedule s(Kind::Constant);
  s.rho_ = rho;
  s.eta_ = eta;
  return s;
}

Schedule Schedule::sqrt_horizon(long horizon, double gf, double dx,
                                double alpha) {
  if (horizon < 1) throw ParameterError("schedule: horizon >= 1");
  if (gf <= 0.0 || dx <= 0.0 || alpha <= 0.0) {
    throw ParameterError("schedule: sqrt_horizon needs positive G_f, D_x, alpha");
  }
  Schedule s(Kind::SqrtHorizon);
  s.horizon_ = horizon;
  const double sq = std::sqrt(static_cast<double>(horizon));
  s.rho_ = sq;
  s.eta_ = gf * sq / (dx * std::sqrt(2.0 * alpha));
  return s;
}

Schedule Schedule::strongly_convex(double beta1, double beta2,
                                   double lambda_max_b) {
  if (beta1 <= 0.0 || beta2 <= 0.0 || lambda_max_b <= 0.0) {
    throw ParameterError("schedule: strongly_convex needs positive beta1, beta2, lambda_max_B");
  }
  Schedule s(Kind::StronglyConvex);
  s.beta1_ = beta1;
  s.beta2_ = beta2;
  s.lambda_max_b_ = lambda_max_b;
  return s;
}

Schedule Schedule::eta_linear(double rho, double beta1) {
  if (rho <= 0.0 || beta1 <= 0.0) {
    throw ParameterError("schedule: eta_linear needs positive rho, beta1");
  }
  Schedule s(Kind::EtaLinear);
  s.rho_ = rho;
  s.beta1_ = beta1;
  return s;
}

Schedule Schedule::eta_zero(double rho) {
  if (rho <= 0.0) throw ParameterError("schedule: rho <= 0");
  Schedule s(Kind::EtaZeroConstant);
  s.rho_ = rho;
  return s;
}

Schedule Schedule::eta_zero_sqrt_horizon(long horizon, double gf, double dz,
                                         double lambda_min_a,
                                         double lambda_max_b) {
  if (horizon < 1) throw ParameterError("schedule: horizon >= 1");
  if (gf <= 0.0 || dz <= 0.0 || lambda_min_a <= 0.0 || lambda_max_b <= 0.0) {
    throw ParameterError("schedule: eta_zero_sqrt_horizon needs positive constants");
  }
  Schedule s(Kind::EtaZeroSqrtHorizon);
  s.horizon_ = horizon;
  s.rho_ = gf * std::sqrt(static_cast<double>(horizon)) /
           (dz * std::sqrt(lambda_min_a * lambda_max_b));
  return s;
}

Schedule Schedule::eta_zero_strongly_convex(double beta2, double lambda_max_b) {
  if (beta2 <= 0.0 || lambda_max_b <= 0.0) {
    throw ParameterError("schedule: eta_zero_strongly_convex needs positive beta2, lambda_max_B");
  }
  Schedule s(Kind::EtaZeroStronglyConvex);
  s.beta2_ = beta2;
  s.lambda_max_b_ = lambda_max_b;
  return s;
}

double Schedule::rho(long t) const {
  switch (kind_) {
    case Kind::StronglyConvex:
    case Kind::EtaZeroStronglyConvex:
      return beta2_ * static_cast<double>(t) / lambda_max_b_;
    default:
      return rho_;
  }
}

double Schedule::eta(long t) const {
  switch (kind_) {
    case Kind::StronglyConvex:
    case Kind::EtaLinear:
      return beta1_ * static_cast<double>(t);
    case Kind::EtaZeroConstant:
    case Kind::EtaZeroSqrtHorizon:
    case Kind::EtaZeroStronglyConvex:
      return 0.0;
    default:
      return eta_;
  }
}

bool Schedule::eta_is_zero() const {
  switch (kind_) {
    case Kind::EtaZeroConstant:
    case Kind::EtaZeroSqrtHorizon:
    case Kind::EtaZeroStronglyConvex:
      return true;
    case Kind::Constant:
      return eta_ == 0.0;
    default:
      return false;
  }
}

RegretBounds evaluate_bounds(const BoundConstants& c, const Schedule& s,
                             long horizon) {
  if (horizon < 1) throw ParameterError("evaluate_bounds: horizon >= 1");
  const double t = static_cast<double>(horizon);
  const double sqt = std::sqrt(t);
  const double logt = std::log(t + 1.0);
  RegretBounds out;
  switch (s.kind()) {
    case Schedule::Kind::SqrtHorizon: {
      if (c.alpha <= 0.0) throw ParameterError("evaluate_bounds: alpha > 0 required");
      out.r1 = c.lambda_max_b * c.dz * c.dz * sqt / 2.0 +
               std::sqrt(2.0) * c.gf * c.dx * sqt / std::sqrt(c.alpha);
      out.rc = c.lambda_max_b * c.dz * c.dz +
               2.0 * std::sqrt(2.0) * c.dx * c.gf / std::sqrt(c.alpha) +
               2.0 * c.f_floor * sqt;
      return out;
    }
    case Schedule::Kind::StronglyConvex: {
      if (c.beta1 <= 0.0 || c.beta2 <= 0.0 || c.alpha <= 0.0) {
        throw ParameterError("evaluate_bounds: beta1, beta2, alpha > 0 required");
      }
      out.r1 = c.gf * c.gf * logt / (2.0 * c.alpha * c.beta1) +
               c.beta2 * c.dz * c.dz / 2.0 + c.beta1 * c.dx * c.dx;
      out.rc = 2.0 * c.f_floor * c.lambda_max_b * logt / c.beta2 +
               c.lambda_max_b * c.dz * c.dz +
               2.0 * c.beta1 * c.lambda_max_b * c.dx * c.dx / c.beta2;
      return out;
    }
    case Schedule::Kind::EtaZeroSqrtHorizon: {
      if (c.lambda_min_a <= 0.0 || c.gf <= 0.0) {
        throw ParameterError("evaluate_bounds: lambda_min_A, G_f > 0 required");
      }
      out.r2 = c.gf * c.dz * std::sqrt(c.lambda_max_b / c.lambda_min_a) * sqt;
      out.rc = c.lambda_max_b * c.dz * c.dz +
               2.0 * c.f_floor * c.dz *
                   std::sqrt(c.lambda_min_a * c.lambda_max_b * t) / c.gf;
      return out;
    }
    case Schedule::Kind::EtaZeroStronglyConvex: {
      if (c.lambda_min_a <= 0.0 || c.beta2 <= 0.0) {
        throw ParameterError("evaluate_bounds: lambda_min_A, beta2 > 0 required");
      }
      out.r2 = c.gf * c.gf * c.lambda_max_b * logt /
                   (2.0 * c.lambda_min_a * c.beta2) +
               c.beta2 * c.dz * c.dz;
      out.rc = c.lambda_max_b * c.dz * c.dz +
               2.0 * c.f_floor * c.lambda_max_b * logt / c.beta2;
      return out;
    }
    default:
      throw ParameterError("evaluate_bounds: no regret theorem covers this schedule kind");
  }
}

double violation_sum_bound(const BoundConstants& c, const Schedule& s) {
  switch (s.kind()) {
    case Schedule::Kind::SqrtHorizon:
      return 4.0 * c.d * c.d;
    case Schedule::Kind::StronglyConvex:
    case Schedule::Kind::EtaZeroStronglyConvex: {
      if (c.beta2 <= 0.0) throw ParameterError("violation_sum_bound: beta2 > 0 required");
      const double lm = c.lambda_max_b;
      return 2.0 * std::numbers::pi * c.d * c.d * lm * lm /
             (3.0 * c.beta2 * c.beta2);
    }
    default:
      throw ParameterError("violation_sum_bound: schedule kind not covered");
  }
}

double eta_zero_rc_constant_bound(const BoundConstants& c) {
  if (c.beta2 <= 0.0 || c.lambda_min_a <= 0.0) {
    throw ParameterError("eta_zero_rc_constant_bound: beta2, lambda_min_A > 0 required");
  }
  const double lm = c.lambda_max_b;
  return std::numbers::pi * lm * lm / (3.0 * c.beta2 * c.beta2) *
         (c.d * c.d + c.gf * c.gf / c.lambda_min_a);
}

StochasticBounds stochastic_rate_bounds(const BoundConstants& c, long horizon) {
  if (horizon < 1) throw ParameterError("stochastic_rate_bounds: horizon >= 1");
  if (c.alpha <= 0.0) throw ParameterError("stochastic_rate_bounds: alpha > 0 required");
  const double t = static_cast<double>(horizon);
  const double sqt = std::sqrt(t);
  StochasticBounds b;
  b.objective_gap = c.lambda_max_b * c.dz * c.dz / (2.0 * sqt) +
                    std::sqrt(2.0) * c.gf * c.dx / (std::sqrt(c.alpha) * sqt);
  b.violation_sq = c.lambda_max_b * c.dz * c.dz / t +
                   2.0 * std::sqrt(2.0) * c.dx * c.gf / (std::sqrt(c.alpha) * t) +
                   2.0 * c.f_floor / sqt;
  return b;
}

void RegretLedger::record(const RoundRecord& r) {
  r1_ += r.r1_increment;
  rc_ += r.rc_increment;
  if (r.r2_increment) r2_ = r2_.value_or(0.0) + *r.r2_increment;
  log_.push_back(r);
}

double RegretLedger::recompute_rc() const {
  double total = 0.0;
  for (const RoundRecord& r : log_) total += r.rc_increment;
  return total;
}

RoundRecord make_round_record(const LossTerm& f, const Regularizer& g,
                              const ConstraintSpec& cs,
                              const IterateState& presented,
                              const IterateState& updated,
                              const std::optional<Vector>& xhat,
                              const RegretLedger& ledger, double rho,
                              double eta) {
  RoundRecord rec;
  rec.t = presented.round;
  rec.loss = f.value(presented.x);
  rec.g_value = g.value(presented.z);
  rec.violation_sq = cs.residual(presented.x, presented.z).squaredNorm();
  const double comparator_value =
      f.value(ledger.comparator_x()) + g.value(ledger.comparator_z());
  rec.r1_increment = rec.loss + rec.g_value - comparator_value;
  rec.rc_increment = cs.residual(updated.x, updated.z).squaredNorm() +
                     cs.apply_b(updated.z - presented.z).squaredNorm();
  if (xhat) rec.r2_increment = f.value(*xhat) + rec.g_value - comparator_value;
  rec.rho = rho;
  rec.eta = eta;
  return rec;
}

OnlineAdm::OnlineAdm(OnlineProblem problem, Schedule schedule,
                     XUpdateOptions opts)
    : problem_(std::move(problem)),
      schedule_(schedule),
      opts_(std::move(opts)) {
  reset();
}

const Matrix& OnlineAdm::ata() const {
  if (!ata_) ata_ = problem_.cs.a.transpose() * problem_.cs.a;
  return *ata_;
}

void OnlineAdm::reset() {
  state_ = IterateState::zeros(problem_.cs.x_dim(), problem_.cs.z_dim(),
                               problem_.cs.rows(), 1);
}

const Divergence& OnlineAdm::prime() const {
  return opts_.phi_prime ? *opts_.phi_prime : opts_.phi;
}

bool OnlineAdm::xhat_available() const {
  const ConstraintSpec& cs = problem_.cs;
  return cs.a.rows() == cs.a.cols() &&
         (cs.a_shape == ConstraintSpec::Shape::Identity ||
          cs.lambda_min_a > 0.0);
}

Vector OnlineAdm::xhat() const {
  const ConstraintSpec& cs = problem_.cs;
  if (!xhat_available()) {
    throw CapabilityError("xhat: A must be square and invertible");
  }
  if (cs.a_shape == ConstraintSpec::Shape::Identity) {
    return cs.c - cs.apply_b(state_.z);
  }
  if (!a_lu_) a_lu_.emplace(cs.a);
  const Vector rhs = cs.c - cs.apply_b(state_.z);
  Vector x = a_lu_->solve(rhs);
  x += a_lu_->solve(rhs - cs.a * x);  // one refinement step
  if ((cs.a * x - rhs).norm() > 1e-10 * (1.0 + cs.c.norm())) {
    throw InvariantError("xhat: residual above tolerance");
  }
  return x;
}

Vector xhat_solve(const ConstraintSpec& cs, const Eigen::Ref<const Vector>& z) {
  if (cs.a_shape == ConstraintSpec::Shape::Identity) return cs.c - cs.apply_b(z);
  if (cs.a.rows() != cs.a.cols() || cs.lambda_min_a <= 0.0) {
    throw CapabilityError("xhat_solve: A must be square and invertible");
  }
  Eigen::PartialPivLU<Matrix> lu(cs.a);
  const Vector rhs = cs.c - cs.apply_b(z);
  Vector x = lu.solve(rhs);
  x += lu.solve(rhs - cs.a * x);
  if ((cs.a * x - rhs).norm() > 1e-10 * (1.0 + cs.c.norm())) {
    throw InvariantError("xhat_solve: residual above tolerance");
  }
  return x;
}

Vector OnlineAdm::x_update(const LossTerm& f, const IterateState& s, double rho,
                           double eta) const {
  switch (opts_.mode) {
    case XUpdateMode::Exact:
      return exact_x(f, s, rho, eta);
    case XUpdateMode::LinearizedPenalty:
      return linearized_penalty_x(f, s, rho, eta);
    case XUpdateMode::LinearizedLoss:
      return linearized_loss_x(f, s, rho, eta);
    case XUpdateMode::MirrorDescent: {
      const ConstraintSpec& cs = problem_.cs;
      const Vector direction =
          f.subgradient(s.x) +
          cs.apply_at(s.y + rho * cs.residual(s.x, s.z));
      return mirror_descent_x(direction, s, eta);
    }
    case XUpdateMode::Comid:
      return comid_x(f, s, rho, eta);
  }
  throw ParameterError("x_update: unknown mode");
}

Vector OnlineAdm::exact_x(const LossTerm& f, const IterateState& s, double rho,
                          double eta) const {
  const ConstraintSpec& cs = problem_.cs;
  if (!f.has_quadratic_form()) {
    throw CapabilityError(
        "exact x-update needs a quadratic-form loss; use a linearized mode");
  }
  const auto gen = opts_.phi.generator();
  if (eta > 0.0 && gen == Divergence::Generator::Kl) {
    throw CapabilityError("exact x-update with kl divergence is unavailable");
  }
  const double w = f.quad_weight();
  const bool quad_phi = gen == Divergence::Generator::Quadratic;

  if (opts_.fast_paths && (eta == 0.0 || quad_phi)) {
    if (cs.a_shape == ConstraintSpec::Shape::Identity) {
      Vector rhs = -f.linear_coeff() - (s.y + rho * (cs.apply_b(s.z) - cs.c));
      if (eta > 0.0) rhs += eta * s.x;
      const double sigma = rho + eta;
      if (w == 0.0) return rhs / sigma;
      return sherman_morrison_solve(sigma, std::sqrt(w) * f.direction(), rhs);
    }
    if (cs.a_shape == ConstraintSpec::Shape::UpperBidiagonal && eta == 0.0) {
      const Vector rhs = -f.linear_coeff() -
                         bidiagonal_apply_t(s.y + rho * (cs.apply_b(s.z) - cs.c));
      const Vector qr = bidiagonal_gram_solve(rhs);
      if (w == 0.0) return qr / rho;
      const Vector a_scaled = std::sqrt(w) * f.direction();
      const Vector qa = bidiagonal_gram_solve(a_scaled);
      const double denom = rho + a_scaled.dot(qa);
      return (qr - qa * (a_scaled.dot(qr) / denom)) / rho;
    }
  }

  Matrix h = Matrix::Zero(cs.x_dim(), cs.x_dim());
  if (w != 0.0) h += w * (f.direction() * f.direction().transpose());
  const Matrix k = detail::x_system(h, ata(), rho, eta, opts_.phi);
  const Vector rhs =
      detail::x_rhs(f.linear_coeff(), cs, s.z, s.y, rho, eta, opts_.phi, s.x);
  return SpdSolver(k).solve(rhs);
}

Vector OnlineAdm::prox_gradient_x(const LossTerm& f, const Vector& drift,
                                  const IterateState& s, double eta) const {
  // argmin f(x) + <drift, x> + eta B_phi'(x, x_t)
  if (eta <= 0.0) {
    throw ParameterError("linearized-penalty update needs eta > 0");
  }
  const Divergence& dp = prime();
  if (f.has_quadratic_form()) {
    const double w = f.quad_weight();
    switch (dp.generator()) {
      case Divergence::Generator::Quadratic: {
        Vector rhs = -f.linear_coeff() - drift + eta * s.x;
        if (w == 0.0) return rhs / eta;
        return sherman_morrison_solve(eta, std::sqrt(w) * f.direction(), rhs);
      }
      case Divergence::Generator::Mahalanobis: {
        Matrix k = eta * dp.metric();
        if (w != 0.0) k += w * (f.direction() * f.direction().transpose());
        const Vector rhs = -f.linear_coeff() - drift + eta * (dp.metric() * s.x);
        return SpdSolver(k).solve(rhs);
      }
      case Divergence::Generator::Kl:
        throw CapabilityError("quadratic-form loss under kl divergence: use mirror descent");
    }
  }
  if (f.kind() == LossTerm::Kind::Hinge) {
    double tau = 1.0;
    if (dp.generator() == Divergence::Generator::Mahalanobis) {
      if (!is_scaled_identity(dp.metric(), &tau)) {
        throw CapabilityError("hinge prox needs a (scaled) quadratic divergence");
      }
    } else if (dp.generator() != Divergence::Generator::Quadratic) {
      throw CapabilityError("hinge prox needs a (scaled) quadratic divergence");
    }
    const double mu = eta * tau;
    return hinge_prox(f, s.x - drift / mu, mu);
  }
  throw CapabilityError("no closed form for this loss; use a linearized mode");
}

Vector OnlineAdm::linearized_penalty_x(const LossTerm& f, const IterateState& s,
                                       double rho, double eta) const {
  const ConstraintSpec& cs = problem_.cs;
  const Vector drift = cs.apply_at(s.y + rho * cs.residual(s.x, s.z));
  return prox_gradient_x(f, drift, s, eta);
}

Vector OnlineAdm::linearized_loss_x(const LossTerm& f, const IterateState& s,
                                    double rho, double eta) const {
  const ConstraintSpec& cs = problem_.cs;
  const Vector anchor_grad =
      opts_.anchor == LinearizationAnchor::PreviousX ? f.subgradient(s.x)
                                                     : f.subgradient(s.z);
  const auto gen = opts_.phi.generator();
  if (eta > 0.0 && gen == Divergence::Generator::Kl) {
    throw CapabilityError("linearized-loss update with kl divergence: use mirror descent");
  }
  const bool quad_phi = gen == Divergence::Generator::Quadratic;
  if (opts_.fast_paths && (eta == 0.0 || quad_phi) &&
      cs.a_shape == ConstraintSpec::Shape::Identity) {
    Vector rhs = -anchor_grad - (s.y + rho * (cs.apply_b(s.z) - cs.c));
    if (eta > 0.0) rhs += eta * s.x;
    return rhs / (rho + eta);
  }
  const Matrix zero_h = Matrix::Zero(cs.x_dim(), cs.x_dim());
  const Matrix k = detail::x_system(zero_h, ata(), rho, eta, opts_.phi);
  const Vector rhs =
      detail::x_rhs(anchor_grad, cs, s.z, s.y, rho, eta, opts_.phi, s.x);
  return SpdSolver(k).solve(rhs);
}

Vector OnlineAdm::mirror_descent_x(const Vector& direction,
                                   const IterateState& s, double eta) const {
  if (eta <= 0.0) throw ParameterError("mirror-descent update needs eta > 0");
  const Divergence& dp = prime();
  switch (dp.generator()) {
    case Divergence::Generator::Quadratic:
      return s.x - direction / eta;
    case Divergence::Generator::Mahalanobis: {
      if (!prime_metric_solver_) {
        prime_metric_solver_ = std::make_unique<SpdSolver>(dp.metric());
      }
      return s.x - prime_metric_solver_->solve(direction) / eta;
    }
    case Divergence::Generator::Kl: {
      // exponentiated gradient on the simplex
      Vector logits =
          (s.x.array().log() - direction.array() / eta).matrix();
      logits.array() -= logits.maxCoeff();
      Vector w = logits.array().exp().matrix();
      w /= w.sum();
      w = w.cwiseMax(1e-12);
      return w / w.sum();
    }
  }
  throw ParameterError("mirror_descent_x: unknown generator");
}

Vector OnlineAdm::comid_x(const LossTerm& f, const IterateState& s, double rho,
                          double eta) const {
  const ConstraintSpec& cs = problem_.cs;
  if (f.is_smooth()) {
    const Vector direction =
        f.subgradient(s.x) + cs.apply_at(s.y + rho * cs.residual(s.x, s.z));
    return mirror_descent_x(direction, s, eta);
  }
  // hinge: zero smooth part, the loss itself is kept in the subproblem
  const Vector drift = cs.apply_at(s.y + rho * cs.residual(s.x, s.z));
  return prox_gradient_x(f, drift, s, eta);
}

OnlineAdm::StepRecord OnlineAdm::step(const LossTerm& f_t) {
  const ConstraintSpec& cs = problem_.cs;
  StepRecord out;
  const long t_next = state_.round + 1;
  out.rho = schedule_.rho(t_next);
  out.eta = schedule_.eta(t_next);

  Vector x_new = x_update(f_t, state_, out.rho, out.eta);
  out.residuals.r_cross = cs.residual(x_new, state_.z).squaredNorm();

  const SpdSolver* cached = nullptr;
  if (detail::z_update_needs_solver(cs, problem_.g)) {
    if (!z_solver_ || z_solver_rho_ != out.rho) {
      z_solver_ =
          std::make_unique<SpdSolver>(detail::z_system(cs, problem_.g, out.rho));
      z_solver_rho_ = out.rho;
    }
    cached = z_solver_.get();
  }
  Vector z_new = detail::z_update(cs, problem_.g, x_new, state_.y, out.rho, cached);

  const Vector res = cs.residual(x_new, z_new);
  Vector y_new = state_.y + out.rho * res;
  out.residuals.r_full =
      res.squaredNorm() + cs.apply_b(z_new - state_.z).squaredNorm();

  state_.x = std::move(x_new);
  state_.z = std::move(z_new);
  state_.y = std::move(y_new);
  state_.round = t_next;
  return out;
}

int stochastic_step(OnlineAdm& solver, const Dataset& data, Rng& rng) {
  if (data.size() == 0) throw ParameterError("stochastic_step: empty dataset");
  const int i = static_cast<int>(rng.uniform_int(data.size()));
  solver.step(data.loss(i));
  return i;
}

ProjectionFreeAdm::ProjectionFreeAdm(Matrix a_eq, Vector a_rhs, Matrix b_in,
                                     Vector b_rhs, Config config)
    : a_eq_(std::move(a_eq)),
      a_rhs_(std::move(a_rhs)),
      b_in_(std::move(b_in)),
      b_rhs_(std::move(b_rhs)),
      config_(config) {
  if (config_.rho_u <= 0.0 || config_.rho_v <= 0.0 || config_.eta < 0.0) {
    throw ParameterError("projection-free: rho_u, rho_v > 0 and eta >= 0");
  }
  if (a_eq_.rows() != a_rhs_.size() || b_in_.rows() != b_rhs_.size() ||
      a_eq_.cols() != b_in_.cols()) {
    throw DimensionError("projection-free: inconsistent dimensions");
  }
  const Eigen::Index n = a_eq_.cols();
  base_ = config_.rho_u * (a_eq_.transpose() * a_eq_) +
          config_.rho_v * (b_in_.transpose() * b_in_);
  base_.diagonal().array() += config_.eta;
  base_solver_ = std::make_unique<SpdSolver>(base_);
  state_.x = Vector::Zero(n);
  state_.z = Vector::Zero(b_in_.rows());
  state_.u = Vector::Zero(a_eq_.rows());
  state_.v = Vector::Zero(b_in_.rows());
  state_.round = 1;
}

void ProjectionFreeAdm::step(const LossTerm& f_t) {
  const bool quad = f_t.has_quadratic_form();
  // non-quadratic losses are linearized at x_t
  const Vector q = quad ? f_t.linear_coeff() : f_t.subgradient(state_.x);
  const double w = quad ? f_t.quad_weight() : 0.0;
  Vector rhs = -q - a_eq_.transpose() * state_.u - b_in_.transpose() * state_.v +
               config_.rho_u * (a_eq_.transpose() * a_rhs_) +
               config_.rho_v * (b_in_.transpose() * state_.z);
  if (config_.eta > 0.0) rhs += config_.eta * state_.x;

  Vector x_new;
  if (w == 0.0) {
    x_new = base_solver_->solve(rhs);
  } else {
    Matrix k = base_ + w * (f_t.direction() * f_t.direction().transpose());
    x_new = SpdSolver(k).solve(rhs);
  }

  const Vector bx = b_in_ * x_new;
  Vector z_new = (bx + state_.v / config_.rho_v).cwiseMin(b_rhs_);
  state_.u += config_.rho_u * (a_eq_ * x_new - a_rhs_);
  state_.v += config_.rho_v * (bx - z_new);
  state_.x = std::move(x_new);
  state_.z = std::move(z_new);
  state_.round += 1;
}

double ProjectionFreeAdm::equality_violation_sq() const {
  return (a_eq_ * state_.x - a_rhs_).squaredNorm();
}

double ProjectionFreeAdm::slack_violation_sq() const {
  return (b_in_ * state_.x - state_.z).squaredNorm();
}

Vector ProjectionFreeAdm::inequality_gap() const {
  return b_in_ * state_.x - b_rhs_;
}

}  // namespace adm
