#include "adm/batch.hpp"

#include <ostream>

namespace adm {

QuadraticObjective QuadraticObjective::zero(Eigen::Index n) {
  return QuadraticObjective{Matrix::Zero(n, n), Vector::Zero(n), 0.0};
}

QuadraticObjective QuadraticObjective::least_squares(
    const Eigen::Ref<const Matrix>& m, const Eigen::Ref<const Vector>& b,
    double scale) {
  if (m.rows() != b.size()) throw DimensionError("least_squares: size mismatch");
  QuadraticObjective f;
  f.h = 2.0 * scale * (m.transpose() * m);
  f.q = -2.0 * scale * (m.transpose() * b);
  f.f0 = scale * b.squaredNorm();
  return f;
}

QuadraticObjective QuadraticObjective::from_terms(
    const std::vector<LossTerm>& terms, double scale) {
  if (terms.empty()) throw ParameterError("from_terms: no terms");
  const Eigen::Index n = terms.front().dim();
  QuadraticObjective f = zero(n);
  for (const LossTerm& term : terms) {
    if (!term.has_quadratic_form()) {
      throw CapabilityError("from_terms: loss term has no quadratic form");
    }
    const Vector& a = term.direction();
    if (term.quad_weight() != 0.0) {
      f.h += (scale * term.quad_weight()) * (a * a.transpose());
    }
    f.q += scale * term.linear_coeff();
    f.f0 += scale * term.constant_term();
  }
  return f;
}

namespace detail {

Matrix x_system(const Matrix& h, const Matrix& ata, double rho, double eta,
                const Divergence& phi) {
  Matrix k = h + rho * ata;
  if (eta > 0.0) {
    switch (phi.generator()) {
      case Divergence::Generator::Quadratic:
        k.diagonal().array() += eta;
        break;
      case Divergence::Generator::Mahalanobis:
        k += eta * phi.metric();
        break;
      case Divergence::Generator::Kl:
        throw CapabilityError("x-update: kl divergence has no linear system");
    }
  }
  return k;
}

Vector x_rhs(const Vector& q, const ConstraintSpec& cs,
             const Eigen::Ref<const Vector>& z,
             const Eigen::Ref<const Vector>& y, double rho, double eta,
             const Divergence& phi, const Eigen::Ref<const Vector>& x_prev) {
  Vector rhs = -q - cs.apply_at(y + rho * (cs.apply_b(z) - cs.c));
  if (eta > 0.0) {
    switch (phi.generator()) {
      case Divergence::Generator::Quadratic:
        rhs += eta * x_prev;
        break;
      case Divergence::Generator::Mahalanobis:
        rhs += eta * (phi.metric() * x_prev);
        break;
      case Divergence::Generator::Kl:
        throw CapabilityError("x-update: kl divergence has no linear system");
    }
  }
  return rhs;
}

bool z_update_needs_solver(const ConstraintSpec& cs, const Regularizer& g) {
  const bool prox_shape = cs.b_shape == ConstraintSpec::Shape::Identity ||
                          cs.b_shape == ConstraintSpec::Shape::NegIdentity;
  if (prox_shape) return false;
  return g.kind() == Regularizer::Kind::Zero ||
         g.kind() == Regularizer::Kind::SquaredL2;
}

Matrix z_system(const ConstraintSpec& cs, const Regularizer& g, double rho) {
  Matrix k = rho * (cs.b.transpose() * cs.b);
  k.diagonal().array() += g.strong_convexity();
  return k;
}

Vector z_update(const ConstraintSpec& cs, const Regularizer& g,
                const Eigen::Ref<const Vector>& x_new,
                const Eigen::Ref<const Vector>& y, double rho,
                const SpdSolver* cached_gram) {
  switch (cs.b_shape) {
    case ConstraintSpec::Shape::NegIdentity:
      return g.prox(cs.apply_a(x_new) - cs.c + y / rho, rho);
    case ConstraintSpec::Shape::Identity:
      return g.prox(-(cs.apply_a(x_new) - cs.c + y / rho), rho);
    default:
      break;
  }
  if (g.kind() == Regularizer::Kind::Zero ||
      g.kind() == Regularizer::Kind::SquaredL2) {
    const Vector rhs = -cs.apply_bt(y + rho * (cs.apply_a(x_new) - cs.c));
    if (cached_gram) return cached_gram->solve(rhs);
    return SpdSolver(z_system(cs, g, rho)).solve(rhs);
  }
  throw CapabilityError(
      "z-update: need B = +-I for a prox step, or a zero/squared_l2 "
      "regularizer for a linear solve");
}

}  // namespace detail

BatchAdm::BatchAdm(BatchProblem problem, double rho)
    : problem_(std::move(problem)), rho_(rho) {
  if (rho_ <= 0.0) throw ParameterError("batch adm: rho <= 0");
  if (problem_.f.dim() != problem_.cs.x_dim()) {
    throw DimensionError("batch adm: f dimension disagrees with A");
  }
  const Matrix ata = problem_.cs.a.transpose() * problem_.cs.a;
  const Divergence none = Divergence::quadratic();
  x_solver_ = std::make_unique<SpdSolver>(
      detail::x_system(problem_.f.h, ata, rho_, 0.0, none));
  if (detail::z_update_needs_solver(problem_.cs, problem_.g)) {
    z_solver_ = std::make_unique<SpdSolver>(
        detail::z_system(problem_.cs, problem_.g, rho_));
  }
}

std::pair<IterateState, ResidualRecord> BatchAdm::step(
    const IterateState& s) const {
  const ConstraintSpec& cs = problem_.cs;
  IterateState next;
  next.x = x_solver_->solve(detail::x_rhs(problem_.f.q, cs, s.z, s.y, rho_, 0.0,
                                          Divergence::quadratic(), s.x));
  ResidualRecord rr;
  rr.r_cross = cs.residual(next.x, s.z).squaredNorm();
  next.z = detail::z_update(cs, problem_.g, next.x, s.y, rho_, z_solver_.get());
  const Vector res = cs.residual(next.x, next.z);
  next.y = s.y + rho_ * res;
  next.round = s.round + 1;
  rr.r_full = res.squaredNorm() + cs.apply_b(next.z - s.z).squaredNorm();
  return {std::move(next), rr};
}

std::pair<Vector, Vector> BatchAdm::subgradient_certificates(
    const IterateState& prev, const IterateState& next) const {
  const ConstraintSpec& cs = problem_.cs;
  Vector f_cert =
      -cs.apply_at(next.y + rho_ * (cs.apply_b(prev.z) - cs.apply_b(next.z)));
  Vector g_cert = -cs.apply_bt(next.y);
  return {std::move(f_cert), std::move(g_cert)};
}

BatchAdm::Trajectory BatchAdm::run(long rounds) const {
  if (rounds < 1) throw ParameterError("batch adm: rounds >= 1");
  Trajectory traj;
  traj.states.reserve(rounds + 1);
  traj.states.push_back(initial_state());
  Vector xsum = Vector::Zero(problem_.cs.x_dim());
  Vector zsum = Vector::Zero(problem_.cs.z_dim());
  for (long t = 0; t < rounds; ++t) {
    auto [next, rr] = step(traj.states.back());
    xsum += next.x;
    zsum += next.z;
    traj.objectives.push_back(problem_.objective(next.x, next.z));
    traj.residuals.push_back(rr);
    traj.states.push_back(std::move(next));
  }
  traj.xbar = xsum / static_cast<double>(rounds);
  traj.zbar = zsum / static_cast<double>(rounds);
  return traj;
}

double vi_gap(const ViPoint& wt, const ViPoint& w, const BatchProblem& p) {
  const ConstraintSpec& cs = p.cs;
  const double h_diff = p.objective(wt.x, wt.z) - p.objective(w.x, w.z);
  // <wt - w, F(wt)> with F(w) = (A^T y, B^T y, -(Ax + Bz - c))
  const double coupling = (wt.x - w.x).dot(cs.a.transpose() * wt.y) +
                          (wt.z - w.z).dot(cs.b.transpose() * wt.y) -
                          (wt.y - w.y).dot(cs.residual(wt.x, wt.z));
  return h_diff + coupling;
}

void write_trajectory_csv(std::ostream& os, const BatchAdm::Trajectory& traj) {
  os << "t,objective,r_cross,r_full,y_norm\n";
  for (std::size_t i = 0; i < traj.residuals.size(); ++i) {
    os << (i + 1) << ',' << format_double(traj.objectives[i]) << ','
       << format_double(traj.residuals[i].r_cross) << ','
       << format_double(traj.residuals[i].r_full) << ','
       << format_double(traj.states[i + 1].y.norm()) << '\n';
  }
}

}  // namespace adm
