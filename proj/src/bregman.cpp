#include "adm/bregman.hpp"

#include <cmath>

#include "adm/linalg.hpp"

namespace adm {

namespace {
constexpr double kKlFloor = 1e-12;
constexpr double kSimplexTol = 1e-9;
}  // namespace

Divergence Divergence::quadratic() {
  return Divergence(Generator::Quadratic, 1.0, 2);
}

Divergence Divergence::mahalanobis(Matrix p) {
  require_finite(p, "mahalanobis metric");
  const double alpha = smallest_eigenvalue_spd(p);  // also rejects non-SPD p
  Divergence d(Generator::Mahalanobis, alpha, 2);
  d.metric_ = std::move(p);
  return d;
}

Divergence Divergence::kl() { return Divergence(Generator::Kl, 1.0, 1); }

void Divergence::check_domain(const Eigen::Ref<const Vector>& x) const {
  if (generator_ != Generator::Kl) return;
  if (x.minCoeff() < kKlFloor) {
    throw DomainError("kl divergence: entry below positive floor");
  }
  if (std::abs(x.sum() - 1.0) > kSimplexTol) {
    throw DomainError("kl divergence: point not on the simplex");
  }
}

double Divergence::value(const Eigen::Ref<const Vector>& x,
                         const Eigen::Ref<const Vector>& y) const {
  if (x.size() != y.size()) throw DimensionError("divergence: size mismatch");
  switch (generator_) {
    case Generator::Quadratic:
      return 0.5 * (x - y).squaredNorm();
    case Generator::Mahalanobis: {
      const Vector d = x - y;
      return 0.5 * d.dot(metric_ * d);
    }
    case Generator::Kl: {
      check_domain(x);
      check_domain(y);
      double sum = 0.0;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        sum += x[i] * std::log(x[i] / y[i]);
      }
      return sum;
    }
  }
  return 0.0;
}

Vector Divergence::grad(const Eigen::Ref<const Vector>& x) const {
  switch (generator_) {
    case Generator::Quadratic:
      return x;
    case Generator::Mahalanobis:
      return metric_ * x;
    case Generator::Kl: {
      check_domain(x);
      return (x.array().log() + 1.0).matrix();
    }
  }
  return x;
}

double Divergence::three_point_residual(
    const Eigen::Ref<const Vector>& star, const Eigen::Ref<const Vector>& cur,
    const Eigen::Ref<const Vector>& next) const {
  const Vector dg = grad(next) - grad(cur);
  return dg.dot(next - star) + value(star, cur) - value(star, next) -
         value(next, cur);
}

CompositeDivergence make_penalty_linearized(const Divergence& prime, double rho,
                                            double eta, const Matrix& ata,
                                            double lambda_max_a,
                                            double alpha_required) {
  if (rho <= 0.0 || eta <= 0.0) {
    throw ParameterError("make_penalty_linearized: rho and eta must be positive");
  }
  if (prime.generator() == Divergence::Generator::Kl) {
    throw CapabilityError(
        "make_penalty_linearized: kl generator has no quadratic split");
  }
  // B_phi' >= (rho lambda_max_A / eta + alpha) / 2 * ||x - x_t||^2
  const double needed = rho * lambda_max_a / eta + alpha_required;
  if (prime.alpha() + 1e-12 < needed) {
    throw ParameterError(
        "make_penalty_linearized: prime divergence not strongly convex enough");
  }
  const Eigen::Index n = ata.rows();
  Matrix p_prime = prime.generator() == Divergence::Generator::Mahalanobis
                       ? prime.metric()
                       : Matrix::Identity(n, n);
  Matrix p = p_prime - (rho / eta) * ata;
  return CompositeDivergence{Divergence::mahalanobis(std::move(p)), prime};
}

}  // namespace adm
