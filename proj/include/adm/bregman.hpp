#pragma once

#include <optional>

#include "adm/dense.hpp"
#include "adm/errors.hpp"

namespace adm {

// Bregman divergence B_phi(x, y) = phi(x) - phi(y) - <grad phi(y), x - y> for
// a strictly convex generator phi. Three generators are supported:
//   quadratic:    phi = 1/2 ||x||^2,        B = 1/2 ||x - y||^2
//   mahalanobis:  phi = 1/2 x^T P x, P SPD, B = 1/2 (x-y)^T P (x-y)
//   kl:           phi = sum x_i log x_i on the positive simplex
// alpha is the strong-convexity modulus of phi with respect to the p-norm
// carried alongside (quadratic/mahalanobis: p = 2; kl: p = 1 by Pinsker).
class Divergence {
 public:
  enum class Generator { Quadratic, Mahalanobis, Kl };

  static Divergence quadratic();
  static Divergence mahalanobis(Matrix p);
  static Divergence kl();

  Generator generator() const { return generator_; }
  double alpha() const { return alpha_; }
  int norm_order() const { return norm_order_; }
  const Matrix& metric() const { return metric_; }

  double value(const Eigen::Ref<const Vector>& x,
               const Eigen::Ref<const Vector>& y) const;
  Vector grad(const Eigen::Ref<const Vector>& x) const;

  // <grad phi(next) - grad phi(cur), next - star>
  //   + B(star, cur) - B(star, next) - B(next, cur);
  // identically zero in exact arithmetic.
  double three_point_residual(const Eigen::Ref<const Vector>& star,
                              const Eigen::Ref<const Vector>& cur,
                              const Eigen::Ref<const Vector>& next) const;

 private:
  Divergence(Generator g, double alpha, int norm_order)
      : generator_(g), alpha_(alpha), norm_order_(norm_order) {}

  void check_domain(const Eigen::Ref<const Vector>& x) const;

  Generator generator_;
  double alpha_;
  int norm_order_;
  Matrix metric_;  // mahalanobis only
};

// Penalty-linearized divergence pair: prime is the B_phi' used in the
// linearized x-update, effective = prime - (rho/2 eta)||A(x - x_t)||^2 is the
// divergence the plain update would have used. Construction enforces
// lambda_min(P') >= rho * lambda_max_A / eta + alpha_required, so effective is
// itself a valid alpha_required-strongly-convex divergence.
struct CompositeDivergence {
  Divergence effective;
  Divergence prime;
};

CompositeDivergence make_penalty_linearized(const Divergence& prime, double rho,
                                            double eta, const Matrix& ata,
                                            double lambda_max_a,
                                            double alpha_required);

}  // namespace adm
