#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>

#include "adm/dense.hpp"
#include "adm/errors.hpp"

namespace adm {

// The linear coupling A x + B z = c with cached spectral bounds.
// lambda_max_b / lambda_max_a are the largest eigenvalues of B^T B and A^T A;
// lambda_min_a is the smallest eigenvalue of A A^T when A is square (0
// otherwise, meaning "not available").
struct ConstraintSpec {
  enum class Shape { General, Identity, NegIdentity, UpperBidiagonal };

  Matrix a;
  Matrix b;
  Vector c;
  double lambda_max_b = 0.0;
  double lambda_max_a = 0.0;
  double lambda_min_a = 0.0;
  Shape a_shape = Shape::General;
  Shape b_shape = Shape::General;

  static ConstraintSpec make(Matrix a, Matrix b, Vector c);

  Eigen::Index rows() const { return c.size(); }
  Eigen::Index x_dim() const { return a.cols(); }
  Eigen::Index z_dim() const { return b.cols(); }

  // Shape-dispatched products; identity/bidiagonal couplings stay O(n),
  // bit-identical to the dense products they replace.
  Vector apply_a(const Eigen::Ref<const Vector>& x) const;
  Vector apply_b(const Eigen::Ref<const Vector>& z) const;
  Vector apply_at(const Eigen::Ref<const Vector>& v) const;
  Vector apply_bt(const Eigen::Ref<const Vector>& v) const;

  Vector residual(const Eigen::Ref<const Vector>& x,
                  const Eigen::Ref<const Vector>& z) const {
    return apply_a(x) + apply_b(z) - c;
  }
};

ConstraintSpec::Shape detect_shape(const Eigen::Ref<const Matrix>& m);

// One round's loss term f_t.
class LossTerm {
 public:
  enum class Kind { Squared, Hinge, Logistic, Linear };

  // (a.x - b)^2
  static LossTerm squared(Vector a, double b);
  // max(0, 1 - label * a.x), label in {-1, +1}
  static LossTerm hinge(Vector a, int label);
  // log(1 + exp(-label * a.x))
  static LossTerm logistic(Vector a, int label);
  // g.x
  static LossTerm linear(Vector g);

  Kind kind() const { return kind_; }
  Eigen::Index dim() const { return a_.size(); }
  const Vector& direction() const { return a_; }
  double target() const { return b_; }
  int label() const { return label_; }

  double value(const Eigen::Ref<const Vector>& x) const;
  Vector subgradient(const Eigen::Ref<const Vector>& x) const;

  // Quadratic structure, when present: f(x) = 1/2 x^T H x + q^T x + f0 with
  // H = weight * a a^T. Squared and linear terms qualify.
  bool has_quadratic_form() const {
    return kind_ == Kind::Squared || kind_ == Kind::Linear;
  }
  double quad_weight() const { return kind_ == Kind::Squared ? 2.0 : 0.0; }
  Vector linear_coeff() const;
  double constant_term() const { return kind_ == Kind::Squared ? b_ * b_ : 0.0; }

  // Smooth/nonsmooth split used by COMID-type updates: hinge is the
  // nonsmooth part with zero smooth part, everything else is smooth.
  bool is_smooth() const { return kind_ != Kind::Hinge; }

 private:
  LossTerm(Kind k, Vector a, double b, int label)
      : kind_(k), a_(std::move(a)), b_(b), label_(label) {}

  Kind kind_;
  Vector a_;
  double b_ = 0.0;
  int label_ = 0;
};

class Regularizer {
 public:
  enum class Kind { Zero, L1, SquaredL2, Box, Simplex };

  Regularizer() : Regularizer(Kind::Zero) {}

  static Regularizer zero();
  static Regularizer l1(double lambda);
  static Regularizer squared_l2(double lambda);  // lambda * ||z||^2
  static Regularizer box(Vector upper);          // indicator of z <= upper
  static Regularizer simplex();                  // indicator of the unit simplex

  Kind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  const Vector& upper_bound() const { return upper_; }
  bool is_indicator() const {
    return kind_ == Kind::Box || kind_ == Kind::Simplex;
  }
  // Strong-convexity modulus in ||.||_2^2 / 2 units (2*lambda for squared_l2).
  double strong_convexity() const {
    return kind_ == Kind::SquaredL2 ? 2.0 * lambda_ : 0.0;
  }

  // +infinity off the feasible set for indicator kinds.
  double value(const Eigen::Ref<const Vector>& z) const;

  // argmin_z g(z) + rho/2 ||z - w||^2
  Vector prox(const Eigen::Ref<const Vector>& w, double rho) const;

 private:
  explicit Regularizer(Kind k, double lambda = 0.0)
      : kind_(k), lambda_(lambda) {}

  Kind kind_;
  double lambda_;
  Vector upper_;
};

Vector project_simplex(const Eigen::Ref<const Vector>& v);

// Seeded regression stream: rows of `features` are the per-round directions
// a_t, `targets` the per-round scalars b_t.
struct Dataset {
  Matrix features;  // N x n, unit-norm columns
  Vector targets;   // N
  Vector x0;        // planted signal
  std::uint64_t seed = 0;
  int nnz = 0;
  double noise_sigma = 0.0;

  int size() const { return static_cast<int>(features.rows()); }
  int dim() const { return static_cast<int>(features.cols()); }
  LossTerm loss(int i) const {
    return LossTerm::squared(features.row(i).transpose(), targets[i]);
  }

  void serialize(std::ostream& os) const;
  static Dataset parse(std::istream& is);
};

// Standard-normal design, columns normalized to unit 2-norm; x0 with exactly
// k nonzeros placed uniformly without replacement; b = A x0 / N + noise.
Dataset gen_lasso_stream(std::uint64_t seed, int n_examples, int dim, int k,
                         double noise_sigma);

// Piecewise-constant signal: ones, then num_blocks random contiguous blocks
// reset to a uniform value from [1, 10].
Vector gen_tv_signal(std::uint64_t seed, int dim, int num_blocks);

// As in the experiment grid: lambda = q * ||A^T b||_inf / N.
double lambda_from_fraction(double q, const Dataset& data);

// Subgradient bound G_f for squared losses over the ball ||x||_2 <= radius.
double estimate_subgradient_bound(const Dataset& data, double radius = 10.0);

}  // namespace adm
