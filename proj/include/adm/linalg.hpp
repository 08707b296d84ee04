#pragma once

#include <Eigen/Cholesky>

#include "adm/dense.hpp"
#include "adm/errors.hpp"

namespace adm {

// Elementwise shrink toward zero by kappa: the proximal map of kappa*|.|_1.
template <typename Derived>
VectorX<typename Derived::Scalar> soft_threshold(
    const Eigen::MatrixBase<Derived>& v, typename Derived::Scalar kappa) {
  using Scalar = typename Derived::Scalar;
  if (kappa < Scalar(0)) throw ParameterError("soft_threshold: kappa < 0");
  return ((v.array() - kappa).max(Scalar(0)) -
          ((-v).array() - kappa).max(Scalar(0)))
      .matrix();
}

struct PowerIterationOptions {
  double tol = 1e-10;         // relative change of the eigenvalue estimate
  int max_iters = 10000;
  std::uint64_t seed = 0x5eedULL;  // start vector seed
};

// Largest eigenvalue of m^T m by power iteration on x -> m^T(m x).
double spectral_bound(const Eigen::Ref<const Matrix>& m,
                      const PowerIterationOptions& opts = {});

// Smallest eigenvalue of an SPD matrix by inverse power iteration.
double smallest_eigenvalue_spd(const Eigen::Ref<const Matrix>& p,
                               const PowerIterationOptions& opts = {});

// Cholesky solve of h x = b for symmetric positive definite h.
// Symmetry is checked to 1e-12 relative; indefiniteness surfaces as a
// FactorizationError from the decomposition.
Vector solve_spd(const Eigen::Ref<const Matrix>& h,
                 const Eigen::Ref<const Vector>& b);

// Cached Cholesky factorization of a fixed SPD matrix.
class SpdSolver {
 public:
  explicit SpdSolver(const Eigen::Ref<const Matrix>& h);
  Vector solve(const Eigen::Ref<const Vector>& b) const;
  Eigen::Index size() const { return llt_.matrixL().rows(); }

 private:
  Eigen::LLT<Matrix> llt_;
};

// Solves (sigma I + a a^T) x = v in O(n) flops.
Vector sherman_morrison_solve(double sigma, const Eigen::Ref<const Vector>& a,
                              const Eigen::Ref<const Vector>& v);

// The n x n upper bidiagonal matrix with diagonal 1 and off-diagonal -1.
Matrix bidiagonal_matrix(Eigen::Index n);
Vector bidiagonal_apply(const Eigen::Ref<const Vector>& x);    // D x
Vector bidiagonal_apply_t(const Eigen::Ref<const Vector>& x);  // D^T x
Vector bidiagonal_solve(const Eigen::Ref<const Vector>& v);    // D x = v
Vector bidiagonal_solve_t(const Eigen::Ref<const Vector>& v);  // D^T x = v

// (D^T D)^{-1} v by a forward sweep against D^T and a backward sweep
// against D, O(n) flops.
Vector bidiagonal_gram_solve(const Eigen::Ref<const Vector>& v);

}  // namespace adm
