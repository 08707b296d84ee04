#include "adm/linalg.hpp"

#include <cmath>

#include "adm/rng.hpp"

namespace adm {

namespace {

Vector random_unit_vector(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
  const double norm = v.norm();
  if (norm == 0.0) return Vector::Unit(n, 0);
  return v / norm;
}

void require_symmetric(const Eigen::Ref<const Matrix>& h) {
  if (h.rows() != h.cols()) throw DimensionError("solve_spd: matrix not square");
  const double scale = 1.0 + h.cwiseAbs().maxCoeff();
  if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw FactorizationError("solve_spd: matrix not symmetric");
  }
}

}  // namespace

double spectral_bound(const Eigen::Ref<const Matrix>& m,
                      const PowerIterationOptions& opts) {
  if (m.size() == 0) throw ParameterError("spectral_bound: empty matrix");
  Vector v = random_unit_vector(m.cols(), opts.seed);
  double estimate = 0.0;
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    const Vector u = m * v;
    const double next = u.squaredNorm();  // Rayleigh quotient, ||v|| = 1
    const Vector w = m.transpose() * u;
    const double wnorm = w.norm();
    if (wnorm == 0.0) return 0.0;  // v in the null space: m^T m v = 0
    const bool converged = std::abs(next - estimate) <=
                           opts.tol * std::max(next, 1e-300);
    estimate = next;
    if (converged) return estimate;
    v = w / wnorm;
  }
  throw ConvergenceError("spectral_bound: power iteration hit the cap",
                         estimate);
}

double smallest_eigenvalue_spd(const Eigen::Ref<const Matrix>& p,
                               const PowerIterationOptions& opts) {
  if (p.size() == 0) throw ParameterError("smallest_eigenvalue_spd: empty matrix");
  require_symmetric(p);
  Eigen::LLT<Matrix> llt(p);
  if (llt.info() != Eigen::Success) {
    throw FactorizationError("smallest_eigenvalue_spd: matrix not positive definite");
  }
  Vector v = random_unit_vector(p.rows(), opts.seed);
  double inverse_estimate = 0.0;
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    const Vector w = llt.solve(v);
    const double next = v.dot(w);  // Rayleigh quotient of p^{-1}
    const double wnorm = w.norm();
    if (wnorm == 0.0) break;
    const bool converged = std::abs(next - inverse_estimate) <=
                           opts.tol * std::max(next, 1e-300);
    inverse_estimate = next;
    if (converged) return 1.0 / inverse_estimate;
    v = w / wnorm;
  }
  if (inverse_estimate > 0.0) {
    throw ConvergenceError("smallest_eigenvalue_spd: inverse iteration hit the cap",
                           1.0 / inverse_estimate);
  }
  throw ConvergenceError("smallest_eigenvalue_spd: inverse iteration stalled", 0.0);
}

Vector solve_spd(const Eigen::Ref<const Matrix>& h,
                 const Eigen::Ref<const Vector>& b) {
  SpdSolver solver(h);
  return solver.solve(b);
}

SpdSolver::SpdSolver(const Eigen::Ref<const Matrix>& h) {
  require_symmetric(h);
  llt_.compute(h);
  if (llt_.info() != Eigen::Success) {
    throw FactorizationError("solve_spd: Cholesky failed, matrix not positive definite");
  }
}

Vector SpdSolver::solve(const Eigen::Ref<const Vector>& b) const {
  if (b.size() != size()) throw DimensionError("solve_spd: rhs size mismatch");
  return llt_.solve(b);
}

Vector sherman_morrison_solve(double sigma, const Eigen::Ref<const Vector>& a,
                              const Eigen::Ref<const Vector>& v) {
  if (sigma <= 0.0) throw ParameterError("sherman_morrison_solve: sigma <= 0");
  if (a.size() != v.size()) {
    throw DimensionError("sherman_morrison_solve: size mismatch");
  }
  const double denom = sigma + a.squaredNorm();
  return (v - a * (a.dot(v) / denom)) / sigma;
}

Matrix bidiagonal_matrix(Eigen::Index n) {
  Matrix d = Matrix::Identity(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) d(i, i + 1) = -1.0;
  return d;
}

Vector bidiagonal_apply(const Eigen::Ref<const Vector>& x) {
  const Eigen::Index n = x.size();
  Vector y(n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) y[i] = x[i] - x[i + 1];
  y[n - 1] = x[n - 1];
  return y;
}

Vector bidiagonal_apply_t(const Eigen::Ref<const Vector>& x) {
  const Eigen::Index n = x.size();
  Vector y(n);
  y[0] = x[0];
  for (Eigen::Index i = 1; i < n; ++i) y[i] = x[i] - x[i - 1];
  return y;
}

Vector bidiagonal_solve(const Eigen::Ref<const Vector>& v) {
  const Eigen::Index n = v.size();
  Vector x(n);
  x[n - 1] = v[n - 1];
  for (Eigen::Index i = n - 2; i >= 0; --i) x[i] = v[i] + x[i + 1];
  return x;
}

Vector bidiagonal_solve_t(const Eigen::Ref<const Vector>& v) {
  const Eigen::Index n = v.size();
  Vector x(n);
  x[0] = v[0];
  for (Eigen::Index i = 1; i < n; ++i) x[i] = v[i] + x[i - 1];
  return x;
}

Vector bidiagonal_gram_solve(const Eigen::Ref<const Vector>& v) {
  const Eigen::Index n = v.size();
  if (n == 0) throw ParameterError("bidiagonal_gram_solve: empty vector");
  // D^T w = v: D^T is lower bidiagonal with unit diagonal, so forward
  // substitution; then D x = w by backward substitution.
  Vector w(n);
  w[0] = v[0];
  for (Eigen::Index i = 1; i < n; ++i) w[i] = v[i] + w[i - 1];
  Vector x(n);
  x[n - 1] = w[n - 1];
  for (Eigen::Index i = n - 2; i >= 0; --i) x[i] = w[i] + x[i + 1];
  return x;
}

}  // namespace adm
