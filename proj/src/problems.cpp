#include "adm/problems.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "adm/linalg.hpp"
#include "adm/rng.hpp"

#include <nlohmann/json.hpp>

namespace adm {

ConstraintSpec::Shape detect_shape(const Eigen::Ref<const Matrix>& m) {
  if (m.rows() != m.cols()) return ConstraintSpec::Shape::General;
  const Eigen::Index n = m.rows();
  if (m == Matrix::Identity(n, n)) return ConstraintSpec::Shape::Identity;
  if (m == Matrix(-Matrix::Identity(n, n))) return ConstraintSpec::Shape::NegIdentity;
  if (m == bidiagonal_matrix(n)) return ConstraintSpec::Shape::UpperBidiagonal;
  return ConstraintSpec::Shape::General;
}

namespace {

// Power/inverse iteration driven by O(n) sweeps for the bidiagonal shape, so
// large TV couplings avoid dense n^3 work.
double bidiagonal_lambda_max(Eigen::Index n) {
  Rng rng(0x5eed);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
  v /= v.norm();
  double estimate = 0.0;
  for (int iter = 0; iter < 10000; ++iter) {
    const Vector u = bidiagonal_apply(v);
    const double next = u.squaredNorm();
    Vector w = bidiagonal_apply_t(u);
    const double wnorm = w.norm();
    if (wnorm == 0.0) return 0.0;
    const bool converged = std::abs(next - estimate) <= 1e-10 * next;
    estimate = next;
    if (converged) return estimate;
    v = w / wnorm;
  }
  return estimate;
}

double bidiagonal_lambda_min_aat(Eigen::Index n) {
  Rng rng(0x5eed);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
  v /= v.norm();
  double inverse_estimate = 0.0;
  for (int iter = 0; iter < 10000; ++iter) {
    // (D D^T)^{-1} v: solve D u = v then D^T w = u
    const Vector w = bidiagonal_solve_t(bidiagonal_solve(v));
    const double next = v.dot(w);
    const double wnorm = w.norm();
    if (wnorm == 0.0) break;
    const bool converged = std::abs(next - inverse_estimate) <= 1e-10 * next;
    inverse_estimate = next;
    if (converged) break;
    v = w / wnorm;
  }
  return inverse_estimate > 0.0 ? 1.0 / inverse_estimate : 0.0;
}

}  // namespace

ConstraintSpec ConstraintSpec::make(Matrix a, Matrix b, Vector c) {
  require_finite(a, "constraint A");
  require_finite(b, "constraint B");
  require_finite(c, "constraint c");
  if (a.rows() != b.rows() || a.rows() != c.size()) {
    throw DimensionError("constraint: row counts of A, B, c disagree");
  }
  ConstraintSpec cs;
  cs.a_shape = detect_shape(a);
  cs.b_shape = detect_shape(b);

  auto bounds_for = [](Shape shape, const Matrix& m, double* lmax,
                       double* lmin_aat) {
    switch (shape) {
      case Shape::Identity:
      case Shape::NegIdentity:
        *lmax = 1.0;
        *lmin_aat = 1.0;
        return;
      case Shape::UpperBidiagonal:
        *lmax = bidiagonal_lambda_max(m.rows());
        *lmin_aat = bidiagonal_lambda_min_aat(m.rows());
        return;
      case Shape::General:
        *lmax = spectral_bound(m);
        *lmin_aat = 0.0;
        if (m.rows() == m.cols()) {
          const Matrix aat = m * m.transpose();
          try {
            *lmin_aat = smallest_eigenvalue_spd(aat);
          } catch (const FactorizationError&) {
            *lmin_aat = 0.0;  // singular
          }
        }
        return;
    }
  };
  double unused = 0.0;
  bounds_for(cs.a_shape, a, &cs.lambda_max_a, &cs.lambda_min_a);
  bounds_for(cs.b_shape, b, &cs.lambda_max_b, &unused);

  cs.a = std::move(a);
  cs.b = std::move(b);
  cs.c = std::move(c);
  return cs;
}

Vector ConstraintSpec::apply_a(const Eigen::Ref<const Vector>& x) const {
  switch (a_shape) {
    case Shape::Identity:
      return x;
    case Shape::NegIdentity:
      return -x;
    case Shape::UpperBidiagonal:
      return bidiagonal_apply(x);
    case Shape::General:
      return a * x;
  }
  return a * x;
}

Vector ConstraintSpec::apply_b(const Eigen::Ref<const Vector>& z) const {
  switch (b_shape) {
    case Shape::Identity:
      return z;
    case Shape::NegIdentity:
      return -z;
    case Shape::UpperBidiagonal:
      return bidiagonal_apply(z);
    case Shape::General:
      return b * z;
  }
  return b * z;
}

Vector ConstraintSpec::apply_at(const Eigen::Ref<const Vector>& v) const {
  switch (a_shape) {
    case Shape::Identity:
      return v;
    case Shape::NegIdentity:
      return -v;
    case Shape::UpperBidiagonal:
      return bidiagonal_apply_t(v);
    case Shape::General:
      return a.transpose() * v;
  }
  return a.transpose() * v;
}

Vector ConstraintSpec::apply_bt(const Eigen::Ref<const Vector>& v) const {
  switch (b_shape) {
    case Shape::Identity:
      return v;
    case Shape::NegIdentity:
      return -v;
    case Shape::UpperBidiagonal:
      return bidiagonal_apply_t(v);
    case Shape::General:
      return b.transpose() * v;
  }
  return b.transpose() * v;
}

LossTerm LossTerm::squared(Vector a, double b) {
  require_finite(a, "squared loss direction");
  return LossTerm(Kind::Squared, std::move(a), b, 0);
}

LossTerm LossTerm::hinge(Vector a, int label) {
  require_finite(a, "hinge direction");
  if (label != 1 && label != -1) throw ParameterError("hinge: label must be +-1");
  return LossTerm(Kind::Hinge, std::move(a), 0.0, label);
}

LossTerm LossTerm::logistic(Vector a, int label) {
  require_finite(a, "logistic direction");
  if (label != 1 && label != -1) throw ParameterError("logistic: label must be +-1");
  return LossTerm(Kind::Logistic, std::move(a), 0.0, label);
}

LossTerm LossTerm::linear(Vector g) {
  require_finite(g, "linear loss gradient");
  return LossTerm(Kind::Linear, std::move(g), 0.0, 0);
}

double LossTerm::value(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != a_.size()) throw DimensionError("loss value: size mismatch");
  switch (kind_) {
    case Kind::Squared: {
      const double r = a_.dot(x) - b_;
      return r * r;
    }
    case Kind::Hinge:
      return std::max(0.0, 1.0 - label_ * a_.dot(x));
    case Kind::Logistic: {
      const double u = label_ * a_.dot(x);
      // log(1 + exp(-u)) without overflow
      return u > 0.0 ? std::log1p(std::exp(-u)) : -u + std::log1p(std::exp(u));
    }
    case Kind::Linear:
      return a_.dot(x);
  }
  return 0.0;
}

Vector LossTerm::subgradient(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != a_.size()) throw DimensionError("loss subgradient: size mismatch");
  switch (kind_) {
    case Kind::Squared:
      return 2.0 * (a_.dot(x) - b_) * a_;
    case Kind::Hinge: {
      const double margin = label_ * a_.dot(x);
      if (margin > 1.0) return Vector::Zero(a_.size());
      return -static_cast<double>(label_) * a_;
    }
    case Kind::Logistic: {
      const double u = label_ * a_.dot(x);
      const double sigma = 1.0 / (1.0 + std::exp(u));
      return -static_cast<double>(label_) * sigma * a_;
    }
    case Kind::Linear:
      return a_;
  }
  return Vector::Zero(a_.size());
}

Vector LossTerm::linear_coeff() const {
  switch (kind_) {
    case Kind::Squared:
      return -2.0 * b_ * a_;
    case Kind::Linear:
      return a_;
    default:
      throw CapabilityError("loss term has no quadratic form");
  }
}

Regularizer Regularizer::zero() { return Regularizer(Kind::Zero); }

Regularizer Regularizer::l1(double lambda) {
  if (lambda < 0.0) throw ParameterError("l1: lambda < 0");
  return Regularizer(Kind::L1, lambda);
}

Regularizer Regularizer::squared_l2(double lambda) {
  if (lambda < 0.0) throw ParameterError("squared_l2: lambda < 0");
  return Regularizer(Kind::SquaredL2, lambda);
}

Regularizer Regularizer::box(Vector upper) {
  require_finite(upper, "box bound");
  Regularizer g(Kind::Box);
  g.upper_ = std::move(upper);
  return g;
}

Regularizer Regularizer::simplex() { return Regularizer(Kind::Simplex); }

double Regularizer::value(const Eigen::Ref<const Vector>& z) const {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr double kFeasTol = 1e-9;
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::L1:
      return lambda_ * z.lpNorm<1>();
    case Kind::SquaredL2:
      return lambda_ * z.squaredNorm();
    case Kind::Box:
      if (z.size() != upper_.size()) throw DimensionError("box value: size mismatch");
      return ((z - upper_).maxCoeff() > kFeasTol) ? kInf : 0.0;
    case Kind::Simplex: {
      if (z.minCoeff() < -kFeasTol) return kInf;
      return std::abs(z.sum() - 1.0) > kFeasTol ? kInf : 0.0;
    }
  }
  return 0.0;
}

Vector Regularizer::prox(const Eigen::Ref<const Vector>& w, double rho) const {
  if (rho <= 0.0) throw ParameterError("prox: rho <= 0");
  switch (kind_) {
    case Kind::Zero:
      return w;
    case Kind::L1:
      return soft_threshold(w, lambda_ / rho);
    case Kind::SquaredL2:
      return rho * w / (rho + 2.0 * lambda_);
    case Kind::Box:
      if (w.size() != upper_.size()) throw DimensionError("box prox: size mismatch");
      return w.cwiseMin(upper_);
    case Kind::Simplex:
      return project_simplex(w);
  }
  return w;
}

Vector project_simplex(const Eigen::Ref<const Vector>& v) {
  // Sort-based Euclidean projection onto {z >= 0, sum z = 1}.
  const Eigen::Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double running = 0.0;
  double tau = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    running += u[i];
    const double candidate = (running - 1.0) / static_cast<double>(i + 1);
    if (u[i] - candidate > 0.0) tau = candidate;
  }
  return (v.array() - tau).max(0.0).matrix();
}

Dataset gen_lasso_stream(std::uint64_t seed, int n_examples, int dim, int k,
                         double noise_sigma) {
  if (n_examples < 1 || dim < 1) throw ParameterError("gen_lasso_stream: N, n >= 1");
  if (k > dim) throw ParameterError("gen_lasso_stream: k > n");
  if (k < 0) throw ParameterError("gen_lasso_stream: k < 0");
  if (noise_sigma < 0.0) throw ParameterError("gen_lasso_stream: noise_sigma < 0");

  Rng rng(seed);
  Dataset data;
  data.seed = seed;
  data.nnz = k;
  data.noise_sigma = noise_sigma;

  data.features.resize(n_examples, dim);
  for (int i = 0; i < n_examples; ++i) {
    for (int j = 0; j < dim; ++j) data.features(i, j) = rng.normal();
  }
  for (int j = 0; j < dim; ++j) {
    const double norm = data.features.col(j).norm();
    if (norm > 0.0) data.features.col(j) /= norm;
  }

  data.x0 = Vector::Zero(dim);
  for (int idx : rng.sample_without_replacement(dim, k)) {
    data.x0[idx] = rng.normal();
  }

  data.targets = data.features * data.x0 / static_cast<double>(n_examples);
  if (noise_sigma > 0.0) {
    for (int i = 0; i < n_examples; ++i) {
      data.targets[i] += noise_sigma * rng.normal();
    }
  }
  return data;
}

Vector gen_tv_signal(std::uint64_t seed, int dim, int num_blocks) {
  if (dim < 1) throw ParameterError("gen_tv_signal: n >= 1");
  if (num_blocks < 0) throw ParameterError("gen_tv_signal: num_blocks < 0");
  Rng rng(seed);
  Vector x = Vector::Ones(dim);
  const int max_len = std::max(1, dim / std::max(1, num_blocks + 1));
  for (int b = 0; b < num_blocks; ++b) {
    const int len = 1 + static_cast<int>(rng.uniform_int(max_len));
    const int start = static_cast<int>(rng.uniform_int(dim - len + 1));
    const double level = rng.uniform(1.0, 10.0);
    x.segment(start, len).setConstant(level);
  }
  return x;
}

double lambda_from_fraction(double q, const Dataset& data) {
  if (q < 0.0) throw ParameterError("lambda_from_fraction: q < 0");
  const Vector atb = data.features.transpose() * data.targets;
  return q * atb.cwiseAbs().maxCoeff() / static_cast<double>(data.size());
}

double estimate_subgradient_bound(const Dataset& data, double radius) {
  // |grad f_t| = 2 ||a_t|| |a_t.x - b_t| <= 2 ||a_t|| (||a_t|| radius + |b_t|)
  double gf = 0.0;
  for (int i = 0; i < data.size(); ++i) {
    const double an = data.features.row(i).norm();
    gf = std::max(gf, 2.0 * an * (an * radius + std::abs(data.targets[i])));
  }
  return gf;
}

void Dataset::serialize(std::ostream& os) const {
  nlohmann::json header;
  header["seed"] = seed;
  header["N"] = size();
  header["n"] = dim();
  header["k"] = nnz;
  header["noise_sigma"] = noise_sigma;
  os << header.dump() << '\n';
  write_matrix(os, features);
  write_vector(os, targets);
  write_vector(os, x0);
}

Dataset Dataset::parse(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ParameterError("dataset: missing header");
  const auto header = nlohmann::json::parse(line);
  Dataset data;
  data.seed = header.at("seed").get<std::uint64_t>();
  data.nnz = header.at("k").get<int>();
  data.noise_sigma = header.at("noise_sigma").get<double>();
  data.features = read_matrix(is);
  data.targets = read_vector(is);
  data.x0 = read_vector(is);
  if (data.features.rows() != header.at("N").get<int>() ||
      data.features.cols() != header.at("n").get<int>()) {
    throw ParameterError("dataset: header disagrees with matrix block");
  }
  return data;
}

}  // namespace adm
