#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>

#include "adm/errors.hpp"

namespace adm {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

void require_finite(const Eigen::Ref<const Matrix>& m, const std::string& what);

// Text format: first line "rows cols", then one whitespace-separated row per
// line. Values are written with 17 significant digits so a write/read
// round-trip reproduces the doubles exactly.
void write_matrix(std::ostream& os, const Eigen::Ref<const Matrix>& m);
Matrix read_matrix(std::istream& is);

// Vectors are stored as single-column matrices.
void write_vector(std::ostream& os, const Eigen::Ref<const Vector>& v);
Vector read_vector(std::istream& is);

std::string format_double(double value);  // %.17g

}  // namespace adm
