#include "adm/dense.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace adm {

void require_finite(const Eigen::Ref<const Matrix>& m, const std::string& what) {
  if (!m.allFinite()) {
    throw ParameterError(what + ": non-finite entry");
  }
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_matrix(std::ostream& os, const Eigen::Ref<const Matrix>& m) {
  os << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

Matrix read_matrix(std::istream& is) {
  Eigen::Index rows = 0, cols = 0;
  if (!(is >> rows >> cols) || rows <= 0 || cols <= 0) {
    throw ParameterError("read_matrix: bad header");
  }
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (!(is >> m(i, j))) {
        throw ParameterError("read_matrix: truncated body");
      }
    }
  }
  require_finite(m, "read_matrix");
  return m;
}

void write_vector(std::ostream& os, const Eigen::Ref<const Vector>& v) {
  write_matrix(os, v);
}

Vector read_vector(std::istream& is) {
  Matrix m = read_matrix(is);
  if (m.cols() != 1) {
    throw ParameterError("read_vector: expected a single column");
  }
  return m.col(0);
}

}  // namespace adm
