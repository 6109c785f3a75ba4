#include "qwnet/types.hpp"

#include <cmath>

namespace qwnet {

ParseError::ParseError(const std::string& message, int line, int column)
    : ValidationError("line " + std::to_string(line) + ", column " +
                      std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      detail_(message) {}

double unitarity_defect(const CMatrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  const CMatrix g = u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols());
  return g.cwiseAbs().maxCoeff();
}

bool all_finite(const CMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

}  // namespace qwnet
