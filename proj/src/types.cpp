#include "covsel/types.hpp"

#include <algorithm>

namespace covsel {

SymMatrix::SymMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw InvalidInput("matrix must be square");
  }
  if (m_.size() == 0) {
    return;
  }
  if (!m_.allFinite()) {
    throw InvalidInput("matrix entries must be finite");
  }
  const double scale = m_.cwiseAbs().maxCoeff();
  const double asym = (m_ - m_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-6 * scale) {
    throw InvalidInput("matrix asymmetry exceeds 1e-6 * max|S|");
  }
  m_ = (0.5 * (m_ + m_.transpose())).eval();
}

}  // namespace covsel
