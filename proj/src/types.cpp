#include "kcoh/types.hpp"

#include <cmath>

namespace kcoh {

HermitianMatrix::HermitianMatrix(CMatrix entries, double tol) : m_(std::move(entries)) {
  if (m_.rows() < 1 || m_.rows() != m_.cols()) {
    throw ValidationError("HermitianMatrix: expected a square matrix with n >= 1");
  }
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  const double asym = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
  if (asym > tol * scale) {
    throw ValidationError("HermitianMatrix: conjugate-symmetry violated by " +
                          std::to_string(asym) + " (tolerance " + std::to_string(tol * scale) +
                          ")");
  }
  m_ = ((m_ + m_.adjoint()) / 2.0).eval();
}

HermitianMatrix HermitianMatrix::Identity(Index n) {
  return hermitian_unchecked(CMatrix::Identity(n, n));
}

HermitianMatrix HermitianMatrix::Zero(Index n) {
  return hermitian_unchecked(CMatrix::Zero(n, n));
}

HermitianMatrix hermitian_unchecked(CMatrix m) {
  m = ((m + m.adjoint()) / 2.0).eval();
  return HermitianMatrix(HermitianMatrix::Unchecked{}, std::move(m));
}

Spectrum::Spectrum(RVector values) : v_(std::move(values)) {
  if (v_.size() < 1) {
    throw ValidationError("Spectrum: expected n >= 1 entries");
  }
  if (!v_.allFinite()) {
    throw ValidationError("Spectrum: entries must be finite");
  }
}

Spectrum::Spectrum(std::initializer_list<double> values)
    : Spectrum(Eigen::Map<const RVector>(values.begin(), static_cast<Index>(values.size()))) {}

RVector Spectrum::sorted_descending() const {
  RVector s = v_;
  std::sort(s.data(), s.data() + s.size(), std::greater<double>());
  return s;
}

UnitaryMatrix::UnitaryMatrix(CMatrix entries, double tol) : m_(std::move(entries)) {
  if (m_.rows() < 1 || m_.rows() != m_.cols()) {
    throw ValidationError("UnitaryMatrix: expected a square matrix with n >= 1");
  }
  const Index n = m_.rows();
  const double err = (m_ * m_.adjoint() - CMatrix::Identity(n, n)).norm();
  if (err > tol) {
    throw ValidationError("UnitaryMatrix: ||U U* - I||_F = " + std::to_string(err) +
                          " exceeds tolerance");
  }
}

UnitaryMatrix UnitaryMatrix::Identity(Index n) {
  return unitary_unchecked(CMatrix::Identity(n, n));
}

UnitaryMatrix unitary_unchecked(CMatrix m) {
  return UnitaryMatrix(UnitaryMatrix::Unchecked{}, std::move(m));
}

IndexSubset::IndexSubset(std::vector<Index> indices, Index n) : indices_(std::move(indices)) {
  if (indices_.empty() || static_cast<Index>(indices_.size()) > n) {
    throw ValidationError("IndexSubset: cardinality must satisfy 1 <= k <= n");
  }
  for (size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i] < 0 || indices_[i] >= n) {
      throw ValidationError("IndexSubset: index out of range");
    }
    if (i > 0 && indices_[i] <= indices_[i - 1]) {
      throw ValidationError("IndexSubset: indices must be strictly increasing");
    }
  }
}

}  // namespace kcoh
