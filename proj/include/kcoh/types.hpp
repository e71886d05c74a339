#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kcoh {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad input or a violated precondition. The CLI maps these to exit code 2.
struct ValidationError : Error {
  using Error::Error;
};

/// An iteration hit its cap without meeting its tolerance.
struct ConvergenceError : Error {
  using Error::Error;
};

class HermitianMatrix;
HermitianMatrix hermitian_unchecked(CMatrix m);

/// Dense n x n complex Hermitian matrix. Construction rejects inputs whose
/// conjugate-transpose asymmetry exceeds `tol` (relative to the largest
/// entry magnitude) and then symmetrizes exactly, so the stored matrix
/// always satisfies m == m.adjoint().
class HermitianMatrix {
 public:
  explicit HermitianMatrix(CMatrix entries, double tol = 1e-12);

  static HermitianMatrix Identity(Index n);
  static HermitianMatrix Zero(Index n);

  Index dim() const { return m_.rows(); }
  const CMatrix& mat() const { return m_; }
  double trace() const { return m_.trace().real(); }
  double frobenius_norm() const { return m_.norm(); }

 private:
  struct Unchecked {};
  HermitianMatrix(Unchecked, CMatrix m) : m_(std::move(m)) {}
  friend HermitianMatrix hermitian_unchecked(CMatrix m);

  CMatrix m_;
};

/// Real eigenvalue vector. Entries must be finite.
class Spectrum {
 public:
  explicit Spectrum(RVector values);
  Spectrum(std::initializer_list<double> values);

  Index size() const { return v_.size(); }
  const RVector& values() const { return v_; }
  double operator[](Index i) const { return v_[i]; }
  RVector sorted_descending() const;
  double sum() const { return v_.sum(); }
  double max() const { return v_.maxCoeff(); }
  double min() const { return v_.minCoeff(); }

 private:
  RVector v_;
};

/// n x n unitary, validated via ||U U* - I||_F <= tol at construction.
class UnitaryMatrix {
 public:
  explicit UnitaryMatrix(CMatrix entries, double tol = 1e-10);

  static UnitaryMatrix Identity(Index n);

  Index dim() const { return m_.rows(); }
  const CMatrix& mat() const { return m_; }

 private:
  struct Unchecked {};
  UnitaryMatrix(Unchecked, CMatrix m) : m_(std::move(m)) {}
  friend UnitaryMatrix unitary_unchecked(CMatrix m);

  CMatrix m_;
};

UnitaryMatrix unitary_unchecked(CMatrix m);

/// Strictly increasing index set inside [0, n).
class IndexSubset {
 public:
  IndexSubset(std::vector<Index> indices, Index n);

  Index cardinality() const { return static_cast<Index>(indices_.size()); }
  const std::vector<Index>& indices() const { return indices_; }

 private:
  std::vector<Index> indices_;
};

}  // namespace kcoh
