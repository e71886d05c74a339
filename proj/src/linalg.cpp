#include "kcoh/linalg.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace kcoh {

double Rng::uniform01() {
  // 53 random bits mapped into (0, 1]; never returns 0 so log() is safe.
  const std::uint64_t bits = gen_() >> 11;
  return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(angle);
  has_cached_ = true;
  return r * std::cos(angle);
}

Complex Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re, im};
}

namespace detail {

namespace {

double offdiag_norm(const CMatrix& a) {
  double s = 0.0;
  const Index n = a.rows();
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      s += 2.0 * std::norm(a(i, j));
    }
  }
  return std::sqrt(s);
}

}  // namespace

std::pair<RVector, CMatrix> jacobi_eig(CMatrix a) {
  const Index n = a.rows();
  CMatrix v = CMatrix::Identity(n, n);
  const double anorm = a.norm();
  const double thresh = 1e-13 * anorm;
  constexpr int kMaxSweeps = 100;

  bool converged = offdiag_norm(a) <= thresh;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double r = std::abs(a(p, q));
        if (r == 0.0) continue;
        // Factor out the pivot phase, then apply a real Jacobi rotation.
        const Complex phase = a(p, q) / r;
        const double alpha = a(p, p).real();
        const double beta = a(q, q).real();
        const double tau = (beta - alpha) / (2.0 * r);
        const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                      : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const Complex sph = s * phase;
        const Complex sphc = std::conj(sph);
        const Complex cph = c * phase;
        const Complex cphc = std::conj(cph);

        // A <- G* A G with G touching columns p and q only:
        // G(p,p)=c, G(p,q)=s, G(q,p)=-s*conj(phase), G(q,q)=c*conj(phase).
        const CVector colp = a.col(p);
        const CVector colq = a.col(q);
        a.col(p) = c * colp - sphc * colq;
        a.col(q) = s * colp + cphc * colq;
        const Eigen::RowVectorXcd rowp = a.row(p);
        const Eigen::RowVectorXcd rowq = a.row(q);
        a.row(p) = c * rowp - sph * rowq;
        a.row(q) = s * rowp + cph * rowq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = Complex(a(p, p).real(), 0.0);
        a(q, q) = Complex(a(q, q).real(), 0.0);

        const CVector vp = v.col(p);
        const CVector vq = v.col(q);
        v.col(p) = c * vp - sphc * vq;
        v.col(q) = s * vp + cphc * vq;
      }
    }
    converged = offdiag_norm(a) <= thresh;
  }
  if (!converged) {
    throw ConvergenceError("eig_hermitian: Jacobi did not converge within 100 sweeps");
  }

  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return a(i, i).real() > a(j, j).real(); });

  RVector values(n);
  CMatrix vectors(n, n);
  for (Index i = 0; i < n; ++i) {
    values[i] = a(order[static_cast<size_t>(i)], order[static_cast<size_t>(i)]).real();
    vectors.col(i) = v.col(order[static_cast<size_t>(i)]);
  }
  return {std::move(values), std::move(vectors)};
}

}  // namespace detail

EigResult eig_hermitian(const HermitianMatrix& a) {
  auto [values, vectors] = detail::jacobi_eig(a.mat());
  return {Spectrum(std::move(values)), unitary_unchecked(std::move(vectors))};
}

HermitianMatrix nearest_psd(const HermitianMatrix& a) {
  auto [values, vectors] = detail::jacobi_eig(a.mat());
  const RVector clamped = values.cwiseMax(0.0);
  return hermitian_unchecked(vectors * clamped.asDiagonal() * vectors.adjoint());
}

HermitianMatrix principal_submatrix(const HermitianMatrix& a, const IndexSubset& subset) {
  const auto& idx = subset.indices();
  for (Index i : idx) {
    if (i >= a.dim()) {
      throw ValidationError("principal_submatrix: index out of range");
    }
  }
  const Index k = subset.cardinality();
  CMatrix out(k, k);
  for (Index r = 0; r < k; ++r) {
    for (Index c = 0; c < k; ++c) {
      out(r, c) = a.mat()(idx[static_cast<size_t>(r)], idx[static_cast<size_t>(c)]);
    }
  }
  return hermitian_unchecked(std::move(out));
}

UnitaryMatrix haar_unitary(Index n, Rng& rng) {
  if (n < 1) {
    throw ValidationError("haar_unitary: n must be >= 1");
  }
  CMatrix g(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      g(i, j) = rng.complex_normal();
    }
  }
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    q.col(j) *= (mag > 0.0) ? d / mag : Complex(1.0, 0.0);
  }
  return unitary_unchecked(std::move(q));
}

UnitaryMatrix haar_unitary(Index n, std::uint64_t seed) {
  Rng rng(seed);
  return haar_unitary(n, rng);
}

HermitianMatrix circulant_from_spectrum(const Spectrum& lambda) {
  const Index n = lambda.size();
  CVector first_row(n);
  for (Index m = 0; m < n; ++m) {
    Complex c = 0.0;
    for (Index j = 0; j < n; ++j) {
      const double angle =
          2.0 * std::numbers::pi * static_cast<double>(j) * static_cast<double>(m) /
          static_cast<double>(n);
      c += lambda[j] * Complex(std::cos(angle), std::sin(angle));
    }
    first_row[m] = c / static_cast<double>(n);
  }
  CMatrix x(n, n);
  for (Index a = 0; a < n; ++a) {
    for (Index b = 0; b < n; ++b) {
      x(a, b) = first_row[((b - a) % n + n) % n];
    }
  }
  return HermitianMatrix(std::move(x));
}

}  // namespace kcoh
