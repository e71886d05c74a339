#pragma once

#include <cstdint>
#include <random>

#include "kcoh/types.hpp"

namespace kcoh {

/// Seedable generator used by every randomized routine in the library:
/// std::mt19937_64 with a fixed Box-Muller mapping for normal deviates,
/// so seeded runs reproduce across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }
  /// Uniform in (0, 1].
  double uniform01();
  double normal();
  /// Independent standard normal real and imaginary parts.
  Complex complex_normal();

 private:
  std::mt19937_64 gen_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

struct EigResult {
  Spectrum values;        // sorted descending
  UnitaryMatrix vectors;  // columns follow values
};

/// Cyclic Jacobi diagonalization of a Hermitian matrix. Sweeps are capped at
/// 100; the off-diagonal Frobenius threshold is 1e-13 * ||A||_F. Throws
/// ConvergenceError instead of returning a partial result.
EigResult eig_hermitian(const HermitianMatrix& a);

/// Frobenius-nearest positive semidefinite matrix: clamp negative
/// eigenvalues to zero and reassemble.
HermitianMatrix nearest_psd(const HermitianMatrix& a);

HermitianMatrix principal_submatrix(const HermitianMatrix& a, const IndexSubset& subset);

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the
/// R-diagonal phase correction. Deterministic for a given seed.
UnitaryMatrix haar_unitary(Index n, std::uint64_t seed);
UnitaryMatrix haar_unitary(Index n, Rng& rng);

/// Hermitian circulant with eigenvalue multiset `lambda`. The first row is
/// c_m = (1/n) sum_j lambda_j w^{jm} with w = exp(2*pi*i/n); entry (a,b) is
/// c_{(b-a) mod n}, and lambda_j sits at DFT frequency j in input order.
HermitianMatrix circulant_from_spectrum(const Spectrum& lambda);

namespace detail {
/// Jacobi core on a raw matrix, shared with the small-block paths.
/// Returns eigenvalues (descending) and the matching eigenvector columns.
std::pair<RVector, CMatrix> jacobi_eig(CMatrix a);
}  // namespace detail

}  // namespace kcoh
