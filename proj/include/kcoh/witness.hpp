#pragma once

#include <vector>

#include "kcoh/linalg.hpp"
#include "kcoh/sympoly.hpp"
#include "kcoh/types.hpp"

namespace kcoh {

/// Result of the k-local PSD membership scan over all C(n,k) principal
/// submatrices. neg_eig_count counts eigenvalues of the full matrix below
/// -tol; members have at most n-k of them.
struct WitnessReport {
  bool is_member;
  IndexSubset worst_subset;
  double worst_min_eig;
  int neg_eig_count;
};

/// One outer step of the alternating construction:
/// dist_before = ||X_j - Y_{j-1}||_F, dist_after = ||X_j - Y_j||_F.
struct IterationRecord {
  double dist_before;
  double dist_after;
};

struct ConstructionResult {
  HermitianMatrix matrix;
  double residual;
  int iterations;
  bool converged;
  std::vector<IterationRecord> history;
};

struct VandermondeWitness {
  HermitianMatrix matrix;
  double c;
};

/// All k-subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<Index>> all_subsets(Index n, Index k);

WitnessReport is_k_locally_psd(const HermitianMatrix& x, Index k, double tol = 1e-8);

/// Frobenius projection onto I_{k,n}^o, the intersection of the block-PSD
/// constraint sets, via Dykstra's cyclic corrections. The projection onto a
/// single constraint replaces the J-block with its nearest PSD part. Stops
/// when a full cycle moves the iterate by at most `tol` and the iterate is
/// feasible within 10*tol, or at max_cycles (converged=false, result still
/// returned).
ConstructionResult project_onto_Ik_dual(const HermitianMatrix& y, Index k, double tol = 1e-10,
                                        int max_cycles = 2000);

/// Vandermonde-projector witness: orthonormalize the first n-k columns of the
/// Vandermonde matrix on `nodes`, form the projector P, maximize <v|P|v>
/// over k-sparse unit vectors exactly (block eigenvalue scan, giving d) and
/// return X = I - (1/d) P together with c = 1/d. X is k-locally PSD with
/// exactly n-k negative eigenvalues when d < 1. For k = n the span is empty
/// and (I, 0) is returned.
VandermondeWitness construct_vandermonde_witness(Index n, Index k, const RVector& nodes);

/// Circulant witness for k = n-1: requires lambda in C_{n-1}, returns
/// circulant_from_spectrum(lambda) after asserting the spectrum round-trip
/// and PSD-ness of every (n-1) x (n-1) principal submatrix.
HermitianMatrix construct_circulant_witness(const Spectrum& lambda);

/// Frobenius-nearest matrix with spectrum `lambda`: reuse the eigenbasis of
/// x and sort lambda into the same order (Hoffman-Wielandt equality case).
HermitianMatrix isospectral_projection(const HermitianMatrix& x, const Spectrum& lambda);

/// Alternating construction of a k-locally PSD matrix with prescribed
/// spectrum: bounce between the isospectral manifold and I_{k,n}^o starting
/// from a Haar-rotated diagonal. Stops when successive residuals stall
/// within stall_tol or at max_iters; converged means the final residual is
/// at most residual_target. Non-convergence is data, not an error.
ConstructionResult construct_with_spectrum(const Spectrum& lambda, Index k, std::uint64_t seed,
                                           double stall_tol = 1e-9, int max_iters = 5000,
                                           double residual_target = 1e-6);

namespace detail {
/// Nearest PSD part of a small Hermitian block; closed form for k <= 2.
CMatrix nearest_psd_block(const CMatrix& block);
/// Smallest eigenvalue of a Hermitian block; closed form for k <= 2.
double min_eig_block(const CMatrix& block);
}  // namespace detail

}  // namespace kcoh
