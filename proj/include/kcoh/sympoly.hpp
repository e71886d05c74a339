#pragma once

#include <optional>
#include <string>

#include "kcoh/linalg.hpp"
#include "kcoh/types.hpp"

namespace kcoh {

enum class ConeStatus { Inside, Outside, Boundary };

const char* to_string(ConeStatus s);

/// Outcome of a cone membership test. `margin` is the minimal slack among
/// the defining inequalities (scaled where the test documents it); the
/// verdict is Boundary exactly when |margin| <= the tolerance in force.
/// `violator` carries the cone element certifying an Outside verdict from
/// the dual falsifier.
struct ConeVerdict {
  ConeStatus status;
  double margin;
  std::string criterion;
  std::optional<RVector> violator;

  /// Inside or Boundary, the weak membership used by preconditions.
  bool passes() const { return status != ConeStatus::Outside; }
};

/// All elementary symmetric polynomials of `lambda`: returns s with
/// s[0] = 1 and s[j] = S_j(lambda), computed by the one-pass convolution
/// recurrence (exact for modest integer inputs).
RVector elem_sym_all(const Spectrum& lambda);

double binomial(Index n, Index k);

/// Membership of `lambda` in C_k = { S_j >= 0 for all j <= k }. Slacks are
/// scaled by C(n,j) * max|lambda_i|^j so the tolerance is dimensionless.
ConeVerdict in_Ck(const Spectrum& lambda, Index k, double tol = 1e-9);

/// Drops the last entry of a vector in C_k; the result lies in C_{k-1}
/// (checked). Throws ValidationError when the precondition fails.
Spectrum speyer_reduce(const Spectrum& lambda, Index k);

/// Closed-form membership in the dual cone C_2^o: Inside iff
/// sum(lambda) >= sqrt(n-1) * ||lambda|| and lambda >= 0 entrywise.
ConeVerdict in_C2_dual(const Spectrum& lambda, double tol = 1e-9);

/// One-sided falsifier for membership in C_k^o. Samples `samples` unit
/// vectors mu in C_k (Gaussian rejection plus deterministic extreme
/// candidates) and minimizes the permuted pairing with `lambda`; only an
/// Outside verdict is conclusive. The returned margin and stored violator
/// use the raw opposite-sorted dot product.
ConeVerdict in_Ck_dual_falsify(const Spectrum& lambda, Index k, int samples, std::uint64_t seed,
                               double tol = 1e-9);

/// Coefficients in t (descending powers) of P^(k)(x + t*1), the k-th
/// directional derivative of x_1...x_n along the all-ones direction:
/// coefficient of t^{n-k-j} is c_{n-k-j} * S_j(x) with c_i = (i+k)!/i!.
RVector directional_derivative_coeffs(const Spectrum& x, Index k);

/// min over permutations pi of sum_j a_j b_{pi(j)}; by the rearrangement
/// inequality this is the oppositely sorted dot product.
double min_permuted_pairing(const RVector& a, const RVector& b);

}  // namespace kcoh
