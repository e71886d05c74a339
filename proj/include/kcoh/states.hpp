#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kcoh/sympoly.hpp"
#include "kcoh/types.hpp"
#include "kcoh/witness.hpp"

namespace kcoh {

/// Positive semidefinite trace-one matrix. The eigendecomposition is taken
/// once at construction and cached; every downstream test reads it.
class DensityMatrix {
 public:
  explicit DensityMatrix(HermitianMatrix rho, double tol = 1e-10);

  static DensityMatrix FromSpectrum(const Spectrum& lambda, double tol = 1e-8);

  Index dim() const { return rho_.dim(); }
  const HermitianMatrix& matrix() const { return rho_; }
  const Spectrum& spectrum() const { return spectrum_; }          // descending
  const UnitaryMatrix& eigenbasis() const { return eigenbasis_; }  // columns follow spectrum

 private:
  HermitianMatrix rho_;
  Spectrum spectrum_;
  UnitaryMatrix eigenbasis_;
};

struct ClosedFormCert {
  std::string name;
  double margin;
};
struct FeasibleLambdaCert {
  HermitianMatrix lambda;  // real PSD matrix meeting the affine constraints
};
struct ViolatingPairCert {
  HermitianMatrix witness;
  UnitaryMatrix unitary;
  double value;  // Tr(witness * U rho U*) < 0
};
struct ViolatingConeElementCert {
  RVector mu;    // element of C_k
  double value;  // opposite-sorted pairing with the spectrum, < 0
};
struct RankBoundCert {
  int rank;
  int bound;  // n - k
};
using Certificate = std::variant<ClosedFormCert, FeasibleLambdaCert, ViolatingPairCert,
                                 ViolatingConeElementCert, RankBoundCert>;

enum class AbsStatus { AbsolutelyIncoherent, NotAbsolutelyIncoherent, Indeterminate };
const char* to_string(AbsStatus s);

struct CriterionOutcome {
  std::string test;
  std::string outcome;
  double margin;
};

struct AbsVerdict {
  AbsStatus status;
  std::optional<Certificate> certificate;
  std::vector<CriterionOutcome> criteria_log;
};

enum class MembershipStatus { Member, NonMember, Indeterminate };
const char* to_string(MembershipStatus s);

struct KIncoherenceResult {
  MembershipStatus status;
  double residual;  // || rho - sum of embedded blocks ||_F at the last cycle
  int cycles;
  /// NonMember evidence: a k-locally PSD witness with Tr(witness rho) < -tol.
  std::optional<HermitianMatrix> witness;
  double witness_value = 0.0;
  /// Member evidence: PSD blocks over k-subsets summing to rho within tol.
  std::vector<std::pair<IndexSubset, HermitianMatrix>> decomposition;
};

/// Reproducible search limits for the randomized parts of the battery.
struct SearchBudget {
  int haar_samples = 200;
  int cone_samples = 500;
  int dykstra_cycles = 2000;
  std::uint64_t seed = 0;
};

/// Factor-width membership: decides whether rho is a sum of PSD blocks
/// supported on k-subsets, by Dykstra alternating projection between the
/// affine set of block tuples summing to rho and the product of PSD cones.
/// NonMember requires an explicit witness; stalls are Indeterminate.
KIncoherenceResult is_k_incoherent(const DensityMatrix& rho, Index k, double tol = 1e-8,
                                   int max_cycles = 2000);

/// x majorized by y (x ≺ y): descending partial sums of x stay below those
/// of y within tol and the totals agree within tol.
bool majorized_by(const Spectrum& x, const Spectrum& y, double tol = 1e-9);

enum class FeasibilityStatus { Feasible, Infeasible, Indeterminate };
const char* to_string(FeasibilityStatus s);

struct FeasibilityResult {
  FeasibilityStatus status;
  std::optional<Certificate> certificate;
  int cycles;
  double gap;
};

/// Existence of a real PSD matrix L with L_{jj} = lambda_j for j >= 2 and
/// lambda_1 = -L_{11} - sum_{i>=2}(L_{1i} + L_{i1}), for lambda sorted
/// descending. Decided by Dykstra between the PSD cone and the affine
/// subspace; Infeasible only with an independent certificate (the
/// lambda_max necessary bound, or a separating element of C_{n-1} found by
/// the falsifier).
FeasibilityResult lambda_feasibility(const Spectrum& lambda, double tol = 1e-8,
                                     int max_cycles = 5000, std::uint64_t seed = 0,
                                     int cone_samples = 500);

/// Battery of spectral tests for absolute k-incoherence, cheapest and exact
/// tests first, randomized falsifiers last; the first decisive test wins
/// and every outcome is logged.
AbsVerdict check_abs_k_incoherent(const DensityMatrix& rho, Index k, const SearchBudget& budget = {});
AbsVerdict check_abs_spectrum(const Spectrum& lambda, Index k, const SearchBudget& budget = {});

/// rho with one extra zero row and column.
DensityMatrix embed_state(const DensityMatrix& rho);

/// Exhibits rho as a convex mixture of unitary conjugates of sigma when
/// spectrum(rho) ≺ spectrum(sigma), via T-transforms in the eigenbases.
/// `max_terms` caps the mixture expansion. Returns whether the assembled
/// mixture matches rho within 1e-6 in Frobenius norm.
bool uhlmann_mix_check(const DensityMatrix& rho, const DensityMatrix& sigma, int max_terms = 4096,
                       std::uint64_t seed = 0);

/// Independent re-validation of an emitted certificate against the
/// spectrum it was issued for. Returns false (with a reason) rather than
/// throwing.
bool validate_certificate(const Certificate& cert, const Spectrum& lambda, Index k,
                          std::string* why = nullptr);

}  // namespace kcoh
