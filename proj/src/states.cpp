#include "kcoh/states.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace kcoh {

const char* to_string(AbsStatus s) {
  switch (s) {
    case AbsStatus::AbsolutelyIncoherent:
      return "absolutely_incoherent";
    case AbsStatus::NotAbsolutelyIncoherent:
      return "not_absolutely_incoherent";
    case AbsStatus::Indeterminate:
      return "indeterminate";
  }
  return "unknown";
}

const char* to_string(MembershipStatus s) {
  switch (s) {
    case MembershipStatus::Member:
      return "member";
    case MembershipStatus::NonMember:
      return "non_member";
    case MembershipStatus::Indeterminate:
      return "indeterminate";
  }
  return "unknown";
}

const char* to_string(FeasibilityStatus s) {
  switch (s) {
    case FeasibilityStatus::Feasible:
      return "feasible";
    case FeasibilityStatus::Infeasible:
      return "infeasible";
    case FeasibilityStatus::Indeterminate:
      return "indeterminate";
  }
  return "unknown";
}

namespace {

std::pair<Spectrum, UnitaryMatrix> validated_eig(const HermitianMatrix& rho, double tol) {
  EigResult eig = eig_hermitian(rho);
  if (eig.values.min() < -tol) {
    throw ValidationError("DensityMatrix: smallest eigenvalue " +
                          std::to_string(eig.values.min()) + " is below -" + std::to_string(tol));
  }
  if (std::abs(rho.trace() - 1.0) > tol) {
    throw ValidationError("DensityMatrix: trace " + std::to_string(rho.trace()) + " is not 1");
  }
  return {std::move(eig.values), std::move(eig.vectors)};
}

}  // namespace

DensityMatrix::DensityMatrix(HermitianMatrix rho, double tol)
    : rho_(std::move(rho)),
      spectrum_(RVector::Zero(1)),
      eigenbasis_(UnitaryMatrix::Identity(1)) {
  auto [spec, basis] = validated_eig(rho_, tol);
  spectrum_ = std::move(spec);
  eigenbasis_ = std::move(basis);
}

DensityMatrix DensityMatrix::FromSpectrum(const Spectrum& lambda, double tol) {
  const double total = lambda.sum();
  if (std::abs(total - 1.0) > tol) {
    throw ValidationError("DensityMatrix::FromSpectrum: entries must sum to 1 within tolerance");
  }
  if (lambda.min() < -1e-10) {
    throw ValidationError("DensityMatrix::FromSpectrum: negative entry " +
                          std::to_string(lambda.min()));
  }
  RVector v = lambda.values() / total;
  CMatrix d = v.cast<Complex>().asDiagonal();
  return DensityMatrix(hermitian_unchecked(std::move(d)));
}

bool majorized_by(const Spectrum& x, const Spectrum& y, double tol) {
  if (x.size() != y.size()) {
    throw ValidationError("majorized_by: length mismatch");
  }
  const RVector xd = x.sorted_descending();
  const RVector yd = y.sorted_descending();
  double sx = 0.0;
  double sy = 0.0;
  for (Index j = 0; j < xd.size(); ++j) {
    sx += xd[j];
    sy += yd[j];
    if (sx > sy + tol) return false;
  }
  return std::abs(sx - sy) <= tol;
}

// ---------------------------------------------------------------------------
// is_k_incoherent: factor-width membership by product-space Dykstra
// ---------------------------------------------------------------------------

namespace {

// Entrywise multiplicity of the block-sum map: how many k-subsets cover a
// given (row, col) pair. Entries covered by no block (off-diagonals when
// k = 1) get a placeholder 1; the affine correction never reads them back
// and their residual is simply irreducible.
RMatrix coverage_counts(Index n, Index k) {
  RMatrix m(n, n);
  const double diag = binomial(n - 1, k - 1);
  const double off = (k >= 2) ? binomial(n - 2, k - 2) : 1.0;
  m.setConstant(off);
  m.diagonal().setConstant(diag);
  return m;
}

CMatrix assemble_sum(const std::vector<CMatrix>& blocks,
                     const std::vector<std::vector<Index>>& subsets, Index n) {
  CMatrix out = CMatrix::Zero(n, n);
  for (size_t s = 0; s < subsets.size(); ++s) {
    const auto& j = subsets[s];
    const Index k = static_cast<Index>(j.size());
    for (Index r = 0; r < k; ++r) {
      for (Index c = 0; c < k; ++c) {
        out(j[static_cast<size_t>(r)], j[static_cast<size_t>(c)]) += blocks[s](r, c);
      }
    }
  }
  return out;
}

// Least-squares correction moving a block tuple onto {sum of embeddings = rho}.
void project_affine(std::vector<CMatrix>& blocks, const std::vector<std::vector<Index>>& subsets,
                    const CMatrix& rho, const RMatrix& counts, CMatrix& scratch) {
  scratch = rho - assemble_sum(blocks, subsets, rho.rows());
  scratch.array() /= counts.array();
  for (size_t s = 0; s < subsets.size(); ++s) {
    const auto& j = subsets[s];
    const Index k = static_cast<Index>(j.size());
    for (Index r = 0; r < k; ++r) {
      for (Index c = 0; c < k; ++c) {
        blocks[s](r, c) += scratch(j[static_cast<size_t>(r)], j[static_cast<size_t>(c)]);
      }
    }
  }
}

// Largest eigenvalue over the k x k principal blocks of a Hermitian matrix.
double max_block_eig(const CMatrix& m, const std::vector<std::vector<Index>>& subsets) {
  const Index k = static_cast<Index>(subsets.front().size());
  CMatrix block(k, k);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& j : subsets) {
    for (Index r = 0; r < k; ++r) {
      for (Index c = 0; c < k; ++c) {
        block(r, c) = m(j[static_cast<size_t>(r)], j[static_cast<size_t>(c)]);
      }
    }
    worst = std::max(worst, -detail::min_eig_block(-block));
  }
  return worst;
}

// Turns a separating multiplier y (with <y, T(c)> <= 0 over the PSD product
// in the limit) into a verified witness W = -y + delta I, which is k-locally
// PSD by the choice of delta. Accepts only if Tr(W rho) < -tol.
std::optional<std::pair<HermitianMatrix, double>> witness_from_multiplier(
    const CMatrix& y, const HermitianMatrix& rho,
    const std::vector<std::vector<Index>>& subsets, Index k, double tol) {
  const Index n = rho.dim();
  const double nrm = y.norm();
  if (nrm <= 0.0) return std::nullopt;
  const double delta = std::max(0.0, max_block_eig(y, subsets));
  HermitianMatrix witness =
      hermitian_unchecked((-y + delta * CMatrix::Identity(n, n)) / nrm);
  const WitnessReport report = is_k_locally_psd(witness, k, 0.0);
  if (report.worst_min_eig < 0.0) {
    witness = hermitian_unchecked(witness.mat() -
                                  report.worst_min_eig * CMatrix::Identity(n, n));
  }
  const double value = (witness.mat() * rho.mat()).trace().real();
  if (value < -tol) {
    return std::make_pair(std::move(witness), value);
  }
  return std::nullopt;
}

}  // namespace

KIncoherenceResult is_k_incoherent(const DensityMatrix& rho, Index k, double tol, int max_cycles) {
  const Index n = rho.dim();
  if (k < 1 || k > n) {
    throw ValidationError("is_k_incoherent: k must satisfy 1 <= k <= n");
  }

  // Fixed witness screen before any iteration: a single trace test against
  // the Vandermonde witness refutes many states outright.
  if (k < n) {
    const VandermondeWitness vw =
        construct_vandermonde_witness(n, k, RVector::LinSpaced(n, 1.0, static_cast<double>(n)));
    const double value = (vw.matrix.mat() * rho.matrix().mat()).trace().real();
    if (value < -tol) {
      return {MembershipStatus::NonMember, 0.0, 0, vw.matrix, value, {}};
    }
  }

  const auto subsets = all_subsets(n, k);
  const RMatrix counts = coverage_counts(n, k);
  const CMatrix& target = rho.matrix().mat();

  std::vector<CMatrix> x(subsets.size(), CMatrix::Zero(k, k));
  CMatrix scratch = CMatrix::Zero(n, n);
  project_affine(x, subsets, target, counts, scratch);
  std::vector<CMatrix> p(subsets.size(), CMatrix::Zero(k, k));
  std::vector<CMatrix> q(subsets.size(), CMatrix::Zero(k, k));
  std::vector<CMatrix> psd(subsets.size(), CMatrix::Zero(k, k));

  double residual = std::numeric_limits<double>::infinity();
  double checkpoint = std::numeric_limits<double>::infinity();
  int cycle = 0;
  bool member = false;
  for (cycle = 1; cycle <= max_cycles; ++cycle) {
    for (size_t s = 0; s < subsets.size(); ++s) {
      psd[s] = detail::nearest_psd_block(x[s] + p[s]);
      p[s] = x[s] + p[s] - psd[s];
    }
    residual = (target - assemble_sum(psd, subsets, n)).norm();
    if (residual <= tol) {
      member = true;
      break;
    }
    for (size_t s = 0; s < subsets.size(); ++s) {
      x[s] = psd[s] + q[s];
    }
    project_affine(x, subsets, target, counts, scratch);
    for (size_t s = 0; s < subsets.size(); ++s) {
      q[s] = psd[s] + q[s] - x[s];
    }
    // plateau detection every 50 cycles
    if (cycle % 50 == 0) {
      if (residual > (1.0 - 1e-3) * checkpoint) break;
      checkpoint = residual;
    }
  }

  if (member) {
    std::vector<std::pair<IndexSubset, HermitianMatrix>> decomposition;
    decomposition.reserve(subsets.size());
    for (size_t s = 0; s < subsets.size(); ++s) {
      decomposition.emplace_back(IndexSubset(subsets[s], n), hermitian_unchecked(psd[s]));
    }
    return {MembershipStatus::Member, residual, cycle, std::nullopt, 0.0,
            std::move(decomposition)};
  }

  // A stall leaves a gap between the affine set and the PSD product. Polish
  // with plain alternating projections toward the nearest pair; the affine
  // step's multiplier y = (rho - T(a)) ./ counts satisfies <y, T(c)> <= 0
  // over the PSD product in the limit, so the shifted flip -y + delta I is
  // a witness candidate. The polish stops as soon as the candidate's trace
  // margin is decisively negative.
  if (residual > 10.0 * tol) {
    std::vector<CMatrix> t = x;
    CMatrix multiplier = CMatrix::Zero(n, n);
    bool promising = false;
    const int polish_cap = std::max(4000, 4 * max_cycles);
    double margin_checkpoint = -std::numeric_limits<double>::infinity();
    for (int extra = 0; extra < polish_cap; ++extra) {
      for (auto& block : t) {
        block = detail::nearest_psd_block(block);
      }
      multiplier = target - assemble_sum(t, subsets, n);
      multiplier.array() /= counts.array();
      const double trace_y = (multiplier * target).trace().real();
      const double delta = std::max(0.0, max_block_eig(multiplier, subsets));
      const double margin =
          (trace_y - delta) / std::max(multiplier.norm(), 1e-300);
      if (margin > 2.0 * tol) {
        promising = true;
        break;
      }
      if (extra % 500 == 0) {
        if (margin < margin_checkpoint + 1e-6) break;  // saturated below zero
        margin_checkpoint = margin;
      }
      for (size_t s = 0; s < subsets.size(); ++s) {
        const auto& j = subsets[s];
        for (Index r = 0; r < k; ++r) {
          for (Index c = 0; c < k; ++c) {
            t[s](r, c) += multiplier(j[static_cast<size_t>(r)], j[static_cast<size_t>(c)]);
          }
        }
      }
    }
    if (promising) {
      if (auto found = witness_from_multiplier(multiplier, rho.matrix(), subsets, k, tol)) {
        return {MembershipStatus::NonMember, residual, std::min(cycle, max_cycles),
                std::move(found->first), found->second, {}};
      }
    }
  }
  return {MembershipStatus::Indeterminate, residual, std::min(cycle, max_cycles), std::nullopt,
          0.0, {}};
}

// ---------------------------------------------------------------------------
// lambda_feasibility
// ---------------------------------------------------------------------------

namespace {

// Projection onto the affine set of the (n-1)-incoherence feasibility
// problem: diagonal entries j >= 2 pinned to lambda_j, one linear equation
// tying the first row and corner, everything else free.
void project_feasibility_affine(RMatrix& w, const RVector& lambda) {
  const Index n = w.rows();
  for (Index j = 1; j < n; ++j) {
    w(j, j) = lambda[j];
  }
  double lin = w(0, 0);
  for (Index i = 1; i < n; ++i) {
    lin += w(0, i) + w(i, 0);
  }
  const double mu = (lin + lambda[0]) / static_cast<double>(2 * n - 1);
  w(0, 0) -= mu;
  for (Index i = 1; i < n; ++i) {
    const double v = 0.5 * (w(0, i) + w(i, 0)) - mu;
    w(0, i) = v;
    w(i, 0) = v;
  }
}

RMatrix nearest_psd_real(const RMatrix& w) {
  auto [values, vectors] = detail::jacobi_eig(w.cast<Complex>());
  const RVector clamped = values.cwiseMax(0.0);
  return (vectors * clamped.asDiagonal() * vectors.adjoint()).real();
}

double feasibility_constraint_residual(const RMatrix& m, const RVector& lambda) {
  const Index n = m.rows();
  double worst = 0.0;
  for (Index j = 1; j < n; ++j) {
    worst = std::max(worst, std::abs(m(j, j) - lambda[j]));
  }
  double lin = m(0, 0) + lambda[0];
  for (Index i = 1; i < n; ++i) {
    lin += m(0, i) + m(i, 0);
  }
  return std::max(worst, std::abs(lin));
}

}  // namespace

FeasibilityResult lambda_feasibility(const Spectrum& lambda, double tol, int max_cycles,
                                     std::uint64_t seed, int cone_samples) {
  const Index n = lambda.size();
  if (n < 2) {
    throw ValidationError("lambda_feasibility: need n >= 2");
  }
  const RVector lam = lambda.values();
  for (Index i = 0; i + 1 < n; ++i) {
    if (lam[i] < lam[i + 1] - 1e-12) {
      throw ValidationError("lambda_feasibility: spectrum must be sorted descending");
    }
  }

  const double total = lam.sum();
  // Necessary bound from the 2x2 minors of a feasible matrix:
  // lambda_1 <= (n-1) * (sum - lambda_1). With unit trace this is the
  // lambda_max <= 1 - 1/n corollary.
  const double necessary_margin = static_cast<double>(n - 1) * (total - lam[0]) - lam[0];
  if (necessary_margin < -1e-8 * std::max(1.0, std::abs(total))) {
    return {FeasibilityStatus::Infeasible,
            Certificate(ClosedFormCert{"max-eig-necessary", necessary_margin}), 0, 0.0};
  }
  if (lam[n - 1] < -1e-8) {
    return {FeasibilityStatus::Infeasible,
            Certificate(ClosedFormCert{"negative-diagonal", lam[n - 1]}), 0, 0.0};
  }

  // Independent separation certificate: an element of C_{n-1} pairing
  // negatively with lambda rules out membership in the dual cone.
  const ConeVerdict falsified = in_Ck_dual_falsify(lambda, n - 1, cone_samples, seed, 1e-8);
  if (falsified.status == ConeStatus::Outside) {
    return {FeasibilityStatus::Infeasible,
            Certificate(ViolatingConeElementCert{*falsified.violator, falsified.margin}), 0, 0.0};
  }

  // Rank-one fast path: w = (-s, sqrt(lambda_2), ..., sqrt(lambda_n)) with
  // s^2 - 2 q s + lambda_1 = 0, q = sum of the tail square roots, satisfies
  // every constraint exactly whenever q^2 >= lambda_1. This also settles the
  // boundary configurations where the PSD cone only touches the affine set
  // and Dykstra alone crawls.
  if (lam[n - 1] >= -1e-8) {
    double q = 0.0;
    for (Index j = 1; j < n; ++j) q += std::sqrt(std::max(lam[j], 0.0));
    const double disc = q * q - lam[0];
    if (disc >= -1e-12 * std::max(1.0, std::abs(lam[0]))) {
      RVector w(n);
      w[0] = -(q - std::sqrt(std::max(disc, 0.0)));
      for (Index j = 1; j < n; ++j) w[j] = std::sqrt(std::max(lam[j], 0.0));
      const RMatrix rank_one = w * w.transpose();
      if (feasibility_constraint_residual(rank_one, lam) <=
          1e-8 * std::max(1.0, std::abs(total))) {
        return {FeasibilityStatus::Feasible,
                Certificate(FeasibleLambdaCert{hermitian_unchecked(rank_one.cast<Complex>())}), 0,
                0.0};
      }
    }
  }

  RMatrix x = RMatrix::Zero(n, n);
  x(0, 0) = -lam[0];
  for (Index j = 1; j < n; ++j) x(j, j) = lam[j];
  RMatrix p = RMatrix::Zero(n, n);
  RMatrix q = RMatrix::Zero(n, n);

  double gap = std::numeric_limits<double>::infinity();
  double checkpoint = std::numeric_limits<double>::infinity();
  int cycle = 0;
  for (cycle = 1; cycle <= max_cycles; ++cycle) {
    const RMatrix a = nearest_psd_real(x + p);
    p = x + p - a;
    RMatrix b = a + q;
    project_feasibility_affine(b, lam);
    q = a + q - b;
    x = b;
    gap = (a - b).norm();
    if (gap <= tol) {
      if (feasibility_constraint_residual(a, lam) <= 1e-8 * std::max(1.0, std::abs(total))) {
        return {FeasibilityStatus::Feasible,
                Certificate(FeasibleLambdaCert{hermitian_unchecked(a.cast<Complex>())}), cycle,
                gap};
      }
    }
    if (cycle % 100 == 0) {
      if (gap > (1.0 - 1e-6) * checkpoint) break;
      checkpoint = gap;
    }
  }
  return {FeasibilityStatus::Indeterminate, std::nullopt, std::min(cycle, max_cycles), gap};
}

// ---------------------------------------------------------------------------
// absolute k-incoherence battery
// ---------------------------------------------------------------------------

namespace {

int spectral_rank(const RVector& desc) {
  const double cutoff = static_cast<double>(desc.size()) * 1e-10 * desc[0];
  return static_cast<int>((desc.array() > cutoff).count());
}

/// Unitary aligning a witness with eigenvalues sorted descending against
/// diag(lambda descending) so that the trace pairing is opposite-sorted.
UnitaryMatrix opposite_sorting_unitary(const CMatrix& witness_basis) {
  const Index n = witness_basis.rows();
  CMatrix rev = CMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    rev(i, n - 1 - i) = 1.0;
  }
  return unitary_unchecked(witness_basis * rev);
}

struct BatteryState {
  AbsVerdict verdict;
  bool decided = false;

  void log(const std::string& test, const std::string& outcome, double margin) {
    verdict.criteria_log.push_back({test, outcome, margin});
  }
  void decide(AbsStatus status, Certificate cert) {
    verdict.status = status;
    verdict.certificate = std::move(cert);
    decided = true;
  }
};

}  // namespace

AbsVerdict check_abs_spectrum(const Spectrum& lambda_in, Index k, const SearchBudget& budget) {
  const Index n = lambda_in.size();
  if (k < 1 || k > n) {
    throw ValidationError("check_abs_k_incoherent: k must satisfy 1 <= k <= n");
  }
  const double total = lambda_in.sum();
  if (std::abs(total - 1.0) > 1e-8) {
    throw ValidationError("check_abs_k_incoherent: spectrum must sum to 1");
  }
  if (lambda_in.min() < -1e-10) {
    throw ValidationError("check_abs_k_incoherent: spectrum must be nonnegative");
  }
  const Spectrum lambda(RVector(lambda_in.sorted_descending() / total));
  const RVector& lam = lambda.values();

  BatteryState st;
  st.verdict.status = AbsStatus::Indeterminate;

  // (1) trivial k
  if (k == n) {
    st.log("k-equals-n", "absolutely_incoherent", 0.0);
    st.decide(AbsStatus::AbsolutelyIncoherent, ClosedFormCert{"k-equals-n", 0.0});
    return st.verdict;
  }
  if (k == 1) {
    const double dev = lam[0] - lam[n - 1];
    if (dev <= 1e-9) {
      st.log("k1-maximally-mixed", "absolutely_incoherent", -dev);
      st.decide(AbsStatus::AbsolutelyIncoherent, ClosedFormCert{"k1-maximally-mixed", -dev});
      return st.verdict;
    }
    if (dev >= 1e-7) {
      // mu = e_1 - e_n lies in C_1 and pairs to lambda_min - lambda_max < 0.
      RVector mu = RVector::Zero(n);
      mu[0] = 1.0;
      mu[n - 1] = -1.0;
      st.log("k1-maximally-mixed", "not_absolutely_incoherent", -dev);
      st.decide(AbsStatus::NotAbsolutelyIncoherent, ViolatingConeElementCert{mu, -dev});
      return st.verdict;
    }
    st.log("k1-maximally-mixed", "indeterminate", -dev);
    return st.verdict;
  }

  // (2) rank necessary condition
  const int rank = spectral_rank(lam);
  if (rank <= static_cast<int>(n - k)) {
    st.log("rank-bound", "not_absolutely_incoherent", static_cast<double>(n - k - rank));
    st.decide(AbsStatus::NotAbsolutelyIncoherent,
              RankBoundCert{rank, static_cast<int>(n - k)});
    return st.verdict;
  }
  st.log("rank-bound", "pass", static_cast<double>(rank - static_cast<int>(n - k)));

  // (3) max-eigenvalue sufficient condition
  {
    const double bound = 1.0 / static_cast<double>(n - k + 1);
    const double margin = bound - lam[0];
    if (margin >= -1e-12) {
      st.log("max-eig-sufficient", "absolutely_incoherent", margin);
      st.decide(AbsStatus::AbsolutelyIncoherent, ClosedFormCert{"max-eig-sufficient", margin});
      return st.verdict;
    }
    st.log("max-eig-sufficient", "inconclusive", margin);
  }

  // (4) + (5) k = 2: Frobenius ball, exact for n <= 3, and the dual circular cone
  if (k == 2) {
    const double ball = 1.0 / static_cast<double>(n - 1) - lam.squaredNorm();
    if (ball >= -1e-12) {
      st.log("frobenius-ball", "absolutely_incoherent", ball);
      st.decide(AbsStatus::AbsolutelyIncoherent, ClosedFormCert{"frobenius-ball", ball});
      return st.verdict;
    }
    st.log("frobenius-ball", "inconclusive", ball);
    if (n == 3) {
      st.log("frobenius-ball-converse-n3", "not_absolutely_incoherent", ball);
      st.decide(AbsStatus::NotAbsolutelyIncoherent,
                ClosedFormCert{"frobenius-ball-converse-n3", ball});
      return st.verdict;
    }
    const ConeVerdict dual = in_C2_dual(lambda, 1e-9);
    st.log("C2-dual-circular-cone", to_string(dual.status), dual.margin);
    if (dual.passes()) {
      st.decide(AbsStatus::AbsolutelyIncoherent,
                ClosedFormCert{"C2-dual-circular-cone", dual.margin});
      return st.verdict;
    }
  }

  // (6) k = n-1: exact decision through the feasibility program
  if (k == n - 1) {
    const double necessary = (1.0 - 1.0 / static_cast<double>(n)) - lam[0];
    if (necessary < -1e-8) {
      st.log("max-eig-necessary", "not_absolutely_incoherent", necessary);
      st.decide(AbsStatus::NotAbsolutelyIncoherent,
                ClosedFormCert{"max-eig-necessary", necessary});
      return st.verdict;
    }
    st.log("max-eig-necessary", "pass", necessary);
    const FeasibilityResult feas =
        lambda_feasibility(lambda, 1e-8, budget.dykstra_cycles, budget.seed, budget.cone_samples);
    st.log("lambda-feasibility", to_string(feas.status), feas.gap);
    if (feas.status == FeasibilityStatus::Feasible) {
      st.decide(AbsStatus::AbsolutelyIncoherent, *feas.certificate);
      return st.verdict;
    }
    if (feas.status == FeasibilityStatus::Infeasible) {
      st.decide(AbsStatus::NotAbsolutelyIncoherent, *feas.certificate);
      return st.verdict;
    }
  }

  // (7a) cone falsifier; decisive alone only where the dual-cone converse
  // holds, otherwise the violating spectrum must be realized as a witness.
  {
    const ConeVerdict fal = in_Ck_dual_falsify(lambda, k, budget.cone_samples, budget.seed, 1e-8);
    st.log("Ck-dual-falsifier", to_string(fal.status), fal.margin);
    if (fal.status == ConeStatus::Outside) {
      if (k == n - 1) {
        st.decide(AbsStatus::NotAbsolutelyIncoherent,
                  ViolatingConeElementCert{*fal.violator, fal.margin});
        return st.verdict;
      }
      const ConstructionResult realized =
          construct_with_spectrum(Spectrum(*fal.violator), k, budget.seed, 1e-10, 1000, 1e-8);
      st.log("witness-realization", realized.converged ? "converged" : "stalled",
             realized.residual);
      if (realized.converged) {
        const EigResult eig = eig_hermitian(realized.matrix);
        const UnitaryMatrix u = opposite_sorting_unitary(eig.vectors.mat());
        const CMatrix rotated =
            u.mat() * lam.cast<Complex>().asDiagonal() * u.mat().adjoint();
        const double value = (realized.matrix.mat() * rotated).trace().real();
        if (value < -1e-8) {
          st.decide(AbsStatus::NotAbsolutelyIncoherent,
                    ViolatingPairCert{realized.matrix, u, value});
          return st.verdict;
        }
      }
    }
  }

  // (7b) randomized Haar search against the factor-width membership test
  if (budget.haar_samples > 0) {
    const DensityMatrix diag_state = DensityMatrix::FromSpectrum(lambda);
    Rng rng(budget.seed);
    for (int s = 0; s < budget.haar_samples; ++s) {
      const UnitaryMatrix u = haar_unitary(n, rng);
      const HermitianMatrix rotated =
          hermitian_unchecked(u.mat() * diag_state.matrix().mat() * u.mat().adjoint());
      const KIncoherenceResult probe =
          is_k_incoherent(DensityMatrix(rotated), k, 1e-8, budget.dykstra_cycles);
      if (probe.status == MembershipStatus::NonMember) {
        st.log("haar-falsifier", "not_absolutely_incoherent", probe.witness_value);
        st.decide(AbsStatus::NotAbsolutelyIncoherent,
                  ViolatingPairCert{*probe.witness, u, probe.witness_value});
        return st.verdict;
      }
    }
    st.log("haar-falsifier", "exhausted", 0.0);
  }

  st.verdict.status = AbsStatus::Indeterminate;
  return st.verdict;
}

AbsVerdict check_abs_k_incoherent(const DensityMatrix& rho, Index k, const SearchBudget& budget) {
  // Absolute k-incoherence is a property of the spectrum alone; certificates
  // are issued in the canonical frame diag(spectrum descending).
  return check_abs_spectrum(rho.spectrum(), k, budget);
}

DensityMatrix embed_state(const DensityMatrix& rho) {
  const Index n = rho.dim();
  CMatrix out = CMatrix::Zero(n + 1, n + 1);
  out.topLeftCorner(n, n) = rho.matrix().mat();
  return DensityMatrix(hermitian_unchecked(std::move(out)));
}

// ---------------------------------------------------------------------------
// uhlmann_mix_check
// ---------------------------------------------------------------------------

bool uhlmann_mix_check(const DensityMatrix& rho, const DensityMatrix& sigma, int max_terms,
                       std::uint64_t /*seed*/) {
  const Index n = rho.dim();
  if (sigma.dim() != n) {
    throw ValidationError("uhlmann_mix_check: dimension mismatch");
  }
  if (!majorized_by(rho.spectrum(), sigma.spectrum(), 1e-9)) {
    throw ValidationError("uhlmann_mix_check: spectrum(rho) is not majorized by spectrum(sigma)");
  }

  const RVector a = rho.spectrum().sorted_descending();
  RVector b = sigma.spectrum().sorted_descending();

  // Mixture terms: permutation (as an image vector) -> weight. The chain of
  // T-transforms keeps b descending and matches one more coordinate of a
  // per step.
  std::map<std::vector<Index>, double> terms;
  std::vector<Index> identity(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) identity[static_cast<size_t>(i)] = i;
  terms[identity] = 1.0;

  const double match_tol = 1e-11 * std::max(1.0, b.cwiseAbs().maxCoeff());
  int guard = 0;
  while ((a - b).cwiseAbs().maxCoeff() > match_tol) {
    if (++guard > 2 * n) return false;
    Index j = -1;
    for (Index i = n - 1; i >= 0; --i) {
      if (b[i] > a[i] + match_tol) {
        j = i;
        break;
      }
    }
    if (j < 0) return false;
    Index l = -1;
    for (Index i = j + 1; i < n; ++i) {
      if (b[i] < a[i] - match_tol) {
        l = i;
        break;
      }
    }
    if (l < 0) return false;
    const double delta = std::min(b[j] - a[j], a[l] - b[l]);
    const double t = delta / (b[j] - b[l]);
    b[j] -= delta;
    b[l] += delta;

    std::map<std::vector<Index>, double> next;
    for (const auto& [perm, w] : terms) {
      next[perm] += (1.0 - t) * w;
      std::vector<Index> swapped = perm;
      for (auto& image : swapped) {
        if (image == j) {
          image = l;
        } else if (image == l) {
          image = j;
        }
      }
      next[swapped] += t * w;
    }
    terms = std::move(next);
    if (static_cast<int>(terms.size()) > max_terms) return false;
  }

  // Assemble rho_hat = sum w * U sigma U* with U = V_rho P V_sigma*.
  const CMatrix& vr = rho.eigenbasis().mat();
  const CMatrix& vs = sigma.eigenbasis().mat();
  const RVector sig_diag = sigma.spectrum().sorted_descending();
  CMatrix mix = CMatrix::Zero(n, n);
  for (const auto& [perm, w] : terms) {
    CMatrix pm = CMatrix::Zero(n, n);
    for (Index c = 0; c < n; ++c) {
      pm(perm[static_cast<size_t>(c)], c) = 1.0;
    }
    const CMatrix u = vr * pm * vs.adjoint();
    mix += w * (u * sigma.matrix().mat() * u.adjoint());
  }
  return (mix - rho.matrix().mat()).norm() <= 1e-6;
}

// ---------------------------------------------------------------------------
// certificate validation
// ---------------------------------------------------------------------------

namespace {

bool fail(std::string* why, const std::string& message) {
  if (why != nullptr) *why = message;
  return false;
}

}  // namespace

bool validate_certificate(const Certificate& cert, const Spectrum& lambda, Index k,
                          std::string* why) {
  const Index n = lambda.size();
  const RVector lam = lambda.sorted_descending();

  if (const auto* cf = std::get_if<ClosedFormCert>(&cert)) {
    if (cf->name == "k-equals-n") return k == n || fail(why, "k != n");
    if (cf->name == "k1-maximally-mixed") {
      return (lam[0] - lam[n - 1] <= 1e-9) || fail(why, "spectrum is not uniform");
    }
    if (cf->name == "max-eig-sufficient") {
      return (lam[0] <= 1.0 / static_cast<double>(n - k + 1) + 1e-12) ||
             fail(why, "max eigenvalue exceeds 1/(n-k+1)");
    }
    if (cf->name == "frobenius-ball") {
      return (k == 2 && lam.squaredNorm() <= 1.0 / static_cast<double>(n - 1) + 1e-12) ||
             fail(why, "sum of squares exceeds 1/(n-1)");
    }
    if (cf->name == "frobenius-ball-converse-n3") {
      return (k == 2 && n == 3 && lam.squaredNorm() > 1.0 / static_cast<double>(n - 1)) ||
             fail(why, "converse ball test does not apply");
    }
    if (cf->name == "C2-dual-circular-cone") {
      return (k == 2 && in_C2_dual(Spectrum(lam), 1e-9).passes()) ||
             fail(why, "spectrum is outside the dual circular cone");
    }
    if (cf->name == "max-eig-necessary") {
      const double margin = static_cast<double>(n - 1) * (lam.sum() - lam[0]) - lam[0];
      return (margin < 0.0) || fail(why, "necessary bound actually holds");
    }
    if (cf->name == "negative-diagonal") {
      return (lam[n - 1] < 0.0) || fail(why, "no negative trailing eigenvalue");
    }
    return fail(why, "unknown closed-form criterion: " + cf->name);
  }

  if (const auto* fl = std::get_if<FeasibleLambdaCert>(&cert)) {
    const CMatrix& m = fl->lambda.mat();
    if (m.rows() != n) return fail(why, "certificate dimension mismatch");
    if (m.imag().cwiseAbs().maxCoeff() > 1e-10) return fail(why, "certificate is not real");
    const double min_eig = detail::jacobi_eig(m).first.minCoeff();
    if (min_eig < -1e-8) return fail(why, "certificate matrix is not PSD");
    const double res = feasibility_constraint_residual(m.real(), lam);
    if (res > 1e-8 * std::max(1.0, std::abs(lam.sum()))) {
      return fail(why, "affine constraints violated by " + std::to_string(res));
    }
    return true;
  }

  if (const auto* vp = std::get_if<ViolatingPairCert>(&cert)) {
    if (vp->witness.dim() != n || vp->unitary.dim() != n) {
      return fail(why, "certificate dimension mismatch");
    }
    const WitnessReport report = is_k_locally_psd(vp->witness, k, 1e-8);
    if (!report.is_member) return fail(why, "witness is not k-locally PSD");
    const CMatrix rotated =
        vp->unitary.mat() * lam.cast<Complex>().asDiagonal() * vp->unitary.mat().adjoint();
    const double value = (vp->witness.mat() * rotated).trace().real();
    if (std::abs(value - vp->value) > 1e-9 * std::max(1.0, std::abs(vp->value))) {
      return fail(why, "stored trace value does not reproduce");
    }
    return (value < -1e-8) || fail(why, "trace pairing is not negative");
  }

  if (const auto* vc = std::get_if<ViolatingConeElementCert>(&cert)) {
    if (vc->mu.size() != n) return fail(why, "certificate dimension mismatch");
    if (!in_Ck(Spectrum(vc->mu), k).passes()) return fail(why, "mu is not in C_k");
    const double value = min_permuted_pairing(lam, vc->mu);
    if (std::abs(value - vc->value) > 1e-9 * std::max(1.0, std::abs(vc->value))) {
      return fail(why, "stored pairing value does not reproduce");
    }
    return (value < -1e-8) || fail(why, "pairing is not negative");
  }

  if (const auto* rb = std::get_if<RankBoundCert>(&cert)) {
    if (rb->bound != static_cast<int>(n - k)) return fail(why, "bound is not n-k");
    const int rank = spectral_rank(lam);
    if (rank != rb->rank) return fail(why, "stored rank does not reproduce");
    return (rank <= rb->bound) || fail(why, "rank exceeds n-k");
  }

  return fail(why, "unrecognized certificate kind");
}

}  // namespace kcoh
