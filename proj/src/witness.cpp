#include "kcoh/witness.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>

namespace kcoh {

std::vector<std::vector<Index>> all_subsets(Index n, Index k) {
  std::vector<std::vector<Index>> out;
  if (k < 1 || k > n) {
    throw ValidationError("all_subsets: k must satisfy 1 <= k <= n");
  }
  std::vector<Index> cur(static_cast<size_t>(k));
  for (Index i = 0; i < k; ++i) cur[static_cast<size_t>(i)] = i;
  while (true) {
    out.push_back(cur);
    // advance to the next subset in lexicographic order
    Index i = k - 1;
    while (i >= 0 && cur[static_cast<size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++cur[static_cast<size_t>(i)];
    for (Index j = i + 1; j < k; ++j) {
      cur[static_cast<size_t>(j)] = cur[static_cast<size_t>(j - 1)] + 1;
    }
  }
  return out;
}

namespace detail {

double min_eig_block(const CMatrix& block) {
  const Index k = block.rows();
  if (k == 1) {
    return block(0, 0).real();
  }
  if (k == 2) {
    const double a = block(0, 0).real();
    const double c = block(1, 1).real();
    const double mean = 0.5 * (a + c);
    const double disc = std::hypot(0.5 * (a - c), std::abs(block(0, 1)));
    return mean - disc;
  }
  return kcoh::detail::jacobi_eig(block).first.minCoeff();
}

CMatrix nearest_psd_block(const CMatrix& block) {
  const Index k = block.rows();
  if (k == 1) {
    CMatrix out(1, 1);
    out(0, 0) = std::max(block(0, 0).real(), 0.0);
    return out;
  }
  if (k == 2) {
    const double a = block(0, 0).real();
    const double c = block(1, 1).real();
    const Complex b = block(0, 1);
    const double mean = 0.5 * (a + c);
    const double disc = std::hypot(0.5 * (a - c), std::abs(b));
    const double lo = mean - disc;
    const double hi = mean + disc;
    if (lo >= 0.0) return block;
    if (hi <= 0.0) return CMatrix::Zero(2, 2);
    // keep the positive eigenpair only: hi * v v* with (A - lo I) v = hi-dir
    CVector v(2);
    // pick the better-conditioned eigenvector formula
    if (std::abs(hi - a) > std::abs(hi - c)) {
      v << b, Complex(hi - a, 0.0);
    } else {
      v << Complex(hi - c, 0.0), std::conj(b);
    }
    const double nrm = v.norm();
    if (nrm == 0.0) {
      // b == 0 and a == c: diagonal clamp
      CMatrix out = CMatrix::Zero(2, 2);
      out(0, 0) = std::max(a, 0.0);
      out(1, 1) = std::max(c, 0.0);
      return out;
    }
    v /= nrm;
    return hi * (v * v.adjoint());
  }
  auto [values, vectors] = kcoh::detail::jacobi_eig(block);
  const RVector clamped = values.cwiseMax(0.0);
  return vectors * clamped.asDiagonal() * vectors.adjoint();
}

}  // namespace detail

WitnessReport is_k_locally_psd(const HermitianMatrix& x, Index k, double tol) {
  const Index n = x.dim();
  if (k < 1 || k > n) {
    throw ValidationError("is_k_locally_psd: k must satisfy 1 <= k <= n");
  }
  const auto subsets = all_subsets(n, k);
  double worst = std::numeric_limits<double>::infinity();
  size_t worst_idx = 0;
  CMatrix block(k, k);
  for (size_t s = 0; s < subsets.size(); ++s) {
    const auto& j = subsets[s];
    for (Index r = 0; r < k; ++r) {
      for (Index c = 0; c < k; ++c) {
        block(r, c) = x.mat()(j[static_cast<size_t>(r)], j[static_cast<size_t>(c)]);
      }
    }
    const double me = detail::min_eig_block(block);
    if (me < worst) {
      worst = me;
      worst_idx = s;
    }
  }
  const RVector eigs = detail::jacobi_eig(x.mat()).first;
  const int neg = static_cast<int>((eigs.array() < -tol).count());
  return {worst >= -tol, IndexSubset(subsets[worst_idx], n), worst, neg};
}

namespace {

void write_block(CMatrix& x, const std::vector<Index>& j, const CMatrix& block) {
  const Index k = static_cast<Index>(j.size());
  for (Index r = 0; r < k; ++r) {
    for (Index c = 0; c < k; ++c) {
      x(j[static_cast<size_t>(r)], j[static_cast<size_t>(c)]) = block(r, c);
    }
  }
}

void read_block(const CMatrix& x, const std::vector<Index>& j, CMatrix& block) {
  const Index k = static_cast<Index>(j.size());
  for (Index r = 0; r < k; ++r) {
    for (Index c = 0; c < k; ++c) {
      block(r, c) = x(j[static_cast<size_t>(r)], j[static_cast<size_t>(c)]);
    }
  }
}

double worst_block_eig(const CMatrix& x, const std::vector<std::vector<Index>>& subsets) {
  const Index k = static_cast<Index>(subsets.front().size());
  CMatrix block(k, k);
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& j : subsets) {
    read_block(x, j, block);
    worst = std::min(worst, detail::min_eig_block(block));
  }
  return worst;
}

}  // namespace

ConstructionResult project_onto_Ik_dual(const HermitianMatrix& y, Index k, double tol,
                                        int max_cycles) {
  const Index n = y.dim();
  if (k < 1 || k > n) {
    throw ValidationError("project_onto_Ik_dual: k must satisfy 1 <= k <= n");
  }
  const auto subsets = all_subsets(n, k);
  CMatrix x = y.mat();
  std::vector<CMatrix> increments(subsets.size(), CMatrix::Zero(k, k));
  CMatrix block(k, k);
  CMatrix x_prev = x;

  double delta = std::numeric_limits<double>::infinity();
  bool converged = false;
  int cycle = 0;
  for (cycle = 1; cycle <= max_cycles; ++cycle) {
    x_prev = x;
    for (size_t s = 0; s < subsets.size(); ++s) {
      read_block(x, subsets[s], block);
      block += increments[s];
      const CMatrix projected = detail::nearest_psd_block(block);
      increments[s] = block - projected;
      write_block(x, subsets[s], projected);
    }
    delta = (x - x_prev).norm();
    if (delta <= tol && worst_block_eig(x, subsets) >= -10.0 * tol) {
      converged = true;
      break;
    }
  }
  return {hermitian_unchecked(std::move(x)), delta, std::min(cycle, max_cycles), converged, {}};
}

VandermondeWitness construct_vandermonde_witness(Index n, Index k, const RVector& nodes) {
  if (n < 1 || k < 1 || k > n) {
    throw ValidationError("construct_vandermonde_witness: need 1 <= k <= n");
  }
  if (nodes.size() != n) {
    throw ValidationError("construct_vandermonde_witness: expected n nodes");
  }
  if (nodes[0] <= 0.0) {
    throw ValidationError("construct_vandermonde_witness: nodes must be positive");
  }
  for (Index i = 1; i < n; ++i) {
    if (nodes[i] <= nodes[i - 1]) {
      throw ValidationError("construct_vandermonde_witness: nodes must be strictly increasing");
    }
  }
  if (k == n) {
    return {HermitianMatrix::Identity(n), 0.0};
  }

  const Index m = n - k;
  RMatrix v(n, m);
  for (Index i = 0; i < n; ++i) {
    double p = 1.0;
    for (Index j = 0; j < m; ++j) {
      v(i, j) = p;
      p *= nodes[i];
    }
  }
  const Eigen::HouseholderQR<RMatrix> qr(v);
  const RMatrix q = RMatrix(qr.householderQ()).leftCols(m);
  const RMatrix p = q * q.transpose();
  const HermitianMatrix projector = hermitian_unchecked(p.cast<Complex>());

  // d = max over k-subsets J of lambda_max(P_JJ), the exact maximum of
  // <v|P|v> over k-sparse unit vectors.
  double d = 0.0;
  for (const auto& j : all_subsets(n, k)) {
    const HermitianMatrix sub = principal_submatrix(projector, IndexSubset(j, n));
    d = std::max(d, kcoh::detail::jacobi_eig(sub.mat()).first.maxCoeff());
  }
  if (d >= 1.0) {
    throw ValidationError("construct_vandermonde_witness: d >= 1, construction invalid");
  }
  const double c = 1.0 / d;
  CMatrix x = CMatrix::Identity(n, n) - c * projector.mat();
  return {hermitian_unchecked(std::move(x)), c};
}

HermitianMatrix construct_circulant_witness(const Spectrum& lambda) {
  const Index n = lambda.size();
  if (n < 2) {
    throw ValidationError("construct_circulant_witness: need n >= 2");
  }
  if (!in_Ck(lambda, n - 1).passes()) {
    throw ValidationError("construct_circulant_witness: spectrum is not in C_{n-1}");
  }
  HermitianMatrix x = circulant_from_spectrum(lambda);

  const RVector eigs = detail::jacobi_eig(x.mat()).first;
  RVector want = lambda.sorted_descending();
  const double scale = std::max(1.0, want.cwiseAbs().maxCoeff());
  if ((eigs - want).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw Error("construct_circulant_witness: spectrum failed to round-trip");
  }
  const WitnessReport report = is_k_locally_psd(x, n - 1, 1e-8 * scale);
  if (!report.is_member) {
    throw Error("construct_circulant_witness: a principal submatrix is not PSD");
  }
  return x;
}

HermitianMatrix isospectral_projection(const HermitianMatrix& x, const Spectrum& lambda) {
  if (lambda.size() != x.dim()) {
    throw ValidationError("isospectral_projection: spectrum length must match dimension");
  }
  auto [values, vectors] = detail::jacobi_eig(x.mat());
  const RVector target = lambda.sorted_descending();
  return hermitian_unchecked(vectors * target.asDiagonal() * vectors.adjoint());
}

ConstructionResult construct_with_spectrum(const Spectrum& lambda, Index k, std::uint64_t seed,
                                           double stall_tol, int max_iters,
                                           double residual_target) {
  const Index n = lambda.size();
  if (k < 1 || k > n) {
    throw ValidationError("construct_with_spectrum: k must satisfy 1 <= k <= n");
  }
  constexpr double kDykstraTol = 1e-10;
  constexpr int kDykstraCycles = 2000;

  const UnitaryMatrix u0 = haar_unitary(n, seed);
  const RVector diag = lambda.values();
  HermitianMatrix y = hermitian_unchecked(u0.mat() * diag.asDiagonal() * u0.mat().adjoint());

  std::vector<IterationRecord> history;
  HermitianMatrix x = y;
  double residual = std::numeric_limits<double>::infinity();
  double prev_residual = std::numeric_limits<double>::infinity();
  int iter = 0;
  const double floor = 1e-13 * std::max(1.0, lambda.values().cwiseAbs().maxCoeff());

  for (iter = 1; iter <= max_iters; ++iter) {
    x = project_onto_Ik_dual(y, k, kDykstraTol, kDykstraCycles).matrix;
    const double dist_before = (x.mat() - y.mat()).norm();
    y = isospectral_projection(x, lambda);
    residual = (x.mat() - y.mat()).norm();
    history.push_back({dist_before, residual});

    // Monotone descent is a property of the exact alternating scheme; the
    // slack absorbs the inexactness of the inner Dykstra projection.
    const double slack = 1e-7 * std::max(1.0, history.front().dist_after);
    if (residual > dist_before + slack ||
        (iter > 1 && dist_before > prev_residual + slack)) {
      throw Error("construct_with_spectrum: residual sequence is not non-increasing");
    }

    if (residual <= floor) break;
    if (iter > 1 && std::abs(residual - prev_residual) <= stall_tol) break;
    prev_residual = residual;
  }

  const int iterations = std::min(iter, max_iters);
  return {x, residual, iterations, residual <= residual_target, std::move(history)};
}

}  // namespace kcoh
