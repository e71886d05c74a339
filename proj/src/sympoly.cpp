#include "kcoh/sympoly.hpp"

#include <algorithm>
#include <cmath>

namespace kcoh {

const char* to_string(ConeStatus s) {
  switch (s) {
    case ConeStatus::Inside:
      return "inside";
    case ConeStatus::Outside:
      return "outside";
    case ConeStatus::Boundary:
      return "boundary";
  }
  return "unknown";
}

RVector elem_sym_all(const Spectrum& lambda) {
  const Index n = lambda.size();
  RVector s = RVector::Zero(n + 1);
  s[0] = 1.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j >= 1; --j) {
      s[j] += lambda[i] * s[j - 1];
    }
  }
  return s;
}

double binomial(Index n, Index k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double out = 1.0;
  for (Index i = 1; i <= k; ++i) {
    out *= static_cast<double>(n - k + i);
    out /= static_cast<double>(i);
  }
  return out;
}

ConeVerdict in_Ck(const Spectrum& lambda, Index k, double tol) {
  const Index n = lambda.size();
  if (k < 1 || k > n) {
    throw ValidationError("in_Ck: k must satisfy 1 <= k <= n");
  }
  const RVector s = elem_sym_all(lambda);
  const double amax = lambda.values().cwiseAbs().maxCoeff();
  double margin = std::numeric_limits<double>::infinity();
  double pow_amax = 1.0;
  for (Index j = 1; j <= k; ++j) {
    pow_amax *= amax;
    const double scale = binomial(n, j) * pow_amax;
    const double slack = (scale > 0.0) ? s[j] / scale : 0.0;
    margin = std::min(margin, slack);
  }
  ConeStatus status = ConeStatus::Inside;
  if (margin < -tol) {
    status = ConeStatus::Outside;
  } else if (std::abs(margin) <= tol) {
    status = ConeStatus::Boundary;
  }
  return {status, margin, "elementary-symmetric", std::nullopt};
}

Spectrum speyer_reduce(const Spectrum& lambda, Index k) {
  const Index n = lambda.size();
  if (n < 2) {
    throw ValidationError("speyer_reduce: need n >= 2 to drop an entry");
  }
  if (!in_Ck(lambda, k).passes()) {
    throw ValidationError("speyer_reduce: spectrum is not in C_k");
  }
  Spectrum reduced(RVector(lambda.values().head(n - 1)));
  if (k >= 2 && !in_Ck(reduced, k - 1, 1e-7).passes()) {
    throw Error("speyer_reduce: reduced vector escaped C_{k-1}");
  }
  return reduced;
}

ConeVerdict in_C2_dual(const Spectrum& lambda, double tol) {
  const Index n = lambda.size();
  if (n < 2) {
    throw ValidationError("in_C2_dual: need n >= 2");
  }
  const double circular_slack =
      lambda.sum() - std::sqrt(static_cast<double>(n - 1)) * lambda.values().norm();
  const double margin = std::min(circular_slack, lambda.min());
  ConeStatus status = ConeStatus::Inside;
  if (margin < -tol) {
    status = ConeStatus::Outside;
  } else if (std::abs(margin) <= tol) {
    status = ConeStatus::Boundary;
  }
  return {status, margin, "C2-dual-circular-cone", std::nullopt};
}

double min_permuted_pairing(const RVector& a, const RVector& b) {
  if (a.size() != b.size()) {
    throw ValidationError("min_permuted_pairing: length mismatch");
  }
  RVector asc = a;
  RVector desc = b;
  std::sort(asc.data(), asc.data() + asc.size());
  std::sort(desc.data(), desc.data() + desc.size(), std::greater<double>());
  return asc.dot(desc);
}

namespace {

bool raw_in_Ck(const RVector& v, Index k) {
  const RVector s = elem_sym_all(Spectrum(v));
  for (Index j = 1; j <= k; ++j) {
    if (s[j] < 0.0) return false;
  }
  return true;
}

}  // namespace

ConeVerdict in_Ck_dual_falsify(const Spectrum& lambda, Index k, int samples, std::uint64_t seed,
                               double tol) {
  const Index n = lambda.size();
  if (k < 1 || k > n) {
    throw ValidationError("in_Ck_dual_falsify: k must satisfy 1 <= k <= n");
  }

  std::vector<RVector> candidates;
  RVector e1 = RVector::Zero(n);
  e1[0] = 1.0;
  candidates.push_back(e1);
  candidates.push_back(RVector::Ones(n).normalized());
  // (1,...,1,-t,0,...,0) with m leading ones and the largest t keeping
  // S_j >= 0 for all j <= k, namely t = (m-k+1)/k; each m reaches an
  // extreme ray of C_k.
  for (Index m = k; m < n; ++m) {
    RVector extreme = RVector::Zero(n);
    extreme.head(m).setOnes();
    extreme[m] = -static_cast<double>(m - k + 1) / static_cast<double>(k);
    candidates.push_back(extreme.normalized());
  }
  if (k == 2) {
    // C_2 is the circular cone sum(mu) >= ||mu||; against a fixed lambda the
    // minimizing unit element has a closed form on the cone boundary.
    RVector dev = lambda.sorted_descending();
    std::reverse(dev.data(), dev.data() + n);  // ascending, to anti-align
    dev.array() -= dev.mean();
    const double dn = dev.norm();
    if (dn > 1e-14) {
      const RVector opt = RVector::Ones(n) / static_cast<double>(n) -
                          std::sqrt(static_cast<double>(n - 1) / static_cast<double>(n)) *
                              (dev / dn);
      candidates.push_back(opt.normalized());
    }
  }

  Rng rng(seed);
  const long draw_cap = 1000L * std::max(samples, 1);
  long draws = 0;
  int accepted = 0;
  while (accepted < samples && draws < draw_cap) {
    RVector g(n);
    for (Index i = 0; i < n; ++i) g[i] = rng.normal();
    ++draws;
    if (raw_in_Ck(g, k)) {
      candidates.push_back(g.normalized());
      ++accepted;
    }
  }

  double best = std::numeric_limits<double>::infinity();
  const RVector* best_mu = nullptr;
  for (const auto& mu : candidates) {
    const double v = min_permuted_pairing(lambda.values(), mu);
    if (v < best) {
      best = v;
      best_mu = &mu;
    }
  }
  if (best < -tol) {
    return {ConeStatus::Outside, best, "dual-falsifier", *best_mu};
  }
  // One-sided test: nothing was falsified, which is not a proof of
  // membership in C_k^o.
  const ConeStatus status = (std::abs(best) <= tol) ? ConeStatus::Boundary : ConeStatus::Inside;
  return {status, best, "dual-falsifier-exhausted(one-sided)", std::nullopt};
}

RVector directional_derivative_coeffs(const Spectrum& x, Index k) {
  const Index n = x.size();
  if (k < 0 || k > n - 1) {
    throw ValidationError("directional_derivative_coeffs: k must satisfy 0 <= k <= n-1");
  }
  const RVector s = elem_sym_all(x);
  const Index m = n - k;  // degree of the derivative polynomial in t
  RVector coeffs(m + 1);
  for (Index j = 0; j <= m; ++j) {
    const Index i = m - j;  // power of t this coefficient multiplies
    double c = 1.0;         // c_i = (i+k)!/i!
    for (Index f = 1; f <= k; ++f) {
      c *= static_cast<double>(i + f);
    }
    coeffs[j] = c * s[j];
  }
  return coeffs;
}

}  // namespace kcoh
