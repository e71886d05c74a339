#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "kcoh/sympoly.hpp"
#include "test_oracles.hpp"

using namespace kcoh;

TEST_CASE("elem_sym_all matches brute force") {
  const RVector s = elem_sym_all(Spectrum{10.0, 4.0, -1.0, -2.0});
  CHECK(s[0] == 1.0);
  CHECK(s[1] == doctest::Approx(11.0));
  CHECK(s[2] == doctest::Approx(0.0));

  const RVector ones = elem_sym_all(Spectrum{1.0, 1.0, 1.0});
  CHECK(ones[0] == 1.0);
  CHECK(ones[1] == doctest::Approx(3.0));
  CHECK(ones[2] == doctest::Approx(3.0));
  CHECK(ones[3] == doctest::Approx(1.0));

  CHECK(elem_sym_all(Spectrum{1.0, 2.0, 3.0, 4.0})[3] == doctest::Approx(50.0));

  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.next_u64() % 8);
    RVector lam(n);
    for (Index i = 0; i < n; ++i) lam[i] = 2.0 * rng.normal();
    const RVector got = elem_sym_all(Spectrum{RVector(lam)});
    for (Index j = 0; j <= n; ++j) {
      const double want = oracle::elem_sym_bruteforce(lam, static_cast<int>(j));
      CHECK(got[j] == doctest::Approx(want).epsilon(1e-10));
    }
  }
}

TEST_CASE("in_Ck verdicts") {
  const ConeVerdict edge = in_Ck(Spectrum{10.0, 4.0, -1.0, -2.0}, 2);
  CHECK(edge.passes());  // S_2 = 0 exactly, Inside or Boundary
  CHECK(edge.status == ConeStatus::Boundary);

  CHECK(in_Ck(Spectrum{1.0, 2.0, 0.5}, 3).status == ConeStatus::Inside);
  CHECK(in_Ck(Spectrum{1.0, 1.0, -1.0}, 2).status == ConeStatus::Outside);
  CHECK_THROWS_AS(in_Ck(Spectrum{1.0}, 2), ValidationError);
}

TEST_CASE("in_Ck with k = n is the nonnegativity test") {
  Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const Index n = 2 + static_cast<Index>(rng.next_u64() % 6);
    RVector lam(n);
    for (Index i = 0; i < n; ++i) lam[i] = rng.normal();
    if (lam.cwiseAbs().minCoeff() < 1e-6) continue;  // stay away from the boundary
    const bool nonneg = lam.minCoeff() > 0.0;
    CHECK(in_Ck(Spectrum{RVector(lam)}, n).passes() == nonneg);
  }
}

TEST_CASE("speyer_reduce drops the last entry and stays in C_{k-1}") {
  const Spectrum reduced = speyer_reduce(Spectrum{10.0, 4.0, -1.0, -2.0}, 2);
  CHECK(reduced.size() == 3);
  CHECK(reduced[0] == 10.0);
  CHECK(reduced[2] == -1.0);
  CHECK(elem_sym_all(reduced)[1] == doctest::Approx(13.0));

  const Spectrum ones = speyer_reduce(Spectrum{1.0, 1.0, 1.0, 1.0}, 3);
  CHECK(ones.size() == 3);
  CHECK(ones.values().isApproxToConstant(1.0));

  CHECK_THROWS_AS(speyer_reduce(Spectrum{1.0, 1.0, -1.0}, 2), ValidationError);
}

TEST_CASE("speyer_reduce iterated to C_1 keeps the sum nonnegative") {
  Rng rng(37);
  int done = 0;
  while (done < 1000) {
    const Index n = 3 + static_cast<Index>(rng.next_u64() % 6);  // up to 8
    const Index k = 2 + static_cast<Index>(rng.next_u64() % (n - 1));
    const auto lam = oracle::random_in_Ck(n, k, rng, 2000);
    if (!lam) continue;
    Spectrum cur{RVector(*lam)};
    for (Index step = 0; step < k - 1; ++step) {
      cur = speyer_reduce(cur, k - step);
    }
    CHECK(cur.size() == n - k + 1);
    CHECK(cur.sum() >= -1e-9 * std::max(1.0, cur.values().cwiseAbs().maxCoeff()));
    ++done;
  }
}

TEST_CASE("in_C2_dual closed form") {
  CHECK(in_C2_dual(Spectrum{1.0 / 3, 1.0 / 3, 1.0 / 3}).status == ConeStatus::Inside);
  CHECK(in_C2_dual(Spectrum{2.0 / 3, 1.0 / 3, 0.0}).status == ConeStatus::Outside);

  // boundary family: lambda = 1 + c*w with sum(w) = 0 and c^2 = n/(n-1)
  for (Index n : {3, 4, 6}) {
    RVector w = RVector::Zero(n);
    w[0] = 1.0 / std::sqrt(2.0);
    w[1] = -1.0 / std::sqrt(2.0);
    const double c = std::sqrt(static_cast<double>(n) / static_cast<double>(n - 1));
    RVector lam = RVector::Ones(n) + c * w;
    const ConeVerdict verdict = in_C2_dual(Spectrum{RVector(lam)}, 1e-9);
    CHECK(verdict.status == ConeStatus::Boundary);
  }
}

TEST_CASE("dual falsifier finds violations and reports raw pairings") {
  const ConeVerdict out = in_Ck_dual_falsify(Spectrum{0.8, 0.2, 0.0}, 2, 50, 1);
  CHECK(out.status == ConeStatus::Outside);
  CHECK(out.violator.has_value());
  // hand example mu = (1,1,-1/2) gives pairing -0.2; the normalized extreme
  // candidate reaches the same ray so the raw value scales by its norm
  const double pairing = min_permuted_pairing(RVector(Spectrum{0.8, 0.2, 0.0}.values()),
                                              *out.violator);
  CHECK(pairing == doctest::Approx(out.margin));
  CHECK(out.margin < 0.0);
  // agreement with the closed form
  CHECK(in_C2_dual(Spectrum{0.8, 0.2, 0.0}).status == ConeStatus::Outside);

  const ConeVerdict ones = in_Ck_dual_falsify(Spectrum{1.0, 1.0, 1.0}, 2, 200, 2);
  CHECK(ones.status == ConeStatus::Inside);  // never falsified

  // k = n-1 extreme candidate catches lambda_max > 1 - 1/n
  for (Index n : {3, 4, 5}) {
    RVector lam = RVector::Zero(n);
    lam[0] = 1.0 - 1.0 / static_cast<double>(n) + 0.05;
    const double rest = (1.0 - lam[0]) / static_cast<double>(n - 1);
    for (Index i = 1; i < n; ++i) lam[i] = rest;
    const ConeVerdict v = in_Ck_dual_falsify(Spectrum{RVector(lam)}, n - 1, 0, 3);
    CHECK(v.status == ConeStatus::Outside);
  }
}

TEST_CASE("hand micro-example: mu = (1,1,-1/2) pairing") {
  RVector lam(3);
  lam << 0.8, 0.2, 0.0;
  RVector mu(3);
  mu << 1.0, 1.0, -0.5;
  CHECK(min_permuted_pairing(lam, mu) == doctest::Approx(-0.2));
}

TEST_CASE("dual-cone soundness: inside elements never pair negatively") {
  Rng rng(41);
  int done = 0;
  while (done < 1000) {
    const Index n = 3 + static_cast<Index>(rng.next_u64() % 4);
    RVector lam(n);
    for (Index i = 0; i < n; ++i) lam[i] = std::abs(rng.normal());
    if (!in_C2_dual(Spectrum{RVector(lam)}, 1e-9).passes()) continue;
    const auto mu = oracle::random_in_Ck(n, 2, rng, 2000);
    if (!mu) continue;
    CHECK(min_permuted_pairing(lam, *mu) >= -1e-9 * lam.norm() * mu->norm());
    // the falsifier agrees with the closed form on these members
    const ConeVerdict v = in_Ck_dual_falsify(Spectrum{RVector(lam)}, 2, 20, rng.next_u64());
    CHECK(v.status != ConeStatus::Outside);
    ++done;
  }
}

TEST_CASE("newton inequality consistency inside C_k") {
  Rng rng(43);
  int done = 0;
  while (done < 400) {
    const Index n = 3 + static_cast<Index>(rng.next_u64() % 6);
    const Index k = 2 + static_cast<Index>(rng.next_u64() % (n - 1));
    const auto lam = oracle::random_in_Ck(n, k, rng, 2000);
    if (!lam) continue;
    const RVector s = elem_sym_all(Spectrum{RVector(*lam)});
    for (Index j = 1; j + 1 <= n; ++j) {
      if (s[j - 1] <= 0.0 || s[j + 1] <= 0.0) continue;
      const double lhs = s[j - 1] * s[j + 1] / (binomial(n, j - 1) * binomial(n, j + 1));
      const double rhs = std::pow(s[j] / binomial(n, j), 2);
      CHECK(lhs <= rhs + 1e-9 * std::max(1.0, std::abs(rhs)));
    }
    ++done;
  }
}

TEST_CASE("directional derivative coefficients") {
  const Spectrum x{1.0, 2.0, 3.0};
  const RVector s = elem_sym_all(x);

  const RVector k0 = directional_derivative_coeffs(x, 0);
  CHECK(k0.size() == 4);
  for (Index j = 0; j <= 3; ++j) CHECK(k0[j] == doctest::Approx(s[j]));

  const RVector k1 = directional_derivative_coeffs(x, 1);
  CHECK(k1.size() == 3);
  CHECK(k1[0] == doctest::Approx(3.0));
  CHECK(k1[1] == doctest::Approx(2.0 * s[1]));
  CHECK(k1[2] == doctest::Approx(1.0 * s[2]));

  const RVector zero = directional_derivative_coeffs(Spectrum{0.0, 0.0, 0.0, 0.0}, 2);
  CHECK(zero[0] > 0.0);
  for (Index j = 1; j < zero.size(); ++j) CHECK(zero[j] == 0.0);

  CHECK_THROWS_AS(directional_derivative_coeffs(x, 3), ValidationError);
}

namespace {

// Roots via the companion matrix of the monic normalization (test oracle),
// for coeffs[0] t^d + coeffs[1] t^{d-1} + ... + coeffs[d].
Eigen::VectorXcd poly_roots(const RVector& coeffs) {
  const Index deg = coeffs.size() - 1;
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
  for (Index i = 0; i < deg; ++i) comp(0, i) = -coeffs[i + 1] / coeffs[0];
  for (Index i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  return Eigen::EigenSolver<Eigen::MatrixXd>(comp).eigenvalues();
}

}  // namespace

TEST_CASE("derivative polynomials are real rooted on C_{n-k} samples") {
  Rng rng(47);
  int done = 0;
  while (done < 200) {
    const Index n = 3 + static_cast<Index>(rng.next_u64() % 4);  // up to 6
    const Index k = static_cast<Index>(rng.next_u64() % (n - 1));  // 0..n-2
    const auto x = oracle::random_in_Ck(n, n - k, rng, 2000);
    if (!x) continue;
    const RVector coeffs = directional_derivative_coeffs(Spectrum{RVector(*x)}, k);
    const Eigen::VectorXcd roots = poly_roots(coeffs);
    const double scale = std::max(1.0, roots.cwiseAbs().maxCoeff());
    for (Index i = 0; i < roots.size(); ++i) {
      CHECK(std::abs(roots[i].imag()) <= 1e-6 * scale);
    }
    ++done;
  }
}
