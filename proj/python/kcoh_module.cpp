// Python bindings for the main library operations. Matrices cross the
// boundary as numpy arrays (complex128); domain invariants are enforced by
// the underlying C++ types and surface as ValueError.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kcoh/linalg.hpp"
#include "kcoh/states.hpp"
#include "kcoh/sympoly.hpp"
#include "kcoh/version.hpp"
#include "kcoh/witness.hpp"

namespace py = pybind11;
using namespace kcoh;

namespace {

std::vector<Index> subset_vec(const IndexSubset& s) { return s.indices(); }

py::dict cone_verdict_dict(const ConeVerdict& v) {
  py::dict d;
  d["status"] = std::string(to_string(v.status));
  d["margin"] = v.margin;
  d["criterion"] = v.criterion;
  if (v.violator.has_value()) {
    d["violator"] = *v.violator;
  } else {
    d["violator"] = py::none();
  }
  return d;
}

py::dict certificate_dict(const Certificate& cert) {
  py::dict d;
  if (const auto* cf = std::get_if<ClosedFormCert>(&cert)) {
    d["kind"] = "closed_form";
    d["name"] = cf->name;
    d["margin"] = cf->margin;
  } else if (const auto* fl = std::get_if<FeasibleLambdaCert>(&cert)) {
    d["kind"] = "feasible_lambda";
    d["matrix"] = CMatrix(fl->lambda.mat());
  } else if (const auto* vp = std::get_if<ViolatingPairCert>(&cert)) {
    d["kind"] = "violating_pair";
    d["witness"] = CMatrix(vp->witness.mat());
    d["unitary"] = CMatrix(vp->unitary.mat());
    d["value"] = vp->value;
  } else if (const auto* vc = std::get_if<ViolatingConeElementCert>(&cert)) {
    d["kind"] = "violating_cone_element";
    d["mu"] = vc->mu;
    d["value"] = vc->value;
  } else if (const auto* rb = std::get_if<RankBoundCert>(&cert)) {
    d["kind"] = "rank_bound";
    d["rank"] = rb->rank;
    d["bound"] = rb->bound;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(kcoh, m) {
  m.doc() = "k-locally PSD matrices, factor width, and absolute k-incoherence";
  m.attr("__version__") = kToolVersion;

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  // linalg
  m.def(
      "eig_hermitian",
      [](const CMatrix& a) {
        const EigResult r = eig_hermitian(HermitianMatrix(a, 1e-9));
        return py::make_tuple(r.values.values(), CMatrix(r.vectors.mat()));
      },
      py::arg("matrix"), "Eigenvalues (descending) and eigenvector columns");
  m.def(
      "nearest_psd",
      [](const CMatrix& a) { return CMatrix(nearest_psd(HermitianMatrix(a, 1e-9)).mat()); },
      py::arg("matrix"));
  m.def(
      "principal_submatrix",
      [](const CMatrix& a, const std::vector<Index>& subset) {
        const HermitianMatrix h(a, 1e-9);
        return CMatrix(principal_submatrix(h, IndexSubset(subset, h.dim())).mat());
      },
      py::arg("matrix"), py::arg("subset"));
  m.def(
      "haar_unitary",
      [](Index n, std::uint64_t seed) { return CMatrix(haar_unitary(n, seed).mat()); },
      py::arg("n"), py::arg("seed") = 0);
  m.def(
      "circulant_from_spectrum",
      [](const RVector& lam) { return CMatrix(circulant_from_spectrum(Spectrum(lam)).mat()); },
      py::arg("spectrum"));

  // sympoly
  m.def("elem_sym_all", [](const RVector& lam) { return elem_sym_all(Spectrum(lam)); },
        py::arg("spectrum"));
  m.def(
      "in_Ck",
      [](const RVector& lam, Index k, double tol) {
        return cone_verdict_dict(in_Ck(Spectrum(lam), k, tol));
      },
      py::arg("spectrum"), py::arg("k"), py::arg("tol") = 1e-9);
  m.def(
      "speyer_reduce",
      [](const RVector& lam, Index k) { return speyer_reduce(Spectrum(lam), k).values(); },
      py::arg("spectrum"), py::arg("k"));
  m.def(
      "in_C2_dual",
      [](const RVector& lam, double tol) {
        return cone_verdict_dict(in_C2_dual(Spectrum(lam), tol));
      },
      py::arg("spectrum"), py::arg("tol") = 1e-9);
  m.def(
      "in_Ck_dual_falsify",
      [](const RVector& lam, Index k, int samples, std::uint64_t seed, double tol) {
        return cone_verdict_dict(in_Ck_dual_falsify(Spectrum(lam), k, samples, seed, tol));
      },
      py::arg("spectrum"), py::arg("k"), py::arg("samples") = 500, py::arg("seed") = 0,
      py::arg("tol") = 1e-9);
  m.def(
      "directional_derivative_coeffs",
      [](const RVector& x, Index k) { return directional_derivative_coeffs(Spectrum(x), k); },
      py::arg("x"), py::arg("k"));

  // witness
  m.def(
      "is_k_locally_psd",
      [](const CMatrix& x, Index k, double tol) {
        const WitnessReport r = is_k_locally_psd(HermitianMatrix(x, 1e-9), k, tol);
        py::dict d;
        d["is_member"] = r.is_member;
        d["worst_subset"] = subset_vec(r.worst_subset);
        d["worst_min_eig"] = r.worst_min_eig;
        d["neg_eig_count"] = r.neg_eig_count;
        return d;
      },
      py::arg("matrix"), py::arg("k"), py::arg("tol") = 1e-8);
  m.def(
      "project_onto_Ik_dual",
      [](const CMatrix& y, Index k, double tol, int max_cycles) {
        const ConstructionResult r = project_onto_Ik_dual(HermitianMatrix(y, 1e-9), k, tol,
                                                          max_cycles);
        return py::make_tuple(CMatrix(r.matrix.mat()), r.residual, r.iterations, r.converged);
      },
      py::arg("matrix"), py::arg("k"), py::arg("tol") = 1e-10, py::arg("max_cycles") = 2000);
  m.def(
      "construct_vandermonde_witness",
      [](Index n, Index k, const RVector& nodes) {
        const VandermondeWitness vw = construct_vandermonde_witness(n, k, nodes);
        return py::make_tuple(CMatrix(vw.matrix.mat()), vw.c);
      },
      py::arg("n"), py::arg("k"), py::arg("nodes"));
  m.def(
      "construct_circulant_witness",
      [](const RVector& lam) { return CMatrix(construct_circulant_witness(Spectrum(lam)).mat()); },
      py::arg("spectrum"));
  m.def(
      "isospectral_projection",
      [](const CMatrix& x, const RVector& lam) {
        return CMatrix(isospectral_projection(HermitianMatrix(x, 1e-9), Spectrum(lam)).mat());
      },
      py::arg("matrix"), py::arg("spectrum"));
  m.def(
      "construct_with_spectrum",
      [](const RVector& lam, Index k, std::uint64_t seed, double stall_tol, int max_iters,
         double residual_target) {
        const ConstructionResult r = construct_with_spectrum(Spectrum(lam), k, seed, stall_tol,
                                                             max_iters, residual_target);
        return py::make_tuple(CMatrix(r.matrix.mat()), r.residual, r.iterations, r.converged);
      },
      py::arg("spectrum"), py::arg("k"), py::arg("seed") = 0, py::arg("stall_tol") = 1e-9,
      py::arg("max_iters") = 5000, py::arg("residual_target") = 1e-6);

  // states
  m.def(
      "is_k_incoherent",
      [](const CMatrix& rho, Index k, double tol, int max_cycles) {
        const KIncoherenceResult r =
            is_k_incoherent(DensityMatrix(HermitianMatrix(rho, 1e-9)), k, tol, max_cycles);
        py::dict d;
        d["status"] = std::string(to_string(r.status));
        d["residual"] = r.residual;
        d["cycles"] = r.cycles;
        if (r.witness.has_value()) {
          d["witness"] = CMatrix(r.witness->mat());
          d["witness_value"] = r.witness_value;
        } else {
          d["witness"] = py::none();
        }
        return d;
      },
      py::arg("rho"), py::arg("k"), py::arg("tol") = 1e-8, py::arg("max_cycles") = 2000);
  m.def(
      "majorized_by",
      [](const RVector& x, const RVector& y, double tol) {
        return majorized_by(Spectrum(x), Spectrum(y), tol);
      },
      py::arg("x"), py::arg("y"), py::arg("tol") = 1e-9);
  m.def(
      "lambda_feasibility",
      [](const RVector& lam, double tol, int max_cycles, std::uint64_t seed, int cone_samples) {
        const FeasibilityResult r =
            lambda_feasibility(Spectrum(lam), tol, max_cycles, seed, cone_samples);
        py::dict d;
        d["status"] = std::string(to_string(r.status));
        d["cycles"] = r.cycles;
        d["gap"] = r.gap;
        if (r.certificate.has_value()) {
          d["certificate"] = certificate_dict(*r.certificate);
        } else {
          d["certificate"] = py::none();
        }
        return d;
      },
      py::arg("spectrum"), py::arg("tol") = 1e-8, py::arg("max_cycles") = 5000,
      py::arg("seed") = 0, py::arg("cone_samples") = 500);
  m.def(
      "check_abs_k_incoherent",
      [](const RVector& lam, Index k, int haar_samples, int cone_samples, int dykstra_cycles,
         std::uint64_t seed) {
        SearchBudget budget;
        budget.haar_samples = haar_samples;
        budget.cone_samples = cone_samples;
        budget.dykstra_cycles = dykstra_cycles;
        budget.seed = seed;
        const AbsVerdict v = check_abs_spectrum(Spectrum(lam), k, budget);
        py::dict d;
        d["status"] = std::string(to_string(v.status));
        py::list log;
        for (const auto& entry : v.criteria_log) {
          py::dict e;
          e["test"] = entry.test;
          e["outcome"] = entry.outcome;
          e["margin"] = entry.margin;
          log.append(e);
        }
        d["criteria_log"] = log;
        if (v.certificate.has_value()) {
          d["certificate"] = certificate_dict(*v.certificate);
        } else {
          d["certificate"] = py::none();
        }
        return d;
      },
      py::arg("spectrum"), py::arg("k"), py::arg("haar_samples") = 200,
      py::arg("cone_samples") = 500, py::arg("dykstra_cycles") = 2000, py::arg("seed") = 0);
  m.def(
      "embed_state",
      [](const CMatrix& rho) {
        return CMatrix(embed_state(DensityMatrix(HermitianMatrix(rho, 1e-9))).matrix().mat());
      },
      py::arg("rho"));
  m.def(
      "uhlmann_mix_check",
      [](const CMatrix& rho, const CMatrix& sigma, int max_terms, std::uint64_t seed) {
        return uhlmann_mix_check(DensityMatrix(HermitianMatrix(rho, 1e-9)),
                                 DensityMatrix(HermitianMatrix(sigma, 1e-9)), max_terms, seed);
      },
      py::arg("rho"), py::arg("sigma"), py::arg("max_terms") = 4096, py::arg("seed") = 0);
}
