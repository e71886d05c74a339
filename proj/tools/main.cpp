// kcoh: batch front end for k-local PSD membership, witness constructions,
// spectral cone tests, and absolute k-incoherence verdicts. Reports go to
// stdout as JSON, matrices to --out paths, diagnostics to stderr.
// Exit codes: 0 affirmative, 1 negative, 2 usage/validation, 3 indeterminate.

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "kcoh/io.hpp"
#include "kcoh/linalg.hpp"
#include "kcoh/states.hpp"
#include "kcoh/sympoly.hpp"
#include "kcoh/version.hpp"
#include "kcoh/witness.hpp"

namespace {

using kcoh::Json;

constexpr int kExitYes = 0;
constexpr int kExitNo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIndeterminate = 3;

struct CommonOptions {
  bool compact = false;
};

void emit(const Json& report, const CommonOptions& common) {
  std::cout << (common.compact ? report.dump() : report.dump(2)) << "\n";
}

Json make_report(const std::string& command, Json inputs, const std::string& status,
                 const Json& certificate, Json margins, std::uint64_t seed) {
  return Json{{"command", command},       {"inputs", std::move(inputs)},
              {"status", status},         {"certificate", certificate},
              {"margins", std::move(margins)}, {"seed", seed},
              {"tool_version", kcoh::kToolVersion}};
}

kcoh::HermitianMatrix load_matrix(const std::string& path) {
  return kcoh::hermitian_from_json(Json::parse(kcoh::read_text_file(path)));
}

kcoh::RVector load_spectrum(const std::string& inline_json, const std::string& path) {
  if (!inline_json.empty()) {
    return kcoh::spectrum_from_json(Json::parse(inline_json));
  }
  if (!path.empty()) {
    return kcoh::spectrum_from_json(Json::parse(kcoh::read_text_file(path)));
  }
  throw kcoh::ValidationError("expected --spectrum or --in");
}

Json log_to_json(const std::vector<kcoh::CriterionOutcome>& log) {
  Json out = Json::array();
  for (const auto& entry : log) {
    out.push_back(Json{{"test", entry.test}, {"outcome", entry.outcome}, {"margin", entry.margin}});
  }
  return out;
}

Json margins_from_log(const std::vector<kcoh::CriterionOutcome>& log) {
  Json margins = Json::object();
  for (const auto& entry : log) {
    margins[entry.test] = entry.margin;
  }
  return margins;
}

int run_witness_check(const std::string& path, int k, double tol, const CommonOptions& common) {
  const kcoh::HermitianMatrix x = load_matrix(path);
  const kcoh::WitnessReport report = kcoh::is_k_locally_psd(x, k, tol);
  Json subset = Json::array();
  for (auto i : report.worst_subset.indices()) subset.push_back(i);
  const Json cert = Json{{"kind", "witness_report"},
                         {"worst_subset", subset},
                         {"worst_min_eig", report.worst_min_eig},
                         {"neg_eig_count", report.neg_eig_count}};
  emit(make_report("witness check", Json{{"in", path}, {"k", k}, {"tol", tol}},
                   report.is_member ? "member" : "non_member", cert,
                   Json{{"worst_min_eig", report.worst_min_eig}}, 0),
       common);
  return report.is_member ? kExitYes : kExitNo;
}

int run_witness_project(const std::string& path, int k, double tol, int max_cycles,
                        const std::string& out, const CommonOptions& common) {
  const kcoh::HermitianMatrix y = load_matrix(path);
  const kcoh::ConstructionResult result = kcoh::project_onto_Ik_dual(y, k, tol, max_cycles);
  if (!out.empty()) {
    kcoh::write_text_file(out, kcoh::matrix_to_json(result.matrix.mat()).dump(2) + "\n");
  }
  const kcoh::WitnessReport member = kcoh::is_k_locally_psd(result.matrix, k, 10.0 * tol);
  emit(make_report("witness project",
                   Json{{"in", path}, {"k", k}, {"tol", tol}, {"max_iters", max_cycles},
                        {"out", out}},
                   result.converged ? "converged" : "stalled", nullptr,
                   Json{{"residual", result.residual},
                        {"iterations", result.iterations},
                        {"worst_min_eig", member.worst_min_eig}},
                   0),
       common);
  return result.converged ? kExitYes : kExitNo;
}

int run_construct(const std::string& spectrum_json, const std::string& in, int k,
                  const std::string& method, std::uint64_t seed, double tol, int max_iters,
                  const std::string& nodes_csv, const std::string& out,
                  const CommonOptions& common) {
  const kcoh::RVector lam = load_spectrum(spectrum_json, in);
  const kcoh::Spectrum spectrum{kcoh::RVector(lam)};
  const auto n = lam.size();
  Json inputs{{"spectrum", kcoh::spectrum_to_json(lam)}, {"k", k},      {"method", method},
              {"seed", seed},                            {"tol", tol},  {"max_iters", max_iters},
              {"out", out}};

  kcoh::HermitianMatrix matrix = kcoh::HermitianMatrix::Identity(n);
  Json margins = Json::object();
  std::string status = "converged";
  bool converged = true;

  if (method == "alternating") {
    if (!kcoh::in_Ck(spectrum, k).passes()) {
      std::cerr << "warning: spectrum is outside C_" << k
                << "; the iteration may not converge\n";
    }
    const kcoh::ConstructionResult result =
        kcoh::construct_with_spectrum(spectrum, k, seed, tol, max_iters);
    matrix = result.matrix;
    converged = result.converged;
    status = converged ? "converged" : "stalled";
    margins["residual"] = result.residual;
    margins["iterations"] = result.iterations;
  } else if (method == "circulant") {
    matrix = kcoh::construct_circulant_witness(spectrum);
    margins["residual"] = 0.0;
    margins["iterations"] = 1;
  } else if (method == "vandermonde") {
    kcoh::RVector nodes = kcoh::RVector::LinSpaced(n, 1.0, static_cast<double>(n));
    if (!nodes_csv.empty()) {
      const Json parsed = Json::parse("[" + nodes_csv + "]");
      nodes = kcoh::spectrum_from_json(parsed);
    }
    const kcoh::VandermondeWitness vw =
        kcoh::construct_vandermonde_witness(n, k, nodes);
    matrix = vw.matrix;
    margins["c"] = vw.c;
    margins["residual"] = 0.0;
    margins["iterations"] = 1;
  } else {
    throw kcoh::ValidationError("construct: unknown method " + method);
  }

  if (!out.empty()) {
    kcoh::write_text_file(out, kcoh::matrix_to_json(matrix.mat()).dump(2) + "\n");
  }
  emit(make_report("construct", std::move(inputs), status, nullptr, std::move(margins), seed),
       common);
  return converged ? kExitYes : kExitNo;
}

int run_spectrum_cone(const std::string& spectrum_json, const std::string& in, int k, bool dual,
                      bool falsify, int samples, std::uint64_t seed, double tol,
                      const CommonOptions& common) {
  const kcoh::RVector lam = load_spectrum(spectrum_json, in);
  const kcoh::Spectrum spectrum{kcoh::RVector(lam)};
  const auto n = lam.size();
  Json inputs{{"spectrum", kcoh::spectrum_to_json(lam)}, {"k", k},       {"dual", dual},
              {"falsify", falsify},                      {"samples", samples}, {"tol", tol}};

  kcoh::ConeVerdict verdict{kcoh::ConeStatus::Inside, 0.0, "", std::nullopt};
  bool one_sided = false;
  if (!dual) {
    verdict = kcoh::in_Ck(spectrum, k, tol);
  } else if (!falsify && k == 2) {
    verdict = kcoh::in_C2_dual(spectrum, tol);
  } else if (!falsify && k == 1) {
    // C_1 dual is the ray through the all-ones vector
    const double dev = lam.maxCoeff() - lam.minCoeff();
    verdict = {dev <= tol ? kcoh::ConeStatus::Inside : kcoh::ConeStatus::Outside, -dev,
               "C1-dual-uniform-ray", std::nullopt};
  } else if (!falsify && k == n) {
    // C_n is self-dual: the nonnegative orthant
    const double m = lam.minCoeff();
    kcoh::ConeStatus st = kcoh::ConeStatus::Inside;
    if (m < -tol) {
      st = kcoh::ConeStatus::Outside;
    } else if (std::abs(m) <= tol) {
      st = kcoh::ConeStatus::Boundary;
    }
    verdict = {st, m, "Cn-dual-orthant", std::nullopt};
  } else {
    verdict = kcoh::in_Ck_dual_falsify(spectrum, k, samples, seed, tol);
    one_sided = verdict.status != kcoh::ConeStatus::Outside;
  }

  Json cert = nullptr;
  if (verdict.violator.has_value()) {
    cert = kcoh::certificate_to_json(
        kcoh::ViolatingConeElementCert{*verdict.violator, verdict.margin});
  }
  const std::string status = one_sided ? "indeterminate" : kcoh::to_string(verdict.status);
  emit(make_report("spectrum cone", std::move(inputs), status, cert,
                   Json{{verdict.criterion, verdict.margin}}, seed),
       common);
  if (one_sided) return kExitIndeterminate;
  return verdict.passes() ? kExitYes : kExitNo;
}

int run_state_check(const std::string& path, int k, double tol, int max_cycles,
                    const CommonOptions& common) {
  const kcoh::DensityMatrix rho(load_matrix(path));
  const kcoh::KIncoherenceResult result = kcoh::is_k_incoherent(rho, k, tol, max_cycles);
  Json cert = nullptr;
  if (result.status == kcoh::MembershipStatus::NonMember) {
    cert = kcoh::certificate_to_json(kcoh::ViolatingPairCert{
        *result.witness, kcoh::UnitaryMatrix::Identity(rho.dim()), result.witness_value});
  } else if (result.status == kcoh::MembershipStatus::Member) {
    Json blocks = Json::array();
    for (const auto& [subset, block] : result.decomposition) {
      Json idx = Json::array();
      for (auto i : subset.indices()) idx.push_back(i);
      blocks.push_back(Json{{"subset", idx}, {"matrix", kcoh::matrix_to_json(block.mat())}});
    }
    cert = Json{{"kind", "block_decomposition"}, {"blocks", std::move(blocks)}};
  }
  emit(make_report("state check",
                   Json{{"in", path}, {"k", k}, {"tol", tol}, {"max_iters", max_cycles}},
                   kcoh::to_string(result.status), cert,
                   Json{{"residual", result.residual}, {"cycles", result.cycles}}, 0),
       common);
  switch (result.status) {
    case kcoh::MembershipStatus::Member:
      return kExitYes;
    case kcoh::MembershipStatus::NonMember:
      return kExitNo;
    default:
      return kExitIndeterminate;
  }
}

kcoh::Spectrum state_spectrum(const std::string& spectrum_json, const std::string& in) {
  if (!spectrum_json.empty() || (!in.empty() && in.ends_with(".spectrum.json"))) {
    return kcoh::Spectrum{load_spectrum(spectrum_json, in)};
  }
  // Try a matrix file first, fall back to a plain spectrum array.
  const Json parsed = Json::parse(kcoh::read_text_file(in));
  if (parsed.is_array()) {
    return kcoh::Spectrum{kcoh::spectrum_from_json(parsed)};
  }
  const kcoh::DensityMatrix rho(kcoh::hermitian_from_json(parsed));
  return rho.spectrum();
}

int run_state_absolute(const std::string& spectrum_json, const std::string& in, int k,
                       const kcoh::SearchBudget& budget, const CommonOptions& common) {
  const kcoh::Spectrum lam = state_spectrum(spectrum_json, in);
  const kcoh::AbsVerdict verdict = kcoh::check_abs_spectrum(lam, k, budget);
  Json cert = nullptr;
  if (verdict.certificate.has_value()) {
    cert = kcoh::certificate_to_json(*verdict.certificate);
  }
  Json report = make_report(
      "state absolute",
      Json{{"spectrum", kcoh::spectrum_to_json(lam.values())},
           {"k", k},
           {"budget_haar", budget.haar_samples},
           {"budget_cone", budget.cone_samples},
           {"max_iters", budget.dykstra_cycles}},
      kcoh::to_string(verdict.status), cert, margins_from_log(verdict.criteria_log), budget.seed);
  report["criteria_log"] = log_to_json(verdict.criteria_log);
  emit(report, common);
  switch (verdict.status) {
    case kcoh::AbsStatus::AbsolutelyIncoherent:
      return kExitYes;
    case kcoh::AbsStatus::NotAbsolutelyIncoherent:
      return kExitNo;
    default:
      return kExitIndeterminate;
  }
}

int run_state_embed_test(const std::string& spectrum_json, const std::string& in, int k,
                         const kcoh::SearchBudget& budget, const CommonOptions& common) {
  const kcoh::Spectrum lam = state_spectrum(spectrum_json, in);
  const auto n = lam.size();
  const int kk = (k > 0) ? k : static_cast<int>(n) - 1;
  const kcoh::AbsVerdict base = kcoh::check_abs_spectrum(lam, kk, budget);

  kcoh::RVector padded(n + 1);
  padded.head(n) = lam.sorted_descending();
  padded[n] = 0.0;
  const kcoh::AbsVerdict embedded =
      kcoh::check_abs_spectrum(kcoh::Spectrum{std::move(padded)}, kk + 1, budget);

  std::string status = "undecided";
  if (base.status != kcoh::AbsStatus::Indeterminate &&
      embedded.status != kcoh::AbsStatus::Indeterminate) {
    status = (base.status == embedded.status) ? "agree" : "disagree";
  }
  Json report = make_report(
      "state embed-test",
      Json{{"spectrum", kcoh::spectrum_to_json(lam.values())}, {"k", kk}},
      status, nullptr,
      Json{{"base_status", std::string(kcoh::to_string(base.status))},
           {"embedded_status", std::string(kcoh::to_string(embedded.status))}},
      budget.seed);
  report["criteria_log"] = log_to_json(base.criteria_log);
  report["embedded_criteria_log"] = log_to_json(embedded.criteria_log);
  emit(report, common);
  if (status == "agree") return kExitYes;
  if (status == "disagree") return kExitNo;
  return kExitIndeterminate;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-locally PSD matrices, factor width, and absolute k-incoherence"};
  app.set_version_flag("--version", kcoh::kToolVersion);
  app.require_subcommand(1);

  CommonOptions common;
  app.add_flag("--json", common.compact, "emit compact single-line JSON");

  std::string in_path;
  std::string out_path;
  std::string spectrum_json;
  std::string method = "alternating";
  std::string nodes_csv;
  int k = 1;
  double tol = -1.0;  // per-command defaults applied below
  int max_iters = -1;
  std::uint64_t seed = 0;
  bool dual = false;
  bool falsify = false;
  int budget_cone = 500;
  int budget_haar = 200;

  int exit_code = kExitUsage;

  auto* witness = app.add_subcommand("witness", "k-local PSD membership and projection");
  witness->fallthrough();
  auto* wcheck = witness->add_subcommand("check", "test every k x k principal submatrix");
  wcheck->fallthrough();
  wcheck->add_option("--in", in_path, "matrix file")->required();
  wcheck->add_option("--k", k, "submatrix order")->required();
  wcheck->add_option("--tol", tol, "membership tolerance (default 1e-8)");
  wcheck->callback([&] {
    exit_code = run_witness_check(in_path, k, tol >= 0 ? tol : 1e-8, common);
  });

  auto* wproject = witness->add_subcommand("project", "Frobenius projection onto I_{k,n} dual");
  wproject->fallthrough();
  wproject->add_option("--in", in_path, "matrix file")->required();
  wproject->add_option("--k", k, "submatrix order")->required();
  wproject->add_option("--tol", tol, "Dykstra stop tolerance (default 1e-10)");
  wproject->add_option("--max-iters", max_iters, "cycle cap (default 2000)");
  wproject->add_option("--out", out_path, "output matrix file");
  wproject->callback([&] {
    exit_code = run_witness_project(in_path, k, tol >= 0 ? tol : 1e-10,
                                    max_iters > 0 ? max_iters : 2000, out_path, common);
  });

  auto* construct = app.add_subcommand("construct", "build a k-locally PSD matrix");
  construct->fallthrough();
  construct->add_option("--spectrum", spectrum_json, "inline JSON spectrum");
  construct->add_option("--in", in_path, "spectrum file");
  construct->add_option("--k", k, "submatrix order")->required();
  construct->add_option("--method", method, "alternating | circulant | vandermonde");
  construct->add_option("--seed", seed, "rng seed (default 0)");
  construct->add_option("--tol", tol, "stall tolerance (default 1e-9)");
  construct->add_option("--max-iters", max_iters, "iteration cap (default 5000)");
  construct->add_option("--nodes", nodes_csv, "comma-separated Vandermonde nodes");
  construct->add_option("--out", out_path, "output matrix file");
  construct->callback([&] {
    exit_code = run_construct(spectrum_json, in_path, k, method, seed, tol >= 0 ? tol : 1e-9,
                              max_iters > 0 ? max_iters : 5000, nodes_csv, out_path, common);
  });

  auto* spectrum = app.add_subcommand("spectrum", "cone membership tests");
  spectrum->fallthrough();
  auto* cone = spectrum->add_subcommand("cone", "C_k and dual-cone membership");
  cone->fallthrough();
  cone->add_option("--spectrum", spectrum_json, "inline JSON spectrum");
  cone->add_option("--in", in_path, "spectrum file");
  cone->add_option("--k", k, "cone index")->required();
  cone->add_flag("--dual", dual, "test the dual cone C_k degrees");
  cone->add_flag("--falsify", falsify, "force the sampling falsifier");
  cone->add_option("--budget-cone", budget_cone, "falsifier samples (default 500)");
  cone->add_option("--seed", seed, "rng seed (default 0)");
  cone->add_option("--tol", tol, "tolerance (default 1e-9)");
  cone->callback([&] {
    exit_code = run_spectrum_cone(spectrum_json, in_path, k, dual, falsify, budget_cone, seed,
                                  tol >= 0 ? tol : 1e-9, common);
  });

  auto* state = app.add_subcommand("state", "density-matrix coherence tests");
  state->fallthrough();
  auto* scheck = state->add_subcommand("check", "k-incoherence membership");
  scheck->fallthrough();
  scheck->add_option("--in", in_path, "density matrix file")->required();
  scheck->add_option("--k", k, "coherence order")->required();
  scheck->add_option("--tol", tol, "residual tolerance (default 1e-8)");
  scheck->add_option("--max-iters", max_iters, "cycle cap (default 2000)");
  scheck->callback([&] {
    exit_code = run_state_check(in_path, k, tol >= 0 ? tol : 1e-8,
                                max_iters > 0 ? max_iters : 2000, common);
  });

  auto* sabs = state->add_subcommand("absolute", "absolute k-incoherence battery");
  sabs->fallthrough();
  sabs->add_option("--in", in_path, "density matrix or spectrum file");
  sabs->add_option("--spectrum", spectrum_json, "inline JSON spectrum");
  sabs->add_option("--k", k, "coherence order")->required();
  sabs->add_option("--seed", seed, "rng seed (default 0)");
  sabs->add_option("--budget-haar", budget_haar, "Haar falsifier samples (default 200)");
  sabs->add_option("--budget-cone", budget_cone, "cone falsifier samples (default 500)");
  sabs->add_option("--max-iters", max_iters, "Dykstra cycle cap (default 2000)");
  sabs->callback([&] {
    kcoh::SearchBudget budget;
    budget.haar_samples = budget_haar;
    budget.cone_samples = budget_cone;
    budget.dykstra_cycles = max_iters > 0 ? max_iters : 2000;
    budget.seed = seed;
    exit_code = run_state_absolute(spectrum_json, in_path, k, budget, common);
  });

  int embed_k = 0;  // 0 means n-1, the Corollary case
  auto* sembed = state->add_subcommand("embed-test", "zero-padding equivalence experiment");
  sembed->fallthrough();
  sembed->add_option("--in", in_path, "density matrix or spectrum file");
  sembed->add_option("--spectrum", spectrum_json, "inline JSON spectrum");
  sembed->add_option("--k", embed_k, "coherence order (default n-1)");
  sembed->add_option("--seed", seed, "rng seed (default 0)");
  sembed->add_option("--budget-haar", budget_haar, "Haar falsifier samples (default 200)");
  sembed->add_option("--budget-cone", budget_cone, "cone falsifier samples (default 500)");
  sembed->add_option("--max-iters", max_iters, "Dykstra cycle cap (default 2000)");
  sembed->callback([&] {
    kcoh::SearchBudget budget;
    budget.haar_samples = budget_haar;
    budget.cone_samples = budget_cone;
    budget.dykstra_cycles = max_iters > 0 ? max_iters : 2000;
    budget.seed = seed;
    exit_code = run_state_embed_test(spectrum_json, in_path, embed_k, budget, common);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const kcoh::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const kcoh::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Json::exception& e) {
    std::cerr << "error: malformed JSON input: " << e.what() << "\n";
    return kExitUsage;
  }
  return exit_code;
}
