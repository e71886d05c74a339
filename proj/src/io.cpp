#include "kcoh/io.hpp"

#include <fstream>
#include <sstream>

namespace kcoh {

Json matrix_to_json(const CMatrix& m) {
  const Index n = m.rows();
  Json re = Json::array();
  Json im = Json::array();
  for (Index r = 0; r < n; ++r) {
    Json re_row = Json::array();
    Json im_row = Json::array();
    for (Index c = 0; c < n; ++c) {
      re_row.push_back(m(r, c).real());
      im_row.push_back(m(r, c).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  return Json{{"n", n}, {"re", std::move(re)}, {"im", std::move(im)}};
}

HermitianMatrix hermitian_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("re") || !j.contains("im")) {
    throw ValidationError("matrix file: expected an object with fields n, re, im");
  }
  const auto n = j.at("n").get<Index>();
  if (n < 1) {
    throw ValidationError("matrix file: n must be >= 1");
  }
  const Json& re = j.at("re");
  const Json& im = j.at("im");
  if (!re.is_array() || !im.is_array() || static_cast<Index>(re.size()) != n ||
      static_cast<Index>(im.size()) != n) {
    throw ValidationError("matrix file: re and im must be n x n arrays");
  }
  CMatrix m(n, n);
  for (Index r = 0; r < n; ++r) {
    const Json& re_row = re.at(static_cast<size_t>(r));
    const Json& im_row = im.at(static_cast<size_t>(r));
    if (static_cast<Index>(re_row.size()) != n || static_cast<Index>(im_row.size()) != n) {
      throw ValidationError("matrix file: re and im must be n x n arrays");
    }
    for (Index c = 0; c < n; ++c) {
      m(r, c) = Complex(re_row.at(static_cast<size_t>(c)).get<double>(),
                        im_row.at(static_cast<size_t>(c)).get<double>());
    }
  }
  // re symmetric and im antisymmetric within 1e-9: exactly the Hermitian
  // check on the assembled complex matrix.
  try {
    return HermitianMatrix(std::move(m), 1e-9);
  } catch (const ValidationError&) {
    throw ValidationError(
        "matrix file: re must be symmetric and im antisymmetric within 1e-9");
  }
}

Json spectrum_to_json(const RVector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

RVector spectrum_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) {
    throw ValidationError("spectrum: expected a non-empty JSON array of reals");
  }
  RVector v(static_cast<Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j.at(i).is_number()) {
      throw ValidationError("spectrum: entries must be numbers");
    }
    v[static_cast<Index>(i)] = j.at(i).get<double>();
  }
  return v;
}

Json certificate_to_json(const Certificate& cert) {
  if (const auto* cf = std::get_if<ClosedFormCert>(&cert)) {
    return Json{{"kind", "closed_form"}, {"name", cf->name}, {"margin", cf->margin}};
  }
  if (const auto* fl = std::get_if<FeasibleLambdaCert>(&cert)) {
    return Json{{"kind", "feasible_lambda"}, {"matrix", matrix_to_json(fl->lambda.mat())}};
  }
  if (const auto* vp = std::get_if<ViolatingPairCert>(&cert)) {
    return Json{{"kind", "violating_pair"},
                {"witness", matrix_to_json(vp->witness.mat())},
                {"unitary", matrix_to_json(vp->unitary.mat())},
                {"value", vp->value}};
  }
  if (const auto* vc = std::get_if<ViolatingConeElementCert>(&cert)) {
    return Json{{"kind", "violating_cone_element"},
                {"mu", spectrum_to_json(vc->mu)},
                {"value", vc->value}};
  }
  const auto& rb = std::get<RankBoundCert>(cert);
  return Json{{"kind", "rank_bound"}, {"rank", rb.rank}, {"bound", rb.bound}};
}

namespace {

CMatrix complex_matrix_from_json(const Json& j) {
  const auto n = j.at("n").get<Index>();
  CMatrix m(n, n);
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < n; ++c) {
      m(r, c) = Complex(j.at("re").at(static_cast<size_t>(r)).at(static_cast<size_t>(c)).get<double>(),
                        j.at("im").at(static_cast<size_t>(r)).at(static_cast<size_t>(c)).get<double>());
    }
  }
  return m;
}

}  // namespace

Certificate certificate_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "closed_form") {
    return ClosedFormCert{j.at("name").get<std::string>(), j.at("margin").get<double>()};
  }
  if (kind == "feasible_lambda") {
    return FeasibleLambdaCert{HermitianMatrix(complex_matrix_from_json(j.at("matrix")), 1e-9)};
  }
  if (kind == "violating_pair") {
    return ViolatingPairCert{HermitianMatrix(complex_matrix_from_json(j.at("witness")), 1e-9),
                             UnitaryMatrix(complex_matrix_from_json(j.at("unitary")), 1e-8),
                             j.at("value").get<double>()};
  }
  if (kind == "violating_cone_element") {
    return ViolatingConeElementCert{spectrum_from_json(j.at("mu")), j.at("value").get<double>()};
  }
  if (kind == "rank_bound") {
    return RankBoundCert{j.at("rank").get<int>(), j.at("bound").get<int>()};
  }
  throw ValidationError("certificate: unknown kind " + kind);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open file: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("cannot write file: " + path);
  }
  out << contents;
}

}  // namespace kcoh
