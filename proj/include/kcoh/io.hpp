#pragma once

#include <json.hpp>
#include <string>

#include "kcoh/states.hpp"
#include "kcoh/types.hpp"
#include "kcoh/witness.hpp"

namespace kcoh {

using Json = nlohmann::json;

/// Matrix file schema: {"n": int, "re": n x n, "im": n x n} with re
/// symmetric and im antisymmetric within 1e-9.
Json matrix_to_json(const CMatrix& m);
HermitianMatrix hermitian_from_json(const Json& j);

/// Spectra are plain JSON arrays of reals.
Json spectrum_to_json(const RVector& v);
RVector spectrum_from_json(const Json& j);

Json certificate_to_json(const Certificate& cert);
Certificate certificate_from_json(const Json& j);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace kcoh
