#pragma once

#include "imexglm/extrap.hpp"
#include "json.hpp"

namespace imexglm {

/// {"name", "p", "q", "r", "s", "c", "A", "U", "B", "V", "qvecs"} with
/// matrices as arrays of rows.
nlohmann::json tableau_to_json(const GlmTableau& tab);
/// Inverse of tableau_to_json; validates the result.
GlmTableau tableau_from_json(const nlohmann::json& j);

/// Base tableau plus alpha, beta and the products Abar, A*, Bbar, B*.
nlohmann::json scheme_to_json(const ImexScheme& scheme);

}  // namespace imexglm
