#include "imexglm/tableau_json.hpp"

#include <string>

namespace imexglm {

namespace {

nlohmann::json matrix_json(const RealMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    rows.push_back(RealVector(r.begin(), r.end()));
  }
  return rows;
}

const nlohmann::json& field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("tableau JSON: missing field '") + key + "'");
  return j.at(key);
}

RealVector vector_from(const nlohmann::json& j, const char* what) {
  if (!j.is_array()) throw ValidationError(std::string("tableau JSON: '") + what + "' must be an array");
  RealVector v;
  for (const auto& x : j) {
    if (!x.is_number()) throw ValidationError(std::string("tableau JSON: non-numeric entry in '") + what + "'");
    v.push_back(x.get<double>());
  }
  return v;
}

RealMatrix matrix_from(const nlohmann::json& j, const char* what) {
  if (!j.is_array()) throw ValidationError(std::string("tableau JSON: '") + what + "' must be an array of rows");
  std::vector<RealVector> rows;
  for (const auto& r : j) rows.push_back(vector_from(r, what));
  const std::size_t cols = rows.empty() ? 0 : rows[0].size();
  RealMatrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw ValidationError(std::string("tableau JSON: ragged matrix '") + what + "'");
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = rows[i][k];
  }
  return m;
}

}  // namespace

nlohmann::json tableau_to_json(const GlmTableau& tab) {
  nlohmann::json j;
  j["name"] = tab.name;
  j["p"] = tab.p;
  j["q"] = tab.q;
  j["r"] = tab.r();
  j["s"] = tab.s();
  j["c"] = tab.c;
  j["A"] = matrix_json(tab.A);
  j["U"] = matrix_json(tab.U);
  j["B"] = matrix_json(tab.B);
  j["V"] = matrix_json(tab.V);
  j["qvecs"] = tab.qvecs;
  return j;
}

GlmTableau tableau_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("tableau JSON: expected an object");
  GlmTableau t;
  t.name = j.value("name", std::string("custom"));
  const auto& p = field(j, "p");
  const auto& q = field(j, "q");
  if (!p.is_number_integer() || !q.is_number_integer()) throw ValidationError("tableau JSON: p and q must be integers");
  t.p = p.get<int>();
  t.q = q.get<int>();
  t.c = vector_from(field(j, "c"), "c");
  t.A = matrix_from(field(j, "A"), "A");
  t.U = matrix_from(field(j, "U"), "U");
  t.B = matrix_from(field(j, "B"), "B");
  t.V = matrix_from(field(j, "V"), "V");
  const auto& qv = field(j, "qvecs");
  if (!qv.is_array()) throw ValidationError("tableau JSON: 'qvecs' must be an array");
  for (const auto& v : qv) t.qvecs.push_back(vector_from(v, "qvecs"));
  if (j.contains("r") && j.at("r") != t.r()) throw ValidationError("tableau JSON: r disagrees with V");
  if (j.contains("s") && j.at("s") != t.s()) throw ValidationError("tableau JSON: s disagrees with c");
  t.validate();
  return t;
}

nlohmann::json scheme_to_json(const ImexScheme& scheme) {
  nlohmann::json j = tableau_to_json(scheme.base);
  j["alpha"] = matrix_json(scheme.coeffs.alpha);
  j["beta"] = matrix_json(scheme.coeffs.beta);
  j["Abar"] = matrix_json(scheme.abar);
  j["Astar"] = matrix_json(scheme.astar);
  j["Bbar"] = matrix_json(scheme.bbar);
  j["Bstar"] = matrix_json(scheme.bstar);
  return j;
}

}  // namespace imexglm
