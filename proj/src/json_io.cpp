#include "lowner/json_io.hpp"

#include <fstream>
#include <stdexcept>

namespace lowner {

Json matrix_to_json(const MatrixXd& M) {
  Json rows = Json::array();
  for (int r = 0; r < M.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_to_json(const VectorXd& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

MatrixXd matrix_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw std::invalid_argument("json: '" + what + "' must be an array of rows");
  const int R = static_cast<int>(j.size());
  const int C = R > 0 ? static_cast<int>(j[0].size()) : 0;
  MatrixXd M(R, C);
  for (int r = 0; r < R; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != C)
      throw std::invalid_argument("json: '" + what + "' has ragged rows");
    for (int c = 0; c < C; ++c) {
      if (!j[r][c].is_number()) throw std::invalid_argument("json: '" + what + "' has a non-numeric entry");
      M(r, c) = j[r][c].get<double>();
    }
  }
  return M;
}

VectorXd vector_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw std::invalid_argument("json: '" + what + "' must be an array");
  VectorXd v(static_cast<int>(j.size()));
  for (int i = 0; i < v.size(); ++i) {
    if (!j[i].is_number()) throw std::invalid_argument("json: '" + what + "' has a non-numeric entry");
    v(i) = j[i].get<double>();
  }
  return v;
}

namespace {
const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw std::invalid_argument(std::string("json: missing field '") + key + "'");
  return j.at(key);
}
}  // namespace

Json polytope_to_json(const Polytope& P) { return {{"S", matrix_to_json(P.S())}, {"t", vector_to_json(P.t())}}; }

Polytope polytope_from_json(const Json& j) {
  MatrixXd S = matrix_from_json(field(j, "S"), "S");
  VectorXd t = vector_from_json(field(j, "t"), "t");
  if (S.rows() != t.size()) throw std::invalid_argument("json: S and t row counts differ");
  return Polytope(std::move(S), std::move(t));
}

Json quadset_to_json(const QuadSet& Q) {
  Json j = polytope_to_json(Q.base());
  Json quads = Json::array();
  for (const auto& r : Q.quads()) quads.push_back({{"Q", matrix_to_json(r.Q)}, {"q", vector_to_json(r.q)}});
  j["quads"] = std::move(quads);
  if (Q.witness()) j["witness"] = vector_to_json(*Q.witness());
  return j;
}

QuadSet quadset_from_json(const Json& j) {
  Polytope base = polytope_from_json(j);
  std::vector<QuadRow> quads;
  if (j.contains("quads"))
    for (const auto& q : j.at("quads")) quads.push_back({matrix_from_json(field(q, "Q"), "Q"), vector_from_json(field(q, "q"), "q")});
  std::optional<VectorXd> witness;
  if (j.contains("witness")) witness = vector_from_json(j.at("witness"), "witness");
  return QuadSet(std::move(base), std::move(quads), std::move(witness));
}

Json ellipsoid_to_json(const Ellipsoid& E) {
  return {{"A", matrix_to_json(E.A())},
          {"b", vector_to_json(E.b())},
          {"center", vector_to_json(E.center())},
          {"volume", E.volume()},
          {"radius", E.radius()}};
}

Ellipsoid ellipsoid_from_json(const Json& j) {
  return Ellipsoid(matrix_from_json(field(j, "A"), "A"), vector_from_json(field(j, "b"), "b"));
}

Json certificate_to_json(const Certificate& C) {
  Json alpha = Json::array();
  for (const auto& a : C.alpha) alpha.push_back(vector_to_json(a));
  return {{"N", matrix_to_json(C.N)},          {"F", matrix_to_json(C.F)},
          {"g", vector_to_json(C.g)},          {"h", C.h},
          {"lambda", vector_to_json(C.lambda)}, {"alpha", std::move(alpha)},
          {"kappa", vector_to_json(C.kappa)}};
}

Json report_to_json(const CertificateReport& R) {
  return {{"passed", R.passed},
          {"failure", R.failure},
          {"lmi1_min_eig", R.lmi1_min_eig},
          {"lmi2_min_eig", R.lmi2_min_eig},
          {"n_min", R.n_min},
          {"soc_min_slack", R.soc_min_slack},
          {"vertex_form_max", R.vertex_form_max},
          {"generators_checked", R.generators_checked}};
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument("json parse error in '" + path + "': " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace lowner
