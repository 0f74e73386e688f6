#pragma once

#include <string>

#include <json.hpp>

#include "lowner/copositive.hpp"
#include "lowner/geometry.hpp"

namespace lowner {

using Json = nlohmann::json;

Json matrix_to_json(const MatrixXd& M);  // row-major nested arrays
Json vector_to_json(const VectorXd& v);
MatrixXd matrix_from_json(const Json& j, const std::string& what);
VectorXd vector_from_json(const Json& j, const std::string& what);

// {"S": [[...]], "t": [...]}
Json polytope_to_json(const Polytope& P);
Polytope polytope_from_json(const Json& j);

// {"S", "t", "quads": [{"Q": [[...]], "q": [...]}], optional "witness"}
Json quadset_to_json(const QuadSet& Q);
QuadSet quadset_from_json(const Json& j);

// {"A", "b", "center", "volume", "radius"}; only A and b are read back.
Json ellipsoid_to_json(const Ellipsoid& E);
Ellipsoid ellipsoid_from_json(const Json& j);

Json certificate_to_json(const Certificate& C);
Json report_to_json(const CertificateReport& R);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace lowner
