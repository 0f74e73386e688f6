#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>

#include "lowner/copositive.hpp"
#include "lowner/json_io.hpp"

using namespace lowner;

TEST(JsonIo, MatrixRoundTrip) {
  MatrixXd M(2, 3);
  M << 1, 2, 3, 4, 5, 6.5;
  const Json j = matrix_to_json(M);
  EXPECT_EQ(j[1][2].get<double>(), 6.5);
  EXPECT_TRUE(matrix_from_json(j, "M").isApprox(M, 0.0));
  EXPECT_THROW(matrix_from_json(Json::parse("[[1, 2], [3]]"), "M"), std::invalid_argument);
  EXPECT_THROW(vector_from_json(Json::parse("\"x\""), "v"), std::invalid_argument);
}

TEST(JsonIo, PolytopeAndQuadSetRoundTrip) {
  const Polytope P = Polytope::unit_box(2);
  const Polytope P2 = polytope_from_json(polytope_to_json(P));
  EXPECT_TRUE(P2.S().isApprox(P.S(), 0.0));
  EXPECT_TRUE(P2.t().isApprox(P.t(), 0.0));
  const QuadSet Q(Polytope::box(VectorXd::Constant(2, -1.0), VectorXd::Constant(2, 1.0)),
                  {{MatrixXd::Identity(2, 2), VectorXd::Zero(2)}}, VectorXd::Zero(2));
  const QuadSet Q2 = quadset_from_json(quadset_to_json(Q));
  ASSERT_EQ(Q2.quads().size(), 1u);
  EXPECT_TRUE(Q2.quads()[0].Q.isApprox(Q.quads()[0].Q, 0.0));
  ASSERT_TRUE(Q2.witness().has_value());
  EXPECT_THROW(polytope_from_json(Json::parse("{\"S\": [[1]]}")), std::invalid_argument);
}

TEST(JsonIo, EllipsoidRoundTripAndFields) {
  const Ellipsoid E = Ellipsoid::ball((VectorXd(2) << 1, 2).finished(), 2.0);
  const Json j = ellipsoid_to_json(E);
  EXPECT_NEAR(j["volume"].get<double>(), 4.0, 1e-12);
  EXPECT_NEAR(j["radius"].get<double>(), 2.0, 1e-12);
  const Ellipsoid E2 = ellipsoid_from_json(j);
  EXPECT_TRUE(E2.A().isApprox(E.A(), 0.0));
  EXPECT_TRUE(E2.b().isApprox(E.b(), 0.0));
}

TEST(JsonIo, CertificateAndReport) {
  const Polytope P = Polytope::unit_box(2);
  const CopResult r = solve_polytope_mve(P);
  const Json c = certificate_to_json(r.certificates[0]);
  EXPECT_TRUE(c.contains("N"));
  EXPECT_TRUE(c.contains("F"));
  const Json rep = report_to_json(verify_certificate(P, r.ellipsoid, r.certificates[0]));
  EXPECT_TRUE(rep["passed"].get<bool>());
}

TEST(JsonIo, FileRoundTripAndErrors) {
  const auto path = std::filesystem::temp_directory_path() / "lowner_json_io_test.json";
  write_json_file(path.string(), polytope_to_json(Polytope::unit_box(3)));
  const Polytope P = polytope_from_json(read_json_file(path.string()));
  EXPECT_EQ(P.dim(), 3);
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  std::fputs("{not json", f);
  std::fclose(f);
  EXPECT_THROW(read_json_file(path.string()), std::invalid_argument);
  std::filesystem::remove(path);
  EXPECT_THROW(read_json_file(path.string()), std::runtime_error);
}
