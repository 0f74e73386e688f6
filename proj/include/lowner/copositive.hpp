#pragma once

#include <string>
#include <vector>

#include "lowner/geometry.hpp"
#include "lowner/sdp.hpp"

namespace lowner {

// Image W * zeta of {zeta in R^D : S zeta <= t, ||Q_i zeta + q_i||^2 <= 1}, W of size K x D.
// Polytopes, projections, Minkowski sums and one-step reachable sets all take this form.
struct LiftedSet {
  MatrixXd S;
  VectorXd t;
  std::vector<QuadRow> quads;
  MatrixXd W;

  int lifted_dim() const { return static_cast<int>(W.cols()); }
  int out_dim() const { return static_cast<int>(W.rows()); }
  void validate() const;

  static LiftedSet from_polytope(const Polytope& P);
  static LiftedSet from_quadset(const QuadSet& Q);
  static LiftedSet projection(const Polytope& P, int K1);
  static LiftedSet minkowski(const std::vector<Polytope>& summands, const std::vector<MatrixXd>& maps);
};

struct Certificate {
  MatrixXd N;  // J x J, elementwise >= 0
  MatrixXd F;  // D x D
  VectorXd g;
  double h = 0.0;
  VectorXd lambda;             // one per quadratic row
  std::vector<VectorXd> alpha; // index i * J + j
  VectorXd kappa;
};

struct CertificateReport {
  double lmi1_min_eig = 0.0;
  double lmi2_min_eig = 0.0;
  double n_min = 0.0;
  double soc_min_slack = 0.0;
  double vertex_form_max = 0.0;  // max over generators of [v;1]^T [F g; g^T h-1] [v;1]
  int generators_checked = 0;
  bool passed = false;
  std::string failure;
};

struct CopOptions {
  bool rlt_terms = true;  // SOC-RLT cross terms between polytope rows and quadratic rows
  SdpSettings sdp{};
};

struct CopResult {
  Ellipsoid ellipsoid;
  std::vector<Certificate> certificates;
  double objective = 0.0;  // -log det A
  SdpStatus status = SdpStatus::optimal;
  int newton_steps = 0;
};

// Shared (A, b) covering every part.
CopResult solve_lifted_mve(const std::vector<LiftedSet>& parts, const CopOptions& opts = {});

CopResult solve_polytope_mve(const Polytope& P, const CopOptions& opts = {});
CopResult solve_quadset_mve(const QuadSet& Q, const CopOptions& opts = {});
CopResult solve_minkowski_mve(const std::vector<Polytope>& summands, const std::vector<MatrixXd>& maps,
                              const CopOptions& opts = {});
CopResult solve_union_mve(const std::vector<Polytope>& parts, const CopOptions& opts = {});
CopResult solve_projection_mve(const Polytope& P, int K1, const CopOptions& opts = {});

// First LMI of the containment certificate, evaluated at a candidate.
MatrixXd certificate_lmi1(const LiftedSet& X, const Certificate& C);
MatrixXd certificate_lmi2(const LiftedSet& X, const Ellipsoid& E, const Certificate& C);

// generators: points of the lifted set at which the first form must be <= tol.
// When empty and the set is a polytope of modest size its vertices are enumerated.
CertificateReport verify_certificate(const LiftedSet& X, const Ellipsoid& E, const Certificate& C, double tol = 1e-7,
                                     const PointList& generators = {});
CertificateReport verify_certificate(const Polytope& P, const Ellipsoid& E, const Certificate& C, double tol = 1e-7);
CertificateReport verify_certificate(const QuadSet& Q, const Ellipsoid& E, const Certificate& C, double tol = 1e-7);

struct LiftedCertificate {
  Ellipsoid ellipsoid;
  Certificate certificate;
  double dual_objective = 0.0;  // value of the inscribed-ellipsoid dual at (Lambda, rho)
};

// Ellipsoid and multipliers built from a feasible point of the scaled inscribed-ellipsoid dual.
LiftedCertificate lift_smvie_certificate(const Polytope& P, const MatrixXd& Lambda, const VectorXd& rho);

}  // namespace lowner
