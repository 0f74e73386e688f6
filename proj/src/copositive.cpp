#include "lowner/copositive.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lowner {

void LiftedSet::validate() const {
  const int D = lifted_dim();
  if (D == 0 || W.rows() == 0) throw std::invalid_argument("LiftedSet: empty map");
  if (S.cols() != D && S.rows() > 0) throw std::invalid_argument("LiftedSet: S has wrong column count");
  if (S.rows() != t.size()) throw std::invalid_argument("LiftedSet: S and t row counts differ");
  for (const auto& qr : quads)
    if (qr.Q.cols() != D || qr.Q.rows() != qr.q.size()) throw std::invalid_argument("LiftedSet: quadratic row mismatch");
}

LiftedSet LiftedSet::from_polytope(const Polytope& P) {
  return {P.S(), P.t(), {}, MatrixXd::Identity(P.dim(), P.dim())};
}

LiftedSet LiftedSet::from_quadset(const QuadSet& Q) {
  return {Q.base().S(), Q.base().t(), Q.quads(), MatrixXd::Identity(Q.dim(), Q.dim())};
}

LiftedSet LiftedSet::projection(const Polytope& P, int K1) {
  const int K = P.dim();
  if (K1 < 1 || K1 >= K) throw std::invalid_argument("projection: need 1 <= K1 < K");
  MatrixXd W = MatrixXd::Zero(K1, K);
  W.leftCols(K1).setIdentity();
  return {P.S(), P.t(), {}, W};
}

LiftedSet LiftedSet::minkowski(const std::vector<Polytope>& summands, const std::vector<MatrixXd>& maps) {
  if (summands.empty()) throw std::invalid_argument("minkowski: no summands");
  if (maps.size() != summands.size()) throw std::invalid_argument("minkowski: one map per summand required");
  const int K = static_cast<int>(maps[0].rows());
  int D = 0, J = 0;
  for (std::size_t l = 0; l < summands.size(); ++l) {
    if (maps[l].rows() != K || maps[l].cols() != summands[l].dim())
      throw std::invalid_argument("minkowski: map dimension mismatch");
    D += summands[l].dim();
    J += summands[l].rows();
  }
  LiftedSet X{MatrixXd::Zero(J, D), VectorXd::Zero(J), {}, MatrixXd::Zero(K, D)};
  int r = 0, c = 0;
  for (std::size_t l = 0; l < summands.size(); ++l) {
    const Polytope& P = summands[l];
    X.S.block(r, c, P.rows(), P.dim()) = P.S();
    X.t.segment(r, P.rows()) = P.t();
    X.W.middleCols(c, P.dim()) = maps[l];
    r += P.rows();
    c += P.dim();
  }
  return X;
}

namespace {

struct PartVars {
  int N = -1, F = -1, g = -1, h = -1;
  int lambda = -1, kappa = -1;
  std::vector<int> alpha;
};

// Homogenized row [-S_j, t_j].
VectorXd tilde_row(const LiftedSet& X, int j) {
  const int D = X.lifted_dim();
  VectorXd s(D + 1);
  s.head(D) = -X.S.row(j).transpose();
  s(D) = X.t(j);
  return s;
}

MatrixXd j_matrix(const QuadRow& qr) {
  const int D = static_cast<int>(qr.Q.cols());
  MatrixXd Jm(D + 1, D + 1);
  Jm.topLeftCorner(D, D) = qr.Q.transpose() * qr.Q;
  Jm.topRightCorner(D, 1) = qr.Q.transpose() * qr.q;
  Jm.bottomLeftCorner(1, D) = (qr.Q.transpose() * qr.q).transpose();
  Jm(D, D) = qr.q.squaredNorm() - 1.0;
  return Jm;
}

// M_ij as a linear map of (alpha, kappa): returns the coefficient matrix of alpha_k and of kappa.
MatrixXd m_alpha_coef(const LiftedSet& X, const QuadRow& qr, int j, int k) {
  const int D = X.lifted_dim();
  const VectorXd Sj = X.S.row(j).transpose();
  const VectorXd Qk = qr.Q.row(k).transpose();
  MatrixXd M = MatrixXd::Zero(D + 1, D + 1);
  M.topLeftCorner(D, D) = -0.5 * (Sj * Qk.transpose() + Qk * Sj.transpose());
  const VectorXd col = 0.5 * (X.t(j) * Qk - qr.q(k) * Sj);
  M.topRightCorner(D, 1) = col;
  M.bottomLeftCorner(1, D) = col.transpose();
  M(D, D) = qr.q(k) * X.t(j);
  return M;
}

MatrixXd m_kappa_coef(const LiftedSet& X, int j) {
  const int D = X.lifted_dim();
  const VectorXd Sj = X.S.row(j).transpose();
  MatrixXd M = MatrixXd::Zero(D + 1, D + 1);
  M.topRightCorner(D, 1) = -0.5 * Sj;
  M.bottomLeftCorner(1, D) = -0.5 * Sj.transpose();
  M(D, D) = X.t(j);
  return M;
}

void add_matrix_term(AffineMatrix& m, const MatrixXd& C, int idx, double scale) {
  for (int r = 0; r < C.rows(); ++r)
    for (int c = r; c < C.cols(); ++c)
      if (C(r, c) != 0.0) m.add_term(r, c, idx, scale * C(r, c));
}

PartVars add_part(SdpProblem& p, int Avar, int bvar, const LiftedSet& X, bool rlt, int tag) {
  const int D = X.lifted_dim();
  const int K = X.out_dim();
  const int J = static_cast<int>(X.S.rows());
  const int I = static_cast<int>(X.quads.size());
  const std::string sfx = "_" + std::to_string(tag);
  PartVars v;
  if (J > 0) v.N = p.add_symmetric("N" + sfx, J, true);
  v.F = p.add_symmetric("F" + sfx, D);
  v.g = p.add_vector("g" + sfx, D);
  v.h = p.add_scalar("h" + sfx);
  if (I > 0) v.lambda = p.add_vector("lambda" + sfx, I, true);
  const bool with_m = rlt && I > 0 && J > 0;
  if (with_m) {
    v.kappa = p.add_vector("kappa" + sfx, I * J);
    for (int i = 0; i < I; ++i)
      for (int j = 0; j < J; ++j)
        v.alpha.push_back(p.add_vector("alpha" + sfx + "_" + std::to_string(i) + "_" + std::to_string(j),
                                       static_cast<int>(X.quads[i].Q.rows())));
  }

  // LMI 1: -[F g; g^T h-1] - S~^T N S~ + sum lambda_i J_i - sum M_ij >= 0
  AffineMatrix L1(D + 1);
  for (int a = 0; a < D; ++a) {
    for (int b = a; b < D; ++b) L1.add_term(a, b, p.idx(v.F, a, b), -1.0);
    L1.add_term(a, D, p.idx(v.g, a), -1.0);
  }
  L1.add_term(D, D, p.idx(v.h), -1.0);
  L1.add_const(D, D, 1.0);
  if (J > 0) {
    std::vector<VectorXd> st(J);
    for (int j = 0; j < J; ++j) st[j] = tilde_row(X, j);
    for (int a = 0; a < J; ++a) {
      for (int b = a; b < J; ++b) {
        const int id = p.idx(v.N, a, b);
        for (int r = 0; r <= D; ++r) {
          for (int c = r; c <= D; ++c) {
            double val = (a == b) ? st[a](r) * st[a](c) : st[a](r) * st[b](c) + st[b](r) * st[a](c);
            if (val != 0.0) L1.add_term(r, c, id, -val);
          }
        }
      }
    }
  }
  for (int i = 0; i < I; ++i) add_matrix_term(L1, j_matrix(X.quads[i]), p.idx(v.lambda, i), 1.0);
  if (with_m) {
    for (int i = 0; i < I; ++i) {
      const int r = static_cast<int>(X.quads[i].Q.rows());
      for (int j = 0; j < J; ++j) {
        const int av = v.alpha[i * J + j];
        for (int k = 0; k < r; ++k) add_matrix_term(L1, m_alpha_coef(X, X.quads[i], j, k), p.idx(av, k), -1.0);
        add_matrix_term(L1, m_kappa_coef(X, j), p.idx(v.kappa, i * J + j), -1.0);
        std::vector<AffineExpr> u;
        for (int k = 0; k < r; ++k) u.push_back(p.ref(av, k));
        p.add_soc(u, p.ref(v.kappa, i * J + j), "soc" + sfx);
      }
    }
  }
  p.add_psd(std::move(L1), "lmi1" + sfx);

  // LMI 2: [[F, g, (A W)^T], [g^T, h, b^T], [A W, b, I]] >= 0
  AffineMatrix L2(D + 1 + K);
  for (int a = 0; a < D; ++a) {
    for (int b = a; b < D; ++b) L2.add_term(a, b, p.idx(v.F, a, b), 1.0);
    L2.add_term(a, D, p.idx(v.g, a), 1.0);
  }
  L2.add_term(D, D, p.idx(v.h), 1.0);
  for (int k = 0; k < K; ++k) {
    for (int d = 0; d < D; ++d)
      for (int m = 0; m < K; ++m)
        if (X.W(m, d) != 0.0) L2.add_term(d, D + 1 + k, p.idx(Avar, k, m), X.W(m, d));
    L2.add_term(D, D + 1 + k, p.idx(bvar, k), 1.0);
    L2.add_const(D + 1 + k, D + 1 + k, 1.0);
  }
  p.add_psd(std::move(L2), "lmi2" + sfx);
  return v;
}

Certificate extract(const SdpProblem& p, const VectorXd& x, const PartVars& v, const LiftedSet& X) {
  Certificate C;
  const int J = static_cast<int>(X.S.rows());
  C.N = J > 0 ? p.value_symmetric(x, v.N) : MatrixXd(0, 0);
  C.F = p.value_symmetric(x, v.F);
  C.g = p.value_vector(x, v.g);
  C.h = p.value_scalar(x, v.h);
  C.lambda = v.lambda >= 0 ? p.value_vector(x, v.lambda) : VectorXd(0);
  if (v.kappa >= 0) {
    C.kappa = p.value_vector(x, v.kappa);
    for (int a : v.alpha) C.alpha.push_back(p.value_vector(x, a));
  }
  return C;
}

double min_eig(const MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

CopResult solve_lifted_mve(const std::vector<LiftedSet>& parts, const CopOptions& opts) {
  if (parts.empty()) throw std::invalid_argument("solve_lifted_mve: no parts");
  const int K = parts[0].out_dim();
  for (const auto& X : parts) {
    X.validate();
    if (X.out_dim() != K) throw std::invalid_argument("solve_lifted_mve: parts map to different dimensions");
  }
  SdpProblem p;
  const int A = p.add_symmetric("A", K);
  const int b = p.add_vector("b", K);
  std::vector<PartVars> pv;
  for (std::size_t l = 0; l < parts.size(); ++l)
    pv.push_back(add_part(p, A, b, parts[l], opts.rlt_terms, static_cast<int>(l)));
  AffineMatrix L(K);
  for (int i = 0; i < K; ++i)
    for (int j = i; j < K; ++j) L.add_term(i, j, p.idx(A, i, j), 1.0);
  p.set_objective(AffineExpr(), L);

  const SdpSolution sol = solve(p, opts.sdp);
  if (sol.status != SdpStatus::optimal)
    throw std::runtime_error(std::string("copositive restriction: solver failure (") + to_string(sol.status) + ")");
  CopResult res{Ellipsoid(p.value_symmetric(sol.x, A), p.value_vector(sol.x, b)), {}, sol.objective, sol.status,
                sol.newton_steps};
  for (std::size_t l = 0; l < parts.size(); ++l) res.certificates.push_back(extract(p, sol.x, pv[l], parts[l]));
  return res;
}

CopResult solve_polytope_mve(const Polytope& P, const CopOptions& opts) {
  (void)P.vertices();  // bounded, non-empty, full-dimensional
  return solve_lifted_mve({LiftedSet::from_polytope(P)}, opts);
}

CopResult solve_quadset_mve(const QuadSet& Q, const CopOptions& opts) {
  if (Q.quads().empty()) return solve_polytope_mve(Q.base(), opts);
  return solve_lifted_mve({LiftedSet::from_quadset(Q)}, opts);
}

CopResult solve_minkowski_mve(const std::vector<Polytope>& summands, const std::vector<MatrixXd>& maps,
                              const CopOptions& opts) {
  for (const auto& P : summands) (void)P.vertices();
  return solve_lifted_mve({LiftedSet::minkowski(summands, maps)}, opts);
}

CopResult solve_union_mve(const std::vector<Polytope>& parts, const CopOptions& opts) {
  std::vector<LiftedSet> xs;
  for (const auto& P : parts) {
    (void)P.vertices();
    xs.push_back(LiftedSet::from_polytope(P));
  }
  return solve_lifted_mve(xs, opts);
}

CopResult solve_projection_mve(const Polytope& P, int K1, const CopOptions& opts) {
  (void)P.vertices();
  return solve_lifted_mve({LiftedSet::projection(P, K1)}, opts);
}

MatrixXd certificate_lmi1(const LiftedSet& X, const Certificate& C) {
  const int D = X.lifted_dim();
  const int J = static_cast<int>(X.S.rows());
  const int I = static_cast<int>(X.quads.size());
  MatrixXd L = MatrixXd::Zero(D + 1, D + 1);
  L.topLeftCorner(D, D) = -C.F;
  L.topRightCorner(D, 1) = -C.g;
  L.bottomLeftCorner(1, D) = -C.g.transpose();
  L(D, D) = 1.0 - C.h;
  if (J > 0) {
    MatrixXd St(J, D + 1);
    St << -X.S, X.t;
    L -= St.transpose() * C.N * St;
  }
  for (int i = 0; i < I; ++i) L += C.lambda(i) * j_matrix(X.quads[i]);
  if (!C.alpha.empty()) {
    for (int i = 0; i < I; ++i)
      for (int j = 0; j < J; ++j) {
        const VectorXd& a = C.alpha[i * J + j];
        for (int k = 0; k < a.size(); ++k) L -= a(k) * m_alpha_coef(X, X.quads[i], j, k);
        L -= C.kappa(i * J + j) * m_kappa_coef(X, j);
      }
  }
  return L;
}

MatrixXd certificate_lmi2(const LiftedSet& X, const Ellipsoid& E, const Certificate& C) {
  const int D = X.lifted_dim();
  const int K = X.out_dim();
  MatrixXd L = MatrixXd::Zero(D + 1 + K, D + 1 + K);
  const MatrixXd AW = E.A() * X.W;
  L.topLeftCorner(D, D) = C.F;
  L.block(0, D, D, 1) = C.g;
  L.block(D, 0, 1, D) = C.g.transpose();
  L(D, D) = C.h;
  L.block(0, D + 1, D, K) = AW.transpose();
  L.block(D + 1, 0, K, D) = AW;
  L.block(D, D + 1, 1, K) = E.b().transpose();
  L.block(D + 1, D, K, 1) = E.b();
  L.bottomRightCorner(K, K).setIdentity();
  return L;
}

CertificateReport verify_certificate(const LiftedSet& X, const Ellipsoid& E, const Certificate& C, double tol,
                                     const PointList& generators) {
  X.validate();
  const int D = X.lifted_dim();
  const int J = static_cast<int>(X.S.rows());
  const int I = static_cast<int>(X.quads.size());
  if (E.dim() != X.out_dim() || C.F.rows() != D || C.g.size() != D || C.N.rows() != J || C.lambda.size() != I)
    throw std::invalid_argument("verify_certificate: dimension mismatch");
  CertificateReport rep;
  rep.lmi1_min_eig = min_eig(certificate_lmi1(X, C));
  rep.lmi2_min_eig = min_eig(certificate_lmi2(X, E, C));
  rep.n_min = J > 0 ? C.N.minCoeff() : 0.0;
  rep.soc_min_slack = 0.0;
  for (std::size_t k = 0; k < C.alpha.size(); ++k)
    rep.soc_min_slack = std::min(rep.soc_min_slack, C.kappa(static_cast<int>(k)) - C.alpha[k].norm());

  PointList gens = generators;
  if (gens.empty() && I == 0 && J > 0 && D <= 10) {
    try {
      gens = enumerate_vertices(X.S, X.t);
    } catch (const std::invalid_argument&) {
      gens.clear();
    }
  }
  MatrixXd P(D + 1, D + 1);
  P << C.F, C.g, C.g.transpose(), C.h - 1.0;
  rep.vertex_form_max = -std::numeric_limits<double>::infinity();
  for (const auto& v : gens) {
    VectorXd z(D + 1);
    z << v, 1.0;
    rep.vertex_form_max = std::max(rep.vertex_form_max, z.dot(P * z));
  }
  rep.generators_checked = static_cast<int>(gens.size());
  if (gens.empty()) rep.vertex_form_max = 0.0;

  rep.passed = true;
  auto fail = [&](const std::string& why) {
    if (rep.passed) rep.failure = why;
    rep.passed = false;
  };
  if (rep.lmi1_min_eig < -tol) fail("first LMI violated");
  if (rep.lmi2_min_eig < -tol) fail("second LMI violated");
  if (rep.n_min < -1e-9) fail("negative multiplier entry");
  if (I > 0 && C.lambda.size() > 0 && C.lambda.minCoeff() < -1e-9) fail("negative quadratic multiplier");
  if (rep.soc_min_slack < -1e-9) fail("cone constraint on alpha violated");
  if (rep.vertex_form_max > tol) fail("quadratic form positive at a generator");
  return rep;
}

CertificateReport verify_certificate(const Polytope& P, const Ellipsoid& E, const Certificate& C, double tol) {
  return verify_certificate(LiftedSet::from_polytope(P), E, C, tol, P.vertices());
}

CertificateReport verify_certificate(const QuadSet& Q, const Ellipsoid& E, const Certificate& C, double tol) {
  return verify_certificate(LiftedSet::from_quadset(Q), E, C, tol);
}

LiftedCertificate lift_smvie_certificate(const Polytope& P, const MatrixXd& Lambda, const VectorXd& rho) {
  const MatrixXd& S = P.S();
  const VectorXd& t = P.t();
  const int J = P.rows();
  const int K = P.dim();
  if (Lambda.rows() != J || Lambda.cols() != K || rho.size() != J)
    throw std::invalid_argument("lift_smvie_certificate: dimension mismatch");
  const double scale = std::max(1.0, rho.cwiseAbs().maxCoeff() * S.cwiseAbs().maxCoeff());
  if ((S.transpose() * rho).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw std::invalid_argument("lift_smvie_certificate: S^T rho != 0");
  for (int j = 0; j < J; ++j)
    if (Lambda.row(j).norm() > rho(j) + 1e-9) throw std::invalid_argument("lift_smvie_certificate: ||Lambda_j|| > rho_j");

  const double kappa = std::exp(1.0 - rho.dot(t));
  const MatrixXd LS = Lambda.transpose() * S;
  Eigen::JacobiSVD<MatrixXd> svd(LS, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const VectorXd sig = svd.singularValues();
  if (!(sig.minCoeff() > 0.0)) throw std::invalid_argument("lift_smvie_certificate: Lambda^T S is singular");
  const MatrixXd& U = svd.matrixU();
  const MatrixXd& V = svd.matrixV();
  MatrixXd A = kappa * V * sig.asDiagonal() * V.transpose();
  A = 0.5 * (A + A.transpose()).eval();
  const VectorXd b = -kappa * V * U.transpose() * Lambda.transpose() * t;

  Certificate C;
  C.N = kappa * kappa * (rho * rho.transpose() - Lambda * Lambda.transpose());
  C.F = A * A;
  C.g = A * b;
  C.h = b.squaredNorm();
  C.lambda = VectorXd(0);

  const MatrixXd Sym = -0.5 * (S.transpose() * Lambda + Lambda.transpose() * S);
  Eigen::LLT<MatrixXd> llt(Sym);
  double dual = std::numeric_limits<double>::infinity();
  if (llt.info() == Eigen::Success)
    dual = K * rho.dot(t) - K - 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return {Ellipsoid(A, b), C, dual};
}

}  // namespace lowner
