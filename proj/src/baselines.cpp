#include "lowner/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lowner {

namespace {

void require_optimal(const SdpSolution& s, const char* what) {
  if (s.status != SdpStatus::optimal)
    throw std::runtime_error(std::string(what) + ": solver failure (" + to_string(s.status) + ")");
}

AffineMatrix logdet_of(const SdpProblem& p, int var, int K) {
  AffineMatrix L(K);
  for (int i = 0; i < K; ++i)
    for (int j = i; j < K; ++j) L.add_term(i, j, p.idx(var, i, j), 1.0);
  return L;
}

double logdet_pd(const MatrixXd& M) {
  Eigen::LLT<MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace

InscribedEllipsoid solve_mvie(const Polytope& P, const SdpSettings& settings) {
  (void)P.vertices();
  const int K = P.dim();
  const int J = P.rows();
  SdpProblem p;
  const int B = p.add_symmetric("B", K);
  const int d = p.add_vector("d", K);
  for (int j = 0; j < J; ++j) {
    std::vector<AffineExpr> u(K);
    for (int k = 0; k < K; ++k)
      for (int m = 0; m < K; ++m)
        if (P.S()(j, m) != 0.0) u[k].add(p.idx(B, k, m), P.S()(j, m));
    AffineExpr w(P.t()(j));
    for (int m = 0; m < K; ++m)
      if (P.S()(j, m) != 0.0) w.add(p.idx(d, m), -P.S()(j, m));
    p.add_soc(u, w, "row");
  }
  p.set_objective(AffineExpr(), logdet_of(p, B, K));
  const SdpSolution s = solve(p, settings);
  require_optimal(s, "solve_mvie");
  return {p.value_symmetric(s.x, B), p.value_vector(s.x, d)};
}

double smvie_dual_objective(const Polytope& P, const SmvieDual& D) {
  const int K = P.dim();
  const MatrixXd M = -0.5 * (P.S().transpose() * D.Lambda + D.Lambda.transpose() * P.S());
  return K * D.rho.dot(P.t()) - K - logdet_pd(M);
}

SmvieDualReport verify_smvie_dual(const Polytope& P, const SmvieDual& D, double tol) {
  if (D.Lambda.rows() != P.rows() || D.Lambda.cols() != P.dim() || D.rho.size() != P.rows())
    throw std::invalid_argument("verify_smvie_dual: dimension mismatch");
  SmvieDualReport r;
  r.equality_residual = (P.S().transpose() * D.rho).cwiseAbs().maxCoeff();
  r.soc_min_slack = (D.rho - D.Lambda.rowwise().norm()).minCoeff();
  const MatrixXd M = -0.5 * (P.S().transpose() * D.Lambda + D.Lambda.transpose() * P.S());
  r.shape_min_eig = Eigen::SelfAdjointEigenSolver<MatrixXd>(M, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  r.passed = r.equality_residual <= tol && r.soc_min_slack >= -tol && r.shape_min_eig > 0.0;
  return r;
}

SmvieDual solve_smvie_dual(const Polytope& P, double* objective, const SdpSettings& settings) {
  (void)P.vertices();
  const int K = P.dim();
  const int J = P.rows();
  const MatrixXd& S = P.S();
  SdpProblem p;
  std::vector<int> lam(J);
  for (int j = 0; j < J; ++j) lam[j] = p.add_vector("Lambda_" + std::to_string(j), K);
  const int rho = p.add_vector("rho", J);
  for (int j = 0; j < J; ++j) {
    std::vector<AffineExpr> u;
    for (int k = 0; k < K; ++k) u.push_back(p.ref(lam[j], k));
    p.add_soc(u, p.ref(rho, j), "dual_row");
  }
  for (int k = 0; k < K; ++k) {
    AffineExpr e;
    for (int j = 0; j < J; ++j)
      if (S(j, k) != 0.0) e.add(p.idx(rho, j), S(j, k));
    p.add_equality(e);
  }
  AffineMatrix L(K);
  for (int j = 0; j < J; ++j)
    for (int a = 0; a < K; ++a)
      for (int b = a; b < K; ++b) {
        if (a == b) {
          if (S(j, a) != 0.0) L.add_term(a, a, p.idx(lam[j], a), -S(j, a));
          continue;
        }
        if (S(j, a) != 0.0) L.add_term(a, b, p.idx(lam[j], b), -0.5 * S(j, a));
        if (S(j, b) != 0.0) L.add_term(a, b, p.idx(lam[j], a), -0.5 * S(j, b));
      }
  AffineExpr lin(-static_cast<double>(K));
  for (int j = 0; j < J; ++j) lin.add(p.idx(rho, j), K * P.t()(j));
  p.set_objective(lin, L);
  const SdpSolution s = solve(p, settings);
  require_optimal(s, "solve_smvie_dual");
  SmvieDual D{MatrixXd(J, K), p.value_vector(s.x, rho)};
  for (int j = 0; j < J; ++j) D.Lambda.row(j) = p.value_vector(s.x, lam[j]).transpose();
  if (objective) *objective = s.objective;
  return D;
}

SmvieResult solve_smvie(const Polytope& P, const SdpSettings& settings) {
  const int K = P.dim();
  const InscribedEllipsoid in = solve_mvie(P, settings);
  const MatrixXd KB = static_cast<double>(K) * in.B;
  MatrixXd A = KB.inverse();
  A = 0.5 * (A + A.transpose()).eval();
  const VectorXd b = -A * in.d;
  double dual_obj = 0.0;
  SmvieDual D = solve_smvie_dual(P, &dual_obj, settings);
  return {Ellipsoid(A, b), in, std::move(D), K * std::log(static_cast<double>(K)) + logdet_pd(in.B), dual_obj};
}

Ellipsoid solve_sproc(const QuadSet& Q, const SdpSettings& settings) {
  if (Q.quads().empty()) throw std::invalid_argument("solve_sproc: at least one quadratic row required");
  const int K = Q.dim();
  const MatrixXd& S = Q.base().S();
  const VectorXd& t = Q.base().t();
  const int J = Q.base().rows();
  const int I = static_cast<int>(Q.quads().size());
  SdpProblem p;
  const int A = p.add_symmetric("A", K);
  const int b = p.add_vector("b", K);
  const int mu = J > 0 ? p.add_vector("mu", J, true) : -1;
  const int lam = p.add_vector("lambda", I, true);

  AffineMatrix L(2 * K + 1);
  for (int i = 0; i < I; ++i) {
    const QuadRow& qr = Q.quads()[i];
    const MatrixXd QQ = qr.Q.transpose() * qr.Q;
    const VectorXd Qq = qr.Q.transpose() * qr.q;
    const int id = p.idx(lam, i);
    for (int r = 0; r < K; ++r) {
      for (int c = r; c < K; ++c)
        if (QQ(r, c) != 0.0) L.add_term(r, c, id, QQ(r, c));
      if (Qq(r) != 0.0) L.add_term(r, K, id, Qq(r));
    }
    L.add_term(K, K, id, qr.q.squaredNorm() - 1.0);
  }
  for (int j = 0; j < J; ++j) {
    const int id = p.idx(mu, j);
    for (int r = 0; r < K; ++r)
      if (S(j, r) != 0.0) L.add_term(r, K, id, 0.5 * S(j, r));
    L.add_term(K, K, id, -t(j));
  }
  L.add_const(K, K, 1.0);
  for (int k = 0; k < K; ++k) {
    for (int r = 0; r < K; ++r) L.add_term(r, K + 1 + k, p.idx(A, k, r), 1.0);
    L.add_term(K, K + 1 + k, p.idx(b, k), 1.0);
    L.add_const(K + 1 + k, K + 1 + k, 1.0);
  }
  p.add_psd(std::move(L), "sproc");
  p.set_objective(AffineExpr(), logdet_of(p, A, K));
  const SdpSolution s = solve(p, settings);
  require_optimal(s, "solve_sproc");
  return Ellipsoid(p.value_symmetric(s.x, A), p.value_vector(s.x, b));
}

Ellipsoid solve_ktt(const Polytope& P, const SdpSettings& settings) {
  (void)P.vertices();
  const int K = P.dim();
  const int J = P.rows();
  const MatrixXd& S = P.S();
  const VectorXd& t = P.t();
  SdpProblem p;
  const int A = p.add_symmetric("A", K);
  const int b = p.add_vector("b", K);
  std::vector<int> C(J);
  for (int j = 0; j < J; ++j) {
    C[j] = p.add_symmetric("C_" + std::to_string(j), K + 1);
    AffineMatrix Cm(K + 1);
    for (int r = 0; r <= K; ++r)
      for (int c = r; c <= K; ++c) Cm.add_term(r, c, p.idx(C[j], r, c), 1.0);
    p.add_psd(std::move(Cm), "C");
  }
  // [I b; b^T 1] - sum t_j C_j >= 0
  AffineMatrix L(K + 1);
  for (int r = 0; r < K; ++r) {
    L.add_const(r, r, 1.0);
    L.add_term(r, K, p.idx(b, r), 1.0);
  }
  L.add_const(K, K, 1.0);
  for (int j = 0; j < J; ++j)
    if (t(j) != 0.0)
      for (int r = 0; r <= K; ++r)
        for (int c = r; c <= K; ++c) L.add_term(r, c, p.idx(C[j], r, c), -t(j));
  p.add_psd(std::move(L), "ktt");
  // [0 A_k; A_k^T 0] = -sum_j S_jk C_j
  for (int k = 0; k < K; ++k)
    for (int r = 0; r <= K; ++r)
      for (int c = r; c <= K; ++c) {
        AffineExpr e;
        if (r < K && c == K) e.add(p.idx(A, r, k), 1.0);
        for (int j = 0; j < J; ++j)
          if (S(j, k) != 0.0) e.add(p.idx(C[j], r, c), S(j, k));
        p.add_equality(e);
      }
  p.set_objective(AffineExpr(), logdet_of(p, A, K));
  const SdpSolution s = solve(p, settings);
  require_optimal(s, "solve_ktt");
  return Ellipsoid(p.value_symmetric(s.x, A), p.value_vector(s.x, b));
}

PointMveResult mve_of_points(const PointList& points, double eps, int max_iterations) {
  if (points.empty()) throw std::invalid_argument("mve_of_points: no points");
  const int K = static_cast<int>(points[0].size());
  const int n = static_cast<int>(points.size());
  if (n < K + 1 || affine_rank(points) < K) throw std::invalid_argument("mve_of_points: rank-deficient point set");
  MatrixXd Q(K + 1, n);
  for (int i = 0; i < n; ++i) Q.col(i) << points[i], 1.0;
  const double d = K + 1.0;
  VectorXd u = VectorXd::Constant(n, 1.0 / n);
  PointMveResult res{Ellipsoid::ball(VectorXd::Zero(K), 1.0), 0.0, 0, {}};
  VectorXd omega(n);
  for (int it = 0;; ++it) {
    const MatrixXd M = Q * u.asDiagonal() * Q.transpose();
    Eigen::LLT<MatrixXd> llt(M);
    if (llt.info() != Eigen::Success) throw std::runtime_error("mve_of_points: singular moment matrix");
    const MatrixXd Lq = llt.matrixL().solve(Q);
    omega = Lq.colwise().squaredNorm().transpose();
    int j = 0, k = -1;
    for (int i = 0; i < n; ++i) {
      if (omega(i) > omega(j)) j = i;
      if (u(i) > 0.0 && (k < 0 || omega(i) < omega(k))) k = i;
    }
    const double eps_plus = omega(j) / d - 1.0;
    const double eps_minus = 1.0 - omega(k) / d;
    res.measure = std::max(eps_plus, eps_minus);
    res.iterations = it;
    if (res.measure <= eps) break;
    if (it >= max_iterations) throw std::runtime_error("mve_of_points: iteration cap reached");
    if (eps_plus >= eps_minus) {
      const double tau = (omega(j) - d) / (d * (omega(j) - 1.0));
      u *= 1.0 - tau;
      u(j) += tau;
    } else {
      const double cap = u(k) / (1.0 - u(k));
      double tau = cap;
      if (omega(k) > 1.0) tau = std::min(tau, (d - omega(k)) / (d * (omega(k) - 1.0)));
      u *= 1.0 + tau;
      u(k) -= tau;
      if (tau == cap) u(k) = 0.0;
    }
  }
  VectorXd c = VectorXd::Zero(K);
  for (int i = 0; i < n; ++i) c += u(i) * points[i];
  MatrixXd Sig = MatrixXd::Zero(K, K);
  for (int i = 0; i < n; ++i) Sig += u(i) * (points[i] - c) * (points[i] - c).transpose();
  MatrixXd H = Sig.inverse() / K;
  H = 0.5 * (H + H.transpose()).eval();
  double worst = 0.0;
  for (const auto& x : points) worst = std::max(worst, (x - c).dot(H * (x - c)));
  H /= worst;
  const MatrixXd A = sym_sqrt(H);
  res.ellipsoid = Ellipsoid(A, -A * c);
  res.weights = u;
  return res;
}

Separation separation_oracle(const Polytope& P, const Ellipsoid& E) {
  const PointList& V = P.vertices();
  Separation s;
  s.violation = -1.0;
  for (int i = 0; i < static_cast<int>(V.size()); ++i) {
    const double lv = E.level(V[i]);
    if (lv > s.violation) s = {V[i], lv, i};
  }
  return s;
}

std::vector<int> spread_vertices(const PointList& pts) {
  const int n = static_cast<int>(pts.size());
  const int K = static_cast<int>(pts[0].size());
  VectorXd mean = VectorXd::Zero(K);
  for (const auto& p : pts) mean += p;
  mean /= n;
  std::vector<int> chosen;
  int first = 0;
  for (int i = 1; i < n; ++i)
    if ((pts[i] - mean).norm() > (pts[first] - mean).norm()) first = i;
  chosen.push_back(first);
  while (static_cast<int>(chosen.size()) < std::min(n, K + 1)) {
    const int m = static_cast<int>(chosen.size()) - 1;
    MatrixXd Bm(K, std::max(m, 1));
    Bm.setZero();
    for (int a = 0; a < m; ++a) Bm.col(a) = pts[chosen[a + 1]] - pts[chosen[0]];
    Eigen::HouseholderQR<MatrixXd> qr(Bm);
    const MatrixXd Qb = qr.householderQ() * MatrixXd::Identity(K, std::max(m, 1));
    int best = -1;
    double bd = -1.0;
    for (int i = 0; i < n; ++i) {
      if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
      VectorXd r = pts[i] - pts[chosen[0]];
      if (m > 0) r -= Qb.leftCols(m) * (Qb.leftCols(m).transpose() * r);
      if (r.norm() > bd) {
        bd = r.norm();
        best = i;
      }
    }
    chosen.push_back(best);
  }
  return chosen;
}

ExactMveResult solve_exact_constraint_generation(const Polytope& P, double tol, double eps) {
  const PointList& V = P.vertices();
  std::vector<int> active = spread_vertices(V);
  const int cap = static_cast<int>(V.size()) + 1;
  for (int round = 1; round <= cap; ++round) {
    PointList sub;
    for (int i : active) sub.push_back(V[i]);
    Ellipsoid E = mve_of_points(sub, eps).ellipsoid;
    const Separation s = separation_oracle(P, E);
    const bool known = std::find(active.begin(), active.end(), s.index) != active.end();
    if (s.violation <= 1.0 + tol || known) {
      if (s.violation > 1.0) E = E.scaled(std::sqrt(s.violation));
      return {E, round, active};
    }
    active.push_back(s.index);
  }
  throw std::runtime_error("solve_exact_constraint_generation: iteration cap reached");
}

}  // namespace lowner
