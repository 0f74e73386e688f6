#include "lowner/dro.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lowner/parallel.hpp"
#include "lowner/rng.hpp"

namespace lowner {

namespace {
constexpr std::uint64_t kSeedStream = 0x73656564;
constexpr std::uint64_t kInventoryStream = 0x696e76;

// [A^T A, A^T b; b^T A, b^T b - 1] in coordinates xi = c + H zeta, normalized to unit max entry.
MatrixXd j_matrix(const Ellipsoid& E, const VectorXd& c, const VectorXd& h) {
  const int K = E.dim();
  const MatrixXd A = E.A() * h.asDiagonal();
  const VectorXd b = E.b() + E.A() * c;
  MatrixXd J(K + 1, K + 1);
  J.topLeftCorner(K, K) = A.transpose() * A;
  J.topRightCorner(K, 1) = A.transpose() * b;
  J.bottomLeftCorner(1, K) = J.topRightCorner(K, 1).transpose();
  J(K, K) = b.squaredNorm() - 1.0;
  return J / J.cwiseAbs().maxCoeff();
}

// {zeta : S (c + H zeta) <= t} with rows scaled to unit norm; the multipliers absorb the scale.
Polytope normalized(const Polytope& P, const VectorXd& c, const VectorXd& h) {
  const MatrixXd S = P.S() * h.asDiagonal();
  const VectorXd t = P.t() - P.S() * c;
  const VectorXd n = S.rowwise().norm();
  return Polytope(n.cwiseInverse().asDiagonal() * S, t.cwiseQuotient(n));
}

// Same model in coordinates xi = c + H zeta.
DroInstance normalized(const DroInstance& inst, const VectorXd& c, const VectorXd& h) {
  DroInstance out = inst;
  out.D = inst.D * h.asDiagonal();
  out.d = inst.d + inst.D * c;
  for (auto& r : out.rows) {
    r.h0 += r.T0.dot(c);
    r.hx += r.Tx.transpose() * c;
    r.T0 = h.asDiagonal() * r.T0;
    r.Tx = h.asDiagonal() * r.Tx;
    r.w += r.W * c;
    r.W = r.W * h.asDiagonal();
  }
  const VectorXd hinv = h.cwiseInverse();
  out.mu = hinv.asDiagonal() * (inst.mu - c);
  const MatrixXd second = inst.Sigma - inst.mu * c.transpose() - c * inst.mu.transpose() + c * c.transpose();
  out.Sigma = hinv.asDiagonal() * second * hinv.asDiagonal();
  out.Sigma = 0.5 * (out.Sigma + out.Sigma.transpose()).eval();
  return out;
}

void add_const_matrix_term(AffineMatrix& m, const MatrixXd& C, int idx) {
  for (int r = 0; r < C.rows(); ++r)
    for (int c = r; c < C.cols(); ++c)
      if (C(r, c) != 0.0) m.add_term(r, c, idx, C(r, c));
}

struct CellVars {
  int Y = -1, y = -1, gamma = -1, delta = -1;
  std::vector<int> lambda, rho;
};

// Adds sign * [1/2 (V^T Y + Y^T V), 1/2 (V^T y + Y^T v); ., v^T y] for V (N2 x K), v (N2).
void add_rule_form(const SdpProblem& p, AffineMatrix& m, const CellVars& cv, const MatrixXd& V, const VectorXd& v,
                   double sign, int N2, int K) {
  if (cv.Y >= 0) {
    for (int a = 0; a < K; ++a)
      for (int b = a; b < K; ++b)
        for (int n = 0; n < N2; ++n) {
          if (V(n, a) != 0.0) m.add_term(a, b, p.idx(cv.Y, n * K + b), 0.5 * sign * V(n, a));
          if (V(n, b) != 0.0) m.add_term(a, b, p.idx(cv.Y, n * K + a), 0.5 * sign * V(n, b));
        }
    for (int a = 0; a < K; ++a)
      for (int n = 0; n < N2; ++n)
        if (v(n) != 0.0) m.add_term(a, K, p.idx(cv.Y, n * K + a), 0.5 * sign * v(n));
  }
  for (int a = 0; a < K; ++a)
    for (int n = 0; n < N2; ++n)
      if (V(n, a) != 0.0) m.add_term(a, K, p.idx(cv.y, n), 0.5 * sign * V(n, a));
  for (int n = 0; n < N2; ++n)
    if (v(n) != 0.0) m.add_term(K, K, p.idx(cv.y, n), sign * v(n));
}

// P_j(rho) = [0, S^T rho / 2; ., -t^T rho]
void add_p_term(const SdpProblem& p, AffineMatrix& m, const Polytope& cell, int rho, int K) {
  for (int l = 0; l < cell.rows(); ++l) {
    const int id = p.idx(rho, l);
    for (int a = 0; a < K; ++a)
      if (cell.S()(l, a) != 0.0) m.add_term(a, K, id, 0.5 * cell.S()(l, a));
    if (cell.t()(l) != 0.0) m.add_term(K, K, id, -cell.t()(l));
  }
}

}  // namespace

void DroInstance::validate() const {
  if (c.size() != N1 || G.cols() != N1 || G.rows() != f.size()) throw std::invalid_argument("DroInstance: first-stage data");
  if (D.rows() != N2 || D.cols() != K || d.size() != N2) throw std::invalid_argument("DroInstance: cost data");
  if (support.dim() != K || mu.size() != K || Sigma.rows() != K || Sigma.cols() != K)
    throw std::invalid_argument("DroInstance: support or moments");
  for (const auto& r : rows) {
    if (r.W.rows() != N2 || r.W.cols() != K || r.w.size() != N2 || r.T0.size() != K || r.Tx.rows() != K ||
        r.Tx.cols() != N1 || r.hx.size() != N1)
      throw std::invalid_argument("DroInstance: recourse row dimensions");
    if (r.equality && r.W.cwiseAbs().maxCoeff() > 0.0)
      throw std::invalid_argument("DroInstance: equality rows must have deterministic recourse");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(Sigma - mu * mu.transpose(), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9) throw std::invalid_argument("DroInstance: Sigma - mu mu^T not PSD");
}

RecourseRow DroInstance::make_row() const {
  RecourseRow r;
  r.W = MatrixXd::Zero(N2, K);
  r.w = VectorXd::Zero(N2);
  r.T0 = VectorXd::Zero(K);
  r.Tx = MatrixXd::Zero(K, N1);
  r.hx = VectorXd::Zero(N1);
  return r;
}

PointList sample_seeds(const Polytope& support, int J, std::uint64_t seed) {
  if (J < 1) throw std::invalid_argument("sample_seeds: J >= 1 required");
  Rng rng(seed, kSeedStream);
  PointList pts;
  while (static_cast<int>(pts.size()) < J) {
    VectorXd p = sample_polytope(support, rng);
    bool dup = false;
    for (const auto& q : pts) dup = dup || (p - q).norm() <= 1e-8;
    if (!dup) pts.push_back(p);
  }
  return pts;
}

Partitions build_partitions(const Polytope& support, const PointList& seeds, int threads, const CopOptions& opts) {
  PartitionFamily fam = voronoi_partition(support, seeds);
  const int J = static_cast<int>(fam.cells.size());
  std::vector<Ellipsoid> ells = parallel_map<Ellipsoid>(
      J, threads, [&](int j) { return solve_polytope_mve(fam.cells[j], opts).ellipsoid; });
  return {std::move(fam), std::move(ells)};
}

namespace {

// Builder on normalized data; cells are in zeta coordinates and Jms are the matching ellipsoid forms.
PldPolicy solve_pld_normalized(const DroInstance& inst, const std::vector<Polytope>& cells,
                               const std::vector<MatrixXd>& Jms, RuleClass rule, const SdpSettings& settings) {
  const int K = inst.K, N1 = inst.N1, N2 = inst.N2;
  const int J = static_cast<int>(cells.size());
  const int L = static_cast<int>(inst.rows.size());
  SdpProblem p;
  const int x = p.add_vector("x", N1);
  const int Gm = p.add_symmetric("Gamma", K);
  const int beta = p.add_vector("beta", K);
  const int alpha = p.add_scalar("alpha");

  for (int r = 0; r < inst.G.rows(); ++r) {
    AffineExpr e(inst.f(r));
    for (int i = 0; i < N1; ++i)
      if (inst.G(r, i) != 0.0) e.add(p.idx(x, i), -inst.G(r, i));
    p.add_nonneg(e);
  }
  {
    AffineMatrix g(K);
    for (int a = 0; a < K; ++a)
      for (int b = a; b < K; ++b) g.add_term(a, b, p.idx(Gm, a, b), 1.0);
    p.add_psd(std::move(g), "Gamma");
  }

  std::vector<CellVars> cvs(J);
  for (int j = 0; j < J; ++j) {
    const Polytope& cell = cells[j];
    CellVars& cv = cvs[j];
    const std::string sfx = "_" + std::to_string(j);
    if (rule == RuleClass::linear) cv.Y = p.add_vector("Y" + sfx, N2 * K);
    cv.y = p.add_vector("y" + sfx, N2);
    cv.gamma = p.add_vector("gamma" + sfx, cell.rows(), true);
    cv.delta = p.add_scalar("delta" + sfx, true);
    const MatrixXd& Jm = Jms[j];

    AffineMatrix obj(K + 1);
    for (int a = 0; a < K; ++a) {
      for (int b = a; b < K; ++b) obj.add_term(a, b, p.idx(Gm, a, b), 1.0);
      obj.add_term(a, K, p.idx(beta, a), 0.5);
    }
    obj.add_term(K, K, p.idx(alpha), 1.0);
    add_rule_form(p, obj, cv, inst.D, inst.d, -1.0, N2, K);
    add_p_term(p, obj, cell, cv.gamma, K);
    add_const_matrix_term(obj, Jm, p.idx(cv.delta));
    p.add_psd(std::move(obj), "objective" + sfx);

    for (int l = 0; l < L; ++l) {
      const RecourseRow& row = inst.rows[l];
      if (row.equality) {
        for (int k = 0; k < K; ++k) {
          AffineExpr e(-row.T0(k));
          if (cv.Y >= 0)
            for (int n = 0; n < N2; ++n)
              if (row.w(n) != 0.0) e.add(p.idx(cv.Y, n * K + k), row.w(n));
          for (int i = 0; i < N1; ++i)
            if (row.Tx(k, i) != 0.0) e.add(p.idx(x, i), -row.Tx(k, i));
          p.add_equality(e);
        }
        AffineExpr e(-row.h0);
        for (int n = 0; n < N2; ++n)
          if (row.w(n) != 0.0) e.add(p.idx(cv.y, n), row.w(n));
        for (int i = 0; i < N1; ++i)
          if (row.hx(i) != 0.0) e.add(p.idx(x, i), -row.hx(i));
        p.add_equality(e);
        cv.lambda.push_back(-1);
        cv.rho.push_back(-1);
        continue;
      }
      const int lam = p.add_scalar("lambda" + sfx + "_" + std::to_string(l), true);
      const int rho = p.add_vector("rho" + sfx + "_" + std::to_string(l), cell.rows(), true);
      cv.lambda.push_back(lam);
      cv.rho.push_back(rho);
      AffineMatrix m(K + 1);
      add_rule_form(p, m, cv, row.W, row.w, 1.0, N2, K);
      for (int a = 0; a < K; ++a) {
        if (row.T0(a) != 0.0) m.add_const(a, K, -0.5 * row.T0(a));
        for (int i = 0; i < N1; ++i)
          if (row.Tx(a, i) != 0.0) m.add_term(a, K, p.idx(x, i), -0.5 * row.Tx(a, i));
      }
      m.add_const(K, K, -row.h0);
      for (int i = 0; i < N1; ++i)
        if (row.hx(i) != 0.0) m.add_term(K, K, p.idx(x, i), -row.hx(i));
      add_p_term(p, m, cell, rho, K);
      add_const_matrix_term(m, Jm, p.idx(lam));
      p.add_psd(std::move(m), "row" + sfx + "_" + std::to_string(l));
    }
  }

  AffineExpr objective;
  for (int i = 0; i < N1; ++i)
    if (inst.c(i) != 0.0) objective.add(p.idx(x, i), inst.c(i));
  objective.add(p.idx(alpha), 1.0);
  for (int a = 0; a < K; ++a) {
    if (inst.mu(a) != 0.0) objective.add(p.idx(beta, a), inst.mu(a));
    for (int b = a; b < K; ++b) {
      const double w = (a == b) ? inst.Sigma(a, a) : inst.Sigma(a, b) + inst.Sigma(b, a);
      if (w != 0.0) objective.add(p.idx(Gm, a, b), w);
    }
  }
  p.set_objective(objective);

  const SdpSolution s = solve(p, settings);
  if (s.status == SdpStatus::infeasible_detected) throw std::runtime_error("solve_pld: restriction infeasible");
  if (s.status != SdpStatus::optimal)
    throw std::runtime_error(std::string("solve_pld: solver failure (") + to_string(s.status) + ")");

  PldPolicy pol;
  pol.x = p.value_vector(s.x, x);
  for (int j = 0; j < J; ++j) {
    MatrixXd Y = MatrixXd::Zero(N2, K);
    if (cvs[j].Y >= 0) {
      const VectorXd v = p.value_vector(s.x, cvs[j].Y);
      for (int n = 0; n < N2; ++n) Y.row(n) = v.segment(n * K, K).transpose();
    }
    pol.Y.push_back(Y);
    pol.y.push_back(p.value_vector(s.x, cvs[j].y));
  }
  pol.Gamma = p.value_symmetric(s.x, Gm);
  pol.beta = p.value_vector(s.x, beta);
  pol.alpha = p.value_scalar(s.x, alpha);
  pol.objective = s.objective;
  pol.status = s.status;
  pol.newton_steps = s.newton_steps;
  return pol;
}

}  // namespace

PldPolicy solve_pld(const DroInstance& inst, const std::vector<Polytope>& cells, const std::vector<Ellipsoid>& ellipsoids,
                    RuleClass rule, const SdpSettings& settings) {
  inst.validate();
  if (cells.empty() || cells.size() != ellipsoids.size()) throw std::invalid_argument("solve_pld: one ellipsoid per cell");
  for (std::size_t j = 0; j < cells.size(); ++j)
    if (cells[j].dim() != inst.K || ellipsoids[j].dim() != inst.K)
      throw std::invalid_argument("solve_pld: cell dimension mismatch");
  // Centre and scale the uncertainty to the bounding box of the support.
  const PointList& V = inst.support.vertices();
  VectorXd lo = V.front(), hi = V.front();
  for (const auto& v : V) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const VectorXd c = 0.5 * (lo + hi);
  const VectorXd h = (0.5 * (hi - lo)).cwiseMax(1e-12);
  std::vector<Polytope> zcells;
  std::vector<MatrixXd> Jms;
  for (std::size_t j = 0; j < cells.size(); ++j) {
    zcells.push_back(normalized(cells[j], c, h));
    Jms.push_back(j_matrix(ellipsoids[j], c, h));
  }
  PldPolicy pol = solve_pld_normalized(normalized(inst, c, h), zcells, Jms, rule, settings);

  // y = Y' zeta + y' with zeta = H^{-1} (xi - c); the objective quadratic transforms alike.
  const VectorXd hinv = h.cwiseInverse();
  for (std::size_t j = 0; j < cells.size(); ++j) {
    const MatrixXd Y = pol.Y[j] * hinv.asDiagonal();
    pol.y[j] -= Y * c;
    pol.Y[j] = Y;
  }
  const MatrixXd G = hinv.asDiagonal() * pol.Gamma * hinv.asDiagonal();
  const VectorXd bz = hinv.asDiagonal() * pol.beta;
  pol.alpha += c.dot(G * c) - bz.dot(c);
  pol.beta = bz - 2.0 * G * c;
  pol.Gamma = G;
  pol.cells = cells;
  pol.ellipsoids = ellipsoids;
  return pol;
}

PldPolicy solve_ablation(const DroInstance& inst, const Partitions& parts, const std::string& mode,
                         const SdpSettings& settings, const CopOptions& opts) {
  if (mode == "pwl") return solve_pld(inst, parts.family.cells, parts.ellipsoids, RuleClass::linear, settings);
  if (mode == "pws") return solve_pld(inst, parts.family.cells, parts.ellipsoids, RuleClass::constant, settings);
  if (mode == "ldr") {
    const Ellipsoid E = solve_polytope_mve(inst.support, opts).ellipsoid;
    return solve_pld(inst, {inst.support}, {E}, RuleClass::linear, settings);
  }
  if (mode == "pwl2") {
    std::vector<Ellipsoid> big;
    for (const auto& E : parts.ellipsoids) big.push_back(E.scaled(2.0));
    return solve_pld(inst, parts.family.cells, big, RuleClass::linear, settings);
  }
  throw std::invalid_argument("solve_ablation: unknown mode '" + mode + "'");
}

double policy_violation(const DroInstance& inst, const PldPolicy& pol, int cell, const VectorXd& xi) {
  const VectorXd y = pol.decision(cell, xi);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& r : inst.rows) {
    const double lhs = (r.T0 + r.Tx * pol.x).dot(xi) + r.h0 + r.hx.dot(pol.x);
    const double rhs = (r.W * xi + r.w).dot(y);
    worst = std::max(worst, r.equality ? std::abs(lhs - rhs) : lhs - rhs);
  }
  return worst;
}

DroInstance generate_inventory_instance(int N, std::uint64_t seed, double budget, double eps) {
  if (N < 1) throw std::invalid_argument("generate_inventory_instance: N >= 1 required");
  Rng rng(seed, kInventoryStream);
  const int K = 2 * N;
  VectorXd lo(K), hi(K);
  lo << VectorXd::Zero(N), VectorXd::Constant(N, 8.0);
  hi << VectorXd::Constant(N, 10.0), VectorXd::Constant(N, 12.0);
  DroInstance inst{N + 1, 2 * N + 1, K, VectorXd::Zero(N + 1), MatrixXd::Zero(N + 1, N + 1), VectorXd::Zero(N + 1),
                   MatrixXd::Zero(2 * N + 1, K), VectorXd::Zero(2 * N + 1), {}, Polytope::box(lo, hi), VectorXd(K),
                   MatrixXd(K, K)};
  inst.c(0) = 1.0;  // kappa
  for (int i = 0; i < N; ++i) inst.G(i, 1 + i) = -1.0;
  inst.G.row(N).tail(N).setOnes();
  inst.f(N) = budget;
  inst.d(0) = 1.0 / eps;

  const int tau = 0;
  auto y1 = [](int i) { return 1 + i; };
  auto y2 = [N](int i) { return 1 + N + i; };
  {
    RecourseRow r = inst.make_row();
    r.w(tau) = 1.0;
    inst.rows.push_back(r);
  }
  for (int i = 0; i < N; ++i) {
    RecourseRow r = inst.make_row();
    r.w(y1(i)) = 1.0;
    inst.rows.push_back(r);
  }
  for (int i = 0; i < N; ++i) {
    RecourseRow r = inst.make_row();
    r.w(y2(i)) = 1.0;
    inst.rows.push_back(r);
  }
  {
    // -kappa <= tau - g^T y1 - s^T y2, holding cost g = e
    RecourseRow r = inst.make_row();
    r.w(tau) = 1.0;
    for (int i = 0; i < N; ++i) {
      r.w(y1(i)) = -1.0;
      r.W(y2(i), N + i) = -1.0;
    }
    r.hx(0) = -1.0;
    inst.rows.push_back(r);
  }
  for (int i = 0; i < N; ++i) {
    RecourseRow r = inst.make_row();  // x_i - xi_i <= y1_i
    r.w(y1(i)) = 1.0;
    r.T0(i) = -1.0;
    r.hx(1 + i) = 1.0;
    inst.rows.push_back(r);
  }
  for (int i = 0; i < N; ++i) {
    RecourseRow r = inst.make_row();  // xi_i - x_i <= y2_i
    r.w(y2(i)) = 1.0;
    r.T0(i) = 1.0;
    r.hx(1 + i) = -1.0;
    inst.rows.push_back(r);
  }

  VectorXd mu_xi(N);
  for (int i = 0; i < N; ++i) mu_xi(i) = rng.uniform(0.0, 2.0);
  inst.mu << mu_xi, VectorXd::Constant(N, 10.0);
  VectorXd sigma(K);
  sigma << mu_xi / 4.0, VectorXd::Constant(N, 0.5);
  MatrixXd Gr(K, K);
  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b) Gr(a, b) = rng.normal();
  MatrixXd C = Gr * Gr.transpose();
  const VectorXd dinv = C.diagonal().cwiseSqrt().cwiseInverse();
  C = dinv.asDiagonal() * C * dinv.asDiagonal();
  inst.Sigma = sigma.asDiagonal() * C * sigma.asDiagonal() + inst.mu * inst.mu.transpose();
  inst.Sigma = 0.5 * (inst.Sigma + inst.Sigma.transpose()).eval();
  return inst;
}

DroInstance example_ball_instance(int K) {
  if (K < 1) throw std::invalid_argument("example_ball_instance: K >= 1 required");
  const double h = 1.0 / std::sqrt(static_cast<double>(K));
  DroInstance inst{1, K, K, VectorXd::Ones(1), MatrixXd::Zero(0, 1), VectorXd::Zero(0), MatrixXd::Zero(K, K),
                   VectorXd::Zero(K), {}, Polytope::box(VectorXd::Constant(K, -h), VectorXd::Constant(K, h)),
                   VectorXd::Zero(K), MatrixXd::Identity(K, K) / (3.0 * K)};
  RecourseRow r = inst.make_row();  // xi^T y <= tau
  r.W = -MatrixXd::Identity(K, K);
  r.hx(0) = -1.0;
  inst.rows.push_back(r);
  for (int k = 0; k < K; ++k) {
    RecourseRow e = inst.make_row();  // y_k = xi_k
    e.w(k) = 1.0;
    e.T0(k) = 1.0;
    e.equality = true;
    inst.rows.push_back(e);
  }
  return inst;
}

Ellipsoid example_ball_ellipsoid(int K, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("example_ball_ellipsoid: r > 0 required");
  return Ellipsoid(MatrixXd::Identity(K, K) / std::sqrt(r), VectorXd::Zero(K));
}

DroInstance example_cube_instance(int K) {
  if (K < 1) throw std::invalid_argument("example_cube_instance: K >= 1 required");
  const VectorXd half = VectorXd::Constant(K, 0.5);
  DroInstance inst{1, K, K, VectorXd::Ones(1), MatrixXd::Zero(0, 1), VectorXd::Zero(0), MatrixXd::Zero(K, K),
                   VectorXd::Zero(K), {}, Polytope::unit_box(K), half,
                   MatrixXd::Identity(K, K) / 12.0 + half * half.transpose()};
  RecourseRow lo = inst.make_row();  // 1 <= (xi + e)^T y
  lo.W = MatrixXd::Identity(K, K);
  lo.w = VectorXd::Ones(K);
  lo.h0 = 1.0;
  inst.rows.push_back(lo);
  RecourseRow up = inst.make_row();  // (xi + e)^T y <= tau
  up.W = -MatrixXd::Identity(K, K);
  up.w = -VectorXd::Ones(K);
  up.hx(0) = -1.0;
  inst.rows.push_back(up);
  return inst;
}

Ellipsoid example_cube_ellipsoid(int K, double s) {
  if (s < 0.0) throw std::invalid_argument("example_cube_ellipsoid: s >= 0 required");
  const MatrixXd A = MatrixXd::Identity(K, K) * (2.0 / std::sqrt(K * (1.0 + s)));
  return Ellipsoid(A, -A * VectorXd::Constant(K, 0.5));
}

double example_cube_bound(double s) {
  if (s <= 2.0) return 9.0 / (8.0 - s);
  if (s <= 4.0) return 1.0 + s / 4.0;
  return 2.0;
}

}  // namespace lowner
