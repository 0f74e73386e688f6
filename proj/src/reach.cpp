#include "lowner/reach.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lowner/rng.hpp"
#include "lowner/sdp.hpp"

namespace lowner {

namespace {
constexpr std::uint64_t kReachStream = 0x72656163;

// Basic feasible points of {S u <= t} without the full-dimensionality check.
void basic_points(const MatrixXd& S, const VectorXd& t, std::vector<int>& idx, int from, PointList& out) {
  const int K = static_cast<int>(S.cols());
  if (static_cast<int>(idx.size()) == K) {
    MatrixXd sub(K, K);
    VectorXd rhs(K);
    for (int i = 0; i < K; ++i) {
      sub.row(i) = S.row(idx[i]);
      rhs(i) = t(idx[i]);
    }
    Eigen::FullPivLU<MatrixXd> lu(sub);
    if (!lu.isInvertible()) return;
    const VectorXd v = lu.solve(rhs);
    if (((S * v - t).array() <= 1e-9 * std::max(1.0, t.cwiseAbs().maxCoeff())).all()) out.push_back(v);
    return;
  }
  for (int r = from; r < S.rows(); ++r) {
    idx.push_back(r);
    basic_points(S, t, idx, r + 1, out);
    idx.pop_back();
  }
}

// Control sets of zero width, such as U = {u0}; returns u0.
std::optional<VectorXd> point_set(const Polytope& U) {
  PointList V;
  std::vector<int> idx;
  basic_points(U.S(), U.t(), idx, 0, V);
  if (V.empty()) throw std::invalid_argument("LinearSystem: empty control set");
  for (const auto& v : V)
    if ((v - V.front()).cwiseAbs().maxCoeff() > 1e-12) return std::nullopt;
  return V.front();
}

// Unit vectors: equally spaced angles for K = 2, seeded directions otherwise.
PointList unit_directions(int K, int count) {
  PointList dirs;
  if (K == 1) return {VectorXd::Constant(1, 1.0), VectorXd::Constant(1, -1.0)};
  if (K == 2) {
    for (int i = 0; i < count; ++i) {
      const double a = 2.0 * std::numbers::pi * i / count;
      dirs.push_back((VectorXd(2) << std::cos(a), std::sin(a)).finished());
    }
    return dirs;
  }
  Rng rng(1, kReachStream);
  for (int i = 0; i < count; ++i) dirs.push_back(rng.unit_sphere(K));
  return dirs;
}

}  // namespace

void LinearSystem::validate() const {
  const int K = state_dim();
  if (K < 1 || W1.cols() != K) throw std::invalid_argument("LinearSystem: W1 must be square");
  if (W2.rows() != K || W2.cols() != U.dim()) throw std::invalid_argument("LinearSystem: W2 dimension mismatch");
  if (is_unbounded(U.S())) throw std::invalid_argument("LinearSystem: control set unbounded");
}

ReachStep propagate(const LinearSystem& sys, const std::optional<Ellipsoid>& prev, const CopOptions& opts) {
  sys.validate();
  const int K = sys.state_dim(), J = sys.input_dim();
  if (prev && prev->dim() != K) throw std::invalid_argument("propagate: ellipsoid dimension mismatch");
  if (const auto u0 = point_set(sys.U)) {
    if (!prev) throw std::invalid_argument("propagate: reachable set is a single point");
    Eigen::FullPivLU<MatrixXd> lu(sys.W1);
    if (!lu.isInvertible()) throw std::invalid_argument("propagate: point control set needs invertible W1");
    const MatrixXd Winv = lu.inverse();
    const MatrixXd A = sym_sqrt(Winv.transpose() * prev->A() * prev->A() * Winv);
    const VectorXd c = sys.W1 * prev->center() + sys.W2 * *u0;
    LiftedSet X{MatrixXd::Zero(0, K), VectorXd::Zero(0), {{prev->A(), prev->b()}}, sys.W1};
    return {Ellipsoid(A, -A * c), Certificate{}, std::move(X), 0, true};
  }
  LiftedSet X;
  if (!prev) {
    X = LiftedSet::minkowski({sys.U}, {sys.W2});
  } else {
    X.S = MatrixXd::Zero(sys.U.rows(), K + J);
    X.S.rightCols(J) = sys.U.S();
    X.t = sys.U.t();
    MatrixXd Q = MatrixXd::Zero(K, K + J);
    Q.leftCols(K) = prev->A();
    X.quads.push_back({Q, prev->b()});
    X.W.resize(K, K + J);
    X.W << sys.W1, sys.W2;
  }
  CopResult r = solve_lifted_mve({X}, opts);
  return {r.ellipsoid, r.certificates.front(), std::move(X), r.newton_steps, false};
}

std::vector<ReachStep> propagate_horizon(const LinearSystem& sys, int T, const CopOptions& opts) {
  if (T < 1) throw std::invalid_argument("propagate_horizon: T >= 1 required");
  std::vector<ReachStep> out;
  std::optional<Ellipsoid> prev;
  for (int t = 1; t <= T; ++t) {
    out.push_back(propagate(sys, prev, opts));
    prev = out.back().ellipsoid;
  }
  return out;
}

LinearSystem example_reach_system() {
  MatrixXd W1(2, 2);
  W1 << 0.9202, -0.0396, 0.0777, 0.9800;
  MatrixXd S(8, 2);
  S << 1, 0, -1, 0, 0, 1, 0, -1, 1, 1, 1, -1, -1, 1, -1, -1;
  VectorXd t(8);
  t << 1, 1, 1, 1, 1.4, 1.4, 1.4, 1.4;
  return {W1, MatrixXd::Identity(2, 2), Polytope(S, t)};
}

std::vector<Ellipsoid> run_paper_example(int T, const CopOptions& opts) {
  std::vector<Ellipsoid> out;
  for (const auto& s : propagate_horizon(example_reach_system(), T, opts)) out.push_back(s.ellipsoid);
  return out;
}

PointList reach_generators(const LinearSystem& sys, const std::optional<Ellipsoid>& prev, int boundary_samples) {
  const PointList& V = sys.U.vertices();
  if (!prev) return V;
  const int K = sys.state_dim(), J = sys.input_dim();
  const MatrixXd Ainv = prev->A().inverse();
  PointList gens;
  for (const auto& d : unit_directions(K, boundary_samples)) {
    const VectorXd z = Ainv * (d - prev->b());
    for (const auto& v : V) {
      VectorXd g(K + J);
      g << z, v;
      gens.push_back(g);
    }
  }
  return gens;
}

PointList sample_reachable(const LinearSystem& sys, int T, int count, std::uint64_t seed) {
  if (T < 1 || count < 0) throw std::invalid_argument("sample_reachable: T >= 1 and count >= 0 required");
  const PointList& V = sys.U.vertices();
  Rng rng(seed, kReachStream + 1);
  PointList out;
  for (int i = 0; i < count; ++i) {
    VectorXd x = VectorXd::Zero(sys.state_dim());
    for (int t = 0; t < T; ++t) x = sys.W1 * x + sys.W2 * V[rng.uniform_int(static_cast<int>(V.size()))];
    out.push_back(x);
  }
  return out;
}

bool reach_membership_exact(const LinearSystem& sys, const VectorXd& x, int T, double tol) {
  sys.validate();
  const int K = sys.state_dim(), J = sys.input_dim();
  if (T < 1) throw std::invalid_argument("reach_membership_exact: T >= 1 required");
  if (x.size() != K) throw std::invalid_argument("reach_membership_exact: state dimension mismatch");
  if (T * J > 60) throw std::invalid_argument("reach_membership_exact: horizon exceeds the desk-scale cap");
  // x = sum_t W1^{T-1-t} W2 u(t)
  std::vector<MatrixXd> maps(T);
  MatrixXd P = MatrixXd::Identity(K, K);
  for (int t = T - 1; t >= 0; --t) {
    maps[t] = P * sys.W2;
    P = sys.W1 * P;
  }
  MatrixXd Big(K, T * J);
  for (int t = 0; t < T; ++t) Big.middleCols(t * J, J) = maps[t];
  const VectorXd ls = Big.completeOrthogonalDecomposition().solve(x);
  if ((Big * ls - x).norm() > 1e-9 * std::max(1.0, x.norm())) return false;

  SdpProblem p;
  const int u = p.add_vector("u", T * J);
  const MatrixXd& S = sys.U.S();
  const VectorXd& tu = sys.U.t();
  for (int t = 0; t < T; ++t)
    for (int r = 0; r < S.rows(); ++r) {
      const double n = S.row(r).norm();
      AffineExpr e(tu(r) / n);
      for (int j = 0; j < J; ++j)
        if (S(r, j) != 0.0) e.add(p.idx(u, t * J + j), -S(r, j) / n);
      p.add_nonneg(e);
    }
  for (int k = 0; k < K; ++k) {
    AffineExpr e(-x(k));
    for (int c = 0; c < T * J; ++c)
      if (Big(k, c) != 0.0) e.add(p.idx(u, c), Big(k, c));
    p.add_equality(e);
  }
  const FeasibilityResult f = find_feasible_shift(p, {}, true);
  return f.shift <= tol;
}

PointList reachable_boundary(const LinearSystem& sys, int T, int directions) {
  sys.validate();
  if (sys.state_dim() != 2) throw std::invalid_argument("reachable_boundary: planar systems only");
  if (T < 1) throw std::invalid_argument("reachable_boundary: T >= 1 required");
  const PointList& V = sys.U.vertices();
  PointList out;
  for (const auto& d : unit_directions(2, directions)) {
    // The support point of a Minkowski sum is the sum of the summands' support points.
    VectorXd x = VectorXd::Zero(2);
    MatrixXd P = MatrixXd::Identity(2, 2);
    for (int t = T - 1; t >= 0; --t) {
      const VectorXd w = (P * sys.W2).transpose() * d;
      const VectorXd* best = &V.front();
      for (const auto& v : V)
        if (w.dot(v) > w.dot(*best)) best = &v;
      x += P * sys.W2 * *best;
      P = sys.W1 * P;
    }
    out.push_back(x);
  }
  return out;
}

PointList ellipsoid_boundary(const Ellipsoid& E, int samples) {
  if (E.dim() != 2) throw std::invalid_argument("ellipsoid_boundary: planar ellipsoids only");
  const MatrixXd Ainv = E.A().inverse();
  PointList out;
  for (const auto& d : unit_directions(2, samples)) out.push_back(Ainv * (d - E.b()));
  return out;
}

}  // namespace lowner
