#include <gtest/gtest.h>

#include <cmath>

#include "lowner/rng.hpp"
#include "lowner/sdp.hpp"

using namespace lowner;

namespace {

// max log det X s.t. X <= C, as min -log det X with C - X >= 0.
double logdet_under(const MatrixXd& C, SdpSolution* out = nullptr) {
  const int n = static_cast<int>(C.rows());
  SdpProblem p;
  const int X = p.add_symmetric("X", n);
  AffineMatrix L(n), U(n);
  for (int r = 0; r < n; ++r)
    for (int c = r; c < n; ++c) {
      L.add_term(r, c, p.idx(X, r, c), 1.0);
      U.add_term(r, c, p.idx(X, r, c), -1.0);
      if (C(r, c) != 0.0) U.add_const(r, c, C(r, c));
    }
  p.add_psd(std::move(U), "upper");
  p.set_objective(AffineExpr(), L);
  const SdpSolution s = solve(p);
  if (out) *out = s;
  EXPECT_EQ(s.status, SdpStatus::optimal);
  return s.objective;
}

}  // namespace

TEST(Sdp, LogdetUnderIdentity) {
  SdpSolution s;
  EXPECT_NEAR(logdet_under(MatrixXd::Identity(3, 3), &s), 0.0, 1e-6);
  EXPECT_LE(s.residuals.gap_bound, 1e-6);
  EXPECT_GE(s.residuals.min_psd_eig, -1e-9);
}

TEST(Sdp, LogdetUnderDiagonal) {
  MatrixXd C = MatrixXd::Zero(2, 2);
  C.diagonal() << 4, 9;
  EXPECT_NEAR(logdet_under(C), -std::log(36.0), 1e-6);
}

TEST(Sdp, LinearProgramWithEquality) {
  // min x + 2y s.t. x + y = 1, x, y >= 0 -> 1
  SdpProblem p;
  const int v = p.add_vector("v", 2, true);
  AffineExpr eq(-1.0);
  eq.add(p.idx(v, 0), 1.0).add(p.idx(v, 1), 1.0);
  p.add_equality(eq);
  AffineExpr obj;
  obj.add(p.idx(v, 0), 1.0).add(p.idx(v, 1), 2.0);
  p.set_objective(obj);
  const SdpSolution s = solve(p);
  ASSERT_EQ(s.status, SdpStatus::optimal);
  EXPECT_NEAR(s.objective, 1.0, 1e-6);
  EXPECT_LE(s.residuals.max_equality_violation, 1e-9);
}

TEST(Sdp, SecondOrderCone) {
  // min w s.t. ||(1 - x, 2 - x)|| <= w -> 1/sqrt(2)
  SdpProblem p;
  const int x = p.add_scalar("x");
  const int w = p.add_scalar("w");
  AffineExpr a(1.0), b(2.0);
  a.add(p.idx(x), -1.0);
  b.add(p.idx(x), -1.0);
  p.add_soc({a, b}, p.ref(w));
  p.set_objective(p.ref(w));
  const SdpSolution s = solve(p);
  ASSERT_EQ(s.status, SdpStatus::optimal);
  EXPECT_NEAR(s.objective, 1.0 / std::sqrt(2.0), 1e-6);
}

TEST(Sdp, DetectsInfeasibility) {
  SdpProblem p;
  const int x = p.add_scalar("x");
  AffineExpr lo(-1.0), hi(0.0);
  lo.add(p.idx(x), 1.0);   // x >= 1
  hi.add(p.idx(x), -1.0);  // x <= 0
  p.add_nonneg(lo);
  p.add_nonneg(hi);
  p.set_objective(p.ref(x));
  EXPECT_EQ(solve(p).status, SdpStatus::infeasible_detected);
  EXPECT_GT(find_feasible_shift(p).shift, 0.0);
}

TEST(Sdp, FeasibleShiftIsNegativeForInteriorSets) {
  SdpProblem p;
  const int x = p.add_scalar("x");
  AffineExpr lo(0.0), hi(1.0);
  lo.add(p.idx(x), 1.0);
  hi.add(p.idx(x), -1.0);
  p.add_nonneg(lo);
  p.add_nonneg(hi);
  EXPECT_LT(find_feasible_shift(p, {}, true).shift, 0.0);
}

TEST(Sdp, ObjectiveRequired) {
  SdpProblem p;
  p.add_scalar("x");
  EXPECT_THROW(solve(p), std::invalid_argument);
}

TEST(Sdp, NegLogdetGradientMatchesFiniteDifferences) {
  Rng rng(3);
  for (int n = 2; n <= 5; ++n) {
    MatrixXd G(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) G(a, b) = rng.normal();
    const MatrixXd X = G * G.transpose() + MatrixXd::Identity(n, n);
    const MatrixXd g = neg_logdet_gradient(X);
    const double h = 1e-5;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        MatrixXd E = MatrixXd::Zero(n, n);
        E(a, b) = h;
        E(b, a) = h;
        const double fd = (neg_logdet(X + E) - neg_logdet(X - E)) / (2.0 * h);
        const double expect = (a == b ? 1.0 : 2.0) * g(a, b);
        EXPECT_NEAR(fd, expect, 1e-6 * std::max(1.0, std::abs(expect)));
      }
  }
  EXPECT_THROW(neg_logdet(-MatrixXd::Identity(2, 2)), std::invalid_argument);
}
