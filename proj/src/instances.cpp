#include "lowner/instances.hpp"

#include <cmath>
#include <stdexcept>

#include "lowner/rng.hpp"

namespace lowner {

namespace {
constexpr std::uint64_t kPolytopeStream = 0x706f6c79;
constexpr std::uint64_t kSimplexStream = 0x73696d70;
}  // namespace

Polytope random_polytope(int K, int M, std::uint64_t seed) {
  if (K < 1 || M < 0) throw std::invalid_argument("random_polytope: need K >= 1, M >= 0");
  Rng rng(seed, kPolytopeStream + static_cast<std::uint64_t>(K) * 1000 + static_cast<std::uint64_t>(M));
  const VectorXd c = VectorXd::Constant(K, 0.5);
  MatrixXd S(2 * K + M, K);
  VectorXd t(2 * K + M);
  S.topRows(K).setIdentity();
  S.middleRows(K, K) = -MatrixXd::Identity(K, K);
  t.head(K).setOnes();
  t.segment(K, K).setZero();
  for (int j = 0; j < M; ++j) {
    const VectorXd s = rng.unit_sphere(K);
    const double half = 0.5 * s.lpNorm<1>();
    const double r = rng.uniform(-half, half);
    if (r > 0.0) {
      S.row(2 * K + j) = s.transpose();
      t(2 * K + j) = r + s.dot(c);
    } else {
      S.row(2 * K + j) = -s.transpose();
      t(2 * K + j) = -r - s.dot(c);
    }
  }
  return Polytope(S, t);
}

Polytope random_simplex(int K, std::uint64_t seed) {
  if (K < 1) throw std::invalid_argument("random_simplex: need K >= 1");
  Rng rng(seed, kSimplexStream + static_cast<std::uint64_t>(K));
  for (;;) {
    PointList pts;
    for (int i = 0; i <= K; ++i) pts.push_back(rng.normal_vector(K));
    MatrixXd E(K, K);
    for (int i = 0; i < K; ++i) E.col(i) = pts[i + 1] - pts[0];
    if (std::abs(E.determinant()) < 1e-3) continue;
    MatrixXd S(K + 1, K);
    VectorXd t(K + 1);
    for (int omit = 0; omit <= K; ++omit) {
      MatrixXd Hm(K, K + 1);
      int r = 0;
      for (int i = 0; i <= K; ++i)
        if (i != omit) Hm.row(r++) << pts[i].transpose(), 1.0;
      Eigen::FullPivLU<MatrixXd> lu(Hm);
      VectorXd nv = lu.kernel().col(0);
      VectorXd a = nv.head(K);
      double off = -nv(K);  // a^T x = off on the facet
      if (a.dot(pts[omit]) > off) {
        a = -a;
        off = -off;
      }
      const double nrm = a.norm();
      S.row(omit) = a.transpose() / nrm;
      t(omit) = off / nrm;
    }
    return Polytope(S, t);
  }
}

Polytope chipped_hypercube(int K) {
  if (K < 2) throw std::invalid_argument("chipped_hypercube: need K >= 2");
  MatrixXd S(2 * K + 1, K);
  VectorXd t(2 * K + 1);
  S.topRows(K).setIdentity();
  S.middleRows(K, K) = -MatrixXd::Identity(K, K);
  S.row(2 * K).setOnes();
  t.head(K).setOnes();
  t.segment(K, K).setZero();
  t(2 * K) = std::sqrt(static_cast<double>(K));
  return Polytope(S, t);
}

ChippedPrimal chipped_closed_form_certificate(int K) {
  const double k = K;
  const double sk = std::sqrt(k);
  const double k1 = std::sqrt((k * k - 1.0) / ((sk - 1.0) * k * k));
  const double k2 = (1.0 + 1.0 / k - k1) / k;
  const double k3 = -1.0 / sk;
  const double k4 = 0.5 * k1 * k1;
  const double k5 = k2 * (k1 + 0.5 * k * k2);
  const MatrixXd I = MatrixXd::Identity(K, K);
  const MatrixXd ee = MatrixXd::Ones(K, K);
  const MatrixXd A = k1 * I + k2 * ee;
  const VectorXd b = VectorXd::Constant(K, k3);
  MatrixXd N = MatrixXd::Zero(2 * K + 1, 2 * K + 1);
  N.block(0, K, K, K) = k4 * I;
  N.block(K, 0, K, K) = k4 * I;
  N.block(K, 2 * K, K, 1).setConstant(k5);
  N.block(2 * K, K, 1, K).setConstant(k5);
  Certificate C;
  C.N = N;
  C.F = A * A;
  C.g = A * b;
  C.h = b.squaredNorm();
  C.lambda = VectorXd(0);
  return {Ellipsoid(A, b), C};
}

ChippedDual chipped_closed_form_dual(int K) {
  const double k = K;
  const double sk = std::sqrt(k);
  const double sk1 = std::sqrt(k + 1.0);
  const double m1 = k / sk1;
  const double m2 = 1.0 / (k + 1.0) - 1.0 / sk1;
  const double m3 = sk / (k + 1.0);
  const double m4 = sk1 / k;
  const double m5 = (1.0 - sk1) / (k * k);
  const double m6 = -1.0 / k;
  const MatrixXd I = MatrixXd::Identity(K, K);
  const MatrixXd ee = MatrixXd::Ones(K, K);
  VectorXd rho = VectorXd::Zero(2 * K + 1);
  rho.segment(K, K).setConstant(1.0 / sk);
  rho(2 * K) = 1.0 / sk;
  MatrixXd L = MatrixXd::Zero(2 * K + 1, K);
  L.middleRows(K, K) = m4 * I + m5 * ee;
  L.row(2 * K).setConstant(m6);
  return {{L, rho}, {(m1 * I + m2 * ee) / k, VectorXd::Constant(K, m3)}};
}

double chipped_mvie_det(int K) {
  const double k = K;
  return std::pow(k, k) / std::pow(k + 1.0, 0.5 * (k + 1.0));
}

double chipped_smvie_radius(int K) {
  // Outer shape K B has determinant K^K / (K+1)^((K+1)/2)
  return std::pow(chipped_mvie_det(K), 1.0 / K);
}

}  // namespace lowner
