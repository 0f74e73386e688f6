#include "lowner/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lowner/rng.hpp"

namespace lowner {

namespace {

constexpr double kFeasSlack = 1e-9;
constexpr double kDedupTol = 1e-8;

// Visits every k-subset of {0..n-1} in lexicographic order.
template <class F>
void for_each_subset(int n, int k, F&& f) {
  if (k > n || k <= 0) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  for (;;) {
    f(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

double scale_of(const VectorXd& t) { return std::max(1.0, t.cwiseAbs().maxCoeff()); }

}  // namespace

Ellipsoid::Ellipsoid(MatrixXd A, VectorXd b) : A_(std::move(A)), b_(std::move(b)) {
  if (A_.rows() != A_.cols() || A_.rows() != b_.size() || b_.size() == 0)
    throw std::invalid_argument("Ellipsoid: A must be K x K and b of length K");
  const double asym = (A_ - A_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, A_.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("Ellipsoid: A is not symmetric");
  A_ = 0.5 * (A_ + A_.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(A_, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues().minCoeff() > 0.0))
    throw std::invalid_argument("Ellipsoid: A is not positive definite");
}

Ellipsoid Ellipsoid::ball(const VectorXd& center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("Ellipsoid::ball: radius must be positive");
  const int K = static_cast<int>(center.size());
  MatrixXd A = MatrixXd::Identity(K, K) / radius;
  return Ellipsoid(A, -A * center);
}

double Ellipsoid::log_volume() const {
  Eigen::LLT<MatrixXd> llt(A_);
  return -2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

double Ellipsoid::volume() const { return std::exp(log_volume()); }

double Ellipsoid::radius() const { return std::exp(log_volume() / dim()); }

VectorXd Ellipsoid::center() const { return -A_.llt().solve(b_); }

double Ellipsoid::level(const VectorXd& x) const {
  if (x.size() != b_.size()) throw std::invalid_argument("Ellipsoid: dimension mismatch");
  return (A_ * x + b_).squaredNorm();
}

bool Ellipsoid::contains(const VectorXd& x, double tol) const { return level(x) <= 1.0 + tol; }

Ellipsoid Ellipsoid::scaled(double factor) const {
  if (!(factor > 0.0)) throw std::invalid_argument("Ellipsoid::scaled: factor must be positive");
  // A' = A / f, center unchanged: b' = -A' c = b / f.
  return Ellipsoid(A_ / factor, b_ / factor);
}

double ellipsoid_volume(const Ellipsoid& E) { return E.volume(); }

bool ellipsoid_contains(const Ellipsoid& E, const VectorXd& x, double tol) { return E.contains(x, tol); }

Polytope::Polytope(MatrixXd S, VectorXd t)
    : S_(std::move(S)), t_(std::move(t)), cache_(std::make_shared<Cache>()) {
  if (S_.rows() != t_.size()) throw std::invalid_argument("Polytope: S and t row counts differ");
  if (S_.cols() == 0) throw std::invalid_argument("Polytope: zero dimension");
}

Polytope::Polytope(MatrixXd S, VectorXd t, PointList vertices) : Polytope(std::move(S), std::move(t)) {
  for (const auto& v : vertices) {
    if (v.size() != S_.cols()) throw std::invalid_argument("Polytope: vertex dimension mismatch");
    if (((S_ * v - t_).array() > kFeasSlack * scale_of(t_)).any())
      throw std::invalid_argument("Polytope: cached vertex violates the inequalities");
  }
  std::call_once(cache_->once, [&] { cache_->vertices = std::move(vertices); });
}

const PointList& Polytope::vertices() const {
  std::call_once(cache_->once, [&] { cache_->vertices = enumerate_vertices(S_, t_); });
  return cache_->vertices;
}

VectorXd Polytope::interior_point() const {
  const auto& V = vertices();
  VectorXd c = VectorXd::Zero(dim());
  for (const auto& v : V) c += v;
  return c / static_cast<double>(V.size());
}

bool Polytope::contains(const VectorXd& x, double tol) const {
  if (x.size() != dim()) throw std::invalid_argument("Polytope: dimension mismatch");
  if (rows() == 0) return true;
  return ((S_ * x - t_).array() <= tol).all();
}

Polytope Polytope::box(const VectorXd& lo, const VectorXd& hi) {
  const int K = static_cast<int>(lo.size());
  if (hi.size() != K) throw std::invalid_argument("Polytope::box: bound sizes differ");
  if (((hi - lo).array() <= 0.0).any()) throw std::invalid_argument("Polytope::box: empty box");
  MatrixXd S(2 * K, K);
  S << MatrixXd::Identity(K, K), -MatrixXd::Identity(K, K);
  VectorXd t(2 * K);
  t << hi, -lo;
  return Polytope(S, t);
}

Polytope Polytope::unit_box(int K) { return box(VectorXd::Zero(K), VectorXd::Ones(K)); }

Polytope Polytope::standard_simplex(int K) {
  MatrixXd S(K + 1, K);
  S << -MatrixXd::Identity(K, K), MatrixXd::Ones(1, K);
  VectorXd t = VectorXd::Zero(K + 1);
  t(K) = 1.0;
  return Polytope(S, t);
}

QuadSet::QuadSet(Polytope base, std::vector<QuadRow> quads, std::optional<VectorXd> witness)
    : base_(std::move(base)), quads_(std::move(quads)), witness_(std::move(witness)) {
  for (const auto& qr : quads_) {
    if (qr.Q.cols() != base_.dim() || qr.Q.rows() != qr.q.size())
      throw std::invalid_argument("QuadSet: quadratic row dimension mismatch");
  }
  if (witness_ && !contains(*witness_, 1e-9)) throw std::invalid_argument("QuadSet: witness is not a member");
}

bool QuadSet::contains(const VectorXd& x, double tol) const {
  if (!base_.contains(x, tol)) return false;
  for (const auto& qr : quads_)
    if ((qr.Q * x + qr.q).squaredNorm() > 1.0 + tol) return false;
  return true;
}

bool is_unbounded(const MatrixXd& S) {
  const int K = static_cast<int>(S.cols());
  const int J = static_cast<int>(S.rows());
  if (J == 0) return true;
  Eigen::FullPivLU<MatrixXd> lu(S);
  lu.setThreshold(1e-10);
  if (lu.rank() < K) return true;
  if (K == 1) return !((S.array() > 0).any() && (S.array() < 0).any());
  // An extreme ray of the pointed recession cone has K-1 independent active rows.
  const double tol = 1e-10 * std::max(1.0, S.cwiseAbs().maxCoeff());
  bool found = false;
  for_each_subset(J, K - 1, [&](const std::vector<int>& idx) {
    if (found) return;
    MatrixXd sub(K - 1, K);
    for (int i = 0; i < K - 1; ++i) sub.row(i) = S.row(idx[i]);
    Eigen::FullPivLU<MatrixXd> slu(sub);
    slu.setThreshold(1e-10);
    if (slu.rank() != K - 1) return;
    VectorXd d = slu.kernel().col(0);
    d.normalize();
    const VectorXd sd = S * d;
    if ((sd.array() <= tol).all() || (sd.array() >= -tol).all()) found = true;
  });
  return found;
}

PointList enumerate_vertices(const MatrixXd& S, const VectorXd& t) {
  const int K = static_cast<int>(S.cols());
  const int J = static_cast<int>(S.rows());
  if (S.rows() != t.size()) throw std::invalid_argument("enumerate_vertices: S and t row counts differ");
  if (is_unbounded(S)) throw std::invalid_argument("enumerate_vertices: unbounded polytope");
  const double slack = kFeasSlack * scale_of(t);
  PointList out;
  MatrixXd sub(K, K);
  VectorXd rhs(K);
  for_each_subset(J, K, [&](const std::vector<int>& idx) {
    for (int i = 0; i < K; ++i) {
      sub.row(i) = S.row(idx[i]);
      rhs(i) = t(idx[i]);
    }
    Eigen::PartialPivLU<MatrixXd> lu(sub);
    const double det = lu.determinant();
    if (std::abs(det) < 1e-12 * std::max(1.0, sub.rowwise().norm().prod())) return;
    VectorXd v = lu.solve(rhs);
    if (!v.allFinite()) return;
    if (((S * v - t).array() > slack).any()) return;
    for (const auto& w : out)
      if ((w - v).cwiseAbs().maxCoeff() <= kDedupTol) return;
    out.push_back(std::move(v));
  });
  if (out.empty()) throw std::invalid_argument("enumerate_vertices: empty polytope");
  if (affine_rank(out) < K) throw std::invalid_argument("enumerate_vertices: degenerate polytope (empty interior)");
  return out;
}

PointList enumerate_vertices(const Polytope& P) { return P.vertices(); }

int affine_rank(const PointList& pts, double tol) {
  if (pts.empty()) return -1;
  const int K = static_cast<int>(pts[0].size());
  MatrixXd D(K, static_cast<int>(pts.size()) - 1);
  for (std::size_t i = 1; i < pts.size(); ++i) D.col(static_cast<int>(i) - 1) = pts[i] - pts[0];
  if (D.cols() == 0) return 0;
  Eigen::JacobiSVD<MatrixXd> svd(D);
  const auto& sv = svd.singularValues();
  const double ref = std::max(1.0, sv.size() ? sv(0) : 0.0);
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * ref) ++r;
  return r;
}

PartitionFamily voronoi_partition(const Polytope& P, const PointList& seeds) {
  const int K = P.dim();
  const int J = static_cast<int>(seeds.size());
  if (J == 0) throw std::invalid_argument("voronoi_partition: no seeds");
  for (const auto& s : seeds) {
    if (s.size() != K) throw std::invalid_argument("voronoi_partition: seed dimension mismatch");
    if (!P.contains(s, 1e-9)) throw std::invalid_argument("voronoi_partition: seed outside the polytope");
  }
  for (int i = 0; i < J; ++i)
    for (int j = i + 1; j < J; ++j)
      if ((seeds[i] - seeds[j]).norm() <= 1e-8) throw std::invalid_argument("voronoi_partition: duplicate seeds");

  PartitionFamily fam{P, seeds, {}};
  for (int j = 0; j < J; ++j) {
    MatrixXd S(P.rows() + J - 1, K);
    VectorXd t(P.rows() + J - 1);
    S.topRows(P.rows()) = P.S();
    t.head(P.rows()) = P.t();
    int r = P.rows();
    for (int i = 0; i < J; ++i) {
      if (i == j) continue;
      S.row(r) = 2.0 * (seeds[i] - seeds[j]).transpose();
      t(r) = seeds[i].squaredNorm() - seeds[j].squaredNorm();
      ++r;
    }
    Polytope cell(S, t);
    try {
      (void)cell.vertices();
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("voronoi_partition: cell " + std::to_string(j) + " rejected: " + e.what());
    }
    fam.cells.push_back(std::move(cell));
  }
  return fam;
}

bool membership(const Polytope& P, const VectorXd& x, double tol) { return P.contains(x, tol); }

bool membership(const QuadSet& Q, const VectorXd& x, double tol) { return Q.contains(x, tol); }

VectorXd sample_polytope(const Polytope& P, Rng& rng) {
  const auto& V = P.vertices();
  const int K = P.dim();
  VectorXd lo = V[0], hi = V[0];
  for (const auto& v : V) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  for (int attempt = 0; attempt < 1000000; ++attempt) {
    VectorXd x(K);
    for (int k = 0; k < K; ++k) x(k) = rng.uniform(lo(k), hi(k));
    if (P.contains(x, 0.0)) return x;
  }
  throw std::runtime_error("sample_polytope: rejection sampling did not terminate");
}

MatrixXd sym_sqrt(const MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (M + M.transpose()));
  VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace lowner
