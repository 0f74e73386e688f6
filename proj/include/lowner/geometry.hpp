#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace lowner {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using PointList = std::vector<VectorXd>;

// {x : ||A x + b||^2 <= 1}, volume convention 1/det(A).
class Ellipsoid {
 public:
  Ellipsoid(MatrixXd A, VectorXd b);

  static Ellipsoid ball(const VectorXd& center, double radius);

  int dim() const { return static_cast<int>(b_.size()); }
  const MatrixXd& A() const { return A_; }
  const VectorXd& b() const { return b_; }

  double volume() const;
  double log_volume() const;  // -log det A
  double radius() const;      // volume^(1/K)
  VectorXd center() const;    // -A^{-1} b
  double level(const VectorXd& x) const;  // ||A x + b||^2
  bool contains(const VectorXd& x, double tol = 1e-9) const;

  // Same center, every semi-axis multiplied by factor.
  Ellipsoid scaled(double factor) const;

 private:
  MatrixXd A_;
  VectorXd b_;
};

double ellipsoid_volume(const Ellipsoid& E);
bool ellipsoid_contains(const Ellipsoid& E, const VectorXd& x, double tol);

// {x : S x <= t}; vertices are enumerated on first request and cached.
class Polytope {
 public:
  Polytope(MatrixXd S, VectorXd t);
  Polytope(MatrixXd S, VectorXd t, PointList vertices);

  int dim() const { return static_cast<int>(S_.cols()); }
  int rows() const { return static_cast<int>(S_.rows()); }
  const MatrixXd& S() const { return S_; }
  const VectorXd& t() const { return t_; }

  const PointList& vertices() const;  // throws on unbounded / degenerate / empty
  VectorXd interior_point() const;    // vertex mean
  bool contains(const VectorXd& x, double tol = 1e-9) const;

  static Polytope box(const VectorXd& lo, const VectorXd& hi);
  static Polytope unit_box(int K);
  static Polytope standard_simplex(int K);

 private:
  struct Cache {
    std::once_flag once;
    PointList vertices;
  };
  MatrixXd S_;
  VectorXd t_;
  std::shared_ptr<Cache> cache_;
};

struct QuadRow {
  MatrixXd Q;  // r x K
  VectorXd q;  // r
};

// Polytope rows together with ellipsoidal rows ||Q_i x + q_i||^2 <= 1.
class QuadSet {
 public:
  QuadSet(Polytope base, std::vector<QuadRow> quads, std::optional<VectorXd> witness = std::nullopt);

  int dim() const { return base_.dim(); }
  const Polytope& base() const { return base_; }
  const std::vector<QuadRow>& quads() const { return quads_; }
  const std::optional<VectorXd>& witness() const { return witness_; }
  bool contains(const VectorXd& x, double tol = 1e-9) const;

 private:
  Polytope base_;
  std::vector<QuadRow> quads_;
  std::optional<VectorXd> witness_;
};

struct PartitionFamily {
  Polytope parent;
  PointList seeds;
  std::vector<Polytope> cells;
};

// Brute force over all K-row subsets; feasibility slack 1e-9, dedup 1e-8 (inf-norm).
PointList enumerate_vertices(const MatrixXd& S, const VectorXd& t);
PointList enumerate_vertices(const Polytope& P);

// True when {d : S d <= 0} contains a nonzero direction.
bool is_unbounded(const MatrixXd& S);

int affine_rank(const PointList& pts, double tol = 1e-9);

PartitionFamily voronoi_partition(const Polytope& P, const PointList& seeds);

bool membership(const Polytope& P, const VectorXd& x, double tol = 1e-9);
bool membership(const QuadSet& Q, const VectorXd& x, double tol = 1e-9);

// Uniform draw from the bounding box of the vertices, rejected until inside P.
class Rng;
VectorXd sample_polytope(const Polytope& P, Rng& rng);

// Quadratic-form level of a symmetric matrix square root.
MatrixXd sym_sqrt(const MatrixXd& M);

}  // namespace lowner
