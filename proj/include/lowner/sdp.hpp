#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace lowner {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// c0 + sum coef * x[idx]
struct AffineExpr {
  double constant = 0.0;
  std::vector<std::pair<int, double>> terms;

  AffineExpr() = default;
  explicit AffineExpr(double c) : constant(c) {}
  AffineExpr& add(int idx, double coef);
  AffineExpr& add(const AffineExpr& other, double scale = 1.0);
  double eval(const VectorXd& x) const;
};

// Symmetric n x n matrix affine in the scalar unknowns.
class AffineMatrix {
 public:
  struct Entry {
    int r, c, idx;
    double coef;
  };

  explicit AffineMatrix(int n);

  int size() const { return n_; }
  // Symmetric updates: (r, c) and (c, r) receive the same contribution.
  void add_const(int r, int c, double v);
  void add_term(int r, int c, int idx, double coef);
  void add_expr(int r, int c, const AffineExpr& e, double scale = 1.0);
  // M placed at (r0, c0); its transpose lands at (c0, r0). Diagonal placement needs symmetric M.
  void add_const_block(int r0, int c0, const MatrixXd& M);

  const MatrixXd& constant() const { return const_; }
  const std::vector<Entry>& entries() const { return entries_; }  // r <= c
  MatrixXd eval(const VectorXd& x) const;

 private:
  int n_;
  MatrixXd const_;
  std::vector<Entry> entries_;
};

enum class VarKind { symmetric, vector, scalar };

struct VarInfo {
  std::string name;
  VarKind kind;
  int dim;
  int offset;
  bool nonneg;
};

enum class SdpStatus { optimal, max_iterations, numerically_degenerate, infeasible_detected };

const char* to_string(SdpStatus s);

struct SdpSettings {
  double gap_tol = 1e-8;        // stop when m/t <= gap_tol * max(1, |objective|)
  double mu = 10.0;             // barrier schedule t <- mu t
  double t0 = 1.0;
  double newton_tol = 1e-9;     // lambda^2 / 2
  double loose_newton_tol = 1e-3;  // accepted when a stage exhausts max_stage_newton
  double loose_gap_tol = 1e-6;     // gap of the last centred point accepted when centring stalls
  int max_newton = 5000;        // total across both phases
  int max_stage_newton = 80;
  double ball_radius = 1e6;     // safeguard ||x|| < R
  double feas_tol = 1e-7;
  double cond_limit = 1e14;
  double ls_alpha = 0.01;
  double ls_beta = 0.5;
};

struct ResidualReport {
  std::vector<double> psd_min_eig;  // one per PSD block (SOC arrows included)
  double min_psd_eig = 0.0;
  double max_linear_violation = 0.0;
  double max_equality_violation = 0.0;
  double stationarity = 0.0;  // relative KKT residual, finite-difference logdet gradient
  double gap_bound = 0.0;     // m / t at the returned point
};

struct SdpSolution {
  SdpStatus status = SdpStatus::max_iterations;
  VectorXd x;
  double objective = 0.0;
  int newton_steps = 0;
  int phase1_steps = 0;
  double t_final = 0.0;
  std::vector<MatrixXd> psd_duals;  // F_k^{-1} / t
  VectorXd linear_duals;            // 1 / (t s_l)
  ResidualReport residuals;
};

class SdpProblem {
 public:
  int add_symmetric(const std::string& name, int n, bool nonneg = false);
  int add_vector(const std::string& name, int n, bool nonneg = false);
  int add_scalar(const std::string& name, bool nonneg = false);

  int idx(int var, int i = 0, int j = 0) const;
  AffineExpr ref(int var, int i = 0, int j = 0) const;  // 1 * x[idx]
  const VarInfo& var(int id) const { return vars_.at(id); }
  int num_vars() const { return static_cast<int>(vars_.size()); }
  int num_scalars() const { return n_; }

  int add_psd(AffineMatrix m, const std::string& label = "");
  // ||u|| <= w as the arrow block [[w I, u], [u^T, w]].
  int add_soc(const std::vector<AffineExpr>& u, const AffineExpr& w, const std::string& label = "");
  void add_nonneg(const AffineExpr& e);   // e >= 0
  void add_equality(const AffineExpr& e); // e == 0

  // minimize linear(x) - weight * log det(L(x)).
  void set_objective(const AffineExpr& linear, std::optional<AffineMatrix> logdet = std::nullopt,
                     double logdet_weight = 1.0);
  bool has_objective() const { return objective_set_; }

  const std::vector<VarInfo>& vars() const { return vars_; }
  const std::vector<AffineMatrix>& psd_blocks() const { return psd_; }
  const std::vector<std::string>& psd_labels() const { return psd_labels_; }
  const std::vector<AffineExpr>& inequalities() const { return ineq_; }
  const std::vector<AffineExpr>& equalities() const { return eq_; }
  const AffineExpr& linear_objective() const { return lin_obj_; }
  const std::optional<AffineMatrix>& logdet_objective() const { return logdet_; }
  double logdet_weight() const { return logdet_weight_; }

  double objective_value(const VectorXd& x) const;

  MatrixXd value_symmetric(const VectorXd& x, int var) const;
  VectorXd value_vector(const VectorXd& x, int var) const;
  double value_scalar(const VectorXd& x, int var) const;

 private:
  void check_idx(int i) const;
  std::vector<VarInfo> vars_;
  int n_ = 0;
  std::vector<AffineMatrix> psd_;
  std::vector<std::string> psd_labels_;
  std::vector<AffineExpr> ineq_;
  std::vector<AffineExpr> eq_;
  AffineExpr lin_obj_;
  std::optional<AffineMatrix> logdet_;
  double logdet_weight_ = 1.0;
  bool objective_set_ = false;
};

SdpSolution solve(const SdpProblem& p, const SdpSettings& settings = {});

// -log det X and its gradient -X^{-1}, by the Cholesky factor the barrier uses.
double neg_logdet(const MatrixXd& X);
MatrixXd neg_logdet_gradient(const MatrixXd& X);

// Smallest uniform shift s >= -1 making every block and row strictly feasible
// (equalities kept exact). s < 0 means a strictly feasible point exists.
struct FeasibilityResult {
  double shift = 0.0;
  VectorXd x;
  SdpStatus status = SdpStatus::max_iterations;
};
FeasibilityResult find_feasible_shift(const SdpProblem& p, const SdpSettings& settings = {}, bool stop_early = false);

ResidualReport residuals(const SdpProblem& p, const SdpSolution& s);

}  // namespace lowner
