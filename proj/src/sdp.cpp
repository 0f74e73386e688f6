#include "lowner/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace lowner {

AffineExpr& AffineExpr::add(int idx, double coef) {
  if (coef != 0.0) terms.emplace_back(idx, coef);
  return *this;
}

AffineExpr& AffineExpr::add(const AffineExpr& other, double scale) {
  constant += scale * other.constant;
  for (const auto& [i, c] : other.terms) add(i, scale * c);
  return *this;
}

double AffineExpr::eval(const VectorXd& x) const {
  double v = constant;
  for (const auto& [i, c] : terms) v += c * x(i);
  return v;
}

AffineMatrix::AffineMatrix(int n) : n_(n), const_(MatrixXd::Zero(n, n)) {
  if (n <= 0) throw std::invalid_argument("AffineMatrix: size must be positive");
}

void AffineMatrix::add_const(int r, int c, double v) {
  if (r < 0 || c < 0 || r >= n_ || c >= n_) throw std::invalid_argument("AffineMatrix: index out of range");
  const_(r, c) += v;
  if (r != c) const_(c, r) += v;
}

void AffineMatrix::add_term(int r, int c, int idx, double coef) {
  if (r < 0 || c < 0 || r >= n_ || c >= n_) throw std::invalid_argument("AffineMatrix: index out of range");
  if (coef == 0.0) return;
  if (r > c) std::swap(r, c);
  entries_.push_back({r, c, idx, coef});
}

void AffineMatrix::add_expr(int r, int c, const AffineExpr& e, double scale) {
  add_const(r, c, scale * e.constant);
  for (const auto& [i, coef] : e.terms) add_term(r, c, i, scale * coef);
}

void AffineMatrix::add_const_block(int r0, int c0, const MatrixXd& M) {
  if (r0 + M.rows() > n_ || c0 + M.cols() > n_) throw std::invalid_argument("AffineMatrix: block out of range");
  if (r0 == c0) {
    if (M.rows() != M.cols()) throw std::invalid_argument("AffineMatrix: diagonal block must be square");
    const_.block(r0, c0, M.rows(), M.cols()) += 0.5 * (M + M.transpose());
    return;
  }
  const_.block(r0, c0, M.rows(), M.cols()) += M;
  const_.block(c0, r0, M.cols(), M.rows()) += M.transpose();
}

MatrixXd AffineMatrix::eval(const VectorXd& x) const {
  MatrixXd F = const_;
  for (const auto& e : entries_) {
    const double v = e.coef * x(e.idx);
    F(e.r, e.c) += v;
    if (e.r != e.c) F(e.c, e.r) += v;
  }
  return F;
}

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::optimal: return "optimal";
    case SdpStatus::max_iterations: return "max-iterations";
    case SdpStatus::numerically_degenerate: return "numerically-degenerate";
    case SdpStatus::infeasible_detected: return "infeasible-detected";
  }
  return "unknown";
}

int SdpProblem::add_symmetric(const std::string& name, int n, bool nonneg) {
  if (n <= 0) throw std::invalid_argument("add_symmetric: dimension must be positive");
  vars_.push_back({name, VarKind::symmetric, n, n_, nonneg});
  n_ += n * (n + 1) / 2;
  if (nonneg)
    for (int i = 0; i < n * (n + 1) / 2; ++i) add_nonneg(AffineExpr().add(vars_.back().offset + i, 1.0));
  return num_vars() - 1;
}

int SdpProblem::add_vector(const std::string& name, int n, bool nonneg) {
  if (n <= 0) throw std::invalid_argument("add_vector: dimension must be positive");
  vars_.push_back({name, VarKind::vector, n, n_, nonneg});
  n_ += n;
  if (nonneg)
    for (int i = 0; i < n; ++i) add_nonneg(AffineExpr().add(vars_.back().offset + i, 1.0));
  return num_vars() - 1;
}

int SdpProblem::add_scalar(const std::string& name, bool nonneg) {
  vars_.push_back({name, VarKind::scalar, 1, n_, nonneg});
  n_ += 1;
  if (nonneg) add_nonneg(AffineExpr().add(vars_.back().offset, 1.0));
  return num_vars() - 1;
}

int SdpProblem::idx(int var, int i, int j) const {
  const VarInfo& v = vars_.at(var);
  switch (v.kind) {
    case VarKind::scalar:
      if (i != 0 || j != 0) throw std::invalid_argument("idx: scalar takes no index");
      return v.offset;
    case VarKind::vector:
      if (i < 0 || i >= v.dim || j != 0) throw std::invalid_argument("idx: vector index out of range");
      return v.offset + i;
    case VarKind::symmetric: {
      if (i < 0 || j < 0 || i >= v.dim || j >= v.dim) throw std::invalid_argument("idx: matrix index out of range");
      if (i > j) std::swap(i, j);
      // upper triangle, row-major
      return v.offset + i * v.dim - i * (i - 1) / 2 + (j - i);
    }
  }
  return -1;
}

AffineExpr SdpProblem::ref(int var, int i, int j) const { return AffineExpr().add(idx(var, i, j), 1.0); }

void SdpProblem::check_idx(int i) const {
  if (i < 0 || i >= n_) throw std::invalid_argument("SdpProblem: constraint references an unregistered variable");
}

int SdpProblem::add_psd(AffineMatrix m, const std::string& label) {
  for (const auto& e : m.entries()) check_idx(e.idx);
  psd_.push_back(std::move(m));
  psd_labels_.push_back(label);
  return static_cast<int>(psd_.size()) - 1;
}

int SdpProblem::add_soc(const std::vector<AffineExpr>& u, const AffineExpr& w, const std::string& label) {
  const int r = static_cast<int>(u.size());
  AffineMatrix m(r + 1);
  for (int i = 0; i <= r; ++i) m.add_expr(i, i, w);
  for (int i = 0; i < r; ++i) m.add_expr(i, r, u[i]);
  return add_psd(std::move(m), label);
}

void SdpProblem::add_nonneg(const AffineExpr& e) {
  for (const auto& [i, c] : e.terms) check_idx(i);
  ineq_.push_back(e);
}

void SdpProblem::add_equality(const AffineExpr& e) {
  for (const auto& [i, c] : e.terms) check_idx(i);
  eq_.push_back(e);
}

void SdpProblem::set_objective(const AffineExpr& linear, std::optional<AffineMatrix> logdet, double logdet_weight) {
  if (objective_set_) throw std::invalid_argument("set_objective: objective set twice");
  for (const auto& [i, c] : linear.terms) check_idx(i);
  if (logdet)
    for (const auto& e : logdet->entries()) check_idx(e.idx);
  lin_obj_ = linear;
  logdet_ = std::move(logdet);
  logdet_weight_ = logdet_weight;
  objective_set_ = true;
}

double SdpProblem::objective_value(const VectorXd& x) const {
  double v = lin_obj_.eval(x);
  if (logdet_) {
    Eigen::LLT<MatrixXd> llt(logdet_->eval(x));
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    v -= logdet_weight_ * 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  }
  return v;
}

MatrixXd SdpProblem::value_symmetric(const VectorXd& x, int var) const {
  const VarInfo& v = vars_.at(var);
  if (v.kind != VarKind::symmetric) throw std::invalid_argument("value_symmetric: not a matrix variable");
  MatrixXd M(v.dim, v.dim);
  for (int i = 0; i < v.dim; ++i)
    for (int j = i; j < v.dim; ++j) M(i, j) = M(j, i) = x(idx(var, i, j));
  return M;
}

VectorXd SdpProblem::value_vector(const VectorXd& x, int var) const {
  const VarInfo& v = vars_.at(var);
  if (v.kind != VarKind::vector) throw std::invalid_argument("value_vector: not a vector variable");
  return x.segment(v.offset, v.dim);
}

double SdpProblem::value_scalar(const VectorXd& x, int var) const {
  const VarInfo& v = vars_.at(var);
  if (v.kind != VarKind::scalar) throw std::invalid_argument("value_scalar: not a scalar variable");
  return x(v.offset);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Block {
  int n = 0;
  MatrixXd C;
  std::vector<AffineMatrix::Entry> entries;
  std::vector<int> vars;  // distinct scalar indices
  // per-variable entries (r, c, coef), r <= c
  std::vector<std::vector<std::tuple<int, int, double>>> by_var;

  MatrixXd eval(const VectorXd& x) const {
    MatrixXd F = C;
    for (const auto& e : entries) {
      const double v = e.coef * x(e.idx);
      F(e.r, e.c) += v;
      if (e.r != e.c) F(e.c, e.r) += v;
    }
    return F;
  }
};

struct LinRow {
  std::vector<std::pair<int, double>> a;
  double b = 0.0;
  double eval(const VectorXd& x) const {
    double v = b;
    for (const auto& [i, c] : a) v += c * x(i);
    return v;
  }
};

Block compile_block(const AffineMatrix& m) {
  Block b;
  b.n = m.size();
  b.C = m.constant();
  std::map<std::tuple<int, int, int>, double> merged;
  for (const auto& e : m.entries()) merged[{e.idx, e.r, e.c}] += e.coef;
  std::map<int, int> slot;
  for (const auto& [key, coef] : merged) {
    if (coef == 0.0) continue;
    const auto [idx, r, c] = key;
    b.entries.push_back({r, c, idx, coef});
    auto it = slot.find(idx);
    if (it == slot.end()) {
      it = slot.emplace(idx, static_cast<int>(b.vars.size())).first;
      b.vars.push_back(idx);
      b.by_var.emplace_back();
    }
    b.by_var[it->second].emplace_back(r, c, coef);
  }
  return b;
}

LinRow compile_row(const AffineExpr& e) {
  std::map<int, double> merged;
  for (const auto& [i, c] : e.terms) merged[i] += c;
  LinRow r;
  r.b = e.constant;
  for (const auto& [i, c] : merged)
    if (c != 0.0) r.a.emplace_back(i, c);
  return r;
}

// Barrier model: t * (c^T x - w logdet L(x)) - sum logdet F_k - sum log s_l - log(R^2 - ||x_ball||^2).
struct Model {
  int n = 0;
  std::vector<Block> blocks;
  std::vector<LinRow> rows;
  VectorXd c;
  std::optional<Block> logdet;
  double logdet_w = 1.0;
  int ball_dim = 0;
  double R2 = 1e12;
  // x = xp + Z z
  bool has_eq = false;
  MatrixXd Z;
  VectorXd xp;

  double degree() const {
    double m = 1.0 + static_cast<double>(rows.size());
    for (const auto& b : blocks) m += b.n;
    return m;
  }
};

bool chol_logdet(const MatrixXd& F, double& logdet) {
  Eigen::LLT<MatrixXd> llt(F);
  if (llt.info() != Eigen::Success) return false;
  const auto d = llt.matrixLLT().diagonal();
  if ((d.array() <= 0.0).any() || !d.allFinite()) return false;
  logdet = 2.0 * d.array().log().sum();
  return true;
}

double barrier_value(const Model& M, const VectorXd& x, double t) {
  double phi = t * M.c.dot(x);
  double ld = 0.0;
  if (M.logdet) {
    if (!chol_logdet(M.logdet->eval(x), ld)) return kInf;
    phi -= t * M.logdet_w * ld;
  }
  for (const auto& b : M.blocks) {
    if (!chol_logdet(b.eval(x), ld)) return kInf;
    phi -= ld;
  }
  for (const auto& r : M.rows) {
    const double s = r.eval(x);
    if (!(s > 0.0)) return kInf;
    phi -= std::log(s);
  }
  const double sb = M.R2 - x.head(M.ball_dim).squaredNorm();
  if (!(sb > 0.0)) return kInf;
  phi -= std::log(sb);
  return std::isfinite(phi) ? phi : kInf;
}

// Adds omega * (-logdet F) derivatives.
bool add_block_derivs(const Block& b, const VectorXd& x, double omega, VectorXd& g, MatrixXd& H) {
  const MatrixXd F = b.eval(x);
  Eigen::LLT<MatrixXd> llt(F);
  if (llt.info() != Eigen::Success) return false;
  const int n = b.n;
  MatrixXd Linv = MatrixXd::Identity(n, n);
  llt.matrixL().solveInPlace(Linv);
  const int nv = static_cast<int>(b.vars.size());
  if (nv == 0) return true;
  MatrixXd G = MatrixXd::Zero(n * n, nv);
  for (int v = 0; v < nv; ++v) {
    Eigen::Map<MatrixXd> Gv(G.col(v).data(), n, n);
    for (const auto& [r, c, coef] : b.by_var[v]) {
      if (r == c) {
        Gv.noalias() += coef * Linv.col(r) * Linv.col(r).transpose();
      } else {
        Gv.noalias() += coef * Linv.col(r) * Linv.col(c).transpose();
        Gv.noalias() += coef * Linv.col(c) * Linv.col(r).transpose();
      }
    }
    g(b.vars[v]) -= omega * Gv.trace();
  }
  MatrixXd Hl(nv, nv);
  Hl.noalias() = G.transpose() * G;
  for (int a = 0; a < nv; ++a)
    for (int c = 0; c < nv; ++c) H(b.vars[a], b.vars[c]) += omega * Hl(a, c);
  return true;
}

bool derivatives(const Model& M, const VectorXd& x, double t, VectorXd& g, MatrixXd& H) {
  g = t * M.c;
  H.setZero(M.n, M.n);
  if (M.logdet && !add_block_derivs(*M.logdet, x, t * M.logdet_w, g, H)) return false;
  for (const auto& b : M.blocks)
    if (!add_block_derivs(b, x, 1.0, g, H)) return false;
  for (const auto& r : M.rows) {
    const double s = r.eval(x);
    if (!(s > 0.0)) return false;
    const double inv = 1.0 / s;
    for (const auto& [i, ci] : r.a) {
      g(i) -= ci * inv;
      for (const auto& [j, cj] : r.a) H(i, j) += ci * cj * inv * inv;
    }
  }
  const int nb = M.ball_dim;
  const double sb = M.R2 - x.head(nb).squaredNorm();
  if (!(sb > 0.0)) return false;
  g.head(nb) += 2.0 * x.head(nb) / sb;
  H.topLeftCorner(nb, nb).diagonal().array() += 2.0 / sb;
  H.topLeftCorner(nb, nb).noalias() += (4.0 / (sb * sb)) * x.head(nb) * x.head(nb).transpose();
  return true;
}

enum class StepResult { ok, stalled, degenerate };

struct Newton {
  VectorXd dx;
  double lambda2 = 0.0;
  double gdx = 0.0;
};

StepResult newton_direction(const Model& M, const VectorXd& g, const MatrixXd& H, Newton& out, double cond_limit,
                            bool& ill_conditioned) {
  VectorXd gz;
  MatrixXd Hz;
  if (M.has_eq) {
    gz = M.Z.transpose() * g;
    Hz = M.Z.transpose() * H * M.Z;
  } else {
    gz = g;
    Hz = H;
  }
  const int k = static_cast<int>(gz.size());
  if (k == 0) {
    out.dx = VectorXd::Zero(M.n);
    out.lambda2 = 0.0;
    out.gdx = 0.0;
    return StepResult::ok;
  }
  VectorXd d(k);
  for (int i = 0; i < k; ++i) d(i) = Hz(i, i) > 0.0 ? 1.0 / std::sqrt(Hz(i, i)) : 1.0;
  MatrixXd Hs = d.asDiagonal() * Hz * d.asDiagonal();
  VectorXd rhs = -(d.asDiagonal() * gz);
  VectorXd y;
  Eigen::LLT<MatrixXd> llt(Hs);
  if (llt.info() == Eigen::Success) {
    y = llt.solve(rhs);
    ill_conditioned = llt.rcond() < 1.0 / cond_limit;
  }
  // Flat directions (lineality of the feasible set) leave only the safeguard-ball curvature; retry with a ridge.
  for (double ridge = 1e-12; (llt.info() != Eigen::Success || !y.allFinite()) && ridge <= 1e-6; ridge *= 100.0) {
    llt.compute(Hs + ridge * MatrixXd::Identity(k, k));
    if (llt.info() == Eigen::Success) y = llt.solve(rhs);
    ill_conditioned = true;
  }
  if (llt.info() != Eigen::Success) {
    Eigen::LDLT<MatrixXd> ldlt(Hs);
    if (ldlt.info() != Eigen::Success) return StepResult::degenerate;
    y = ldlt.solve(rhs);
    ill_conditioned = true;
  }
  if (!y.allFinite()) return StepResult::degenerate;
  const VectorXd dz = d.asDiagonal() * y;
  out.dx = M.has_eq ? VectorXd(M.Z * dz) : dz;
  out.gdx = gz.dot(dz);
  out.lambda2 = -out.gdx;
  return StepResult::ok;
}

struct BarrierRun {
  VectorXd x;
  double t = 0.0;
  int steps = 0;
  double gap_factor = 1.0;  // gap bound is gap_factor * m / t
  SdpStatus status = SdpStatus::max_iterations;
};

// Path following from a strictly feasible x. `done` is checked after each centering.
// `loose` decides whether the last centred point may be returned once centring at a later t stalls.
template <class Done, class Early, class Loose>
BarrierRun path_follow(const Model& M, VectorXd x, const SdpSettings& st, int budget, Done&& done, Early&& early,
                       Loose&& loose) {
  BarrierRun run;
  VectorXd last_x;
  double last_t = 0.0;
  int uncentered_stages = 0;
  double t = st.t0;
  const double m = M.degree();
  VectorXd g;
  MatrixXd H;
  Newton nt;
  int stalled_stages = 0;
  for (;;) {
    bool stage_stalled = false;
    bool centered = false;
    bool ill = false;
    for (int it = 0; it < st.max_stage_newton; ++it) {
      if (run.steps >= budget) {
        run.x = x;
        run.t = t;
        run.status = SdpStatus::max_iterations;
        return run;
      }
      if (!derivatives(M, x, t, g, H)) {
        run.x = x;
        run.t = t;
        run.status = SdpStatus::numerically_degenerate;
        return run;
      }
      const StepResult sr = newton_direction(M, g, H, nt, st.cond_limit, ill);
      ++run.steps;
      if (sr == StepResult::degenerate) {
        run.x = x;
        run.t = t;
        run.status = SdpStatus::numerically_degenerate;
        return run;
      }
      if (nt.lambda2 / 2.0 <= st.newton_tol) {
        centered = true;
        break;
      }
      const double phi0 = barrier_value(M, x, t);
      double s = 1.0;
      bool accepted = false;
      const double slack = 1e-13 * std::max(1.0, std::abs(phi0));
      while (s > 1e-12) {
        const VectorXd xn = x + s * nt.dx;
        const double phi = barrier_value(M, xn, t);
        if (phi <= phi0 + st.ls_alpha * s * nt.gdx + slack) {
          x = xn;
          accepted = true;
          // A full step along a nearly flat direction undershoots; extend it while the barrier keeps dropping.
          if (s == 1.0) {
            double best = phi;
            for (double e = 2.0; e <= 1e6; e *= 2.0) {
              const VectorXd xe = x + (e / 2.0) * nt.dx;
              const double pe = barrier_value(M, xe, t);
              if (!(pe < best - slack)) break;
              x = xe;
              best = pe;
            }
          }
          if (early(x)) {
            run.x = x;
            run.t = t;
            run.status = SdpStatus::optimal;
            return run;
          }
          break;
        }
        s *= st.ls_beta;
      }
      if (!accepted) {
        stage_stalled = true;
        break;
      }
    }
    // Near the end of the path the decrement floor is set by round-off; a loose decrement still bounds the gap.
    if (!centered && !stage_stalled && nt.lambda2 / 2.0 <= st.loose_newton_tol) centered = true;
    stalled_stages = stage_stalled ? stalled_stages + 1 : 0;
    // An unfinished centering keeps the current t.
    if (!centered && !stage_stalled) {
      if (++uncentered_stages >= 3) {
        // With lambda <= 0.32 the gap at x is below (m + lambda sqrt(m) / (1 - lambda)) / t <= 2m / t.
        if (nt.lambda2 <= 0.1 && loose(x, t, 2.0 * m)) {
          run.x = x;
          run.t = t;
          run.gap_factor = 2.0;
          run.status = SdpStatus::optimal;
          return run;
        }
        if (last_t > 0.0 && loose(last_x, last_t, m)) {
          run.x = last_x;
          run.t = last_t;
          run.status = SdpStatus::optimal;
          return run;
        }
      }
      continue;
    }
    uncentered_stages = 0;
    if (centered) {
      last_x = x;
      last_t = t;
    }
    if (done(x, t, m)) {
      run.x = x;
      run.t = t;
      run.status = SdpStatus::optimal;
      return run;
    }
    if (stalled_stages >= 3) {
      run.x = x;
      run.t = t;
      run.status = ill ? SdpStatus::numerically_degenerate : SdpStatus::max_iterations;
      return run;
    }
    t *= st.mu;
  }
}

Model compile(const SdpProblem& p, const SdpSettings& st) {
  Model M;
  M.n = p.num_scalars();
  M.ball_dim = M.n;
  M.R2 = st.ball_radius * st.ball_radius;
  for (const auto& b : p.psd_blocks()) M.blocks.push_back(compile_block(b));
  for (const auto& r : p.inequalities()) M.rows.push_back(compile_row(r));
  M.c = VectorXd::Zero(M.n);
  for (const auto& [i, c] : p.linear_objective().terms) M.c(i) += c;
  if (p.logdet_objective()) {
    M.logdet = compile_block(*p.logdet_objective());
    M.logdet_w = p.logdet_weight();
  }
  const int pe = static_cast<int>(p.equalities().size());
  M.xp = VectorXd::Zero(M.n);
  if (pe > 0) {
    MatrixXd E = MatrixXd::Zero(pe, M.n);
    VectorXd f(pe);
    for (int r = 0; r < pe; ++r) {
      for (const auto& [i, c] : p.equalities()[r].terms) E(r, i) += c;
      f(r) = -p.equalities()[r].constant;
    }
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(E);
    cod.setThreshold(1e-11);
    M.xp = cod.solve(f);
    const double res = (E * M.xp - f).cwiseAbs().maxCoeff();
    if (!(res <= 1e-8 * std::max(1.0, f.cwiseAbs().maxCoeff())))
      throw std::runtime_error("solve: inconsistent equality constraints");
    Eigen::ColPivHouseholderQR<MatrixXd> qr(E.transpose());
    qr.setThreshold(1e-11);
    const int rank = static_cast<int>(qr.rank());
    MatrixXd Q = qr.householderQ();
    M.Z = Q.rightCols(M.n - rank);
    M.has_eq = true;
  }
  return M;
}

double min_eig(const MatrixXd& F) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(F, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Phase I: minimize s over (x, s) with every block shifted by s I and every row by s; s >= -1.
Model phase1_model(const Model& M) {
  Model P;
  P.n = M.n + 1;
  const int s = M.n;
  P.ball_dim = M.ball_dim;
  P.R2 = M.R2;
  auto shifted = [&](const Block& b) {
    Block nb = b;
    for (int i = 0; i < b.n; ++i) nb.entries.push_back({i, i, s, 1.0});
    nb.vars.push_back(s);
    nb.by_var.emplace_back();
    for (int i = 0; i < b.n; ++i) nb.by_var.back().emplace_back(i, i, 1.0);
    return nb;
  };
  for (const auto& b : M.blocks) P.blocks.push_back(shifted(b));
  if (M.logdet) P.blocks.push_back(shifted(*M.logdet));
  for (const auto& r : M.rows) {
    LinRow nr = r;
    nr.a.emplace_back(s, 1.0);
    P.rows.push_back(nr);
  }
  LinRow floor;
  floor.a.emplace_back(s, 1.0);
  floor.b = 1.0;
  P.rows.push_back(floor);
  P.c = VectorXd::Zero(P.n);
  P.c(s) = 1.0;
  P.xp = VectorXd::Zero(P.n);
  P.xp.head(M.n) = M.xp;
  if (M.has_eq) {
    P.has_eq = true;
    P.Z = MatrixXd::Zero(P.n, M.Z.cols() + 1);
    P.Z.topLeftCorner(M.n, M.Z.cols()) = M.Z;
    P.Z(s, M.Z.cols()) = 1.0;
  }
  return P;
}

double required_shift(const Model& M, const VectorXd& x) {
  double need = -kInf;
  for (const auto& b : M.blocks) need = std::max(need, -min_eig(b.eval(x)));
  if (M.logdet) need = std::max(need, -min_eig(M.logdet->eval(x)));
  for (const auto& r : M.rows) need = std::max(need, -r.eval(x));
  return need;
}

struct Phase1Out {
  VectorXd x;
  double shift = 0.0;
  int steps = 0;
  SdpStatus status = SdpStatus::optimal;
};

Phase1Out run_phase1(const Model& M, const SdpSettings& st, int budget, bool stop_early) {
  Phase1Out out;
  VectorXd x0 = M.xp;
  if (x0.head(M.ball_dim).squaredNorm() >= M.R2) throw std::runtime_error("solve: particular solution outside the safeguard ball");
  const double need = required_shift(M, x0);
  if (stop_early && need < -1e-6) {
    out.x = x0;
    out.shift = need;
    return out;
  }
  // Phase I has no cost on most unknowns, so its centering drifts to the safeguard ball.
  // A small ball is tried first and enlarged only when it excludes every strictly feasible point.
  const double R = std::sqrt(M.R2);
  double r = std::min(R, 100.0 * std::max(1.0, x0.head(M.ball_dim).norm()));
  for (;;) {
    Model P = phase1_model(M);
    P.R2 = r * r;
    VectorXd y(P.n);
    y.head(M.n) = x0;
    y(M.n) = std::max(need, -0.5) + 1.0;
    SdpSettings s1 = st;
    s1.t0 = 1.0;
    const BarrierRun run = path_follow(
        P, y, s1, budget - out.steps,
        [&](const VectorXd& z, double t, double m) {
          // In early mode a certified positive lower bound on the shift ends the attempt.
          if (stop_early && z(M.n) - m / t > 0.0) return true;
          return m / t <= st.gap_tol;
        },
        [&](const VectorXd& z) { return stop_early && z(M.n) < -1e-6; },
        [](const VectorXd&, double, double) { return false; });
    out.steps += run.steps;
    out.x = run.x.head(M.n);
    out.shift = run.x(M.n);
    // Re-measure on the original model; the shift variable can lag behind.
    out.shift = std::min(out.shift, required_shift(M, out.x));
    out.status = run.status;
    const bool inside = out.x.head(M.ball_dim).norm() < 0.5 * r;
    if (r >= R || out.steps >= budget) return out;
    if (stop_early ? out.shift < 0.0 : (run.status == SdpStatus::optimal && inside)) return out;
    r = std::min(R, 100.0 * r);
  }
}

}  // namespace

SdpSolution solve(const SdpProblem& p, const SdpSettings& st) {
  if (!p.has_objective()) throw std::invalid_argument("solve: objective unset");
  Model M = compile(p, st);
  SdpSolution sol;
  const Phase1Out ph1 = run_phase1(M, st, st.max_newton, true);
  sol.phase1_steps = ph1.steps;
  if (!(ph1.shift < 0.0)) {
    sol.x = ph1.x;
    sol.status = (ph1.status == SdpStatus::optimal) ? SdpStatus::infeasible_detected : ph1.status;
    sol.objective = p.objective_value(sol.x);
    sol.newton_steps = ph1.steps;
    sol.residuals = residuals(p, sol);
    return sol;
  }
  // Nearly cost-free recession directions pull the early centres out to the safeguard ball.
  // A small ball is tried first; a solution strictly inside it is optimal for the unrestricted problem.
  const double R = std::sqrt(M.R2);
  double r = std::min(R, 100.0 * std::max(1.0, ph1.x.head(M.ball_dim).norm()));
  int steps = ph1.steps;
  BarrierRun run;
  for (;;) {
    M.R2 = r * r;
    run = path_follow(M, ph1.x, st, st.max_newton - steps, [&](const VectorXd& x, double t, double m) {
        const double f = p.objective_value(x);
        return m / t <= st.gap_tol * std::max(1.0, std::abs(f));
      },
      [](const VectorXd&) { return false; },
      [&](const VectorXd& x, double t, double m) {
        return m / t <= st.loose_gap_tol * std::max(1.0, std::abs(p.objective_value(x)));
      });
    steps += run.steps;
    const bool inside = run.x.head(M.ball_dim).norm() < 0.5 * r;
    if (r >= R || steps >= st.max_newton || (run.status == SdpStatus::optimal && inside)) break;
    r = std::min(R, 100.0 * r);
  }
  sol.newton_steps = steps;
  sol.x = run.x;
  sol.status = run.status;
  sol.t_final = run.t / run.gap_factor;
  sol.objective = p.objective_value(sol.x);
  for (const auto& b : M.blocks) {
    Eigen::LLT<MatrixXd> llt(b.eval(sol.x));
    MatrixXd inv = llt.solve(MatrixXd::Identity(b.n, b.n));
    sol.psd_duals.push_back(inv / run.t);
  }
  sol.linear_duals.resize(static_cast<int>(M.rows.size()));
  for (std::size_t l = 0; l < M.rows.size(); ++l)
    sol.linear_duals(static_cast<int>(l)) = 1.0 / (run.t * M.rows[l].eval(sol.x));
  sol.residuals = residuals(p, sol);
  return sol;
}

double neg_logdet(const MatrixXd& X) {
  double ld = 0.0;
  if (X.rows() != X.cols() || !chol_logdet(X, ld)) throw std::invalid_argument("neg_logdet: matrix not positive definite");
  return -ld;
}

MatrixXd neg_logdet_gradient(const MatrixXd& X) {
  Eigen::LLT<MatrixXd> llt(X);
  if (X.rows() != X.cols() || llt.info() != Eigen::Success)
    throw std::invalid_argument("neg_logdet_gradient: matrix not positive definite");
  MatrixXd Linv = MatrixXd::Identity(X.rows(), X.cols());
  llt.matrixL().solveInPlace(Linv);
  return -(Linv.transpose() * Linv);
}

FeasibilityResult find_feasible_shift(const SdpProblem& p, const SdpSettings& st, bool stop_early) {
  const Model M = compile(p, st);
  const Phase1Out ph1 = run_phase1(M, st, st.max_newton, stop_early);
  return {ph1.shift, ph1.x, ph1.status};
}

ResidualReport residuals(const SdpProblem& p, const SdpSolution& s) {
  ResidualReport rep;
  const VectorXd& x = s.x;
  const int n = p.num_scalars();
  if (x.size() != n) throw std::invalid_argument("residuals: solution dimension mismatch");
  rep.min_psd_eig = kInf;
  for (const auto& b : p.psd_blocks()) {
    const double e = min_eig(b.eval(x));
    rep.psd_min_eig.push_back(e);
    rep.min_psd_eig = std::min(rep.min_psd_eig, e);
  }
  if (p.psd_blocks().empty()) rep.min_psd_eig = 0.0;
  for (const auto& r : p.inequalities()) rep.max_linear_violation = std::max(rep.max_linear_violation, -r.eval(x));
  for (const auto& r : p.equalities()) rep.max_equality_violation = std::max(rep.max_equality_violation, std::abs(r.eval(x)));

  double m = 1.0 + static_cast<double>(p.inequalities().size());
  for (const auto& b : p.psd_blocks()) m += b.size();
  rep.gap_bound = s.t_final > 0.0 ? m / s.t_final : kInf;

  if (s.psd_duals.size() != p.psd_blocks().size() || s.linear_duals.size() != static_cast<int>(p.inequalities().size())) {
    rep.stationarity = kInf;
    return rep;
  }
  // grad f - sum_k <Z_k, F_k,i> - sum_l y_l a_l, logdet part by central differences.
  VectorXd r = VectorXd::Zero(n);
  for (const auto& [i, c] : p.linear_objective().terms) r(i) += c;
  VectorXd fd = VectorXd::Zero(n);
  if (p.logdet_objective()) {
    const AffineMatrix& L = *p.logdet_objective();
    std::vector<int> touched;
    for (const auto& e : L.entries()) touched.push_back(e.idx);
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (int i : touched) {
      const double h = 1e-6 * std::max(1.0, std::abs(x(i)));
      VectorXd xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      double lp = 0.0, lm = 0.0;
      if (!chol_logdet(L.eval(xp), lp) || !chol_logdet(L.eval(xm), lm)) {
        rep.stationarity = kInf;
        return rep;
      }
      fd(i) = -p.logdet_weight() * (lp - lm) / (2.0 * h);
    }
    r += fd;
  }
  for (std::size_t k = 0; k < p.psd_blocks().size(); ++k) {
    const MatrixXd& Zk = s.psd_duals[k];
    for (const auto& e : p.psd_blocks()[k].entries()) {
      const double w = (e.r == e.c) ? Zk(e.r, e.c) : 2.0 * Zk(e.r, e.c);
      r(e.idx) -= e.coef * w;
    }
  }
  for (std::size_t l = 0; l < p.inequalities().size(); ++l)
    for (const auto& [i, c] : p.inequalities()[l].terms) r(i) -= s.linear_duals(static_cast<int>(l)) * c;
  VectorXd rp = r;
  const int pe = static_cast<int>(p.equalities().size());
  if (pe > 0) {
    MatrixXd E = MatrixXd::Zero(pe, n);
    for (int q = 0; q < pe; ++q)
      for (const auto& [i, c] : p.equalities()[q].terms) E(q, i) += c;
    // remove the component explained by equality multipliers
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(E.transpose());
    rp = r - E.transpose() * cod.solve(r);
  }
  double scale = 1.0;
  for (const auto& [i, c] : p.linear_objective().terms) scale = std::max(scale, std::abs(c));
  scale = std::max(scale, fd.cwiseAbs().maxCoeff());
  rep.stationarity = rp.cwiseAbs().maxCoeff() / scale;
  return rep;
}

}  // namespace lowner
