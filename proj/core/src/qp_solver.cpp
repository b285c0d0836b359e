#include "commplan/qp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>

#include "commplan/errors.hpp"

namespace commplan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

enum class RowKind { General, Upper, Lower };

// Constraint set in the solver's native form  n_i^T x + c_i >= 0.
struct ConstraintSet {
  Mat normals;  // n x m
  Vec offsets;  // m
  std::vector<RowKind> kind;
  std::vector<Eigen::Index> source;  // row or variable index
};

ConstraintSet gather_constraints(const QuadraticProgram& qp) {
  const Eigen::Index n = qp.size();
  std::vector<Eigen::Index> upper, lower;
  for (Eigen::Index v = 0; v < n; ++v) {
    if (std::isfinite(qp.box_hi(v))) upper.push_back(v);
    if (std::isfinite(qp.box_lo(v))) lower.push_back(v);
  }
  const Eigen::Index m = qp.ineq_coeff.rows() + static_cast<Eigen::Index>(upper.size() + lower.size());

  ConstraintSet cs;
  cs.normals = Mat::Zero(n, m);
  cs.offsets = Vec::Zero(m);
  Eigen::Index col = 0;
  for (Eigen::Index r = 0; r < qp.ineq_coeff.rows(); ++r, ++col) {
    cs.normals.col(col) = -qp.ineq_coeff.row(r).transpose();
    cs.offsets(col) = qp.ineq_rhs(r);
    cs.kind.push_back(RowKind::General);
    cs.source.push_back(r);
  }
  for (Eigen::Index v : upper) {  // x_v <= hi
    cs.normals(v, col) = -1.0;
    cs.offsets(col) = qp.box_hi(v);
    cs.kind.push_back(RowKind::Upper);
    cs.source.push_back(v);
    ++col;
  }
  for (Eigen::Index v : lower) {  // x_v >= lo
    cs.normals(v, col) = 1.0;
    cs.offsets(col) = -qp.box_lo(v);
    cs.kind.push_back(RowKind::Lower);
    cs.source.push_back(v);
    ++col;
  }
  return cs;
}

// Active-set factorisation: J^T H J = I, with the first q columns of J^T N_A
// triangularised into R.
class ActiveSet {
 public:
  ActiveSet(Mat j, Eigen::Index n) : j_(std::move(j)), r_(Mat::Zero(n, n)), n_(n) {
    active_.assign(static_cast<std::size_t>(n + 1), -1);
    mult_ = Vec::Zero(n + 1);
  }

  Eigen::Index size() const { return q_; }
  const Mat& j() const { return j_; }
  Eigen::Index active(Eigen::Index k) const { return active_[static_cast<std::size_t>(k)]; }
  double& mult(Eigen::Index k) { return mult_(k); }
  double mult(Eigen::Index k) const { return mult_(k); }

  Vec solve_r(const Vec& d) const {
    if (q_ == 0) return Vec();
    return r_.topLeftCorner(q_, q_).triangularView<Eigen::Upper>().solve(d.head(q_));
  }

  // Appends the candidate (whose multiplier already sits at slot q) using
  // d = J^T n_p. Returns false when n_p is numerically dependent on the
  // active normals; the set is then left unchanged.
  bool add(Vec d, Eigen::Index constraint) {
    for (Eigen::Index col = n_ - 1; col > q_; --col) {
      double cc = d(col - 1);
      double ss = d(col);
      const double h = std::hypot(cc, ss);
      if (h == 0.0) continue;
      d(col) = 0.0;
      ss /= h;
      cc /= h;
      if (cc < 0.0) {
        cc = -cc;
        ss = -ss;
        d(col - 1) = -h;
      } else {
        d(col - 1) = h;
      }
      const double xny = ss / (1.0 + cc);
      for (Eigen::Index k = 0; k < n_; ++k) {
        const double t1 = j_(k, col - 1);
        const double t2 = j_(k, col);
        j_(k, col - 1) = t1 * cc + t2 * ss;
        j_(k, col) = xny * (t1 + j_(k, col - 1)) - t2;
      }
    }
    if (std::abs(d(q_)) <= kEps * r_norm_) return false;
    r_.col(q_).head(q_ + 1) = d.head(q_ + 1);
    r_norm_ = std::max(r_norm_, std::abs(d(q_)));
    active_[static_cast<std::size_t>(q_)] = constraint;
    ++q_;
    return true;
  }

  // Drops the active constraint at position pos; the candidate slot shifts down.
  void remove(Eigen::Index pos) {
    for (Eigen::Index i = pos; i < q_ - 1; ++i) {
      active_[static_cast<std::size_t>(i)] = active_[static_cast<std::size_t>(i + 1)];
      mult_(i) = mult_(i + 1);
      r_.col(i) = r_.col(i + 1);
    }
    active_[static_cast<std::size_t>(q_ - 1)] = active_[static_cast<std::size_t>(q_)];
    mult_(q_ - 1) = mult_(q_);
    active_[static_cast<std::size_t>(q_)] = -1;
    mult_(q_) = 0.0;
    r_.col(q_ - 1).setZero();
    --q_;

    for (Eigen::Index jj = pos; jj < q_; ++jj) {
      double cc = r_(jj, jj);
      double ss = r_(jj + 1, jj);
      const double h = std::hypot(cc, ss);
      if (h == 0.0) continue;
      cc /= h;
      ss /= h;
      r_(jj + 1, jj) = 0.0;
      if (cc < 0.0) {
        r_(jj, jj) = -h;
        cc = -cc;
        ss = -ss;
      } else {
        r_(jj, jj) = h;
      }
      const double xny = ss / (1.0 + cc);
      for (Eigen::Index k = jj + 1; k < q_; ++k) {
        const double t1 = r_(jj, k);
        const double t2 = r_(jj + 1, k);
        r_(jj, k) = t1 * cc + t2 * ss;
        r_(jj + 1, k) = xny * (t1 + r_(jj, k)) - t2;
      }
      for (Eigen::Index k = 0; k < n_; ++k) {
        const double t1 = j_(k, jj);
        const double t2 = j_(k, jj + 1);
        j_(k, jj) = t1 * cc + t2 * ss;
        j_(k, jj + 1) = xny * (j_(k, jj) + t1) - t2;
      }
    }
  }

 private:
  Mat j_;
  Mat r_;
  Eigen::Index n_;
  Eigen::Index q_ = 0;
  double r_norm_ = 1.0;
  std::vector<Eigen::Index> active_;
  Vec mult_;
};

QpResult finish(const QuadraticProgram& qp, const ConstraintSet& cs, Vec x, const Vec& cons_mult,
                SolveStatus status, int iterations, bool regularized) {
  QpResult res;
  res.status = status;
  res.iterations = iterations;
  res.regularized = regularized;
  res.row_multipliers = Vec::Zero(qp.ineq_coeff.rows());
  res.lower_multipliers = Vec::Zero(qp.size());
  res.upper_multipliers = Vec::Zero(qp.size());
  for (Eigen::Index c = 0; c < cons_mult.size(); ++c) {
    const auto s = cs.source[static_cast<std::size_t>(c)];
    switch (cs.kind[static_cast<std::size_t>(c)]) {
      case RowKind::General: res.row_multipliers(s) = cons_mult(c); break;
      case RowKind::Upper: res.upper_multipliers(s) = cons_mult(c); break;
      case RowKind::Lower: res.lower_multipliers(s) = cons_mult(c); break;
    }
  }
  res.objective = qp.objective(x);
  res.x = std::move(x);
  return res;
}

}  // namespace

void QuadraticProgram::validate() const {
  const Eigen::Index n = linear.size();
  if (hessian.rows() != n || hessian.cols() != n) throw DimensionError("hessian shape mismatch");
  if (ineq_coeff.rows() != ineq_rhs.size()) throw DimensionError("inequality rhs size mismatch");
  if (ineq_coeff.rows() > 0 && ineq_coeff.cols() != n) throw DimensionError("inequality width mismatch");
  if (box_lo.size() != n || box_hi.size() != n) throw DimensionError("box size mismatch");
  for (Eigen::Index v = 0; v < n; ++v) {
    if (box_lo(v) > box_hi(v)) throw DimensionError("box_lo exceeds box_hi");
  }
}

double QuadraticProgram::objective(const Vec& x) const {
  return 0.5 * x.dot(hessian * x) + linear.dot(x) + constant;
}

double QuadraticProgram::max_violation(const Vec& x) const {
  double worst = 0.0;
  if (ineq_coeff.rows() > 0) {
    worst = std::max(worst, (ineq_coeff * x - ineq_rhs).maxCoeff());
  }
  for (Eigen::Index v = 0; v < x.size(); ++v) {
    worst = std::max({worst, x(v) - box_hi(v), box_lo(v) - x(v)});
  }
  return worst;
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::MaxIterations: return "max-iterations";
  }
  return "unknown";
}

double stationarity_residual(const QuadraticProgram& qp, const QpResult& res) {
  Vec g = qp.hessian * res.x + qp.linear + res.upper_multipliers - res.lower_multipliers;
  if (qp.ineq_coeff.rows() > 0) g += qp.ineq_coeff.transpose() * res.row_multipliers;
  return g.norm();
}

QpResult solve_qp(const QuadraticProgram& qp, const QpOptions& opt) {
  qp.validate();
  const Eigen::Index n = qp.size();
  const ConstraintSet cs = gather_constraints(qp);
  const Eigen::Index m = cs.offsets.size();

  if (n == 0) {
    const bool ok = m == 0 || cs.offsets.minCoeff() >= -opt.feasibility_tol;
    return finish(qp, cs, Vec(), Vec::Zero(m), ok ? SolveStatus::Optimal : SolveStatus::Infeasible, 0,
                  false);
  }

  // Factor H; fall back to H + delta I when H is only semidefinite.
  Mat h = qp.hessian;
  const double scale = std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
  bool regularized = false;
  Eigen::LLT<Mat> llt(h);
  auto singular = [&] {
    if (llt.info() != Eigen::Success) return true;
    const Vec diag = Mat(llt.matrixL()).diagonal();
    return diag.minCoeff() * diag.minCoeff() < 1e-14 * scale;
  };
  if (singular()) {
    h.diagonal().array() += opt.regularization * scale;
    llt.compute(h);
    regularized = true;
    if (llt.info() != Eigen::Success) throw NumericalError("QP hessian is not positive semidefinite");
  }

  const Mat l = llt.matrixL();
  ActiveSet set(l.transpose().triangularView<Eigen::Upper>().solve(Mat::Identity(n, n)), n);
  Vec x = -llt.solve(qp.linear);

  const int max_iter = opt.max_iterations > 0 ? opt.max_iterations : static_cast<int>(20 * (n + m) + 100);
  std::vector<char> is_active(static_cast<std::size_t>(m), 0);
  std::vector<char> excluded(static_cast<std::size_t>(m), 0);

  auto slack = [&](Eigen::Index c) { return cs.normals.col(c).dot(x) + cs.offsets(c); };
  auto tolerance = [&](Eigen::Index c) {
    return opt.feasibility_tol * std::max(1.0, std::abs(cs.offsets(c)));
  };
  auto constraint_multipliers = [&] {
    Vec out = Vec::Zero(m);
    for (Eigen::Index k = 0; k < set.size(); ++k) out(set.active(k)) = set.mult(k);
    return out;
  };

  int iter = 0;
  std::fill(excluded.begin(), excluded.end(), 0);
  while (true) {
    if (++iter > max_iter) {
      return finish(qp, cs, x, constraint_multipliers(), SolveStatus::MaxIterations, iter, regularized);
    }

    // Step 1: pick the most violated inactive constraint (scaled by normal length).
    Eigen::Index p = -1;
    double worst = 0.0;
    for (Eigen::Index c = 0; c < m; ++c) {
      if (is_active[static_cast<std::size_t>(c)] || excluded[static_cast<std::size_t>(c)]) continue;
      const double s = slack(c);
      if (s >= -tolerance(c)) continue;
      const double norm = cs.normals.col(c).norm();
      if (norm == 0.0) {
        return finish(qp, cs, x, constraint_multipliers(), SolveStatus::Infeasible, iter, regularized);
      }
      if (s / norm < worst) {
        worst = s / norm;
        p = c;
      }
    }
    if (p < 0) {
      return finish(qp, cs, x, constraint_multipliers(), SolveStatus::Optimal, iter, regularized);
    }

    const Vec np = cs.normals.col(p);
    set.mult(set.size()) = 0.0;
    double sp = slack(p);

    // Step 2: move x and the multipliers until p becomes active.
    while (true) {
      if (++iter > max_iter) {
        return finish(qp, cs, x, constraint_multipliers(), SolveStatus::MaxIterations, iter, regularized);
      }
      const Eigen::Index q = set.size();
      const Vec d = set.j().transpose() * np;
      const Vec z = set.j().rightCols(n - q) * d.tail(n - q);
      const Vec r = set.solve_r(d);

      double t1 = kInf;
      Eigen::Index drop = -1;
      for (Eigen::Index k = 0; k < q; ++k) {
        if (r(k) > 0.0 && set.mult(k) / r(k) < t1) {
          t1 = set.mult(k) / r(k);
          drop = k;
        }
      }
      const double znp = z.dot(np);
      const double t2 = (z.norm() > kEps * std::max(1.0, np.norm()) && znp > 0.0) ? -sp / znp : kInf;

      if (!std::isfinite(t1) && !std::isfinite(t2)) {
        return finish(qp, cs, x, constraint_multipliers(), SolveStatus::Infeasible, iter, regularized);
      }
      if (!std::isfinite(t2)) {
        // Dual-only step: the blocking constraint leaves the active set.
        for (Eigen::Index k = 0; k < q; ++k) set.mult(k) -= t1 * r(k);
        set.mult(q) += t1;
        is_active[static_cast<std::size_t>(set.active(drop))] = 0;
        set.remove(drop);
        continue;
      }

      const double t = std::min(t1, t2);
      x += t * z;
      for (Eigen::Index k = 0; k < q; ++k) set.mult(k) -= t * r(k);
      set.mult(q) += t;

      if (t2 <= t1) {
        if (set.add(d, p)) {
          is_active[static_cast<std::size_t>(p)] = 1;
          std::fill(excluded.begin(), excluded.end(), 0);
        } else {
          set.mult(q) = 0.0;
          excluded[static_cast<std::size_t>(p)] = 1;
        }
        break;
      }
      is_active[static_cast<std::size_t>(set.active(drop))] = 0;
      set.remove(drop);
      sp = slack(p);
    }
  }
}

}  // namespace commplan
