#include "hocbf/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hocbf {

namespace {

constexpr double kViolationTol = 1e-9;    // on prescaled rows
constexpr double kMultiplierTol = 1e-10;
constexpr double kEqualityTol = 1e-8;
constexpr double kSlackTol = 1e-7;

struct UnifiedRows {
  Eigen::MatrixXd coeff;
  Eigen::VectorXd offset;
  std::vector<int> ext;  // external row index per unified row, -1 internal
};

// Flatten general rows and finite box bounds into one prescaled row list.
// Row scaling leaves the feasible set unchanged and makes the solver's
// absolute tolerances meaningful across badly scaled inputs.
UnifiedRows unify(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                  const Eigen::VectorXd& lb, const Eigen::VectorXd& ub,
                  int ext_base) {
  const int n = static_cast<int>(A.cols());
  const int m = static_cast<int>(A.rows());
  std::vector<Eigen::RowVectorXd> rows;
  std::vector<double> offs;
  std::vector<int> ext;
  for (int i = 0; i < m; ++i) {
    rows.emplace_back(A.row(i));
    offs.push_back(b[i]);
    ext.push_back(i);
  }
  if (lb.size() == n) {
    for (int i = 0; i < n; ++i) {
      if (std::isfinite(lb[i])) {
        rows.emplace_back(Eigen::RowVectorXd::Unit(n, i));
        offs.push_back(-lb[i]);
        ext.push_back(ext_base + 2 * i);
      }
      if (std::isfinite(ub[i])) {
        rows.emplace_back(-Eigen::RowVectorXd::Unit(n, i));
        offs.push_back(ub[i]);
        ext.push_back(ext_base + 2 * i + 1);
      }
    }
  }
  UnifiedRows u;
  u.coeff.resize(static_cast<int>(rows.size()), n);
  u.offset.resize(static_cast<int>(rows.size()));
  u.ext = std::move(ext);
  for (size_t i = 0; i < rows.size(); ++i) {
    double scale =
        std::max({1.0, rows[i].cwiseAbs().maxCoeff(), std::abs(offs[i])});
    u.coeff.row(static_cast<int>(i)) = rows[i] / scale;
    u.offset[static_cast<int>(i)] = offs[i] / scale;
  }
  return u;
}

struct EqpResult {
  Eigen::VectorXd z;
  Eigen::VectorXd lambda;
  bool ok = false;
};

// Equality-constrained subproblem on the working set, solved as one
// indefinite KKT system with full pivoting plus refinement:
//   H z + f = Aw' lambda,  Aw z + rw = 0.
EqpResult solve_eqp(const Eigen::MatrixXd& h, const Eigen::VectorXd& f,
                    const Eigen::VectorXd& z_uncon, const UnifiedRows& rows,
                    const std::vector<int>& working) {
  EqpResult res;
  const int n = static_cast<int>(f.size());
  const int k = static_cast<int>(working.size());
  if (k == 0) {
    res.z = z_uncon;
    res.lambda.resize(0);
    res.ok = true;
    return res;
  }
  Eigen::MatrixXd aw(k, n);
  Eigen::VectorXd rw(k);
  for (int i = 0; i < k; ++i) {
    aw.row(i) = rows.coeff.row(working[static_cast<size_t>(i)]);
    rw[i] = rows.offset[working[static_cast<size_t>(i)]];
  }
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + k, n + k);
  kkt.topLeftCorner(n, n) = h;
  kkt.topRightCorner(n, k) = -aw.transpose();
  kkt.bottomLeftCorner(k, n) = aw;
  Eigen::VectorXd rhs(n + k);
  rhs.head(n) = -f;
  rhs.tail(k) = -rw;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  Eigen::VectorXd sol;
  if (lu.isInvertible()) {
    sol = lu.solve(rhs);
    const double rhs_scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
    for (int pass = 0; pass < 4; ++pass) {
      Eigen::VectorXd resid = rhs - kkt * sol;
      if (resid.cwiseAbs().maxCoeff() <= 1e-13 * rhs_scale) break;
      sol += lu.solve(resid);
    }
  } else {
    sol = kkt.completeOrthogonalDecomposition().solve(rhs);
  }
  res.z = sol.head(n);
  res.lambda = sol.tail(k);
  const double zs = std::max(1.0, res.z.cwiseAbs().maxCoeff());
  res.ok = (aw * res.z + rw).cwiseAbs().maxCoeff() <= kEqualityTol * zs;
  return res;
}

struct CoreResult {
  Eigen::VectorXd z;
  Eigen::VectorXd lambda;
  std::vector<int> working;
  bool optimal = false;
  int iterations = 0;
};

/* Primal active-set iteration from a feasible start: move toward the
 * working-set minimizer, stop at the first blocking row and make it
 * active, drop rows whose multipliers turn negative. Ties resolve to the
 * lowest row index for reproducible runs. */
CoreResult primal_loop(const Eigen::MatrixXd& h, const Eigen::VectorXd& f,
                       const Eigen::VectorXd& z_uncon, const UnifiedRows& rows,
                       Eigen::VectorXd z, std::vector<int> working, int cap) {
  CoreResult res;
  res.working = std::move(working);
  const int k_rows = static_cast<int>(rows.coeff.rows());

  for (int iter = 0; iter < cap; ++iter) {
    res.iterations = iter + 1;
    EqpResult eqp = solve_eqp(h, f, z_uncon, rows, res.working);
    if (!eqp.ok) return res;  // numerically inconsistent working set

    Eigen::VectorXd d = eqp.z - z;
    const double step_scale = 1.0 + z.cwiseAbs().maxCoeff();
    if (d.cwiseAbs().maxCoeff() <= 1e-11 * step_scale) {
      // stationary on the working set; drop the most negative multiplier
      int drop = -1;
      double most_negative = -kMultiplierTol;
      for (int i = 0; i < static_cast<int>(res.working.size()); ++i)
        if (eqp.lambda[i] < most_negative) {
          most_negative = eqp.lambda[i];
          drop = i;
        }
      if (drop >= 0) {
        res.working.erase(res.working.begin() + drop);
        continue;
      }
      res.z = eqp.z;
      res.lambda = eqp.lambda;
      res.optimal = true;
      return res;
    }

    // ratio test toward the subproblem minimizer
    double t = 1.0;
    int blocker = -1;
    for (int i = 0; i < k_rows; ++i) {
      if (std::find(res.working.begin(), res.working.end(), i) !=
          res.working.end())
        continue;
      const double along = rows.coeff.row(i).dot(d);
      if (along >= -1e-13) continue;  // this row cannot block the move
      const double resid =
          std::max(0.0, rows.coeff.row(i).dot(z) + rows.offset[i]);
      const double ti = resid / (-along);
      if (ti < t) {
        t = ti;
        blocker = i;
      }
    }
    z += t * d;
    if (blocker >= 0)
      res.working.push_back(blocker);
    // with a full step the next pass lands in the stationarity branch
  }
  return res;  // cap exhausted
}

// Greedy independent subset of the rows tight at z, lowest indices first.
std::vector<int> tight_independent_rows(const UnifiedRows& rows,
                                        const Eigen::VectorXd& z,
                                        double tol) {
  const int n = static_cast<int>(z.size());
  std::vector<int> out;
  Eigen::MatrixXd stacked(0, n);
  for (int i = 0; i < rows.coeff.rows(); ++i) {
    if (static_cast<int>(out.size()) >= n) break;
    if (std::abs(rows.coeff.row(i).dot(z) + rows.offset[i]) > tol) continue;
    Eigen::MatrixXd trial(stacked.rows() + 1, n);
    trial << stacked, rows.coeff.row(i);
    if (trial.completeOrthogonalDecomposition().rank() ==
        trial.rows()) {
      stacked = trial;
      out.push_back(i);
    }
  }
  return out;
}

void fill_kkt(QPSolution& sol, const Eigen::MatrixXd& h,
              const Eigen::VectorXd& f, const UnifiedRows& rows,
              const CoreResult& core) {
  Eigen::VectorXd grad = h * core.z + f;
  Eigen::VectorXd from_rows = Eigen::VectorXd::Zero(core.z.size());
  double compl_worst = 0.0;
  for (size_t i = 0; i < core.working.size(); ++i) {
    const int r = core.working[i];
    from_rows +=
        core.lambda[static_cast<int>(i)] * rows.coeff.row(r).transpose();
    compl_worst =
        std::max(compl_worst,
                 std::abs(core.lambda[static_cast<int>(i)] *
                          (rows.coeff.row(r).dot(core.z) + rows.offset[r])));
  }
  const double denom = std::max(
      {1.0, grad.cwiseAbs().maxCoeff(), from_rows.cwiseAbs().maxCoeff()});
  sol.stationarity = (grad - from_rows).cwiseAbs().maxCoeff() / denom;
  double worst_violation = 0.0;
  for (int i = 0; i < rows.coeff.rows(); ++i)
    worst_violation = std::max(
        worst_violation, -(rows.coeff.row(i).dot(core.z) + rows.offset[i]));
  sol.feasibility = std::max(0.0, worst_violation);
  sol.complementarity = compl_worst;
}

QPSolution solve_scaled(const Eigen::MatrixXd& h, const Eigen::VectorXd& f,
                        const UnifiedRows& rows, const Eigen::VectorXd& lb,
                        const Eigen::VectorXd& ub, bool allow_phase1,
                        const Eigen::VectorXd* start = nullptr);

// Feasibility subproblem: minimize eps*|z|^2 + |s|^2 with one slack per
// row; it has an obvious strictly feasible start, so the primal loop runs
// directly. A strictly positive residual violation at its optimum is the
// infeasibility certificate.
QPSolution run_phase1(const UnifiedRows& rows, int n,
                      const Eigen::VectorXd* center) {
  const int k = static_cast<int>(rows.coeff.rows());
  constexpr double kReg = 1e-12;

  // the z-block regularizer only keeps the cost strictly convex; it must
  // stay far below the slack weight or it bleeds into the optimal slacks.
  // Re-centering on a previous almost-feasible point shrinks that bleed.
  Eigen::MatrixXd h1 = Eigen::MatrixXd::Identity(n + k, n + k);
  h1.topLeftCorner(n, n) *= kReg;
  Eigen::VectorXd f1 = Eigen::VectorXd::Zero(n + k);
  if (center != nullptr) f1.head(n) = -kReg * (*center);

  UnifiedRows r1;
  r1.coeff = Eigen::MatrixXd::Zero(2 * k, n + k);
  r1.offset = Eigen::VectorXd::Zero(2 * k);
  r1.coeff.topLeftCorner(k, n) = rows.coeff;
  for (int i = 0; i < k; ++i) {
    r1.coeff(i, n + i) = 1.0;
    r1.offset[i] = rows.offset[i];
    r1.coeff(k + i, n + i) = 1.0;  // s_i >= 0
  }
  r1.ext.assign(2 * static_cast<size_t>(k), -1);

  // strictly feasible start: slacks above every violation at the center
  Eigen::VectorXd start = Eigen::VectorXd::Zero(n + k);
  if (center != nullptr) start.head(n) = *center;
  for (int i = 0; i < k; ++i) {
    const double resid = rows.coeff.row(i).head(n).dot(start.head(n)) +
                         rows.offset[i];
    start[n + i] = std::max(0.0, -resid) + 1.0;
  }
  return solve_scaled(h1, f1, r1, Eigen::VectorXd(), Eigen::VectorXd(),
                      /*allow_phase1=*/false, &start);
}

QPSolution solve_scaled(const Eigen::MatrixXd& h, const Eigen::VectorXd& f,
                        const UnifiedRows& rows, const Eigen::VectorXd& lb,
                        const Eigen::VectorXd& ub, bool allow_phase1,
                        const Eigen::VectorXd* start) {
  const int n = static_cast<int>(f.size());
  QPSolution sol;

  Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() != Eigen::Success) {
    sol.status = QPStatus::degenerate;
    return sol;
  }
  Eigen::VectorXd z_uncon = llt.solve(-f);

  // the unconstrained minimizer projected to the box, unless the caller
  // supplied a known feasible start
  Eigen::VectorXd z0 = z_uncon;
  if (lb.size() == n) z0 = z0.cwiseMax(lb).cwiseMin(ub);
  if (start != nullptr) z0 = *start;

  double start_violation = 0.0;
  for (int i = 0; i < rows.coeff.rows(); ++i)
    start_violation = std::max(
        start_violation, -(rows.coeff.row(i).dot(z0) + rows.offset[i]));

  if (start_violation > kViolationTol) {
    if (!allow_phase1) {
      // phase-1 problems arrive with a strictly feasible start; landing
      // here means that start was wrong, give up
      sol.status = QPStatus::degenerate;
      return sol;
    }
    QPSolution p1 = run_phase1(rows, n, nullptr);
    sol.iterations += p1.iterations;
    if (p1.status != QPStatus::optimal) {
      sol.status = QPStatus::degenerate;
      return sol;
    }
    Eigen::VectorXd zf = p1.z.head(n);
    auto worst = [&](const Eigen::VectorXd& z) {
      return rows.coeff.rows() == 0
                 ? 0.0
                 : (-(rows.coeff * z + rows.offset)).maxCoeff();
    };
    double viol = std::max(0.0, worst(zf));
    // in the ambiguous band, polish by re-centering the regularizer
    for (int polish = 0; polish < 3 && viol > kViolationTol && viol < 1e-3;
         ++polish) {
      QPSolution p2 = run_phase1(rows, n, &zf);
      sol.iterations += p2.iterations;
      if (p2.status != QPStatus::optimal) break;
      Eigen::VectorXd z2 = p2.z.head(n);
      const double v2 = std::max(0.0, worst(z2));
      if (v2 >= viol) break;
      zf = z2;
      viol = v2;
    }
    if (viol > kSlackTol) {
      sol.status = QPStatus::infeasible;
      sol.z = zf;
      Eigen::VectorXd violation =
          (-(rows.coeff * zf + rows.offset)).cwiseMax(0.0);
      for (int i = 0; i < violation.size(); ++i)
        if (violation[i] > kSlackTol && rows.ext[static_cast<size_t>(i)] >= 0)
          sol.infeasible_rows.push_back(rows.ext[static_cast<size_t>(i)]);
      std::sort(sol.infeasible_rows.begin(), sol.infeasible_rows.end());
      return sol;
    }
    z0 = zf;
  }

  std::vector<int> warm = tight_independent_rows(rows, z0, 1e-6);
  const int cap = 40 + 8 * static_cast<int>(rows.coeff.rows());
  CoreResult core = primal_loop(h, f, z_uncon, rows, z0, warm, cap);
  sol.iterations += core.iterations;
  if (!core.optimal) {
    sol.status = QPStatus::degenerate;
    sol.z = core.z.size() ? core.z : z0;
    return sol;
  }

  sol.z = core.z;
  sol.status = QPStatus::optimal;
  sol.objective = 0.5 * core.z.dot(h * core.z) + f.dot(core.z);
  for (int w : core.working) {
    const int ext = rows.ext[static_cast<size_t>(w)];
    if (ext >= 0) sol.active.push_back(ext);
  }
  std::sort(sol.active.begin(), sol.active.end());
  fill_kkt(sol, h, f, rows, core);
  return sol;
}

}  // namespace

void QPProblem::add_row(const ConstraintRow& row) {
  add_row(row.coeff, row.rhs, row.tag);
}

void QPProblem::add_row(const Eigen::RowVectorXd& coeff, double rhs,
                        std::string tag) {
  const int m = rows();
  row_coeff.conservativeResize(m + 1, coeff.size());
  row_coeff.row(m) = coeff;
  row_offset.conservativeResize(m + 1);
  row_offset[m] = rhs;
  row_tags.push_back(std::move(tag));
}

const char* to_string(QPStatus s) {
  switch (s) {
    case QPStatus::optimal:
      return "optimal";
    case QPStatus::infeasible:
      return "infeasible";
    case QPStatus::degenerate:
      return "degenerate";
  }
  return "unknown";
}

QPProblem assemble_step_qp(const std::vector<ConstraintRow>& hard_rows,
                           const std::optional<ClfRow>& clf,
                           const Eigen::VectorXd& lower_u,
                           const Eigen::VectorXd& upper_u,
                           double slack_weight,
                           const Eigen::VectorXd& control_scale) {
  const int nu = static_cast<int>(lower_u.size());
  if (upper_u.size() != nu)
    throw std::invalid_argument("assemble: control bound sizes differ");
  if (control_scale.size() != 0 && control_scale.size() != nu)
    throw std::invalid_argument("assemble: control scale size mismatch");
  if (!(slack_weight > 0.0))
    throw std::invalid_argument("assemble: slack weight must be positive");
  const int nz = nu + 1;  // controls plus the CLF slack

  QPProblem p;
  p.hessian = Eigen::MatrixXd::Zero(nz, nz);
  for (int j = 0; j < nu; ++j) {
    const double s = control_scale.size() ? control_scale[j] : 1.0;
    if (!(s > 0.0))
      throw std::invalid_argument("assemble: control scales must be positive");
    p.hessian(j, j) = 2.0 / (s * s);
  }
  p.hessian(nu, nu) = 2.0 * slack_weight;
  p.linear = Eigen::VectorXd::Zero(nz);

  for (const ConstraintRow& row : hard_rows) {
    if (row.coeff.size() != nu)
      throw std::invalid_argument("assemble: row width mismatch");
    if (!row.finite())
      throw std::invalid_argument("assemble: non-finite row");
    Eigen::RowVectorXd padded = Eigen::RowVectorXd::Zero(nz);
    padded.head(nu) = row.coeff;
    p.add_row(padded, row.rhs, row.tag);
  }
  if (clf.has_value()) {
    if (clf->u_coeff.size() != nu)
      throw std::invalid_argument("assemble: clf row width mismatch");
    // lhs <= 0 orientation becomes a >= row by negation
    Eigen::RowVectorXd padded = Eigen::RowVectorXd::Zero(nz);
    padded.head(nu) = -clf->u_coeff;
    padded[nu] = -clf->delta_coeff;
    p.add_row(padded, -clf->rhs, "clf");
  }

  p.lower.resize(nz);
  p.upper.resize(nz);
  p.lower.head(nu) = lower_u;
  p.upper.head(nu) = upper_u;
  p.lower[nu] = 0.0;
  p.upper[nu] = std::numeric_limits<double>::infinity();
  return p;
}

QPSolution solve(const QPProblem& problem) {
  const int n = problem.vars();
  if (problem.hessian.rows() != n || problem.hessian.cols() != n ||
      problem.linear.size() != n)
    throw std::invalid_argument("qp: cost dimensions inconsistent");
  if (problem.rows() > 0 && problem.row_coeff.cols() != n)
    throw std::invalid_argument("qp: row width does not match variables");
  if (problem.lower.size() != problem.upper.size() ||
      (problem.lower.size() != 0 && problem.lower.size() != n))
    throw std::invalid_argument("qp: box dimensions inconsistent");

  Eigen::MatrixXd h = 0.5 * (problem.hessian + problem.hessian.transpose());
  bool regularized = false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
  if (eig.eigenvalues().minCoeff() < 1e-10) {
    if (eig.eigenvalues().minCoeff() < -1e-8)
      throw std::invalid_argument("qp: hessian is not positive definite");
    h += 1e-9 * Eigen::MatrixXd::Identity(n, n);
    regularized = true;
  }

  Eigen::MatrixXd a =
      problem.rows() > 0 ? problem.row_coeff : Eigen::MatrixXd::Zero(0, n);
  Eigen::VectorXd b =
      problem.rows() > 0 ? problem.row_offset : Eigen::VectorXd::Zero(0);
  UnifiedRows rows = unify(a, b, problem.lower, problem.upper, problem.rows());

  QPSolution sol = solve_scaled(h, problem.linear, rows, problem.lower,
                                problem.upper, /*allow_phase1=*/true);
  sol.regularized = regularized;
  return sol;
}

}  // namespace hocbf
