#ifndef HOCBF_QP_HPP
#define HOCBF_QP_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "hocbf/barrier.hpp"
#include "hocbf/clf.hpp"

namespace hocbf {

// Strictly convex quadratic program
//   minimize 1/2 z' H z + f' z
//   subject to  A z + b >= 0  (rows)  and  lb <= z <= ub (optional box).
struct QPProblem {
  Eigen::MatrixXd hessian;
  Eigen::VectorXd linear;
  Eigen::MatrixXd row_coeff;   // one constraint per row
  Eigen::VectorXd row_offset;
  Eigen::VectorXd lower;       // empty or size vars(); +-inf allowed
  Eigen::VectorXd upper;
  std::vector<std::string> row_tags;

  int vars() const { return static_cast<int>(hessian.rows()); }
  int rows() const { return static_cast<int>(row_coeff.rows()); }
  void add_row(const ConstraintRow& row);
  void add_row(const Eigen::RowVectorXd& coeff, double rhs,
               std::string tag = {});
};

enum class QPStatus { optimal, infeasible, degenerate };

const char* to_string(QPStatus s);

struct QPSolution {
  Eigen::VectorXd z;
  QPStatus status = QPStatus::degenerate;
  std::vector<int> active;  // indices into rows(); box entries get indices
                            // rows() + 2*i (lower) and rows() + 2*i + 1 (upper)
  double objective = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  double stationarity = std::numeric_limits<double>::infinity();
  double feasibility = std::numeric_limits<double>::infinity();
  double complementarity = std::numeric_limits<double>::infinity();
  std::vector<int> infeasible_rows;  // heuristic blame set when infeasible
  bool regularized = false;
};

// Dense primal active-set solve. Starts from the unconstrained minimizer
// projected to the box, repeatedly adds the most violated row and drops
// rows with negative multipliers; infeasibility is certified through a
// slack phase-1 subproblem.
QPSolution solve(const QPProblem& problem);

/* One controller step as a QP over z = (u..., delta): quadratic control
 * effort plus the weighted slack, barrier and limit rows hard, the CLF row
 * relaxed through the slack. An optional per-control scale divides each
 * effort term, which keeps mixed-unit control vectors (forces next to
 * angular accelerations) comparable inside one cost. */
QPProblem assemble_step_qp(const std::vector<ConstraintRow>& hard_rows,
                           const std::optional<ClfRow>& clf,
                           const Eigen::VectorXd& lower_u,
                           const Eigen::VectorXd& upper_u,
                           double slack_weight,
                           const Eigen::VectorXd& control_scale =
                               Eigen::VectorXd());

}  // namespace hocbf

#endif  // HOCBF_QP_HPP
