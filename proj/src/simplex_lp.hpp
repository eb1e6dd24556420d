// Small dense linear programs for hull-feasibility checks.
#pragma once

#include <Eigen/Dense>

namespace wlim {

struct LpResult {
    bool feasible = false;
    double objective = 0.0;
    Eigen::VectorXd x;
};

// maximize c'x subject to A x = b, x >= 0 (two-phase primal simplex with
// Bland's rule). Intended for the small systems arising from hull checks;
// returns feasible=false when phase 1 cannot reach Ax = b.
LpResult solve_lp_max(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c);

// Largest margin e such that some convex combination q of the atom rows has
// mean `target` with every q_i >= e. Negative/zero margin means the target is
// outside or on the boundary of the hull.
double hull_interior_margin(const Eigen::MatrixXd& atoms, const Eigen::VectorXd& target);

// Largest e such that both atom sets admit convex combinations (all entries
// >= e) with a common mean.
double hull_intersection_margin(const Eigen::MatrixXd& atoms0, const Eigen::MatrixXd& atoms1);

}  // namespace wlim
