#include "simplex_lp.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "common.hpp"

namespace wlim {

namespace {

constexpr double kPivotTol = 1e-11;

// Primal simplex on a standard-form tableau with Bland's rule; assumes the
// initial basis columns form an identity.
bool run_simplex(Eigen::MatrixXd& tableau, std::vector<int>& basis, int cols) {
    const int m = static_cast<int>(tableau.rows()) - 1;
    for (int iter = 0; iter < 20000; ++iter) {
        int pivot_col = -1;
        for (int j = 0; j < cols; ++j) {
            if (tableau(m, j) > kPivotTol) {  // reduced cost row holds c - z
                pivot_col = j;
                break;  // Bland: smallest index
            }
        }
        if (pivot_col < 0) return true;  // optimal
        int pivot_row = -1;
        double best_ratio = 0.0;
        for (int i = 0; i < m; ++i) {
            double a = tableau(i, pivot_col);
            if (a > kPivotTol) {
                double ratio = tableau(i, cols) / a;
                if (pivot_row < 0 || ratio < best_ratio - 1e-15 ||
                    (std::abs(ratio - best_ratio) <= 1e-15 && basis[i] < basis[pivot_row])) {
                    pivot_row = i;
                    best_ratio = ratio;
                }
            }
        }
        if (pivot_row < 0) return false;  // unbounded
        double pivot = tableau(pivot_row, pivot_col);
        tableau.row(pivot_row) /= pivot;
        for (int i = 0; i <= m; ++i) {
            if (i == pivot_row) continue;
            double factor = tableau(i, pivot_col);
            if (factor != 0.0) tableau.row(i) -= factor * tableau.row(pivot_row);
        }
        basis[pivot_row] = pivot_col;
    }
    fail_numeric("simplex did not terminate");
}

}  // namespace

LpResult solve_lp_max(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    if (b.size() != m || c.size() != n) fail_invalid("LP dimensions disagree");

    // Phase 1 with one artificial per row (rows flipped so b >= 0).
    Eigen::MatrixXd A1 = A;
    Eigen::VectorXd b1 = b;
    for (int i = 0; i < m; ++i) {
        if (b1(i) < 0.0) {
            A1.row(i) *= -1.0;
            b1(i) *= -1.0;
        }
    }
    int total = n + m;
    Eigen::MatrixXd tab = Eigen::MatrixXd::Zero(m + 1, total + 1);
    tab.topLeftCorner(m, n) = A1;
    tab.block(0, n, m, m) = Eigen::MatrixXd::Identity(m, m);
    tab.col(total).head(m) = b1;
    std::vector<int> basis(m);
    // Phase-1 objective: maximize -(sum of artificials); reduced costs start
    // as the column sums of A1.
    for (int i = 0; i < m; ++i) basis[i] = n + i;
    for (int j = 0; j < n; ++j) tab(m, j) = A1.col(j).sum();
    tab(m, total) = b1.sum();

    LpResult result;
    if (!run_simplex(tab, basis, total)) return result;
    if (tab(m, total) > 1e-8) return result;  // artificials remain: infeasible

    // Drive any residual artificial out of the basis when possible.
    for (int i = 0; i < m; ++i) {
        if (basis[i] >= n) {
            int replacement = -1;
            for (int j = 0; j < n; ++j) {
                if (std::abs(tab(i, j)) > kPivotTol) {
                    replacement = j;
                    break;
                }
            }
            if (replacement >= 0) {
                double pivot = tab(i, replacement);
                tab.row(i) /= pivot;
                for (int r = 0; r <= m; ++r) {
                    if (r == i) continue;
                    double factor = tab(r, replacement);
                    if (factor != 0.0) tab.row(r) -= factor * tab.row(i);
                }
                basis[i] = replacement;
            }
        }
    }

    // Phase 2 on the original objective, artificial columns frozen.
    Eigen::MatrixXd tab2 = Eigen::MatrixXd::Zero(m + 1, n + 1);
    tab2.topLeftCorner(m, n) = tab.topLeftCorner(m, n);
    tab2.col(n).head(m) = tab.col(total).head(m);
    for (int j = 0; j < n; ++j) tab2(m, j) = c(j);
    tab2(m, n) = 0.0;
    // Reduce the cost row against the current basis.
    for (int i = 0; i < m; ++i) {
        if (basis[i] < n && std::abs(tab2(m, basis[i])) > 0.0) {
            tab2.row(m) -= tab2(m, basis[i]) * tab2.row(i);
        }
    }
    if (!run_simplex(tab2, basis, n)) {
        // Unbounded above; report feasibility with an infinite objective.
        result.feasible = true;
        result.objective = std::numeric_limits<double>::infinity();
        return result;
    }

    result.feasible = true;
    result.x = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < m; ++i)
        if (basis[i] < n) result.x(basis[i]) = tab2(i, n);
    result.objective = c.dot(result.x);
    return result;
}

double hull_interior_margin(const Eigen::MatrixXd& atoms, const Eigen::VectorXd& target) {
    const int m = static_cast<int>(atoms.rows());
    const int d = static_cast<int>(atoms.cols());
    if (target.size() != d) fail_invalid("hull margin: dimension mismatch");
    // Variables (q_1..q_m, e): sum_i q_i atom_i = target, sum q = 1,
    // q_i - e >= 0 via slack substitution q_i = s_i + e with s_i >= 0:
    //   sum_i (s_i + e) atom_i = target, sum_i s_i + m e = 1, maximize e.
    Eigen::MatrixXd A(d + 1, m + 1);
    Eigen::VectorXd b(d + 1), c = Eigen::VectorXd::Zero(m + 1);
    A.topLeftCorner(d, m) = atoms.transpose();
    A.block(0, m, d, 1) = atoms.colwise().sum().transpose();
    A.row(d).head(m).setOnes();
    A(d, m) = static_cast<double>(m);
    b.head(d) = target;
    b(d) = 1.0;
    c(m) = 1.0;
    auto lp = solve_lp_max(A, b, c);
    if (!lp.feasible) return -1.0;
    return lp.objective;
}

double hull_intersection_margin(const Eigen::MatrixXd& atoms0, const Eigen::MatrixXd& atoms1) {
    const int m0 = static_cast<int>(atoms0.rows());
    const int m1 = static_cast<int>(atoms1.rows());
    const int d = static_cast<int>(atoms0.cols());
    if (atoms1.cols() != d) fail_invalid("hull intersection: dimension mismatch");
    // Variables (s0, s1, e) with q = s0 + e, r = s1 + e:
    //   A0'(s0 + e) - A1'(s1 + e) = 0, sum s0 + m0 e = 1, sum s1 + m1 e = 1.
    int n = m0 + m1 + 1;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d + 2, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(d + 2), c = Eigen::VectorXd::Zero(n);
    A.topLeftCorner(d, m0) = atoms0.transpose();
    A.block(0, m0, d, m1) = -atoms1.transpose();
    A.block(0, m0 + m1, d, 1) =
        (atoms0.colwise().sum() - atoms1.colwise().sum()).transpose();
    A.row(d).head(m0).setOnes();
    A(d, m0 + m1) = static_cast<double>(m0);
    A.row(d + 1).segment(m0, m1).setOnes();
    A(d + 1, m0 + m1) = static_cast<double>(m1);
    b(d) = 1.0;
    b(d + 1) = 1.0;
    c(m0 + m1) = 1.0;
    auto lp = solve_lp_max(A, b, c);
    if (!lp.feasible) return -1.0;
    return lp.objective;
}

}  // namespace wlim
