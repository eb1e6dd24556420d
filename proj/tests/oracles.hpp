// Independent numerical oracles used only by tests. These deliberately avoid
// the closed forms and solver paths they are used to check.
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace oracles {

// Adaptive Simpson quadrature on [a, b]. The per-level tolerance never drops
// below the round-off floor of the running estimates, so the recursion
// terminates even when the requested accuracy is unreachable.
inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fm, double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    double floor_tol = 32.0 * std::numeric_limits<double>::epsilon() *
                       (std::abs(left) + std::abs(right) + 1e-300);
    if (depth <= 0 || std::abs(delta) <= std::max(15.0 * tol, floor_tol))
        return left + right + delta / 15.0;
    double child_tol = std::max(0.5 * tol, floor_tol);
    return simpson_rec(f, a, m, fa, flm, fm, left, child_tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, child_tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int depth = 30) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

// Central difference with a scale-aware step.
inline double central_diff(const std::function<double(double)>& f, double x,
                           double step_scale = 1.4901161193847656e-08 /* sqrt(eps) */) {
    double h = step_scale * std::max(1.0, std::abs(x));
    volatile double xp = x + h, xm = x - h;  // kill fused rounding of the step
    return (f(xp) - f(xm)) / (xp - xm);
}

// Bisection to near machine precision; requires a sign change on [lo, hi].
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double tol = 1e-14, int max_iter = 200) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) throw std::runtime_error("bisect: no sign change");
    for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Minimize a smooth convex function over the polytope {q >= 0, A q = b} by
// damped Newton in reduced coordinates (a nullspace parametrization of the
// equality constraints), with step halving to stay strictly inside q > 0.
// Used as the brute-force route for divergence minimizations over one or two
// probability simplices. Returns the optimal q.
inline Eigen::VectorXd minimize_on_polytope(const std::function<double(const Eigen::VectorXd&)>& f,
                                            const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad,
                                            const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                            const Eigen::VectorXd& q0, int max_iter = 500) {
    const double kFeasTol = 1e-9;
    if (((A * q0 - b).cwiseAbs().maxCoeff()) > kFeasTol)
        throw std::runtime_error("minimize_on_polytope: infeasible start");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > 1e-12 * svd.singularValues()(0)) ++rank;
    Eigen::MatrixXd Nspace = svd.matrixV().rightCols(A.cols() - rank);
    if (Nspace.cols() == 0) return q0;

    Eigen::VectorXd q = q0;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd g = Nspace.transpose() * grad(q);
        if (g.lpNorm<Eigen::Infinity>() < 1e-12) break;
        // Numerical Hessian in reduced coordinates.
        int m = static_cast<int>(Nspace.cols());
        Eigen::MatrixXd H(m, m);
        double h = 1e-6;
        for (int j = 0; j < m; ++j) {
            Eigen::VectorXd qp = q + h * Nspace.col(j);
            Eigen::VectorXd qm = q - h * Nspace.col(j);
            qp = qp.cwiseMax(1e-300);
            qm = qm.cwiseMax(1e-300);
            H.col(j) = Nspace.transpose() * (grad(qp) - grad(qm)) / (2.0 * h);
        }
        H = 0.5 * (H + H.transpose());
        Eigen::VectorXd step = -H.ldlt().solve(g);
        if (!step.allFinite() || step.dot(g) >= 0.0) step = -g;
        double t = 1.0;
        double f0 = f(q);
        bool moved = false;
        for (int ls = 0; ls < 80; ++ls, t *= 0.5) {
            Eigen::VectorXd cand = q + t * (Nspace * step);
            if (cand.minCoeff() <= 0.0) continue;
            if (f(cand) < f0) {
                q = cand;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    return q;
}

// Mann-Whitney statistic with half credit for ties, as a fraction of pairs.
inline double mann_whitney(const std::vector<double>& s0, const std::vector<double>& s1) {
    double count = 0.0;
    for (double a : s1)
        for (double b : s0) {
            if (a > b)
                count += 1.0;
            else if (a == b)
                count += 0.5;
        }
    return count / (static_cast<double>(s0.size()) * static_cast<double>(s1.size()));
}

}  // namespace oracles
