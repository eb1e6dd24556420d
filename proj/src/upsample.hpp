// Sampling from the worst-case alternative (the exponential tilt of the
// majority law), the first-order equivalence check between infinite
// upsampling and the limit coefficients, and a minimal SMOTE baseline.
#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "limits.hpp"
#include "weights.hpp"

namespace wlim {

// Draws from the majority law tilted by beta_star. Gaussian sources tilt in
// closed form (mean shifts by covariance * beta); sample sources are
// importance-resampled with weights proportional to exp(beta' x).
Eigen::MatrixXd sample_fstar(const TiltSource& majority, const Eigen::VectorXd& beta_star,
                             Eigen::Index m, std::uint64_t seed);

struct UpsampleCheck {
    Eigen::VectorXd beta_star;
    double alpha_hat = 0.0;     // log(pi1/pi0) - psi(beta_star)
    double psi_star = 0.0;      // psi(beta_star)
    double foc_residual = 0.0;  // norm of the stationarity gap at (alpha_hat, beta_star)
    double pi1 = 0.0;
    double mc_standard_error = 0.0;  // 0 when evaluated by quadrature
};

// Verifies that upsampling the minority to the tilted law reproduces the
// limit coefficients: solves the limit at lambda = 0, forms the matched
// intercept, and evaluates the population first-order condition of the
// mixture loss at that point. Gaussian majorities of dimension <= 3 use
// Gauss-Hermite quadrature; anything else falls back to Monte Carlo with a
// reported standard error.
UpsampleCheck upsampling_equivalence_check(const WeightFunction& weight, const TiltSource& majority,
                                           const Eigen::VectorXd& minority_mean, double pi1,
                                           Eigen::Index mc_samples = 200000, std::uint64_t seed = 1);

// Classic synthetic-minority interpolation: each synthetic row is
// x + u (x' - x) with x' one of the k nearest neighbors of x.
Eigen::MatrixXd smote(const Eigen::MatrixXd& minority, int k, Eigen::Index m, std::uint64_t seed);

}  // namespace wlim
