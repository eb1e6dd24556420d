// Direct solvers for the infinite-imbalance limit coefficients, built on
// exponential tilting of a cumulant generating function, plus the
// information-geometric identities used as verification oracles.
#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "common.hpp"
#include "dataset.hpp"

namespace wlim {

struct TiltedMoments {
    Eigen::VectorXd theta;
    double log_normalizer = 0.0;   // psi(theta)
    Eigen::VectorXd mean;          // grad psi
    Eigen::MatrixXd covariance;    // hess psi
    double effective_sample_size = 0.0;  // for sample/discrete sources
    bool ess_warning = false;            // tilt too extreme for the sample
};

struct DiscreteDistribution {
    Eigen::MatrixXd atoms;  // one support point per row
    Eigen::VectorXd probs;

    static DiscreteDistribution uniform_on(const Eigen::MatrixXd& rows);
    void validate() const;
};

struct GaussianSource {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
};

// A distribution we can tilt: empirical rows, a Gaussian in closed form, or
// an explicit discrete distribution.
class TiltSource {
public:
    TiltSource(Eigen::MatrixXd sample);             // NOLINT: implicit by design
    TiltSource(GaussianSource gaussian);            // NOLINT
    TiltSource(DiscreteDistribution discrete);      // NOLINT

    Eigen::Index dim() const;
    bool is_gaussian() const { return std::holds_alternative<GaussianSource>(source_); }

    double psi(const Eigen::VectorXd& theta) const;
    TiltedMoments tilt(const Eigen::VectorXd& theta) const;
    Eigen::VectorXd untilted_mean() const;

    const GaussianSource* gaussian() const { return std::get_if<GaussianSource>(&source_); }
    const DiscreteDistribution* discrete() const { return std::get_if<DiscreteDistribution>(&source_); }

private:
    std::variant<DiscreteDistribution, GaussianSource> source_;
};

TiltedMoments tilted_mean(const TiltSource& source, const Eigen::VectorXd& theta);

struct LimitResult {
    double lambda = 0.0;
    Eigen::VectorXd beta_star;
    double residual = 0.0;  // inf-norm gap between the two tilted means
    int solver_iterations = 0;
    std::vector<std::string> warnings;
};

// Solve the tilt-balance equation: the majority tilted by (1-lambda) beta and
// the minority tilted by -lambda beta must share a mean. lambda = 0 reduces
// to matching the majority tilt to the plain minority mean.
LimitResult solve_limit(double lambda, const TiltSource& majority, const Eigen::MatrixXd& minority);

// Closed form when both classes are Gaussian: blend the covariances by
// lambda and solve the linear system against the mean gap. Accepts
// lambda in [0, 1]; 1 is the pure minority-covariance endpoint.
Eigen::VectorXd solve_limit_gaussian(double lambda, const Eigen::VectorXd& mu0,
                                     const Eigen::MatrixXd& sigma0, const Eigen::VectorXd& mu1,
                                     const Eigen::MatrixXd& sigma1);

// Gaussian majority in closed form against an empirical minority.
LimitResult solve_limit_gaussian_mixed(double lambda, const Eigen::VectorXd& mu0,
                                       const Eigen::MatrixXd& sigma0, const Eigen::MatrixXd& minority);

struct KlProjection {
    DiscreteDistribution projected;
    Eigen::VectorXd beta;
    double divergence = 0.0;
};

// I-projection of a discrete distribution onto the set of distributions with
// the given mean; the minimizer is the exponential tilt matching that mean.
KlProjection kl_project(const DiscreteDistribution& f0, const Eigen::VectorXd& target_mean);

struct JointTilt {
    DiscreteDistribution g0, g1;
    Eigen::VectorXd beta_star;
    Eigen::VectorXd common_mean;
    double objective = 0.0;  // lambda D(G0||F0) + (1-lambda) D(G1||F1)
    double beta0_coefficient = 0.0;  // tilt applied to F0 is beta0 = (1-lambda) beta*
    double beta1_coefficient = 0.0;  // tilt applied to F1 is beta1 = -lambda beta*
};

// Minimize lambda D(G0||F0) + (1-lambda) D(G1||F1) over pairs with a common
// mean; solved by tilting both sources to the balance point.
JointTilt joint_tilt(double lambda, const DiscreteDistribution& f0, const DiscreteDistribution& f1);

struct RenyiCheck {
    double lhs = 0.0;  // direct power-sum of the mixed masses
    double rhs = 0.0;  // via the single-distribution divergence minimization
};

// Two routes to the minimal balanced loss over unrestricted discriminant
// functions on a common discrete support.
RenyiCheck renyi_identity_check(double lambda, double pi1, const DiscreteDistribution& f0,
                                const DiscreteDistribution& f1);

double kl_divergence(const DiscreteDistribution& g, const DiscreteDistribution& f);

}  // namespace wlim
