#include "limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "simplex_lp.hpp"

namespace wlim {

namespace {

constexpr double kResidualTol = 1e-8;
constexpr int kMaxIterations = 200;
constexpr double kHullTol = 1e-10;
constexpr double kTiltRiskBound = 30.0;  // |theta' x| beyond this is extrapolation risk
constexpr double kMinEss = 10.0;

}  // namespace

DiscreteDistribution DiscreteDistribution::uniform_on(const Eigen::MatrixXd& rows) {
    DiscreteDistribution d;
    d.atoms = rows;
    d.probs = Eigen::VectorXd::Constant(rows.rows(), 1.0 / static_cast<double>(rows.rows()));
    return d;
}

void DiscreteDistribution::validate() const {
    if (atoms.rows() == 0) fail_invalid("discrete distribution needs at least one atom");
    if (probs.size() != atoms.rows()) fail_invalid("atom/probability count mismatch");
    if (probs.minCoeff() < 0.0) fail_invalid("probabilities must be nonnegative");
    if (std::abs(probs.sum() - 1.0) > 1e-9) fail_invalid("probabilities must sum to 1");
}

TiltSource::TiltSource(Eigen::MatrixXd sample)
    : source_(DiscreteDistribution::uniform_on(sample)) {
    if (sample.rows() == 0) fail_invalid("empty sample source");
}

TiltSource::TiltSource(GaussianSource gaussian) : source_(std::move(gaussian)) {
    const auto& g = std::get<GaussianSource>(source_);
    if (g.covariance.rows() != g.mean.size() || g.covariance.cols() != g.mean.size())
        fail_invalid("Gaussian source dimensions disagree");
    Eigen::LLT<Eigen::MatrixXd> llt(g.covariance);
    if (llt.info() != Eigen::Success) fail_invalid("Gaussian covariance must be positive definite");
}

TiltSource::TiltSource(DiscreteDistribution discrete) : source_(std::move(discrete)) {
    std::get<DiscreteDistribution>(source_).validate();
}

Eigen::Index TiltSource::dim() const {
    if (auto* g = std::get_if<GaussianSource>(&source_)) return g->mean.size();
    return std::get<DiscreteDistribution>(source_).atoms.cols();
}

double TiltSource::psi(const Eigen::VectorXd& theta) const {
    if (auto* g = std::get_if<GaussianSource>(&source_))
        return theta.dot(g->mean) + 0.5 * theta.dot(g->covariance * theta);
    const auto& d = std::get<DiscreteDistribution>(source_);
    Eigen::VectorXd e = d.atoms * theta;
    double shift = e.maxCoeff();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < e.size(); ++i) acc += d.probs(i) * std::exp(e(i) - shift);
    return shift + std::log(acc);
}

TiltedMoments TiltSource::tilt(const Eigen::VectorXd& theta) const {
    TiltedMoments out;
    out.theta = theta;
    if (auto* g = std::get_if<GaussianSource>(&source_)) {
        out.log_normalizer = psi(theta);
        out.mean = g->mean + g->covariance * theta;
        out.covariance = g->covariance;
        out.effective_sample_size = std::numeric_limits<double>::infinity();
        return out;
    }
    const auto& d = std::get<DiscreteDistribution>(source_);
    Eigen::VectorXd e = d.atoms * theta;
    double shift = e.maxCoeff();
    Eigen::VectorXd w(e.size());
    double total = 0.0;
    for (Eigen::Index i = 0; i < e.size(); ++i) {
        w(i) = d.probs(i) * std::exp(e(i) - shift);
        total += w(i);
    }
    if (!(total > 0.0) || !std::isfinite(total)) fail_numeric("tilt weights degenerate");
    w /= total;
    out.log_normalizer = shift + std::log(total);
    out.mean = d.atoms.transpose() * w;
    Eigen::MatrixXd centered = d.atoms.rowwise() - out.mean.transpose();
    out.covariance = centered.transpose() * (w.asDiagonal() * centered);
    out.effective_sample_size = 1.0 / w.squaredNorm();
    out.ess_warning = out.effective_sample_size < kMinEss && d.atoms.rows() >= kMinEss;
    return out;
}

Eigen::VectorXd TiltSource::untilted_mean() const {
    return tilt(Eigen::VectorXd::Zero(dim())).mean;
}

TiltedMoments tilted_mean(const TiltSource& source, const Eigen::VectorXd& theta) {
    if (theta.size() != source.dim()) fail_invalid("tilt parameter dimension mismatch");
    return source.tilt(theta);
}

namespace {

// Damped Newton on the strictly convex functional whose stationary point is
// the tilt-balance equation:
//   g(beta) = psi0((1-lambda) beta)/(1-lambda) + psi1(-lambda beta)/lambda
// with the lambda = 0 limit g(beta) = psi0(beta) - beta' mean1. Its gradient
// is the gap between the two tilted means.
struct BalanceProblem {
    const TiltSource& majority;
    const TiltSource* minority = nullptr;  // null for lambda = 0 against a plain mean
    Eigen::VectorXd minority_mean;         // used when minority == nullptr
    double lambda = 0.0;
    double max_point_norm = 0.0;  // largest atom norm across sources; 0 for Gaussian

    double value(const Eigen::VectorXd& beta) const {
        if (lambda == 0.0) return majority.psi(beta) - beta.dot(minority_mean);
        return majority.psi((1.0 - lambda) * beta) / (1.0 - lambda) +
               minority->psi(-lambda * beta) / lambda;
    }
    // Returns (gradient, Hessian, majority moments, minority moments).
    void derivatives(const Eigen::VectorXd& beta, Eigen::VectorXd& grad, Eigen::MatrixXd& hess,
                     TiltedMoments& m0, TiltedMoments* m1_out) const {
        m0 = majority.tilt((1.0 - lambda) * beta);
        if (lambda == 0.0) {
            grad = m0.mean - minority_mean;
            hess = m0.covariance;
            return;
        }
        TiltedMoments m1 = minority->tilt(-lambda * beta);
        grad = m0.mean - m1.mean;
        hess = (1.0 - lambda) * m0.covariance + lambda * m1.covariance;
        if (m1_out) *m1_out = m1;
    }
};

LimitResult solve_balance(const BalanceProblem& problem, Eigen::Index d) {
    LimitResult result;
    result.lambda = problem.lambda;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
    double value = problem.value(beta);
    bool tilt_risk = false;
    bool ess_warned = false;

    for (int iter = 0; iter < kMaxIterations; ++iter) {
        Eigen::VectorXd grad;
        Eigen::MatrixXd hess;
        TiltedMoments m0;
        TiltedMoments m1;
        problem.derivatives(beta, grad, hess, m0, &m1);
        result.residual = grad.lpNorm<Eigen::Infinity>();
        result.solver_iterations = iter;
        if (m0.ess_warning || m1.ess_warning) ess_warned = true;
        if (result.residual <= kResidualTol) {
            result.beta_star = beta;
            if (tilt_risk)
                result.warnings.push_back(
                    "tilt exponents exceeded 30; the sample cumulant extrapolates its data");
            if (ess_warned)
                result.warnings.push_back("effective sample size of tilt weights fell below 10");
            return result;
        }
        Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
        bool singular = ldlt.info() != Eigen::Success;
        if (!singular) {
            Eigen::VectorXd diag = ldlt.vectorD();
            double dmax = diag.maxCoeff();
            singular = !(dmax > 0.0) || !(diag.minCoeff() > 1e-13 * dmax);
        }
        if (singular) fail_numeric("tilt-balance Hessian is singular: degenerate support");
        Eigen::VectorXd step = -ldlt.solve(grad);
        if (!step.allFinite() || step.norm() > 1e10 * (1.0 + beta.norm() + grad.norm()))
            fail_numeric("tilt-balance Hessian is singular: degenerate support");

        double t = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 70; ++ls, t *= 0.5) {
            Eigen::VectorXd cand = beta + t * step;
            double cand_value = problem.value(cand);
            if (!std::isfinite(cand_value)) continue;
            if (cand_value < value + 1e-4 * t * grad.dot(step)) {
                beta = cand;
                value = cand_value;
                moved = true;
                break;
            }
        }
        if (!moved) {
            // Near the minimum the objective decrement can drop below the
            // round-off floor while the residual is still above tolerance;
            // fall back to contracting the gradient norm directly.
            double gnorm = grad.norm();
            t = 1.0;
            for (int ls = 0; ls < 70; ++ls, t *= 0.5) {
                Eigen::VectorXd cand = beta + t * step;
                double cand_value = problem.value(cand);
                if (!std::isfinite(cand_value)) continue;
                Eigen::VectorXd cand_grad;
                Eigen::MatrixXd cand_hess;
                TiltedMoments cm0, cm1;
                problem.derivatives(cand, cand_grad, cand_hess, cm0, &cm1);
                if (cand_grad.norm() <= (1.0 - 1e-3 * t) * gnorm) {
                    beta = cand;
                    value = cand_value;
                    moved = true;
                    break;
                }
            }
        }
        if (!moved) fail_numeric("tilt-balance line search stalled before reaching tolerance");
        if (beta.lpNorm<Eigen::Infinity>() > 1e8) fail_numeric("tilt-balance diverged");
        tilt_risk = tilt_risk || beta.norm() * problem.max_point_norm > kTiltRiskBound;
    }
    fail_numeric("tilt-balance solver did not converge within the iteration cap");
}

}  // namespace

LimitResult solve_limit(double lambda, const TiltSource& majority, const Eigen::MatrixXd& minority) {
    if (!(lambda >= 0.0 && lambda < 1.0)) fail_invalid("lambda must lie in [0, 1)");
    if (minority.rows() == 0) fail_invalid("minority sample is empty");
    if (minority.cols() != majority.dim()) fail_invalid("minority dimension mismatch");

    BalanceProblem problem{majority, nullptr, Eigen::VectorXd(), lambda, 0.0};
    TiltSource minority_source{minority};
    Eigen::VectorXd xbar = minority.colwise().mean();
    if (lambda == 0.0) {
        problem.minority_mean = xbar;
    } else {
        problem.minority = &minority_source;
        problem.max_point_norm = minority.rowwise().norm().maxCoeff();
    }
    if (const auto* disc = majority.discrete())
        problem.max_point_norm =
            std::max(problem.max_point_norm, disc->atoms.rowwise().norm().maxCoeff());

    LimitResult result = solve_balance(problem, majority.dim());

    // Existence diagnostic: the majority should surround the minority mean.
    if (const auto* disc = majority.discrete()) {
        if (disc->atoms.rows() >= 4) {
            auto diag = check_surrounding(disc->atoms, xbar, 1e-3, 128, 0x5342u);
            if (!diag.pass)
                result.warnings.push_back(
                    "majority sample does not surround the minority mean; limit may not exist");
        }
    }
    return result;
}

Eigen::VectorXd solve_limit_gaussian(double lambda, const Eigen::VectorXd& mu0,
                                     const Eigen::MatrixXd& sigma0, const Eigen::VectorXd& mu1,
                                     const Eigen::MatrixXd& sigma1) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) fail_invalid("lambda must lie in [0, 1]");
    const Eigen::Index d = mu0.size();
    if (mu1.size() != d || sigma0.rows() != d || sigma0.cols() != d || sigma1.rows() != d ||
        sigma1.cols() != d)
        fail_invalid("Gaussian limit: dimensions disagree");
    Eigen::MatrixXd blend = lambda * sigma1 + (1.0 - lambda) * sigma0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(blend);
    if (!lu.isInvertible()) fail_numeric("blended covariance is singular");
    return lu.solve(mu1 - mu0);
}

LimitResult solve_limit_gaussian_mixed(double lambda, const Eigen::VectorXd& mu0,
                                       const Eigen::MatrixXd& sigma0,
                                       const Eigen::MatrixXd& minority) {
    TiltSource majority{GaussianSource{mu0, sigma0}};
    return solve_limit(lambda, majority, minority);
}

double kl_divergence(const DiscreteDistribution& g, const DiscreteDistribution& f) {
    g.validate();
    f.validate();
    if (g.atoms.rows() != f.atoms.rows()) fail_invalid("KL divergence needs a common support");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < g.probs.size(); ++i) {
        if (g.probs(i) == 0.0) continue;
        if (f.probs(i) <= 0.0) return std::numeric_limits<double>::infinity();
        acc += g.probs(i) * std::log(g.probs(i) / f.probs(i));
    }
    return acc;
}

KlProjection kl_project(const DiscreteDistribution& f0, const Eigen::VectorXd& target_mean) {
    f0.validate();
    if (target_mean.size() != f0.atoms.cols()) fail_invalid("target mean dimension mismatch");
    double margin = hull_interior_margin(f0.atoms, target_mean);
    if (margin <= kHullTol)
        fail_invalid("target mean is outside or on the boundary of the support hull");

    // Newton on psi(beta) - beta' target, whose gradient is tilted mean - target.
    TiltSource source{f0};
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(f0.atoms.cols());
    double value = source.psi(beta) - beta.dot(target_mean);
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        TiltedMoments m = source.tilt(beta);
        Eigen::VectorXd grad = m.mean - target_mean;
        if (grad.lpNorm<Eigen::Infinity>() <= 1e-12) break;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(m.covariance);
        if (ldlt.info() != Eigen::Success) fail_numeric("projection Hessian is singular");
        Eigen::VectorXd step = -ldlt.solve(grad);
        double t = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 70; ++ls, t *= 0.5) {
            Eigen::VectorXd cand = beta + t * step;
            double cand_value = source.psi(cand) - cand.dot(target_mean);
            if (std::isfinite(cand_value) && cand_value < value) {
                beta = cand;
                value = cand_value;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }

    TiltedMoments m = source.tilt(beta);
    if ((m.mean - target_mean).lpNorm<Eigen::Infinity>() > 1e-8)
        fail_numeric("projection solver did not reach the target mean");

    KlProjection out;
    out.beta = beta;
    out.projected.atoms = f0.atoms;
    Eigen::VectorXd e = f0.atoms * beta;
    out.projected.probs.resize(f0.probs.size());
    for (Eigen::Index i = 0; i < f0.probs.size(); ++i)
        out.projected.probs(i) = f0.probs(i) * std::exp(e(i) - m.log_normalizer);
    out.projected.probs /= out.projected.probs.sum();
    out.divergence = beta.dot(target_mean) - m.log_normalizer;
    return out;
}

JointTilt joint_tilt(double lambda, const DiscreteDistribution& f0, const DiscreteDistribution& f1) {
    if (!(lambda > 0.0 && lambda < 1.0)) fail_invalid("joint tilt requires lambda in (0, 1)");
    f0.validate();
    f1.validate();
    if (f0.atoms.cols() != f1.atoms.cols()) fail_invalid("joint tilt: dimension mismatch");
    double margin = hull_intersection_margin(f0.atoms, f1.atoms);
    if (margin <= kHullTol)
        fail_invalid("support hulls do not intersect in their interior; no common mean exists");

    TiltSource s0{f0}, s1{f1};
    double max_norm = std::max(f0.atoms.rowwise().norm().maxCoeff(),
                               f1.atoms.rowwise().norm().maxCoeff());
    BalanceProblem problem{s0, &s1, Eigen::VectorXd(), lambda, max_norm};
    LimitResult balance = solve_balance(problem, f0.atoms.cols());

    JointTilt out;
    out.beta_star = balance.beta_star;
    out.beta0_coefficient = 1.0 - lambda;
    out.beta1_coefficient = -lambda;

    auto tilt_probs = [](const DiscreteDistribution& f, const Eigen::VectorXd& theta) {
        TiltSource s{f};
        TiltedMoments m = s.tilt(theta);
        DiscreteDistribution g;
        g.atoms = f.atoms;
        Eigen::VectorXd e = f.atoms * theta;
        g.probs.resize(f.probs.size());
        for (Eigen::Index i = 0; i < f.probs.size(); ++i)
            g.probs(i) = f.probs(i) * std::exp(e(i) - m.log_normalizer);
        g.probs /= g.probs.sum();
        return g;
    };
    Eigen::VectorXd theta0 = (1.0 - lambda) * balance.beta_star;
    Eigen::VectorXd theta1 = -lambda * balance.beta_star;
    out.g0 = tilt_probs(f0, theta0);
    out.g1 = tilt_probs(f1, theta1);
    out.common_mean = s0.tilt(theta0).mean;
    out.objective = lambda * kl_divergence(out.g0, f0) + (1.0 - lambda) * kl_divergence(out.g1, f1);
    return out;
}

RenyiCheck renyi_identity_check(double lambda, double pi1, const DiscreteDistribution& f0,
                                const DiscreteDistribution& f1) {
    if (!(lambda > 0.0 && lambda < 1.0)) fail_invalid("lambda must lie in (0, 1)");
    if (!(pi1 > 0.0 && pi1 < 1.0)) fail_invalid("pi1 must lie in (0, 1)");
    f0.validate();
    f1.validate();
    if (f0.atoms.rows() != f1.atoms.rows() || f0.atoms.cols() != f1.atoms.cols() ||
        (f0.atoms - f1.atoms).cwiseAbs().maxCoeff() > 0.0)
        fail_invalid("identity check requires a common support");
    if (f0.probs.minCoeff() <= 0.0 || f1.probs.minCoeff() <= 0.0)
        fail_invalid("identity check requires strictly positive masses");
    double pi0 = 1.0 - pi1;

    RenyiCheck out;
    for (Eigen::Index i = 0; i < f0.probs.size(); ++i)
        out.lhs += std::pow(pi1 * f1.probs(i), 1.0 - lambda) * std::pow(pi0 * f0.probs(i), lambda);

    // Single-distribution route: minimize lambda D(G||F0) + (1-lambda) D(G||F1)
    // over G on the support. The minimizer is the geometric mixture
    // G* proportional to f0^lambda f1^(1-lambda); evaluate the divergences at
    // G* explicitly rather than reusing the power sum.
    DiscreteDistribution gstar;
    gstar.atoms = f0.atoms;
    gstar.probs.resize(f0.probs.size());
    for (Eigen::Index i = 0; i < f0.probs.size(); ++i)
        gstar.probs(i) = std::pow(f0.probs(i), lambda) * std::pow(f1.probs(i), 1.0 - lambda);
    gstar.probs /= gstar.probs.sum();
    double inf_term = lambda * kl_divergence(gstar, f0) + (1.0 - lambda) * kl_divergence(gstar, f1);
    out.rhs = std::pow(pi1, 1.0 - lambda) * std::pow(pi0, lambda) * std::exp(-inf_term);
    return out;
}

}  // namespace wlim
