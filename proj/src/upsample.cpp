#include "upsample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "rng.hpp"

namespace wlim {

namespace {

// Nodes and weights for 40-point Gauss-Hermite quadrature are generated on
// first use via the Golub-Welsch eigenvalue method.
struct HermiteRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;  // for integrals against the standard normal density
};

const HermiteRule& hermite_rule() {
    static const HermiteRule rule = [] {
        const int n = 40;
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
        for (int i = 1; i < n; ++i) {
            double off = std::sqrt(static_cast<double>(i) / 2.0);
            J(i, i - 1) = off;
            J(i - 1, i) = off;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
        HermiteRule r;
        // Physicists' nodes x with weight pi^-1/2 w; substitute x = z/sqrt(2)
        // to integrate against the N(0,1) density.
        r.nodes = es.eigenvalues() * std::sqrt(2.0);
        r.weights.resize(n);
        for (int i = 0; i < n; ++i) {
            double v0 = es.eigenvectors()(0, i);
            r.weights(i) = v0 * v0;  // already sums to 1 against the normal density
        }
        return r;
    }();
    return rule;
}

}  // namespace

Eigen::MatrixXd sample_fstar(const TiltSource& majority, const Eigen::VectorXd& beta_star,
                             Eigen::Index m, std::uint64_t seed) {
    if (m < 1) fail_invalid("need at least one draw");
    if (beta_star.size() != majority.dim()) fail_invalid("beta dimension mismatch");
    Rng rng(seed);
    const Eigen::Index d = majority.dim();

    if (const auto* g = majority.gaussian()) {
        Eigen::LLT<Eigen::MatrixXd> llt(g->covariance);
        if (llt.info() != Eigen::Success) fail_invalid("covariance must be positive definite");
        Eigen::MatrixXd chol = llt.matrixL();
        Eigen::VectorXd tilted_mean = g->mean + g->covariance * beta_star;
        Eigen::MatrixXd out(m, d);
        Eigen::VectorXd z(d);
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) z(j) = rng.normal();
            out.row(i) = (tilted_mean + chol * z).transpose();
        }
        return out;
    }

    const auto* disc = majority.discrete();
    const Eigen::MatrixXd& atoms = disc->atoms;
    Eigen::VectorXd e = atoms * beta_star;
    double shift = e.maxCoeff();
    Eigen::VectorXd w(e.size());
    for (Eigen::Index i = 0; i < e.size(); ++i) w(i) = disc->probs(i) * std::exp(e(i) - shift);
    double total = w.sum();
    if (!(total > 0.0)) fail_numeric("tilt weights vanished");
    w /= total;
    double ess = 1.0 / w.squaredNorm();
    // The bound only makes sense once the sample could reach it; tiny
    // supports (like a two-point law) are legitimate resampling targets.
    if (atoms.rows() >= 10 && ess < 10.0)
        fail_numeric("effective sample size " + std::to_string(ess) +
                     " is below 10; the tilt is too extreme for this sample");

    // Inverse-CDF resampling by cumulative weight.
    std::vector<double> cumulative(static_cast<std::size_t>(w.size()));
    double acc = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        acc += w(i);
        cumulative[static_cast<std::size_t>(i)] = acc;
    }
    cumulative.back() = 1.0;
    Eigen::MatrixXd out(m, d);
    for (Eigen::Index i = 0; i < m; ++i) {
        double u = rng.uniform();
        auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
        auto idx = static_cast<Eigen::Index>(it - cumulative.begin());
        out.row(i) = atoms.row(idx);
    }
    return out;
}

UpsampleCheck upsampling_equivalence_check(const WeightFunction& weight, const TiltSource& majority,
                                           const Eigen::VectorXd& minority_mean, double pi1,
                                           Eigen::Index mc_samples, std::uint64_t seed) {
    if (!(pi1 > 0.0 && pi1 < 1.0)) fail_invalid("pi1 must lie in (0, 1)");
    auto tail = weight.classify_tail();
    if (tail.family != TailFamily::Subexponential)
        fail_invalid("the upsampling equivalence applies to subexponential weights only");

    Eigen::MatrixXd minority(1, minority_mean.size());
    minority.row(0) = minority_mean.transpose();
    LimitResult limit = solve_limit(0.0, majority, minority);

    UpsampleCheck out;
    out.beta_star = limit.beta_star;
    out.psi_star = majority.psi(limit.beta_star);
    out.pi1 = pi1;
    out.alpha_hat = std::log(pi1 / (1.0 - pi1)) - out.psi_star;

    const double pi0 = 1.0 - pi1;
    const Eigen::Index d = majority.dim();
    const Eigen::VectorXd& beta = limit.beta_star;

    // Stationarity gap of the population mixture loss at (alpha_hat, beta):
    //   E0[ (pi0 e^(alpha + beta'X) - pi1 e^(beta'X - psi)) w(alpha + beta'X) (1, X) ]
    auto integrand = [&](const Eigen::VectorXd& x, Eigen::VectorXd& contrib) {
        double u = out.alpha_hat + beta.dot(x);
        double tilt = beta.dot(x) - out.psi_star;
        double mass = pi0 * std::exp(u) - pi1 * std::exp(tilt);
        double wv = weight.w(u);
        contrib(0) = mass * wv;
        contrib.tail(d) = mass * wv * x;
    };

    const auto* g = majority.gaussian();
    if (g && d <= 3) {
        // Tensorized Gauss-Hermite over the whitened coordinates.
        Eigen::LLT<Eigen::MatrixXd> llt(g->covariance);
        if (llt.info() != Eigen::Success) fail_invalid("covariance must be positive definite");
        Eigen::MatrixXd chol = llt.matrixL();
        const auto& rule = hermite_rule();
        const int q = static_cast<int>(rule.nodes.size());
        Eigen::VectorXd total = Eigen::VectorXd::Zero(d + 1);
        Eigen::VectorXd contrib(d + 1);
        std::vector<int> idx(static_cast<std::size_t>(d), 0);
        for (;;) {
            Eigen::VectorXd z(d);
            double wq = 1.0;
            for (Eigen::Index j = 0; j < d; ++j) {
                z(j) = rule.nodes(idx[static_cast<std::size_t>(j)]);
                wq *= rule.weights(idx[static_cast<std::size_t>(j)]);
            }
            Eigen::VectorXd x = g->mean + chol * z;
            integrand(x, contrib);
            total += wq * contrib;
            Eigen::Index j = 0;
            for (; j < d; ++j) {
                if (++idx[static_cast<std::size_t>(j)] < q) break;
                idx[static_cast<std::size_t>(j)] = 0;
            }
            if (j == d) break;
        }
        out.foc_residual = total.lpNorm<Eigen::Infinity>();
        out.mc_standard_error = 0.0;
        return out;
    }

    // Monte Carlo fallback (higher-dimensional Gaussian or sample sources).
    Rng rng(seed);
    Eigen::VectorXd total = Eigen::VectorXd::Zero(d + 1);
    Eigen::VectorXd total_sq = Eigen::VectorXd::Zero(d + 1);
    Eigen::VectorXd contrib(d + 1);
    Eigen::Index draws = 0;
    if (g) {
        Eigen::LLT<Eigen::MatrixXd> llt(g->covariance);
        Eigen::MatrixXd chol = llt.matrixL();
        Eigen::VectorXd z(d);
        for (Eigen::Index i = 0; i < mc_samples; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) z(j) = rng.normal();
            integrand(g->mean + chol * z, contrib);
            total += contrib;
            total_sq += contrib.cwiseProduct(contrib);
            ++draws;
        }
    } else {
        const auto& disc = *majority.discrete();
        for (Eigen::Index i = 0; i < disc.atoms.rows(); ++i) {
            integrand(disc.atoms.row(i).transpose(), contrib);
            total += disc.probs(i) * contrib;
            ++draws;
        }
        out.foc_residual = total.lpNorm<Eigen::Infinity>();
        out.mc_standard_error = 0.0;  // exact average over the sample
        return out;
    }
    Eigen::VectorXd mean = total / static_cast<double>(draws);
    Eigen::VectorXd var =
        (total_sq / static_cast<double>(draws) - mean.cwiseProduct(mean)) / static_cast<double>(draws);
    out.foc_residual = mean.lpNorm<Eigen::Infinity>();
    out.mc_standard_error = std::sqrt(std::max(0.0, var.maxCoeff()));
    return out;
}

Eigen::MatrixXd smote(const Eigen::MatrixXd& minority, int k, Eigen::Index m, std::uint64_t seed) {
    if (k < 1) fail_invalid("SMOTE needs k >= 1 neighbors");
    if (minority.rows() < k + 1)
        fail_invalid("SMOTE needs at least k+1 = " + std::to_string(k + 1) + " minority rows, got " +
                     std::to_string(minority.rows()));
    const Eigen::Index n = minority.rows();
    const Eigen::Index d = minority.cols();

    // Exact k nearest neighbors by Euclidean distance in the encoded space.
    std::vector<std::vector<Eigen::Index>> neighbors(static_cast<std::size_t>(n));
    std::vector<std::pair<double, Eigen::Index>> dist(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j)
            dist[static_cast<std::size_t>(j)] = {(minority.row(i) - minority.row(j)).squaredNorm(), j};
        dist[static_cast<std::size_t>(i)].first = std::numeric_limits<double>::infinity();
        std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
        auto& nb = neighbors[static_cast<std::size_t>(i)];
        nb.reserve(static_cast<std::size_t>(k));
        for (int j = 0; j < k; ++j) nb.push_back(dist[static_cast<std::size_t>(j)].second);
    }

    Rng rng(seed);
    Eigen::MatrixXd out(m, d);
    for (Eigen::Index s = 0; s < m; ++s) {
        Eigen::Index i = static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n)));
        const auto& nb = neighbors[static_cast<std::size_t>(i)];
        Eigen::Index j = nb[rng.index(nb.size())];
        double u = rng.uniform();
        out.row(s) = minority.row(i) + u * (minority.row(j) - minority.row(i));
    }
    return out;
}

}  // namespace wlim
