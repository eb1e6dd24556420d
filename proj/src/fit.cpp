#include "fit.hpp"

#include <algorithm>
#include <cmath>

#include "parallel.hpp"

namespace wlim {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kBacktrack = 0.5;
constexpr int kMaxNewtonRejections = 5;

struct Point {
    double alpha;
    Eigen::VectorXd beta;
};

double eval_value(const WeightFunction& w, const LabeledDataset& ds, const Point& p, bool* saturated) {
    int sat = 0;
    double v = loss_value(w, ds, p.alpha, p.beta, &sat);
    if (saturated) *saturated = sat > 0;
    return v;
}

Eigen::VectorXd gaussian_lda_start(const WeightFunction& weight, const LabeledDataset& ds) {
    // Blend of class covariances per the Gaussian closed form, using the
    // weight's tail exponent; sample moments stand in for the true ones.
    Eigen::MatrixXd x1 = ds.minority_matrix();
    Eigen::MatrixXd x0 = ds.majority_matrix();
    auto moments = [](const Eigen::MatrixXd& x) {
        Eigen::VectorXd mu = x.colwise().mean();
        Eigen::MatrixXd centered = x.rowwise() - mu.transpose();
        Eigen::MatrixXd cov = centered.transpose() * centered /
                              std::max<double>(1.0, static_cast<double>(x.rows() - 1));
        return std::make_pair(mu, cov);
    };
    auto [mu1, cov1] = moments(x1);
    auto [mu0, cov0] = moments(x0);
    double lambda = weight.kind() == WeightKind::Exponential ? weight.param() : 0.0;
    if (x1.rows() < 2) cov1 = cov0;
    Eigen::MatrixXd blend = lambda * cov1 + (1.0 - lambda) * cov0;
    blend.diagonal().array() += 1e-12;
    return blend.ldlt().solve(mu1 - mu0);
}

}  // namespace

ToySpec default_toy() {
    ToySpec toy;
    toy.minority.resize(2, 1);
    toy.minority << 0.0, 1.0;
    MixtureComponent comp;
    comp.weight = 1.0;
    comp.mean = Eigen::VectorXd::Zero(1);
    comp.covariance = Eigen::MatrixXd::Identity(1, 1);
    toy.majority = {comp};
    return toy;
}

FitResult fit(const WeightFunction& weight, const LabeledDataset& ds, const FitOptions& opts) {
    const double n = static_cast<double>(ds.minority_count());
    const double N = static_cast<double>(ds.majority_count());
    double alpha0 = std::log(n / N);
    Eigen::VectorXd beta0 = Eigen::VectorXd::Zero(ds.dim());
    if (!weight.degenerate() && opts.warm_start == WarmStart::GaussianLda)
        beta0 = gaussian_lda_start(weight, ds);
    return fit_from(weight, ds, alpha0, beta0, opts);
}

FitResult fit_from(const WeightFunction& weight, const LabeledDataset& ds, double alpha0,
                   const Eigen::VectorXd& beta0, const FitOptions& opts) {
    if (weight.degenerate())
        fail_invalid("delta weight is degenerate under imbalance; fit rejects it");
    if (beta0.size() != ds.dim()) fail_invalid("starting beta dimension does not match dataset");
    const Eigen::Index d = ds.dim();

    FitResult result;
    result.warm_start_used = opts.warm_start;

    if (opts.check_surrounding) {
        auto diag = check_surrounding(ds.majority_matrix(), ds.minority_mean(),
                                      opts.surrounding_epsilon,
                                      std::max(100, opts.surrounding_directions), 0x5342u);
        if (!diag.pass)
            result.warnings.push_back(
                "majority sample does not surround the minority mean; the minimizer may not exist");
        result.surrounding = diag;
    }

    Point x{alpha0, beta0};

    bool sat0 = false;
    double value = eval_value(weight, ds, x, &sat0);
    if (sat0)
        fail_numeric(
            "loss is saturated at the starting point; features are too large in scale "
            "(consider standardizing)");

    int newton_rejections = 0;
    bool force_gradient = false;
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        LossEvaluation ev = loss_eval(weight, ds, x.alpha, x.beta, true);
        result.grad_norm = ev.gradient.lpNorm<Eigen::Infinity>();
        result.iterations = iter;
        result.value = ev.value;
        value = ev.value;
        if (result.grad_norm <= opts.tolerance * std::max(1.0, std::abs(ev.value))) {
            result.converged = true;
            break;
        }

        Eigen::VectorXd step;
        bool newton_step = !force_gradient;
        if (newton_step) {
            Eigen::LDLT<Eigen::MatrixXd> ldlt(ev.hessian);
            if (ldlt.info() == Eigen::Success) {
                step = -ldlt.solve(ev.gradient);
                if (!step.allFinite() || step.dot(ev.gradient) >= 0.0) newton_step = false;
            } else {
                newton_step = false;
            }
        }
        if (!newton_step) step = -ev.gradient / std::max(1.0, ev.gradient.norm());

        // Backtracking line search; saturated evaluations count as rejections.
        double directional = ev.gradient.dot(step);
        double t = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls, t *= kBacktrack) {
            Point cand{x.alpha + t * step(0), x.beta + t * step.tail(d)};
            bool sat = false;
            double cand_value = eval_value(weight, ds, cand, &sat);
            if (sat || !std::isfinite(cand_value)) continue;
            if (cand_value <= value + kArmijo * t * directional) {
                x = cand;
                value = cand_value;
                accepted = true;
                break;
            }
        }

        if (!accepted) {
            if (newton_step) {
                if (++newton_rejections >= kMaxNewtonRejections) force_gradient = true;
                continue;
            }
            // Even the gradient direction fails: the point is as converged as
            // arithmetic allows.
            break;
        }
        newton_rejections = newton_step ? 0 : newton_rejections;
        if (!x.beta.allFinite() || x.beta.norm() > 1e6)
            fail_numeric("fit diverged (unbounded coefficients); check class overlap");
    }

    if (!result.converged) {
        LossEvaluation ev = loss_eval(weight, ds, x.alpha, x.beta, false);
        result.grad_norm = ev.gradient.lpNorm<Eigen::Infinity>();
        result.value = ev.value;
        result.converged = result.grad_norm <= opts.tolerance * std::max(1.0, std::abs(ev.value));
    }
    result.alpha = x.alpha;
    result.beta = x.beta;
    return result;
}

std::vector<PathCell> fit_path(const WeightFunction& weight, const ToySpec& toy,
                               const std::vector<Eigen::Index>& n_grid, int reps,
                               std::uint64_t seed, const FitOptions& opts) {
    if (n_grid.empty()) fail_invalid("N grid must be nonempty");
    if (!std::is_sorted(n_grid.begin(), n_grid.end())) fail_invalid("N grid must be increasing");
    if (reps < 1) fail_invalid("need at least one replication");
    if (toy.minority.rows() == 0) fail_invalid("toy spec needs explicit minority points");

    struct CellSample {
        double alpha = 0.0, beta = 0.0;
        bool ok = false;
        std::string error;
    };
    std::vector<CellSample> samples(static_cast<std::size_t>(reps) * n_grid.size());
    Rng root(seed);

    parallel_for(static_cast<std::size_t>(reps), [&](std::size_t rep) {
        Rng rep_rng = root.substream(rep);
        std::optional<std::pair<double, Eigen::VectorXd>> warm;
        for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
            auto& cell = samples[rep * n_grid.size() + gi];
            try {
                Eigen::MatrixXd majority = generate_gaussian_mixture(
                    toy.majority, n_grid[gi], rep_rng.substream(gi).seed());
                auto ds = LabeledDataset::from_class_matrices(toy.minority, majority);
                FitOptions local = opts;
                local.check_surrounding = false;  // diagnostic not aggregated across cells
                FitResult r = warm ? fit_from(weight, ds, warm->first, warm->second, local)
                                   : fit(weight, ds, local);
                if (!r.converged) throw Error(ErrorCode::Numeric, "fit did not converge");
                warm = {r.alpha, r.beta};
                cell.alpha = r.alpha;
                cell.beta = r.beta(0);
                cell.ok = true;
            } catch (const std::exception& e) {
                cell.ok = false;
                cell.error = e.what();
                warm.reset();
            }
        }
    });

    std::vector<PathCell> out;
    for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
        PathCell cell;
        cell.N = n_grid[gi];
        double sa = 0.0, sb = 0.0, sa2 = 0.0, sb2 = 0.0;
        int k = 0;
        std::string first_error;
        for (int rep = 0; rep < reps; ++rep) {
            const auto& s = samples[static_cast<std::size_t>(rep) * n_grid.size() + gi];
            if (!s.ok) {
                if (first_error.empty()) first_error = s.error;
                continue;
            }
            sa += s.alpha;
            sb += s.beta;
            sa2 += s.alpha * s.alpha;
            sb2 += s.beta * s.beta;
            ++k;
        }
        cell.valid_replications = k;
        if (k >= 1) {
            cell.mean_alpha = sa / k;
            cell.mean_beta = sb / k;
            if (k >= 2) {
                cell.se_alpha = std::sqrt(std::max(0.0, (sa2 - k * cell.mean_alpha * cell.mean_alpha) /
                                                            (k - 1.0) / k));
                cell.se_beta = std::sqrt(std::max(0.0, (sb2 - k * cell.mean_beta * cell.mean_beta) /
                                                           (k - 1.0) / k));
            }
            cell.valid = true;
        } else {
            cell.error = first_error;
        }
        out.push_back(std::move(cell));
    }
    return out;
}

}  // namespace wlim
