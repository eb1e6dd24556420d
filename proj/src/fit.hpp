// Exact minimization of the empirical weight-function loss, plus the
// replication driver for convergence studies over growing majority size.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dataset.hpp"
#include "loss.hpp"
#include "weights.hpp"

namespace wlim {

enum class WarmStart { Zero, GaussianLda };

struct FitOptions {
    int max_iterations = 500;
    double tolerance = 1e-8;  // gradient inf-norm, relative to max(1, |loss|)
    WarmStart warm_start = WarmStart::Zero;
    // Surrounding diagnostic at the minority mean (warning only).
    int surrounding_directions = 128;
    double surrounding_epsilon = 0.1;
    bool check_surrounding = true;
};

struct FitResult {
    double alpha = 0.0;
    Eigen::VectorXd beta;
    double grad_norm = 0.0;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
    WarmStart warm_start_used = WarmStart::Zero;
    std::optional<SurroundingDiagnostic> surrounding;
    std::vector<std::string> warnings;
};

FitResult fit(const WeightFunction& weight, const LabeledDataset& ds, const FitOptions& opts = {});

// Same solver from an explicit starting point (warm starts across related
// problems).
FitResult fit_from(const WeightFunction& weight, const LabeledDataset& ds, double alpha0,
                   const Eigen::VectorXd& beta0, const FitOptions& opts = {});

// Majority-class sampler for toy convergence studies.
struct ToySpec {
    Eigen::MatrixXd minority;                // fixed minority observations
    std::vector<MixtureComponent> majority;  // majority sampling law
};

// The standard 1-D study: minority {0, 1}, majority standard normal.
ToySpec default_toy();

struct PathCell {
    Eigen::Index N = 0;
    double mean_alpha = 0.0, se_alpha = 0.0;
    double mean_beta = 0.0, se_beta = 0.0;  // first coordinate of beta
    int valid_replications = 0;
    bool valid = false;
    std::string error;
};

// For each N: `reps` fresh majority samples, each fit warm-started from the
// previous N's solution within its replication; aggregates mean and standard
// error. Failed cells are recorded, not fatal.
std::vector<PathCell> fit_path(const WeightFunction& weight, const ToySpec& toy,
                               const std::vector<Eigen::Index>& n_grid, int reps,
                               std::uint64_t seed, const FitOptions& opts = {});

}  // namespace wlim
