// Empirical loss for a weight-function classifier: summed -U over minority
// scores plus summed V over majority scores, with exact gradient and Hessian.
#pragma once

#include <Eigen/Dense>

#include "dataset.hpp"
#include "weights.hpp"

namespace wlim {

struct LossEvaluation {
    double value = 0.0;
    Eigen::VectorXd gradient;  // d+1 entries, intercept first
    Eigen::MatrixXd hessian;   // (d+1) x (d+1), symmetric
    int saturation_count = 0;
};

// Loss value only. Any exponent that hits the guard increments
// *saturation_count (when given) instead of overflowing.
double loss_value(const WeightFunction& weight, const LabeledDataset& ds, double alpha,
                  const Eigen::VectorXd& beta, int* saturation_count = nullptr);

// Value, gradient, and (optionally) Hessian in one pass.
LossEvaluation loss_eval(const WeightFunction& weight, const LabeledDataset& ds, double alpha,
                         const Eigen::VectorXd& beta, bool with_hessian = true);

}  // namespace wlim
