#include "loss.hpp"

#include <cmath>

namespace wlim {

namespace {

void require_trainable(const WeightFunction& weight, const LabeledDataset& ds,
                       const Eigen::VectorXd& beta) {
    if (weight.degenerate())
        fail_invalid("delta weight is degenerate under imbalance and is excluded from training");
    if (beta.size() != ds.dim()) fail_invalid("beta dimension does not match dataset");
}

// Kahan-style compensated accumulator; the two class sums can span many
// orders of magnitude once alpha drifts.
struct Accum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        double y = x - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

}  // namespace

double loss_value(const WeightFunction& weight, const LabeledDataset& ds, double alpha,
                  const Eigen::VectorXd& beta, int* saturation_count) {
    require_trainable(weight, ds, beta);
    Eigen::VectorXd scores = ds.features() * beta;
    int sat = 0;
    Accum acc;
    for (auto i : ds.minority_index()) {
        bool s = false;
        double term = -weight.U(alpha + scores(i), &s);
        if (s)
            ++sat;
        else
            acc.add(term);
    }
    for (auto j : ds.majority_index()) {
        bool s = false;
        double term = weight.V(alpha + scores(j), &s);
        if (s)
            ++sat;
        else
            acc.add(term);
    }
    if (saturation_count) *saturation_count = sat;
    return acc.sum;
}

LossEvaluation loss_eval(const WeightFunction& weight, const LabeledDataset& ds, double alpha,
                         const Eigen::VectorXd& beta, bool with_hessian) {
    require_trainable(weight, ds, beta);
    const Eigen::Index d = ds.dim();
    Eigen::VectorXd scores = ds.features() * beta;

    LossEvaluation out;
    out.gradient = Eigen::VectorXd::Zero(d + 1);
    if (with_hessian) out.hessian = Eigen::MatrixXd::Zero(d + 1, d + 1);
    Accum value;
    Eigen::VectorXd z(d + 1);
    z(0) = 1.0;

    // Minority terms: -U contributes -w to the gradient and -w' to the
    // curvature; majority terms: V contributes e^u w and e^u (w + w').
    // Saturated rows are counted and left out of the sums; callers must treat
    // any saturation as an invalid evaluation, and this keeps every entry
    // finite.
    for (auto i : ds.minority_index()) {
        double u = alpha + scores(i);
        bool s = false;
        double neg_u = -weight.U(u, &s);
        if (s) {
            ++out.saturation_count;
            continue;
        }
        value.add(neg_u);
        double g = -weight.w(u);
        double h = -weight.dw(u);
        z.tail(d) = ds.features().row(i).transpose();
        out.gradient.noalias() += g * z;
        if (with_hessian) out.hessian.noalias() += h * (z * z.transpose());
    }
    for (auto j : ds.majority_index()) {
        double u = alpha + scores(j);
        bool s = false;
        double v = weight.V(u, &s);
        double g = weight.ew(u, &s);
        double h = with_hessian ? weight.evv(u, &s) : 0.0;
        if (s) {
            ++out.saturation_count;
            continue;
        }
        value.add(v);
        z.tail(d) = ds.features().row(j).transpose();
        out.gradient.noalias() += g * z;
        if (with_hessian) out.hessian.noalias() += h * (z * z.transpose());
    }
    out.value = value.sum;
    if (with_hessian) out.hessian = 0.5 * (out.hessian + out.hessian.transpose()).eval();
    return out;
}

}  // namespace wlim
