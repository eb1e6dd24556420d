// ROC construction, AUC, normalized partial AUC in both orientations,
// bootstrap confidence bands, and TPR-targeted threshold calibration.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "common.hpp"

namespace wlim {

// Step curve over distinct scores; ties collapse into a single threshold.
// Points run from (0,0) at threshold +inf to (1,1) at -inf; fpr and tpr are
// nondecreasing along the curve.
struct RocCurve {
    std::vector<double> thresholds;
    std::vector<double> fpr;
    std::vector<double> tpr;
};

RocCurve roc(const std::vector<double>& scores_majority, const std::vector<double>& scores_minority);

// Trapezoidal area; equals the pairwise win rate with half credit for ties.
double auc(const RocCurve& curve);

enum class PaucOrientation { Specificity, Sensitivity };

struct ConfidenceInterval {
    double low = 0.0;
    double high = 0.0;
    double level = 0.0;
};

struct PaucReport {
    PaucOrientation orientation = PaucOrientation::Specificity;
    double bound = 0.0;  // fp1 or tp1 depending on orientation
    double area = 0.0;   // raw band area before normalization
    double pauc = 0.5;   // affinely normalized into [1/2, 1] for a proper curve
    std::optional<ConfidenceInterval> ci;
};

// Specificity orientation: area under TPR over FPR in [0, bound], normalized
// between the band's diagonal slice and its full rectangle. Sensitivity
// orientation mirrors this along the diagonal: area of (1 - FPR) over TPR in
// [bound, 1].
PaucReport pauc(const RocCurve& curve, PaucOrientation orientation, double bound);

struct BootstrapOptions {
    int replicates = 1000;
    double level = 0.9;
    std::uint64_t seed = 0;
};

// Percentile interval from stratified resampling of each class. Degenerate
// resamples (a class collapsing to one distinct score) are redrawn, with a
// global cap of 10x the requested replicates.
PaucReport bootstrap_pauc(const std::vector<double>& scores_majority,
                          const std::vector<double>& scores_minority, PaucOrientation orientation,
                          double bound, const BootstrapOptions& opts,
                          std::vector<double>* replicate_values = nullptr);

// Loosest threshold whose strict-exceedance rate on the given minority scores
// reaches the target TPR.
double calibrate_threshold(const std::vector<double>& scores_minority_train, double target_tpr);

}  // namespace wlim
