#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "parallel.hpp"
#include "rng.hpp"

namespace wlim {

namespace {

double exceed_fraction(const std::vector<double>& sorted, double threshold) {
    auto it = std::upper_bound(sorted.begin(), sorted.end(), threshold);
    return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
}

// Linear-interpolation quantile of a sorted sample.
double quantile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) fail_invalid("quantile of empty sample");
    double pos = p * static_cast<double>(sorted.size() - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

RocCurve roc(const std::vector<double>& scores_majority, const std::vector<double>& scores_minority) {
    if (scores_majority.empty() || scores_minority.empty())
        fail_invalid("ROC needs scores from both classes");
    std::vector<double> s0 = scores_majority;
    std::vector<double> s1 = scores_minority;
    std::sort(s0.begin(), s0.end());
    std::sort(s1.begin(), s1.end());

    std::vector<double> cuts;
    cuts.reserve(s0.size() + s1.size());
    std::merge(s0.begin(), s0.end(), s1.begin(), s1.end(), std::back_inserter(cuts));
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    RocCurve curve;
    curve.thresholds.push_back(std::numeric_limits<double>::infinity());
    curve.fpr.push_back(0.0);
    curve.tpr.push_back(0.0);
    for (auto it = cuts.rbegin(); it != cuts.rend(); ++it) {
        double t = *it;
        double f = exceed_fraction(s0, t);
        double p = exceed_fraction(s1, t);
        if (f == curve.fpr.back() && p == curve.tpr.back()) {
            curve.thresholds.back() = t;
            continue;
        }
        curve.thresholds.push_back(t);
        curve.fpr.push_back(f);
        curve.tpr.push_back(p);
    }
    if (curve.fpr.back() != 1.0 || curve.tpr.back() != 1.0) {
        curve.thresholds.push_back(-std::numeric_limits<double>::infinity());
        curve.fpr.push_back(1.0);
        curve.tpr.push_back(1.0);
    }
    return curve;
}

double auc(const RocCurve& curve) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.fpr.size(); ++i)
        area += 0.5 * (curve.tpr[i] + curve.tpr[i - 1]) * (curve.fpr[i] - curve.fpr[i - 1]);
    return area;
}

PaucReport pauc(const RocCurve& curve, PaucOrientation orientation, double bound) {
    if (!(bound > 0.0 && bound <= 1.0)) fail_invalid("pAUC bound must lie in (0, 1]");
    PaucReport report;
    report.orientation = orientation;
    report.bound = bound;

    if (orientation == PaucOrientation::Specificity) {
        // Integrate TPR dFPR over [0, bound] along the polyline.
        double area = 0.0;
        for (std::size_t i = 1; i < curve.fpr.size(); ++i) {
            double x0 = curve.fpr[i - 1], x1 = curve.fpr[i];
            double y0 = curve.tpr[i - 1], y1 = curve.tpr[i];
            if (x1 <= 0.0 || x0 >= bound || x1 == x0) continue;
            double lo = std::max(x0, 0.0), hi = std::min(x1, bound);
            auto y_at = [&](double x) { return y0 + (y1 - y0) * (x - x0) / (x1 - x0); };
            area += 0.5 * (y_at(lo) + y_at(hi)) * (hi - lo);
        }
        double min_area = 0.5 * bound * bound;
        double max_area = bound;
        report.area = area;
        report.pauc = 0.5 * (1.0 + (area - min_area) / (max_area - min_area));
    } else {
        // Mirror construction: integrate (1 - FPR) dTPR over TPR in [bound, 1].
        double area = 0.0;
        for (std::size_t i = 1; i < curve.tpr.size(); ++i) {
            double y0 = curve.tpr[i - 1], y1 = curve.tpr[i];
            double x0 = curve.fpr[i - 1], x1 = curve.fpr[i];
            if (y1 <= bound || y0 >= 1.0 || y1 == y0) continue;
            double lo = std::max(y0, bound), hi = std::min(y1, 1.0);
            auto x_at = [&](double y) { return x0 + (x1 - x0) * (y - y0) / (y1 - y0); };
            area += 0.5 * ((1.0 - x_at(lo)) + (1.0 - x_at(hi))) * (hi - lo);
        }
        double band = 1.0 - bound;
        double min_area = 0.5 * band * band;  // right of the diagonal within the band
        double max_area = band;
        report.area = area;
        report.pauc = band == 0.0 ? 1.0 : 0.5 * (1.0 + (area - min_area) / (max_area - min_area));
    }
    return report;
}

PaucReport bootstrap_pauc(const std::vector<double>& scores_majority,
                          const std::vector<double>& scores_minority, PaucOrientation orientation,
                          double bound, const BootstrapOptions& opts,
                          std::vector<double>* replicate_values) {
    if (opts.replicates < 100) fail_invalid("bootstrap needs at least 100 replicates");
    if (!(opts.level > 0.0 && opts.level < 1.0)) fail_invalid("confidence level must lie in (0, 1)");
    PaucReport point = pauc(roc(scores_majority, scores_minority), orientation, bound);

    auto distinct = [](const std::vector<double>& v) {
        for (std::size_t i = 1; i < v.size(); ++i)
            if (v[i] != v[0]) return true;
        return false;
    };
    // A resample is degenerate when a class collapses to one distinct score;
    // classes that are constant in the original data are exempt.
    const bool need0 = distinct(scores_majority);
    const bool need1 = distinct(scores_minority);

    std::vector<double> values(static_cast<std::size_t>(opts.replicates));
    std::atomic<long> attempts{0};
    const long max_attempts = 10L * opts.replicates;
    Rng root(opts.seed);
    parallel_for(values.size(), [&](std::size_t b) {
        Rng rng = root.substream(b);
        std::vector<double> r0(scores_majority.size()), r1(scores_minority.size());
        for (;;) {
            if (attempts.fetch_add(1) >= max_attempts)
                fail_numeric("bootstrap exceeded its redraw budget on degenerate resamples");
            for (auto& v : r0) v = scores_majority[rng.index(scores_majority.size())];
            for (auto& v : r1) v = scores_minority[rng.index(scores_minority.size())];
            if ((!need0 || distinct(r0)) && (!need1 || distinct(r1))) break;
        }
        values[b] = pauc(roc(r0, r1), orientation, bound).pauc;
    });

    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    double tail = 0.5 * (1.0 - opts.level);
    point.ci = ConfidenceInterval{quantile(sorted, tail), quantile(sorted, 1.0 - tail), opts.level};
    if (replicate_values) *replicate_values = std::move(values);
    return point;
}

double calibrate_threshold(const std::vector<double>& scores_minority_train, double target_tpr) {
    if (scores_minority_train.empty()) fail_invalid("cannot calibrate on empty scores");
    if (!(target_tpr > 0.0 && target_tpr <= 1.0)) fail_invalid("target TPR must lie in (0, 1]");
    std::vector<double> sorted = scores_minority_train;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    // Need at least r scores strictly above the threshold.
    auto r = static_cast<std::size_t>(std::ceil(target_tpr * static_cast<double>(m) - 1e-12));
    r = std::max<std::size_t>(1, std::min(r, m));
    double key = sorted[m - r];  // smallest score that must stay above threshold
    return std::nextafter(key, -std::numeric_limits<double>::infinity());
}

}  // namespace wlim
