#include "weights.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <Eigen/Dense>

namespace wlim {

namespace {

double safe_exp(double e, bool* saturated) {
    if (e > kExpSaturationBound) {
        if (saturated) *saturated = true;
        e = kExpSaturationBound;
    }
    return std::exp(e);
}

// log(1 + e^x) without overflow.
double softplus(double x) {
    if (x > 0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

// 1/(1 + e^x) evaluated from the shrinking side.
double logistic_w(double x) {
    if (x > 0) {
        double e = std::exp(-x);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(x));
}

}  // namespace

WeightFunction WeightFunction::logistic() { return WeightFunction(WeightKind::Logistic, 0.0); }

WeightFunction WeightFunction::exponential(double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0))
        fail_invalid("exponential weight requires lambda in (0,1), got " + std::to_string(lambda));
    return WeightFunction(WeightKind::Exponential, lambda);
}

WeightFunction WeightFunction::poly_left(double k) {
    if (!(k >= 0.0)) fail_invalid("polyleft weight requires degree k >= 0, got " + std::to_string(k));
    return WeightFunction(WeightKind::PolyLeft, k);
}

WeightFunction WeightFunction::delta(double u0) {
    if (!std::isfinite(u0)) fail_invalid("delta weight requires finite u0");
    return WeightFunction(WeightKind::Delta, u0);
}

WeightFunction WeightFunction::parse(const std::string& spec) {
    auto colon = spec.find(':');
    std::string name = spec.substr(0, colon);
    std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    auto parse_arg = [&](const char* what) {
        if (arg.empty()) fail_invalid(std::string("weight spec '") + spec + "' is missing " + what);
        try {
            std::size_t pos = 0;
            double v = std::stod(arg, &pos);
            if (pos != arg.size()) throw std::invalid_argument(arg);
            return v;
        } catch (const std::exception&) {
            fail_invalid(std::string("cannot parse ") + what + " in weight spec '" + spec + "'");
        }
    };
    if (name == "logistic") {
        if (!arg.empty()) fail_invalid("logistic weight takes no parameter");
        return logistic();
    }
    if (name == "exp") return exponential(parse_arg("lambda"));
    if (name == "polyleft") return poly_left(parse_arg("degree k"));
    if (name == "delta") return delta(parse_arg("u0"));
    fail_invalid("unknown weight spec '" + spec + "' (expected logistic | exp:<lambda> | polyleft:<k> | delta:<u0>)");
}

std::string WeightFunction::spec() const {
    std::ostringstream out;
    switch (kind_) {
        case WeightKind::Logistic: out << "logistic"; break;
        case WeightKind::Exponential: out << "exp:" << param_; break;
        case WeightKind::PolyLeft: out << "polyleft:" << param_; break;
        case WeightKind::Delta: out << "delta:" << param_; break;
    }
    return out.str();
}

double WeightFunction::w(double u) const {
    switch (kind_) {
        case WeightKind::Logistic:
            return logistic_w(u);
        case WeightKind::Exponential: {
            double lam = param_;
            bool sat = false;
            return lam * (1.0 - lam) * safe_exp(-lam * u, &sat);
        }
        case WeightKind::PolyLeft: {
            double k = param_;
            if (u <= 0.0) return std::exp(k * std::log1p(-2.0 * u));
            return 1.0 / ((1.0 + u) * (1.0 + u));
        }
        case WeightKind::Delta:
            return 0.0;  // density view of the point mass; training rejects this kind
    }
    return 0.0;
}

double WeightFunction::dw(double u) const {
    switch (kind_) {
        case WeightKind::Logistic: {
            double wv = logistic_w(u);
            return -wv * (1.0 - wv);
        }
        case WeightKind::Exponential:
            return -param_ * w(u);
        case WeightKind::PolyLeft: {
            double k = param_;
            if (u <= 0.0) {
                if (k == 0.0) return 0.0;
                return -2.0 * k * std::exp((k - 1.0) * std::log1p(-2.0 * u));
            }
            return -2.0 / std::pow(1.0 + u, 3.0);
        }
        case WeightKind::Delta:
            return 0.0;
    }
    return 0.0;
}

double WeightFunction::U(double u, bool* saturated) const {
    switch (kind_) {
        case WeightKind::Logistic:
            // U(u) = log(e^u/(1+e^u)) = -softplus(-u)
            return -softplus(-u);
        case WeightKind::Exponential: {
            double lam = param_;
            return -(1.0 - lam) * safe_exp(-lam * u, saturated);
        }
        case WeightKind::PolyLeft: {
            double k = param_;
            if (u <= 0.0) {
                // -(integral_u^0 w + integral_0^inf w) with the left piece
                // ((1-2u)^(k+1) - 1)/(2(k+1)) and right-tail mass 1.
                double p = safe_exp((k + 1.0) * std::log1p(-2.0 * u), saturated);
                return -((p - 1.0) / (2.0 * (k + 1.0)) + 1.0);
            }
            return -1.0 / (1.0 + u);
        }
        case WeightKind::Delta:
            return u <= param_ ? -1.0 : 0.0;
    }
    return 0.0;
}

double WeightFunction::V(double u, bool* saturated) const {
    switch (kind_) {
        case WeightKind::Logistic:
            return softplus(u);
        case WeightKind::Exponential: {
            double lam = param_;
            return lam * safe_exp((1.0 - lam) * u, saturated);
        }
        case WeightKind::PolyLeft: {
            double k = param_;
            if (u <= 0.0) {
                // integral_-inf^u e^s (1-2s)^k ds = sqrt(e) 2^k Gamma(k+1, (1-2u)/2)
                double x = 0.5 * (1.0 - 2.0 * u);
                return std::exp(0.5 + k * std::log(2.0)) * boost::math::tgamma(k + 1.0, x);
            }
            // V(0) + integral_0^u e^s/(1+s)^2 ds, the integral via the
            // exponential integral Ei.
            double v0 = std::exp(0.5 + k * std::log(2.0)) * boost::math::tgamma(k + 1.0, 0.5);
            if (1.0 + u > kExpSaturationBound) {
                if (saturated) *saturated = true;
                u = kExpSaturationBound - 1.0;
            }
            double ei = boost::math::expint(1.0 + u);
            static const double kEi1 = boost::math::expint(1.0);
            bool sat = false;
            return v0 + (ei - kEi1) / std::exp(1.0) - safe_exp(u, &sat) / (1.0 + u) + 1.0;
        }
        case WeightKind::Delta:
            return u > param_ ? std::exp(param_) : 0.0;
    }
    return 0.0;
}

double WeightFunction::ew(double u, bool* saturated) const {
    switch (kind_) {
        case WeightKind::Logistic:
            // e^u/(1+e^u), bounded in (0,1)
            return logistic_w(-u);
        case WeightKind::Exponential: {
            double lam = param_;
            return lam * (1.0 - lam) * safe_exp((1.0 - lam) * u, saturated);
        }
        case WeightKind::PolyLeft: {
            double k = param_;
            if (u <= 0.0) return safe_exp(u + k * std::log1p(-2.0 * u), saturated);
            return safe_exp(u - 2.0 * std::log1p(u), saturated);
        }
        case WeightKind::Delta:
            return 0.0;
    }
    return 0.0;
}

double WeightFunction::evv(double u, bool* saturated) const {
    switch (kind_) {
        case WeightKind::Logistic: {
            // e^u (w + w') = e^u w^2 = sigma(u) w(u), bounded
            return logistic_w(-u) * logistic_w(u);
        }
        case WeightKind::Exponential: {
            double lam = param_;
            return lam * (1.0 - lam) * (1.0 - lam) * safe_exp((1.0 - lam) * u, saturated);
        }
        case WeightKind::PolyLeft: {
            double k = param_;
            if (u <= 0.0) {
                // e^u (1-2u)^(k-1) (1 - 2u - 2k); negative on (1/2 - k, 0]
                double base = safe_exp(u + (k - 1.0) * std::log1p(-2.0 * u), saturated);
                return base * (1.0 - 2.0 * u - 2.0 * k);
            }
            double base = safe_exp(u - 3.0 * std::log1p(u), saturated);
            return base * (u - 1.0);
        }
        case WeightKind::Delta:
            return 0.0;
    }
    return 0.0;
}

WeightEval WeightFunction::eval(double u) const {
    if (!std::isfinite(u)) fail_invalid("weight evaluation requires finite u");
    WeightEval out;
    bool sat = false;
    out.w = w(u);
    out.dw = dw(u);
    out.U = U(u, &sat);
    out.V = V(u, &sat);
    out.dV = ew(u, &sat);
    out.saturated = sat;
    return out;
}

TailClass WeightFunction::classify_tail() const {
    if (kind_ == WeightKind::Delta)
        fail_invalid("delta weight has no tail class; it is degenerate under imbalance");
    TailClass tc;
    switch (kind_) {
        case WeightKind::Logistic:
            tc.lambda = 0.0;
            tc.family = TailFamily::Subexponential;
            tc.xi = 0.0;
            tc.right_tail_bounded = true;
            break;
        case WeightKind::Exponential:
            tc.lambda = param_;
            tc.family = TailFamily::Exponential;
            tc.xi = 1e-6;  // any positive value works for a pure exponential tail
            tc.right_tail_bounded = false;
            break;
        case WeightKind::PolyLeft:
            tc.lambda = 0.0;
            tc.family = TailFamily::Subexponential;
            tc.xi = 1e-6;  // arbitrarily small for polynomial h
            tc.right_tail_bounded = false;
            break;
        default:
            break;
    }
    tc.probed_lambda = probe_tail_exponent([this](double u) { return w(u); });
    if (std::abs(tc.probed_lambda - tc.lambda) > 0.01)
        fail_numeric("tail probe disagrees with declared exponent: probed " +
                     std::to_string(tc.probed_lambda) + " vs declared " + std::to_string(tc.lambda));
    return tc;
}

ConditionReport WeightFunction::validate(const std::vector<double>& grid) const {
    if (degenerate()) {
        ConditionReport report;
        report.degenerate = true;
        report.positivity_pass = false;  // the point mass has no positive density
        return report;
    }
    ConditionReport report =
        validate_conditions([this](double u) { return w(u); }, [this](double u) { return dw(u); }, grid);
    bool bounded = kind_ == WeightKind::Logistic;
    if (!bounded) {
        report.right_tail_checked = true;
        std::vector<double> ratios;
        for (double u : grid) {
            if (u < 0.0) continue;
            bool sat = false;
            double denom = ew(u, &sat);
            if (sat || denom <= 0.0) continue;
            double v = V(u, &sat);
            if (sat) continue;
            ratios.push_back(v / denom);
        }
        double sup = 0.0;
        for (double r : ratios) sup = std::max(sup, r);
        report.right_tail_sup = sup;
        // Boundedness on a finite grid shows up as a running max that has
        // stopped growing by the end of the grid.
        if (ratios.size() >= 4) {
            std::size_t cut = ratios.size() * 3 / 4;
            double early = 0.0;
            for (std::size_t i = 0; i < cut; ++i) early = std::max(early, ratios[i]);
            report.right_tail_pass = std::isfinite(sup) && sup <= early * 1.02 + 1e-12;
        } else {
            report.right_tail_pass = std::isfinite(sup);
        }
    }
    return report;
}

ConditionReport validate_conditions(const std::function<double(double)>& w,
                                    const std::function<double(double)>& dw,
                                    const std::vector<double>& grid) {
    if (grid.empty()) fail_invalid("validation grid must be non-empty");
    if (!std::is_sorted(grid.begin(), grid.end())) fail_invalid("validation grid must be sorted");
    ConditionReport report;
    for (double u : grid) {
        double wv = w(u);
        double dv = dw(u);
        ConditionPoint pt;
        pt.u = u;
        pt.positivity = wv > 0.0;
        pt.monotone = dv <= 0.0;
        pt.strict_convexity = wv + dv > 0.0;
        if (!pt.positivity) report.positivity_pass = false;
        if (!pt.monotone) report.monotone_pass = false;
        if (!pt.strict_convexity) report.strict_convexity_pass = false;
        if (!pt.positivity || !pt.monotone || !pt.strict_convexity) report.failures.push_back(pt);
    }
    return report;
}

double probe_tail_exponent(const std::function<double(double)>& w, double lo, double hi, int points) {
    if (!(lo < hi && hi < 0.0)) fail_invalid("tail probe window must satisfy lo < hi < 0");
    if (points < 3) fail_invalid("tail probe needs at least 3 points");
    Eigen::MatrixXd design(points, 3);
    Eigen::VectorXd target(points);
    for (int i = 0; i < points; ++i) {
        double u = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
        double wv = w(u);
        if (!(wv > 0.0) || !std::isfinite(wv)) fail_numeric("tail probe hit a nonpositive weight value");
        design(i, 0) = u;
        design(i, 1) = std::log(-u);
        design(i, 2) = 1.0;
        target(i) = -std::log(wv);
    }
    Eigen::Vector3d coef = design.colPivHouseholderQr().solve(target);
    return coef(0);
}

}  // namespace wlim
