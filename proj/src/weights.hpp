// Weight-function family for linear discriminant losses.
//
// A weight function w > 0 induces the penalty pair
//   U(u) = C_U - integral_u^inf w(s) ds       (concave reward on class-1 scores)
//   V(u) = C_V + integral_-inf^u e^s w(s) ds  (convex penalty on class-0 scores)
// so that V'(u) = e^u w(u). Shipped kinds have closed-form U and V.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "common.hpp"

namespace wlim {

enum class WeightKind {
    Logistic,     // w(u) = 1/(1+e^u); ordinary logistic regression
    Exponential,  // w(u) = lambda(1-lambda) e^(-lambda u), lambda in (0,1)
    PolyLeft,     // w(u) = (1-2u)^k for u<=0, (1+u)^-2 for u>0; k >= 0
    Delta,        // unit point mass at u0; degenerate, excluded from training
};

// Pointwise values of w and the induced penalties. `saturated` means some
// exponent hit the guard and the value was clamped in log domain; callers
// that optimize must treat such evaluations as rejections.
struct WeightEval {
    double w = 0.0;
    double dw = 0.0;  // w'
    double U = 0.0;
    double V = 0.0;
    double dV = 0.0;  // V' = e^u w(u)
    bool saturated = false;
};

enum class TailFamily { Subexponential, Exponential };

// Left-tail classification of w: w(u) ~ e^(-lambda u) h(u) as u -> -inf with
// h subexponential. lambda = 0 is the logistic-equivalent class.
struct TailClass {
    double lambda = 0.0;
    TailFamily family = TailFamily::Subexponential;
    // Allowed growth rate of the h-ratio bound; recorded for documentation
    // only, no runtime decision depends on it.
    double xi = 0.0;
    bool right_tail_bounded = true;
    double probed_lambda = 0.0;  // numeric estimate from the left-tail probe
};

struct ConditionPoint {
    double u = 0.0;
    bool positivity = false;        // w(u) > 0
    bool monotone = false;          // w'(u) <= 0
    bool strict_convexity = false;  // w(u) + w'(u) > 0
};

// Report-only validation of the regularity conditions on an evaluation grid.
struct ConditionReport {
    bool positivity_pass = true;
    bool monotone_pass = true;
    bool strict_convexity_pass = true;
    std::vector<ConditionPoint> failures;  // grid points where something failed
    // Right-tail boundedness check V(u)/(e^u w(u)) for unbounded w; skipped
    // (checked=false) when w is bounded.
    bool right_tail_checked = false;
    double right_tail_sup = 0.0;
    bool right_tail_pass = true;
    bool degenerate = false;  // delta kind
    bool all_pass() const {
        return !degenerate && positivity_pass && monotone_pass && strict_convexity_pass &&
               (!right_tail_checked || right_tail_pass);
    }
};

class WeightFunction {
public:
    static WeightFunction logistic();
    static WeightFunction exponential(double lambda);
    static WeightFunction poly_left(double k);
    static WeightFunction delta(double u0);

    // Parse a CLI-style spec: "logistic" | "exp:<lambda>" | "polyleft:<k>" |
    // "delta:<u0>".
    static WeightFunction parse(const std::string& spec);

    WeightKind kind() const { return kind_; }
    double param() const { return param_; }  // lambda, k, or u0
    std::string spec() const;

    bool degenerate() const { return kind_ == WeightKind::Delta; }

    double w(double u) const;
    double dw(double u) const;
    double U(double u, bool* saturated = nullptr) const;
    double V(double u, bool* saturated = nullptr) const;
    // V'(u) = e^u w(u), computed in log domain for the unbounded kinds.
    double ew(double u, bool* saturated = nullptr) const;
    // V''(u) = e^u (w(u) + w'(u)); sign tracks the convexity of V.
    double evv(double u, bool* saturated = nullptr) const;

    WeightEval eval(double u) const;

    // Declared left-tail class plus a numeric probe of the tail exponent;
    // throws for the delta kind.
    TailClass classify_tail() const;

    ConditionReport validate(const std::vector<double>& grid) const;

private:
    WeightFunction(WeightKind kind, double param) : kind_(kind), param_(param) {}

    WeightKind kind_;
    double param_;
};

// Validate an arbitrary (w, w') pair on a grid; used by the WeightFunction
// overload and directly by tests with hand-built functions.
ConditionReport validate_conditions(const std::function<double(double)>& w,
                                    const std::function<double(double)>& dw,
                                    const std::vector<double>& grid);

// Least-squares estimate of the left-tail exponent of w on a probe window,
// fitting -log w(u) ~ a*u + b*log(-u) + c. The log(-u) regressor absorbs the
// polynomial factor allowed by the tail condition; without it a plain slope
// cannot separate lambda = 0 from a polynomially growing w at any finite
// window.
double probe_tail_exponent(const std::function<double(double)>& w, double lo = -40.0,
                           double hi = -20.0, int points = 201);

}  // namespace wlim
