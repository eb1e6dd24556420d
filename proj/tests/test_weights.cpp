#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "weights.hpp"

using wlim::Error;
using wlim::TailFamily;
using wlim::WeightFunction;
using wlim::WeightKind;

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
    return v;
}

std::vector<WeightFunction> shipped_kinds() {
    return {WeightFunction::logistic(), WeightFunction::exponential(0.3),
            WeightFunction::exponential(0.5), WeightFunction::exponential(0.9),
            WeightFunction::poly_left(1.0), WeightFunction::poly_left(2.5)};
}

}  // namespace

TEST_CASE("construction rejects out-of-domain parameters") {
    CHECK_THROWS_AS(WeightFunction::exponential(0.0), Error);
    CHECK_THROWS_AS(WeightFunction::exponential(1.0), Error);
    CHECK_THROWS_AS(WeightFunction::exponential(1.5), Error);
    CHECK_THROWS_AS(WeightFunction::poly_left(-0.1), Error);
    CHECK_THROWS_AS(WeightFunction::parse("exp:nope"), Error);
    CHECK_THROWS_AS(WeightFunction::parse("exp:"), Error);
    CHECK_THROWS_AS(WeightFunction::parse("mystery"), Error);
    CHECK_THROWS_AS(WeightFunction::parse("logistic:3"), Error);
    CHECK(WeightFunction::parse("exp:0.5").param() == doctest::Approx(0.5));
    CHECK(WeightFunction::parse("polyleft:2").kind() == WeightKind::PolyLeft);
    CHECK(WeightFunction::parse("delta:0").degenerate());
}

TEST_CASE("closed-form spot values") {
    auto lg = WeightFunction::logistic();
    CHECK(lg.w(0.0) == doctest::Approx(0.5));
    CHECK(lg.U(0.0) == doctest::Approx(std::log(0.5)));
    CHECK(lg.V(0.0) == doctest::Approx(std::log(2.0)));

    auto ex = WeightFunction::exponential(0.5);
    CHECK(ex.w(0.0) == doctest::Approx(0.25));
    CHECK(ex.U(0.0) == doctest::Approx(-0.5));
    CHECK(ex.V(0.0) == doctest::Approx(0.5));
    CHECK(ex.V(2.0) == doctest::Approx(0.5 * std::exp(1.0)).epsilon(1e-12));

    auto pl = WeightFunction::poly_left(1.0);
    CHECK(pl.w(0.0) == doctest::Approx(1.0));
    CHECK(pl.w(-1.0) == doctest::Approx(3.0));
    CHECK(pl.w(1.0) == doctest::Approx(0.25));
    // elementary form of the left branch: V(u) = e^u (3 - 2u)
    CHECK(pl.V(-2.0) == doctest::Approx(std::exp(-2.0) * 7.0).epsilon(1e-12));
    CHECK(pl.U(-1.0) == doctest::Approx(-3.0));  // -(u^2 - u + 1) at u = -1
}

TEST_CASE("quadrature oracle confirms U and V") {
    struct Probe {
        WeightFunction wf;
        double left_cut;   // lower truncation for the V integral
        double right_cut;  // upper truncation for the U integral
        bool poly_right;   // exact (1+s)^-2 tail beyond right_cut
    };
    std::vector<Probe> probes = {
        {WeightFunction::logistic(), -80.0, 45.0, false},
        {WeightFunction::exponential(0.5), -120.0, 90.0, false},
        {WeightFunction::exponential(0.9), -400.0, 50.0, false},
        {WeightFunction::poly_left(1.0), -90.0, 60.0, true},
        {WeightFunction::poly_left(2.5), -120.0, 60.0, true},
    };
    for (const auto& p : probes) {
        for (double u : {-8.0, -2.0, -0.5, 0.0, 0.7, 3.0}) {
            auto wfun = [&](double s) { return p.wf.w(s); };
            auto ewfun = [&](double s) { return p.wf.ew(s); };
            double tail = p.poly_right ? 1.0 / (1.0 + p.right_cut) : 0.0;
            double U_quad = -(oracles::integrate(wfun, u, p.right_cut, 1e-12) + tail);
            double V_quad = oracles::integrate(ewfun, p.left_cut, u, 1e-12);
            CAPTURE(p.wf.spec());
            CAPTURE(u);
            CHECK(p.wf.U(u) == doctest::Approx(U_quad).epsilon(1e-7));
            CHECK(p.wf.V(u) == doctest::Approx(V_quad).epsilon(1e-7));
        }
    }
}

TEST_CASE("U' recovers w on a dense grid") {
    for (const auto& wf : shipped_kinds()) {
        for (double u : linspace(-50.0, 50.0, 501)) {
            double numeric = oracles::central_diff([&](double s) { return wf.U(s); }, u);
            double exact = wf.w(u);
            CAPTURE(wf.spec());
            CAPTURE(u);
            CHECK(numeric == doctest::Approx(exact).epsilon(1e-6));
        }
    }
}

TEST_CASE("V' equals e^u w(u) to near round-off") {
    for (const auto& wf : shipped_kinds()) {
        for (double u : linspace(-300.0, 300.0, 601)) {
            bool sat = false;
            double lhs = wf.ew(u, &sat) * std::exp(-u);
            if (sat || !std::isfinite(lhs) || lhs == 0.0) continue;
            double rhs = wf.w(u);
            if (!std::isfinite(rhs) || rhs == 0.0) continue;
            CAPTURE(wf.spec());
            CAPTURE(u);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
        }
    }
}

TEST_CASE("condition validation") {
    auto grid = linspace(-10.0, 10.0, 2001);

    SUBCASE("logistic passes everywhere, right tail skipped") {
        auto report = WeightFunction::logistic().validate(grid);
        CHECK(report.all_pass());
        CHECK_FALSE(report.right_tail_checked);
    }
    SUBCASE("exponential passes with constant tail ratio 1/(1-lambda)") {
        auto report = WeightFunction::exponential(0.5).validate(grid);
        CHECK(report.all_pass());
        CHECK(report.right_tail_checked);
        CHECK(report.right_tail_sup == doctest::Approx(2.0).epsilon(1e-9));
    }
    SUBCASE("hand-built weight with w + w' = 0 fails strict convexity") {
        auto report = wlim::validate_conditions([](double u) { return std::exp(-u); },
                                                [](double u) { return -std::exp(-u); }, grid);
        CHECK(report.positivity_pass);
        CHECK(report.monotone_pass);
        CHECK_FALSE(report.strict_convexity_pass);
    }
    SUBCASE("the piecewise linear/poly example violates strict convexity on (-1/2, 1)") {
        auto report = WeightFunction::poly_left(1.0).validate(grid);
        CHECK(report.positivity_pass);
        CHECK(report.monotone_pass);
        CHECK_FALSE(report.strict_convexity_pass);
        for (const auto& pt : report.failures) {
            CHECK(pt.u > -0.5 - 1e-9);
            CHECK(pt.u < 1.0 + 1e-9);
        }
        CHECK(report.right_tail_checked);
        CHECK(report.right_tail_pass);
    }
    SUBCASE("delta is degenerate") {
        auto report = WeightFunction::delta(0.0).validate(grid);
        CHECK(report.degenerate);
        CHECK_FALSE(report.all_pass());
    }
}

TEST_CASE("tail classification") {
    auto lg = WeightFunction::logistic().classify_tail();
    CHECK(lg.lambda == 0.0);
    CHECK(lg.family == TailFamily::Subexponential);
    CHECK(std::abs(lg.probed_lambda) <= 0.01);

    auto ex = WeightFunction::exponential(0.9).classify_tail();
    CHECK(ex.lambda == doctest::Approx(0.9));
    CHECK(ex.family == TailFamily::Exponential);
    CHECK(ex.probed_lambda == doctest::Approx(0.9).epsilon(0.011));

    auto pl = WeightFunction::poly_left(2.0).classify_tail();
    CHECK(pl.lambda == 0.0);
    CHECK(pl.family == TailFamily::Subexponential);
    CHECK(std::abs(pl.probed_lambda) <= 0.01);

    CHECK_THROWS_AS(WeightFunction::delta(0.0).classify_tail(), Error);

    // Idempotent: re-classification reproduces the same class.
    auto again = WeightFunction::exponential(0.9).classify_tail();
    CHECK(again.lambda == ex.lambda);
    CHECK(again.probed_lambda == doctest::Approx(ex.probed_lambda));
}

TEST_CASE("saturation is flagged, never silent infinity") {
    auto ex = WeightFunction::exponential(0.9);
    auto ev = ex.eval(-1e4);
    CHECK(ev.saturated);
    CHECK(std::isfinite(ev.U));
    CHECK(std::isfinite(ev.V));
    auto ok = ex.eval(-3.0);
    CHECK_FALSE(ok.saturated);
    CHECK_THROWS_AS(ex.eval(std::numeric_limits<double>::infinity()), Error);
}

TEST_CASE("delta kind carries the indicator penalties") {
    auto d = WeightFunction::delta(0.5);
    CHECK(d.U(0.4) == -1.0);
    CHECK(d.U(0.5) == -1.0);
    CHECK(d.U(0.6) == 0.0);
    CHECK(d.V(0.4) == 0.0);
    CHECK(d.V(0.6) == doctest::Approx(std::exp(0.5)));
}
