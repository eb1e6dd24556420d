#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rng.hpp"
#include "simplex_lp.hpp"
#include "upsample.hpp"

using namespace wlim;

TEST_CASE("tilted gaussian sampling") {
    GaussianSource g{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1)};
    TiltSource majority{g};
    Eigen::VectorXd beta(1);
    beta << 0.5;
    auto draws = sample_fstar(majority, beta, 100000, 7);
    REQUIRE(draws.rows() == 100000);
    CHECK(std::abs(draws.col(0).mean() - 0.5) < 0.01);
    double var = (draws.col(0).array() - draws.col(0).mean()).square().sum() / (draws.rows() - 1.0);
    CHECK(std::abs(var - 1.0) < 0.02);  // tilting shifts the mean, not the spread
}

TEST_CASE("zero tilt resampling is a plain bootstrap") {
    Rng rng(3);
    Eigen::MatrixXd sample(50, 1);
    for (int i = 0; i < 50; ++i) sample(i, 0) = static_cast<double>(i);
    TiltSource majority{sample};
    auto draws = sample_fstar(majority, Eigen::VectorXd::Zero(1), 20000, 11);
    // every draw is one of the original atoms, with near-uniform frequencies
    std::vector<int> counts(50, 0);
    for (Eigen::Index i = 0; i < draws.rows(); ++i) {
        double v = draws(i, 0);
        REQUIRE(v == std::floor(v));
        REQUIRE(v >= 0.0);
        REQUIRE(v < 50.0);
        counts[static_cast<std::size_t>(v)]++;
    }
    for (int c : counts) CHECK(std::abs(c / 20000.0 - 0.02) < 0.006);
}

TEST_CASE("two-point tilt matches the closed-form odds") {
    Eigen::MatrixXd sample(2, 1);
    sample << 0.0, 1.0;
    TiltSource majority{sample};
    Eigen::VectorXd beta(1);
    beta << std::log(3.0);
    auto draws = sample_fstar(majority, beta, 10000, 13);
    double ones = draws.col(0).sum() / 10000.0;
    CHECK(std::abs(ones - 0.75) < 0.01);
}

TEST_CASE("overly extreme tilts on an adequate sample are rejected") {
    Rng rng(5);
    Eigen::MatrixXd sample(100, 1);
    for (int i = 0; i < 100; ++i) sample(i, 0) = rng.normal();
    TiltSource majority{sample};
    Eigen::VectorXd beta(1);
    beta << 50.0;  // weight collapses onto the maximum
    CHECK_THROWS_WITH_AS(sample_fstar(majority, beta, 100, 1),
                         doctest::Contains("effective sample size"), Error);
}

TEST_CASE("upsampling equivalence on the 1-D toy") {
    GaussianSource g{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1)};
    TiltSource majority{g};
    Eigen::VectorXd xbar(1);
    xbar << 0.5;

    SUBCASE("quadrature residual vanishes at the matched intercept") {
        auto check = upsampling_equivalence_check(WeightFunction::logistic(), majority, xbar, 0.01);
        CHECK(check.beta_star(0) == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(check.foc_residual <= 1e-6);
        CHECK(check.mc_standard_error == 0.0);
        CHECK(check.alpha_hat ==
              doctest::Approx(std::log(0.01 / 0.99) - check.psi_star).epsilon(1e-12));
    }
    SUBCASE("the mixing fraction moves the intercept, not the slope") {
        auto a = upsampling_equivalence_check(WeightFunction::logistic(), majority, xbar, 0.001);
        auto b = upsampling_equivalence_check(WeightFunction::logistic(), majority, xbar, 0.01);
        auto c = upsampling_equivalence_check(WeightFunction::logistic(), majority, xbar, 0.1);
        CHECK(a.beta_star(0) == b.beta_star(0));
        CHECK(b.beta_star(0) == c.beta_star(0));
        double shift_ab = b.alpha_hat - a.alpha_hat;
        double expected = std::log(0.01 / 0.99) - std::log(0.001 / 0.999);
        CHECK(shift_ab == doctest::Approx(expected).epsilon(1e-12));
        CHECK(a.foc_residual <= 1e-6);
        CHECK(c.foc_residual <= 1e-6);
    }
    SUBCASE("matched means give a zero tilt and the plain log odds") {
        Eigen::VectorXd zero(1);
        zero << 0.0;
        auto check = upsampling_equivalence_check(WeightFunction::logistic(), majority, zero, 0.2);
        CHECK(std::abs(check.beta_star(0)) < 1e-9);
        CHECK(check.alpha_hat == doctest::Approx(std::log(0.2 / 0.8)).epsilon(1e-9));
        CHECK(check.foc_residual <= 1e-9);
    }
    SUBCASE("exponential-tail weights are rejected") {
        CHECK_THROWS_WITH_AS(
            upsampling_equivalence_check(WeightFunction::exponential(0.5), majority, xbar, 0.01),
            doctest::Contains("subexponential"), Error);
    }
    SUBCASE("sample-average route reports an exact zero residual too") {
        Rng rng(7);
        Eigen::MatrixXd sample(20000, 1);
        for (Eigen::Index i = 0; i < sample.rows(); ++i) sample(i, 0) = rng.normal();
        TiltSource emp{sample};
        auto check = upsampling_equivalence_check(WeightFunction::logistic(), emp, xbar, 0.01);
        CHECK(check.foc_residual <= 1e-8);
    }
    SUBCASE("higher-dimensional gaussians fall back to monte carlo") {
        GaussianSource g4{Eigen::VectorXd::Zero(4), Eigen::MatrixXd::Identity(4, 4)};
        TiltSource majority4{g4};
        Eigen::VectorXd target = Eigen::VectorXd::Constant(4, 0.3);
        auto check = upsampling_equivalence_check(WeightFunction::logistic(), majority4, target,
                                                  0.05, 50000, 3);
        CHECK(check.mc_standard_error > 0.0);
        CHECK(check.foc_residual <= 3.0 * check.mc_standard_error + 1e-9);
    }
}

TEST_CASE("smote interpolation") {
    SUBCASE("identical minority points produce identical synthetics") {
        Eigen::MatrixXd same(5, 2);
        same.setConstant(1.5);
        auto synth = smote(same, 2, 100, 3);
        CHECK((synth.array() - 1.5).abs().maxCoeff() == 0.0);
    }
    SUBCASE("two points interpolate along their segment") {
        Eigen::MatrixXd pair(2, 2);
        pair << 0.0, 0.0, 2.0, 1.0;
        auto synth = smote(pair, 1, 200, 5);
        for (Eigen::Index i = 0; i < synth.rows(); ++i) {
            double t = synth(i, 0) / 2.0;
            CHECK(t >= 0.0);
            CHECK(t <= 1.0);
            CHECK(synth(i, 1) == doctest::Approx(t).epsilon(1e-12));
        }
    }
    SUBCASE("synthetics stay in the convex hull of the minority") {
        Rng rng(9);
        Eigen::MatrixXd minority(12, 2);
        for (Eigen::Index i = 0; i < 12; ++i) {
            minority(i, 0) = rng.normal();
            minority(i, 1) = rng.normal();
        }
        auto synth = smote(minority, 5, 1000, 11);
        for (Eigen::Index i = 0; i < synth.rows(); ++i) {
            // hull membership: the margin LP is feasible (>= 0), infeasible is -1
            double margin = hull_interior_margin(minority, synth.row(i).transpose());
            CHECK(margin >= -1e-12);
        }
    }
    SUBCASE("needs k+1 rows") {
        Eigen::MatrixXd tiny(3, 1);
        tiny << 0, 1, 2;
        CHECK_THROWS_WITH_AS(smote(tiny, 3, 10, 1), doctest::Contains("k+1"), Error);
        CHECK_THROWS_AS(smote(tiny, 0, 10, 1), Error);
    }
}
