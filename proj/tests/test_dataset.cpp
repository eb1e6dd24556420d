#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "dataset.hpp"

using namespace wlim;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("wlim_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name, const std::string& content) const {
        auto p = path / name;
        std::ofstream out(p);
        out << content;
        return p.string();
    }
};

}  // namespace

TEST_CASE("schema parsing") {
    auto schema = parse_schema("age: numeric\nregion : categorical\ndefault: label\n");
    REQUIRE(schema.size() == 3);
    CHECK(schema[0].kind == ColumnKind::Numeric);
    CHECK(schema[1].name == "region");
    CHECK_THROWS_AS(parse_schema("a: numeric\n"), Error);          // no label
    CHECK_THROWS_AS(parse_schema("a: label\nb: label\n"), Error);  // two labels
    CHECK_THROWS_AS(parse_schema("a: widget\nb: label\n"), Error);
}

TEST_CASE("csv loading with categorical missing levels") {
    TempDir dir;
    auto csv = dir.file("d.csv",
                        "y,cat,num\n"
                        "1,A,0.5\n"
                        "0,B,1.5\n"
                        "0,,2.5\n"
                        "1,B,3.5\n"
                        "0,A,4.5\n"
                        "0,B,5.5\n");
    auto schema = parse_schema("y: label\ncat: categorical\nnum: numeric\n");
    auto ds = load_csv(csv, schema);
    // three levels {(missing), A, B}, drop-first: 2 indicators + 1 numeric
    CHECK(ds.dim() == 3);
    CHECK(ds.rows() == 6);
    CHECK(ds.minority_count() == 2);
    int indicators = 0;
    for (const auto& col : ds.encoder().columns) indicators += col.indicator ? 1 : 0;
    CHECK(indicators == 2);
}

TEST_CASE("csv error paths") {
    TempDir dir;
    auto schema = parse_schema("y: label\nnum: numeric\n");
    SUBCASE("constant numeric column is degenerate") {
        auto csv = dir.file("d.csv", "y,num\n1,2.0\n0,2.0\n0,2.0\n");
        CHECK_THROWS_WITH_AS(load_csv(csv, schema), doctest::Contains("degenerate"), Error);
    }
    SUBCASE("single-class labels") {
        auto csv = dir.file("d.csv", "y,num\n0,1.0\n0,2.0\n");
        CHECK_THROWS_WITH_AS(load_csv(csv, schema), doctest::Contains("empty class"), Error);
    }
    SUBCASE("unknown schema column") {
        auto csv = dir.file("d.csv", "y,other\n1,1.0\n0,2.0\n");
        CHECK_THROWS_WITH_AS(load_csv(csv, schema), doctest::Contains("unknown column"), Error);
    }
    SUBCASE("non-binary label") {
        auto csv = dir.file("d.csv", "y,num\n1,1.0\n0,2.0\n2,3.0\n");
        CHECK_THROWS_AS(load_csv(csv, schema), Error);
    }
    SUBCASE("rows with missing numerics are dropped") {
        auto csv = dir.file("d.csv", "y,num\n1,1.0\n0,\n0,2.0\n1,3.0\n");
        auto ds = load_csv(csv, schema);
        CHECK(ds.rows() == 3);
    }
}

TEST_CASE("encoder round-trips schema names and levels") {
    TempDir dir;
    auto csv =
        dir.file("d.csv", "y,cat,num\n1,A,0.5\n0,B,1.5\n0,C,2.5\n1,B,3.5\n0,A,4.5\n");
    auto schema = parse_schema("y: label\ncat: categorical\nnum: numeric\n");
    auto ds = load_csv(csv, schema);
    REQUIRE(ds.encoder().levels.size() == 1);
    CHECK(ds.encoder().levels[0].first == "cat");
    CHECK(ds.encoder().levels[0].second == std::vector<std::string>{"A", "B", "C"});
    // encoded names identify source column and level
    bool found = false;
    for (const auto& col : ds.encoder().columns)
        if (col.name() == "cat=B") found = true;
    CHECK(found);
}

TEST_CASE("standardization centers and scales") {
    Eigen::MatrixXd x(4, 1);
    x << 0.0, 2.0, 4.0, 6.0;
    auto ds = LabeledDataset::from_parts(x, {1, 0, 0, 1});
    auto std_ds = ds.standardized();
    CHECK(std::abs(std_ds.features().col(0).mean()) < 1e-12);
    double var =
        (std_ds.features().col(0).array() - std_ds.features().col(0).mean()).square().sum() / 3.0;
    CHECK(var == doctest::Approx(1.0));
}

TEST_CASE("stratified split") {
    Eigen::MatrixXd x(100, 1);
    std::vector<int> y(100, 0);
    for (int i = 0; i < 100; ++i) x(i, 0) = i;
    for (int i = 0; i < 10; ++i) y[static_cast<std::size_t>(i)] = 1;
    auto ds = LabeledDataset::from_parts(x, y);

    SUBCASE("80/0/20 stratification arithmetic") {
        auto parts = ds.split({0.8, 0.0, 0.2}, 7);
        CHECK(parts[0].minority_count() == 8);
        CHECK(parts[0].majority_count() == 72);
        CHECK(parts[2].minority_count() == 2);
        CHECK(parts[2].majority_count() == 18);
        CHECK(parts[1].rows() == 0);  // collapsed
        CHECK(parts[0].rows() + parts[2].rows() == 100);
    }
    SUBCASE("same seed gives identical splits") {
        auto a = ds.split({0.6, 0.2, 0.2}, 99);
        auto b = ds.split({0.6, 0.2, 0.2}, 99);
        for (int p = 0; p < 3; ++p) {
            REQUIRE(a[p].rows() == b[p].rows());
            CHECK((a[p].features() - b[p].features()).cwiseAbs().maxCoeff() == 0.0);
        }
    }
    SUBCASE("fractions must sum to one") { CHECK_THROWS_AS(ds.split({0.5, 0.5, 0.5}, 1), Error); }
    SUBCASE("a positive split with zero minority rows errors") {
        Eigen::MatrixXd small(4, 1);
        small << 0, 1, 2, 3;
        auto tiny = LabeledDataset::from_parts(small, {1, 0, 0, 0});
        CHECK_THROWS_WITH_AS(tiny.split({0.5, 0.25, 0.25}, 1), doctest::Contains("zero minority"),
                             Error);
    }
}

TEST_CASE("gaussian mixture generation") {
    MixtureComponent iso;
    iso.weight = 1.0;
    iso.mean = Eigen::VectorXd::Zero(2);
    iso.covariance = Eigen::MatrixXd::Identity(2, 2);

    SUBCASE("reproducible and shaped") {
        auto a = generate_gaussian_mixture({iso}, 4, 42);
        auto b = generate_gaussian_mixture({iso}, 4, 42);
        CHECK(a.rows() == 4);
        CHECK(a.cols() == 2);
        CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
        auto c = generate_gaussian_mixture({iso}, 4, 43);
        CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);
    }
    SUBCASE("law of large numbers at m = 1e5") {
        auto big = generate_gaussian_mixture({iso}, 100000, 7);
        CHECK(std::abs(big.col(0).mean()) < 0.02);
        CHECK(std::abs(big.col(1).mean()) < 0.02);
    }
    SUBCASE("benchmark mixture fractions within 3% at m = 1e4") {
        MixtureComponent hard, easy;
        hard.weight = 0.1;
        hard.mean.resize(2);
        hard.mean << 0.0, 2.0;
        hard.covariance = 0.3 * Eigen::MatrixXd::Identity(2, 2);
        easy.weight = 0.9;
        easy.mean.resize(2);
        easy.mean << 2.3, 2.3;
        easy.covariance = 0.2 * Eigen::MatrixXd::Identity(2, 2);
        auto sample = generate_gaussian_mixture({hard, easy}, 10000, 11);
        // assign each draw to the nearer component mean; the means are far
        // enough apart for this to identify the component
        int hard_count = 0;
        for (Eigen::Index i = 0; i < sample.rows(); ++i) {
            double dh = (sample.row(i).transpose() - hard.mean).squaredNorm();
            double de = (sample.row(i).transpose() - easy.mean).squaredNorm();
            if (dh < de) ++hard_count;
        }
        double frac = hard_count / 10000.0;
        CHECK(std::abs(frac - 0.1) < 0.03);
    }
    SUBCASE("m = 0 gives an empty matrix") {
        auto empty = generate_gaussian_mixture({iso}, 0, 1);
        CHECK(empty.rows() == 0);
    }
    SUBCASE("non-PSD covariance rejected") {
        MixtureComponent bad = iso;
        bad.covariance << 1.0, 2.0, 2.0, 1.0;  // indefinite
        CHECK_THROWS_WITH_AS(generate_gaussian_mixture({bad}, 10, 1), doctest::Contains("Cholesky"),
                             Error);
    }
    SUBCASE("weights must sum to one") {
        MixtureComponent half = iso;
        half.weight = 0.5;
        CHECK_THROWS_AS(generate_gaussian_mixture({half}, 10, 1), Error);
    }
}

TEST_CASE("surrounding diagnostic") {
    SUBCASE("four axis points at epsilon 0.5") {
        Eigen::MatrixXd pts(4, 2);
        pts << 1, 0, -1, 0, 0, 1, 0, -1;
        auto diag = check_surrounding(pts, Eigen::Vector2d::Zero(), 0.5, 10000, 5);
        CHECK(diag.pass);
        CHECK(diag.delta_hat == doctest::Approx(0.25));
        CHECK(diag.directions_probed == 10004);
    }
    SUBCASE("collinear points fail via the forced axis direction") {
        Eigen::MatrixXd pts(5, 2);
        pts << -2, 0, -1, 0, 0, 0, 1, 0, 2, 0;
        auto diag = check_surrounding(pts, Eigen::Vector2d::Zero(), 0.1, 200, 5);
        CHECK_FALSE(diag.pass);
        CHECK(diag.delta_hat == 0.0);
    }
    SUBCASE("standard normal cloud has half-space mass near Phi(-eps)") {
        MixtureComponent iso;
        iso.weight = 1.0;
        iso.mean = Eigen::VectorXd::Zero(2);
        iso.covariance = Eigen::MatrixXd::Identity(2, 2);
        auto pts = generate_gaussian_mixture({iso}, 10000, 17);
        auto diag = check_surrounding(pts, Eigen::Vector2d::Zero(), 0.1, 10000, 3);
        CHECK(diag.pass);
        double phi = 0.5 * std::erfc(0.1 / std::sqrt(2.0));  // P(Z > 0.1)
        CHECK(std::abs(diag.delta_hat - phi) < 0.03);
    }
    SUBCASE("monotone in epsilon") {
        MixtureComponent iso;
        iso.weight = 1.0;
        iso.mean = Eigen::VectorXd::Zero(2);
        iso.covariance = Eigen::MatrixXd::Identity(2, 2);
        auto pts = generate_gaussian_mixture({iso}, 2000, 23);
        double prev = 1.0;
        for (double eps : {0.05, 0.1, 0.2, 0.5, 1.0, 2.0}) {
            auto diag = check_surrounding(pts, Eigen::Vector2d::Zero(), eps, 500, 9);
            CHECK(diag.delta_hat <= prev + 1e-12);
            prev = diag.delta_hat;
        }
    }
    SUBCASE("input validation") {
        Eigen::MatrixXd pts(2, 2);
        pts << 1, 0, 0, 1;
        CHECK_THROWS_AS(check_surrounding(pts, Eigen::Vector2d::Zero(), 0.1, 50, 1), Error);
        CHECK_THROWS_AS(
            check_surrounding(Eigen::MatrixXd(0, 2), Eigen::Vector2d::Zero(), 0.1, 200, 1), Error);
    }
}

TEST_CASE("matrix csv round trip") {
    TempDir dir;
    Eigen::MatrixXd m(3, 2);
    m << 1.5, -2.25, 0.001, 7.0, -1e-8, 3.25;
    auto path = (dir.path / "m.csv").string();
    write_matrix_csv(path, m);
    auto back = load_matrix_csv(path);
    CHECK((m - back).cwiseAbs().maxCoeff() < 1e-15);
}
