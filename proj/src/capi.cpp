// C API implementation: translates between the extern-C surface and the core
// library, converting exceptions into status codes with a thread-local
// message.
#include "wlim.h"

#include <cstring>
#include <string>

#include <json.hpp>

#include "common.hpp"
#include "dataset.hpp"
#include "experiments.hpp"
#include "fit.hpp"
#include "limits.hpp"
#include "metrics.hpp"
#include "upsample.hpp"
#include "weights.hpp"

using nlohmann::json;

namespace {

thread_local std::string g_last_error;

wlim_status to_status(const wlim::Error& e) {
    switch (e.code()) {
        case wlim::ErrorCode::InvalidArgument: return WLIM_ERR_INVALID;
        case wlim::ErrorCode::Numeric: return WLIM_ERR_NUMERIC;
        case wlim::ErrorCode::Io: return WLIM_ERR_IO;
    }
    return WLIM_ERR_INVALID;
}

template <typename Fn>
wlim_status guarded(Fn&& fn) {
    try {
        fn();
        return WLIM_OK;
    } catch (const wlim::Error& e) {
        g_last_error = e.what();
        return to_status(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return WLIM_ERR_NUMERIC;
    } catch (...) {
        g_last_error = "unknown error";
        return WLIM_ERR_NUMERIC;
    }
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void require(bool cond, const char* what) {
    if (!cond) wlim::fail_invalid(what);
}

Eigen::MatrixXd to_matrix(const double* data, size_t rows, size_t cols) {
    require(data != nullptr && rows > 0 && cols > 0, "null or empty matrix argument");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = data[r * cols + c];
    return m;
}

std::vector<double> to_vector(const double* data, size_t n, const char* what) {
    require(data != nullptr && n > 0, what);
    return std::vector<double>(data, data + n);
}

wlim::TiltSource source_from_spec(const std::string& spec) {
    if (spec.rfind("gaussian:", 0) == 0) {
        auto comp = wlim::parse_gaussian_spec(spec);
        return wlim::TiltSource{wlim::GaussianSource{comp.mean, comp.covariance}};
    }
    return wlim::TiltSource{wlim::parse_points_spec(spec)};
}

json json_vector(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

}  // namespace

struct wlim_weight {
    wlim::WeightFunction fn;
};

struct wlim_dataset {
    wlim::LabeledDataset ds;
};

extern "C" {

const char* wlim_version(void) { return wlim::version_string(); }

const char* wlim_last_error(void) { return g_last_error.c_str(); }

void wlim_string_free(char* s) { delete[] s; }

void wlim_buffer_free(double* p) { delete[] p; }

wlim_status wlim_weight_create(const char* spec, wlim_weight** out) {
    return guarded([&] {
        require(spec && out, "null argument");
        *out = new wlim_weight{wlim::WeightFunction::parse(spec)};
    });
}

void wlim_weight_free(wlim_weight* w) { delete w; }

wlim_status wlim_weight_eval(const wlim_weight* w, double u, double values[5], int* saturated) {
    return guarded([&] {
        require(w && values, "null argument");
        auto ev = w->fn.eval(u);
        values[0] = ev.w;
        values[1] = ev.dw;
        values[2] = ev.U;
        values[3] = ev.V;
        values[4] = ev.dV;
        if (saturated) *saturated = ev.saturated ? 1 : 0;
    });
}

wlim_status wlim_weight_validate(const wlim_weight* w, double lo, double hi, int points,
                                 char** json_out) {
    return guarded([&] {
        require(w && json_out, "null argument");
        require(points >= 2 && lo < hi, "validation grid must have lo < hi and >= 2 points");
        std::vector<double> grid(static_cast<std::size_t>(points));
        for (int i = 0; i < points; ++i)
            grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
        auto report = w->fn.validate(grid);
        json j;
        j["weight"] = w->fn.spec();
        j["degenerate"] = report.degenerate;
        j["positivity_pass"] = report.positivity_pass;
        j["monotone_pass"] = report.monotone_pass;
        j["strict_convexity_pass"] = report.strict_convexity_pass;
        j["all_pass"] = report.all_pass();
        j["right_tail_checked"] = report.right_tail_checked;
        if (report.right_tail_checked) {
            j["right_tail_sup"] = report.right_tail_sup;
            j["right_tail_pass"] = report.right_tail_pass;
        }
        json failures = json::array();
        for (std::size_t i = 0; i < report.failures.size() && i < 32; ++i) {
            const auto& pt = report.failures[i];
            failures.push_back({{"u", pt.u},
                                {"positivity", pt.positivity},
                                {"monotone", pt.monotone},
                                {"strict_convexity", pt.strict_convexity}});
        }
        j["failures"] = failures;
        j["failure_count"] = report.failures.size();
        *json_out = dup_string(j.dump(2));
    });
}

wlim_status wlim_weight_tail(const wlim_weight* w, char** json_out) {
    return guarded([&] {
        require(w && json_out, "null argument");
        auto tc = w->fn.classify_tail();
        json j;
        j["weight"] = w->fn.spec();
        j["lambda"] = tc.lambda;
        j["family"] =
            tc.family == wlim::TailFamily::Subexponential ? "subexponential" : "exponential";
        j["xi"] = tc.xi;
        j["right_tail_bounded"] = tc.right_tail_bounded;
        j["probed_lambda"] = tc.probed_lambda;
        *json_out = dup_string(j.dump(2));
    });
}

wlim_status wlim_dataset_load_csv(const char* csv_path, const char* schema_path, int standardize,
                                  wlim_dataset** out) {
    return guarded([&] {
        require(csv_path && schema_path && out, "null argument");
        wlim::CsvOptions opts;
        opts.standardize = standardize != 0;
        auto schema = wlim::load_schema(schema_path);
        *out = new wlim_dataset{wlim::load_csv(csv_path, schema, opts)};
    });
}

wlim_status wlim_dataset_from_arrays(const double* features, size_t rows, size_t cols,
                                     const int* labels, wlim_dataset** out) {
    return guarded([&] {
        require(labels && out, "null argument");
        Eigen::MatrixXd f = to_matrix(features, rows, cols);
        std::vector<int> y(labels, labels + rows);
        *out = new wlim_dataset{wlim::LabeledDataset::from_parts(std::move(f), std::move(y))};
    });
}

void wlim_dataset_free(wlim_dataset* ds) { delete ds; }

wlim_status wlim_dataset_info(const wlim_dataset* ds, char** json_out) {
    return guarded([&] {
        require(ds && json_out, "null argument");
        json j;
        j["rows"] = static_cast<long long>(ds->ds.rows());
        j["dim"] = static_cast<long long>(ds->ds.dim());
        j["minority"] = static_cast<long long>(ds->ds.minority_count());
        j["majority"] = static_cast<long long>(ds->ds.majority_count());
        json cols = json::array();
        for (const auto& c : ds->ds.encoder().columns) cols.push_back(c.name());
        j["columns"] = cols;
        *json_out = dup_string(j.dump(2));
    });
}

wlim_status wlim_fit(const wlim_weight* w, const wlim_dataset* ds, const char* options,
                     char** json_out) {
    return guarded([&] {
        require(w && ds && json_out, "null argument");
        wlim::FitOptions opts;
        if (options && *options) {
            auto cfg = wlim::ExperimentConfig::parse([&] {
                std::string text(options);
                for (auto& c : text)
                    if (c == ',') c = '\n';
                return text;
            }());
            cfg.restrict_keys({"warm", "max_iter", "tol", "surrounding"});
            std::string warm = cfg.get("warm", "zero");
            if (warm == "gaussian")
                opts.warm_start = wlim::WarmStart::GaussianLda;
            else if (warm != "zero")
                wlim::fail_invalid("warm must be zero or gaussian");
            opts.max_iterations = static_cast<int>(cfg.get_int("max_iter", opts.max_iterations));
            opts.tolerance = cfg.get_double("tol", opts.tolerance);
            opts.check_surrounding = cfg.get_int("surrounding", 1) != 0;
        }
        auto r = wlim::fit(w->fn, ds->ds, opts);
        json j;
        j["weight"] = w->fn.spec();
        j["alpha"] = r.alpha;
        j["beta"] = json_vector(r.beta);
        j["grad_norm"] = r.grad_norm;
        j["loss"] = r.value;
        j["iterations"] = r.iterations;
        j["converged"] = r.converged;
        j["warm_start"] = r.warm_start_used == wlim::WarmStart::GaussianLda ? "gaussian" : "zero";
        if (r.surrounding) {
            j["surrounding"] = {{"delta_hat", r.surrounding->delta_hat},
                                {"epsilon", r.surrounding->epsilon},
                                {"directions", r.surrounding->directions_probed},
                                {"pass", r.surrounding->pass}};
        }
        j["warnings"] = r.warnings;
        *json_out = dup_string(j.dump(2));
    });
}

wlim_status wlim_score(const double* features, size_t rows, size_t cols, double alpha,
                       const double* beta, double* out) {
    return guarded([&] {
        require(beta && out, "null argument");
        Eigen::MatrixXd f = to_matrix(features, rows, cols);
        Eigen::Map<const Eigen::VectorXd> b(beta, static_cast<Eigen::Index>(cols));
        Eigen::VectorXd s = f * b;
        for (size_t i = 0; i < rows; ++i) out[i] = alpha + s(static_cast<Eigen::Index>(i));
    });
}

wlim_status wlim_solve_limit(double lambda, const char* majority_spec, const double* minority,
                             size_t rows, size_t cols, char** json_out) {
    return guarded([&] {
        require(majority_spec && json_out, "null argument");
        auto majority = source_from_spec(majority_spec);
        Eigen::MatrixXd min_m = to_matrix(minority, rows, cols);
        auto r = wlim::solve_limit(lambda, majority, min_m);
        json j;
        j["lambda"] = r.lambda;
        j["beta_star"] = json_vector(r.beta_star);
        j["residual"] = r.residual;
        j["iterations"] = r.solver_iterations;
        j["warnings"] = r.warnings;
        *json_out = dup_string(j.dump(2));
    });
}

wlim_status wlim_solve_limit_gaussian(double lambda, const double* mu0, const double* cov0,
                                      const double* mu1, const double* cov1, size_t d,
                                      double* out_beta) {
    return guarded([&] {
        require(mu0 && cov0 && mu1 && cov1 && out_beta && d > 0, "null argument");
        Eigen::Map<const Eigen::VectorXd> m0(mu0, static_cast<Eigen::Index>(d));
        Eigen::Map<const Eigen::VectorXd> m1(mu1, static_cast<Eigen::Index>(d));
        Eigen::MatrixXd s0 = to_matrix(cov0, d, d);
        Eigen::MatrixXd s1 = to_matrix(cov1, d, d);
        Eigen::VectorXd beta = wlim::solve_limit_gaussian(lambda, m0, s0, m1, s1);
        for (size_t i = 0; i < d; ++i) out_beta[i] = beta(static_cast<Eigen::Index>(i));
    });
}

wlim_status wlim_roc(const double* scores0, size_t n0, const double* scores1, size_t n1,
                     char** json_out) {
    return guarded([&] {
        require(json_out, "null argument");
        auto s0 = to_vector(scores0, n0, "majority scores empty");
        auto s1 = to_vector(scores1, n1, "minority scores empty");
        auto curve = wlim::roc(s0, s1);
        json j;
        j["thresholds"] = curve.thresholds;
        j["fpr"] = curve.fpr;
        j["tpr"] = curve.tpr;
        j["auc"] = wlim::auc(curve);
        *json_out = dup_string(j.dump(2));
    });
}

wlim_status wlim_pauc(const double* scores0, size_t n0, const double* scores1, size_t n1,
                      const char* orientation, double bound, int bootstrap, double level,
                      uint64_t seed, char** json_out) {
    return guarded([&] {
        require(orientation && json_out, "null argument");
        auto s0 = to_vector(scores0, n0, "majority scores empty");
        auto s1 = to_vector(scores1, n1, "minority scores empty");
        std::string mode(orientation);
        wlim::PaucOrientation orient;
        if (mode == "spec" || mode == "specificity")
            orient = wlim::PaucOrientation::Specificity;
        else if (mode == "sens" || mode == "sensitivity")
            orient = wlim::PaucOrientation::Sensitivity;
        else
            wlim::fail_invalid("orientation must be spec or sens");
        wlim::PaucReport report;
        if (bootstrap > 0) {
            wlim::BootstrapOptions opts;
            opts.replicates = bootstrap;
            opts.level = level;
            opts.seed = seed;
            report = wlim::bootstrap_pauc(s0, s1, orient, bound, opts);
        } else {
            report = wlim::pauc(wlim::roc(s0, s1), orient, bound);
        }
        json j;
        j["orientation"] = mode;
        j["bound"] = report.bound;
        j["area"] = report.area;
        j["pauc"] = report.pauc;
        if (report.ci)
            j["ci"] = {{"low", report.ci->low}, {"high", report.ci->high}, {"level", report.ci->level}};
        *json_out = dup_string(j.dump(2));
    });
}

wlim_status wlim_calibrate(const double* scores1, size_t n1, double target_tpr,
                           double* out_threshold) {
    return guarded([&] {
        require(out_threshold, "null argument");
        auto s1 = to_vector(scores1, n1, "minority scores empty");
        *out_threshold = wlim::calibrate_threshold(s1, target_tpr);
    });
}

wlim_status wlim_upsample_fstar(const char* majority_spec, const double* beta, size_t cols, size_t m,
                                uint64_t seed, double** out) {
    return guarded([&] {
        require(majority_spec && beta && out && m > 0, "null argument");
        auto majority = source_from_spec(majority_spec);
        Eigen::Map<const Eigen::VectorXd> b(beta, static_cast<Eigen::Index>(cols));
        Eigen::MatrixXd rows =
            wlim::sample_fstar(majority, b, static_cast<Eigen::Index>(m), seed);
        auto* buf = new double[static_cast<size_t>(rows.rows()) * static_cast<size_t>(rows.cols())];
        for (Eigen::Index r = 0; r < rows.rows(); ++r)
            for (Eigen::Index c = 0; c < rows.cols(); ++c)
                buf[static_cast<size_t>(r) * static_cast<size_t>(rows.cols()) +
                    static_cast<size_t>(c)] = rows(r, c);
        *out = buf;
    });
}

wlim_status wlim_upsample_smote(const double* minority, size_t rows, size_t cols, int k, size_t m,
                                uint64_t seed, double** out) {
    return guarded([&] {
        require(out && m > 0, "null argument");
        Eigen::MatrixXd min_m = to_matrix(minority, rows, cols);
        Eigen::MatrixXd synth = wlim::smote(min_m, k, static_cast<Eigen::Index>(m), seed);
        auto* buf = new double[static_cast<size_t>(synth.rows()) * static_cast<size_t>(synth.cols())];
        for (Eigen::Index r = 0; r < synth.rows(); ++r)
            for (Eigen::Index c = 0; c < synth.cols(); ++c)
                buf[static_cast<size_t>(r) * static_cast<size_t>(synth.cols()) +
                    static_cast<size_t>(c)] = synth(r, c);
        *out = buf;
    });
}

wlim_status wlim_run_experiment(const char* name, const char* config, const char* out_dir,
                                char** json_summary) {
    return guarded([&] {
        require(name && out_dir, "null argument");
        auto cfg = wlim::ExperimentConfig::parse(config ? config : "");
        auto summary = wlim::run_experiment(name, cfg, out_dir);
        if (json_summary) *json_summary = dup_string(summary.dump(2));
    });
}

}  // extern "C"
