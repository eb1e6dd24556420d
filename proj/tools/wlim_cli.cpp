// Command-line front end. Talks to the library exclusively through the C API
// in wlim.h; structured results are printed as JSON, tables as CSV.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wlim.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumeric = 2;

class CliError : public std::runtime_error {
public:
    CliError(int code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    int code() const { return code_; }

private:
    int code_;
};

void check(wlim_status status) {
    if (status == WLIM_OK) return;
    std::string message = wlim_last_error();
    if (status == WLIM_ERR_NUMERIC) throw CliError(kExitNumeric, message);
    throw CliError(kExitUsage, message);
}

std::string take_string(char* s) {
    std::string out = s ? s : "";
    wlim_string_free(s);
    return out;
}

std::vector<double> read_scores(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CliError(kExitUsage, "cannot open score file " + path);
    std::vector<double> out;
    std::string line;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            if (cell.find_first_not_of(" \t\r\n") == std::string::npos) continue;
            try {
                out.push_back(std::stod(cell));
            } catch (const std::exception&) {
                if (out.empty()) continue;  // tolerate a header line
                throw CliError(kExitUsage, "non-numeric score in " + path + ": " + cell);
            }
        }
    }
    if (out.empty()) throw CliError(kExitUsage, "no scores found in " + path);
    return out;
}

struct FlatMatrix {
    std::vector<double> data;
    size_t rows = 0, cols = 0;
};

// Points given either as "inline:..." (';' between rows, ',' between
// coordinates; a plain comma list is a 1-D point set) or as a CSV path,
// optionally prefixed "csv:".
FlatMatrix read_points(const std::string& spec) {
    std::vector<std::vector<double>> parsed;
    if (spec.rfind("inline:", 0) == 0) {
        std::string body = spec.substr(7);
        bool has_semi = body.find(';') != std::string::npos;
        std::stringstream rows_ss(body);
        std::string row;
        while (std::getline(rows_ss, row, ';')) {
            if (row.empty()) continue;
            std::vector<double> r;
            std::stringstream cell_ss(row);
            std::string cell;
            while (std::getline(cell_ss, cell, ','))
                if (!cell.empty()) r.push_back(std::stod(cell));
            if (has_semi)
                parsed.push_back(r);
            else
                for (double v : r) parsed.push_back({v});
        }
    } else {
        std::string path = spec.rfind("csv:", 0) == 0 ? spec.substr(4) : spec;
        std::ifstream in(path);
        if (!in) throw CliError(kExitUsage, "cannot open points file " + path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
            std::vector<double> r;
            std::stringstream ss(line);
            std::string cell;
            bool ok = true;
            while (std::getline(ss, cell, ',')) {
                try {
                    r.push_back(std::stod(cell));
                } catch (const std::exception&) {
                    ok = false;
                    break;
                }
            }
            if (!ok) {
                if (parsed.empty()) continue;  // header line
                throw CliError(kExitUsage, "non-numeric row in " + path);
            }
            parsed.push_back(r);
        }
    }
    FlatMatrix out;
    out.rows = parsed.size();
    out.cols = parsed.empty() ? 0 : parsed.front().size();
    for (const auto& r : parsed) {
        if (r.size() != out.cols) throw CliError(kExitUsage, "ragged point rows in " + spec);
        for (double v : r) out.data.push_back(v);
    }
    if (out.rows == 0) throw CliError(kExitUsage, "no points in " + spec);
    return out;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text << std::endl;
    } else {
        std::ofstream out(out_path);
        if (!out) throw CliError(kExitUsage, "cannot write " + out_path);
        out << text << std::endl;
        std::cout << "wrote " << out_path << std::endl;
    }
}

uint64_t default_seed() {
    if (const char* env = std::getenv("WLIM_SEED")) {
        try {
            return static_cast<uint64_t>(std::stoull(env));
        } catch (const std::exception&) {
            throw CliError(kExitUsage, std::string("WLIM_SEED is not an integer: ") + env);
        }
    }
    return 20240601;
}

// Assemble experiment config text from an optional key=value file plus
// flag-provided overrides.
std::string build_config(const std::string& config_path,
                         const std::map<std::string, std::string>& overrides) {
    std::map<std::string, std::string> values;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw CliError(kExitUsage, "cannot open config file " + config_path);
        std::string line;
        while (std::getline(in, line)) {
            auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            auto trim = [](std::string s) {
                auto b = s.find_first_not_of(" \t\r\n");
                if (b == std::string::npos) return std::string();
                auto e = s.find_last_not_of(" \t\r\n");
                return s.substr(b, e - b + 1);
            };
            values[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
        }
    }
    for (const auto& [key, value] : overrides)
        if (!value.empty()) values[key] = value;
    std::ostringstream out;
    for (const auto& [key, value] : values) out << key << '=' << value << '\n';
    return out.str();
}

struct WeightHandle {
    explicit WeightHandle(const std::string& spec) { check(wlim_weight_create(spec.c_str(), &w)); }
    ~WeightHandle() { wlim_weight_free(w); }
    WeightHandle(const WeightHandle&) = delete;
    WeightHandle& operator=(const WeightHandle&) = delete;
    wlim_weight* w = nullptr;
};

struct DatasetHandle {
    DatasetHandle(const std::string& csv, const std::string& schema, bool standardize) {
        check(wlim_dataset_load_csv(csv.c_str(), schema.c_str(), standardize ? 1 : 0, &ds));
    }
    ~DatasetHandle() { wlim_dataset_free(ds); }
    DatasetHandle(const DatasetHandle&) = delete;
    DatasetHandle& operator=(const DatasetHandle&) = delete;
    wlim_dataset* ds = nullptr;
};

int run(int argc, char** argv) {
    CLI::App app{"weighted linear discriminants for imbalanced binary classification"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(wlim_version()));

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "fit a weight-function classifier on a CSV dataset");
    std::string fit_weight = "logistic", fit_data, fit_schema, fit_warm = "zero", fit_out;
    bool fit_standardize = false;
    fit_cmd->add_option("--weight", fit_weight, "logistic | exp:<lambda> | polyleft:<k> | delta:<u0>");
    fit_cmd->add_option("--data", fit_data, "CSV file with header row")->required();
    fit_cmd->add_option("--schema", fit_schema, "schema file (column:kind per line)")->required();
    fit_cmd->add_flag("--standardize", fit_standardize, "center/scale encoded features");
    fit_cmd->add_option("--warm", fit_warm, "warm start: zero | gaussian");
    fit_cmd->add_option("--out", fit_out, "write the JSON result here instead of stdout");

    // limit
    auto* limit_cmd = app.add_subcommand("limit", "solve for the infinite-imbalance coefficients");
    double limit_lambda = 0.0;
    std::string limit_majority, limit_minority, limit_out;
    limit_cmd->add_option("--lambda", limit_lambda, "left-tail exponent in [0,1)")->required();
    limit_cmd->add_option("--majority", limit_majority,
                          "gaussian:<spec> | csv:<path> | inline:<points>")->required();
    limit_cmd->add_option("--minority", limit_minority, "csv:<path> | inline:<points>")->required();
    limit_cmd->add_option("--out", limit_out, "write the JSON result here");

    // roc
    auto* roc_cmd = app.add_subcommand("roc", "ROC curve and AUC from score files");
    std::string roc_s0, roc_s1, roc_curve_out, roc_out;
    roc_cmd->add_option("--scores0", roc_s0, "majority-class scores (one per line)")->required();
    roc_cmd->add_option("--scores1", roc_s1, "minority-class scores")->required();
    roc_cmd->add_option("--curve", roc_curve_out, "write fpr,tpr CSV here");
    roc_cmd->add_option("--out", roc_out, "write the JSON result here");

    // pauc
    auto* pauc_cmd = app.add_subcommand("pauc", "normalized partial AUC over a band");
    std::string pauc_s0, pauc_s1, pauc_orient = "spec", pauc_out;
    double pauc_bound = 0.1, pauc_level = 0.9;
    int pauc_boot = 0;
    uint64_t pauc_seed = 0;
    bool pauc_seed_set = false;
    pauc_cmd->add_option("--scores0", pauc_s0, "majority-class scores")->required();
    pauc_cmd->add_option("--scores1", pauc_s1, "minority-class scores")->required();
    pauc_cmd->add_option("--orient", pauc_orient, "spec (FPR band) or sens (TPR band)");
    pauc_cmd->add_option("--bound", pauc_bound, "band edge in (0,1]");
    pauc_cmd->add_option("--boot", pauc_boot, "bootstrap replicates (0 = no interval)");
    pauc_cmd->add_option("--level", pauc_level, "confidence level for the interval");
    pauc_cmd->add_option("--seed", pauc_seed, "bootstrap seed")->each([&](const std::string&) {
        pauc_seed_set = true;
    });
    pauc_cmd->add_option("--out", pauc_out, "write the JSON result here");

    // calibrate
    auto* cal_cmd = app.add_subcommand("calibrate", "threshold achieving a target training TPR");
    std::string cal_s1, cal_out;
    double cal_tpr = 0.99;
    cal_cmd->add_option("--scores1", cal_s1, "minority-class training scores")->required();
    cal_cmd->add_option("--tpr", cal_tpr, "target true positive rate in (0,1]");
    cal_cmd->add_option("--out", cal_out, "write the JSON result here");

    // upsample
    auto* up_cmd = app.add_subcommand("upsample", "synthetic minority rows (fstar or smote)");
    std::string up_method = "fstar", up_majority, up_minority, up_beta, up_out;
    int up_k = 5;
    uint64_t up_m = 1000, up_seed = 0;
    bool up_seed_set = false;
    up_cmd->add_option("--method", up_method, "fstar | smote");
    up_cmd->add_option("--majority", up_majority, "majority law for fstar (gaussian:/csv:/inline:)");
    up_cmd->add_option("--beta", up_beta, "tilt coefficients for fstar, comma separated");
    up_cmd->add_option("--minority", up_minority, "minority rows for smote (csv:/inline:)");
    up_cmd->add_option("--k", up_k, "neighbor count for smote");
    up_cmd->add_option("--m", up_m, "number of synthetic rows");
    up_cmd->add_option("--seed", up_seed, "sampling seed")->each([&](const std::string&) {
        up_seed_set = true;
    });
    up_cmd->add_option("--out", up_out, "output CSV path")->required();

    // validate-weights
    auto* val_cmd = app.add_subcommand("validate-weights", "check the regularity conditions");
    std::string val_weight = "logistic", val_out;
    double val_lo = -10.0, val_hi = 10.0;
    int val_points = 2001;
    val_cmd->add_option("--weight", val_weight, "weight spec");
    val_cmd->add_option("--lo", val_lo, "grid start");
    val_cmd->add_option("--hi", val_hi, "grid end");
    val_cmd->add_option("--points", val_points, "grid size");
    val_cmd->add_option("--out", val_out, "write the JSON report here");

    // experiments
    struct ExpFlags {
        std::string config, out_dir = "wlim-out";
        std::map<std::string, std::string> overrides;
    };
    auto add_experiment = [&](const char* name, const char* help,
                              const std::vector<std::pair<std::string, std::string>>& keys) {
        auto* cmd = app.add_subcommand(name, help);
        auto flags = std::make_shared<ExpFlags>();
        cmd->add_option("--config", flags->config, "key=value config file");
        cmd->add_option("--out", flags->out_dir, "output directory");
        for (const auto& [key, help_text] : keys) {
            auto key_copy = key;
            cmd->add_option_function<std::string>(
                "--" + key, [flags, key_copy](const std::string& v) { flags->overrides[key_copy] = v; },
                help_text);
        }
        return std::make_pair(cmd, flags);
    };

    auto [conv_cmd, conv_flags] = add_experiment(
        "convergence", "replicated coefficient study over growing majority size",
        {{"weights", "comma list of weight specs"},
         {"grid", "comma list of majority sizes"},
         {"reps", "replications per cell"},
         {"seed", "root seed"},
         {"minority", "minority points (inline:/csv:)"},
         {"majority", "majority law (gaussian:<spec>)"}});
    auto [study_cmd, study_flags] = add_experiment(
        "pauc-study", "partial-AUC comparison on the 2-D benchmark mixture",
        {{"weights", "comma list of weight specs"},
         {"N", "majority training size"},
         {"reps", "replications"},
         {"test_size", "test draws per class"},
         {"minority_size", "fixed minority training size"},
         {"sens_band", "sensitivity band edge"},
         {"spec_band", "specificity band edge"},
         {"seed", "root seed"}});
    auto [delta_cmd, delta_flags] = add_experiment(
        "delta-demo", "grid search showing the point-mass weight degenerating",
        {{"u0", "threshold location"},
         {"N", "majority sample size"},
         {"seed", "root seed"},
         {"minority", "minority points"},
         {"majority", "majority law"},
         {"alpha_range", "alpha grid lo,hi"},
         {"beta_range", "beta grid lo,hi"},
         {"step", "grid step"}});
    auto [proto_cmd, proto_flags] = add_experiment(
        "protocol", "fit on train, calibrate threshold, report test TPR/TNR",
        {{"train", "training CSV"},
         {"test", "test CSV"},
         {"schema", "schema file"},
         {"weights", "comma list of weight specs"},
         {"target_tpr", "training TPR target"},
         {"standardize", "1 to center/scale features"}});

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);  // prints help/usage text
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (fit_cmd->parsed()) {
        WeightHandle weight(fit_weight);
        DatasetHandle data(fit_data, fit_schema, fit_standardize);
        std::string options = "warm=" + fit_warm;
        char* out = nullptr;
        check(wlim_fit(weight.w, data.ds, options.c_str(), &out));
        emit(take_string(out), fit_out);
        return kExitOk;
    }

    if (limit_cmd->parsed()) {
        FlatMatrix minority = read_points(limit_minority);
        char* out = nullptr;
        check(wlim_solve_limit(limit_lambda, limit_majority.c_str(), minority.data.data(),
                               minority.rows, minority.cols, &out));
        emit(take_string(out), limit_out);
        return kExitOk;
    }

    if (roc_cmd->parsed()) {
        auto s0 = read_scores(roc_s0);
        auto s1 = read_scores(roc_s1);
        char* out = nullptr;
        check(wlim_roc(s0.data(), s0.size(), s1.data(), s1.size(), &out));
        std::string payload = take_string(out);
        if (!roc_curve_out.empty()) {
            auto j = json::parse(payload);
            std::ofstream curve(roc_curve_out);
            if (!curve) throw CliError(kExitUsage, "cannot write " + roc_curve_out);
            curve << "fpr,tpr\n";
            for (size_t i = 0; i < j["fpr"].size(); ++i)
                curve << j["fpr"][i].get<double>() << ',' << j["tpr"][i].get<double>() << "\n";
            std::cout << "wrote " << roc_curve_out << std::endl;
        }
        emit(payload, roc_out);
        return kExitOk;
    }

    if (pauc_cmd->parsed()) {
        auto s0 = read_scores(pauc_s0);
        auto s1 = read_scores(pauc_s1);
        char* out = nullptr;
        check(wlim_pauc(s0.data(), s0.size(), s1.data(), s1.size(), pauc_orient.c_str(), pauc_bound,
                        pauc_boot, pauc_level, pauc_seed_set ? pauc_seed : default_seed(), &out));
        emit(take_string(out), pauc_out);
        return kExitOk;
    }

    if (cal_cmd->parsed()) {
        auto s1 = read_scores(cal_s1);
        double threshold = 0.0;
        check(wlim_calibrate(s1.data(), s1.size(), cal_tpr, &threshold));
        json j;
        j["target_tpr"] = cal_tpr;
        j["threshold"] = threshold;
        emit(j.dump(2), cal_out);
        return kExitOk;
    }

    if (up_cmd->parsed()) {
        uint64_t seed = up_seed_set ? up_seed : default_seed();
        double* buf = nullptr;
        size_t cols = 0;
        if (up_method == "fstar") {
            if (up_majority.empty() || up_beta.empty())
                throw CliError(kExitUsage, "fstar needs --majority and --beta");
            std::vector<double> beta;
            std::stringstream ss(up_beta);
            std::string cell;
            while (std::getline(ss, cell, ','))
                if (!cell.empty()) beta.push_back(std::stod(cell));
            cols = beta.size();
            check(wlim_upsample_fstar(up_majority.c_str(), beta.data(), cols, up_m, seed, &buf));
        } else if (up_method == "smote") {
            if (up_minority.empty()) throw CliError(kExitUsage, "smote needs --minority");
            FlatMatrix minority = read_points(up_minority);
            cols = minority.cols;
            check(wlim_upsample_smote(minority.data.data(), minority.rows, cols, up_k, up_m, seed,
                                      &buf));
        } else {
            throw CliError(kExitUsage, "unknown upsample method " + up_method);
        }
        std::ofstream out(up_out);
        if (!out) throw CliError(kExitUsage, "cannot write " + up_out);
        out.precision(17);
        for (size_t r = 0; r < up_m; ++r) {
            for (size_t c = 0; c < cols; ++c) {
                if (c) out << ',';
                out << buf[r * cols + c];
            }
            out << "\n";
        }
        wlim_buffer_free(buf);
        std::cout << "wrote " << up_out << std::endl;
        return kExitOk;
    }

    if (val_cmd->parsed()) {
        WeightHandle weight(val_weight);
        char* out = nullptr;
        check(wlim_weight_validate(weight.w, val_lo, val_hi, val_points, &out));
        emit(take_string(out), val_out);
        return kExitOk;
    }

    for (auto& [cmd, flags] :
         std::initializer_list<std::pair<CLI::App*, std::shared_ptr<ExpFlags>>>{
             {conv_cmd, conv_flags}, {study_cmd, study_flags}, {delta_cmd, delta_flags},
             {proto_cmd, proto_flags}}) {
        if (!cmd->parsed()) continue;
        auto overrides = flags->overrides;
        bool takes_seed = cmd->get_name() != "protocol";
        if (takes_seed && !overrides.count("seed"))
            overrides["seed"] = std::to_string(default_seed());
        std::string config = build_config(flags->config, overrides);
        char* out = nullptr;
        check(wlim_run_experiment(cmd->get_name().c_str(), config.c_str(), flags->out_dir.c_str(),
                                  &out));
        std::cout << take_string(out) << std::endl;
        return kExitOk;
    }

    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const CliError& e) {
        if (e.code() == kExitNumeric) {
            json j;
            j["error"] = e.what();
            j["kind"] = "numeric";
            std::cerr << j.dump(2) << std::endl;
        } else {
            std::cerr << "error: " << e.what() << std::endl;
        }
        return e.code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitUsage;
    }
}
