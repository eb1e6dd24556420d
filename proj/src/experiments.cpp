#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "metrics.hpp"
#include "parallel.hpp"
#include "upsample.hpp"

namespace wlim {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_number_list(const std::string& s, const char* what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            fail_invalid(std::string("cannot parse ") + what + " entry '" + item + "'");
        }
    }
    if (out.empty()) fail_invalid(std::string("empty ") + what);
    return out;
}

std::vector<double> scores_of(const Eigen::MatrixXd& rows, const FitResult& model) {
    Eigen::VectorXd s = rows * model.beta;
    std::vector<double> out(static_cast<std::size_t>(s.size()));
    for (Eigen::Index i = 0; i < s.size(); ++i)
        out[static_cast<std::size_t>(i)] = model.alpha + s(i);
    return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) fail_invalid("config line '" + line + "' is not key=value");
        cfg.values_[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::from_map(std::map<std::string, std::string> values) {
    ExperimentConfig cfg;
    cfg.values_ = std::move(values);
    return cfg;
}

std::string ExperimentConfig::get(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        fail_invalid("config key '" + key + "' is not a number: " + it->second);
    }
}

long long ExperimentConfig::get_int(const std::string& key, long long fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stoll(it->second);
    } catch (const std::exception&) {
        fail_invalid("config key '" + key + "' is not an integer: " + it->second);
    }
}

std::uint64_t ExperimentConfig::get_seed(std::uint64_t fallback) const {
    return static_cast<std::uint64_t>(get_int("seed", static_cast<long long>(fallback)));
}

std::vector<std::string> ExperimentConfig::get_list(const std::string& key,
                                                    const std::string& fallback) const {
    std::string raw = get(key, fallback);
    std::vector<std::string> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void ExperimentConfig::restrict_keys(const std::vector<std::string>& allowed) const {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : values_)
        if (!ok.count(key)) fail_invalid("unknown config key '" + key + "' for this experiment");
}

MixtureComponent parse_gaussian_spec(const std::string& spec) {
    std::string body = spec;
    if (body.rfind("gaussian:", 0) == 0) body = body.substr(9);
    MixtureComponent comp;
    auto semi = body.find(';');
    if (semi == std::string::npos) {
        auto nums = parse_number_list(body, "gaussian spec");
        if (nums.size() < 2)
            fail_invalid("gaussian spec needs mean values and a variance: " + spec);
        Eigen::Index d = static_cast<Eigen::Index>(nums.size()) - 1;
        comp.mean.resize(d);
        for (Eigen::Index i = 0; i < d; ++i) comp.mean(i) = nums[static_cast<std::size_t>(i)];
        double var = nums.back();
        if (!(var > 0.0)) fail_invalid("gaussian variance must be positive: " + spec);
        comp.covariance = var * Eigen::MatrixXd::Identity(d, d);
        return comp;
    }
    auto mean = parse_number_list(body.substr(0, semi), "gaussian mean");
    auto cov = parse_number_list(body.substr(semi + 1), "gaussian covariance");
    Eigen::Index d = static_cast<Eigen::Index>(mean.size());
    comp.mean.resize(d);
    for (Eigen::Index i = 0; i < d; ++i) comp.mean(i) = mean[static_cast<std::size_t>(i)];
    comp.covariance.resize(d, d);
    if (cov.size() == static_cast<std::size_t>(d)) {
        comp.covariance.setZero();
        for (Eigen::Index i = 0; i < d; ++i) comp.covariance(i, i) = cov[static_cast<std::size_t>(i)];
    } else if (cov.size() == static_cast<std::size_t>(d * d)) {
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j)
                comp.covariance(i, j) = cov[static_cast<std::size_t>(i * d + j)];
    } else {
        fail_invalid("gaussian covariance needs d or d*d entries: " + spec);
    }
    return comp;
}

Eigen::MatrixXd parse_points_spec(const std::string& spec) {
    if (spec.rfind("csv:", 0) == 0) return load_matrix_csv(spec.substr(4));
    if (spec.rfind("inline:", 0) != 0) return load_matrix_csv(spec);
    std::string body = spec.substr(7);
    std::vector<std::vector<double>> rows;
    if (body.find(';') == std::string::npos) {
        // 1-D point list
        for (double v : parse_number_list(body, "inline points")) rows.push_back({v});
    } else {
        std::stringstream ss(body);
        std::string row;
        while (std::getline(ss, row, ';')) {
            row = trim(row);
            if (row.empty()) continue;
            rows.push_back(parse_number_list(row, "inline point row"));
        }
    }
    if (rows.empty()) fail_invalid("inline points are empty");
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != rows.front().size()) fail_invalid("inline point rows have unequal width");
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
    return out;
}

std::vector<MixtureComponent> benchmark2d_majority() {
    MixtureComponent comp;
    comp.weight = 1.0;
    comp.mean = Eigen::VectorXd::Zero(2);
    comp.covariance = Eigen::MatrixXd::Identity(2, 2);
    return {comp};
}

std::vector<MixtureComponent> benchmark2d_minority() {
    MixtureComponent hard, easy;
    hard.weight = 0.1;
    hard.mean.resize(2);
    hard.mean << 0.0, 2.0;
    hard.covariance = 0.3 * Eigen::MatrixXd::Identity(2, 2);
    easy.weight = 0.9;
    easy.mean.resize(2);
    easy.mean << 2.3, 2.3;
    easy.covariance = 0.2 * Eigen::MatrixXd::Identity(2, 2);
    return {hard, easy};
}

void write_text_atomic(const std::string& path, const std::string& text) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) fail_io("cannot write " + tmp);
        out << text;
    }
    std::filesystem::rename(tmp, path);
}

std::vector<ProtocolRow> run_threshold_protocol(const LabeledDataset& train,
                                                const LabeledDataset& test,
                                                const std::vector<WeightFunction>& weights,
                                                double target_tpr) {
    if (!(target_tpr > 0.0 && target_tpr <= 1.0)) fail_invalid("target TPR must lie in (0, 1]");
    if (train.dim() != test.dim()) fail_invalid("train and test dimensions disagree");
    std::vector<ProtocolRow> rows;
    Eigen::MatrixXd test_minority = test.minority_matrix();
    Eigen::MatrixXd test_majority = test.majority_matrix();
    for (const auto& weight : weights) {
        ProtocolRow row;
        row.weight = weight.spec();
        try {
            FitOptions opts;
            opts.check_surrounding = false;
            FitResult model = fit(weight, train, opts);
            auto train_minority_scores = scores_of(train.minority_matrix(), model);
            row.threshold = calibrate_threshold(train_minority_scores, target_tpr);
            auto s1 = scores_of(test_minority, model);
            auto s0 = scores_of(test_majority, model);
            double tp = 0.0;
            for (double s : s1)
                if (s > row.threshold) tp += 1.0;
            double tn = 0.0;
            for (double s : s0)
                if (s <= row.threshold) tn += 1.0;
            row.test_tpr = tp / static_cast<double>(s1.size());
            row.test_tnr = tn / static_cast<double>(s0.size());
            row.valid = true;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

nlohmann::json config_json(const ExperimentConfig& cfg) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [key, value] : cfg.values()) j[key] = value;
    return j;
}

nlohmann::json base_summary(const std::string& experiment, const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["experiment"] = experiment;
    j["version"] = version_string();
    j["config"] = config_json(cfg);
    return j;
}

void finish(nlohmann::json& summary, const std::string& out_dir, const std::string& csv_name,
            const std::string& csv_text) {
    std::filesystem::create_directories(out_dir);
    std::string csv_path = (std::filesystem::path(out_dir) / csv_name).string();
    write_text_atomic(csv_path, csv_text);
    summary["outputs"].push_back(csv_path);
    std::string json_path = (std::filesystem::path(out_dir) / "summary.json").string();
    write_text_atomic(json_path, summary.dump(2) + "\n");
}

ToySpec toy_from_config(const ExperimentConfig& cfg) {
    ToySpec toy;
    toy.minority = parse_points_spec(cfg.get("minority", "inline:0,1"));
    std::string majority = cfg.get("majority", "gaussian:0,1");
    if (majority == "benchmark2d") {
        toy.majority = benchmark2d_majority();
    } else {
        toy.majority = {parse_gaussian_spec(majority)};
    }
    if (toy.majority.front().mean.size() != toy.minority.cols())
        fail_invalid("minority and majority dimensions disagree");
    return toy;
}

}  // namespace

nlohmann::json run_convergence(const ExperimentConfig& cfg, const std::string& out_dir) {
    cfg.restrict_keys({"weights", "grid", "reps", "seed", "minority", "majority", "tolerance"});
    auto weight_specs = cfg.get_list("weights", "logistic,exp:0.5,polyleft:1");
    auto grid_values = parse_number_list(cfg.get("grid", "10,100,1000,10000,100000"), "N grid");
    int reps = static_cast<int>(cfg.get_int("reps", 200));
    std::uint64_t seed = cfg.get_seed(20240601);
    ToySpec toy = toy_from_config(cfg);

    std::vector<Eigen::Index> n_grid;
    for (double v : grid_values) n_grid.push_back(static_cast<Eigen::Index>(v));

    nlohmann::json summary = base_summary("convergence", cfg);
    std::ostringstream csv;
    csv << "weight,N,valid_replications,mean_alpha,se_alpha,mean_beta,se_beta,alpha_drift_per_decade\n";
    csv.precision(10);

    for (const auto& spec : weight_specs) {
        WeightFunction weight = WeightFunction::parse(spec);
        auto cells = fit_path(weight, toy, n_grid, reps, mix64(seed, std::hash<std::string>{}(spec)));

        nlohmann::json weight_block;
        weight_block["weight"] = spec;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const auto& cell = cells[i];
            csv << spec << ',' << cell.N << ',' << cell.valid_replications << ',';
            if (cell.valid) {
                double drift = std::numeric_limits<double>::quiet_NaN();
                if (i > 0 && cells[i - 1].valid && cells[i - 1].N < cell.N) {
                    double decades =
                        std::log10(static_cast<double>(cell.N) / static_cast<double>(cells[i - 1].N));
                    drift = (cell.mean_alpha - cells[i - 1].mean_alpha) / decades;
                }
                csv << cell.mean_alpha << ',' << cell.se_alpha << ',' << cell.mean_beta << ','
                    << cell.se_beta << ',';
                if (std::isnan(drift))
                    csv << "\n";
                else
                    csv << drift << "\n";
                nlohmann::json row;
                row["N"] = static_cast<long long>(cell.N);
                row["mean_alpha"] = cell.mean_alpha;
                row["se_alpha"] = cell.se_alpha;
                row["mean_beta"] = cell.mean_beta;
                row["se_beta"] = cell.se_beta;
                if (!std::isnan(drift)) row["alpha_drift_per_decade"] = drift;
                weight_block["cells"].push_back(row);
            } else {
                csv << ",,,," << "\n";
                weight_block["cells"].push_back({{"N", static_cast<long long>(cell.N)},
                                                 {"error", cell.error}});
            }
        }

        // Limiting coefficient from the direct solver.
        double lambda = weight.classify_tail().lambda;
        LimitResult limit;
        if (toy.majority.size() == 1) {
            TiltSource majority{GaussianSource{toy.majority[0].mean, toy.majority[0].covariance}};
            limit = solve_limit(lambda, majority, toy.minority);
        } else {
            Eigen::MatrixXd sample = generate_gaussian_mixture(toy.majority, 1000000, mix64(seed, 77));
            limit = solve_limit(lambda, TiltSource{sample}, toy.minority);
        }
        csv << spec << ",limit,,,," << limit.beta_star(0) << ",,\n";
        weight_block["beta_star"] = limit.beta_star(0);
        if (weight.kind() == WeightKind::PolyLeft)
            weight_block["note"] = "slow convergence: polynomially growing left tail";
        summary["weights"].push_back(weight_block);
    }

    finish(summary, out_dir, "convergence.csv", csv.str());
    return summary;
}

nlohmann::json run_pauc_study(const ExperimentConfig& cfg, const std::string& out_dir) {
    cfg.restrict_keys({"weights", "N", "reps", "seed", "test_size", "minority_size",
                       "sens_band", "spec_band"});
    auto weight_specs = cfg.get_list("weights", "logistic,exp:0.1,exp:0.5,exp:0.9");
    Eigen::Index N = static_cast<Eigen::Index>(cfg.get_int("N", 10000));
    int reps = static_cast<int>(cfg.get_int("reps", 20));
    Eigen::Index test_size = static_cast<Eigen::Index>(cfg.get_int("test_size", 100000));
    Eigen::Index minority_size = static_cast<Eigen::Index>(cfg.get_int("minority_size", 500));
    double sens_band = cfg.get_double("sens_band", 0.9);
    double spec_band = cfg.get_double("spec_band", 0.1);
    std::uint64_t seed = cfg.get_seed(20240602);

    auto majority_law = benchmark2d_majority();
    auto minority_law = benchmark2d_minority();
    // One fixed minority training sample shared by every replication.
    Eigen::MatrixXd minority_train = generate_gaussian_mixture(minority_law, minority_size,
                                                               mix64(seed, 0xABCD));

    const std::size_t W = weight_specs.size();
    std::vector<WeightFunction> weights;
    for (const auto& spec : weight_specs) weights.push_back(WeightFunction::parse(spec));

    struct RepResult {
        std::vector<double> sens, spec;  // per weight
        bool ok = false;
        std::string error;
    };
    std::vector<RepResult> results(static_cast<std::size_t>(reps));

    parallel_for(static_cast<std::size_t>(reps), [&](std::size_t rep) {
        auto& out = results[rep];
        try {
            Rng rep_rng = Rng(seed).substream(rep + 1);
            Eigen::MatrixXd majority_train =
                generate_gaussian_mixture(majority_law, N, rep_rng.substream(0).seed());
            auto train = LabeledDataset::from_class_matrices(minority_train, majority_train);
            Eigen::MatrixXd test_majority =
                generate_gaussian_mixture(majority_law, test_size, rep_rng.substream(1).seed());
            Eigen::MatrixXd test_minority =
                generate_gaussian_mixture(minority_law, test_size, rep_rng.substream(2).seed());

            out.sens.resize(W);
            out.spec.resize(W);
            for (std::size_t w = 0; w < W; ++w) {
                FitOptions opts;
                opts.check_surrounding = false;
                FitResult model = fit(weights[w], train, opts);
                auto s0 = scores_of(test_majority, model);
                auto s1 = scores_of(test_minority, model);
                RocCurve curve = roc(s0, s1);
                out.sens[w] = pauc(curve, PaucOrientation::Sensitivity, sens_band).pauc;
                out.spec[w] = pauc(curve, PaucOrientation::Specificity, spec_band).pauc;
            }
            out.ok = true;
        } catch (const std::exception& e) {
            out.error = e.what();
        }
    });

    nlohmann::json summary = base_summary("pauc-study", cfg);
    std::ostringstream csv;
    csv.precision(10);
    csv << "weight,orientation,band,mean_pauc,se_pauc,replications\n";
    std::vector<double> mean_sens(W, 0.0), mean_spec(W, 0.0);
    for (std::size_t w = 0; w < W; ++w) {
        double ss = 0.0, ss2 = 0.0, pp = 0.0, pp2 = 0.0;
        int k = 0;
        for (const auto& r : results) {
            if (!r.ok) continue;
            ss += r.sens[w];
            ss2 += r.sens[w] * r.sens[w];
            pp += r.spec[w];
            pp2 += r.spec[w] * r.spec[w];
            ++k;
        }
        if (k == 0) {
            std::string err = results.empty() ? "no replications" : results.front().error;
            fail_numeric("pauc study produced no valid replication: " + err);
        }
        mean_sens[w] = ss / k;
        mean_spec[w] = pp / k;
        double se_s = k > 1 ? std::sqrt(std::max(0.0, (ss2 - k * mean_sens[w] * mean_sens[w]) /
                                                          (k - 1.0) / k))
                            : 0.0;
        double se_p = k > 1 ? std::sqrt(std::max(0.0, (pp2 - k * mean_spec[w] * mean_spec[w]) /
                                                          (k - 1.0) / k))
                            : 0.0;
        csv << weight_specs[w] << ",sensitivity," << sens_band << ',' << mean_sens[w] << ',' << se_s
            << ',' << k << "\n";
        csv << weight_specs[w] << ",specificity," << spec_band << ',' << mean_spec[w] << ',' << se_p
            << ',' << k << "\n";
        summary["mean_pauc"][weight_specs[w]] = {{"sensitivity", mean_sens[w]},
                                                 {"specificity", mean_spec[w]},
                                                 {"se_sensitivity", se_s},
                                                 {"se_specificity", se_p}};
    }

    // Ordering verdicts over the exponential family members present.
    auto order_of = [&](const std::vector<double>& means) {
        std::vector<std::pair<double, std::string>> lam;
        for (std::size_t w = 0; w < W; ++w) {
            if (weights[w].kind() == WeightKind::Exponential)
                lam.emplace_back(weights[w].param(), weight_specs[w]);
        }
        std::sort(lam.begin(), lam.end());
        nlohmann::json block = nlohmann::json::array();
        for (const auto& [l, spec] : lam) {
            std::size_t w = 0;
            while (weight_specs[w] != spec) ++w;
            block.push_back({{"weight", spec}, {"lambda", l}, {"mean_pauc", means[w]}});
        }
        return block;
    };
    auto increasing = [](const nlohmann::json& block) {
        for (std::size_t i = 1; i < block.size(); ++i)
            if (!(block[i]["mean_pauc"].get<double>() > block[i - 1]["mean_pauc"].get<double>()))
                return false;
        return true;
    };
    auto decreasing = [](const nlohmann::json& block) {
        for (std::size_t i = 1; i < block.size(); ++i)
            if (!(block[i]["mean_pauc"].get<double>() < block[i - 1]["mean_pauc"].get<double>()))
                return false;
        return true;
    };
    auto sens_block = order_of(mean_sens);
    auto spec_block = order_of(mean_spec);
    summary["orderings"]["sensitivity"] = sens_block;
    summary["orderings"]["specificity"] = spec_block;
    summary["orderings"]["sensitivity_increases_with_lambda"] = increasing(sens_block);
    summary["orderings"]["specificity_decreases_with_lambda"] = decreasing(spec_block);

    finish(summary, out_dir, "pauc_study.csv", csv.str());
    return summary;
}

nlohmann::json run_delta_degeneracy(const ExperimentConfig& cfg, const std::string& out_dir) {
    cfg.restrict_keys({"u0", "N", "seed", "minority", "majority", "alpha_range", "beta_range",
                       "step"});
    double u0 = cfg.get_double("u0", 0.0);
    Eigen::Index N = static_cast<Eigen::Index>(cfg.get_int("N", 10000));
    std::uint64_t seed = cfg.get_seed(20240603);
    auto alpha_range = parse_number_list(cfg.get("alpha_range", "-5,1"), "alpha range");
    auto beta_range = parse_number_list(cfg.get("beta_range", "-3,3"), "beta range");
    double step = cfg.get_double("step", 0.01);
    ToySpec toy = toy_from_config(cfg);
    if (toy.minority.cols() != 1) fail_invalid("delta demo is one-dimensional");

    Eigen::MatrixXd majority = generate_gaussian_mixture(toy.majority, N, seed);
    std::vector<double> xs(static_cast<std::size_t>(N));
    for (Eigen::Index i = 0; i < N; ++i) xs[static_cast<std::size_t>(i)] = majority(i, 0);
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(toy.minority.rows());
    const double penalty = std::exp(u0);

    // Counting loss: misclassified minority plus e^u0 times the majority mass
    // scored above u0. For fixed beta the majority count is a single rank
    // lookup in the sorted sample.
    auto majority_above = [&](double alpha, double beta) -> double {
        double c = u0 - alpha;
        if (beta == 0.0) return c < 0.0 ? static_cast<double>(N) : 0.0;
        if (beta > 0.0) {
            auto it = std::upper_bound(xs.begin(), xs.end(), c / beta);
            return static_cast<double>(xs.end() - it);
        }
        auto it = std::lower_bound(xs.begin(), xs.end(), c / beta);
        return static_cast<double>(it - xs.begin());
    };
    auto counting_loss = [&](double alpha, double beta) {
        double miss = 0.0;
        for (Eigen::Index i = 0; i < toy.minority.rows(); ++i)
            if (alpha + beta * toy.minority(i, 0) <= u0) miss += 1.0;
        return miss + penalty * majority_above(alpha, beta);
    };

    double best = std::numeric_limits<double>::infinity();
    double best_alpha = 0.0, best_beta = 0.0;
    bool beta_zero_attains = false;
    double alpha_at_beta_zero = 0.0;
    const auto na = static_cast<long long>(std::llround((alpha_range[1] - alpha_range[0]) / step));
    const auto nb = static_cast<long long>(std::llround((beta_range[1] - beta_range[0]) / step));
    for (long long bi = 0; bi <= nb; ++bi) {
        double beta = beta_range[0] + step * static_cast<double>(bi);
        if (std::abs(beta) < 0.5 * step) beta = 0.0;  // hit the axis exactly
        for (long long ai = 0; ai <= na; ++ai) {
            double alpha = alpha_range[0] + step * static_cast<double>(ai);
            double loss = counting_loss(alpha, beta);
            if (loss < best - 1e-12) {
                best = loss;
                best_alpha = alpha;
                best_beta = beta;
                beta_zero_attains = false;
            }
            if (loss <= best + 1e-12 && beta == 0.0 && alpha <= u0) {
                beta_zero_attains = true;
                alpha_at_beta_zero = alpha;
            }
        }
    }

    nlohmann::json summary = base_summary("delta-demo", cfg);
    summary["u0"] = u0;
    summary["N"] = static_cast<long long>(N);
    summary["n"] = n;
    summary["min_loss"] = best;
    summary["argmin"] = {{"alpha", best_alpha}, {"beta", best_beta}};
    summary["beta_zero_attains_minimum"] = beta_zero_attains;
    if (beta_zero_attains) summary["alpha_at_beta_zero"] = alpha_at_beta_zero;
    summary["loss_at_alpha_above_u0"] = counting_loss(u0 + 1.0, 0.0);
    // Degeneracy sets in once N exceeds n / (e^u0 delta); report the
    // empirical surrounding mass at the minority mean for context.
    auto diag = check_surrounding(majority, toy.minority.colwise().mean(), 0.1, 1000, seed);
    summary["surrounding_delta_hat"] = diag.delta_hat;
    if (diag.delta_hat > 0.0)
        summary["degeneracy_threshold_N"] = n / (penalty * diag.delta_hat);

    std::ostringstream csv;
    csv.precision(10);
    csv << "quantity,value\n";
    csv << "min_loss," << best << "\n";
    csv << "best_alpha," << best_alpha << "\n";
    csv << "best_beta," << best_beta << "\n";
    csv << "beta_zero_attains," << (beta_zero_attains ? 1 : 0) << "\n";
    finish(summary, out_dir, "delta_demo.csv", csv.str());
    return summary;
}

nlohmann::json run_protocol_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    cfg.restrict_keys({"train", "test", "schema", "weights", "target_tpr", "standardize"});
    std::string train_path = cfg.get("train", "");
    std::string test_path = cfg.get("test", "");
    std::string schema_path = cfg.get("schema", "");
    if (train_path.empty() || test_path.empty() || schema_path.empty())
        fail_invalid("protocol experiment requires train=, test=, and schema=");
    double target = cfg.get_double("target_tpr", 0.99);
    CsvOptions copts;
    copts.standardize = cfg.get("standardize", "0") == "1";

    Schema schema = load_schema(schema_path);
    LabeledDataset train = load_csv(train_path, schema, copts);
    LabeledDataset test = load_csv(test_path, schema, copts);
    std::vector<WeightFunction> weights;
    for (const auto& spec : cfg.get_list("weights", "logistic,exp:0.1,exp:0.5,exp:0.9"))
        weights.push_back(WeightFunction::parse(spec));

    auto rows = run_threshold_protocol(train, test, weights, target);

    nlohmann::json summary = base_summary("protocol", cfg);
    std::ostringstream csv;
    csv.precision(10);
    csv << "weight,threshold,test_tpr,test_tnr,error\n";
    for (const auto& row : rows) {
        csv << row.weight << ',';
        if (row.valid)
            csv << row.threshold << ',' << row.test_tpr << ',' << row.test_tnr << ",\n";
        else
            csv << ",,," << row.error << "\n";
        nlohmann::json jr;
        jr["weight"] = row.weight;
        if (row.valid) {
            jr["threshold"] = row.threshold;
            jr["test_tpr"] = row.test_tpr;
            jr["test_tnr"] = row.test_tnr;
        } else {
            jr["error"] = row.error;
        }
        summary["rows"].push_back(jr);
    }
    finish(summary, out_dir, "protocol.csv", csv.str());
    return summary;
}

nlohmann::json run_experiment(const std::string& name, const ExperimentConfig& cfg,
                              const std::string& out_dir) {
    if (name == "convergence") return run_convergence(cfg, out_dir);
    if (name == "pauc-study") return run_pauc_study(cfg, out_dir);
    if (name == "delta-demo") return run_delta_degeneracy(cfg, out_dir);
    if (name == "protocol") return run_protocol_experiment(cfg, out_dir);
    fail_invalid("unknown experiment '" + name +
                 "' (expected convergence | pauc-study | delta-demo | protocol)");
}

}  // namespace wlim
