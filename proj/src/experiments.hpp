// Scripted studies: coefficient convergence under growing imbalance, the
// partial-AUC ordering benchmark, the delta-weight degeneracy demo, and the
// calibrate-then-test protocol. Every experiment is a pure function of its
// config and seed; outputs are CSV tables plus a JSON summary with the
// resolved config embedded.
#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "dataset.hpp"
#include "fit.hpp"
#include "limits.hpp"
#include "weights.hpp"

namespace wlim {

class ExperimentConfig {
public:
    static ExperimentConfig parse(const std::string& text);  // key=value lines
    static ExperimentConfig from_map(std::map<std::string, std::string> values);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    std::uint64_t get_seed(std::uint64_t fallback) const;
    std::vector<std::string> get_list(const std::string& key, const std::string& fallback) const;

    // Rejects keys outside the allowed set; call before running.
    void restrict_keys(const std::vector<std::string>& allowed) const;
    const std::map<std::string, std::string>& values() const { return values_; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

private:
    std::map<std::string, std::string> values_;
};

// "gaussian:m1,...,md,var" (isotropic) or "gaussian:m1,..,md;c11,c12,..."
// (row-major covariance after the semicolon).
MixtureComponent parse_gaussian_spec(const std::string& spec);

// "inline:v1,v2,..." (1-D points), "inline:x1,y1;x2,y2" (rows), or
// "csv:path" / bare path for a numeric CSV.
Eigen::MatrixXd parse_points_spec(const std::string& spec);

// The 2-D benchmark from the partial-AUC study: standard normal majority and
// a 10/90 two-component normal mixture for the minority.
std::vector<MixtureComponent> benchmark2d_majority();
std::vector<MixtureComponent> benchmark2d_minority();

struct ProtocolRow {
    std::string weight;
    double threshold = 0.0;
    double test_tpr = 0.0;
    double test_tnr = 0.0;
    bool valid = false;
    std::string error;
};

// Fit each weight on train, set the score threshold at the target TPR on the
// train minority, report test TPR/TNR.
std::vector<ProtocolRow> run_threshold_protocol(const LabeledDataset& train,
                                                const LabeledDataset& test,
                                                const std::vector<WeightFunction>& weights,
                                                double target_tpr);

// Experiment drivers; each writes its outputs under out_dir (atomically) and
// returns the JSON summary it also writes.
nlohmann::json run_convergence(const ExperimentConfig& cfg, const std::string& out_dir);
nlohmann::json run_pauc_study(const ExperimentConfig& cfg, const std::string& out_dir);
nlohmann::json run_delta_degeneracy(const ExperimentConfig& cfg, const std::string& out_dir);
nlohmann::json run_protocol_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

// Dispatch by experiment name: convergence | pauc-study | delta-demo | protocol.
nlohmann::json run_experiment(const std::string& name, const ExperimentConfig& cfg,
                              const std::string& out_dir);

void write_text_atomic(const std::string& path, const std::string& text);

}  // namespace wlim
