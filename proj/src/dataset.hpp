// Dataset ingestion, encoding, synthetic generation, stratified splitting,
// and the empirical surrounding-property diagnostic.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "common.hpp"
#include "rng.hpp"

namespace wlim {

enum class ColumnKind { Numeric, Categorical, Label };

struct SchemaColumn {
    std::string name;
    ColumnKind kind;
};

using Schema = std::vector<SchemaColumn>;

// Parse "column:kind" lines (kind in {numeric, categorical, label}).
Schema parse_schema(const std::string& text);
Schema load_schema(const std::string& path);

// One encoded feature column and how it maps back to the raw data.
struct EncodedColumn {
    std::string source;  // raw column name
    bool indicator = false;
    std::string level;  // defined for indicator columns
    double mean = 0.0;  // recorded for optional standardization
    double scale = 1.0;
    std::string name() const { return indicator ? source + "=" + level : source; }
};

struct Encoder {
    std::vector<EncodedColumn> columns;
    // All observed levels per categorical column, in encoding order; the
    // first level is the dropped baseline.
    std::vector<std::pair<std::string, std::vector<std::string>>> levels;
};

struct SurroundingDiagnostic {
    Eigen::VectorXd target;
    double epsilon = 0.0;
    double delta_hat = 0.0;  // minimum half-space mass over probed directions
    int directions_probed = 0;
    bool pass = false;
};

class LabeledDataset {
public:
    LabeledDataset() = default;

    // rows of `features` with labels 1 form the minority class.
    static LabeledDataset from_parts(Eigen::MatrixXd features, std::vector<int> labels,
                                     Encoder encoder = {});
    static LabeledDataset from_class_matrices(const Eigen::MatrixXd& minority,
                                              const Eigen::MatrixXd& majority);

    Eigen::Index rows() const { return features_.rows(); }
    Eigen::Index dim() const { return features_.cols(); }
    Eigen::Index minority_count() const { return static_cast<Eigen::Index>(minority_.size()); }
    Eigen::Index majority_count() const { return static_cast<Eigen::Index>(majority_.size()); }

    const Eigen::MatrixXd& features() const { return features_; }
    const std::vector<int>& labels() const { return labels_; }
    const std::vector<Eigen::Index>& minority_index() const { return minority_; }
    const std::vector<Eigen::Index>& majority_index() const { return majority_; }
    const Encoder& encoder() const { return encoder_; }

    Eigen::MatrixXd minority_matrix() const;
    Eigen::MatrixXd majority_matrix() const;
    Eigen::VectorXd minority_mean() const;

    // Center/scale every feature column using the encoder's recorded moments.
    LabeledDataset standardized() const;

    // Stratified split; zero fractions yield empty (collapsed) parts.
    std::array<LabeledDataset, 3> split(const std::array<double, 3>& fractions,
                                        std::uint64_t seed) const;

private:
    Eigen::MatrixXd features_;
    std::vector<int> labels_;
    std::vector<Eigen::Index> minority_;
    std::vector<Eigen::Index> majority_;
    Encoder encoder_;
};

struct CsvOptions {
    bool standardize = false;
};

// Load a CSV with a header row against a declared schema. Rows with missing
// numeric values are dropped; missing categorical values become their own
// category; categorical columns are one-hot encoded with the first level
// dropped. Constant encoded columns are a degeneracy error.
LabeledDataset load_csv(const std::string& path, const Schema& schema, const CsvOptions& opts = {});

// Plain numeric matrix from a headerless CSV (scores, point sets).
Eigen::MatrixXd load_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);

struct MixtureComponent {
    double weight = 1.0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
};

// m draws from a Gaussian mixture; deterministic in (spec, m, seed), with the
// component assignment stream independent of the normal draws.
Eigen::MatrixXd generate_gaussian_mixture(const std::vector<MixtureComponent>& spec, Eigen::Index m,
                                          std::uint64_t seed);

// Empirical surrounding check: minimum over probed unit directions of the
// mass of {x : (x - target)' omega > epsilon}. The 2d axis-aligned
// directions are always included in addition to n_directions random ones.
SurroundingDiagnostic check_surrounding(const Eigen::MatrixXd& points, const Eigen::VectorXd& target,
                                        double epsilon, int n_directions, std::uint64_t seed);

}  // namespace wlim
