#include "dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace wlim {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool is_missing(const std::string& cell) {
    if (cell.empty()) return true;
    std::string low;
    for (char c : cell) low.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return low == "na" || low == "nan" || low == "null" || low == "?";
}

std::vector<std::string> split_line(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

}  // namespace

Schema parse_schema(const std::string& text) {
    Schema schema;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto colon = line.find(':');
        if (colon == std::string::npos) fail_invalid("schema line '" + line + "' is not column:kind");
        std::string name = trim(line.substr(0, colon));
        std::string kind = trim(line.substr(colon + 1));
        if (kind == "numeric")
            schema.push_back({name, ColumnKind::Numeric});
        else if (kind == "categorical")
            schema.push_back({name, ColumnKind::Categorical});
        else if (kind == "label")
            schema.push_back({name, ColumnKind::Label});
        else
            fail_invalid("schema kind '" + kind + "' must be numeric, categorical, or label");
    }
    int labels = 0;
    for (const auto& c : schema)
        if (c.kind == ColumnKind::Label) ++labels;
    if (labels != 1) fail_invalid("schema must declare exactly one label column");
    return schema;
}

Schema load_schema(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail_io("cannot open schema file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_schema(buf.str());
}

LabeledDataset LabeledDataset::from_parts(Eigen::MatrixXd features, std::vector<int> labels,
                                          Encoder encoder) {
    if (static_cast<std::size_t>(features.rows()) != labels.size())
        fail_invalid("feature rows and labels disagree");
    LabeledDataset ds;
    ds.features_ = std::move(features);
    ds.labels_ = std::move(labels);
    for (Eigen::Index i = 0; i < ds.features_.rows(); ++i) {
        int y = ds.labels_[static_cast<std::size_t>(i)];
        if (y != 0 && y != 1) fail_invalid("labels must be 0/1");
        (y == 1 ? ds.minority_ : ds.majority_).push_back(i);
    }
    if (ds.minority_.empty()) fail_invalid("empty class: no minority (label 1) rows");
    if (ds.majority_.empty()) fail_invalid("empty class: no majority (label 0) rows");
    if (encoder.columns.empty()) {
        for (Eigen::Index j = 0; j < ds.features_.cols(); ++j) {
            EncodedColumn col;
            col.source = "x" + std::to_string(j);
            col.mean = ds.features_.col(j).mean();
            double var = (ds.features_.col(j).array() - col.mean).square().sum() /
                         std::max<double>(1.0, static_cast<double>(ds.features_.rows() - 1));
            col.scale = std::sqrt(std::max(var, 0.0));
            encoder.columns.push_back(col);
        }
    }
    ds.encoder_ = std::move(encoder);
    return ds;
}

LabeledDataset LabeledDataset::from_class_matrices(const Eigen::MatrixXd& minority,
                                                   const Eigen::MatrixXd& majority) {
    if (minority.cols() != majority.cols()) fail_invalid("class matrices have different widths");
    Eigen::MatrixXd features(minority.rows() + majority.rows(), minority.cols());
    features.topRows(minority.rows()) = minority;
    features.bottomRows(majority.rows()) = majority;
    std::vector<int> labels(static_cast<std::size_t>(features.rows()), 0);
    for (Eigen::Index i = 0; i < minority.rows(); ++i) labels[static_cast<std::size_t>(i)] = 1;
    return from_parts(std::move(features), std::move(labels));
}

Eigen::MatrixXd LabeledDataset::minority_matrix() const {
    Eigen::MatrixXd out(minority_count(), dim());
    for (Eigen::Index i = 0; i < minority_count(); ++i)
        out.row(i) = features_.row(minority_[static_cast<std::size_t>(i)]);
    return out;
}

Eigen::MatrixXd LabeledDataset::majority_matrix() const {
    Eigen::MatrixXd out(majority_count(), dim());
    for (Eigen::Index i = 0; i < majority_count(); ++i)
        out.row(i) = features_.row(majority_[static_cast<std::size_t>(i)]);
    return out;
}

Eigen::VectorXd LabeledDataset::minority_mean() const {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim());
    for (auto i : minority_) mean += features_.row(i).transpose();
    return mean / static_cast<double>(minority_.size());
}

LabeledDataset LabeledDataset::standardized() const {
    Eigen::MatrixXd f = features_;
    Encoder enc = encoder_;
    for (Eigen::Index j = 0; j < f.cols(); ++j) {
        auto& col = enc.columns[static_cast<std::size_t>(j)];
        double scale = col.scale > 0.0 ? col.scale : 1.0;
        f.col(j) = (f.col(j).array() - col.mean) / scale;
    }
    return from_parts(std::move(f), labels_, std::move(enc));
}

std::array<LabeledDataset, 3> LabeledDataset::split(const std::array<double, 3>& fractions,
                                                    std::uint64_t seed) const {
    double total = 0.0;
    for (double f : fractions) {
        if (f < 0.0) fail_invalid("split fractions must be nonnegative");
        total += f;
    }
    if (std::abs(total - 1.0) > 1e-9) fail_invalid("split fractions must sum to 1");

    std::array<std::vector<Eigen::Index>, 3> parts;
    Rng rng(seed);
    for (int cls = 0; cls < 2; ++cls) {
        std::vector<Eigen::Index> idx = cls == 1 ? minority_ : majority_;
        Rng stream = rng.substream(static_cast<std::uint64_t>(cls));
        std::shuffle(idx.begin(), idx.end(), stream.engine());
        // Largest-remainder allocation along cumulative boundaries keeps the
        // piece counts deterministic and exact for round fractions.
        std::size_t m = idx.size();
        std::size_t start = 0;
        double cum = 0.0;
        for (int p = 0; p < 3; ++p) {
            cum += fractions[static_cast<std::size_t>(p)];
            std::size_t end = p == 2 ? m : static_cast<std::size_t>(std::llround(cum * static_cast<double>(m)));
            end = std::min(end, m);
            for (std::size_t i = start; i < end; ++i) parts[static_cast<std::size_t>(p)].push_back(idx[i]);
            start = end;
        }
    }

    std::array<LabeledDataset, 3> out;
    for (int p = 0; p < 3; ++p) {
        auto& rows = parts[static_cast<std::size_t>(p)];
        if (fractions[static_cast<std::size_t>(p)] == 0.0) continue;  // collapsed split
        std::sort(rows.begin(), rows.end());
        Eigen::MatrixXd f(static_cast<Eigen::Index>(rows.size()), dim());
        std::vector<int> lab(rows.size());
        bool any_minority = false;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            f.row(static_cast<Eigen::Index>(i)) = features_.row(rows[i]);
            lab[i] = labels_[static_cast<std::size_t>(rows[i])];
            if (lab[i] == 1) any_minority = true;
        }
        if (!any_minority)
            fail_invalid("split " + std::to_string(p) + " received zero minority rows");
        out[static_cast<std::size_t>(p)] = from_parts(std::move(f), std::move(lab), encoder_);
    }
    return out;
}

LabeledDataset load_csv(const std::string& path, const Schema& schema, const CsvOptions& opts) {
    std::ifstream in(path);
    if (!in) fail_io("cannot open CSV file " + path);
    std::string line;
    if (!std::getline(in, line)) fail_invalid("CSV file " + path + " is empty (header row required)");
    auto header = split_line(line, ',');

    std::map<std::string, std::size_t> column_of;
    for (std::size_t j = 0; j < header.size(); ++j) column_of[header[j]] = j;
    for (const auto& col : schema)
        if (!column_of.count(col.name)) fail_invalid("unknown column '" + col.name + "' not in CSV header");

    std::vector<std::vector<std::string>> raw;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto cells = split_line(line, ',');
        if (cells.size() != header.size())
            fail_invalid("CSV row with " + std::to_string(cells.size()) + " cells, header has " +
                         std::to_string(header.size()));
        raw.push_back(std::move(cells));
    }

    // Drop rows with missing numeric values; collect categorical levels with
    // missing mapped to its own category.
    const std::string kMissingLevel = "(missing)";
    std::vector<std::size_t> kept;
    for (std::size_t r = 0; r < raw.size(); ++r) {
        bool drop = false;
        for (const auto& col : schema) {
            const std::string& cell = raw[r][column_of[col.name]];
            if (col.kind == ColumnKind::Numeric && is_missing(cell)) drop = true;
            if (col.kind == ColumnKind::Label && is_missing(cell)) drop = true;
        }
        if (!drop) kept.push_back(r);
    }
    if (kept.empty()) fail_invalid("no usable rows in " + path);

    Encoder encoder;
    std::vector<std::vector<double>> columns;  // encoded columns, row-aligned with kept
    std::vector<int> labels(kept.size(), 0);

    for (const auto& col : schema) {
        std::size_t j = column_of[col.name];
        if (col.kind == ColumnKind::Label) {
            std::set<std::string> values;
            for (std::size_t i = 0; i < kept.size(); ++i) values.insert(raw[kept[i]][j]);
            if (values.size() > 2)
                fail_invalid("label column '" + col.name + "' must be binary, saw " +
                             std::to_string(values.size()) + " values");
            for (std::size_t i = 0; i < kept.size(); ++i) {
                const std::string& cell = raw[kept[i]][j];
                if (cell == "1")
                    labels[i] = 1;
                else if (cell == "0")
                    labels[i] = 0;
                else
                    fail_invalid("label column '" + col.name + "' must contain 0/1, saw '" + cell + "'");
            }
        } else if (col.kind == ColumnKind::Numeric) {
            std::vector<double> values(kept.size());
            for (std::size_t i = 0; i < kept.size(); ++i) {
                try {
                    values[i] = std::stod(raw[kept[i]][j]);
                } catch (const std::exception&) {
                    fail_invalid("cannot parse numeric cell '" + raw[kept[i]][j] + "' in column '" +
                                 col.name + "'");
                }
            }
            EncodedColumn ec;
            ec.source = col.name;
            columns.push_back(std::move(values));
            encoder.columns.push_back(ec);
        } else {
            std::vector<std::string> cells(kept.size());
            std::set<std::string> level_set;
            for (std::size_t i = 0; i < kept.size(); ++i) {
                cells[i] = is_missing(raw[kept[i]][j]) ? kMissingLevel : raw[kept[i]][j];
                level_set.insert(cells[i]);
            }
            std::vector<std::string> levels(level_set.begin(), level_set.end());
            if (levels.size() < 2)
                fail_invalid("categorical column '" + col.name +
                             "' is degenerate: fewer than two distinct values");
            encoder.levels.emplace_back(col.name, levels);
            // drop-first encoding
            for (std::size_t l = 1; l < levels.size(); ++l) {
                std::vector<double> ind(kept.size(), 0.0);
                for (std::size_t i = 0; i < kept.size(); ++i)
                    if (cells[i] == levels[l]) ind[i] = 1.0;
                EncodedColumn ec;
                ec.source = col.name;
                ec.indicator = true;
                ec.level = levels[l];
                columns.push_back(std::move(ind));
                encoder.columns.push_back(ec);
            }
        }
    }

    Eigen::MatrixXd features(static_cast<Eigen::Index>(kept.size()),
                             static_cast<Eigen::Index>(columns.size()));
    for (std::size_t c = 0; c < columns.size(); ++c)
        for (std::size_t r = 0; r < kept.size(); ++r)
            features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = columns[c][r];

    // Degeneracy check on every encoded column.
    for (std::size_t c = 0; c < columns.size(); ++c) {
        double lo = features.col(static_cast<Eigen::Index>(c)).minCoeff();
        double hi = features.col(static_cast<Eigen::Index>(c)).maxCoeff();
        if (lo == hi)
            fail_invalid("column '" + encoder.columns[c].name() +
                         "' is degenerate: fewer than two distinct values");
    }
    for (std::size_t c = 0; c < columns.size(); ++c) {
        auto& ec = encoder.columns[c];
        ec.mean = features.col(static_cast<Eigen::Index>(c)).mean();
        double var = (features.col(static_cast<Eigen::Index>(c)).array() - ec.mean).square().sum() /
                     std::max<double>(1.0, static_cast<double>(features.rows() - 1));
        ec.scale = std::sqrt(std::max(var, 0.0));
    }

    auto ds = LabeledDataset::from_parts(std::move(features), std::move(labels), std::move(encoder));
    return opts.standardize ? ds.standardized() : ds;
}

Eigen::MatrixXd load_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail_io("cannot open CSV file " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto cells = split_line(line, ',');
        std::vector<double> row;
        bool numeric = true;
        for (const auto& cell : cells) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (rows.empty()) continue;  // tolerate a header line
            fail_invalid("non-numeric cell in " + path);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            fail_invalid("ragged rows in " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) fail_invalid("no numeric rows in " + path);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return m;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) fail_io("cannot write " + tmp);
        out.precision(17);
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                if (c) out << ',';
                out << m(r, c);
            }
            out << '\n';
        }
    }
    std::rename(tmp.c_str(), path.c_str());
}

Eigen::MatrixXd generate_gaussian_mixture(const std::vector<MixtureComponent>& spec, Eigen::Index m,
                                          std::uint64_t seed) {
    if (spec.empty()) fail_invalid("mixture spec must have at least one component");
    double total = 0.0;
    Eigen::Index d = spec.front().mean.size();
    for (const auto& comp : spec) {
        total += comp.weight;
        if (comp.weight < 0.0) fail_invalid("mixture weights must be nonnegative");
        if (comp.mean.size() != d || comp.covariance.rows() != d || comp.covariance.cols() != d)
            fail_invalid("mixture component dimensions disagree");
    }
    if (std::abs(total - 1.0) > 1e-9) fail_invalid("mixture weights must sum to 1");

    std::vector<Eigen::MatrixXd> chol;
    for (const auto& comp : spec) {
        Eigen::LLT<Eigen::MatrixXd> llt(comp.covariance);
        if (llt.info() != Eigen::Success)
            fail_invalid("mixture covariance is not positive definite (Cholesky failed)");
        chol.push_back(llt.matrixL());
    }

    Eigen::MatrixXd out(m, d);
    Rng base(seed);
    Rng assign = base.substream(0);  // dedicated stream for component assignment
    Rng draws = base.substream(1);
    std::vector<double> cumulative;
    double acc = 0.0;
    for (const auto& comp : spec) {
        acc += comp.weight;
        cumulative.push_back(acc);
    }
    for (Eigen::Index i = 0; i < m; ++i) {
        double u = assign.uniform();
        std::size_t c = 0;
        while (c + 1 < cumulative.size() && u > cumulative[c]) ++c;
        Eigen::VectorXd z(d);
        for (Eigen::Index j = 0; j < d; ++j) z(j) = draws.normal();
        out.row(i) = (spec[c].mean + chol[c] * z).transpose();
    }
    return out;
}

SurroundingDiagnostic check_surrounding(const Eigen::MatrixXd& points, const Eigen::VectorXd& target,
                                        double epsilon, int n_directions, std::uint64_t seed) {
    if (points.rows() == 0 || points.cols() == 0) fail_invalid("surrounding check needs a nonempty point set");
    if (points.cols() != target.size()) fail_invalid("target dimension does not match points");
    if (epsilon <= 0.0) fail_invalid("surrounding epsilon must be positive");
    if (n_directions < 100) fail_invalid("surrounding check needs at least 100 directions");

    Eigen::Index d = points.cols();
    Eigen::MatrixXd dirs(d, n_directions + 2 * d);
    Rng rng(seed);
    for (int k = 0; k < n_directions; ++k) {
        Eigen::VectorXd v(d);
        double norm = 0.0;
        do {
            for (Eigen::Index j = 0; j < d; ++j) v(j) = rng.normal();
            norm = v.norm();
        } while (norm < 1e-12);
        dirs.col(k) = v / norm;
    }
    for (Eigen::Index j = 0; j < d; ++j) {
        dirs.col(n_directions + 2 * j) = Eigen::VectorXd::Unit(d, j);
        dirs.col(n_directions + 2 * j + 1) = -Eigen::VectorXd::Unit(d, j);
    }

    Eigen::MatrixXd centered = points.rowwise() - target.transpose();
    Eigen::MatrixXd proj = centered * dirs;  // rows x directions
    double min_mass = 1.0;
    for (Eigen::Index k = 0; k < proj.cols(); ++k) {
        double count = (proj.col(k).array() > epsilon).count();
        min_mass = std::min(min_mass, count / static_cast<double>(points.rows()));
    }

    SurroundingDiagnostic diag;
    diag.target = target;
    diag.epsilon = epsilon;
    diag.delta_hat = min_mass;
    diag.directions_probed = static_cast<int>(proj.cols());
    diag.pass = min_mass > 0.0;
    return diag;
}

}  // namespace wlim
