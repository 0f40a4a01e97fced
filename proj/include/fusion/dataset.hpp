#pragma once

// Prediction matrices, ground truth, and the aligned multi-model bundle,
// together with their comma-delimited file formats:
//
//   predictions: sample_id,<label1>,...,<labelL>            (probabilities)
//   truth:       sample_id,patient_id,<label1>,...,<labelL> (0/1)

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "fusion/csv.hpp"
#include "fusion/error.hpp"
#include "fusion/matrix.hpp"

namespace fusion {

/// Ordered label identifiers. Order is significant: it fixes column order in every file.
class LabelSpace {
public:
    LabelSpace() = default;
    explicit LabelSpace(std::vector<std::string> names) : names_(std::move(names)) {
        if (names_.empty()) throw InputError("label space is empty");
        std::unordered_set<std::string> seen;
        for (const auto& n : names_) {
            if (n.empty()) throw InputError("label space contains an empty name");
            if (!seen.insert(n).second) throw InputError("duplicate label name '" + n + "'");
        }
    }

    /// The 14 ChestX-ray14 findings, in the row order of the per-disease result table.
    static LabelSpace chest_xray14() {
        return LabelSpace({"Atelectasis", "Consolidation", "Infiltration", "Pneumothorax",
                           "Edema", "Emphysema", "Fibrosis", "Effusion", "Pneumonia",
                           "Pleural_Thickening", "Cardiomegaly", "Nodule", "Mass", "Hernia"});
    }

    /// One name per non-empty line.
    static LabelSpace read(const std::string& path) {
        auto in = csv::open_input(path);
        std::vector<std::string> names;
        std::string line;
        while (csv::read_line(in, line)) {
            auto name = csv::trim(csv::strip_bom(line));
            if (!name.empty()) names.emplace_back(name);
        }
        return LabelSpace(std::move(names));
    }

    std::size_t size() const noexcept { return names_.size(); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    const std::string& operator[](std::size_t i) const { return names_[i]; }

    friend bool operator==(const LabelSpace&, const LabelSpace&) = default;

private:
    std::vector<std::string> names_;
};

namespace detail {

inline void require_unique_ids(const std::vector<std::string>& ids, const std::string& what) {
    std::unordered_set<std::string_view> seen;
    seen.reserve(ids.size());
    for (const auto& id : ids)
        if (!seen.insert(id).second) throw InputError(what + ": duplicate sample_id '" + id + "'");
}

inline std::vector<std::string> join_header(std::string_view first, std::string_view second,
                                            const LabelSpace& labels) {
    std::vector<std::string> cols;
    cols.emplace_back(first);
    if (!second.empty()) cols.emplace_back(second);
    for (const auto& n : labels.names()) cols.push_back(n);
    return cols;
}

inline void write_header(std::ostream& out, const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
}

} // namespace detail

struct PredictionMatrix {
    std::string model_name;
    std::vector<std::string> sample_ids;
    Matrix<double> probabilities; // N x L

    std::size_t samples() const noexcept { return probabilities.rows(); }
    std::size_t labels() const noexcept { return probabilities.cols(); }

    void validate() const {
        if (sample_ids.empty()) throw InputError(model_name + ": no samples");
        if (sample_ids.size() != probabilities.rows())
            throw InputError(model_name + ": sample_id count does not match row count");
        for (double p : probabilities.values())
            if (!(p >= 0.0 && p <= 1.0))
                throw InputError(model_name + ": probability outside [0,1]");
        detail::require_unique_ids(sample_ids, model_name);
    }

    PredictionMatrix select_rows(std::span<const std::size_t> rows) const {
        PredictionMatrix out{model_name, {}, probabilities.select_rows(rows)};
        out.sample_ids.reserve(rows.size());
        for (auto r : rows) out.sample_ids.push_back(sample_ids[r]);
        return out;
    }
};

struct GroundTruth {
    std::vector<std::string> sample_ids;
    std::vector<std::string> patient_ids;
    Matrix<std::uint8_t> labels; // N x L, values 0/1

    std::size_t samples() const noexcept { return labels.rows(); }

    void validate() const {
        if (sample_ids.empty()) throw InputError("ground truth: empty dataset");
        if (sample_ids.size() != labels.rows() || patient_ids.size() != labels.rows())
            throw InputError("ground truth: id columns do not match row count");
        for (auto v : labels.values())
            if (v > 1) throw InputError("ground truth: non-binary label");
        for (const auto& p : patient_ids)
            if (p.empty()) throw InputError("ground truth: missing patient_id");
        detail::require_unique_ids(sample_ids, "ground truth");
    }

    GroundTruth select_rows(std::span<const std::size_t> rows) const {
        GroundTruth out{{}, {}, labels.select_rows(rows)};
        out.sample_ids.reserve(rows.size());
        out.patient_ids.reserve(rows.size());
        for (auto r : rows) {
            out.sample_ids.push_back(sample_ids[r]);
            out.patient_ids.push_back(patient_ids[r]);
        }
        return out;
    }
};

/// K prediction matrices row-aligned to one ground truth.
struct ModelBundle {
    LabelSpace label_space;
    GroundTruth truth;
    std::vector<PredictionMatrix> matrices;
    std::size_t dropped_samples = 0; // truth rows not covered by every model

    std::size_t models() const noexcept { return matrices.size(); }
    std::size_t samples() const noexcept { return truth.samples(); }
    std::size_t labels() const noexcept { return label_space.size(); }

    std::vector<std::string> model_names() const {
        std::vector<std::string> names;
        for (const auto& m : matrices) names.push_back(m.model_name);
        return names;
    }

    void validate() const {
        if (matrices.empty()) throw InputError("bundle holds no models");
        std::unordered_set<std::string> names;
        for (const auto& m : matrices) {
            if (!names.insert(m.model_name).second)
                throw InputError("duplicate model name '" + m.model_name + "'");
            if (m.labels() != labels())
                throw InputError(m.model_name + ": label count does not match label space");
            if (m.sample_ids != truth.sample_ids)
                throw InputError(m.model_name + ": rows not aligned with ground truth");
        }
        if (truth.labels.cols() != labels())
            throw InputError("ground truth label count does not match label space");
    }

    /// Sub-bundle over the given truth rows, in the given order.
    ModelBundle select_rows(std::span<const std::size_t> rows) const {
        ModelBundle out{label_space, truth.select_rows(rows), {}, 0};
        for (const auto& m : matrices) out.matrices.push_back(m.select_rows(rows));
        return out;
    }
};

// ---------------------------------------------------------------------------
// Parsing

inline PredictionMatrix parse_predictions(std::istream& in, const LabelSpace& labels,
                                          std::string model_name,
                                          const std::string& source = "predictions") {
    std::string line;
    if (!csv::read_line(in, line)) throw InputError(source + ": missing header");
    {
        auto fields = csv::split(csv::strip_bom(line));
        const auto expected = detail::join_header("sample_id", "", labels);
        bool ok = fields.size() == expected.size();
        for (std::size_t i = 0; ok && i < fields.size(); ++i) ok = csv::trim(fields[i]) == expected[i];
        if (!ok) throw InputError(source + ": header does not match label space");
    }

    const std::size_t L = labels.size();
    std::vector<std::string> ids;
    std::vector<double> values;
    std::unordered_set<std::string> seen;
    std::size_t line_no = 1;
    while (csv::read_line(in, line)) {
        ++line_no;
        if (csv::trim(line).empty()) continue;
        auto fields = csv::split(line);
        if (fields.size() != L + 1)
            throw InputError(csv::row_context(source, line_no) + ": expected " +
                             std::to_string(L + 1) + " fields, found " + std::to_string(fields.size()));
        std::string id(csv::trim(fields[0]));
        if (id.empty()) throw InputError(csv::row_context(source, line_no) + ": empty sample_id");
        if (!seen.insert(id).second)
            throw InputError(csv::row_context(source, line_no) + ": duplicate sample_id '" + id + "'");
        for (std::size_t l = 0; l < L; ++l) {
            auto v = csv::parse_double(fields[l + 1]);
            if (!v)
                throw InputError(csv::row_context(source, line_no) + ": malformed value '" +
                                 std::string(fields[l + 1]) + "'");
            if (!(*v >= 0.0 && *v <= 1.0))
                throw InputError(csv::row_context(source, line_no) + ": probability " +
                                 std::string(csv::trim(fields[l + 1])) + " outside [0,1]");
            values.push_back(*v);
        }
        ids.push_back(std::move(id));
    }
    if (ids.empty()) throw InputError(source + ": empty dataset (header only)");

    PredictionMatrix pm{std::move(model_name), std::move(ids), Matrix<double>(values.size() / L, L)};
    std::copy(values.begin(), values.end(), pm.probabilities.values().begin());
    return pm;
}

/// Model name defaults to the file stem.
inline PredictionMatrix load_predictions(const std::string& path, const LabelSpace& labels,
                                         std::string model_name = {}) {
    if (model_name.empty()) model_name = std::filesystem::path(path).stem().string();
    auto in = csv::open_input(path);
    return parse_predictions(in, labels, std::move(model_name), path);
}

/// Label names from a truth-file header (columns after sample_id,patient_id).
inline LabelSpace parse_truth_header(std::string_view header, const std::string& source = "truth") {
    auto fields = csv::split(csv::strip_bom(header));
    if (fields.size() < 3 || csv::trim(fields[0]) != "sample_id" || csv::trim(fields[1]) != "patient_id")
        throw InputError(source + ": header must start with sample_id,patient_id and name at least one label");
    std::vector<std::string> names;
    for (std::size_t i = 2; i < fields.size(); ++i) names.emplace_back(csv::trim(fields[i]));
    return LabelSpace(std::move(names));
}

inline LabelSpace read_truth_labels(const std::string& path) {
    auto in = csv::open_input(path);
    std::string line;
    if (!csv::read_line(in, line)) throw InputError(path + ": missing header");
    return parse_truth_header(line, path);
}

inline GroundTruth parse_truth(std::istream& in, const LabelSpace& labels,
                               const std::string& source = "truth") {
    std::string line;
    if (!csv::read_line(in, line)) throw InputError(source + ": missing header");
    if (parse_truth_header(line, source) != labels)
        throw InputError(source + ": header does not match label space");

    const std::size_t L = labels.size();
    GroundTruth gt;
    std::vector<std::uint8_t> values;
    std::unordered_set<std::string> seen;
    std::size_t line_no = 1;
    while (csv::read_line(in, line)) {
        ++line_no;
        if (csv::trim(line).empty()) continue;
        auto fields = csv::split(line);
        if (fields.size() != L + 2)
            throw InputError(csv::row_context(source, line_no) + ": expected " +
                             std::to_string(L + 2) + " fields, found " + std::to_string(fields.size()));
        std::string id(csv::trim(fields[0]));
        std::string patient(csv::trim(fields[1]));
        if (id.empty()) throw InputError(csv::row_context(source, line_no) + ": empty sample_id");
        if (patient.empty()) throw InputError(csv::row_context(source, line_no) + ": missing patient_id");
        if (!seen.insert(id).second)
            throw InputError(csv::row_context(source, line_no) + ": duplicate sample_id '" + id + "'");
        for (std::size_t l = 0; l < L; ++l) {
            auto f = csv::trim(fields[l + 2]);
            if (f == "0") values.push_back(0);
            else if (f == "1") values.push_back(1);
            else
                throw InputError(csv::row_context(source, line_no) + ": non-binary label '" +
                                 std::string(f) + "'");
        }
        gt.sample_ids.push_back(std::move(id));
        gt.patient_ids.push_back(std::move(patient));
    }
    if (gt.sample_ids.empty()) throw InputError(source + ": empty dataset (header only)");
    gt.labels = Matrix<std::uint8_t>(gt.sample_ids.size(), L);
    std::copy(values.begin(), values.end(), gt.labels.values().begin());
    return gt;
}

inline GroundTruth load_truth(const std::string& path, const LabelSpace& labels) {
    auto in = csv::open_input(path);
    return parse_truth(in, labels, path);
}

// ---------------------------------------------------------------------------
// Writing

inline void write_predictions(std::ostream& out, const PredictionMatrix& pm, const LabelSpace& labels) {
    detail::write_header(out, detail::join_header("sample_id", "", labels));
    for (std::size_t n = 0; n < pm.samples(); ++n) {
        out << pm.sample_ids[n];
        for (double p : pm.probabilities.row(n)) out << ',' << csv::format_double(p);
        out << '\n';
    }
}

inline void write_predictions(const std::string& path, const PredictionMatrix& pm, const LabelSpace& labels) {
    auto out = csv::open_output(path);
    write_predictions(out, pm, labels);
}

inline void write_truth(std::ostream& out, const GroundTruth& gt, const LabelSpace& labels) {
    detail::write_header(out, detail::join_header("sample_id", "patient_id", labels));
    for (std::size_t n = 0; n < gt.samples(); ++n) {
        out << gt.sample_ids[n] << ',' << gt.patient_ids[n];
        for (auto v : gt.labels.row(n)) out << ',' << static_cast<int>(v);
        out << '\n';
    }
}

inline void write_truth(const std::string& path, const GroundTruth& gt, const LabelSpace& labels) {
    auto out = csv::open_output(path);
    write_truth(out, gt, labels);
}

// ---------------------------------------------------------------------------
// Alignment

/// Restricts truth and every matrix to the sample_ids they all share, in truth order.
inline ModelBundle align(const LabelSpace& labels, const GroundTruth& truth,
                         const std::vector<PredictionMatrix>& matrices) {
    if (matrices.empty()) throw InputError("align: no prediction matrices");
    if (truth.labels.cols() != labels.size())
        throw InputError("align: ground truth label count does not match label space");

    std::vector<std::unordered_map<std::string_view, std::size_t>> index(matrices.size());
    for (std::size_t k = 0; k < matrices.size(); ++k) {
        const auto& m = matrices[k];
        if (m.labels() != labels.size())
            throw InputError("align: " + m.model_name + " has " + std::to_string(m.labels()) +
                             " labels, expected " + std::to_string(labels.size()));
        index[k].reserve(m.samples());
        for (std::size_t n = 0; n < m.samples(); ++n) index[k].emplace(m.sample_ids[n], n);
    }

    std::vector<std::size_t> truth_rows;
    std::vector<std::vector<std::size_t>> model_rows(matrices.size());
    for (std::size_t n = 0; n < truth.samples(); ++n) {
        bool everywhere = true;
        for (const auto& idx : index)
            if (!idx.contains(truth.sample_ids[n])) { everywhere = false; break; }
        if (!everywhere) continue;
        truth_rows.push_back(n);
        for (std::size_t k = 0; k < matrices.size(); ++k)
            model_rows[k].push_back(index[k].at(truth.sample_ids[n]));
    }
    if (truth_rows.empty()) throw InputError("align: no sample_id shared by truth and all models");

    ModelBundle bundle{labels, truth.select_rows(truth_rows), {}, truth.samples() - truth_rows.size()};
    for (std::size_t k = 0; k < matrices.size(); ++k)
        bundle.matrices.push_back(matrices[k].select_rows(model_rows[k]));
    bundle.validate();
    return bundle;
}

} // namespace fusion
