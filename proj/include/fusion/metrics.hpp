#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fusion/csv.hpp"
#include "fusion/dataset.hpp"
#include "fusion/error.hpp"
#include "fusion/matrix.hpp"

namespace fusion {

namespace detail {

// Order of sample indices by ascending score; stable so equal inputs give
// identical orderings.
inline std::vector<std::size_t> ascending_order(std::span<const double> scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    return order;
}

inline std::size_t count_positives(std::span<const std::uint8_t> labels) {
    return static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](auto v) { return v != 0; }));
}

} // namespace detail

/// Mann-Whitney AUROC with average ranks for tied scores.
///
/// Equals the fraction of (positive, negative) pairs where the positive
/// scores higher, tied pairs counted as one half. Throws UndefinedAuroc when
/// the labels hold a single class.
inline double auroc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    if (scores.size() != labels.size()) throw ComputeError("auroc: scores and labels differ in length");
    if (scores.empty()) throw ComputeError("auroc: no samples");
    const std::size_t pos = detail::count_positives(labels);
    const std::size_t neg = labels.size() - pos;
    if (pos == 0) throw UndefinedAuroc(0);
    if (neg == 0) throw UndefinedAuroc(1);

    const auto order = detail::ascending_order(scores);
    // Ranks are 1-based; a tie block [i, j) shares rank (i + j + 1) / 2.
    // Twice the rank sum is an integer, so the accumulation below is exact.
    double twice_rank_sum = 0.0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i + 1;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        std::size_t block_pos = 0;
        for (std::size_t t = i; t < j; ++t) block_pos += labels[order[t]] != 0;
        twice_rank_sum += static_cast<double>(block_pos) * static_cast<double>(i + j + 1);
        i = j;
    }
    const double P = static_cast<double>(pos);
    const double u = 0.5 * twice_rank_sum - P * (P + 1.0) / 2.0;
    return u / (P * static_cast<double>(neg));
}

struct RocPoint {
    double false_positive_rate;
    double true_positive_rate;
    double threshold; // score >= threshold is called positive
};

struct RocCurve {
    std::vector<RocPoint> points;
};

/// One point per distinct score (descending), preceded by a (0,0) sentinel at +inf.
inline RocCurve roc_curve(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    if (scores.size() != labels.size()) throw ComputeError("roc_curve: scores and labels differ in length");
    if (scores.empty()) throw ComputeError("roc_curve: no samples");
    const std::size_t pos = detail::count_positives(labels);
    const std::size_t neg = labels.size() - pos;
    if (pos == 0) throw UndefinedAuroc(0);
    if (neg == 0) throw UndefinedAuroc(1);

    auto order = detail::ascending_order(scores);
    std::reverse(order.begin(), order.end());

    RocCurve curve;
    curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < order.size();) {
        const double threshold = scores[order[i]];
        std::size_t j = i;
        for (; j < order.size() && scores[order[j]] == threshold; ++j) {
            if (labels[order[j]]) ++tp;
            else ++fp;
        }
        curve.points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                                static_cast<double>(tp) / static_cast<double>(pos), threshold});
        i = j;
    }
    return curve;
}

inline double trapezoid_area(const RocCurve& curve) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& a = curve.points[i - 1];
        const auto& b = curve.points[i];
        area += (b.false_positive_rate - a.false_positive_rate) *
                (a.true_positive_rate + b.true_positive_rate) * 0.5;
    }
    return area;
}

inline void write_roc_csv(std::ostream& out, const RocCurve& curve) {
    out << "fpr,tpr,threshold\n";
    for (const auto& p : curve.points)
        out << csv::format_double(p.false_positive_rate) << ',' << csv::format_double(p.true_positive_rate)
            << ',' << (std::isinf(p.threshold) ? std::string("inf") : csv::format_double(p.threshold)) << '\n';
}

struct AurocReport {
    std::vector<std::string> labels;
    std::vector<std::optional<double>> per_label; // nullopt: single-class column
    double macro_mean = 0.0;
    std::vector<std::string> skipped_labels;

    std::optional<double> at(std::string_view label) const {
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == label) return per_label[i];
        return std::nullopt;
    }
};

/// Per-label AUROC over aligned score/label matrices; single-class labels are skipped.
inline AurocReport macro_auroc(const Matrix<double>& scores, const Matrix<std::uint8_t>& truth,
                               const LabelSpace& labels) {
    if (scores.rows() != truth.rows() || scores.cols() != truth.cols() || scores.cols() != labels.size())
        throw ComputeError("macro_auroc: score and truth matrices are not aligned");
    AurocReport report;
    report.labels = labels.names();
    double sum = 0.0;
    std::size_t defined = 0;
    for (std::size_t l = 0; l < labels.size(); ++l) {
        const auto s = scores.column(l);
        const auto y = truth.column(l);
        try {
            const double a = auroc(s, y);
            report.per_label.emplace_back(a);
            sum += a;
            ++defined;
        } catch (const UndefinedAuroc&) {
            report.per_label.emplace_back(std::nullopt);
            report.skipped_labels.push_back(labels[l]);
        }
    }
    if (defined == 0) throw ComputeError("macro_auroc: every label is single-class; macro mean undefined");
    report.macro_mean = sum / static_cast<double>(defined);
    return report;
}

inline AurocReport macro_auroc(const PredictionMatrix& predictions, const GroundTruth& truth,
                               const LabelSpace& labels) {
    if (predictions.sample_ids != truth.sample_ids)
        throw ComputeError("macro_auroc: " + predictions.model_name + " is not row-aligned with truth");
    return macro_auroc(predictions.probabilities, truth.labels, labels);
}

/// Key-value report: `auroc.<label> <value|undefined>`, then `macro_auroc` and skipped labels.
inline void write_report(std::ostream& out, const AurocReport& report, std::string_view model = {}) {
    if (!model.empty()) out << "model " << model << '\n';
    for (std::size_t l = 0; l < report.labels.size(); ++l) {
        out << "auroc." << report.labels[l] << ' ';
        if (report.per_label[l]) out << csv::format_double(*report.per_label[l]);
        else out << "undefined";
        out << '\n';
    }
    out << "macro_auroc " << csv::format_double(report.macro_mean) << '\n';
    out << "skipped_labels";
    for (const auto& s : report.skipped_labels) out << ' ' << s;
    out << '\n';
}

} // namespace fusion
