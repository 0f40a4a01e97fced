#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "fusion/dataset.hpp"
#include "fusion/rng.hpp"

using namespace fusion;

namespace {

LabelSpace two_labels() { return LabelSpace({"A", "B"}); }

PredictionMatrix parse_pm(const std::string& text, const LabelSpace& labels = two_labels()) {
    std::istringstream in(text);
    return parse_predictions(in, labels, "model");
}

GroundTruth parse_gt(const std::string& text, const LabelSpace& labels = two_labels()) {
    std::istringstream in(text);
    return parse_truth(in, labels);
}

std::string error_of(auto&& fn) {
    try {
        fn();
    } catch (const InputError& e) {
        return e.what();
    }
    return {};
}

PredictionMatrix make_pm(std::string name, std::vector<std::string> ids, std::vector<double> values, std::size_t L) {
    PredictionMatrix pm{std::move(name), std::move(ids), Matrix<double>(values.size() / L, L)};
    std::copy(values.begin(), values.end(), pm.probabilities.values().begin());
    return pm;
}

GroundTruth make_gt(std::vector<std::string> ids, std::vector<std::uint8_t> values, std::size_t L) {
    GroundTruth gt{ids, ids, Matrix<std::uint8_t>(values.size() / L, L)};
    std::copy(values.begin(), values.end(), gt.labels.values().begin());
    return gt;
}

} // namespace

TEST(LabelSpace, DefaultIsFourteenFindings) {
    const auto ls = LabelSpace::chest_xray14();
    ASSERT_EQ(ls.size(), 14u);
    EXPECT_EQ(ls[0], "Atelectasis");
    EXPECT_EQ(ls[13], "Hernia");
}

TEST(LabelSpace, RejectsDuplicatesAndEmpty) {
    EXPECT_THROW(LabelSpace({"A", "A"}), InputError);
    EXPECT_THROW(LabelSpace(std::vector<std::string>{}), InputError);
}

TEST(LoadPredictions, ParsesSingleRow) {
    const auto ls = LabelSpace::chest_xray14();
    std::string text = "sample_id";
    for (const auto& n : ls.names()) text += "," + n;
    text += "\ns1";
    for (std::size_t i = 0; i < 14; ++i) text += i == 0 ? ",0.2" : ",0.5";
    text += "\n";
    const auto pm = parse_pm(text, ls);
    ASSERT_EQ(pm.samples(), 1u);
    EXPECT_EQ(pm.probabilities(0, 0), 0.2);
    EXPECT_EQ(pm.sample_ids[0], "s1");
}

TEST(LoadPredictions, AcceptsCrlf) {
    const auto pm = parse_pm("sample_id,A,B\r\ns1,0.1,0.9\r\ns2,1,0\r\n");
    EXPECT_EQ(pm.samples(), 2u);
    EXPECT_EQ(pm.probabilities(1, 0), 1.0);
}

TEST(LoadPredictions, RangeErrorNamesRow) {
    const auto msg = error_of([] { parse_pm("sample_id,A,B\ns1,0.1,0.2\ns2,1.0001,0.5\n"); });
    EXPECT_NE(msg.find("row 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("outside [0,1]"), std::string::npos) << msg;
}

TEST(LoadPredictions, DuplicateSampleId) {
    const auto msg = error_of([] { parse_pm("sample_id,A,B\ns7,0.1,0.2\ns1,0.1,0.2\ns7,0.3,0.4\n"); });
    EXPECT_NE(msg.find("duplicate sample_id 's7'"), std::string::npos) << msg;
    EXPECT_NE(msg.find("row 4"), std::string::npos) << msg;
}

TEST(LoadPredictions, MalformedRowAndHeaderMismatch) {
    EXPECT_NE(error_of([] { parse_pm("sample_id,A,B\ns1,0.1\n"); }).find("row 2"), std::string::npos);
    EXPECT_NE(error_of([] { parse_pm("sample_id,A,B\ns1,abc,0.1\n"); }).find("malformed"), std::string::npos);
    EXPECT_NE(error_of([] { parse_pm("sample_id,B,A\ns1,0.1,0.1\n"); }).find("header"), std::string::npos);
    EXPECT_THROW(parse_pm("sample_id,A,B\ns1,nan,0.1\n"), InputError);
}

TEST(LoadTruth, ParsesBinaryLabels) {
    const auto gt = parse_gt("sample_id,patient_id,A,B\ns1,p1,1,0\ns2,p1,0,0\n");
    EXPECT_EQ(gt.labels(0, 0), 1);
    EXPECT_EQ(gt.labels(0, 1), 0);
    EXPECT_EQ(gt.patient_ids[1], "p1");
}

TEST(LoadTruth, Errors) {
    EXPECT_NE(error_of([] { parse_gt("sample_id,patient_id,A,B\ns1,p1,0.5,0\n"); }).find("non-binary"),
              std::string::npos);
    EXPECT_NE(error_of([] { parse_gt("sample_id,patient_id,A,B\n"); }).find("empty dataset"), std::string::npos);
    EXPECT_NE(error_of([] { parse_gt("sample_id,patient_id,A,B\ns1,,1,0\n"); }).find("missing patient_id"),
              std::string::npos);
}

TEST(LoadTruth, HeaderDefinesLabelSpace) {
    EXPECT_EQ(parse_truth_header("sample_id,patient_id,X,Y"), LabelSpace({"X", "Y"}));
    EXPECT_THROW(parse_truth_header("sample_id,X,Y"), InputError);
}

TEST(Align, ReordersToTruthOrder) {
    const auto gt = make_gt({"s1", "s2"}, {1, 0}, 1);
    const auto a = make_pm("A", {"s1", "s2"}, {0.1, 0.2}, 1);
    const auto b = make_pm("B", {"s2", "s1"}, {0.9, 0.8}, 1);
    const auto bundle = align(LabelSpace({"X"}), gt, {a, b});
    EXPECT_EQ(bundle.truth.sample_ids, (std::vector<std::string>{"s1", "s2"}));
    EXPECT_EQ(bundle.matrices[1].sample_ids, (std::vector<std::string>{"s1", "s2"}));
    EXPECT_EQ(bundle.matrices[1].probabilities(0, 0), 0.8);
    EXPECT_EQ(bundle.matrices[1].probabilities(1, 0), 0.9);
    EXPECT_EQ(bundle.dropped_samples, 0u);
}

TEST(Align, IntersectsAndCountsDrops) {
    const auto gt = make_gt({"s1", "s2", "s3"}, {1, 0, 1}, 1);
    const auto a = make_pm("A", {"s1", "s2"}, {0.1, 0.2}, 1);
    const auto bundle = align(LabelSpace({"X"}), gt, {a});
    EXPECT_EQ(bundle.samples(), 2u);
    EXPECT_EQ(bundle.dropped_samples, 1u);
}

TEST(Align, Errors) {
    const auto gt = make_gt({"s1"}, {1}, 1);
    EXPECT_THROW(align(LabelSpace({"X"}), gt, {make_pm("A", {"s2"}, {0.1}, 1)}), InputError);
    const auto gt2 = make_gt({"s1"}, {1, 0}, 2);
    EXPECT_THROW(align(LabelSpace({"X", "Y"}), gt2, {make_pm("A", {"s1"}, {0.1, 0.2}, 2), make_pm("B", {"s1"}, {0.1}, 1)}),
                 InputError);
    EXPECT_THROW(align(LabelSpace({"X", "Y"}), gt2, {make_pm("A", {"s1"}, {0.1, 0.2}, 2), make_pm("A", {"s1"}, {0.1, 0.2}, 2)}),
                 InputError);
}

TEST(Align, Idempotent) {
    const auto gt = make_gt({"s3", "s1", "s2"}, {1, 0, 1}, 1);
    const auto a = make_pm("A", {"s2", "s1", "s9", "s3"}, {0.1, 0.2, 0.3, 0.4}, 1);
    const auto b = make_pm("B", {"s1", "s3", "s2"}, {0.5, 0.6, 0.7}, 1);
    const auto once = align(LabelSpace({"X"}), gt, {a, b});
    const auto twice = align(once.label_space, once.truth, once.matrices);
    EXPECT_EQ(twice.truth.sample_ids, once.truth.sample_ids);
    EXPECT_EQ(twice.truth.labels, once.truth.labels);
    for (std::size_t k = 0; k < 2; ++k) {
        EXPECT_EQ(twice.matrices[k].sample_ids, once.truth.sample_ids);
        EXPECT_EQ(twice.matrices[k].probabilities, once.matrices[k].probabilities);
    }
}

TEST(RoundTrip, PredictionsSurviveWriteAndLoad) {
    Rng rng(11);
    const LabelSpace labels({"A", "B", "C"});
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + rng.below(30);
        PredictionMatrix pm{"m", {}, Matrix<double>(n, 3)};
        for (std::size_t i = 0; i < n; ++i) pm.sample_ids.push_back("s" + std::to_string(i));
        for (auto& v : pm.probabilities.values()) v = trial % 2 ? rng.uniform() : std::round(rng.uniform() * 1000) / 1000;
        std::stringstream io;
        write_predictions(io, pm, labels);
        const auto back = parse_predictions(io, labels, "m");
        EXPECT_EQ(back.sample_ids, pm.sample_ids);
        EXPECT_EQ(back.probabilities, pm.probabilities);
    }
}

TEST(RoundTrip, TruthSurvivesWriteAndLoad) {
    const LabelSpace labels({"A", "B"});
    GroundTruth gt{{"s1", "s2"}, {"p1", "p2"}, Matrix<std::uint8_t>(2, 2)};
    gt.labels(0, 1) = 1;
    std::stringstream io;
    write_truth(io, gt, labels);
    const auto back = parse_truth(io, labels);
    EXPECT_EQ(back.sample_ids, gt.sample_ids);
    EXPECT_EQ(back.patient_ids, gt.patient_ids);
    EXPECT_EQ(back.labels, gt.labels);
}
