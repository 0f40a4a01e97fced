#pragma once

// Patient-grouped train/validation/test split. All images of a patient land
// in the same split.

#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <span>
#include <utility>
#include <vector>

#include "fusion/csv.hpp"
#include "fusion/error.hpp"
#include "fusion/rng.hpp"

namespace fusion {

enum class Split : std::uint8_t { train = 0, validation = 1, test = 2 };

inline constexpr std::array<std::string_view, 3> kSplitNames{"train", "validation", "test"};

inline std::string_view to_string(Split s) { return kSplitNames[static_cast<std::size_t>(s)]; }

inline Split parse_split(std::string_view s) {
    for (std::size_t i = 0; i < kSplitNames.size(); ++i)
        if (s == kSplitNames[i]) return static_cast<Split>(i);
    throw InputError("unknown split '" + std::string(s) + "' (expected train, validation or test)");
}

struct SplitConfig {
    std::array<double, 3> fractions{0.7, 0.1, 0.2};
    std::uint64_t seed = 0;

    void validate() const {
        double total = 0.0;
        for (double f : fractions) {
            if (!(f > 0.0)) throw ComputeError("split fractions must be positive");
            total += f;
        }
        if (std::abs(total - 1.0) > 1e-9) throw ComputeError("split fractions must sum to 1");
    }
};

struct SplitAssignment {
    std::vector<std::string> sample_ids; // input order
    std::vector<Split> splits;           // parallel to sample_ids
    std::array<std::size_t, 3> images{};
    std::array<std::size_t, 3> patients{};
    std::vector<std::string> warnings;

    std::vector<std::size_t> rows_in(Split s) const {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < splits.size(); ++i)
            if (splits[i] == s) rows.push_back(i);
        return rows;
    }
};

/// Shuffles patients with the seed, then fills train, validation and test in
/// turn, moving to the next split once the current one's image count first
/// reaches its target fraction of all images.
inline SplitAssignment grouped_split(const std::vector<std::string>& sample_ids,
                                     const std::vector<std::string>& patient_ids, const SplitConfig& config) {
    config.validate();
    if (sample_ids.size() != patient_ids.size())
        throw InputError("split: sample and patient id lists differ in length");
    if (sample_ids.empty()) throw InputError("split: no samples");

    // Patients in order of first appearance, each with their sample rows.
    std::unordered_map<std::string_view, std::size_t> patient_index;
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < patient_ids.size(); ++i) {
        if (patient_ids[i].empty()) throw InputError("split: missing patient_id for " + sample_ids[i]);
        auto [it, inserted] = patient_index.try_emplace(patient_ids[i], groups.size());
        if (inserted) groups.emplace_back();
        groups[it->second].push_back(i);
    }

    std::vector<std::size_t> order(groups.size());
    for (std::size_t p = 0; p < order.size(); ++p) order[p] = p;
    Rng rng(config.seed);
    rng.shuffle(std::span<std::size_t>(order));

    const double total = static_cast<double>(sample_ids.size());
    SplitAssignment out;
    out.sample_ids = sample_ids;
    out.splits.assign(sample_ids.size(), Split::train);
    std::size_t current = 0;
    for (auto p : order) {
        for (auto row : groups[p]) out.splits[row] = static_cast<Split>(current);
        out.images[current] += groups[p].size();
        out.patients[current] += 1;
        const double target = config.fractions[current] * total;
        if (current < 2 && static_cast<double>(out.images[current]) >= target - 1e-9 * total) ++current;
    }

    if (groups.size() < 3)
        out.warnings.push_back("only " + std::to_string(groups.size()) +
                               " patient(s); fewer patients than splits");
    for (std::size_t s = 0; s < 3; ++s)
        if (out.images[s] == 0) out.warnings.push_back(std::string(kSplitNames[s]) + " split is empty");
    return out;
}

inline void write_split_summary(std::ostream& out, const SplitAssignment& a, std::string_view prefix = "# ") {
    const std::size_t images = a.images[0] + a.images[1] + a.images[2];
    const std::size_t patients = a.patients[0] + a.patients[1] + a.patients[2];
    out << prefix << ",Total,Train,Validation,Test\n";
    out << prefix << "Images," << images << ',' << a.images[0] << ',' << a.images[1] << ',' << a.images[2] << '\n';
    out << prefix << "Unique Patients," << patients << ',' << a.patients[0] << ',' << a.patients[1] << ','
        << a.patients[2] << '\n';
}

/// `sample_id,split` rows, then `#`-prefixed summary lines laid out as an
/// images/patients by total/train/validation/test table.
inline void write_split(std::ostream& out, const SplitAssignment& a) {
    out << "sample_id,split\n";
    for (std::size_t i = 0; i < a.sample_ids.size(); ++i)
        out << a.sample_ids[i] << ',' << to_string(a.splits[i]) << '\n';
    write_split_summary(out, a);
}

/// Reads an assignment file; summary and other `#` lines are skipped.
inline std::unordered_map<std::string, Split> read_split(std::istream& in, const std::string& source = "split") {
    std::string line;
    if (!csv::read_line(in, line) || csv::trim(csv::strip_bom(line)) != "sample_id,split")
        throw InputError(source + ": header must be sample_id,split");
    std::unordered_map<std::string, Split> out;
    std::size_t line_no = 1;
    while (csv::read_line(in, line)) {
        ++line_no;
        auto s = csv::trim(line);
        if (s.empty() || s.front() == '#') continue;
        auto f = csv::split(s);
        if (f.size() != 2) throw InputError(csv::row_context(source, line_no) + ": expected 2 fields");
        if (!out.emplace(std::string(csv::trim(f[0])), parse_split(csv::trim(f[1]))).second)
            throw InputError(csv::row_context(source, line_no) + ": duplicate sample_id");
    }
    return out;
}

} // namespace fusion
