#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "fusion/csv.hpp"
#include "fusion/version.hpp"

namespace fusion {

/// 64-bit FNV-1a over the file's bytes.
inline std::uint64_t file_digest(const std::string& path) {
    auto in = csv::open_input(path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    std::istreambuf_iterator<char> it(in), end;
    for (; it != end; ++it) {
        h ^= static_cast<unsigned char>(*it);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// What a run needs to be reproduced: command, resolved settings, input digests.
/// Deliberately carries no timestamps so reruns produce identical manifests.
struct RunManifest {
    std::string command;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> settings;
    std::vector<std::pair<std::string, std::uint64_t>> inputs;
    std::vector<std::string> outputs;

    RunManifest(std::string cmd, std::uint64_t s) : command(std::move(cmd)), seed(s) {}

    void set(std::string key, std::string value) { settings.emplace_back(std::move(key), std::move(value)); }
    void input(const std::string& path) { inputs.emplace_back(path, file_digest(path)); }

    void write(std::ostream& out) const {
        out << "command " << command << '\n' << "version " << kVersion << '\n' << "seed " << seed << '\n';
        for (const auto& [k, v] : settings) out << "config." << k << ' ' << v << '\n';
        for (const auto& [path, digest] : inputs) {
            char hex[17];
            std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(digest));
            out << "input " << path << " fnv1a64:" << hex << '\n';
        }
        for (const auto& o : outputs) out << "output " << o << '\n';
    }

    void write(const std::string& path) const {
        auto out = csv::open_output(path);
        write(out);
    }
};

} // namespace fusion
