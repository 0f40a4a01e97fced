#pragma once

// Differential evolution (rand/1/bin) for bound-constrained maximization,
// plus Euclidean projection onto the probability simplex.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "fusion/csv.hpp"
#include "fusion/error.hpp"
#include "fusion/rng.hpp"

namespace fusion {

struct DeConfig {
    std::size_t population_size = 0; // 0 selects max(15 * dim, 20)
    double mutation_factor = 0.5;
    double crossover_rate = 0.7;
    std::size_t max_generations = 300;
    double convergence_tolerance = 1e-7;
    std::uint64_t seed = 0;
    std::vector<double> lower_bounds; // empty selects 0 in every dimension
    std::vector<double> upper_bounds; // empty selects 1 in every dimension
    std::size_t threads = 1;          // fitness evaluation workers; does not affect results

    std::size_t resolved_population(std::size_t dim) const {
        return population_size ? population_size : std::max<std::size_t>(15 * dim, 20);
    }

    void validate(std::size_t dim) const {
        if (dim == 0) throw ComputeError("DE: dimension must be at least 1");
        if (resolved_population(dim) < 4) throw ComputeError("DE: population_size must be >= 4");
        if (!(mutation_factor > 0.0) || !std::isfinite(mutation_factor))
            throw ComputeError("DE: mutation_factor must be positive");
        if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0))
            throw ComputeError("DE: crossover_rate must lie in [0,1]");
        if (max_generations == 0) throw ComputeError("DE: max_generations must be positive");
        if (!(convergence_tolerance >= 0.0)) throw ComputeError("DE: convergence_tolerance must be >= 0");
        if ((!lower_bounds.empty() && lower_bounds.size() != dim) ||
            (!upper_bounds.empty() && upper_bounds.size() != dim))
            throw ComputeError("DE: bounds length does not match dimension");
        for (std::size_t d = 0; d < dim; ++d)
            if (!(lower(d) <= upper(d))) throw ComputeError("DE: lower bound exceeds upper bound");
    }

    double lower(std::size_t d) const { return lower_bounds.empty() ? 0.0 : lower_bounds[d]; }
    double upper(std::size_t d) const { return upper_bounds.empty() ? 1.0 : upper_bounds[d]; }
};

struct DeResult {
    std::vector<double> best_vector;
    double best_fitness = -std::numeric_limits<double>::infinity();
    std::size_t generations_run = 0;
    std::vector<double> history; // best-so-far fitness: initial population, then one entry per generation
    std::size_t nonfinite_evaluations = 0;

    friend bool operator==(const DeResult&, const DeResult&) = default;
};

/// Runs fn(i) for i in [0, n) on up to `threads` workers.
inline void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t)
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) fn(i);
        });
}

/// Post-clip hook that maps a candidate into the feasible set in place (e.g. simplex projection).
/// It must keep the candidate within the box bounds.
using DeRepair = std::function<void(std::span<double>)>;

/// Maximizes `objective` over the box given by the config bounds.
///
/// Trial vectors for a generation are all drawn before any is evaluated, so
/// evaluation order (and thread count) never changes the trajectory. The
/// objective must be safe to call concurrently when config.threads > 1.
/// Non-finite objective values count as -inf.
template <typename Objective>
DeResult optimize(Objective&& objective, std::size_t dim, const DeConfig& config, const DeRepair& repair = {}) {
    config.validate(dim);
    const std::size_t np = config.resolved_population(dim);
    Rng rng(config.seed);
    DeResult result;

    auto clip = [&](std::span<double> x) {
        for (std::size_t d = 0; d < dim; ++d) x[d] = std::clamp(x[d], config.lower(d), config.upper(d));
    };
    auto finish = [&](std::span<double> x) {
        clip(x);
        if (repair) repair(x);
    };

    std::vector<double> population(np * dim);
    std::vector<double> fitness(np);
    auto member = [&](std::vector<double>& pool, std::size_t i) { return std::span<double>(pool.data() + i * dim, dim); };

    auto evaluate = [&](std::vector<double>& pool, std::vector<double>& out) {
        parallel_for(np, config.threads, [&](std::size_t i) {
            const auto x = std::span<const double>(pool.data() + i * dim, dim);
            const double f = objective(x);
            out[i] = std::isfinite(f) ? f : -std::numeric_limits<double>::infinity();
        });
        for (double f : out) result.nonfinite_evaluations += std::isinf(f) ? 1 : 0;
    };

    auto update_best = [&] {
        std::size_t best = np;
        for (std::size_t i = 0; i < np; ++i)
            if (fitness[i] > result.best_fitness && (best == np || fitness[i] > fitness[best])) best = i;
        if (best != np) {
            result.best_fitness = fitness[best];
            auto b = member(population, best);
            result.best_vector.assign(b.begin(), b.end());
        }
        result.history.push_back(result.best_fitness);
    };

    for (std::size_t i = 0; i < np; ++i) {
        auto x = member(population, i);
        for (std::size_t d = 0; d < dim; ++d)
            x[d] = config.lower(d) + rng.uniform() * (config.upper(d) - config.lower(d));
        finish(x);
    }
    evaluate(population, fitness);
    if (std::all_of(fitness.begin(), fitness.end(), [](double f) { return std::isinf(f); }))
        throw ComputeError("DE: objective was non-finite for every member of the initial population");
    update_best();

    auto converged = [&] {
        const auto [lo, hi] = std::minmax_element(fitness.begin(), fitness.end());
        return std::isfinite(*lo) && (*hi - *lo) < config.convergence_tolerance;
    };

    std::vector<double> trials(np * dim);
    std::vector<double> trial_fitness(np);
    while (result.generations_run < config.max_generations && !converged()) {
        for (std::size_t i = 0; i < np; ++i) {
            std::size_t a, b, c;
            do { a = rng.below(np); } while (a == i);
            do { b = rng.below(np); } while (b == i || b == a);
            do { c = rng.below(np); } while (c == i || c == a || c == b);
            const std::size_t forced = rng.below(dim);
            auto target = member(population, i);
            auto xa = member(population, a), xb = member(population, b), xc = member(population, c);
            auto trial = member(trials, i);
            for (std::size_t d = 0; d < dim; ++d) {
                const bool cross = d == forced || rng.uniform() < config.crossover_rate;
                trial[d] = cross ? xa[d] + config.mutation_factor * (xb[d] - xc[d]) : target[d];
            }
            finish(trial);
        }
        evaluate(trials, trial_fitness);
        for (std::size_t i = 0; i < np; ++i) {
            if (trial_fitness[i] >= fitness[i]) {
                auto t = member(trials, i);
                std::copy(t.begin(), t.end(), member(population, i).begin());
                fitness[i] = trial_fitness[i];
            }
        }
        ++result.generations_run;
        update_best();
    }
    return result;
}

/// Euclidean projection onto {w : w >= 0, sum w = 1}.
///
/// Inputs already feasible to within 1e-12 are returned unchanged, which
/// makes the projection exactly idempotent.
inline std::vector<double> project_to_simplex(std::span<const double> v) {
    if (v.empty()) throw ComputeError("project_to_simplex: empty vector");
    for (double x : v)
        if (!std::isfinite(x)) throw ComputeError("project_to_simplex: non-finite component");

    const double total = std::accumulate(v.begin(), v.end(), 0.0);
    const bool feasible = std::all_of(v.begin(), v.end(), [](double x) { return x >= 0.0 && x <= 1.0; });
    if (feasible && std::abs(total - 1.0) <= 1e-12) return {v.begin(), v.end()};

    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double prefix = 0.0, theta = 0.0;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        prefix += sorted[j];
        const double t = (prefix - 1.0) / static_cast<double>(j + 1);
        if (sorted[j] - t > 0.0) theta = t;
    }
    std::vector<double> w(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = std::max(v[i] - theta, 0.0);
    return w;
}

/// Reads `key value` or `key = value` lines; `#` starts a comment. Unknown keys are errors.
inline DeConfig read_de_config(std::istream& in, DeConfig config = {}, const std::string& source = "de config") {
    std::string line;
    std::size_t line_no = 0;
    auto bad = [&](const std::string& why) { return InputError(csv::row_context(source, line_no) + ": " + why); };
    auto parse_list = [&](std::string_view s) {
        std::vector<double> out;
        for (auto f : csv::split(s)) {
            auto v = csv::parse_double(f);
            if (!v) throw bad("malformed number '" + std::string(f) + "'");
            out.push_back(*v);
        }
        return out;
    };
    while (csv::read_line(in, line)) {
        ++line_no;
        std::string_view s = line;
        if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
        s = csv::trim(s);
        if (s.empty()) continue;
        auto sep = s.find_first_of(" \t=");
        if (sep == std::string_view::npos) throw bad("expected 'key value'");
        const auto key = csv::trim(s.substr(0, sep));
        auto value = csv::trim(s.substr(sep + 1));
        if (!value.empty() && value.front() == '=') value = csv::trim(value.substr(1));

        auto number = [&] {
            auto v = csv::parse_double(value);
            if (!v) throw bad("malformed number '" + std::string(value) + "'");
            return *v;
        };
        auto count = [&] {
            auto v = csv::parse_int<std::uint64_t>(value);
            if (!v) throw bad("malformed integer '" + std::string(value) + "'");
            return *v;
        };
        if (key == "population_size") config.population_size = count();
        else if (key == "mutation_factor") config.mutation_factor = number();
        else if (key == "crossover_rate") config.crossover_rate = number();
        else if (key == "max_generations") config.max_generations = count();
        else if (key == "convergence_tolerance") config.convergence_tolerance = number();
        else if (key == "seed") config.seed = count();
        else if (key == "threads") config.threads = count();
        else if (key == "lower_bounds") config.lower_bounds = parse_list(value);
        else if (key == "upper_bounds") config.upper_bounds = parse_list(value);
        else throw bad("unknown key '" + std::string(key) + "'");
    }
    return config;
}

inline void write_de_result(std::ostream& out, const DeResult& r) {
    out << "best_fitness " << csv::format_double(r.best_fitness) << '\n';
    out << "generations_run " << r.generations_run << '\n';
    out << "nonfinite_evaluations " << r.nonfinite_evaluations << '\n';
    out << "history";
    for (double h : r.history) out << ' ' << csv::format_double(h);
    out << '\n';
}

} // namespace fusion
