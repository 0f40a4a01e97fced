// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cli_harness.hpp"
#include "fusion/de_optimizer.hpp"
#include "fusion/ensemble.hpp"
#include "fusion/lr_tools.hpp"
#include "fusion/metrics.hpp"
#include "fusion/rng.hpp"
#include "fusion/splitter.hpp"
#include "fusion/synthgen.hpp"
#include "oracles.hpp"

using namespace fusion;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), f, args...);
    return buf;
}

// 1. Rank AUROC equals brute-force pair enumeration within 1e-12 on 200 tied instances, < 5 s.
Outcome auroc_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(1);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const std::size_t n = 2 + rng.below(49);
        std::vector<double> s(n);
        std::vector<std::uint8_t> y(n);
        for (std::size_t j = 0; j < n; ++j) {
            s[j] = rng.uniform() < 0.5 ? static_cast<double>(rng.below(5)) / 4.0 : rng.uniform();
            y[j] = rng.uniform() < 0.5;
        }
        y[0] = 1;
        y[1] = 0;
        worst = std::max(worst, std::abs(auroc(s, y) - oracle::brute_force_auroc(s, y)));
    }
    const double t = seconds_since(t0);
    return {worst <= 1e-12 && t < 5.0, fmt("max |diff| = %.3g, %.3f s", worst, t)};
}

// 2. Trapezoid area under roc_curve equals auroc within 1e-12 on 100 instances.
Outcome roc_consistency() {
    Rng rng(2);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const std::size_t n = 2 + rng.below(199);
        std::vector<double> s(n);
        std::vector<std::uint8_t> y(n);
        for (std::size_t j = 0; j < n; ++j) {
            s[j] = rng.uniform() < 0.3 ? static_cast<double>(rng.below(7)) / 6.0 : rng.uniform();
            y[j] = rng.uniform() < 0.3;
        }
        y[0] = 1;
        y[1] = 0;
        worst = std::max(worst, std::abs(trapezoid_area(roc_curve(s, y)) - auroc(s, y)));
    }
    return {worst <= 1e-12, fmt("max |diff| = %.3g", worst)};
}

// 3. mu=2, sigma=1, n=20000: empirical AUROC within 0.01 of Phi(sqrt 2), < 10 s.
Outcome synthetic_closed_form() {
    const auto t0 = std::chrono::steady_clock::now();
    SynthConfig c;
    c.n_samples = 20000;
    c.n_labels = 1;
    c.n_models = 1;
    c.signal_strength = 2.0;
    c.model_noise = {1.0};
    c.prevalence = {0.5};
    c.seed = 20231115;
    const auto b = generate(c);
    const double empirical = auroc(b.matrices[0].probabilities.column(0), b.truth.labels.column(0));
    const double expected = expected_auroc(2.0, 1.0);
    const double t = seconds_since(t0);
    return {std::abs(empirical - expected) <= 0.01 && t < 10.0,
            fmt("empirical %.5f vs closed form %.5f, %.3f s", empirical, expected, t)};
}

// 4. Planted simplex optimum (0.6, 0.3, 0.1) recovered within 1e-3 L-inf in <= 300 generations, deterministic, < 5 s.
Outcome de_correctness() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> target{0.6, 0.3, 0.1};
    auto f = [&](std::span<const double> w) {
        double d = 0.0;
        for (std::size_t i = 0; i < 3; ++i) d += (w[i] - target[i]) * (w[i] - target[i]);
        return -d;
    };
    auto project = [](std::span<double> x) {
        const auto w = project_to_simplex(x);
        std::copy(w.begin(), w.end(), x.begin());
    };
    DeConfig config;
    config.seed = 4;
    const auto a = optimize(f, 3, config, project);
    const auto b = optimize(f, 3, config, project);
    double err = 0.0;
    for (std::size_t i = 0; i < 3; ++i) err = std::max(err, std::abs(a.best_vector[i] - target[i]));
    const double t = seconds_since(t0);
    const bool same = a == b;
    return {err <= 1e-3 && a.generations_run <= 300 && same && t < 5.0,
            fmt("L-inf error %.3g after %zu generations, deterministic=%s, %.3f s", err, a.generations_run,
                same ? "yes" : "no", t)};
}

// 5. Six heterogeneous models, n=10000, L=14: DE-weighted test macro AUROC >= unweighted - 1e-4
//    and >= best single model - 1e-4, weights fit on a disjoint validation split, < 2 min.
Outcome ensemble_ordering() {
    const auto t0 = std::chrono::steady_clock::now();
    SynthConfig c;
    c.n_samples = 10000;
    c.n_labels = 14;
    c.n_models = 6;
    c.model_noise = {0.8, 1.0, 1.2, 1.5, 2.0, 3.0};
    c.signal_strength = 1.0;
    c.prevalence = {0.3, 0.1, 0.25, 0.15, 0.2, 0.1, 0.05, 0.3, 0.08, 0.12, 0.1, 0.2, 0.15, 0.05};
    c.max_images_per_patient = 3;
    c.seed = 55;
    const auto bundle = generate(c);
    const auto split = grouped_split(bundle.truth.sample_ids, bundle.truth.patient_ids, {{0.7, 0.1, 0.2}, 55});
    const auto validation = bundle.select_rows(split.rows_in(Split::validation));
    const auto test = bundle.select_rows(split.rows_in(Split::test));

    DeConfig config;
    config.seed = 55;
    const auto [weights, result] = optimize_weights(validation, config);
    auto test_macro = [&](const PredictionMatrix& p) { return macro_auroc(p, test.truth, test.label_space).macro_mean; };
    const double weighted = test_macro(weighted_average(test, weights));
    const double unweighted = test_macro(unweighted_average(test));
    double best_single = 0.0;
    for (const auto& m : test.matrices) best_single = std::max(best_single, test_macro(m));
    const auto meta = train_meta(stack_features(validation), validation.truth, validation.label_space);
    const double stacked = test_macro(predict_meta(meta, stack_features(test)));

    std::string w;
    for (double x : weights.weights) w += fmt("%.3f ", x);
    const double t = seconds_since(t0);
    return {weighted >= unweighted - 1e-4 && weighted >= best_single - 1e-4 && t < 120.0,
            fmt("test macro AUROC: weighted %.5f, unweighted %.5f, best single %.5f, stacked %.5f "
                "(validation n=%zu, test n=%zu, weights %s, %zu generations, %.1f s)",
                weighted, unweighted, best_single, stacked, validation.samples(), test.samples(), w.c_str(),
                result.generations_run, t)};
}

// 6. Built-in meta-learner reaches held-out macro AUROC >= 0.99 on linearly separable data.
Outcome stacking_sanity() {
    const std::size_t N = 2000, K = 6, L = 14;
    Rng rng(6);
    const auto labels = LabelSpace::chest_xray14();
    ModelBundle bundle{labels, GroundTruth{{}, {}, Matrix<std::uint8_t>(N, L)}, {}, 0};
    for (std::size_t n = 0; n < N; ++n) {
        bundle.truth.sample_ids.push_back("s" + std::to_string(n));
        bundle.truth.patient_ids.push_back("p" + std::to_string(n));
        for (std::size_t l = 0; l < L; ++l) bundle.truth.labels(n, l) = rng.uniform() < 0.25;
    }
    for (std::size_t k = 0; k < K; ++k) {
        PredictionMatrix pm{"m" + std::to_string(k), bundle.truth.sample_ids, Matrix<double>(N, L)};
        for (std::size_t n = 0; n < N; ++n)
            for (std::size_t l = 0; l < L; ++l)
                pm.probabilities(n, l) = bundle.truth.labels(n, l) ? 0.55 + 0.45 * rng.uniform() : 0.45 * rng.uniform();
        bundle.matrices.push_back(std::move(pm));
    }
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t n = 0; n < N; ++n) (n % 2 ? test_rows : train_rows).push_back(n);
    const auto train = bundle.select_rows(train_rows);
    const auto test = bundle.select_rows(test_rows);
    const auto meta = train_meta(stack_features(train), train.truth, train.label_space);
    const double held_out =
        macro_auroc(predict_meta(meta, stack_features(test)), test.truth, test.label_space).macro_mean;
    return {held_out >= 0.99, fmt("held-out macro AUROC %.5f", held_out)};
}

// 7. 30000 images over 8000 patients (1-10 each): zero overlap, image fractions within 1.5 points.
Outcome split_integrity() {
    const std::size_t images = 30000, patients = 8000;
    Rng rng(7);
    std::vector<std::size_t> sizes(patients, 1);
    for (std::size_t extra = images - patients; extra > 0;) {
        const auto p = rng.below(patients);
        if (sizes[p] < 10) { ++sizes[p]; --extra; }
    }
    std::vector<std::string> samples, owners;
    for (std::size_t p = 0; p < patients; ++p)
        for (std::size_t k = 0; k < sizes[p]; ++k) {
            samples.push_back("s" + std::to_string(samples.size()));
            owners.push_back("p" + std::to_string(p));
        }
    const auto a = grouped_split(samples, owners, {{0.7, 0.1, 0.2}, 7});

    std::vector<int> patient_split(patients, -1);
    std::size_t overlaps = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto p = static_cast<std::size_t>(std::stoul(owners[i].substr(1)));
        const int s = static_cast<int>(a.splits[i]);
        if (patient_split[p] >= 0 && patient_split[p] != s) ++overlaps;
        patient_split[p] = s;
    }
    const double targets[] = {0.7, 0.1, 0.2};
    double worst = 0.0;
    for (int s = 0; s < 3; ++s)
        worst = std::max(worst, std::abs(static_cast<double>(a.images[s]) / images - targets[s]));
    return {overlaps == 0 && worst <= 0.015,
            fmt("overlapping patients %zu, images %zu/%zu/%zu, worst fraction error %.4f", overlaps, a.images[0],
                a.images[1], a.images[2], worst)};
}

// 8. Planted descent over [1e-4, 1e-2]: suggestion within a factor 10^0.1 of 1e-3;
//    clr_at exact at steps 0, step_size, 2*step_size for 50 random schedules.
Outcome lr_finder() {
    auto log_of = [](std::size_t steps) {
        LrLog log;
        for (auto [step, lr, loss] : oracle::planted_lr_curve(steps)) log.entries.push_back({step, lr, loss});
        return log;
    };
    LrRangeOptions raw;
    raw.smoothing_beta = 0.0;
    const double sweep_suggestion = suggest_max_lr(log_of(100), raw).suggested_max_lr;
    const double dense_suggestion = suggest_max_lr(log_of(10000)).suggested_max_lr;
    const double tol = 0.1;
    const bool lr_ok = std::abs(std::log10(sweep_suggestion) + 3.0) <= tol &&
                       std::abs(std::log10(dense_suggestion) + 3.0) <= tol;

    Rng rng(8);
    int exact = 0;
    for (int i = 0; i < 50; ++i) {
        const double lo = std::pow(10.0, -8.0 + 4.0 * rng.uniform());
        const ClrSchedule s{lo, lo * (1.0 + 1000.0 * rng.uniform()), 1 + rng.below(2000)};
        exact += clr_at(s, 0) == s.min_lr && clr_at(s, s.step_size) == s.max_lr && clr_at(s, 2 * s.step_size) == s.min_lr;
    }
    return {lr_ok && exact == 50,
            fmt("suggestion %.4g (100-step sweep, raw losses), %.4g (10000-step log, beta 0.98); "
                "exact CLR landmarks %d/50",
                sweep_suggestion, dense_suggestion, exact)};
}

// 9. synth -> split -> optimize-weights -> ensemble -> evaluate -> roc-export twice: byte-identical outputs.
Outcome end_to_end_determinism() {
    using fusion::testing::run_cli;
    const std::vector<std::string> steps{
        "synth --samples 3000 --n-models 6 --noise 0.8,1,1.2,1.5,2,3 --signal 1 --images-per-patient 4 --seed 99 --out data",
        "split --truth data/truth.csv --seed 99 --out split.csv",
        "optimize-weights --truth data/truth.csv --split-file split.csv --split validation "
        "data/m0.csv data/m1.csv data/m2.csv data/m3.csv data/m4.csv data/m5.csv --seed 99 --generations 60 --out weights.txt",
        "ensemble --mode weighted --weights weights.txt --truth data/truth.csv --split-file split.csv --split test "
        "data/m0.csv data/m1.csv data/m2.csv data/m3.csv data/m4.csv data/m5.csv --out weighted.csv",
        "ensemble --mode unweighted --truth data/truth.csv --split-file split.csv --split test "
        "data/m0.csv data/m1.csv data/m2.csv data/m3.csv data/m4.csv data/m5.csv --out unweighted.csv",
        "evaluate --truth data/truth.csv --split-file split.csv --split test weighted.csv unweighted.csv data/m0.csv "
        "--out report.txt",
        "roc-export --truth data/truth.csv --split-file split.csv --split test weighted.csv --out roc",
    };
    std::vector<fs::path> runs{fs::temp_directory_path() / "fusion_e2e_a", fs::temp_directory_path() / "fusion_e2e_b"};
    for (const auto& dir : runs) {
        fs::remove_all(dir);
        fs::create_directories(dir);
        for (const auto& s : steps)
            if (const int rc = run_cli(dir, s); rc != 0)
                return {false, "step failed (exit " + std::to_string(rc) + "): " + s + "\n" +
                                   fusion::testing::slurp(dir / "last.err")};
    }
    std::size_t compared = 0, differing = 0;
    for (const auto& entry : fs::recursive_directory_iterator(runs[0])) {
        if (!entry.is_regular_file()) continue;
        const auto rel = fs::relative(entry.path(), runs[0]);
        if (rel == "last.err") continue;
        ++compared;
        if (!fs::exists(runs[1] / rel) ||
            fusion::testing::slurp(entry.path()) != fusion::testing::slurp(runs[1] / rel))
            ++differing;
    }
    for (const auto& dir : runs) fs::remove_all(dir);
    return {differing == 0 && compared > 20, fmt("%zu files compared, %zu differ", compared, differing)};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 AUROC oracle equivalence", auroc_oracle},
        {"2 ROC consistency", roc_consistency},
        {"3 synthetic closed-form AUROC", synthetic_closed_form},
        {"4 DE recovers planted simplex optimum", de_correctness},
        {"5 weighted >= unweighted and best single", ensemble_ordering},
        {"6 stacking sanity", stacking_sanity},
        {"7 grouped split integrity", split_integrity},
        {"8 LR finder and CLR", lr_finder},
        {"9 end-to-end CLI determinism", end_to_end_determinism},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS  " : "FAIL  ") << name << "  -- " << o.detail << std::endl;
    }
    std::cout << (failures ? "acceptance: " + std::to_string(failures) + " criterion(s) failed" : "acceptance: all criteria passed")
              << std::endl;
    return failures ? 1 : 0;
}
