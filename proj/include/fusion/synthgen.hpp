#pragma once

// Synthetic model bundles with known per-model AUROC.
//
// For label l, y ~ Bernoulli(prevalence_l). Model k scores sample n with
// logistic(mu * y + sigma_k * z), z ~ N(0,1). Positive and negative scores
// differ by a N(mu, 2 sigma_k^2) variable, so the expected AUROC is
// Phi(mu / (sigma_k * sqrt 2)); the logistic map is monotone and does not
// change it.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "fusion/dataset.hpp"
#include "fusion/error.hpp"
#include "fusion/rng.hpp"

namespace fusion {

struct SynthConfig {
    std::size_t n_samples = 1000;
    std::size_t n_labels = 14;
    std::size_t n_models = 6;
    std::vector<double> prevalence{0.2};      // one value, or one per label
    std::vector<double> model_noise{1.0};     // one value, or one per model
    double signal_strength = 1.0;
    std::uint64_t seed = 0;
    std::size_t max_images_per_patient = 1;   // patients own 1..max consecutive samples

    double prevalence_of(std::size_t l) const { return prevalence.size() == 1 ? prevalence[0] : prevalence[l]; }
    double noise_of(std::size_t k) const { return model_noise.size() == 1 ? model_noise[0] : model_noise[k]; }

    void validate() const {
        if (n_samples < 2) throw ComputeError("synth: n_samples must be at least 2");
        if (n_labels == 0 || n_models == 0) throw ComputeError("synth: need at least one label and one model");
        if (prevalence.size() != 1 && prevalence.size() != n_labels)
            throw ComputeError("synth: prevalence needs 1 or n_labels values");
        if (model_noise.size() != 1 && model_noise.size() != n_models)
            throw ComputeError("synth: model_noise needs 1 or n_models values");
        for (double p : prevalence)
            if (!(p > 0.0 && p < 1.0)) throw ComputeError("synth: prevalence must lie in (0,1)");
        for (double s : model_noise)
            if (!(s > 0.0) || !std::isfinite(s)) throw ComputeError("synth: model noise must be positive");
        if (!std::isfinite(signal_strength)) throw ComputeError("synth: signal strength must be finite");
        if (max_images_per_patient == 0) throw ComputeError("synth: max_images_per_patient must be positive");
    }
};

/// Phi(mu / (sigma * sqrt 2)).
inline double expected_auroc(double signal_strength, double noise) {
    return 0.5 * std::erfc(-signal_strength / (noise * std::sqrt(2.0)) / std::sqrt(2.0));
}

namespace detail {

inline std::string padded_id(char prefix, std::size_t i, std::size_t count) {
    const int width = static_cast<int>(std::to_string(count > 0 ? count - 1 : 0).size());
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%c%0*zu", prefix, width, i);
    return buf;
}

} // namespace detail

inline ModelBundle generate(const SynthConfig& config) {
    config.validate();
    const std::size_t N = config.n_samples, L = config.n_labels, K = config.n_models;
    Rng rng(config.seed);

    std::vector<std::string> names;
    if (L == LabelSpace::chest_xray14().size()) {
        names = LabelSpace::chest_xray14().names();
    } else {
        for (std::size_t l = 0; l < L; ++l) names.push_back(detail::padded_id('L', l, L));
    }

    ModelBundle bundle{LabelSpace(std::move(names)), GroundTruth{{}, {}, Matrix<std::uint8_t>(N, L)}, {}, 0};
    auto& truth = bundle.truth;
    std::size_t patient = 0, left_in_patient = 0;
    for (std::size_t n = 0; n < N; ++n) {
        if (left_in_patient == 0) {
            left_in_patient = 1 + static_cast<std::size_t>(rng.below(config.max_images_per_patient));
            ++patient;
        }
        --left_in_patient;
        truth.sample_ids.push_back(detail::padded_id('s', n, N));
        truth.patient_ids.push_back(detail::padded_id('p', patient - 1, N));
    }
    for (std::size_t l = 0; l < L; ++l)
        for (std::size_t n = 0; n < N; ++n) truth.labels(n, l) = rng.uniform() < config.prevalence_of(l) ? 1 : 0;

    for (std::size_t k = 0; k < K; ++k) {
        PredictionMatrix pm{detail::padded_id('m', k, K), truth.sample_ids, Matrix<double>(N, L)};
        const double sigma = config.noise_of(k);
        for (std::size_t n = 0; n < N; ++n)
            for (std::size_t l = 0; l < L; ++l) {
                const double z = config.signal_strength * truth.labels(n, l) + sigma * rng.normal();
                pm.probabilities(n, l) = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
            }
        bundle.matrices.push_back(std::move(pm));
    }
    return bundle;
}

} // namespace fusion
