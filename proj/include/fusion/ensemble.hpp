#pragma once

// Fusion of per-model probability matrices: unweighted and weighted
// averaging, simplex weight search by differential evolution, and stacking
// with a one-vs-rest logistic meta-learner.

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fusion/csv.hpp"
#include "fusion/dataset.hpp"
#include "fusion/de_optimizer.hpp"
#include "fusion/error.hpp"
#include "fusion/metrics.hpp"

namespace fusion {

struct WeightVector {
    std::vector<std::string> model_names;
    std::vector<double> weights;

    static WeightVector uniform(std::vector<std::string> names) {
        const std::size_t k = names.size();
        return {std::move(names), std::vector<double>(k, 1.0 / static_cast<double>(k))};
    }

    void validate() const {
        if (weights.empty() || weights.size() != model_names.size())
            throw InputError("weight vector: names and weights differ in length");
        double total = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0 && w <= 1.0)) throw InputError("weight vector: weight outside [0,1]");
            total += w;
        }
        if (std::abs(total - 1.0) > 1e-9) throw InputError("weight vector: weights do not sum to 1");
    }
};

namespace detail {

// Sums terms in ascending model-name order so that permuting models together
// with their weights gives bit-identical output. The result is clamped to the
// per-entry range of the inputs, which a convex combination cannot leave
// except through rounding.
class WeightedCombiner {
public:
    explicit WeightedCombiner(const ModelBundle& bundle) : bundle_(bundle), order_(bundle.models()) {
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
            return bundle.matrices[a].model_name < bundle.matrices[b].model_name;
        });
    }

    void combine(std::span<const double> weights, Matrix<double>& out) const {
        const std::size_t cells = bundle_.samples() * bundle_.labels();
        if (out.rows() != bundle_.samples() || out.cols() != bundle_.labels())
            out = Matrix<double>(bundle_.samples(), bundle_.labels());
        auto dst = out.values();
        for (std::size_t c = 0; c < cells; ++c) {
            double sum = 0.0;
            double lo = 1.0, hi = 0.0;
            for (auto k : order_) {
                const double p = bundle_.matrices[k].probabilities.values()[c];
                sum += weights[k] * p;
                lo = std::min(lo, p);
                hi = std::max(hi, p);
            }
            dst[c] = std::clamp(sum, lo, hi);
        }
    }

private:
    const ModelBundle& bundle_;
    std::vector<std::size_t> order_;
};

} // namespace detail

/// Entry (n,l) is sum_k w_k * p_k(n,l). Weight names must match the bundle's model order.
inline PredictionMatrix weighted_average(const ModelBundle& bundle, const WeightVector& w,
                                         std::string name = "weighted_average") {
    w.validate();
    if (w.model_names != bundle.model_names())
        throw InputError("weighted_average: weight names do not match bundle model order");
    PredictionMatrix out{std::move(name), bundle.truth.sample_ids, {}};
    detail::WeightedCombiner(bundle).combine(w.weights, out.probabilities);
    return out;
}

/// Weighted average with weight 1/K per model.
inline PredictionMatrix unweighted_average(const ModelBundle& bundle) {
    return weighted_average(bundle, WeightVector::uniform(bundle.model_names()), "unweighted_average");
}

/// DE search for simplex weights maximizing macro AUROC of the weighted average.
///
/// Every trial vector is clipped to [0,1] and projected onto the simplex
/// before it is scored, so the returned DeResult refers to feasible weights.
inline std::pair<WeightVector, DeResult> optimize_weights(const ModelBundle& bundle, DeConfig config) {
    bundle.validate();
    const std::size_t K = bundle.models();

    detail::WeightedCombiner combiner(bundle);
    auto fitness = [&](std::span<const double> w) {
        Matrix<double> fused;
        combiner.combine(w, fused);
        return macro_auroc(fused, bundle.truth.labels, bundle.label_space).macro_mean;
    };

    // Fails early with a ComputeError when every label is single-class.
    const double first_model = macro_auroc(bundle.matrices.front(), bundle.truth, bundle.label_space).macro_mean;

    if (K == 1) {
        DeResult r;
        r.best_vector = {1.0};
        r.best_fitness = first_model;
        r.history = {first_model};
        return {WeightVector{bundle.model_names(), {1.0}}, r};
    }

    if (config.lower_bounds.empty()) config.lower_bounds.assign(K, 0.0);
    if (config.upper_bounds.empty()) config.upper_bounds.assign(K, 1.0);
    auto project = [](std::span<double> x) {
        const auto w = project_to_simplex(x);
        std::copy(w.begin(), w.end(), x.begin());
    };
    DeResult result = optimize(fitness, K, config, project);
    return {WeightVector{bundle.model_names(), result.best_vector}, result};
}

/// `<model_name> <weight>` lines followed by `fitness <value>`.
inline void write_weights(std::ostream& out, const WeightVector& w, std::optional<double> fitness = std::nullopt) {
    for (std::size_t k = 0; k < w.weights.size(); ++k)
        out << w.model_names[k] << ' ' << csv::format_double(w.weights[k]) << '\n';
    if (fitness) out << "fitness " << csv::format_double(*fitness) << '\n';
}

inline WeightVector read_weights(std::istream& in, const std::string& source = "weights") {
    WeightVector w;
    std::string line;
    std::size_t line_no = 0;
    while (csv::read_line(in, line)) {
        ++line_no;
        auto s = csv::trim(line);
        if (s.empty() || s.front() == '#') continue;
        auto sep = s.find_first_of(" \t");
        if (sep == std::string_view::npos)
            throw InputError(csv::row_context(source, line_no) + ": expected 'model_name weight'");
        auto name = s.substr(0, sep);
        auto value = csv::parse_double(s.substr(sep + 1));
        if (!value) throw InputError(csv::row_context(source, line_no) + ": malformed weight");
        if (name == "fitness") continue;
        w.model_names.emplace_back(name);
        w.weights.push_back(*value);
    }
    w.validate();
    return w;
}

// ---------------------------------------------------------------------------
// Stacking

/// Model-major concatenation: column k*L + l holds model k's probability for label l.
struct StackedFeatures {
    std::vector<std::string> sample_ids;
    Matrix<double> features;
    std::size_t n_models = 0;
    std::size_t n_labels = 0;
};

inline StackedFeatures stack_features(const ModelBundle& bundle) {
    bundle.validate();
    const std::size_t K = bundle.models(), L = bundle.labels(), N = bundle.samples();
    StackedFeatures out{bundle.truth.sample_ids, Matrix<double>(N, K * L), K, L};
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t k = 0; k < K; ++k) {
            auto src = bundle.matrices[k].probabilities.row(n);
            std::copy(src.begin(), src.end(), out.features.row(n).begin() + static_cast<std::ptrdiff_t>(k * L));
        }
    return out;
}

/// Header `sample_id,<model>.<label>,...` in model-major order, for external meta-learners.
inline void write_features(std::ostream& out, const StackedFeatures& f, const ModelBundle& bundle) {
    out << "sample_id";
    for (const auto& m : bundle.matrices)
        for (const auto& l : bundle.label_space.names()) out << ',' << m.model_name << '.' << l;
    out << '\n';
    for (std::size_t n = 0; n < f.sample_ids.size(); ++n) {
        out << f.sample_ids[n];
        for (double v : f.features.row(n)) out << ',' << csv::format_double(v);
        out << '\n';
    }
}

struct MetaConfig {
    double step_size = 0.1;
    std::size_t iterations = 500;
};

/// One logistic regression per label over the stacked features.
struct MetaModel {
    std::string kind = "logistic_ovr";
    std::size_t n_features = 0;
    std::vector<std::string> label_names;
    std::vector<std::vector<double>> weights; // per label, length n_features
    std::vector<double> intercepts;
    std::vector<bool> degenerate; // single-class label at training time: constant output
};

namespace detail {

inline double logistic(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

} // namespace detail

/// Full-batch gradient descent on the mean logistic loss, zero-initialized, no regularization.
inline MetaModel train_meta(const StackedFeatures& features, const GroundTruth& truth,
                            const LabelSpace& labels, const MetaConfig& config = {}) {
    if (features.sample_ids != truth.sample_ids)
        throw InputError("train_meta: features are not row-aligned with truth");
    if (truth.labels.cols() != labels.size()) throw InputError("train_meta: truth label count mismatch");
    for (double v : features.features.values())
        if (!std::isfinite(v)) throw ComputeError("train_meta: non-finite feature value");
    if (!(config.step_size > 0.0)) throw ComputeError("train_meta: step size must be positive");

    const std::size_t N = features.features.rows(), F = features.features.cols(), L = labels.size();
    MetaModel model;
    model.n_features = F;
    model.label_names = labels.names();

    std::vector<double> z(N), grad(F);
    for (std::size_t l = 0; l < L; ++l) {
        std::vector<double> w(F, 0.0);
        double b = 0.0;
        const auto y = truth.labels.column(l);
        const std::size_t pos = detail::count_positives(y);
        if (pos == 0 || pos == N) {
            // Constant output at the (clamped) training prevalence.
            const double p = std::clamp(static_cast<double>(pos) / static_cast<double>(N), 1e-6, 1.0 - 1e-6);
            model.weights.push_back(std::move(w));
            model.intercepts.push_back(std::log(p / (1.0 - p)));
            model.degenerate.push_back(true);
            continue;
        }
        const double scale = config.step_size / static_cast<double>(N);
        for (std::size_t it = 0; it < config.iterations; ++it) {
            std::fill(grad.begin(), grad.end(), 0.0);
            double grad_b = 0.0;
            for (std::size_t n = 0; n < N; ++n) {
                const auto x = features.features.row(n);
                const double r = detail::logistic(b + std::inner_product(x.begin(), x.end(), w.begin(), 0.0)) - y[n];
                grad_b += r;
                for (std::size_t f = 0; f < F; ++f) grad[f] += r * x[f];
            }
            for (std::size_t f = 0; f < F; ++f) w[f] -= scale * grad[f];
            b -= scale * grad_b;
        }
        model.weights.push_back(std::move(w));
        model.intercepts.push_back(b);
        model.degenerate.push_back(false);
    }
    return model;
}

inline PredictionMatrix predict_meta(const MetaModel& model, const StackedFeatures& features,
                                     std::string name = "stacked") {
    if (features.features.cols() != model.n_features)
        throw InputError("predict_meta: feature dimension " + std::to_string(features.features.cols()) +
                         " does not match model dimension " + std::to_string(model.n_features));
    const std::size_t N = features.features.rows(), L = model.intercepts.size();
    PredictionMatrix out{std::move(name), features.sample_ids, Matrix<double>(N, L)};
    for (std::size_t n = 0; n < N; ++n) {
        const auto x = features.features.row(n);
        for (std::size_t l = 0; l < L; ++l) {
            const auto& w = model.weights[l];
            out.probabilities(n, l) =
                detail::logistic(model.intercepts[l] + std::inner_product(x.begin(), x.end(), w.begin(), 0.0));
        }
    }
    return out;
}

/// Text format:
///   kind logistic_ovr
///   n_features F
///   label <name> <degenerate 0|1> <intercept> <w_1> ... <w_F>
inline void write_meta_model(std::ostream& out, const MetaModel& m) {
    out << "kind " << m.kind << '\n' << "n_features " << m.n_features << '\n';
    for (std::size_t l = 0; l < m.intercepts.size(); ++l) {
        out << "label " << m.label_names[l] << ' ' << (m.degenerate[l] ? 1 : 0) << ' '
            << csv::format_double(m.intercepts[l]);
        for (double w : m.weights[l]) out << ' ' << csv::format_double(w);
        out << '\n';
    }
}

inline MetaModel read_meta_model(std::istream& in, const std::string& source = "meta model") {
    MetaModel m;
    std::string line;
    std::size_t line_no = 0;
    bool have_features = false;
    auto bad = [&](const std::string& why) { return InputError(csv::row_context(source, line_no) + ": " + why); };
    while (csv::read_line(in, line)) {
        ++line_no;
        auto s = csv::trim(line);
        if (s.empty()) continue;
        auto fields = csv::split(s, ' ');
        if (fields[0] == "kind" && fields.size() == 2) {
            if (fields[1] != "logistic_ovr") throw bad("unsupported meta model kind '" + std::string(fields[1]) + "'");
            m.kind = std::string(fields[1]);
        } else if (fields[0] == "n_features" && fields.size() == 2) {
            auto v = csv::parse_int<std::size_t>(fields[1]);
            if (!v) throw bad("malformed n_features");
            m.n_features = *v;
            have_features = true;
        } else if (fields[0] == "label") {
            if (!have_features) throw bad("label line before n_features");
            if (fields.size() != m.n_features + 4) throw bad("wrong number of parameters");
            m.label_names.emplace_back(fields[1]);
            if (fields[2] != "0" && fields[2] != "1") throw bad("degenerate flag must be 0 or 1");
            m.degenerate.push_back(fields[2] == "1");
            std::vector<double> params;
            for (std::size_t i = 3; i < fields.size(); ++i) {
                auto v = csv::parse_double(fields[i]);
                if (!v) throw bad("malformed parameter '" + std::string(fields[i]) + "'");
                params.push_back(*v);
            }
            m.intercepts.push_back(params.front());
            m.weights.emplace_back(params.begin() + 1, params.end());
        } else {
            throw bad("unrecognized line");
        }
    }
    if (m.intercepts.empty()) throw InputError(source + ": no label models");
    return m;
}

} // namespace fusion
