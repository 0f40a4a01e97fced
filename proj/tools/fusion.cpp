// fusion: command-line front end for the ensemble toolkit.
//
// Exit status: 0 success, 2 malformed input, 3 computation error, other
// nonzero values for usage errors.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fusion/dataset.hpp"
#include "fusion/de_optimizer.hpp"
#include "fusion/ensemble.hpp"
#include "fusion/error.hpp"
#include "fusion/lr_tools.hpp"
#include "fusion/manifest.hpp"
#include "fusion/metrics.hpp"
#include "fusion/splitter.hpp"
#include "fusion/synthgen.hpp"
#include "fusion/version.hpp"

namespace fs = std::filesystem;
using namespace fusion;

namespace {

struct GlobalOptions {
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    std::string labels_file;
};

struct TruthOptions {
    std::string truth;
    std::string split_file;
    std::string split_name;

    void add(CLI::App* cmd, bool required) {
        auto* t = cmd->add_option("--truth", truth, "Ground-truth file (sample_id,patient_id,labels...)");
        if (required) t->required();
        t->check(CLI::ExistingFile);
        cmd->add_option("--split-file", split_file, "Restrict truth to rows of a split assignment file")
            ->check(CLI::ExistingFile);
        cmd->add_option("--split", split_name, "Split used with --split-file (train, validation, test)");
    }
};

std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + csv::format_double(v[i]);
    return out;
}

LabelSpace resolve_labels(const GlobalOptions& g, const std::string& truth_path,
                          const std::vector<std::string>& predictions) {
    std::optional<LabelSpace> from_data;
    if (!truth_path.empty()) {
        from_data = read_truth_labels(truth_path);
    } else if (!predictions.empty()) {
        auto in = csv::open_input(predictions.front());
        std::string line;
        if (!csv::read_line(in, line)) throw InputError(predictions.front() + ": missing header");
        auto fields = csv::split(csv::strip_bom(line));
        if (fields.size() < 2 || csv::trim(fields[0]) != "sample_id")
            throw InputError(predictions.front() + ": header must start with sample_id");
        std::vector<std::string> names;
        for (std::size_t i = 1; i < fields.size(); ++i) names.emplace_back(csv::trim(fields[i]));
        from_data = LabelSpace(std::move(names));
    }
    if (!g.labels_file.empty()) {
        auto labels = LabelSpace::read(g.labels_file);
        if (from_data && *from_data != labels)
            throw InputError(g.labels_file + ": labels do not match the data file header");
        return labels;
    }
    if (!from_data) return LabelSpace::chest_xray14();
    return *from_data;
}

GroundTruth load_truth_for(const TruthOptions& t, const LabelSpace& labels, RunManifest& manifest) {
    auto truth = load_truth(t.truth, labels);
    manifest.input(t.truth);
    if (t.split_file.empty()) {
        if (!t.split_name.empty()) throw InputError("--split requires --split-file");
        return truth;
    }
    if (t.split_name.empty()) throw InputError("--split-file requires --split");
    const Split wanted = parse_split(t.split_name);
    auto in = csv::open_input(t.split_file);
    const auto assignment = read_split(in, t.split_file);
    manifest.input(t.split_file);
    manifest.set("split", t.split_name);
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < truth.samples(); ++i) {
        auto it = assignment.find(truth.sample_ids[i]);
        if (it != assignment.end() && it->second == wanted) rows.push_back(i);
    }
    if (rows.empty()) throw InputError(t.split_file + ": no truth rows in split '" + t.split_name + "'");
    std::cerr << "note: using " << rows.size() << " of " << truth.samples() << " truth rows (split '"
              << t.split_name << "')\n";
    return truth.select_rows(rows);
}

ModelBundle load_bundle(const GlobalOptions& g, const TruthOptions& t, const std::vector<std::string>& predictions,
                        RunManifest& manifest) {
    const auto labels = resolve_labels(g, t.truth, predictions);
    std::vector<PredictionMatrix> matrices;
    for (const auto& p : predictions) {
        matrices.push_back(load_predictions(p, labels));
        manifest.input(p);
    }
    GroundTruth truth;
    if (!t.truth.empty()) {
        truth = load_truth_for(t, labels, manifest);
    } else {
        // No truth: align the models among themselves in the first file's order.
        truth.sample_ids = matrices.front().sample_ids;
        truth.patient_ids = truth.sample_ids;
        truth.labels = Matrix<std::uint8_t>(truth.sample_ids.size(), labels.size());
    }
    auto bundle = align(labels, truth, matrices);
    if (bundle.dropped_samples > 0)
        std::cerr << "note: " << bundle.dropped_samples << " sample(s) not covered by every input were dropped\n";
    return bundle;
}

void write_manifest_for(const RunManifest& m, const std::string& output) {
    m.write(output + ".manifest");
}

void print_table(std::ostream& out, const ModelBundle& bundle, const std::vector<AurocReport>& reports) {
    std::size_t width = 7;
    for (const auto& n : bundle.label_space.names()) width = std::max(width, n.size());
    out << std::left << std::setw(static_cast<int>(width)) << "Label";
    for (const auto& m : bundle.matrices) out << "  " << std::right << std::setw(12) << m.model_name;
    out << '\n';
    auto cell = [&](std::optional<double> v) {
        std::ostringstream os;
        if (v) os << std::fixed << std::setprecision(5) << *v;
        else os << "n/a";
        return os.str();
    };
    for (std::size_t l = 0; l < bundle.labels(); ++l) {
        out << std::left << std::setw(static_cast<int>(width)) << bundle.label_space[l];
        for (const auto& r : reports) out << "  " << std::right << std::setw(12) << cell(r.per_label[l]);
        out << '\n';
    }
    out << std::left << std::setw(static_cast<int>(width)) << "Average";
    for (const auto& r : reports) out << "  " << std::right << std::setw(12) << cell(r.macro_mean);
    out << '\n';
}

DeConfig resolve_de_config(CLI::App* cmd, const std::string& config_file, const DeConfig& flags,
                           const GlobalOptions& g) {
    DeConfig c;
    if (!config_file.empty()) {
        auto in = csv::open_input(config_file);
        c = read_de_config(in, c, config_file);
    }
    auto given = [&](const char* name) { return cmd->count(name) > 0; };
    if (given("--population")) c.population_size = flags.population_size;
    if (given("--mutation")) c.mutation_factor = flags.mutation_factor;
    if (given("--crossover")) c.crossover_rate = flags.crossover_rate;
    if (given("--generations")) c.max_generations = flags.max_generations;
    if (given("--tolerance")) c.convergence_tolerance = flags.convergence_tolerance;
    if (given("--seed") || config_file.empty()) c.seed = g.seed;
    if (given("--threads") || config_file.empty()) c.threads = g.threads;
    return c;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ensemble fusion toolkit: AUROC evaluation, weighted/stacked fusion, DE weight search, "
                 "grouped splitting and LR range-test analysis"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    GlobalOptions g;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", g.seed, "Random seed");
        cmd->add_option("--threads", g.threads, "Maximum worker threads")->check(CLI::PositiveNumber);
        cmd->add_option("--labels", g.labels_file, "Label names, one per line")->check(CLI::ExistingFile);
    };

    // evaluate -------------------------------------------------------------
    auto* evaluate = app.add_subcommand("evaluate", "Per-label and macro AUROC of one or more models");
    TruthOptions eval_truth;
    std::vector<std::string> eval_preds;
    std::string eval_out;
    add_common(evaluate);
    eval_truth.add(evaluate, true);
    evaluate->add_option("predictions", eval_preds, "Prediction files")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--out", eval_out, "Key-value report file");

    // roc-export -----------------------------------------------------------
    auto* roc = app.add_subcommand("roc-export", "Write per-label ROC points (fpr,tpr,threshold)");
    TruthOptions roc_truth;
    std::vector<std::string> roc_preds;
    std::string roc_out;
    add_common(roc);
    roc_truth.add(roc, true);
    roc->add_option("predictions", roc_preds, "Prediction files")->required()->check(CLI::ExistingFile);
    roc->add_option("--out", roc_out, "Output directory")->required();

    // ensemble -------------------------------------------------------------
    auto* ens = app.add_subcommand("ensemble", "Fuse prediction files");
    TruthOptions ens_truth;
    std::vector<std::string> ens_preds;
    std::string ens_mode, ens_weights, ens_meta, ens_out;
    add_common(ens);
    ens_truth.add(ens, false);
    ens->add_option("--mode", ens_mode, "unweighted | weighted | stack")
        ->required()
        ->check(CLI::IsMember({"unweighted", "weighted", "stack"}));
    ens->add_option("--weights", ens_weights, "Weights file (weighted mode)")->check(CLI::ExistingFile);
    ens->add_option("--meta", ens_meta, "Meta model file (stack mode)")->check(CLI::ExistingFile);
    ens->add_option("predictions", ens_preds, "Prediction files")->required()->check(CLI::ExistingFile);
    ens->add_option("--out", ens_out, "Fused prediction file")->required();

    // optimize-weights -----------------------------------------------------
    auto* opt = app.add_subcommand("optimize-weights", "Differential-evolution search for simplex weights");
    TruthOptions opt_truth;
    std::vector<std::string> opt_preds;
    std::string opt_out, opt_config;
    DeConfig de_flags;
    add_common(opt);
    opt_truth.add(opt, true);
    opt->add_option("predictions", opt_preds, "Prediction files")->required()->check(CLI::ExistingFile);
    opt->add_option("--out", opt_out, "Weights file")->required();
    opt->add_option("--config", opt_config, "DE key-value config file; flags override it")->check(CLI::ExistingFile);
    opt->add_option("--population", de_flags.population_size, "Population size (0: max(15*K, 20))");
    opt->add_option("--mutation", de_flags.mutation_factor, "Mutation factor F");
    opt->add_option("--crossover", de_flags.crossover_rate, "Crossover rate CR");
    opt->add_option("--generations", de_flags.max_generations, "Maximum generations");
    opt->add_option("--tolerance", de_flags.convergence_tolerance, "Stop when population fitness spread is below");

    // train-meta -----------------------------------------------------------
    auto* train = app.add_subcommand("train-meta", "Train the logistic stacking meta-learner");
    TruthOptions train_truth;
    std::vector<std::string> train_preds;
    std::string train_out;
    MetaConfig meta_config;
    add_common(train);
    train_truth.add(train, true);
    train->add_option("predictions", train_preds, "Prediction files")->required()->check(CLI::ExistingFile);
    train->add_option("--out", train_out, "Meta model file")->required();
    train->add_option("--step", meta_config.step_size, "Gradient step size");
    train->add_option("--iterations", meta_config.iterations, "Gradient iterations");

    // stack-features -------------------------------------------------------
    auto* feats = app.add_subcommand("stack-features", "Write model-major stacked features for external learners");
    TruthOptions feats_truth;
    std::vector<std::string> feats_preds;
    std::string feats_out;
    add_common(feats);
    feats_truth.add(feats, false);
    feats->add_option("predictions", feats_preds, "Prediction files")->required()->check(CLI::ExistingFile);
    feats->add_option("--out", feats_out, "Feature file")->required();

    // split ----------------------------------------------------------------
    auto* split = app.add_subcommand("split", "Patient-grouped train/validation/test split");
    std::string split_truth, split_out;
    std::vector<double> split_fractions{0.7, 0.1, 0.2};
    add_common(split);
    split->add_option("--truth", split_truth, "Truth file providing sample and patient ids")
        ->required()
        ->check(CLI::ExistingFile);
    split->add_option("--fractions", split_fractions, "train,validation,test fractions")
        ->delimiter(',')
        ->expected(3);
    split->add_option("--out", split_out, "Assignment file")->required();

    // lr-sweep -------------------------------------------------------------
    auto* sweep = app.add_subcommand("lr-sweep", "Log-spaced learning rates for a range test");
    double sweep_min = 1e-7, sweep_max = 1e-1;
    std::size_t sweep_n = 100;
    std::string sweep_out;
    sweep->add_option("--min", sweep_min, "Smallest learning rate");
    sweep->add_option("--max", sweep_max, "Largest learning rate");
    sweep->add_option("--iterations", sweep_n, "Number of rates");
    sweep->add_option("--out", sweep_out, "Output file (default stdout)");

    // lr-suggest -----------------------------------------------------------
    auto* suggest = app.add_subcommand("lr-suggest", "Suggest the CLR max bound from a step,lr,loss log");
    std::string suggest_log, suggest_out;
    LrRangeOptions lr_opt;
    suggest->add_option("--log", suggest_log, "Range-test log")->required()->check(CLI::ExistingFile);
    suggest->add_option("--beta", lr_opt.smoothing_beta, "EMA smoothing factor");
    suggest->add_option("--window", lr_opt.window, "Entries per slope window");
    suggest->add_option("--divergence", lr_opt.divergence_factor, "Stop once smoothed loss exceeds this times its minimum");
    suggest->add_option("--steep-fraction", lr_opt.steep_fraction, "Fraction of the steepest slope that still counts as steep");
    suggest->add_option("--out", suggest_out, "Key-value report file (default stdout)");

    // lr-schedule ----------------------------------------------------------
    auto* sched = app.add_subcommand("lr-schedule", "Triangular cyclical learning rates");
    ClrSchedule clr{1e-6, 1e-3, 100};
    std::uint64_t sched_steps = 400;
    std::string sched_out;
    sched->add_option("--min", clr.min_lr, "Lower bound");
    sched->add_option("--max", clr.max_lr, "Upper bound");
    sched->add_option("--step-size", clr.step_size, "Steps per half cycle");
    sched->add_option("--steps", sched_steps, "Number of steps to emit");
    sched->add_option("--out", sched_out, "Output file (default stdout)");

    // synth ----------------------------------------------------------------
    auto* synth = app.add_subcommand("synth", "Generate a synthetic bundle with known per-model AUROC");
    SynthConfig synth_config;
    std::string synth_out;
    synth->add_option("--seed", synth_config.seed, "Random seed");
    synth->add_option("--samples", synth_config.n_samples, "Number of samples");
    synth->add_option("--n-labels", synth_config.n_labels, "Number of labels (14 uses ChestX-ray14 names)");
    synth->add_option("--n-models", synth_config.n_models, "Number of models");
    synth->add_option("--noise", synth_config.model_noise, "Per-model noise sigma (one value or one per model)")
        ->delimiter(',');
    synth->add_option("--prevalence", synth_config.prevalence, "Per-label prevalence (one value or one per label)")
        ->delimiter(',');
    synth->add_option("--signal", synth_config.signal_strength, "Signal strength mu");
    synth->add_option("--images-per-patient", synth_config.max_images_per_patient, "Maximum images per patient");
    synth->add_option("--out", synth_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (evaluate->parsed()) {
            RunManifest manifest{"evaluate", g.seed};
            auto bundle = load_bundle(g, eval_truth, eval_preds, manifest);
            std::vector<AurocReport> reports;
            for (const auto& m : bundle.matrices) {
                reports.push_back(macro_auroc(m, bundle.truth, bundle.label_space));
                for (const auto& s : reports.back().skipped_labels)
                    std::cerr << "warning: " << m.model_name << ": label " << s << " is single-class; skipped\n";
            }
            print_table(std::cout, bundle, reports);
            if (!eval_out.empty()) {
                auto out = csv::open_output(eval_out);
                for (std::size_t k = 0; k < reports.size(); ++k) write_report(out, reports[k], bundle.matrices[k].model_name);
                manifest.outputs.push_back(eval_out);
                write_manifest_for(manifest, eval_out);
            }
        } else if (roc->parsed()) {
            RunManifest manifest{"roc-export", g.seed};
            auto bundle = load_bundle(g, roc_truth, roc_preds, manifest);
            fs::create_directories(roc_out);
            for (const auto& m : bundle.matrices)
                for (std::size_t l = 0; l < bundle.labels(); ++l) {
                    const auto s = m.probabilities.column(l);
                    const auto y = bundle.truth.labels.column(l);
                    try {
                        const auto curve = roc_curve(s, y);
                        const auto name = m.model_name + "." + bundle.label_space[l] + ".csv";
                        auto out = csv::open_output((fs::path(roc_out) / name).string());
                        write_roc_csv(out, curve);
                        manifest.outputs.push_back(name);
                    } catch (const UndefinedAuroc&) {
                        std::cerr << "warning: " << m.model_name << ": label " << bundle.label_space[l]
                                  << " is single-class; no curve written\n";
                    }
                }
            manifest.write((fs::path(roc_out) / "manifest.txt").string());
        } else if (ens->parsed()) {
            RunManifest manifest{"ensemble", g.seed};
            manifest.set("mode", ens_mode);
            auto bundle = load_bundle(g, ens_truth, ens_preds, manifest);
            PredictionMatrix fused;
            if (ens_mode == "unweighted") {
                fused = unweighted_average(bundle);
            } else if (ens_mode == "weighted") {
                if (ens_weights.empty()) throw InputError("ensemble: weighted mode requires --weights");
                auto in = csv::open_input(ens_weights);
                fused = weighted_average(bundle, read_weights(in, ens_weights));
                manifest.input(ens_weights);
            } else {
                if (ens_meta.empty()) throw InputError("ensemble: stack mode requires --meta");
                auto in = csv::open_input(ens_meta);
                const auto model = read_meta_model(in, ens_meta);
                if (model.label_names != bundle.label_space.names())
                    throw InputError(ens_meta + ": meta model labels do not match the data");
                fused = predict_meta(model, stack_features(bundle));
                manifest.input(ens_meta);
            }
            write_predictions(ens_out, fused, bundle.label_space);
            manifest.outputs.push_back(ens_out);
            write_manifest_for(manifest, ens_out);
            if (!ens_truth.truth.empty()) {
                const auto report = macro_auroc(fused, bundle.truth, bundle.label_space);
                std::cout << "macro_auroc " << std::fixed << std::setprecision(5) << report.macro_mean << '\n';
            }
        } else if (opt->parsed()) {
            RunManifest manifest{"optimize-weights", g.seed};
            auto bundle = load_bundle(g, opt_truth, opt_preds, manifest);
            if (bundle.models() < 2) throw ComputeError("optimize-weights: need at least 2 models");
            const auto config = resolve_de_config(opt, opt_config, de_flags, g);
            if (!opt_config.empty()) manifest.input(opt_config);
            manifest.seed = config.seed;
            manifest.set("population_size", std::to_string(config.resolved_population(bundle.models())));
            manifest.set("mutation_factor", csv::format_double(config.mutation_factor));
            manifest.set("crossover_rate", csv::format_double(config.crossover_rate));
            manifest.set("max_generations", std::to_string(config.max_generations));
            manifest.set("convergence_tolerance", csv::format_double(config.convergence_tolerance));
            auto [weights, result] = optimize_weights(bundle, config);
            {
                auto out = csv::open_output(opt_out);
                write_weights(out, weights, result.best_fitness);
            }
            {
                auto out = csv::open_output(opt_out + ".report");
                write_de_result(out, result);
            }
            manifest.outputs = {opt_out, opt_out + ".report"};
            write_manifest_for(manifest, opt_out);
            write_weights(std::cout, weights, result.best_fitness);
            std::cout << "generations_run " << result.generations_run << '\n';
        } else if (train->parsed()) {
            RunManifest manifest{"train-meta", g.seed};
            manifest.set("step", csv::format_double(meta_config.step_size));
            manifest.set("iterations", std::to_string(meta_config.iterations));
            auto bundle = load_bundle(g, train_truth, train_preds, manifest);
            const auto model = train_meta(stack_features(bundle), bundle.truth, bundle.label_space, meta_config);
            for (std::size_t l = 0; l < model.degenerate.size(); ++l)
                if (model.degenerate[l])
                    std::cerr << "warning: label " << model.label_names[l] << " is single-class; constant model\n";
            auto out = csv::open_output(train_out);
            write_meta_model(out, model);
            manifest.outputs.push_back(train_out);
            write_manifest_for(manifest, train_out);
        } else if (feats->parsed()) {
            RunManifest manifest{"stack-features", g.seed};
            auto bundle = load_bundle(g, feats_truth, feats_preds, manifest);
            auto out = csv::open_output(feats_out);
            write_features(out, stack_features(bundle), bundle);
            manifest.outputs.push_back(feats_out);
            write_manifest_for(manifest, feats_out);
        } else if (split->parsed()) {
            RunManifest manifest{"split", g.seed};
            const auto labels = resolve_labels(g, split_truth, {});
            const auto truth = load_truth(split_truth, labels);
            manifest.input(split_truth);
            SplitConfig config;
            std::copy(split_fractions.begin(), split_fractions.end(), config.fractions.begin());
            config.seed = g.seed;
            manifest.set("fractions", join(split_fractions));
            const auto assignment = grouped_split(truth.sample_ids, truth.patient_ids, config);
            for (const auto& w : assignment.warnings) std::cerr << "warning: " << w << '\n';
            auto out = csv::open_output(split_out);
            write_split(out, assignment);
            write_split_summary(std::cout, assignment, "");
            manifest.outputs.push_back(split_out);
            write_manifest_for(manifest, split_out);
        } else if (sweep->parsed()) {
            const auto lrs = generate_sweep(sweep_min, sweep_max, sweep_n);
            std::ostringstream os;
            for (double lr : lrs) os << csv::format_double(lr) << '\n';
            if (sweep_out.empty()) {
                std::cout << os.str();
            } else {
                auto out = csv::open_output(sweep_out);
                out << os.str();
                RunManifest manifest{"lr-sweep", 0};
                manifest.set("min", csv::format_double(sweep_min));
                manifest.set("max", csv::format_double(sweep_max));
                manifest.set("iterations", std::to_string(sweep_n));
                manifest.outputs.push_back(sweep_out);
                write_manifest_for(manifest, sweep_out);
            }
        } else if (suggest->parsed()) {
            auto in = csv::open_input(suggest_log);
            const auto result = suggest_max_lr(parse_lr_log(in, suggest_log), lr_opt);
            if (suggest_out.empty()) {
                write_lr_result(std::cout, result);
            } else {
                auto out = csv::open_output(suggest_out);
                write_lr_result(out, result);
                RunManifest manifest{"lr-suggest", 0};
                manifest.set("beta", csv::format_double(lr_opt.smoothing_beta));
                manifest.set("window", std::to_string(lr_opt.window));
                manifest.set("divergence", csv::format_double(lr_opt.divergence_factor));
                manifest.set("steep_fraction", csv::format_double(lr_opt.steep_fraction));
                manifest.input(suggest_log);
                manifest.outputs.push_back(suggest_out);
                write_manifest_for(manifest, suggest_out);
            }
        } else if (sched->parsed()) {
            std::ostringstream os;
            os << "step,lr\n";
            for (std::uint64_t s = 0; s < sched_steps; ++s) os << s << ',' << csv::format_double(clr_at(clr, s)) << '\n';
            if (sched_out.empty()) {
                std::cout << os.str();
            } else {
                auto out = csv::open_output(sched_out);
                out << os.str();
            }
        } else if (synth->parsed()) {
            if (synth_config.model_noise.size() > 1 && !synth->count("--n-models"))
                synth_config.n_models = synth_config.model_noise.size();
            const auto bundle = generate(synth_config);
            fs::create_directories(synth_out);
            RunManifest manifest{"synth", synth_config.seed};
            manifest.set("samples", std::to_string(synth_config.n_samples));
            manifest.set("n_labels", std::to_string(synth_config.n_labels));
            manifest.set("n_models", std::to_string(synth_config.n_models));
            manifest.set("noise", join(synth_config.model_noise));
            manifest.set("prevalence", join(synth_config.prevalence));
            manifest.set("signal", csv::format_double(synth_config.signal_strength));
            manifest.set("images_per_patient", std::to_string(synth_config.max_images_per_patient));
            write_truth((fs::path(synth_out) / "truth.csv").string(), bundle.truth, bundle.label_space);
            manifest.outputs.push_back("truth.csv");
            for (std::size_t k = 0; k < bundle.models(); ++k) {
                const auto& m = bundle.matrices[k];
                write_predictions((fs::path(synth_out) / (m.model_name + ".csv")).string(), m, bundle.label_space);
                manifest.outputs.push_back(m.model_name + ".csv");
                std::cout << m.model_name << " expected_auroc "
                          << csv::format_double(expected_auroc(synth_config.signal_strength, synth_config.noise_of(k)))
                          << '\n';
            }
            manifest.write((fs::path(synth_out) / "manifest.txt").string());
        }
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const ComputeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitComputeError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
