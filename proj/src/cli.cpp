#include "rejectx/cli.hpp"

#include "rejectx/dataset.hpp"
#include "rejectx/error.hpp"
#include "rejectx/explainer.hpp"
#include "rejectx/rejector.hpp"
#include "rejectx/report.hpp"
#include "rejectx/serialization.hpp"
#include "rejectx/trainer.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <random>

namespace rejectx::cli {

namespace {

enum class Scope { train, test, all };

struct RunConfig {
    std::string input;
    std::string model;
    std::string output;
    std::string summary;
    std::string label;
    std::string positive;
    std::uint64_t seed = 1;
    double C = 1.0;
    double tolerance = 1e-6;
    std::size_t max_passes = 10000;
    double w_r = 0.24;
    double fraction = 0.7;
    FeatureOrder order = FeatureOrder::ascending;
    std::optional<Scope> scope;
    std::size_t grid_steps = default_grid_steps;
    std::size_t random_features = 0;
    std::size_t instances = 100;
};

class verification_failure : public error {
  public:
    using error::error;
};

void add_common_options(CLI::App &sub, RunConfig &cfg) {
    const std::map<std::string, FeatureOrder> orders{{"ascending", FeatureOrder::ascending},
                                                     {"descending-weight", FeatureOrder::descending_weight},
                                                     {"lex", FeatureOrder::lexicographic}};
    const std::map<std::string, Scope> scopes{{"train", Scope::train}, {"test", Scope::test}, {"all", Scope::all}};
    sub.add_option("--input", cfg.input, "CSV file with a header row");
    sub.add_option("--model", cfg.model, "model or reject-model JSON");
    sub.add_option("--output", cfg.output, "output path");
    sub.add_option("--summary", cfg.summary, "optional JSON summary path");
    sub.add_option("--label", cfg.label, "label column (default: last column)");
    sub.add_option("--positive", cfg.positive, "label value mapped to +1; all others map to -1");
    sub.add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    sub.add_option("--C", cfg.C, "soft-margin trade-off")->capture_default_str()->check(CLI::PositiveNumber);
    sub.add_option("--tolerance", cfg.tolerance, "solver stopping tolerance")->capture_default_str();
    sub.add_option("--max-passes", cfg.max_passes, "solver pass limit")->capture_default_str();
    sub.add_option("--wr", cfg.w_r, "rejection cost in (0, 1]")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    sub.add_option("--fraction", cfg.fraction, "training fraction of the stratified split")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    sub.add_option("--order", cfg.order, "feature visiting order")
        ->transform(CLI::CheckedTransformer(orders, CLI::ignore_case));
    sub.add_option("--scope", cfg.scope, "rows to use: train, test or all")
        ->transform(CLI::CheckedTransformer(scopes, CLI::ignore_case));
    sub.add_option("--grid-steps", cfg.grid_steps, "threshold grid resolution")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
}

void require(const std::string &value, const char *option) {
    if (value.empty()) {
        throw validation_error{std::string{option} + " is required"};
    }
}

void require_file(const std::string &path, const char *option) {
    require(path, option);
    if (!std::filesystem::is_regular_file(path)) {
        throw io_error{std::string{option} + ": no such file '" + path + "'"};
    }
}

std::ofstream open_output(const std::string &path) {
    std::ofstream out{path};
    if (!out) {
        throw io_error{"cannot write '" + path + "'"};
    }
    return out;
}

std::string label_column(const RunConfig &cfg, const ModelFile *file) {
    if (!cfg.label.empty()) {
        return cfg.label;
    }
    if (file != nullptr && file->training) {
        return file->training->label_column;
    }
    const std::vector<std::string> header = read_csv_header(cfg.input);
    if (header.empty()) {
        throw validation_error{"empty CSV header"};
    }
    return header.back();
}

std::string positive_label(const RunConfig &cfg, const ModelFile *file) {
    if (!cfg.positive.empty()) {
        return cfg.positive;
    }
    if (file != nullptr && file->training) {
        return file->training->positive_label;
    }
    throw validation_error{"--positive is required"};
}

/// Labeled rows of the CSV, columns matched to the model's features by name and scaled with its parameters.
LabeledDataset load_for_model(const RunConfig &cfg, const ModelFile &file) {
    const RawLabeledTable raw = load_csv(cfg.input, label_column(cfg, &file), positive_label(cfg, &file));
    std::vector<std::size_t> at;
    for (const Feature &f : file.space.features()) {
        const auto it = std::find(raw.table.columns.begin(), raw.table.columns.end(), f.name);
        if (it == raw.table.columns.end()) {
            throw validation_error{"input lacks model feature '" + f.name + "'"};
        }
        at.push_back(static_cast<std::size_t>(it - raw.table.columns.begin()));
    }
    RawTable ordered;
    ordered.columns = file.space.names();
    for (const auto &row : raw.table.rows) {
        std::vector<double> r;
        for (const std::size_t c : at) {
            r.push_back(row[c]);
        }
        ordered.rows.push_back(std::move(r));
    }
    ScaledTable scaled = apply_scaling(ordered, file.scaling);
    return LabeledDataset{std::move(scaled.instances), raw.labels};
}

std::vector<std::size_t> scope_indices(Scope scope, const ModelFile &file, std::size_t rows) {
    if (scope == Scope::all) {
        std::vector<std::size_t> all(rows);
        for (std::size_t i = 0; i < rows; ++i) {
            all[i] = i;
        }
        return all;
    }
    if (!file.training) {
        throw validation_error{"--scope train/test needs a model produced by 'train'"};
    }
    if (file.training->rows != rows) {
        throw validation_error{"input has " + std::to_string(rows) + " rows, the model was trained on a file with " +
                               std::to_string(file.training->rows)};
    }
    return scope == Scope::train ? file.training->train_indices : file.training->test_indices;
}

std::string scope_name(Scope scope) {
    switch (scope) {
        case Scope::train: return "train";
        case Scope::test: return "test";
        case Scope::all: return "all";
    }
    return "?";
}

int cmd_train(const RunConfig &cfg, std::ostream &out) {
    require_file(cfg.input, "--input");
    require(cfg.output, "--output");
    const std::string label = label_column(cfg, nullptr);
    const std::string positive = positive_label(cfg, nullptr);
    const RawLabeledTable raw = load_csv(cfg.input, label, positive);
    const ScalingParams scaling = fit_scaling(raw.table);
    ScaledTable scaled = apply_scaling(raw.table, scaling);
    const LabeledDataset data{std::move(scaled.instances), raw.labels};
    const Split split = stratified_split(data, cfg.fraction, cfg.seed);

    const TrainerConfig config{cfg.C, cfg.tolerance, cfg.max_passes, cfg.seed};
    auto [model, report] = train_soft_margin(split.train, config);

    ModelFile file;
    file.model = model;
    file.space = scaled.space;
    file.scaling = scaling;
    file.training = TrainingManifest{std::filesystem::path{cfg.input}.filename().string(),
                                     label,
                                     positive,
                                     cfg.fraction,
                                     cfg.seed,
                                     config,
                                     data.size(),
                                     split.train_indices,
                                     split.test_indices,
                                     report};
    write_json_file(cfg.output, to_json(file));

    out << "trained on " << split.train.size() << " rows (" << split.train.count(Label::positive) << " positive, "
        << split.train.count(Label::negative) << " negative); " << split.test.size() << " held out\n";
    out << "primal objective " << report.primal_objective << ", dual objective " << report.dual_objective
        << ", max violation " << report.max_dual_violation << ", passes " << report.passes
        << (report.converged ? "" : " (not converged)") << '\n';
    out << "train accuracy " << 100.0 * accuracy(model, split.train) << "%, test accuracy "
        << 100.0 * accuracy(model, split.test) << "%\n";
    out << "model written to " << cfg.output << '\n';
    return exit_ok;
}

int cmd_calibrate(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
    require_file(cfg.model, "--model");
    require_file(cfg.input, "--input");
    require(cfg.output, "--output");
    ModelFile file = read_model_file(cfg.model);
    const LabeledDataset data = load_for_model(cfg, file);

    std::vector<std::size_t> train_rows;
    if (file.training) {
        train_rows = scope_indices(Scope::train, file, data.size());
    } else {
        err << "warning: model has no training manifest; calibrating on every input row\n";
        train_rows = scope_indices(Scope::all, file, data.size());
    }
    const LabeledDataset train = subset(data, train_rows);
    const Calibration cal = calibrate(file.model, train, cfg.w_r, cfg.grid_steps);
    file.band = RejectBand{cal.reject_model.t_minus, cal.reject_model.t_plus, cfg.w_r, cfg.grid_steps, cal.report};
    write_json_file(cfg.output, to_json(file));

    out << "selected grid index " << cal.report.grid_index << ": t- = " << cal.reject_model.t_minus
        << ", t+ = " << cal.reject_model.t_plus << ", E = " << cal.report.error_ratio
        << ", R = " << cal.report.rejection_ratio << ", risk = " << cal.report.risk << '\n';

    const Scope scope = cfg.scope.value_or(file.training ? Scope::test : Scope::all);
    const LabeledDataset scoped = subset(data, scope_indices(scope, file, data.size()));
    const EvalMetrics metrics = evaluate(cal.reject_model, scoped);
    out << format_metrics_table(scope_name(scope), metrics);
    const EvalMetrics whole = evaluate(cal.reject_model, data);
    if (scope != Scope::all) {
        out << format_metrics_table("all", whole);
    }
    if (!cfg.summary.empty()) {
        write_json_file(cfg.summary, {{"scope", scope_name(scope)},
                                      {"metrics", to_json(metrics)},
                                      {"all", to_json(whole)},
                                      {"risk_report", to_json(cal.report)}});
    }
    out << "reject model written to " << cfg.output << '\n';
    return exit_ok;
}

struct InstanceSet {
    std::vector<Instance> instances;
    std::vector<std::size_t> rows;  ///< source row of each instance
};

InstanceSet load_instances(const RunConfig &cfg, const ModelFile &file, std::ostream &err) {
    const RawTable raw = load_feature_columns(cfg.input, file.space.names());
    const ScaledTable scaled = apply_scaling(raw, file.scaling);
    const Scope scope = cfg.scope.value_or(Scope::all);
    InstanceSet set;
    for (const std::size_t r : scope_indices(scope, file, scaled.instances.size())) {
        if (!file.space.contains(scaled.instances[r])) {
            err << "warning: row " << r + 1 << " lies outside the feature domains; skipped\n";
            continue;
        }
        set.instances.push_back(scaled.instances[r]);
        set.rows.push_back(r);
    }
    return set;
}

json summary_json(const std::map<Label, ClassSummary> &summary) {
    json arr = json::array();
    for (const auto &[label, s] : summary) {
        arr.push_back({{"class", static_cast<int>(label)},
                       {"patterns", s.patterns},
                       {"time_mean", s.seconds.mean},
                       {"time_std", s.seconds.stddev},
                       {"size_mean", s.size.mean},
                       {"size_std", s.size.stddev},
                       {"queries", s.queries}});
    }
    return arr;
}

void verify_all(const RejectModel &rm, const FeatureSpace &space, const std::vector<Explanation> &explanations,
                const std::vector<std::size_t> &rows) {
    for (std::size_t k = 0; k < explanations.size(); ++k) {
        const VerificationReport v = verify_explanation(rm, space, explanations[k]);
        if (!v) {
            throw verification_failure{"explanation of row " + std::to_string(rows[k] + 1) +
                                       " failed verification: " + v.message};
        }
    }
}

int cmd_explain(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
    require_file(cfg.model, "--model");
    require_file(cfg.input, "--input");
    require(cfg.output, "--output");
    const ModelFile file = read_model_file(cfg.model);
    const RejectModel rm = file.reject_model();
    rm.validate();
    const InstanceSet set = load_instances(cfg, file, err);

    const std::vector<Explanation> explanations = explain_all(rm, file.space, set.instances, cfg.order);
    verify_all(rm, file.space, explanations, set.rows);

    std::ofstream jsonl = open_output(cfg.output);
    for (std::size_t k = 0; k < explanations.size(); ++k) {
        jsonl << explanation_to_json(explanations[k], set.rows[k], file.space, file.scaling).dump() << '\n';
    }
    if (!jsonl) {
        throw io_error{"failed writing '" + cfg.output + "'"};
    }

    const auto summary = summarize(explanations);
    const FrequencyTable freq = feature_frequency(explanations);
    std::size_t queries = 0;
    for (const Explanation &e : explanations) {
        queries += e.queries;
    }
    out << explanations.size() << " explanations written to " << cfg.output << " (" << queries
        << " feasibility queries)\n";
    if (!explanations.empty()) {
        out << format_summary_table(summary);
        out << format_frequency_table(freq, file.space);
    }
    if (!cfg.summary.empty()) {
        write_json_file(cfg.summary, {{"patterns", explanations.size()},
                                      {"queries", queries},
                                      {"classes", summary_json(summary)},
                                      {"frequency", to_json(freq, file.space)}});
    }
    return exit_ok;
}

// Random model and instances on [0, 1]^n; the band is centred so all three classes occur.
std::pair<ModelFile, std::vector<Instance>> synthetic_problem(std::size_t features, std::size_t count,
                                                              std::uint64_t seed) {
    std::mt19937_64 rng{seed};
    std::uniform_real_distribution<double> unit{0.0, 1.0};
    ModelFile file;
    file.space = FeatureSpace::unit_box(features);
    file.scaling = ScalingParams::identity(features);
    double scale = 0.0;
    double centre = 0.0;
    for (std::size_t i = 0; i < features; ++i) {
        const double w = 2.0 * unit(rng) - 1.0;
        file.model.weights.push_back(w);
        scale += std::abs(w);
        centre += 0.5 * w;
    }
    file.model.bias = -centre;
    file.band = RejectBand{-0.05 * scale, 0.05 * scale, 0.24, default_grid_steps, std::nullopt};
    std::vector<Instance> instances(count, Instance(features));
    for (Instance &x : instances) {
        for (double &v : x) {
            v = unit(rng);
        }
    }
    return {std::move(file), std::move(instances)};
}

int cmd_bench(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
    ModelFile file;
    InstanceSet set;
    if (cfg.random_features > 0) {
        auto [synthetic, instances] = synthetic_problem(cfg.random_features, cfg.instances, cfg.seed);
        file = std::move(synthetic);
        set.instances = std::move(instances);
        for (std::size_t i = 0; i < set.instances.size(); ++i) {
            set.rows.push_back(i);
        }
    } else {
        require_file(cfg.model, "--model");
        require_file(cfg.input, "--input");
        file = read_model_file(cfg.model);
        set = load_instances(cfg, file, err);
    }
    const RejectModel rm = file.reject_model();
    rm.validate();

    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    const std::vector<Explanation> serial = explain_all_serial(rm, file.space, set.instances, cfg.order);
    const auto t1 = clock::now();
    const std::vector<Explanation> parallel = explain_all(rm, file.space, set.instances, cfg.order);
    const auto t2 = clock::now();
    verify_all(rm, file.space, parallel, set.rows);
    for (std::size_t k = 0; k < serial.size(); ++k) {
        if (serial[k].kept != parallel[k].kept || serial[k].label != parallel[k].label) {
            throw verification_failure{"serial and parallel explanations differ at row " + std::to_string(k + 1)};
        }
    }

    const auto summary = summarize(serial);
    std::size_t queries = 0;
    for (const Explanation &e : serial) {
        queries += e.queries;
    }
    const double serial_s = std::chrono::duration<double>(t1 - t0).count();
    const double parallel_s = std::chrono::duration<double>(t2 - t1).count();
    out << set.instances.size() << " instances, " << file.space.size() << " features, " << queries
        << " feasibility queries\n";
    if (!serial.empty()) {
        out << format_summary_table(summary);
    }
    out << "batch wall-clock: serial " << serial_s << " s, parallel " << parallel_s << " s\n";
    if (!cfg.output.empty()) {
        write_json_file(cfg.output, {{"instances", set.instances.size()},
                                     {"features", file.space.size()},
                                     {"queries", queries},
                                     {"classes", summary_json(summary)},
                                     {"serial_seconds", serial_s},
                                     {"parallel_seconds", parallel_s}});
    }
    return exit_ok;
}

}  // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Linear SVC training, reject-option calibration and minimal explanations", "rejectx"};
    app.require_subcommand(1);
    RunConfig cfg;
    CLI::App *train = app.add_subcommand("train", "train a soft-margin linear SVC on a CSV file");
    CLI::App *calibrate_cmd = app.add_subcommand("calibrate", "fit the reject band by empirical risk minimization");
    CLI::App *explain = app.add_subcommand("explain", "compute and verify minimal explanations");
    CLI::App *bench = app.add_subcommand("bench", "time explanations");
    for (CLI::App *sub : {train, calibrate_cmd, explain, bench}) {
        add_common_options(*sub, cfg);
    }
    bench->add_option("--random-features", cfg.random_features, "benchmark a random model with this many features");
    bench->add_option("--instances", cfg.instances, "random instances for --random-features")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (train->parsed()) {
            return cmd_train(cfg, out);
        }
        if (calibrate_cmd->parsed()) {
            return cmd_calibrate(cfg, out, err);
        }
        if (explain->parsed()) {
            return cmd_explain(cfg, out, err);
        }
        return cmd_bench(cfg, out, err);
    } catch (const verification_failure &e) {
        err << "error: " << e.what() << '\n';
        return exit_verification_failure;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
}

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    std::vector<const char *> argv{"rejectx"};
    for (const std::string &a : args) {
        argv.push_back(a.c_str());
    }
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace rejectx::cli
