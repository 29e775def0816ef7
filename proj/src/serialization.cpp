#include "rejectx/serialization.hpp"

#include "rejectx/error.hpp"

#include <fstream>

namespace rejectx {

namespace {

json features_json(const FeatureSpace &space) {
    json arr = json::array();
    for (const Feature &f : space.features()) {
        arr.push_back({{"name", f.name}, {"lower", f.lower}, {"upper", f.upper}});
    }
    return arr;
}

FeatureSpace features_from(const json &arr) {
    std::vector<Feature> features;
    for (const json &f : arr) {
        features.push_back({f.at("name").get<std::string>(), f.at("lower").get<double>(), f.at("upper").get<double>()});
    }
    return FeatureSpace{std::move(features)};
}

json scaling_json(const ScalingParams &scaling) {
    json arr = json::array();
    for (const ColumnScale &c : scaling.columns()) {
        arr.push_back({{"min", c.min}, {"max", c.max}});
    }
    return arr;
}

ScalingParams scaling_from(const json &arr) {
    std::vector<ColumnScale> cols;
    for (const json &c : arr) {
        cols.push_back({c.at("min").get<double>(), c.at("max").get<double>()});
    }
    return ScalingParams{std::move(cols)};
}

json config_json(const TrainerConfig &c) {
    return {{"C", c.C}, {"tolerance", c.tolerance}, {"max_passes", c.max_passes}, {"seed", c.seed}};
}

TrainReport train_report_from(const json &j) {
    TrainReport r;
    r.primal_objective = j.at("primal_objective").get<double>();
    r.dual_objective = j.at("dual_objective").get<double>();
    r.max_dual_violation = j.at("max_dual_violation").get<double>();
    r.max_slack = j.at("max_slack").get<double>();
    r.margin_violations = j.at("margin_violations").get<std::size_t>();
    r.support_vectors = j.at("support_vectors").get<std::size_t>();
    r.iterations = j.at("iterations").get<std::size_t>();
    r.passes = j.at("passes").get<std::size_t>();
    r.converged = j.at("converged").get<bool>();
    return r;
}

json manifest_json(const TrainingManifest &m) {
    return {{"input", m.input},
            {"label_column", m.label_column},
            {"positive_label", m.positive_label},
            {"train_fraction", m.train_fraction},
            {"seed", m.seed},
            {"config", config_json(m.config)},
            {"rows", m.rows},
            {"train_indices", m.train_indices},
            {"test_indices", m.test_indices},
            {"report", to_json(m.report)}};
}

TrainingManifest manifest_from(const json &j) {
    TrainingManifest m;
    m.input = j.value("input", std::string{});
    m.label_column = j.at("label_column").get<std::string>();
    m.positive_label = j.at("positive_label").get<std::string>();
    m.train_fraction = j.at("train_fraction").get<double>();
    m.seed = j.at("seed").get<std::uint64_t>();
    const json &c = j.at("config");
    m.config.C = c.at("C").get<double>();
    m.config.tolerance = c.at("tolerance").get<double>();
    m.config.max_passes = c.at("max_passes").get<std::size_t>();
    m.config.seed = c.at("seed").get<std::uint64_t>();
    m.rows = j.at("rows").get<std::size_t>();
    m.train_indices = j.at("train_indices").get<std::vector<std::size_t>>();
    m.test_indices = j.at("test_indices").get<std::vector<std::size_t>>();
    if (j.contains("report")) {
        m.report = train_report_from(j.at("report"));
    }
    return m;
}

int label_code(Label label) { return static_cast<int>(label); }

Label label_from(int code) {
    if (code < -1 || code > 1) {
        throw validation_error{"class must be -1, 0 or +1"};
    }
    return static_cast<Label>(code);
}

}  // namespace

RejectModel ModelFile::reject_model() const {
    RejectModel rm;
    rm.model = model;
    if (band) {
        rm.t_minus = band->t_minus;
        rm.t_plus = band->t_plus;
        rm.w_r = band->w_r;
    }
    return rm;
}

json to_json(const TrainReport &r) {
    return {{"primal_objective", r.primal_objective},
            {"dual_objective", r.dual_objective},
            {"max_dual_violation", r.max_dual_violation},
            {"max_slack", r.max_slack},
            {"margin_violations", r.margin_violations},
            {"support_vectors", r.support_vectors},
            {"iterations", r.iterations},
            {"passes", r.passes},
            {"converged", r.converged}};
}

json to_json(const RiskReport &r) {
    return {{"E", r.error_ratio},   {"R", r.rejection_ratio},     {"risk", r.risk},  {"grid_index", r.grid_index},
            {"rejected", r.rejected}, {"misclassified", r.misclassified}, {"total", r.total}};
}

RiskReport risk_report_from_json(const json &j) {
    RiskReport r;
    r.error_ratio = j.at("E").get<double>();
    r.rejection_ratio = j.at("R").get<double>();
    r.risk = j.at("risk").get<double>();
    r.grid_index = j.value("grid_index", std::size_t{0});
    r.rejected = j.value("rejected", std::size_t{0});
    r.misclassified = j.value("misclassified", std::size_t{0});
    r.total = j.value("total", std::size_t{0});
    return r;
}

json to_json(const EvalMetrics &m) {
    json j = {{"t_minus", m.t_minus},
              {"t_plus", m.t_plus},
              {"accuracy_without_ro", m.accuracy_without_ro},
              {"accuracy_with_ro", nullptr},
              {"rejection_ratio", m.rejection_ratio},
              {"negative", m.negative},
              {"rejected", m.rejected},
              {"positive", m.positive},
              {"total", m.total}};
    if (m.accuracy_with_ro) {
        j["accuracy_with_ro"] = *m.accuracy_with_ro;
    }
    return j;
}

json to_json(const FrequencyTable &table, const FeatureSpace &space) {
    json classes = json::array();
    for (const auto &[label, row] : table.classes) {
        json counts = json::object();
        for (std::size_t i = 0; i < row.counts.size(); ++i) {
            counts[i < space.size() ? space[i].name : "f" + std::to_string(i + 1)] = row.counts[i];
        }
        classes.push_back({{"class", label_code(label)}, {"counts", counts}, {"patterns", row.patterns}});
    }
    return {{"features", space.names()}, {"classes", classes}};
}

json to_json(const ModelFile &file) {
    json j = {{"weights", file.model.weights},
              {"bias", file.model.bias},
              {"features", features_json(file.space)},
              {"scaling", scaling_json(file.scaling)}};
    if (file.training) {
        j["training"] = manifest_json(*file.training);
    }
    if (file.band) {
        j["t_minus"] = file.band->t_minus;
        j["t_plus"] = file.band->t_plus;
        j["w_r"] = file.band->w_r;
        j["grid_steps"] = file.band->grid_steps;
        if (file.band->risk_report) {
            j["risk_report"] = to_json(*file.band->risk_report);
        }
    }
    return j;
}

ModelFile model_file_from_json(const json &j) {
    try {
        ModelFile file;
        file.model.weights = j.at("weights").get<std::vector<double>>();
        file.model.bias = j.at("bias").get<double>();
        const std::size_t n = file.model.weights.size();
        file.space = j.contains("features") ? features_from(j.at("features")) : FeatureSpace::unit_box(n);
        file.scaling = j.contains("scaling") ? scaling_from(j.at("scaling")) : ScalingParams::identity(n);
        if (file.space.size() != n || file.scaling.size() != n) {
            throw validation_error{"model weights, features and scaling differ in length"};
        }
        if (j.contains("training")) {
            file.training = manifest_from(j.at("training"));
        }
        if (j.contains("t_minus") || j.contains("t_plus")) {
            RejectBand band;
            band.t_minus = j.at("t_minus").get<double>();
            band.t_plus = j.at("t_plus").get<double>();
            band.w_r = j.value("w_r", 0.24);
            band.grid_steps = j.value("grid_steps", default_grid_steps);
            if (j.contains("risk_report")) {
                band.risk_report = risk_report_from_json(j.at("risk_report"));
            }
            file.band = band;
            file.reject_model().validate();
        }
        return file;
    } catch (const json::exception &e) {
        throw validation_error{std::string{"malformed model JSON: "} + e.what()};
    }
}

json dataset_to_json(const FeatureSpace &space, const ScalingParams &scaling, const LabeledDataset &data) {
    json labels = json::array();
    for (const Label l : data.labels) {
        labels.push_back(label_code(l));
    }
    return {{"features", features_json(space)},
            {"scaling", scaling_json(scaling)},
            {"rows", data.instances},
            {"labels", labels}};
}

DatasetFile dataset_from_json(const json &j) {
    try {
        DatasetFile out;
        out.space = features_from(j.at("features"));
        out.scaling = scaling_from(j.at("scaling"));
        out.data.instances = j.at("rows").get<std::vector<Instance>>();
        for (const json &l : j.at("labels")) {
            out.data.labels.push_back(label_from(l.get<int>()));
        }
        if (out.data.instances.size() != out.data.labels.size()) {
            throw validation_error{"dataset rows and labels differ in length"};
        }
        return out;
    } catch (const json::exception &e) {
        throw validation_error{std::string{"malformed dataset JSON: "} + e.what()};
    }
}

json explanation_to_json(const Explanation &e, std::size_t index, const FeatureSpace &space,
                         const ScalingParams &scaling) {
    json kept = json::array();
    for (const std::size_t i : e.kept) {
        kept.push_back({{"feature", space[i].name},
                        {"index", i},
                        {"value", e.instance[i]},
                        {"raw_value", scaling.invert(i, e.instance[i])}});
    }
    json removed = json::array();
    for (const std::size_t i : e.removed) {
        removed.push_back(space[i].name);
    }
    json witnesses = json::array();
    for (const Witness &w : e.witnesses) {
        witnesses.push_back({{"feature", space[w.feature].name}, {"class", label_code(w.label)}, {"point", w.point}});
    }
    return {{"index", index},
            {"class", label_code(e.label)},
            {"kept", kept},
            {"removed", removed},
            {"witnesses", witnesses},
            {"queries", e.queries},
            {"knife_edge", e.knife_edge},
            {"time_seconds", e.seconds}};
}

json read_json_file(const std::filesystem::path &path) {
    std::ifstream in{path};
    if (!in) {
        throw io_error{"cannot open '" + path.string() + "'"};
    }
    try {
        return json::parse(in);
    } catch (const json::exception &e) {
        throw validation_error{path.string() + ": " + e.what()};
    }
}

void write_json_file(const std::filesystem::path &path, const json &j) {
    std::ofstream out{path};
    if (!out) {
        throw io_error{"cannot write '" + path.string() + "'"};
    }
    out << j.dump(2) << '\n';
    if (!out) {
        throw io_error{"failed writing '" + path.string() + "'"};
    }
}

ModelFile read_model_file(const std::filesystem::path &path) {
    return model_file_from_json(read_json_file(path));
}

}  // namespace rejectx
