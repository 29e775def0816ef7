#pragma once

#include "rejectx/dataset.hpp"
#include "rejectx/explainer.hpp"
#include "rejectx/rejector.hpp"
#include "rejectx/trainer.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

// Floating-point fields are written with nlohmann's shortest round-trip
// formatting, so every binary64 value reads back bit-identical.

namespace rejectx {

using json = nlohmann::json;

/// How a model was produced from a CSV: enough to rebuild the exact split.
struct TrainingManifest {
    std::string input;
    std::string label_column;
    std::string positive_label;
    double train_fraction = 0.7;
    std::uint64_t seed = 0;
    TrainerConfig config;
    std::size_t rows = 0;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    TrainReport report;
};

struct RejectBand {
    double t_minus = 0.0;
    double t_plus = 0.0;
    double w_r = 0.24;
    std::size_t grid_steps = default_grid_steps;
    std::optional<RiskReport> risk_report;
};

/**
 * Model artifact. Plain models carry weights, bias, features and scaling;
 * reject models additionally carry the band. Missing "features" default to
 * f1..fn on [0, 1], missing "scaling" to the identity, so externally obtained
 * weights can be explained directly.
 */
struct ModelFile {
    LinearModel model;
    FeatureSpace space;
    ScalingParams scaling;
    std::optional<TrainingManifest> training;
    std::optional<RejectBand> band;

    /// The band when present, otherwise t_minus = t_plus = 0 (plain sign prediction).
    [[nodiscard]] RejectModel reject_model() const;
};

[[nodiscard]] json to_json(const ModelFile &file);
[[nodiscard]] ModelFile model_file_from_json(const json &j);

[[nodiscard]] json to_json(const TrainReport &report);
[[nodiscard]] json to_json(const RiskReport &report);
[[nodiscard]] RiskReport risk_report_from_json(const json &j);
[[nodiscard]] json to_json(const EvalMetrics &metrics);
[[nodiscard]] json to_json(const FrequencyTable &table, const FeatureSpace &space);

/// {"features": [...], "scaling": [...], "rows": [[...]], "labels": [...]}
[[nodiscard]] json dataset_to_json(const FeatureSpace &space, const ScalingParams &scaling,
                                   const LabeledDataset &data);
struct DatasetFile {
    FeatureSpace space;
    ScalingParams scaling;
    LabeledDataset data;
};
[[nodiscard]] DatasetFile dataset_from_json(const json &j);

/// One JSON Lines record: {"index", "class", "kept", "removed", "witnesses", "time_seconds", ...}.
[[nodiscard]] json explanation_to_json(const Explanation &explanation, std::size_t index, const FeatureSpace &space,
                                       const ScalingParams &scaling);

[[nodiscard]] json read_json_file(const std::filesystem::path &path);
/// Pretty-printed with a trailing newline.
void write_json_file(const std::filesystem::path &path, const json &j);

[[nodiscard]] ModelFile read_model_file(const std::filesystem::path &path);

}  // namespace rejectx
