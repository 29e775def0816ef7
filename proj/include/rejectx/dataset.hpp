#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rejectx {

/// Class labels. Training data only ever carries `negative`/`positive`;
/// `rejected` is produced by the reject-option predictor.
enum class Label : int { negative = -1, rejected = 0, positive = 1 };

/// +1.0 / -1.0 (0.0 for `rejected`).
[[nodiscard]] constexpr double sign(Label label) noexcept { return static_cast<double>(static_cast<int>(label)); }

[[nodiscard]] std::string_view to_string(Label label) noexcept;

/// One feature and its closed domain [lower, upper].
struct Feature {
    std::string name;
    double lower = 0.0;
    double upper = 1.0;

    friend bool operator==(const Feature &, const Feature &) = default;
};

/**
 * Ordered, named features with box domains. The order is the canonical
 * index order used by models, assignments and explanations.
 *
 * Invariants (checked on construction): names unique, lower < upper, finite bounds.
 */
class FeatureSpace {
  public:
    FeatureSpace() = default;
    explicit FeatureSpace(std::vector<Feature> features);

    /// Every feature on [0, 1].
    [[nodiscard]] static FeatureSpace unit_box(std::vector<std::string> names);
    /// Features named f1..fn on [0, 1].
    [[nodiscard]] static FeatureSpace unit_box(std::size_t count);

    [[nodiscard]] std::size_t size() const noexcept { return features_.size(); }
    [[nodiscard]] const Feature &operator[](std::size_t i) const { return features_[i]; }
    [[nodiscard]] const std::vector<Feature> &features() const noexcept { return features_; }
    [[nodiscard]] std::vector<std::string> names() const;
    /// Throws validation_error if no such feature.
    [[nodiscard]] std::size_t index_of(std::string_view name) const;
    [[nodiscard]] bool contains(std::span<const double> x) const noexcept;

    friend bool operator==(const FeatureSpace &, const FeatureSpace &) = default;

  private:
    std::vector<Feature> features_;
};

/// A point in feature space, aligned with FeatureSpace index order.
using Instance = std::vector<double>;

struct LabeledDataset {
    std::vector<Instance> instances;
    std::vector<Label> labels;

    [[nodiscard]] std::size_t size() const noexcept { return instances.size(); }
    [[nodiscard]] bool empty() const noexcept { return instances.empty(); }
    [[nodiscard]] std::size_t count(Label label) const noexcept;
};

/// Numeric CSV contents before scaling.
struct RawTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct RawLabeledTable {
    RawTable table;
    std::vector<Label> labels;
};

/**
 * Reads a comma-separated file with a header row. The label column is
 * binarized one-versus-all: cells equal to `positive_label` map to +1, all
 * others to -1. Every other cell must parse as a finite real.
 */
[[nodiscard]] RawLabeledTable load_csv(const std::filesystem::path &path, std::string_view label_column,
                                       std::string_view positive_label);

/// Reads the named columns (in the given order) of a header-first CSV; other columns are ignored.
[[nodiscard]] RawTable load_feature_columns(const std::filesystem::path &path, std::span<const std::string> columns);

/// Header of a CSV file.
[[nodiscard]] std::vector<std::string> read_csv_header(const std::filesystem::path &path);

struct ColumnScale {
    double min = 0.0;
    double max = 1.0;

    friend bool operator==(const ColumnScale &, const ColumnScale &) = default;
};

/// Min-max scaling to [0, 1], one entry per column.
class ScalingParams {
  public:
    ScalingParams() = default;
    explicit ScalingParams(std::vector<ColumnScale> columns);

    /// min 0 / max 1 for every column.
    [[nodiscard]] static ScalingParams identity(std::size_t count);

    [[nodiscard]] std::size_t size() const noexcept { return columns_.size(); }
    [[nodiscard]] const ColumnScale &operator[](std::size_t i) const { return columns_[i]; }
    [[nodiscard]] const std::vector<ColumnScale> &columns() const noexcept { return columns_; }

    [[nodiscard]] double apply(std::size_t column, double raw) const;
    [[nodiscard]] double invert(std::size_t column, double scaled) const;
    [[nodiscard]] Instance invert(std::span<const double> scaled) const;

    friend bool operator==(const ScalingParams &, const ScalingParams &) = default;

  private:
    std::vector<ColumnScale> columns_;
};

/// Per-column min/max over the whole table; a constant column is a degenerate-domain error.
[[nodiscard]] ScalingParams fit_scaling(const RawTable &table);

struct DomainFlag {
    std::size_t row;
    std::size_t column;
    double value;  ///< scaled value outside [0, 1]
};

struct ScaledTable {
    FeatureSpace space;  ///< column names, every domain [0, 1]
    std::vector<Instance> instances;
    std::vector<DomainFlag> out_of_domain;  ///< values are never clamped

    [[nodiscard]] bool row_in_domain(std::size_t row) const noexcept;
};

[[nodiscard]] ScaledTable apply_scaling(const RawTable &table, const ScalingParams &params);

struct Split {
    LabeledDataset train;
    LabeledDataset test;
    std::vector<std::size_t> train_indices;  ///< ascending, into the input dataset
    std::vector<std::size_t> test_indices;
};

/**
 * Stratified split: each class contributes round(train_fraction * count)
 * members to train (clamped so both sides keep a member). Deterministic in
 * `seed`. Needs at least two instances per class.
 */
[[nodiscard]] Split stratified_split(const LabeledDataset &data, double train_fraction, std::uint64_t seed);

/// Rows of `data` at `indices`, in the given order.
[[nodiscard]] LabeledDataset subset(const LabeledDataset &data, std::span<const std::size_t> indices);

}  // namespace rejectx
