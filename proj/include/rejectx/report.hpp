#pragma once

#include "rejectx/dataset.hpp"
#include "rejectx/explainer.hpp"
#include "rejectx/rejector.hpp"

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>

namespace rejectx {

struct Statistic {
    double mean = 0.0;
    double stddev = 0.0;  ///< population standard deviation
};

[[nodiscard]] Statistic describe(std::span<const double> values);

struct ClassSummary {
    std::size_t patterns = 0;
    Statistic seconds;
    Statistic size;  ///< kept features per explanation
    std::size_t queries = 0;
};

[[nodiscard]] std::map<Label, ClassSummary> summarize(std::span<const Explanation> explanations);

/// Columns: dataset, t-, t+, accuracy w/o RO, accuracy w/ RO, rejection, negative, rejected, positive.
[[nodiscard]] std::string format_metrics_table(std::string_view dataset, const EvalMetrics &metrics);

/// Columns: class, one per feature, patterns.
[[nodiscard]] std::string format_frequency_table(const FrequencyTable &table, const FeatureSpace &space);

/// Columns: class, patterns, time mean +- std, size mean +- std, queries.
[[nodiscard]] std::string format_summary_table(const std::map<Label, ClassSummary> &summary);

}  // namespace rejectx
