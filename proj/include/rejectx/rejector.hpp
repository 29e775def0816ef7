#pragma once

#include "rejectx/dataset.hpp"
#include "rejectx/trainer.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace rejectx {

/// Linear SVC with reject band: +1 if d > t_plus, -1 if d < t_minus, 0 otherwise.
struct RejectModel {
    LinearModel model;
    double t_minus = 0.0;
    double t_plus = 0.0;
    double w_r = 0.24;

    /// Checks t_minus <= 0 <= t_plus, finiteness and w_r in (0, 1].
    void validate() const;

    friend bool operator==(const RejectModel &, const RejectModel &) = default;
};

struct ThresholdPair {
    double t_plus;
    double t_minus;
};

inline constexpr std::size_t default_grid_steps = 100;

/**
 * Candidate bands (i / steps * max d, i / steps * min d), i = 1..steps. With the
 * default 100 steps this is exactly (i * 0.01 * upper, i * 0.01 * lower).
 * Needs max d > 0 > min d.
 */
[[nodiscard]] std::vector<ThresholdPair> threshold_grid(std::span<const double> decision_values,
                                                        std::size_t steps = default_grid_steps);

struct RiskReport {
    double error_ratio = 0.0;      ///< E: misclassified / accepted (0 when nothing is accepted)
    double rejection_ratio = 0.0;  ///< R: rejected / total
    double risk = 0.0;             ///< E + w_r R
    std::size_t grid_index = 0;    ///< 1-based; 0 when not produced by calibrate()
    std::size_t rejected = 0;
    std::size_t misclassified = 0;
    std::size_t total = 0;
};

/// Empirical risk of a band; points with t_minus <= d <= t_plus are rejected.
[[nodiscard]] RiskReport empirical_risk(std::span<const Label> labels, std::span<const double> decision_values,
                                        double t_plus, double t_minus, double w_r);

struct Calibration {
    RejectModel reject_model;
    RiskReport report;
};

/**
 * Evaluates every grid band on the training decision values and keeps the one
 * with minimal risk; ties go to the smallest index (narrowest band). Grid
 * points are evaluated in parallel; the result equals calibrate_serial().
 */
[[nodiscard]] Calibration calibrate(const LinearModel &model, const LabeledDataset &train, double w_r,
                                    std::size_t steps = default_grid_steps);
[[nodiscard]] Calibration calibrate_serial(const LinearModel &model, const LabeledDataset &train, double w_r,
                                           std::size_t steps = default_grid_steps);

[[nodiscard]] Label predict_with_reject(const RejectModel &rm, std::span<const double> x);
[[nodiscard]] Label classify_decision(double d, double t_minus, double t_plus) noexcept;

struct EvalMetrics {
    double accuracy_without_ro = 0.0;
    std::optional<double> accuracy_with_ro;  ///< absent when every point is rejected
    double rejection_ratio = 0.0;
    std::size_t negative = 0;
    std::size_t rejected = 0;
    std::size_t positive = 0;
    std::size_t total = 0;
    double t_minus = 0.0;
    double t_plus = 0.0;
};

[[nodiscard]] EvalMetrics evaluate(const RejectModel &rm, const LabeledDataset &data);

}  // namespace rejectx
