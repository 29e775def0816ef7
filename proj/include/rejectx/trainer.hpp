#pragma once

#include "rejectx/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace rejectx {

/// Affine classifier d(x) = w . x + b with an explicit (unregularized) intercept.
struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;

    [[nodiscard]] std::size_t size() const noexcept { return weights.size(); }

    friend bool operator==(const LinearModel &, const LinearModel &) = default;
};

/// w . x accumulated in ascending index order, then + b.
[[nodiscard]] double decision_value(const LinearModel &model, std::span<const double> x);

/// +1 if d(x) > 0, otherwise -1 (d(x) = 0 maps to -1).
[[nodiscard]] Label predict(const LinearModel &model, std::span<const double> x);

struct TrainerConfig {
    double C = 1.0;
    double tolerance = 1e-6;
    std::size_t max_passes = 10000;
    /// Reserved for randomized solvers; the SMO solver is deterministic and ignores it.
    std::uint64_t seed = 0;
};

struct TrainReport {
    double primal_objective = 0.0;  ///< 1/2 ||w||^2 + C sum xi, xi = max(0, 1 - y d(x))
    double dual_objective = 0.0;
    double max_dual_violation = 0.0;  ///< maximal KKT violating-pair gap at exit
    double max_slack = 0.0;           ///< max_i xi_i
    std::size_t margin_violations = 0;
    std::size_t support_vectors = 0;
    std::size_t iterations = 0;
    std::size_t passes = 0;  ///< ceil(iterations / training-set size)
    bool converged = false;
};

/**
 * Soft-margin linear SVC: minimizes 1/2 ||w||^2 + C sum xi_i subject to
 * y_i (w . x_i + b) >= 1 - xi_i, xi_i >= 0.
 *
 * Solved in the dual with SMO and second-order working-set selection; the
 * intercept comes from the free support vectors. Stops once the maximal
 * violating pair gap drops to `tolerance` or after `max_passes` sweeps.
 */
[[nodiscard]] std::pair<LinearModel, TrainReport> train_soft_margin(const LabeledDataset &train,
                                                                    const TrainerConfig &config = {});

[[nodiscard]] double primal_objective(const LinearModel &model, const LabeledDataset &data, double C);

/// Fraction of `data` whose label equals predict().
[[nodiscard]] double accuracy(const LinearModel &model, const LabeledDataset &data);

}  // namespace rejectx
