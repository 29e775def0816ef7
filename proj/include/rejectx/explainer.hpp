#pragma once

#include "rejectx/dataset.hpp"
#include "rejectx/feasibility.hpp"
#include "rejectx/rejector.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rejectx {

/// Conjunction of atoms that holds exactly on the region predicted as `label`.
struct PredictionFormula {
    Label label = Label::positive;
    std::vector<LinearAtom> atoms;
};

/// Disjunction of atoms; the complement of a PredictionFormula.
struct NegatedFormula {
    Label label = Label::positive;
    std::vector<LinearAtom> atoms;
};

/**
 * rejected: (d <= t_plus) and (d >= t_minus)
 * positive: d > t_plus
 * negative: d < t_minus
 */
[[nodiscard]] PredictionFormula prediction_formula(const RejectModel &rm, Label label);

/// De Morgan with relation flips.
[[nodiscard]] NegatedFormula negate(const PredictionFormula &formula);
[[nodiscard]] PredictionFormula negate(const NegatedFormula &formula);

struct EntailmentResult {
    bool entailed = false;
    std::optional<Instance> witness;  ///< a completion satisfying the negation, when not entailed
    std::size_t queries = 0;
    bool knife_edge = false;
};

/// Fixed values + domains entail the formula iff every disjunct of its negation is unsatisfiable.
[[nodiscard]] EntailmentResult check_entailment(const PartialAssignment &pa, const FeatureSpace &space,
                                                const PredictionFormula &formula);
[[nodiscard]] bool entails(const PartialAssignment &pa, const FeatureSpace &space, const PredictionFormula &formula);

enum class FeatureOrder { ascending, descending_weight, lexicographic };

[[nodiscard]] std::vector<std::size_t> feature_order(const LinearModel &model, const FeatureSpace &space,
                                                     FeatureOrder order);

/// Proof that a kept feature is necessary: releasing it admits `point`, which is classified as `label`.
struct Witness {
    std::size_t feature;
    Instance point;
    Label label;
};

struct Explanation {
    Instance instance;
    Label label = Label::positive;
    std::vector<std::size_t> kept;     ///< ascending
    std::vector<std::size_t> removed;  ///< ascending
    std::vector<Witness> witnesses;    ///< one per kept feature, in visiting order
    std::size_t queries = 0;           ///< feasibility queries issued
    double seconds = 0.0;
    bool knife_edge = false;
};

/**
 * Deletion-based subset-minimal explanation. Starts from the full instance
 * and visits features in `order`, releasing each one whose removal keeps the
 * prediction entailed over the domains.
 */
[[nodiscard]] Explanation minimal_explanation(const RejectModel &rm, const FeatureSpace &space,
                                              std::span<const double> x, std::span<const std::size_t> order);
[[nodiscard]] Explanation minimal_explanation(const RejectModel &rm, const FeatureSpace &space,
                                              std::span<const double> x,
                                              FeatureOrder order = FeatureOrder::ascending);

/// Explains every instance. Parallel over instances; output order is input order.
[[nodiscard]] std::vector<Explanation> explain_all(const RejectModel &rm, const FeatureSpace &space,
                                                   std::span<const Instance> instances,
                                                   FeatureOrder order = FeatureOrder::ascending);
[[nodiscard]] std::vector<Explanation> explain_all_serial(const RejectModel &rm, const FeatureSpace &space,
                                                          std::span<const Instance> instances,
                                                          FeatureOrder order = FeatureOrder::ascending);

struct VerificationReport {
    bool sufficient = false;
    bool minimal = false;
    bool witnesses_flip = false;
    std::string message;

    [[nodiscard]] bool ok() const noexcept { return sufficient && minimal && witnesses_flip; }
    explicit operator bool() const noexcept { return ok(); }
};

/// Re-checks sufficiency, minimality and every stored witness independently of how the explanation was built.
[[nodiscard]] VerificationReport verify_explanation(const RejectModel &rm, const FeatureSpace &space,
                                                    const Explanation &explanation);

struct ClassFrequency {
    std::vector<std::size_t> counts;  ///< per feature, how many explanations keep it
    std::size_t patterns = 0;
};

struct FrequencyTable {
    std::size_t feature_count = 0;
    std::map<Label, ClassFrequency> classes;

    [[nodiscard]] bool empty() const noexcept { return classes.empty(); }
};

[[nodiscard]] FrequencyTable feature_frequency(std::span<const Explanation> explanations);

}  // namespace rejectx
