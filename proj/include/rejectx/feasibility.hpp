#pragma once

#include "rejectx/dataset.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace rejectx {

enum class Relation { less, less_equal, greater, greater_equal };

[[nodiscard]] Relation negate(Relation relation) noexcept;
[[nodiscard]] bool holds(double lhs, Relation relation, double rhs) noexcept;
[[nodiscard]] const char *symbol(Relation relation) noexcept;

/// weights . x + bias  <relation>  threshold
struct LinearAtom {
    std::vector<double> weights;
    double bias = 0.0;
    Relation relation = Relation::less_equal;
    double threshold = 0.0;

    /// Same linear form, flipped relation.
    [[nodiscard]] LinearAtom negated() const;
    [[nodiscard]] double evaluate(std::span<const double> x) const;
    [[nodiscard]] bool satisfied_by(std::span<const double> x) const;
};

/// Some coordinates fixed to values; the rest range over their domains.
class PartialAssignment {
  public:
    PartialAssignment() = default;
    explicit PartialAssignment(std::size_t size);
    /// Every coordinate fixed to x.
    [[nodiscard]] static PartialAssignment of(std::span<const double> x);

    void fix(std::size_t index, double value);
    void release(std::size_t index);

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] bool is_fixed(std::size_t index) const { return fixed_[index] != 0; }
    [[nodiscard]] double value(std::size_t index) const { return values_[index]; }
    [[nodiscard]] std::size_t fixed_count() const noexcept;
    [[nodiscard]] std::size_t free_count() const noexcept { return size() - fixed_count(); }

    /// Throws validation_error on dimension mismatch or a fixed value outside its domain.
    void validate(const FeatureSpace &space) const;

  private:
    std::vector<double> values_;
    std::vector<char> fixed_;
};

struct Extrema {
    double min;
    double max;
};

/**
 * Exact minimum and maximum of weights . x + bias over the box, with fixed
 * coordinates pinned. Terms are accumulated in ascending index order, the
 * same order decision_value() uses, so extrema are bit-identical to the value
 * at the optimizing vertex.
 */
[[nodiscard]] Extrema linear_extrema(std::span<const double> weights, double bias, const PartialAssignment &pa,
                                     const FeatureSpace &space);

struct SatResult {
    bool satisfiable = false;
    std::optional<Instance> witness;  ///< present iff satisfiable
    bool knife_edge = false;          ///< |extremum - threshold| < 1e-12
};

inline constexpr double knife_edge_margin = 1e-12;

/// One linear inequality over the (partially fixed) box, decided exactly from its extrema.
[[nodiscard]] SatResult satisfiable(const LinearAtom &atom, const PartialAssignment &pa, const FeatureSpace &space);

}  // namespace rejectx
