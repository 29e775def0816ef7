#include "rejectx/feasibility.hpp"

#include "rejectx/error.hpp"

#include <algorithm>
#include <cmath>

namespace rejectx {

Relation negate(Relation relation) noexcept {
    switch (relation) {
        case Relation::less: return Relation::greater_equal;
        case Relation::less_equal: return Relation::greater;
        case Relation::greater: return Relation::less_equal;
        case Relation::greater_equal: return Relation::less;
    }
    return relation;
}

bool holds(double lhs, Relation relation, double rhs) noexcept {
    switch (relation) {
        case Relation::less: return lhs < rhs;
        case Relation::less_equal: return lhs <= rhs;
        case Relation::greater: return lhs > rhs;
        case Relation::greater_equal: return lhs >= rhs;
    }
    return false;
}

const char *symbol(Relation relation) noexcept {
    switch (relation) {
        case Relation::less: return "<";
        case Relation::less_equal: return "<=";
        case Relation::greater: return ">";
        case Relation::greater_equal: return ">=";
    }
    return "?";
}

LinearAtom LinearAtom::negated() const {
    LinearAtom out = *this;
    out.relation = negate(relation);
    return out;
}

double LinearAtom::evaluate(std::span<const double> x) const {
    if (x.size() != weights.size()) {
        throw validation_error{"atom over " + std::to_string(weights.size()) + " features evaluated at a point of size " +
                               std::to_string(x.size())};
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        acc += weights[i] * x[i];
    }
    return acc + bias;
}

bool LinearAtom::satisfied_by(std::span<const double> x) const {
    return holds(evaluate(x), relation, threshold);
}

PartialAssignment::PartialAssignment(std::size_t size) : values_(size, 0.0), fixed_(size, 0) {}

PartialAssignment PartialAssignment::of(std::span<const double> x) {
    PartialAssignment pa{x.size()};
    for (std::size_t i = 0; i < x.size(); ++i) {
        pa.fix(i, x[i]);
    }
    return pa;
}

void PartialAssignment::fix(std::size_t index, double value) {
    values_.at(index) = value;
    fixed_[index] = 1;
}

void PartialAssignment::release(std::size_t index) {
    fixed_.at(index) = 0;
    values_[index] = 0.0;
}

std::size_t PartialAssignment::fixed_count() const noexcept {
    return static_cast<std::size_t>(std::count(fixed_.begin(), fixed_.end(), char{1}));
}

void PartialAssignment::validate(const FeatureSpace &space) const {
    if (size() != space.size()) {
        throw validation_error{"assignment over " + std::to_string(size()) + " features, space has " +
                               std::to_string(space.size())};
    }
    for (std::size_t i = 0; i < size(); ++i) {
        if (is_fixed(i) && !(values_[i] >= space[i].lower && values_[i] <= space[i].upper)) {
            throw validation_error{"fixed value of feature '" + space[i].name + "' lies outside its domain"};
        }
    }
}

namespace {

void check(std::span<const double> weights, const PartialAssignment &pa, const FeatureSpace &space) {
    if (weights.size() != space.size()) {
        throw validation_error{"linear form over " + std::to_string(weights.size()) + " features, space has " +
                               std::to_string(space.size())};
    }
    pa.validate(space);
}

// Value each coordinate takes at the vertex minimizing (or maximizing) the form.
Instance extreme_point(std::span<const double> weights, const PartialAssignment &pa, const FeatureSpace &space,
                       bool maximize) {
    Instance x(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (pa.is_fixed(i)) {
            x[i] = pa.value(i);
        } else {
            const bool take_upper = maximize ? weights[i] > 0.0 : weights[i] < 0.0;
            x[i] = take_upper ? space[i].upper : space[i].lower;
        }
    }
    return x;
}

double form(std::span<const double> weights, double bias, std::span<const double> x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        acc += weights[i] * x[i];
    }
    return acc + bias;
}

}  // namespace

Extrema linear_extrema(std::span<const double> weights, double bias, const PartialAssignment &pa,
                       const FeatureSpace &space) {
    check(weights, pa, space);
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (pa.is_fixed(i)) {
            const double term = weights[i] * pa.value(i);
            lo += term;
            hi += term;
        } else {
            const double a = weights[i] * space[i].lower;
            const double b = weights[i] * space[i].upper;
            lo += std::min(a, b);
            hi += std::max(a, b);
        }
    }
    return {lo + bias, hi + bias};
}

SatResult satisfiable(const LinearAtom &atom, const PartialAssignment &pa, const FeatureSpace &space) {
    const Extrema ext = linear_extrema(atom.weights, atom.bias, pa, space);
    const bool upward = atom.relation == Relation::greater || atom.relation == Relation::greater_equal;
    const double extremum = upward ? ext.max : ext.min;

    SatResult result;
    result.satisfiable = holds(extremum, atom.relation, atom.threshold);
    result.knife_edge = std::abs(extremum - atom.threshold) < knife_edge_margin;
    if (result.satisfiable) {
        result.witness = extreme_point(atom.weights, pa, space, upward);
        // The witness sums the same products in the same order as the extremum.
        if (!holds(form(atom.weights, atom.bias, *result.witness), atom.relation, atom.threshold)) {
            throw error{"internal: feasibility witness does not satisfy its atom"};
        }
    }
    return result;
}

}  // namespace rejectx
