#include "rejectx/explainer.hpp"

#include "rejectx/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <numeric>

namespace rejectx {

namespace {

LinearAtom decision_atom(const LinearModel &model, Relation relation, double threshold) {
    return LinearAtom{model.weights, model.bias, relation, threshold};
}

}  // namespace

PredictionFormula prediction_formula(const RejectModel &rm, Label label) {
    PredictionFormula p;
    p.label = label;
    switch (label) {
        case Label::rejected:
            p.atoms.push_back(decision_atom(rm.model, Relation::less_equal, rm.t_plus));
            p.atoms.push_back(decision_atom(rm.model, Relation::greater_equal, rm.t_minus));
            break;
        case Label::positive: p.atoms.push_back(decision_atom(rm.model, Relation::greater, rm.t_plus)); break;
        case Label::negative: p.atoms.push_back(decision_atom(rm.model, Relation::less, rm.t_minus)); break;
    }
    return p;
}

NegatedFormula negate(const PredictionFormula &formula) {
    NegatedFormula n;
    n.label = formula.label;
    for (const LinearAtom &atom : formula.atoms) {
        n.atoms.push_back(atom.negated());
    }
    return n;
}

PredictionFormula negate(const NegatedFormula &formula) {
    PredictionFormula p;
    p.label = formula.label;
    for (const LinearAtom &atom : formula.atoms) {
        p.atoms.push_back(atom.negated());
    }
    return p;
}

EntailmentResult check_entailment(const PartialAssignment &pa, const FeatureSpace &space,
                                  const PredictionFormula &formula) {
    EntailmentResult result;
    result.entailed = true;
    for (const LinearAtom &disjunct : negate(formula).atoms) {
        SatResult sat = satisfiable(disjunct, pa, space);
        ++result.queries;
        result.knife_edge = result.knife_edge || sat.knife_edge;
        if (sat.satisfiable) {
            result.entailed = false;
            result.witness = std::move(sat.witness);
            break;
        }
    }
    return result;
}

bool entails(const PartialAssignment &pa, const FeatureSpace &space, const PredictionFormula &formula) {
    return check_entailment(pa, space, formula).entailed;
}

std::vector<std::size_t> feature_order(const LinearModel &model, const FeatureSpace &space, FeatureOrder order) {
    if (model.size() != space.size()) {
        throw validation_error{"model and feature space differ in dimension"};
    }
    std::vector<std::size_t> idx(space.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    switch (order) {
        case FeatureOrder::ascending: break;
        case FeatureOrder::descending_weight:
            std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
                return std::abs(model.weights[a]) > std::abs(model.weights[b]);
            });
            break;
        case FeatureOrder::lexicographic:
            std::stable_sort(idx.begin(), idx.end(),
                             [&](std::size_t a, std::size_t b) { return space[a].name < space[b].name; });
            break;
    }
    return idx;
}

Explanation minimal_explanation(const RejectModel &rm, const FeatureSpace &space, std::span<const double> x,
                                std::span<const std::size_t> order) {
    const auto start = std::chrono::steady_clock::now();
    if (x.size() != space.size() || rm.model.size() != space.size()) {
        throw validation_error{"instance, model and feature space differ in dimension"};
    }
    if (!space.contains(x)) {
        throw validation_error{"instance lies outside the feature domains"};
    }
    {
        std::vector<std::size_t> sorted(order.begin(), order.end());
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            if (sorted[i] != i) {
                throw validation_error{"feature order must be a permutation of the feature indices"};
            }
        }
        if (sorted.size() != space.size()) {
            throw validation_error{"feature order must be a permutation of the feature indices"};
        }
    }

    Explanation e;
    e.instance.assign(x.begin(), x.end());
    e.label = predict_with_reject(rm, x);
    const PredictionFormula formula = prediction_formula(rm, e.label);

    PartialAssignment pa = PartialAssignment::of(x);
    for (const std::size_t i : order) {
        pa.release(i);
        EntailmentResult r = check_entailment(pa, space, formula);
        e.queries += r.queries;
        e.knife_edge = e.knife_edge || r.knife_edge;
        if (r.entailed) {
            e.removed.push_back(i);
        } else {
            pa.fix(i, x[i]);
            e.kept.push_back(i);
            Instance point = std::move(*r.witness);
            const Label flipped = predict_with_reject(rm, point);
            e.witnesses.push_back({i, std::move(point), flipped});
        }
    }
    std::sort(e.kept.begin(), e.kept.end());
    std::sort(e.removed.begin(), e.removed.end());
    e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return e;
}

Explanation minimal_explanation(const RejectModel &rm, const FeatureSpace &space, std::span<const double> x,
                                FeatureOrder order) {
    const std::vector<std::size_t> idx = feature_order(rm.model, space, order);
    return minimal_explanation(rm, space, x, idx);
}

std::vector<Explanation> explain_all(const RejectModel &rm, const FeatureSpace &space,
                                     std::span<const Instance> instances, FeatureOrder order) {
    const std::vector<std::size_t> idx = feature_order(rm.model, space, order);
    std::vector<Explanation> out(instances.size());
    const auto count = static_cast<std::ptrdiff_t>(instances.size());
    // Exceptions must not escape an OpenMP region; capture the first and rethrow.
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
        try {
            out[static_cast<std::size_t>(k)] = minimal_explanation(rm, space, instances[static_cast<std::size_t>(k)], idx);
        } catch (...) {
#pragma omp critical(rejectx_explain_failure)
            if (!failure) {
                failure = std::current_exception();
            }
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return out;
}

std::vector<Explanation> explain_all_serial(const RejectModel &rm, const FeatureSpace &space,
                                            std::span<const Instance> instances, FeatureOrder order) {
    const std::vector<std::size_t> idx = feature_order(rm.model, space, order);
    std::vector<Explanation> out;
    out.reserve(instances.size());
    for (const Instance &x : instances) {
        out.push_back(minimal_explanation(rm, space, x, idx));
    }
    return out;
}

VerificationReport verify_explanation(const RejectModel &rm, const FeatureSpace &space,
                                      const Explanation &explanation) {
    VerificationReport report;
    const std::size_t n = space.size();
    if (explanation.instance.size() != n || rm.model.size() != n) {
        report.message = "dimension mismatch";
        return report;
    }
    std::vector<char> seen(n, 0);
    for (const std::size_t i : explanation.kept) {
        if (i >= n || seen[i]++) {
            report.message = "kept set is not a set of feature indices";
            return report;
        }
    }
    for (const std::size_t i : explanation.removed) {
        if (i >= n || seen[i]++) {
            report.message = "kept and removed sets overlap or hold invalid indices";
            return report;
        }
    }
    if (explanation.kept.size() + explanation.removed.size() != n) {
        report.message = "kept and removed sets do not cover all features";
        return report;
    }
    if (!space.contains(explanation.instance) || predict_with_reject(rm, explanation.instance) != explanation.label) {
        report.message = "instance is out of domain or not classified as the explained class";
        return report;
    }

    const PredictionFormula formula = prediction_formula(rm, explanation.label);
    PartialAssignment pa{n};
    for (const std::size_t i : explanation.kept) {
        pa.fix(i, explanation.instance[i]);
    }

    report.sufficient = entails(pa, space, formula);
    if (!report.sufficient) {
        report.message = "kept features do not entail the prediction";
    }

    report.minimal = true;
    for (const std::size_t i : explanation.kept) {
        pa.release(i);
        if (entails(pa, space, formula)) {
            report.minimal = false;
            report.message = "feature '" + space[i].name + "' is redundant";
        }
        pa.fix(i, explanation.instance[i]);
    }

    report.witnesses_flip = explanation.witnesses.size() == explanation.kept.size();
    if (!report.witnesses_flip) {
        report.message = "expected one witness per kept feature";
    }
    for (const Witness &w : explanation.witnesses) {
        bool ok = std::find(explanation.kept.begin(), explanation.kept.end(), w.feature) != explanation.kept.end();
        ok = ok && space.contains(w.point) && predict_with_reject(rm, w.point) != explanation.label &&
             predict_with_reject(rm, w.point) == w.label;
        // A witness may only move released features and the one it certifies.
        for (std::size_t k = 0; ok && k < explanation.kept.size(); ++k) {
            const std::size_t j = explanation.kept[k];
            ok = j == w.feature || w.point[j] == explanation.instance[j];
        }
        if (!ok) {
            report.witnesses_flip = false;
            report.message = "witness for feature '" + (w.feature < n ? space[w.feature].name : std::string{"?"}) +
                             "' does not flip the prediction";
        }
    }
    return report;
}

FrequencyTable feature_frequency(std::span<const Explanation> explanations) {
    FrequencyTable table;
    if (explanations.empty()) {
        return table;
    }
    table.feature_count = explanations.front().instance.size();
    for (const Explanation &e : explanations) {
        if (e.instance.size() != table.feature_count) {
            throw validation_error{"explanations span different feature spaces"};
        }
        ClassFrequency &row = table.classes[e.label];
        row.counts.resize(table.feature_count, 0);
        ++row.patterns;
        for (const std::size_t i : e.kept) {
            ++row.counts.at(i);
        }
    }
    return table;
}

}  // namespace rejectx
