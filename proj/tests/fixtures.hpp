#pragma once

#include "rejectx/dataset.hpp"
#include "rejectx/feasibility.hpp"
#include "rejectx/rejector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace rejectx::fixtures {

/// Two features on [0, 1]: the weight-magnitude counterexample model, no reject band.
inline RejectModel weight_counterexample() { return RejectModel{LinearModel{{-0.8, 2.0}, 0.05}, 0.0, 0.0, 0.24}; }
inline const std::vector<double> weight_counterexample_instance{0.0526, 0.3};

/// Six-feature vertebral-column model with an instance that falls in its reject band.
inline RejectModel vertebral() {
    return RejectModel{
        LinearModel{{0.72863148, 1.97781269, 0.85680605, -0.32466632, -3.42937211, 2.43522629}, 1.10008469}, -0.3334,
        0.8396, 0.24};
}
inline const std::vector<double> vertebral_instance{0.25125386, 0.4244373, 0.7214483, 0.20007403, 0.71932466,
                                                    0.15363128};

/// Random weights in [-1, 1] (some exactly zero) with a band around the centre of [0, 1]^n.
inline RejectModel random_reject_model(std::size_t n, std::mt19937_64 &rng, double zero_probability = 0.1) {
    std::uniform_real_distribution<double> unit{0.0, 1.0};
    RejectModel rm;
    double centre = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = unit(rng) < zero_probability ? 0.0 : 2.0 * unit(rng) - 1.0;
        rm.model.weights.push_back(w);
        centre += 0.5 * w;
        scale += std::abs(w);
    }
    rm.model.bias = -centre + 0.1 * scale * (unit(rng) - 0.5);
    rm.t_minus = -0.15 * scale * unit(rng);
    rm.t_plus = 0.15 * scale * unit(rng);
    return rm;
}

inline std::vector<Instance> random_instances(std::size_t count, std::size_t n, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> unit{0.0, 1.0};
    std::vector<Instance> out(count, Instance(n));
    for (Instance &x : out) {
        for (double &v : x) {
            v = unit(rng);
        }
    }
    return out;
}

/// Random box, atom and partial assignment with at most `max_free` released coordinates.
struct RandomQuery {
    FeatureSpace space;
    LinearAtom atom;
    PartialAssignment pa;
};

inline RandomQuery random_query(std::mt19937_64 &rng, std::size_t max_free) {
    std::uniform_int_distribution<std::size_t> dims{1, 16};
    std::uniform_real_distribution<double> weight{-10.0, 10.0};
    std::uniform_real_distribution<double> unit{0.0, 1.0};
    std::uniform_int_distribution<int> rel{0, 3};
    const std::size_t n = dims(rng);
    std::vector<Feature> features;
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = unit(rng) < 0.7 ? 0.0 : -unit(rng);
        features.push_back({"x" + std::to_string(i), lo, lo + 0.1 + unit(rng)});
    }
    RandomQuery q{FeatureSpace{features}, {}, PartialAssignment{n}};
    for (std::size_t i = 0; i < n; ++i) {
        q.atom.weights.push_back(unit(rng) < 0.1 ? 0.0 : weight(rng));
    }
    q.atom.bias = weight(rng);
    q.atom.relation = static_cast<Relation>(rel(rng));
    q.atom.threshold = weight(rng);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = i;
    }
    for (std::size_t i = n; i > 1; --i) {
        std::swap(order[i - 1], order[std::uniform_int_distribution<std::size_t>{0, i - 1}(rng)]);
    }
    const std::size_t free = std::uniform_int_distribution<std::size_t>{0, std::min(n, max_free)}(rng);
    for (std::size_t k = free; k < n; ++k) {
        const std::size_t i = order[k];
        const Feature &f = q.space[i];
        const double u = unit(rng);
        q.pa.fix(i, u < 0.1 ? f.lower : (u < 0.2 ? f.upper : f.lower + (f.upper - f.lower) * unit(rng)));
    }
    return q;
}

}  // namespace rejectx::fixtures
