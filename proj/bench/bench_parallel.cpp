// Times the OpenMP kernels against their serial references and checks that
// both produce identical results.
//
//   bench_parallel [features] [instances] [calibration_rows] [repeats]

#include "rejectx/explainer.hpp"
#include "rejectx/rejector.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

using namespace rejectx;

namespace {

using clock_type = std::chrono::steady_clock;

template <typename F>
double best_of(int repeats, F &&f) {
    double best = INFINITY;
    for (int r = 0; r < repeats; ++r) {
        const auto start = clock_type::now();
        f();
        best = std::min(best, std::chrono::duration<double>(clock_type::now() - start).count());
    }
    return best;
}

bool same(const std::vector<Explanation> &a, const std::vector<Explanation> &b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k].label != b[k].label || a[k].kept != b[k].kept || a[k].queries != b[k].queries) {
            return false;
        }
    }
    return true;
}

std::size_t arg(int argc, char **argv, int i, std::size_t fallback) {
    return argc > i ? static_cast<std::size_t>(std::strtoull(argv[i], nullptr, 10)) : fallback;
}

}  // namespace

int main(int argc, char **argv) {
    const std::size_t features = arg(argc, argv, 1, 60);
    const std::size_t count = arg(argc, argv, 2, 2000);
    const std::size_t rows = arg(argc, argv, 3, 20000);
    const int repeats = static_cast<int>(arg(argc, argv, 4, 3));

    std::mt19937_64 rng{123};
    std::uniform_real_distribution<double> unit{0.0, 1.0};

    RejectModel rm;
    double scale = 0.0;
    for (std::size_t i = 0; i < features; ++i) {
        const double w = 2.0 * unit(rng) - 1.0;
        rm.model.weights.push_back(w);
        rm.model.bias -= 0.5 * w;
        scale += std::abs(w);
    }
    rm.t_minus = -0.05 * scale;
    rm.t_plus = 0.05 * scale;
    const FeatureSpace space = FeatureSpace::unit_box(features);
    std::vector<Instance> instances(count, Instance(features));
    for (Instance &x : instances) {
        for (double &v : x) {
            v = unit(rng);
        }
    }

    LabeledDataset train;
    for (std::size_t k = 0; k < rows; ++k) {
        Instance x(features);
        for (double &v : x) {
            v = unit(rng);
        }
        const double d = decision_value(rm.model, x) + 0.1 * scale * (unit(rng) - 0.5);
        train.labels.push_back(d > 0.0 ? Label::positive : Label::negative);
        train.instances.push_back(std::move(x));
    }

    std::printf("threads %d, %zu features\n", omp_get_max_threads(), features);

    std::vector<Explanation> serial;
    std::vector<Explanation> parallel;
    const double es = best_of(repeats, [&] { serial = explain_all_serial(rm, space, instances); });
    const double ep = best_of(repeats, [&] { parallel = explain_all(rm, space, instances); });
    std::printf("explain_all    %zu instances: serial %.4f s, parallel %.4f s, speedup %.2fx, identical %s\n", count,
                es, ep, es / ep, same(serial, parallel) ? "yes" : "NO");

    Calibration cs;
    Calibration cp;
    const double cs_t = best_of(repeats, [&] { cs = calibrate_serial(rm.model, train, 0.24); });
    const double cp_t = best_of(repeats, [&] { cp = calibrate(rm.model, train, 0.24); });
    const bool cal_same = cs.report.risk == cp.report.risk && cs.report.grid_index == cp.report.grid_index &&
                          cs.reject_model == cp.reject_model;
    std::printf("calibrate      %zu rows: serial %.4f s, parallel %.4f s, speedup %.2fx, identical %s\n", rows, cs_t,
                cp_t, cs_t / cp_t, cal_same ? "yes" : "NO");

    return same(serial, parallel) && cal_same ? 0 : 1;
}
