#include "rejectx/error.hpp"
#include "rejectx/trainer.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

using namespace rejectx;

namespace {

const LinearModel worked_example{{-0.8, 2.0}, 0.05};

LabeledDataset make(std::vector<Instance> xs, std::vector<int> ys) {
    LabeledDataset d;
    d.instances = std::move(xs);
    for (const int y : ys) {
        d.labels.push_back(y > 0 ? Label::positive : Label::negative);
    }
    return d;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

}  // namespace

TEST_SUITE("trainer") {

TEST_CASE("decision_value") {
    CHECK(decision_value(worked_example, std::vector<double>{0.0526, 0.3}) == doctest::Approx(0.60792).epsilon(1e-12));
    CHECK(decision_value(LinearModel{{0, 0, 0}, 0}, std::vector<double>{0.3, 0.9, 0.1}) == 0.0);
    CHECK(decision_value(LinearModel{{1}, 0}, std::vector<double>{0.25}) == 0.25);
    CHECK_THROWS_AS((void)decision_value(worked_example, std::vector<double>{0.5}), validation_error);
}

TEST_CASE("predict") {
    CHECK(predict(worked_example, std::vector<double>{0.0526, 0.3}) == Label::positive);
    CHECK(predict(worked_example, std::vector<double>{1.0, 0.3}) == Label::negative);
    // d(x) = 0 exactly.
    CHECK(predict(LinearModel{{1.0}, -0.5}, std::vector<double>{0.5}) == Label::negative);
}

TEST_CASE("two points on a line: hard-margin solution") {
    const LabeledDataset d = make({{0.0}, {1.0}}, {-1, +1});
    const auto [model, report] = train_soft_margin(d, TrainerConfig{1000.0, 1e-9, 10000, 0});
    CHECK(model.weights[0] == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(model.bias == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(report.converged);
    // Independent route: direct search on the primal objective.
    CHECK(report.primal_objective == doctest::Approx(oracle::svm_objective_by_search(d, 1000.0)).epsilon(1e-6));
    CHECK(report.primal_objective == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("separable toy set, large C: every margin holds") {
    const LabeledDataset d =
        make({{0.1, 0.2}, {0.2, 0.1}, {0.3, 0.3}, {0.7, 0.8}, {0.9, 0.6}, {0.8, 0.9}, {0.2, 0.4}}, {-1, -1, -1, 1, 1, 1, -1});
    const auto [model, report] = train_soft_margin(d, TrainerConfig{1e4, 1e-8, 10000, 0});
    CHECK(accuracy(model, d) == 1.0);
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(sign(d.labels[i]) * decision_value(model, d.instances[i]) >= 1.0 - 1e-3);
    }
    CHECK(report.max_slack <= 1e-3);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS((void)train_soft_margin(make({{0.0}, {1.0}}, {1, 1})), validation_error);
    CHECK_THROWS_AS((void)train_soft_margin(make({{0.0}, {std::numeric_limits<double>::quiet_NaN()}}, {1, -1})),
                    validation_error);
    CHECK_THROWS_AS((void)train_soft_margin(make({{0.0}, {1.0, 2.0}}, {1, -1})), validation_error);
    CHECK_THROWS_AS((void)train_soft_margin(make({{0.0}, {1.0}}, {1, -1}), TrainerConfig{0.0, 1e-6, 10, 0}),
                    validation_error);
    CHECK_THROWS_AS((void)train_soft_margin(make({{0.0}, {1.0}}, {1, -1}), TrainerConfig{1.0, 0.0, 10, 0}),
                    validation_error);
}

TEST_CASE("property: objective matches a brute-force search on tiny problems") {
    std::mt19937_64 rng{99};
    std::uniform_real_distribution<double> unit{0.0, 1.0};
    std::uniform_int_distribution<int> dims{1, 3};
    std::uniform_int_distribution<int> points{2, 8};
    const double costs[] = {0.1, 1.0, 10.0};
    for (int trial = 0; trial < 24; ++trial) {
        const int n = dims(rng);
        const int l = points(rng);
        LabeledDataset d;
        for (int i = 0; i < l; ++i) {
            Instance x(static_cast<std::size_t>(n));
            for (double &v : x) {
                v = unit(rng);
            }
            d.instances.push_back(x);
            d.labels.push_back(i == 0 ? Label::positive : (i == 1 ? Label::negative : (unit(rng) < 0.5 ? Label::positive : Label::negative)));
        }
        const double C = costs[trial % 3];
        const auto [model, report] = train_soft_margin(d, TrainerConfig{C, 1e-9, 100000, 0});
        const double reference = oracle::svm_objective_by_search(d, C);
        INFO("trial " << trial << " n=" << n << " l=" << l << " C=" << C);
        CHECK(std::abs(report.primal_objective - reference) <= 1e-3);
        CHECK(report.primal_objective == doctest::Approx(primal_objective(model, d, C)));
        // Weak duality bounds the dual from above by the primal.
        CHECK(report.dual_objective <= report.primal_objective + 1e-9);
    }
}

TEST_CASE("property: scaling a separable problem leaves predictions unchanged") {
    const std::vector<Instance> xs{{0.1, 0.2}, {0.2, 0.1}, {0.3, 0.25}, {0.7, 0.8}, {0.9, 0.6}, {0.8, 0.9}};
    const std::vector<int> ys{-1, -1, -1, 1, 1, 1};
    const auto [base, r0] = train_soft_margin(make(xs, ys), TrainerConfig{1e4, 1e-9, 10000, 0});
    for (const double k : {0.5, 2.0, 10.0}) {
        std::vector<Instance> scaled = xs;
        for (Instance &x : scaled) {
            for (double &v : x) {
                v *= k;
            }
        }
        const auto [model, report] = train_soft_margin(make(scaled, ys), TrainerConfig{1e4, 1e-9, 10000, 0});
        for (std::size_t i = 0; i < xs.size(); ++i) {
            CHECK(predict(model, scaled[i]) == predict(base, xs[i]));
        }
    }
}

TEST_CASE("training is bitwise deterministic and honours the pass limit") {
    std::mt19937_64 rng{5};
    std::uniform_real_distribution<double> unit{0.0, 1.0};
    LabeledDataset d;
    for (int i = 0; i < 200; ++i) {
        const double a = unit(rng);
        const double b = unit(rng);
        d.instances.push_back({a, b, unit(rng)});
        d.labels.push_back(a + b + 0.3 * (unit(rng) - 0.5) > 1.0 ? Label::positive : Label::negative);
    }
    const auto [m1, r1] = train_soft_margin(d);
    const auto [m2, r2] = train_soft_margin(d);
    REQUIRE(m1.weights.size() == m2.weights.size());
    for (std::size_t i = 0; i < m1.weights.size(); ++i) {
        CHECK(same_bits(m1.weights[i], m2.weights[i]));
    }
    CHECK(same_bits(m1.bias, m2.bias));
    CHECK(r1.passes <= 10000);
    CHECK(r1.converged);

    const auto [m3, r3] = train_soft_margin(d, TrainerConfig{1.0, 1e-12, 1, 0});
    CHECK(r3.passes <= 1);
    CHECK(r3.iterations <= d.size());
}

}  // TEST_SUITE
