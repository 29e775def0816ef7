#include "rejectx/error.hpp"
#include "rejectx/explainer.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace rejectx;

namespace {

std::vector<std::size_t> identity_order(std::size_t n) {
    std::vector<std::size_t> o(n);
    std::iota(o.begin(), o.end(), std::size_t{0});
    return o;
}

std::vector<std::size_t> kept_from_mask(const std::vector<bool> &mask) {
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) {
            kept.push_back(i);
        }
    }
    return kept;
}

}  // namespace

TEST_SUITE("explainer") {

TEST_CASE("prediction formulas") {
    const RejectModel rm = fixtures::vertebral();
    const PredictionFormula rejected = prediction_formula(rm, Label::rejected);
    REQUIRE(rejected.atoms.size() == 2);
    CHECK(rejected.atoms[0].relation == Relation::less_equal);
    CHECK(rejected.atoms[0].threshold == 0.8396);
    CHECK(rejected.atoms[1].relation == Relation::greater_equal);
    CHECK(rejected.atoms[1].threshold == -0.3334);
    CHECK(rejected.atoms[0].weights == rm.model.weights);
    CHECK(rejected.atoms[0].bias == rm.model.bias);

    const PredictionFormula pos = prediction_formula(rm, Label::positive);
    REQUIRE(pos.atoms.size() == 1);
    CHECK(pos.atoms[0].relation == Relation::greater);
    CHECK(pos.atoms[0].threshold == 0.8396);

    const PredictionFormula neg = prediction_formula(rm, Label::negative);
    REQUIRE(neg.atoms.size() == 1);
    CHECK(neg.atoms[0].relation == Relation::less);
    CHECK(neg.atoms[0].threshold == -0.3334);
}

TEST_CASE("negation") {
    const RejectModel rm = fixtures::vertebral();
    const NegatedFormula not_pos = negate(prediction_formula(rm, Label::positive));
    REQUIRE(not_pos.atoms.size() == 1);
    CHECK(not_pos.atoms[0].relation == Relation::less_equal);

    const NegatedFormula not_rej = negate(prediction_formula(rm, Label::rejected));
    REQUIRE(not_rej.atoms.size() == 2);
    CHECK(not_rej.atoms[0].relation == Relation::greater);
    CHECK(not_rej.atoms[0].threshold == 0.8396);
    CHECK(not_rej.atoms[1].relation == Relation::less);
    CHECK(not_rej.atoms[1].threshold == -0.3334);

    for (const Label l : {Label::negative, Label::rejected, Label::positive}) {
        const PredictionFormula p = prediction_formula(rm, l);
        const PredictionFormula back = negate(negate(p));
        REQUIRE(back.atoms.size() == p.atoms.size());
        for (std::size_t k = 0; k < p.atoms.size(); ++k) {
            CHECK(back.atoms[k].relation == p.atoms[k].relation);
            CHECK(back.atoms[k].threshold == p.atoms[k].threshold);
        }
    }
}

TEST_CASE("entailment on the two-feature counterexample") {
    const RejectModel rm = fixtures::weight_counterexample();
    const FeatureSpace space = FeatureSpace::unit_box(2);
    const PredictionFormula p = prediction_formula(rm, Label::positive);

    PartialAssignment only_f1{2};
    only_f1.fix(0, 0.0526);
    CHECK(entails(only_f1, space, p));

    PartialAssignment only_f2{2};
    only_f2.fix(1, 0.3);
    const EntailmentResult r = check_entailment(only_f2, space, p);
    CHECK_FALSE(r.entailed);
    REQUIRE(r.witness.has_value());
    CHECK(*r.witness == std::vector<double>{1.0, 0.3});
    CHECK(r.queries == 1);

    CHECK(entails(PartialAssignment::of(fixtures::weight_counterexample_instance), space, p));
}

TEST_CASE("minimal explanation: weight magnitude is not relevance") {
    const RejectModel rm = fixtures::weight_counterexample();
    const FeatureSpace space = FeatureSpace::unit_box(2);
    const Explanation e = minimal_explanation(rm, space, fixtures::weight_counterexample_instance);
    CHECK(e.label == Label::positive);
    CHECK(e.kept == std::vector<std::size_t>{0});
    CHECK(e.removed == std::vector<std::size_t>{1});
    REQUIRE(e.witnesses.size() == 1);
    CHECK(e.witnesses[0].feature == 0);
    CHECK(e.witnesses[0].label == Label::negative);
    CHECK(e.witnesses[0].point[0] == 1.0);
    CHECK(e.queries <= 4);
    CHECK(verify_explanation(rm, space, e).ok());
}

TEST_CASE("minimal explanation of the rejected vertebral-column instance") {
    const RejectModel rm = fixtures::vertebral();
    const FeatureSpace space = FeatureSpace::unit_box(6);
    const Explanation e = minimal_explanation(rm, space, fixtures::vertebral_instance);
    CHECK(e.label == Label::rejected);
    CHECK(e.removed == std::vector<std::size_t>{2});
    CHECK(e.kept == std::vector<std::size_t>{0, 1, 3, 4, 5});
    // Same loop driven by vertex enumeration instead of closed-form extrema.
    const auto mask = oracle::minimal_by_vertices(rm, space, fixtures::vertebral_instance, identity_order(6));
    CHECK(kept_from_mask(mask) == e.kept);
    CHECK(verify_explanation(rm, space, e).ok());
}

TEST_CASE("zero-weight features are never kept") {
    std::mt19937_64 rng{17};
    const FeatureSpace space = FeatureSpace::unit_box(8);
    for (int trial = 0; trial < 200; ++trial) {
        const RejectModel rm = fixtures::random_reject_model(8, rng, 0.4);
        for (const Instance &x : fixtures::random_instances(5, 8, rng)) {
            const Explanation e = minimal_explanation(rm, space, x);
            for (const std::size_t i : e.kept) {
                CHECK(rm.model.weights[i] != 0.0);
            }
        }
    }
}

TEST_CASE("explanation input validation") {
    const RejectModel rm = fixtures::weight_counterexample();
    const FeatureSpace space = FeatureSpace::unit_box(2);
    CHECK_THROWS_AS((void)minimal_explanation(rm, space, std::vector<double>{1.2, 0.3}), validation_error);
    CHECK_THROWS_AS((void)minimal_explanation(rm, space, std::vector<double>{0.2}), validation_error);
    const std::vector<std::size_t> bad_order{0, 0};
    CHECK_THROWS_AS((void)minimal_explanation(rm, space, fixtures::weight_counterexample_instance, bad_order),
                    validation_error);
}

TEST_CASE("feature orders") {
    const LinearModel m{{0.5, -2.0, 1.0}, 0.0};
    const FeatureSpace space{{{"c", 0, 1}, {"a", 0, 1}, {"b", 0, 1}}};
    CHECK(feature_order(m, space, FeatureOrder::ascending) == std::vector<std::size_t>{0, 1, 2});
    CHECK(feature_order(m, space, FeatureOrder::descending_weight) == std::vector<std::size_t>{1, 2, 0});
    CHECK(feature_order(m, space, FeatureOrder::lexicographic) == std::vector<std::size_t>{1, 2, 0});
}

TEST_CASE("verification catches tampered explanations") {
    const RejectModel rm = fixtures::vertebral();
    const FeatureSpace space = FeatureSpace::unit_box(6);
    const Explanation good = minimal_explanation(rm, space, fixtures::vertebral_instance);
    REQUIRE(verify_explanation(rm, space, good).ok());

    SUBCASE("dropping a kept feature breaks sufficiency") {
        Explanation e = good;
        e.kept.erase(e.kept.begin());  // f1
        e.removed.insert(e.removed.begin(), 0);
        e.witnesses.erase(std::remove_if(e.witnesses.begin(), e.witnesses.end(),
                                         [](const Witness &w) { return w.feature == 0; }),
                          e.witnesses.end());
        const VerificationReport v = verify_explanation(rm, space, e);
        CHECK_FALSE(v.sufficient);
        CHECK_FALSE(v.ok());
    }
    SUBCASE("re-adding a redundant feature breaks minimality") {
        Explanation e = good;
        e.kept = {0, 1, 2, 3, 4, 5};
        e.removed.clear();
        const VerificationReport v = verify_explanation(rm, space, e);
        CHECK(v.sufficient);
        CHECK_FALSE(v.minimal);
    }
    SUBCASE("a witness that does not flip the class is rejected") {
        Explanation e = good;
        e.witnesses[0].point = e.instance;
        CHECK_FALSE(verify_explanation(rm, space, e).witnesses_flip);
    }
}

TEST_CASE("feature frequency") {
    Explanation e;
    e.instance = {0.1, 0.2, 0.3};
    e.label = Label::positive;
    e.kept = {0};
    e.removed = {1, 2};
    const std::vector<Explanation> three(3, e);
    const FrequencyTable t = feature_frequency(three);
    REQUIRE(t.classes.count(Label::positive) == 1);
    CHECK(t.classes.at(Label::positive).counts == std::vector<std::size_t>{3, 0, 0});
    CHECK(t.classes.at(Label::positive).patterns == 3);
    CHECK(t.classes.count(Label::negative) == 0);

    CHECK(feature_frequency(std::vector<Explanation>{}).empty());

    std::vector<Explanation> mixed = three;
    mixed[1].instance = {0.1};
    CHECK_THROWS_AS((void)feature_frequency(mixed), validation_error);
}

TEST_CASE("property: explanations agree with the vertex-enumeration loop and pass verification in any order") {
    std::mt19937_64 rng{4242};
    std::uniform_int_distribution<std::size_t> dims{1, 10};
    std::uniform_real_distribution<double> unit{0.0, 1.0};
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t n = dims(rng);
        const FeatureSpace space = FeatureSpace::unit_box(n);
        const RejectModel rm = fixtures::random_reject_model(n, rng);
        for (const Instance &x : fixtures::random_instances(4, n, rng)) {
            const Explanation e = minimal_explanation(rm, space, x);
            const auto mask = oracle::minimal_by_vertices(rm, space, x, identity_order(n));
            CHECK(kept_from_mask(mask) == e.kept);
            CHECK(e.queries <= 2 * n);
            CHECK(verify_explanation(rm, space, e).ok());

            std::vector<std::size_t> order = identity_order(n);
            std::shuffle(order.begin(), order.end(), rng);
            const Explanation shuffled = minimal_explanation(rm, space, x, order);
            CHECK(verify_explanation(rm, space, shuffled).ok());
            CHECK(kept_from_mask(oracle::minimal_by_vertices(rm, space, x, order)) == shuffled.kept);

            // Base case: fixing everything entails the instance's own class.
            CHECK(entails(PartialAssignment::of(x), space, prediction_formula(rm, e.label)));
        }
    }
}

TEST_CASE("property: random completions of released features never change the class") {
    std::mt19937_64 rng{777};
    std::uniform_real_distribution<double> unit{0.0, 1.0};
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 12);
        const FeatureSpace space = FeatureSpace::unit_box(n);
        const RejectModel rm = fixtures::random_reject_model(n, rng);
        for (const Instance &x : fixtures::random_instances(3, n, rng)) {
            const Explanation e = minimal_explanation(rm, space, x);
            Instance y = x;
            for (int s = 0; s < 1000; ++s) {
                for (const std::size_t i : e.removed) {
                    y[i] = unit(rng);
                }
                REQUIRE(predict_with_reject(rm, y) == e.label);
            }
        }
    }
}

TEST_CASE("parallel batch equals the serial reference") {
    std::mt19937_64 rng{8};
    const std::size_t n = 25;
    const FeatureSpace space = FeatureSpace::unit_box(n);
    const RejectModel rm = fixtures::random_reject_model(n, rng);
    const auto instances = fixtures::random_instances(300, n, rng);
    for (const FeatureOrder order : {FeatureOrder::ascending, FeatureOrder::descending_weight}) {
        const auto par = explain_all(rm, space, instances, order);
        const auto ser = explain_all_serial(rm, space, instances, order);
        REQUIRE(par.size() == ser.size());
        for (std::size_t k = 0; k < par.size(); ++k) {
            CHECK(par[k].label == ser[k].label);
            CHECK(par[k].kept == ser[k].kept);
            CHECK(par[k].queries == ser[k].queries);
            REQUIRE(par[k].witnesses.size() == ser[k].witnesses.size());
            for (std::size_t w = 0; w < par[k].witnesses.size(); ++w) {
                CHECK(par[k].witnesses[w].point == ser[k].witnesses[w].point);
            }
        }
    }
    std::vector<Instance> with_bad = instances;
    with_bad[7][0] = 2.0;
    CHECK_THROWS_AS((void)explain_all(rm, space, with_bad), validation_error);
}

}  // TEST_SUITE
