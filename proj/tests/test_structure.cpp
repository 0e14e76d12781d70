#include <doctest.h>

#include <cmath>
#include <random>

#include "collapse/errors.hpp"
#include "collapse/structure.hpp"
#include "tree_gen.hpp"

using namespace collapse;
using namespace collapse::structure;

namespace {

std::vector<std::string> names(const std::vector<ParticleNode>& nodes) {
    std::vector<std::string> out;
    for (const auto& n : nodes) out.push_back(n.name);
    return out;
}

}  // namespace

TEST_CASE("leaves") {
    const auto e = ParticleNode::leaf("e", 500);
    CHECK(leaves(e) == std::vector<ParticleNode>{e});

    const auto k0 = ParticleNode::composite("K0", {ParticleNode::leaf("s", 500), ParticleNode::leaf("dbar", 300)});
    CHECK(names(leaves(k0)) == std::vector<std::string>{"s", "dbar"});

    const auto a = ParticleNode::composite(
        "A", {ParticleNode::composite("B", {ParticleNode::leaf("x", 1), ParticleNode::leaf("y", 2)}),
              ParticleNode::leaf("z", 3)});
    CHECK(names(leaves(a)) == std::vector<std::string>{"x", "y", "z"});
}

TEST_CASE("total_energy_difference examples") {
    const auto k0 = ParticleNode::composite("K0", {ParticleNode::leaf("s", 500), ParticleNode::leaf("dbar", 300)});
    const auto k0bar = ParticleNode::composite("K0bar", {ParticleNode::leaf("d", 300), ParticleNode::leaf("sbar", 500)});
    CHECK(total_energy_difference(k0, k0bar).mev == 400.0);
    CHECK(total_energy_difference(k0, k0).mev == 0.0);

    const auto p = ParticleNode::composite("p", {ParticleNode::leaf("a", 2), ParticleNode::leaf("b", 3)});
    const auto q = ParticleNode::composite("q", {ParticleNode::leaf("c", 1), ParticleNode::leaf("d", 4)});
    CHECK(total_energy_difference(p, q).mev == 2.0);

    const auto three = ParticleNode::composite(
        "t", {ParticleNode::leaf("a", 1), ParticleNode::leaf("b", 1), ParticleNode::leaf("c", 1)});
    try {
        total_energy_difference(p, three);
        FAIL("expected a leaf-count mismatch");
    } catch (const ValidationError& err) {
        const std::string msg = err.what();
        CHECK(msg.find("2 leaves") != std::string::npos);
        CHECK(msg.find("3 leaves") != std::string::npos);
    }
}

TEST_CASE("validation of trees and superpositions") {
    CHECK_THROWS_AS(validate(ParticleNode{"", Energy{1}, {}}), ValidationError);
    CHECK_THROWS_AS(validate(ParticleNode{"x", Energy{-1}, {}}), ValidationError);
    CHECK_THROWS_AS(validate(ParticleNode{"x", std::nullopt, {}}), ValidationError);
    CHECK_NOTHROW(validate(ParticleNode::composite("c", {ParticleNode::leaf("x", 0)})));
    const auto a = ParticleNode::leaf("a", 1);
    CHECK_THROWS_AS(SuperpositionSpec::make("s", {a}, {1.0}), ValidationError);
    CHECK_THROWS_AS(SuperpositionSpec::make("s", {a, a}, {1.0}), ValidationError);
    CHECK_THROWS_AS(SuperpositionSpec::make("s", {a, a}, {0.0, 0.0}), ValidationError);
    const auto s = SuperpositionSpec::make("s", {a, a}, {3.0, Complex(0, 4)});
    CHECK(std::norm(s.amplitudes[0]) + std::norm(s.amplitudes[1]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("predict_collapse_time") {
    const PhysicalConstants c;
    const auto one = ParticleNode::leaf("1", 938);
    const auto two = ParticleNode::leaf("2", 938);
    const auto flat = predict_collapse_time(SuperpositionSpec::make("flat", {one, two}, {1.0, 1.0}), c);
    CHECK_FALSE(flat.predicted_tc.has_value());
    CHECK(flat.delta_e_total.mev == 0.0);

    const auto kl = kaon_case_study(c);
    CHECK(kl.delta_e_total.mev == 400.0);
    CHECK(kl.predicted_tc->seconds == doctest::Approx(5.02e-5).epsilon(0.005));

    // each quark split in two so the total doubles to 800 MeV
    auto split = [](const std::string& n, double m1, double m2) {
        return ParticleNode::composite(n, {ParticleNode::leaf(n + "1", m1), ParticleNode::leaf(n + "2", m2)});
    };
    const auto deep = SuperpositionSpec::make(
        "deep",
        {ParticleNode::composite("K0", {split("s", 400, 100), split("dbar", 100, 200)}),
         ParticleNode::composite("K0bar", {split("d", 100, 200), split("sbar", 400, 100)})},
        {1.0, -1.0});
    const auto dr = predict_collapse_time(deep, c);
    CHECK(dr.delta_e_total.mev == 800.0);
    CHECK(dr.predicted_tc->seconds == doctest::Approx(1.2556318688431889e-05).epsilon(1e-12));
    CHECK(dr.predicted_tc->seconds == doctest::Approx(kl.predicted_tc->seconds / 4).epsilon(1e-12));

    CHECK_THROWS_AS(predict_collapse_time(SuperpositionSpec::make("three", {one, two, one}, {1.0, 1.0, 1.0}), c),
                    ValidationError);
}

TEST_CASE("compare_hypotheses") {
    HypothesisReport a{"a", Energy{400}, Duration{5e-5}, 1.0, {}, {}};
    HypothesisReport b{"b", Energy{1e5}, Duration{5e-9}, 1.0, {}, {}};
    const auto ranked = compare_hypotheses({b, a}, Duration{1e-4});
    CHECK(ranked[0].hypothesis_name == "a");
    CHECK(std::fabs(*ranked[0].log10_ratio) == doctest::Approx(0.30103).epsilon(1e-4));
    CHECK(std::fabs(*ranked[1].log10_ratio) == doctest::Approx(4.30103).epsilon(1e-5));

    HypothesisReport exact{"exact", Energy{1}, Duration{1e-4}, 1.0, {}, {}};
    HypothesisReport none1{"none1", Energy{0}, std::nullopt, 1.0, {}, {}};
    HypothesisReport none2{"none2", Energy{0}, std::nullopt, 1.0, {}, {}};
    const auto r2 = compare_hypotheses({none1, b, exact, none2}, Duration{1e-4});
    CHECK(r2[0].hypothesis_name == "exact");
    CHECK(*r2[0].log10_ratio == 0.0);
    CHECK(r2[2].hypothesis_name == "none1");
    CHECK(r2[3].hypothesis_name == "none2");
    CHECK_FALSE(r2[3].comparable());

    const auto all_none = compare_hypotheses({none2, none1}, Duration{1e-4});
    CHECK(all_none[0].hypothesis_name == "none2");
    CHECK(all_none[1].hypothesis_name == "none1");
    CHECK(all_none[0].measured_timescale->seconds == 1e-4);

    CHECK_THROWS_AS(compare_hypotheses({a}, Duration{0}), ValidationError);
}

TEST_CASE("mass tables and the kaon case study") {
    auto table = default_quark_masses();
    CHECK(resolve_mass(table, "sbar")->mev == 500.0);
    CHECK(resolve_mass(table, "d")->mev == 300.0);
    CHECK_FALSE(resolve_mass(table, "bar").has_value());
    CHECK_FALSE(resolve_mass(table, "u").has_value());

    const auto kl = kaon_superposition(table);
    CHECK(kl.amplitudes[0].real() == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(kl.amplitudes[1].real() == doctest::Approx(-1 / std::sqrt(2.0)));

    table["d"] = Energy{500};
    CHECK_FALSE(kaon_case_study(PhysicalConstants(), table).predicted_tc.has_value());

    const auto k2 = kaon_case_study(PhysicalConstants().with_k(2.0));
    CHECK(k2.predicted_tc->seconds == doctest::Approx(1.005e-4).epsilon(0.001));
    CHECK(k2.k == 2.0);

    CHECK_THROWS_AS(kaon_case_study(PhysicalConstants(), MassTable{{"s", Energy{500}}}), ValidationError);
}

TEST_CASE("apply_masses overrides leaves only") {
    auto tree = ParticleNode::composite("K0", {ParticleNode{"s", std::nullopt, {}}, ParticleNode::leaf("dbar", 1)},
                                        Energy{497.6});
    const auto out = apply_masses(tree, default_quark_masses());
    CHECK(out.mass->mev == 497.6);
    CHECK(out.constituents[0].mass->mev == 500.0);
    CHECK(out.constituents[1].mass->mev == 300.0);
}

TEST_CASE("property: aggregation rule on random trees") {
    std::mt19937_64 rng(1018);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto a = testing::random_tree(rng, 3);
        const auto b = testing::random_tree_with_leaves(rng, leaves(a).size());
        REQUIRE(leaves(b).size() == leaves(a).size());

        CHECK(total_energy_difference(a, b) == total_energy_difference(b, a));
        CHECK(total_energy_difference(a, a).mev == 0.0);

        const double m = std::uniform_real_distribution<double>(0, 1000)(rng);
        auto pad = [&](const ParticleNode& n) {
            return ParticleNode::composite("pad", {n, ParticleNode::leaf("extra", m)});
        };
        CHECK(total_energy_difference(pad(a), pad(b)).mev ==
              doctest::Approx(total_energy_difference(a, b).mev).epsilon(1e-12));

        const auto c = testing::random_tree_with_leaves(rng, leaves(a).size() + 1);
        CHECK_THROWS_AS(total_energy_difference(a, c), ValidationError);

        // amplitudes never enter the prediction; k scales it linearly
        const auto s1 = SuperpositionSpec::make("h", {a, b}, {1.0, 1.0});
        const auto s2 = SuperpositionSpec::make("h", {a, b}, {Complex(0.1, 0.3), -2.0});
        const auto p1 = predict_collapse_time(s1, PhysicalConstants());
        const auto p2 = predict_collapse_time(s2, PhysicalConstants());
        CHECK(p1.predicted_tc == p2.predicted_tc);
        const auto p3 = predict_collapse_time(s1, PhysicalConstants().with_k(3.0));
        if (p1.predicted_tc)
            CHECK(p3.predicted_tc->seconds == doctest::Approx(3 * p1.predicted_tc->seconds).epsilon(1e-15));
        else
            CHECK_FALSE(p3.predicted_tc.has_value());
    }
}
