#include <doctest.h>

#include <cmath>

#include "dsm/consensus.hpp"
#include "support/oracles.hpp"

using namespace dsm;

namespace {

Vec random_state(int n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Vec z(static_cast<std::size_t>(n));
    for (auto& v : z) v = rng.uniform(-1.0, 1.0);
    return z;
}

}  // namespace

TEST_CASE("disagreement reference values") {
    CHECK(disagreement({3.0, 3.0, 3.0}) == 0.0);
    CHECK(disagreement({1.0, 0.0}) == 0.5);
    CHECK(disagreement({1.0, 0.0, 0.0}) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(disagreement({5.0}) == 0.0);
    // Shifting every entry leaves the spread unchanged.
    CHECK(disagreement({11.0, 10.0}) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("averaging step on reference matrices") {
    auto pair = metropolis_from_graph(normalize_graph(2, {{0, 1}}));
    auto z = step_average({1.0, 0.0}, pair);
    CHECK(z[0] == 0.5);
    CHECK(z[1] == 0.5);

    auto path = metropolis_from_graph(normalize_graph(3, {{0, 1}, {1, 2}}));
    auto w = step_average({1.0, 0.0, 0.0}, path);
    CHECK(w[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(w[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(w[2] == 0.0);

    CHECK(step_average({4.0, 4.0, 4.0}, path) == Vec{4.0, 4.0, 4.0});
}

TEST_CASE("contraction factor and window decay bound") {
    CHECK(disagreement_contraction_factor(2, 0.5) == doctest::Approx(1.0 - 0.5 / 8.0).epsilon(1e-15));
    CHECK(disagreement_contraction_factor(1, 1.0) == 0.5);
    double f = disagreement_contraction_factor(3, 1.0 / 3.0);
    // Window of length B from a window boundary: exponent ceil(B/B)-2 = -1.
    CHECK(disagreement_decay_bound(3, 1.0 / 3.0, 2, 1, 0) >= 1.0);
    CHECK(disagreement_decay_bound(3, 1.0 / 3.0, 2, 5, 0) == doctest::Approx(f).epsilon(1e-15));
}

TEST_CASE("constant states stay at zero disagreement") {
    auto s = make_schedule(StaticSpec{normalize_graph(3, {{0, 1}, {1, 2}})}, 0);
    auto report = verify_disagreement_decay(s, {2.0, 2.0, 2.0}, 50);
    CHECK(report.ok());
    for (double v : report.values) CHECK(v == 0.0);
}

TEST_CASE("two-node averaging collapses in one step") {
    auto s = make_schedule(StaticSpec{normalize_graph(2, {{0, 1}})}, 0);
    auto report = verify_disagreement_decay(s, {1.0, 0.0}, 10);
    CHECK(report.ok());
    REQUIRE(report.values.size() == 11);
    CHECK(report.values[0] == 0.5);
    for (std::size_t k = 1; k < report.values.size(); ++k) CHECK(report.values[k] == 0.0);
}

TEST_CASE("cycle schedule decays without violations") {
    CycleSpec spec;
    spec.phases = {normalize_graph(3, {{0, 1}}), normalize_graph(3, {{1, 2}})};
    auto s = make_schedule(spec, 0);
    auto report = verify_disagreement_decay(s, {1.0, 0.0, 0.0}, 60);
    CHECK(report.ok());
    CHECK(report.values.back() < report.values.front() * 1e-6);
}

TEST_CASE("monotonicity, window contraction, and mean preservation at random") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        int n = 2 + static_cast<int>(seed % 6);
        int B = 1 + static_cast<int>(seed % 3);
        auto s = make_schedule(RandomConnectedSpec{n, 0.3, B}, seed);
        auto z0 = random_state(n, seed * 977);
        auto report = verify_disagreement_decay(s, z0, 80);
        CHECK(report.ok());
        // Window contraction, re-checked here directly on the recorded values.
        double factor = disagreement_contraction_factor(n, s.eta());
        for (std::int64_t k = 0; (k + 1) * B < static_cast<std::int64_t>(report.values.size());
             ++k) {
            double before = report.values[static_cast<std::size_t>(k * B)];
            double after = report.values[static_cast<std::size_t>((k + 1) * B)];
            CHECK(after <= factor * before + 1e-12);
        }
    }
}

TEST_CASE("generalized decay bound across sampled time pairs") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        int n = 3 + static_cast<int>(seed % 4);
        int B = 1 + static_cast<int>(seed % 4);
        auto s = make_schedule(RandomConnectedSpec{n, 0.25, B}, seed);
        auto report = verify_disagreement_decay(s, random_state(n, seed * 31), 100);
        REQUIRE(report.ok());
        SplitMix64 rng(seed * 1299709);
        for (int t = 0; t < 40; ++t) {
            auto s0 = rng.uniform_int(0, 99);
            auto k = rng.uniform_int(s0, 100);
            double lhs = report.values[static_cast<std::size_t>(k)];
            double rhs = disagreement_decay_bound(n, s.eta(), B, k, s0) *
                         report.values[static_cast<std::size_t>(s0)];
            CHECK(lhs <= rhs + 1e-12);
        }
    }
}

TEST_CASE("a drifting schedule is reported, not masked") {
    // Row-stochastic but not column-stochastic: the mean moves, and the
    // checker has to notice.
    Matrix A(2, 2);
    A(0, 0) = 1.0;
    A(0, 1) = 0.0;
    A(1, 0) = 0.5;
    A(1, 1) = 0.5;
    WeightSchedule sticky(2, 0.5, 1, [A](std::int64_t) { return A; });
    auto report = verify_disagreement_decay(sticky, {1.0, 0.0}, 30);
    CHECK_FALSE(report.ok());
    bool drift = false;
    for (const auto& v : report.violations)
        if (v.clause == DecayReport::Clause::AveragePreserved) drift = true;
    CHECK(drift);
}
