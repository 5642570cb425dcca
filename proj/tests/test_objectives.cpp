#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dsm/objectives.hpp"
#include "support/oracles.hpp"

using namespace dsm;

TEST_CASE("max-affine value is the max over pieces") {
    auto obj = make_max_affine({{{1.0}, 0.0}, {{-1.0}, 0.0}});
    CHECK(obj.value({0.0}) == 0.0);
    CHECK(obj.value({2.5}) == 2.5);
    CHECK(obj.value({-3.0}) == 3.0);
    CHECK(obj.subgradient_bound == 1.0);

    auto three = make_max_affine({{{1.0}, 0.0}, {{-1.0}, 0.0}, {{2.0}, -3.0}});
    CHECK(three.value({2.0}) == 2.0);  // max(2, -2, 1)
    CHECK(three.subgradient({2.0})[0] == 1.0);
    CHECK(three.subgradient_bound == 2.0);

    auto flat = make_max_affine({{{0.0}, 5.0}});
    CHECK(flat.value({123.0}) == 5.0);
    CHECK(flat.subgradient({123.0})[0] == 0.0);
    CHECK(flat.subgradient_bound == 0.0);
}

TEST_CASE("max-affine subgradient prefers zero at a straddling kink") {
    // |x| at the kink: both slopes active, their hull contains 0.
    auto absf = make_max_affine({{{1.0}, 0.0}, {{-1.0}, 0.0}});
    CHECK(absf.subgradient({0.0})[0] == 0.0);
    CHECK(absf.subgradient({1.0})[0] == 1.0);
    CHECK(absf.subgradient({-0.5})[0] == -1.0);

    // max(x, 2x-1) at x=1: active slopes 1 and 2, hull excludes 0, so the
    // lowest-index active slope is returned. Any value in [1,2] is a valid
    // subgradient; check that with a straight support-line sweep.
    auto kinked = make_max_affine({{{1.0}, 0.0}, {{2.0}, -1.0}});
    double g = kinked.subgradient({1.0})[0];
    CHECK(g == 1.0);
    for (double z = -3.0; z <= 3.0; z += 0.125)
        CHECK(kinked.value({z}) >= kinked.value({1.0}) + g * (z - 1.0) - 1e-12);
    CHECK(kinked.subgradient({1.0 + 1e-6})[0] == 2.0);
}

TEST_CASE("max-affine with empty or mismatched pieces is rejected") {
    CHECK_THROWS_AS(make_max_affine({}), std::invalid_argument);
    CHECK_THROWS_AS(make_max_affine({{{1.0}, 0.0}, {{1.0, 2.0}, 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(make_max_affine({{{}, 0.0}}), std::invalid_argument);
}

TEST_CASE("shifted l1 objective") {
    auto obj = make_abs_shift({1.0, 2.0});
    CHECK(obj.value({1.0, 2.0}) == 0.0);
    CHECK(obj.value({0.0, 0.0}) == 3.0);
    CHECK(obj.value({2.0, 0.0}) == 3.0);
    CHECK(obj.subgradient_bound == doctest::Approx(std::sqrt(2.0)));
    Vec g = obj.subgradient({0.0, 3.0});
    CHECK(g[0] == -1.0);
    CHECK(g[1] == 1.0);
    CHECK(obj.subgradient({1.0, 5.0})[0] == 0.0);  // component at its shift
}

TEST_CASE("quadratic objective is flagged as unbounded") {
    auto obj = make_quadratic({1.0});
    CHECK(obj.value({3.0}) == 4.0);
    CHECK(obj.subgradient({3.0})[0] == 4.0);
    CHECK_FALSE(obj.globally_bounded);
    auto suite = make_suite({make_quadratic({1.0}), make_quadratic({-1.0})});
    CHECK_FALSE(suite.bounded());
    CHECK_FALSE(suite.optimum.has_value());
}

TEST_CASE("suite construction validates shape and sets the subgradient ceiling") {
    CHECK_THROWS_AS(make_suite({}), std::invalid_argument);
    CHECK_THROWS_AS(make_suite({make_abs_shift({0.0}), make_abs_shift({0.0, 0.0})}),
                    std::invalid_argument);
    auto suite = make_suite({make_abs_shift({0.0}), make_max_affine({{{2.0}, 0.0}, {{-2.0}, 0.0}})});
    CHECK(suite.n() == 2);
    CHECK(suite.m() == 1);
    CHECK(suite.L == 2.0);
    CHECK(suite.bounded());
}

TEST_CASE("eval_sum adds objective values in index order") {
    auto suite = make_suite({make_abs_shift({0.0}), make_abs_shift({1.0})});
    CHECK(eval_sum(suite, {0.5}) == 1.0);
    CHECK(eval_sum(suite, {0.0}) == 1.0);
    CHECK(eval_sum(suite, {2.0}) == 3.0);

    SplitMix64 rng(7);
    for (int t = 0; t < 50; ++t) {
        Vec x{rng.uniform(-4.0, 4.0)};
        double manual = suite.objectives[0].value(x);
        manual += suite.objectives[1].value(x);
        CHECK(eval_sum(suite, x) == manual);
    }
}

TEST_CASE("distance oracle for one-dimensional piecewise suites") {
    // Both terms centered at the origin: unique minimizer 0.
    auto twin = make_suite({make_abs_shift({0.0}), make_abs_shift({0.0})});
    REQUIRE(twin.optimum.has_value());
    CHECK(twin.optimum->f_star == 0.0);
    CHECK(dist_to_optimum(twin, {3.0}) == 3.0);
    CHECK(dist_to_optimum(twin, {-0.25}) == 0.25);

    // |x| + |x-1| is flat at 1 on [0,1]; distance is to the interval.
    auto flat = make_suite({make_abs_shift({0.0}), make_abs_shift({1.0})});
    REQUIRE(flat.optimum.has_value());
    CHECK(flat.optimum->f_star == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(dist_to_optimum(flat, {0.5}) == 0.0);
    CHECK(dist_to_optimum(flat, {2.0}) == doctest::Approx(1.0));
    CHECK(dist_to_optimum(flat, {-0.5}) == doctest::Approx(0.5));
    double gm = oracle::grid_min_1d([&](double x) { return eval_sum(flat, {x}); }, -3.0, 3.0, 6000);
    CHECK(flat.optimum->f_star == doctest::Approx(gm).epsilon(1e-6));
}

TEST_CASE("distance oracle for shifted l1 suites is a box") {
    auto suite = make_suite({make_abs_shift({0.0, 0.0}), make_abs_shift({1.0, 2.0})});
    REQUIRE(suite.optimum.has_value());
    CHECK(suite.optimum->f_star == doctest::Approx(3.0).epsilon(1e-15));
    // Minimizers form [0,1] x [0,2].
    CHECK(dist_to_optimum(suite, {0.5, 1.0}) == 0.0);
    CHECK(dist_to_optimum(suite, {2.0, 3.0}) == doctest::Approx(std::sqrt(2.0)));
    CHECK(dist_to_optimum(suite, {-1.0, 1.0}) == doctest::Approx(1.0));
    double gm = oracle::grid_min_2d(
        [&](double x, double y) { return eval_sum(suite, {x, y}); }, -3.0, 4.0, 700);
    CHECK(suite.optimum->f_star == doctest::Approx(gm).epsilon(1e-4));
}

TEST_CASE("one-dimensional scan detects unbounded-below suites") {
    // Sum slope is -1 to the right of every kink: no minimum.
    auto suite = make_suite({make_max_affine({{{-2.0}, 0.0}}), make_abs_shift({0.0})});
    CHECK_FALSE(suite.optimum.has_value());
    CHECK_THROWS_AS(dist_to_optimum(suite, {0.0}), UnsupportedQuery);
}

TEST_CASE("one-dimensional scan keeps flat rays in the minimizer set") {
    // -x + |x| is 0 on [0, inf) and positive left of 0.
    auto suite = make_suite({make_max_affine({{{-1.0}, 0.0}}), make_abs_shift({0.0})});
    REQUIRE(suite.optimum.has_value());
    CHECK(suite.optimum->f_star == 0.0);
    CHECK(dist_to_optimum(suite, {5.0}) == 0.0);
    CHECK(dist_to_optimum(suite, {-2.0}) == 2.0);
}

TEST_CASE("suites without recognized structure have no distance oracle") {
    auto g1 = make_max_affine({{{1.0, 0.0}, 0.0}, {{-1.0, 0.5}, 0.0}, {{0.0, -1.0}, 0.0}});
    auto g2 = make_max_affine({{{0.5, 0.5}, 0.0}, {{-0.5, -0.5}, 0.0}});
    auto suite = make_suite({g1, g2});
    CHECK(suite.bounded());
    CHECK_FALSE(suite.optimum.has_value());
    CHECK_THROWS_AS(dist_to_optimum(suite, {0.0, 0.0}), UnsupportedQuery);
}

TEST_CASE("explicitly supplied optimum oracle wins") {
    OptimumInfo info;
    info.f_star = 7.0;
    info.distance = [](const Vec& y) { return std::abs(y[0] - 2.0); };
    auto suite = make_suite({make_abs_shift({2.0})}, info);
    REQUIRE(suite.optimum.has_value());
    CHECK(suite.optimum->f_star == 7.0);
    CHECK(dist_to_optimum(suite, {5.0}) == 3.0);
}

TEST_CASE("every selector output is a genuine subgradient within the ceiling") {
    std::vector<ConvexObjective> objs;
    objs.push_back(make_abs_shift({0.3, -2.0, 1.0}));
    objs.push_back(make_max_affine({{{1.0, 0.0, 0.0}, 0.0},
                                    {{-0.5, 2.0, 0.0}, 1.0},
                                    {{0.0, -1.0, 1.5}, -2.0}}));
    objs.push_back(make_quadratic({0.0, 0.0, 0.0}));

    SplitMix64 rng(0x5eedULL);
    auto probes = oracle::random_probes(rng, 3, 40, -10.0, 10.0);
    for (const auto& obj : objs) {
        for (int t = 0; t < 1000; ++t) {
            Vec x{rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0)};
            CHECK(oracle::supports_from_below(obj, x, probes));
            if (obj.globally_bounded)
                CHECK(norm2(obj.subgradient(x)) <= obj.subgradient_bound + 1e-12);
        }
    }
}

TEST_CASE("subgradient_at validates dimensions") {
    auto obj = make_abs_shift({0.0, 0.0});
    CHECK_THROWS_AS(subgradient_at(obj, {1.0}), std::invalid_argument);
    Vec g = subgradient_at(obj, {1.0, -1.0});
    CHECK(g[0] == 1.0);
    CHECK(g[1] == -1.0);
}
