// Test-side oracles, deliberately written with different algorithms than the
// library so that agreement is evidence rather than tautology.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "dsm/dynamics.hpp"
#include "dsm/network.hpp"
#include "dsm/objectives.hpp"
#include "dsm/quantized.hpp"
#include "dsm/rng.hpp"

namespace oracle {

// Minimum of a scalar function over an even grid. Coarse by design: callers
// compare against analytic values with grid-sized tolerance.
inline double grid_min_1d(const std::function<double(double)>& f, double lo, double hi, int steps) {
    double best = std::numeric_limits<double>::infinity();
    for (int t = 0; t <= steps; ++t) {
        double x = lo + (hi - lo) * static_cast<double>(t) / static_cast<double>(steps);
        best = std::min(best, f(x));
    }
    return best;
}

inline double grid_min_2d(const std::function<double(double, double)>& f, double lo, double hi,
                          int steps) {
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a <= steps; ++a)
        for (int b = 0; b <= steps; ++b) {
            double x = lo + (hi - lo) * static_cast<double>(a) / static_cast<double>(steps);
            double y = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(steps);
            best = std::min(best, f(x, y));
        }
    return best;
}

// Checks f(z) >= f(x) + <g, z - x> - tol for a batch of probe points.
inline bool supports_from_below(const dsm::ConvexObjective& obj, const dsm::Vec& x,
                                const std::vector<dsm::Vec>& probes, double tol = 1e-9) {
    dsm::Vec g = obj.subgradient(x);
    double fx = obj.value(x);
    for (const auto& z : probes) {
        double lin = fx;
        for (std::size_t c = 0; c < z.size(); ++c) lin += g[c] * (z[c] - x[c]);
        if (obj.value(z) < lin - tol) return false;
    }
    return true;
}

inline std::vector<dsm::Vec> random_probes(dsm::SplitMix64& rng, int m, int count, double lo,
                                           double hi) {
    std::vector<dsm::Vec> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int t = 0; t < count; ++t) {
        dsm::Vec z(static_cast<std::size_t>(m));
        for (auto& v : z) v = rng.uniform(lo, hi);
        out.push_back(std::move(z));
    }
    return out;
}

// Spanning tree plus Bernoulli extras; always connected, never a self edge.
inline dsm::Graph random_connected_graph(int n, double extra_p, std::uint64_t seed) {
    dsm::SplitMix64 rng(seed);
    std::vector<std::pair<int, int>> edges;
    for (int v = 1; v < n; ++v) {
        int parent = v == 1 ? 0 : static_cast<int>(rng.uniform_int(0, v - 1));
        edges.emplace_back(parent, v);
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.uniform() < extra_p) edges.emplace_back(i, j);
    return dsm::normalize_graph(n, edges);
}

// Average trajectory written as its fully unrolled sum: start from the mean
// of the initial estimates and subtract every later increment in one pass.
// Recomputed from scratch at each call on purpose.
inline dsm::Vec unrolled_center(const dsm::QuantizedRun& run, std::int64_t upto) {
    const double n = static_cast<double>(run.n);
    dsm::Vec y(static_cast<std::size_t>(run.m), 0.0);
    for (int i = 0; i < run.n; ++i)
        for (int c = 0; c < run.m; ++c)
            y[static_cast<std::size_t>(c)] +=
                dsm::grid_to_real(run.u[0][static_cast<std::size_t>(i)], run.Q)[static_cast<std::size_t>(c)] / n;
    for (std::int64_t s = 1; s <= upto; ++s) {
        for (int i = 0; i < run.n; ++i)
            for (int c = 0; c < run.m; ++c)
                y[static_cast<std::size_t>(c)] -=
                    run.alpha *
                    run.d[static_cast<std::size_t>(s - 1)][static_cast<std::size_t>(i)]
                         [static_cast<std::size_t>(c)] /
                    n;
        for (int i = 0; i < run.n; ++i)
            for (int c = 0; c < run.m; ++c)
                y[static_cast<std::size_t>(c)] -=
                    run.e[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)]
                         [static_cast<std::size_t>(c)] /
                    n;
    }
    return y;
}

inline dsm::Vec mean_estimate(const dsm::QuantizedRun& run, std::int64_t k) {
    dsm::Vec y(static_cast<std::size_t>(run.m), 0.0);
    for (int i = 0; i < run.n; ++i) {
        auto xi = run.estimate(k, i);
        for (int c = 0; c < run.m; ++c)
            y[static_cast<std::size_t>(c)] += xi[static_cast<std::size_t>(c)] / static_cast<double>(run.n);
    }
    return y;
}

inline double max_abs_diff(const dsm::Vec& a, const dsm::Vec& b) {
    double worst = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) worst = std::max(worst, std::abs(a[c] - b[c]));
    return worst;
}

}  // namespace oracle
