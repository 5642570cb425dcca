#pragma once

#include <cstdint>
#include <vector>

#include "dsm/linalg.hpp"
#include "dsm/network.hpp"
#include "dsm/objectives.hpp"

namespace dsm {

/// Full record of a real-valued run: estimates x[k][i], the subgradients
/// d[k][i] consumed by step k, and prefix sums of estimates so running
/// averages come out as a single division.
struct RunTrace {
    int n = 0, m = 0;
    double alpha = 0.0;
    std::vector<std::vector<Vec>> x;       // k = 0..k_max
    std::vector<std::vector<Vec>> d;       // k = 0..k_max-1
    std::vector<std::vector<Vec>> prefix;  // prefix[k][i] = sum of x[h][i], h < k

    std::int64_t k_max() const { return static_cast<std::int64_t>(x.size()) - 1; }
    Vec average(std::int64_t k, int i) const;  // (1/k) * prefix, k >= 1
    Vec initial_mean() const;                  // componentwise mean over agents at k = 0
};

/// One synchronous step: every agent mixes the neighbors' current estimates
/// and takes a subgradient step on its own objective. When `d_out` is given
/// the consumed subgradients are stored there.
std::vector<Vec> step(const std::vector<Vec>& x, const Matrix& A, const ObjectiveSuite& suite,
                      double alpha, std::vector<Vec>* d_out = nullptr);

RunTrace run(const WeightSchedule& schedule, const ObjectiveSuite& suite,
             const std::vector<Vec>& x0, double alpha, std::int64_t k_max);

/// Recomputes x(k+1) from the state at time s by unrolling the dynamics
/// through transition-matrix products over the recorded subgradients. Must
/// agree with the iterative trace; used as a cross-check oracle.
std::vector<Vec> expand_via_transitions(const WeightSchedule& schedule, const RunTrace& trace,
                                        std::int64_t k, std::int64_t s);

/// Closed-form constants of the optimality-gap bound:
/// beta = 1 - eta/(4 n^2), c1 = 1 + n B / (beta (1 - beta)), c = 1 + 8 n c1.
struct GapConstants {
    double beta = 0.0;
    double c1 = 0.0;
    double c = 0.0;
};

GapConstants gap_constants(int n, int B, double eta);

/// Gap part of the objective bound at step k (callers add f*):
/// n dist0^2 / (2 alpha k) + alpha L^2 c / 2 + 2 alpha n L^2 c1.
double gap_bound(const GapConstants& gc, int n, double alpha, double L, double dist0,
                 std::int64_t k);

struct GapReport {
    struct Violation {
        std::int64_t k = 0;
        int i = 0;
        double value = 0.0, bound = 0.0;
    };
    std::vector<Violation> violations;
    double f_star = 0.0;
    double dist0 = 0.0;
    bool ok() const { return violations.empty(); }
};

/// Checks f(average_i(k)) <= f* + gap_bound for every agent and step of an
/// existing trace (slack 1e-9).
GapReport check_gap_bound(const ObjectiveSuite& suite, const RunTrace& trace,
                          const GapConstants& gc);

/// Runs and then checks. Requires the suite's optimum oracle, globally
/// bounded subgradients, and initial norms at most alpha L (slack 1e-12).
GapReport verify_gap_bound(const WeightSchedule& schedule, const ObjectiveSuite& suite,
                           const std::vector<Vec>& x0, double alpha, std::int64_t k_max);

}  // namespace dsm
