#pragma once

#include <cstdint>
#include <vector>

#include "dsm/dynamics.hpp"
#include "dsm/linalg.hpp"
#include "dsm/network.hpp"
#include "dsm/objectives.hpp"

namespace dsm {

/// Estimates on the quantized grid are stored as integer multiples of 1/Q,
/// so the grid invariant holds by construction.
using GridVec = std::vector<long long>;

struct QuantizerSpec {
    long long Q = 1;
    int m = 0;
};

Vec grid_to_real(const GridVec& u, long long Q);

/// Rounds each component down to the largest grid point whose double
/// representation does not exceed it. Re-quantizing a stored grid value is
/// the identity.
GridVec quantize(const Vec& v, const QuantizerSpec& spec);

/// Full record of a quantized run. e[k] holds the rounding errors produced
/// by the step into time k (e[0] is empty).
struct QuantizedRun {
    int n = 0, m = 0;
    long long Q = 1;
    double alpha = 0.0;
    std::vector<std::vector<GridVec>> u;   // k = 0..k_max
    std::vector<std::vector<Vec>> d;       // k = 0..k_max-1
    std::vector<std::vector<Vec>> e;       // k = 1..k_max
    std::vector<std::vector<Vec>> prefix;  // prefix sums of real estimates

    std::int64_t k_max() const { return static_cast<std::int64_t>(u.size()) - 1; }
    Vec estimate(std::int64_t k, int i) const;
    Vec average(std::int64_t k, int i) const;  // running mean of estimates, k >= 1
    Vec initial_mean() const;
};

/// One synchronous quantized step: mix in grid units, take the subgradient
/// step, floor back to the grid. The mixed value stays in grid units so the
/// floor and the rounding error are exact; the error always lands in
/// [0, 1/Q).
std::pair<std::vector<GridVec>, std::vector<Vec>> step_quantized(
    const std::vector<GridVec>& u, const Matrix& A, const ObjectiveSuite& suite, double alpha,
    const QuantizerSpec& spec, std::vector<Vec>* d_out = nullptr);

QuantizedRun run_quantized(const WeightSchedule& schedule, const ObjectiveSuite& suite,
                           const std::vector<GridVec>& u0, double alpha, const QuantizerSpec& spec,
                           std::int64_t k_max);

/// The centralized companion sequence: starts at the mean of the initial
/// estimates and absorbs the mean subgradient and rounding-error inputs of
/// every step. Tracks what a single fictitious agent holding the average
/// would do.
struct CentralizedTrace {
    double alpha = 0.0;
    int n = 0, m = 0;
    std::vector<Vec> y;       // k = 0..k_max
    std::vector<Vec> prefix;  // prefix[k] = sum of y(h), h < k

    Vec average(std::int64_t k) const;  // (1/k) * prefix, k >= 1
};

CentralizedTrace centralized_sequence(const QuantizedRun& run);

/// Same recursion driven by a real-valued trace (no rounding errors); used
/// to compare the real method against the centralized sequence.
CentralizedTrace centralized_sequence(const RunTrace& trace);

/// Bound on the distance between any agent's estimate and the centralized
/// sequence: 2 (alpha L + sqrt(m)/Q) (1 + n B / (beta (1 - beta))).
/// Q may be infinity, which drops the grid term.
double deviation_bound(int n, int B, double eta, double alpha, double L, int m, double Q);

struct DeviationReport {
    struct Violation {
        std::int64_t k = 0;
        int i = 0;
        double value = 0.0, bound = 0.0;
    };
    std::vector<Violation> violations;
    double bound = 0.0;
    bool ok() const { return violations.empty(); }
};

/// Checks |x_i(k) - y(k)| <= deviation_bound for every agent and step
/// (slack 1e-9). Requires initial norms at most alpha L (slack 1e-12). The
/// second overload applies the infinite-resolution bound to a real run.
DeviationReport verify_deviation_bound(const QuantizedRun& run, const CentralizedTrace& central,
                                       int B, double eta, double L);
DeviationReport verify_deviation_bound(const RunTrace& trace, const CentralizedTrace& central,
                                       int B, double eta, double L);

/// Constants of the quantized gap bound: c1 = (alpha L + sqrt(m)/Q) (1 +
/// n B / (beta (1 - beta))), c = 1 + 8 n c1 / (alpha L). At Q = infinity the
/// grid term vanishes and c reduces exactly to the real-valued constant.
struct QuantGapConstants {
    double c1 = 0.0;
    double c = 0.0;
};

QuantGapConstants quant_gap_constants(int n, int B, double eta, double alpha, double L, int m,
                                      double Q);

/// Gap bound for the centralized averages: n dist0^2 / (2 alpha k) +
/// alpha L^2 c / 2.
double centralized_gap_bound(const QuantGapConstants& qc, int n, double alpha, double L,
                             double dist0, std::int64_t k);

/// Gap bound for per-agent averages of quantized estimates:
/// n dist0^2 / (2 alpha k) + alpha L^2 c / 2 + 2 n L c1.
double quant_gap_bound(const QuantGapConstants& qc, int n, double alpha, double L, double dist0,
                       std::int64_t k);

struct QuantGapReport {
    struct Violation {
        enum class Kind { Centralized, Agent };
        Kind kind;
        std::int64_t k = 0;
        int i = 0;  // -1 for centralized violations
        double value = 0.0, bound = 0.0;
    };
    std::vector<Violation> violations;
    double f_star = 0.0;
    double dist0 = 0.0;
    bool ok() const { return violations.empty(); }
};

/// Checks both gap bounds over an existing run: the centralized averages
/// against the centralized bound and every agent's running average against
/// the per-agent bound (slack 1e-9).
QuantGapReport check_quant_gap_bound(const ObjectiveSuite& suite, const QuantizedRun& run,
                                     const CentralizedTrace& central, int B, double eta);

/// Runs and then checks. Requires the optimum oracle, bounded subgradients,
/// and initial norms at most alpha L (slack 1e-12).
QuantGapReport verify_quant_gap_bound(const WeightSchedule& schedule, const ObjectiveSuite& suite,
                                      const std::vector<GridVec>& u0, double alpha,
                                      const QuantizerSpec& spec, std::int64_t k_max);

/// Every recorded rounding-error component must lie in [0, 1/Q]; returns the
/// offending (k, i, c) triples.
struct ErrorRangeReport {
    struct Violation {
        std::int64_t k = 0;
        int i = 0, c = 0;
        double value = 0.0;
    };
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

ErrorRangeReport check_error_range(const QuantizedRun& run);

}  // namespace dsm
