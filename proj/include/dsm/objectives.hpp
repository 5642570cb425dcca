#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsm/linalg.hpp"

namespace dsm {

/// Raised when a query needs an oracle the suite does not carry
/// (e.g. distance to the optimal set on a suite without one).
class UnsupportedQuery : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct AffinePiece {
    Vec slope;
    double intercept = 0.0;
};

/// A convex function together with a subgradient selector. Oracles are pure
/// and safe to call concurrently. `pieces` is filled for max-affine
/// constructions and `l1_shift` for shifted-l1 ones; optimum oracles are
/// derived from these structural descriptions where possible.
struct ConvexObjective {
    int dimension = 0;
    double subgradient_bound = 0.0;
    bool globally_bounded = true;
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> subgradient;
    std::vector<AffinePiece> pieces;
    std::optional<Vec> l1_shift;
};

struct OptimumInfo {
    double f_star = 0.0;
    std::function<double(const Vec&)> distance;
};

struct ObjectiveSuite {
    std::vector<ConvexObjective> objectives;
    double L = 0.0;
    std::optional<OptimumInfo> optimum;

    int n() const { return static_cast<int>(objectives.size()); }
    int m() const { return objectives.empty() ? 0 : objectives.front().dimension; }
    bool bounded() const;
};

/// f(x) = max_p (a_p . x + b_p). The subgradient selector prefers the zero
/// vector when the active slopes allow it and otherwise returns the slope of
/// the lowest-index active piece, so traces are deterministic.
ConvexObjective make_max_affine(std::vector<AffinePiece> pieces);

/// f(x) = sum_c |x_c - shift_c|; per-component sign subgradient, zero at ties.
ConvexObjective make_abs_shift(Vec shift);

/// f(x) = ||x - center||^2. Demo objective only: its subgradient is unbounded,
/// so the suite is excluded from bound verification.
ConvexObjective make_quadratic(Vec center);

/// Builds the suite, sets L, and attaches a closed-form optimum oracle when
/// the structure admits one (a box for all-l1 suites, an interval scan for
/// one-dimensional piecewise-linear suites). Otherwise `optimum` stays empty.
ObjectiveSuite make_suite(std::vector<ConvexObjective> objectives);
ObjectiveSuite make_suite(std::vector<ConvexObjective> objectives, OptimumInfo optimum);

double eval_sum(const ObjectiveSuite& suite, const Vec& x);
Vec subgradient_at(const ConvexObjective& obj, const Vec& x);
double dist_to_optimum(const ObjectiveSuite& suite, const Vec& y);

}  // namespace dsm
