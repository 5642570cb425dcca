#pragma once

#include <cstdint>
#include <vector>

#include "dsm/linalg.hpp"
#include "dsm/network.hpp"

namespace dsm {

/// Sum of squared deviations from the mean; the Lyapunov quantity for the
/// averaging dynamics. Computed in two passes with fixed index order.
double disagreement(const Vec& z);

/// One synchronous averaging step z' = A z.
Vec step_average(const Vec& z, const Matrix& A);

/// Contraction factor 1 - eta/(2 n^2) that the disagreement must obey across
/// every connectivity window.
double disagreement_contraction_factor(int n, double eta);

/// Bound relating disagreement at two times: factor^(ceil((k-s+1)/B) - 2).
double disagreement_decay_bound(int n, double eta, int B, std::int64_t k, std::int64_t s);

struct DecayReport {
    enum class Clause { Monotonic, WindowContraction, AveragePreserved };
    struct Violation {
        Clause clause;
        std::int64_t k = 0;
        double lhs = 0.0, rhs = 0.0;
    };
    std::vector<Violation> violations;
    std::vector<double> values;  // disagreement per step, index k
    bool ok() const { return violations.empty(); }
};

/// Runs the averaging dynamics for `horizon` steps and checks that the
/// disagreement never increases (slack 1e-12), contracts by the window
/// factor across every full window, and that the mean never drifts beyond
/// 1e-9.
DecayReport verify_disagreement_decay(const WeightSchedule& schedule, const Vec& z0,
                                      std::int64_t horizon);

}  // namespace dsm
