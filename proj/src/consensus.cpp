#include "dsm/consensus.hpp"

#include <cmath>
#include <stdexcept>

namespace dsm {
namespace {
constexpr double kSlack = 1e-12;
constexpr double kMeanTol = 1e-9;
}  // namespace

double disagreement(const Vec& z) {
    double mu = mean(z);
    double s = 0.0;
    for (double v : z) {
        double d = v - mu;
        s += d * d;
    }
    return s;
}

Vec step_average(const Vec& z, const Matrix& A) { return matvec(A, z); }

double disagreement_contraction_factor(int n, double eta) {
    if (n < 1) throw std::invalid_argument("disagreement_contraction_factor: need n >= 1");
    return 1.0 - eta / (2.0 * n * n);
}

double disagreement_decay_bound(int n, double eta, int B, std::int64_t k, std::int64_t s) {
    if (k < s) throw std::invalid_argument("disagreement_decay_bound: need k >= s");
    std::int64_t exponent = (k - s + 1 + B - 1) / B - 2;
    return std::pow(disagreement_contraction_factor(n, eta), static_cast<double>(exponent));
}

DecayReport verify_disagreement_decay(const WeightSchedule& schedule, const Vec& z0,
                                      std::int64_t horizon) {
    if (static_cast<int>(z0.size()) != schedule.n())
        throw std::invalid_argument("verify_disagreement_decay: initial vector length mismatch");
    DecayReport report;
    const int B = schedule.window();
    const double factor = disagreement_contraction_factor(schedule.n(), schedule.eta());
    const double mean0 = mean(z0);

    Vec z = z0;
    report.values.push_back(disagreement(z));
    for (std::int64_t k = 0; k < horizon; ++k) {
        z = step_average(z, schedule.at(k));
        double v = disagreement(z);
        if (v > report.values.back() + kSlack)
            report.violations.push_back({DecayReport::Clause::Monotonic, k + 1, v, report.values.back()});
        if (std::fabs(mean(z) - mean0) > kMeanTol)
            report.violations.push_back({DecayReport::Clause::AveragePreserved, k + 1, mean(z), mean0});
        report.values.push_back(v);
    }
    for (std::int64_t w = 1; w * B < static_cast<std::int64_t>(report.values.size()); ++w) {
        double lhs = report.values[static_cast<std::size_t>(w * B)];
        double rhs = factor * report.values[static_cast<std::size_t>((w - 1) * B)];
        if (lhs > rhs + kSlack)
            report.violations.push_back({DecayReport::Clause::WindowContraction, w * B, lhs, rhs});
    }
    return report;
}

}  // namespace dsm
