#include "dsm/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace dsm {
namespace {
constexpr double kGapSlack = 1e-9;
constexpr double kNormSlack = 1e-12;
}  // namespace

Vec RunTrace::average(std::int64_t k, int i) const {
    if (k < 1 || k > k_max()) throw std::invalid_argument("RunTrace::average: k out of range");
    Vec a = prefix[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
    for (double& v : a) v /= static_cast<double>(k);
    return a;
}

Vec RunTrace::initial_mean() const {
    Vec y(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < m; ++c) y[static_cast<std::size_t>(c)] += x[0][static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
    for (double& v : y) v /= static_cast<double>(n);
    return y;
}

std::vector<Vec> step(const std::vector<Vec>& x, const Matrix& A, const ObjectiveSuite& suite,
                      double alpha, std::vector<Vec>* d_out) {
    const int n = static_cast<int>(x.size());
    if (A.rows() != n || A.cols() != n) throw std::invalid_argument("step: matrix size mismatch");
    if (n != suite.n()) throw std::invalid_argument("step: agent count mismatch");
    const int m = suite.m();
    for (const auto& xi : x)
        if (static_cast<int>(xi.size()) != m) throw std::invalid_argument("step: estimate dimension mismatch");

    std::vector<Vec> d(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        d[static_cast<std::size_t>(i)] = subgradient_at(suite.objectives[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(i)]);

    std::vector<Vec> next(static_cast<std::size_t>(n), Vec(static_cast<std::size_t>(m), 0.0));
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < m; ++c) {
            double mix = 0.0;
            for (int j = 0; j < n; ++j) mix += A(i, j) * x[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)];
            next[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] =
                mix - alpha * d[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
        }
    if (d_out) *d_out = std::move(d);
    return next;
}

RunTrace run(const WeightSchedule& schedule, const ObjectiveSuite& suite,
             const std::vector<Vec>& x0, double alpha, std::int64_t k_max) {
    if (static_cast<int>(x0.size()) != schedule.n() || schedule.n() != suite.n())
        throw std::invalid_argument("run: agent count mismatch");
    if (!(alpha > 0.0)) throw std::invalid_argument("run: stepsize must be positive");
    RunTrace trace;
    trace.n = schedule.n();
    trace.m = suite.m();
    trace.alpha = alpha;
    trace.x.push_back(x0);
    trace.prefix.push_back(std::vector<Vec>(static_cast<std::size_t>(trace.n), Vec(static_cast<std::size_t>(trace.m), 0.0)));
    for (std::int64_t k = 0; k < k_max; ++k) {
        std::vector<Vec> d;
        auto next = step(trace.x.back(), schedule.at(k), suite, alpha, &d);
        auto sums = trace.prefix.back();
        for (int i = 0; i < trace.n; ++i)
            for (int c = 0; c < trace.m; ++c)
                sums[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] +=
                    trace.x.back()[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
        trace.d.push_back(std::move(d));
        trace.x.push_back(std::move(next));
        trace.prefix.push_back(std::move(sums));
    }
    return trace;
}

std::vector<Vec> expand_via_transitions(const WeightSchedule& schedule, const RunTrace& trace,
                                        std::int64_t k, std::int64_t s) {
    if (s < 0 || s > k) throw std::invalid_argument("expand_via_transitions: need 0 <= s <= k");
    if (k >= static_cast<std::int64_t>(trace.d.size()))
        throw std::invalid_argument("expand_via_transitions: trace too short");
    const int n = trace.n;
    const int m = trace.m;
    const double alpha = trace.alpha;

    std::vector<Vec> out(static_cast<std::size_t>(n), Vec(static_cast<std::size_t>(m), 0.0));
    Matrix P = transition_matrix(schedule, k, s);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < m; ++c) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j)
                acc += P(i, j) * trace.x[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)][static_cast<std::size_t>(c)];
            out[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] = acc;
        }
    for (std::int64_t r = s; r < k; ++r) {
        Matrix Pr = transition_matrix(schedule, k, r + 1);
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < m; ++c) {
                double acc = 0.0;
                for (int j = 0; j < n; ++j)
                    acc += Pr(i, j) * trace.d[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)][static_cast<std::size_t>(c)];
                out[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] -= alpha * acc;
            }
    }
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < m; ++c)
            out[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] -=
                alpha * trace.d[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
    return out;
}

GapConstants gap_constants(int n, int B, double eta) {
    if (n < 1 || B < 1) throw std::invalid_argument("gap_constants: need n >= 1, B >= 1");
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("gap_constants: eta must lie in (0,1]");
    GapConstants gc;
    gc.beta = 1.0 - eta / (4.0 * n * n);
    gc.c1 = 1.0 + static_cast<double>(n) * static_cast<double>(B) / (gc.beta * (1.0 - gc.beta));
    gc.c = 1.0 + 8.0 * static_cast<double>(n) * gc.c1;
    return gc;
}

double gap_bound(const GapConstants& gc, int n, double alpha, double L, double dist0,
                 std::int64_t k) {
    if (k < 1) throw std::invalid_argument("gap_bound: need k >= 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("gap_bound: stepsize must be positive");
    double transient = static_cast<double>(n) * dist0 * dist0 / (2.0 * alpha * static_cast<double>(k));
    double mixing = alpha * L * L * gc.c / 2.0;
    double drift = 2.0 * alpha * static_cast<double>(n) * L * L * gc.c1;
    return transient + mixing + drift;
}

GapReport check_gap_bound(const ObjectiveSuite& suite, const RunTrace& trace,
                          const GapConstants& gc) {
    if (!suite.optimum) throw UnsupportedQuery("check_gap_bound: suite carries no optimum oracle");
    GapReport report;
    report.f_star = suite.optimum->f_star;
    report.dist0 = dist_to_optimum(suite, trace.initial_mean());
    for (std::int64_t k = 1; k <= trace.k_max(); ++k) {
        double bound = report.f_star + gap_bound(gc, trace.n, trace.alpha, suite.L, report.dist0, k);
        for (int i = 0; i < trace.n; ++i) {
            double value = eval_sum(suite, trace.average(k, i));
            if (value > bound + kGapSlack) report.violations.push_back({k, i, value, bound});
        }
    }
    return report;
}

GapReport verify_gap_bound(const WeightSchedule& schedule, const ObjectiveSuite& suite,
                           const std::vector<Vec>& x0, double alpha, std::int64_t k_max) {
    if (!suite.optimum) throw UnsupportedQuery("verify_gap_bound: suite carries no optimum oracle");
    if (!suite.bounded()) throw UnsupportedQuery("verify_gap_bound: suite has unbounded subgradients");
    for (const auto& xi : x0)
        if (norm2(xi) > alpha * suite.L + kNormSlack)
            throw std::invalid_argument("verify_gap_bound: initial estimates must satisfy |x_i(0)| <= alpha L");
    auto trace = run(schedule, suite, x0, alpha, k_max);
    auto gc = gap_constants(schedule.n(), schedule.window(), schedule.eta());
    return check_gap_bound(suite, trace, gc);
}

}  // namespace dsm
