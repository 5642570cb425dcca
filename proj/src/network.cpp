#include "dsm/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "dsm/rng.hpp"

namespace dsm {
namespace {

constexpr double kSumTol = 1e-9;
constexpr double kFloorTol = 1e-12;

std::vector<int> degrees(const Graph& g) {
    std::vector<int> deg(static_cast<std::size_t>(g.n), 0);
    for (auto [i, j] : g.edges) {
        ++deg[static_cast<std::size_t>(i)];
        ++deg[static_cast<std::size_t>(j)];
    }
    return deg;
}

Graph ring_graph(int n) {
    Graph g{n, {}};
    if (n == 2) {
        g.edges.push_back({0, 1});
    } else if (n > 2) {
        for (int i = 0; i + 1 < n; ++i) g.edges.push_back({i, i + 1});
        g.edges.push_back({0, n - 1});
    }
    return g;
}

bool strongly_connected(int n, const std::vector<std::vector<int>>& out) {
    for (int start = 0; start < n; ++start) {
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        std::vector<int> stack{start};
        seen[static_cast<std::size_t>(start)] = 1;
        int count = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v : out[static_cast<std::size_t>(u)])
                if (!seen[static_cast<std::size_t>(v)]) {
                    seen[static_cast<std::size_t>(v)] = 1;
                    ++count;
                    stack.push_back(v);
                }
        }
        if (count != n) return false;
    }
    return true;
}

}  // namespace

Graph normalize_graph(int n, std::vector<std::pair<int, int>> edges) {
    if (n < 1) throw std::invalid_argument("graph: need at least one node");
    std::set<std::pair<int, int>> unique;
    for (auto [a, b] : edges) {
        if (a == b) throw std::invalid_argument("graph: self-edges are not allowed");
        if (a < 0 || b < 0 || a >= n || b >= n) throw std::invalid_argument("graph: node id out of range");
        unique.insert({std::min(a, b), std::max(a, b)});
    }
    Graph g{n, {unique.begin(), unique.end()}};
    return g;
}

bool is_connected(const Graph& g) {
    std::vector<std::vector<int>> out(static_cast<std::size_t>(g.n));
    for (int v = 0; v < g.n; ++v) out[static_cast<std::size_t>(v)].push_back(v);
    for (auto [i, j] : g.edges) {
        out[static_cast<std::size_t>(i)].push_back(j);
        out[static_cast<std::size_t>(j)].push_back(i);
    }
    return strongly_connected(g.n, out);
}

std::string MixingReport::describe() const {
    std::ostringstream os;
    for (const auto& v : violations) {
        switch (v.clause) {
            case Clause::RowSum: os << "row " << v.i << " sums to " << v.value; break;
            case Clause::ColSum: os << "column " << v.j << " sums to " << v.value; break;
            case Clause::Diagonal: os << "diagonal entry " << v.i << " is " << v.value; break;
            case Clause::EtaFloor: os << "entry (" << v.i << "," << v.j << ") = " << v.value << " is below the weight floor"; break;
        }
        os << "; ";
    }
    return os.str();
}

MixingReport validate_mixing_matrix(const Matrix& A, double eta) {
    MixingReport report;
    const int n = A.rows();
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) row += A(i, j);
        if (std::fabs(row - 1.0) > kSumTol)
            report.violations.push_back({MixingReport::Clause::RowSum, i, -1, row});
    }
    for (int j = 0; j < n; ++j) {
        double col = 0.0;
        for (int i = 0; i < n; ++i) col += A(i, j);
        if (std::fabs(col - 1.0) > kSumTol)
            report.violations.push_back({MixingReport::Clause::ColSum, -1, j, col});
    }
    for (int i = 0; i < n; ++i)
        if (!(A(i, i) > 0.0))
            report.violations.push_back({MixingReport::Clause::Diagonal, i, i, A(i, i)});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double a = A(i, j);
            if (a > 0.0 && a < eta - kFloorTol)
                report.violations.push_back({MixingReport::Clause::EtaFloor, i, j, a});
        }
    return report;
}

Matrix metropolis_from_graph(const Graph& g) {
    auto deg = degrees(g);
    Matrix A(g.n, g.n);
    for (auto [i, j] : g.edges) {
        double w = 1.0 / (1.0 + static_cast<double>(std::max(deg[static_cast<std::size_t>(i)], deg[static_cast<std::size_t>(j)])));
        A(i, j) = w;
        A(j, i) = w;
    }
    for (int i = 0; i < g.n; ++i) {
        double off = 0.0;
        for (int j = 0; j < g.n; ++j)
            if (j != i) off += A(i, j);
        A(i, i) = 1.0 - off;
    }
    return A;
}

WeightSchedule make_schedule(const ScheduleSpec& spec, std::uint64_t seed) {
    if (const auto* s = std::get_if<StaticSpec>(&spec)) {
        if (!is_connected(s->graph))
            throw std::invalid_argument("schedule: static graph must be connected for a window of 1");
        Matrix A = metropolis_from_graph(s->graph);
        int n = s->graph.n;
        return WeightSchedule(n, 1.0 / n, 1, [A](std::int64_t) { return A; });
    }
    if (const auto* s = std::get_if<CycleSpec>(&spec)) {
        if (s->phases.empty()) throw std::invalid_argument("schedule: cycle needs at least one phase");
        int n = s->phases.front().n;
        Graph unions{n, {}};
        std::vector<Matrix> mats;
        for (const auto& g : s->phases) {
            if (g.n != n) throw std::invalid_argument("schedule: cycle phases disagree on node count");
            for (auto e : g.edges) unions.edges.push_back(e);
            mats.push_back(metropolis_from_graph(g));
        }
        unions = normalize_graph(n, std::move(unions.edges));
        if (!is_connected(unions))
            throw std::invalid_argument("schedule: cycle phase union must be connected");
        int B = static_cast<int>(mats.size());
        return WeightSchedule(n, 1.0 / n, B, [mats, B](std::int64_t k) {
            return mats[static_cast<std::size_t>(k % B)];
        });
    }
    if (const auto* s = std::get_if<RandomConnectedSpec>(&spec)) {
        if (s->n < 1) throw std::invalid_argument("schedule: need at least one node");
        if (s->window < 1) throw std::invalid_argument("schedule: window must be positive");
        if (s->p < 0.0 || s->p > 1.0) throw std::invalid_argument("schedule: edge probability outside [0,1]");
        int n = s->n;
        double p = s->p;
        int B = s->window;
        Matrix anchor = metropolis_from_graph(ring_graph(n));
        return WeightSchedule(n, 1.0 / n, B, [n, p, B, anchor, seed](std::int64_t k) {
            if (k % B == 0) return anchor;
            SplitMix64 rng(mix_seed(seed, static_cast<std::uint64_t>(k)));
            Graph g{n, {}};
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    if (rng.uniform() < p) g.edges.push_back({i, j});
            return metropolis_from_graph(g);
        });
    }
    const auto& s = std::get<MatrixSpec>(spec);
    if (s.matrices.empty()) throw std::invalid_argument("schedule: matrix list is empty");
    if (s.window < 1) throw std::invalid_argument("schedule: window must be positive");
    if (!(s.eta > 0.0 && s.eta <= 1.0)) throw std::invalid_argument("schedule: eta must lie in (0,1]");
    int n = s.matrices.front().rows();
    for (const auto& A : s.matrices) {
        if (A.rows() != n || A.cols() != n)
            throw std::invalid_argument("schedule: matrices must be square and same size");
        auto report = validate_mixing_matrix(A, s.eta);
        if (!report.ok())
            throw std::invalid_argument("schedule: matrix fails mixing contract: " + report.describe());
    }
    auto mats = s.matrices;
    int period = static_cast<int>(mats.size());
    WeightSchedule sched(n, s.eta, s.window, [mats, period](std::int64_t k) {
        return mats[static_cast<std::size_t>(k % period)];
    });
    std::int64_t distinct = std::lcm<std::int64_t>(period, s.window);
    auto conn = validate_connectivity(sched, distinct);
    if (!conn.ok())
        throw std::invalid_argument("schedule: some windows of the matrix cycle are not connected");
    return sched;
}

ConnectivityReport validate_connectivity(const WeightSchedule& schedule, std::int64_t horizon) {
    ConnectivityReport report;
    const int n = schedule.n();
    const int B = schedule.window();
    for (std::int64_t w = 0; (w + 1) * B <= horizon; ++w) {
        std::vector<std::vector<int>> out(static_cast<std::size_t>(n));
        for (int v = 0; v < n; ++v) out[static_cast<std::size_t>(v)].push_back(v);
        for (std::int64_t k = w * B; k < (w + 1) * B; ++k) {
            Matrix A = schedule.at(k);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j && A(i, j) > 0.0) out[static_cast<std::size_t>(j)].push_back(i);
        }
        if (!strongly_connected(n, out)) report.failing_windows.push_back(w);
    }
    return report;
}

Matrix transition_matrix(const WeightSchedule& schedule, std::int64_t k, std::int64_t s) {
    if (k < s || s < 0) throw std::invalid_argument("transition_matrix: need k >= s >= 0");
    Matrix P = schedule.at(k);
    for (std::int64_t r = k - 1; r >= s; --r) P = matmul(P, schedule.at(r));
    return P;
}

double transition_mixing_bound(int n, double eta, int B, std::int64_t k, std::int64_t s) {
    if (k < s) throw std::invalid_argument("transition_mixing_bound: need k >= s");
    if (n < 1 || B < 1) throw std::invalid_argument("transition_mixing_bound: need n >= 1, B >= 1");
    std::int64_t len = k - s + 1;
    std::int64_t exponent = (len + B - 1) / B - 2;
    double base = 1.0 - eta / (4.0 * n * n);
    return std::pow(base, static_cast<double>(exponent));
}

}  // namespace dsm
