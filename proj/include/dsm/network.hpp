#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dsm/linalg.hpp"

namespace dsm {

/// Simple undirected graph on nodes 0..n-1, edges stored with i < j.
struct Graph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;
};

Graph normalize_graph(int n, std::vector<std::pair<int, int>> edges);
bool is_connected(const Graph& g);

/// Checks the mixing-matrix contract: rows and columns sum to 1 (within
/// 1e-9), diagonal strictly positive, and every positive entry at least the
/// declared floor eta (within 1e-12, absorbing construction rounding).
struct MixingReport {
    enum class Clause { RowSum, ColSum, Diagonal, EtaFloor };
    struct Violation {
        Clause clause;
        int i = 0, j = 0;
        double value = 0.0;
    };
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    std::string describe() const;
};

MixingReport validate_mixing_matrix(const Matrix& A, double eta);

/// Metropolis weights: a_ij = 1/(1 + max(deg_i, deg_j)) on each edge, the
/// diagonal takes the slack. Symmetric, so rows and columns both sum to 1,
/// and every positive entry is at least 1/n.
Matrix metropolis_from_graph(const Graph& g);

struct StaticSpec {
    Graph graph;
};
struct CycleSpec {
    std::vector<Graph> phases;
};
struct RandomConnectedSpec {
    int n = 0;
    double p = 0.0;
    int window = 1;
};
struct MatrixSpec {
    std::vector<Matrix> matrices;
    double eta = 0.0;
    int window = 1;
};
using ScheduleSpec = std::variant<StaticSpec, CycleSpec, RandomConnectedSpec, MatrixSpec>;

/// Deterministic time-indexed sequence of mixing matrices, with the declared
/// entry floor eta and connectivity window B used by every bound.
class WeightSchedule {
public:
    WeightSchedule() = default;
    WeightSchedule(int n, double eta, int window, std::function<Matrix(std::int64_t)> gen)
        : n_(n), eta_(eta), window_(window), gen_(std::move(gen)) {}

    int n() const { return n_; }
    double eta() const { return eta_; }
    int window() const { return window_; }
    Matrix at(std::int64_t k) const { return gen_(k); }

private:
    int n_ = 0;
    double eta_ = 0.0;
    int window_ = 1;
    std::function<Matrix(std::int64_t)> gen_;
};

/// Builds a schedule from a spec. Static and cycle specs use Metropolis
/// weights with eta = 1/n; the random spec plants a fixed ring every
/// window-th step so every window stays connected; the matrix spec replays
/// explicit matrices round-robin with a caller-declared eta and window.
/// Specs whose window cannot cover a connected union are rejected here.
WeightSchedule make_schedule(const ScheduleSpec& spec, std::uint64_t seed);

/// Windowed connectivity check over [0, horizon): for each window of length
/// B, the union of directed edges (j -> i with a_ij > 0, self-loops included)
/// must let every node reach every node.
struct ConnectivityReport {
    std::vector<std::int64_t> failing_windows;
    bool ok() const { return failing_windows.empty(); }
};

ConnectivityReport validate_connectivity(const WeightSchedule& schedule, std::int64_t horizon);

/// Product A(k) A(k-1) ... A(s), accumulated by left-multiplication from k
/// down to s in that order.
Matrix transition_matrix(const WeightSchedule& schedule, std::int64_t k, std::int64_t s);

/// Bound on |[product(k,s)]_ij - 1/n|: (1 - eta/(4 n^2)) raised to
/// ceil((k-s+1)/B) - 2. A nonpositive exponent makes the bound >= 1, which
/// holds vacuously for any stochastic product.
double transition_mixing_bound(int n, double eta, int B, std::int64_t k, std::int64_t s);

}  // namespace dsm
