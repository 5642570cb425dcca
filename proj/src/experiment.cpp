#include "dsm/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "dsm/consensus.hpp"
#include "dsm/rng.hpp"

namespace dsm {
namespace {

constexpr std::uint64_t kInitStream = 0x1d0f2c3b4a596877ULL;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

ConvexObjective build_objective(const ObjectiveEntry& entry) {
    if (const auto* e = std::get_if<MaxAffineEntry>(&entry)) return make_max_affine(e->pieces);
    return make_abs_shift(std::get<AbsShiftEntry>(entry).shift);
}

// Sum over agents of the squared distance to the agent mean, at one step.
template <typename EstimateAt>
double spread(int n, int m, EstimateAt&& at) {
    Vec mu(static_cast<std::size_t>(m), 0.0);
    std::vector<Vec> xs;
    xs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        xs.push_back(at(i));
        for (int c = 0; c < m; ++c) mu[static_cast<std::size_t>(c)] += xs.back()[static_cast<std::size_t>(c)];
    }
    for (double& v : mu) v /= static_cast<double>(n);
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < m; ++c) {
            double d = xs[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] - mu[static_cast<std::size_t>(c)];
            s += d * d;
        }
    return s;
}

struct TraceWriter {
    std::ofstream out;

    TraceWriter(const std::string& dir, int m) : out(dir + "/trace.csv", std::ios::binary) {
        out << "k,i";
        for (int c = 1; c <= m; ++c) out << ",x" << c;
        out << ",f_avg,bound,disagreement,max_err\n";
    }

    void row(std::int64_t k, int i, const Vec& x, const std::string& f_avg,
             const std::string& bound, double v, const std::string& max_err) {
        out << k << ',' << i + 1;
        for (double c : x) out << ',' << fmt(c);
        out << ',' << f_avg << ',' << bound << ',' << fmt(v) << ',' << max_err << '\n';
    }
};

void write_summary(const std::string& dir, const std::vector<std::pair<std::string, std::string>>& kv) {
    std::ofstream out(dir + "/summary.txt", std::ios::binary);
    for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
}

void preflight(const WeightSchedule& schedule, std::int64_t k_max) {
    for (std::int64_t k = 0; k < k_max; ++k) {
        auto report = validate_mixing_matrix(schedule.at(k), schedule.eta());
        if (!report.ok())
            throw ConfigError("schedule", "matrix at step " + std::to_string(k) +
                                              " breaks the mixing contract: " + report.describe());
    }
    std::int64_t horizon = std::max<std::int64_t>(k_max, schedule.window());
    auto conn = validate_connectivity(schedule, horizon);
    if (!conn.ok())
        throw ConfigError("schedule", "window " + std::to_string(conn.failing_windows.front()) +
                                          " of the schedule is not connected");
}

double persistent_real(const GapConstants& gc, int n, double alpha, double L) {
    return alpha * L * L * gc.c / 2.0 + 2.0 * alpha * static_cast<double>(n) * L * L * gc.c1;
}

double persistent_quant(const QuantGapConstants& qc, int n, double alpha, double L) {
    return alpha * L * L * qc.c / 2.0 + 2.0 * static_cast<double>(n) * L * qc.c1;
}

ExperimentResult run_rows_real(const ExperimentConfig& cfg, const ObjectiveSuite& suite,
                               const WeightSchedule& schedule, const std::string& out_dir) {
    ExperimentResult result;
    auto x0 = build_initial(cfg, suite);
    if (cfg.mode == Mode::Verify) {
        if (!suite.optimum) throw UnsupportedQuery("verify mode needs an optimum oracle");
        if (!suite.bounded()) throw UnsupportedQuery("verify mode needs bounded subgradients");
        for (const auto& xi : x0)
            if (norm2(xi) > cfg.alpha * suite.L + 1e-12)
                throw ConfigError("init", "verify mode needs |x_i(0)| <= alpha L");
    }
    auto trace = run(schedule, suite, x0, cfg.alpha, cfg.k_max);
    auto gc = gap_constants(schedule.n(), schedule.window(), schedule.eta());

    bool have_oracle = suite.optimum.has_value() && suite.bounded();
    double dist0 = 0.0, f_star = 0.0;
    if (have_oracle) {
        dist0 = dist_to_optimum(suite, trace.initial_mean());
        f_star = suite.optimum->f_star;
    }
    if (cfg.mode == Mode::Verify) {
        auto report = check_gap_bound(suite, trace, gc);
        result.violations = static_cast<std::int64_t>(report.violations.size());
    }

    TraceWriter writer(out_dir, cfg.m);
    for (std::int64_t k = 0; k <= trace.k_max(); ++k) {
        double v = spread(trace.n, trace.m, [&](int i) {
            return trace.x[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
        });
        std::string bound;
        if (have_oracle && k >= 1)
            bound = fmt(gap_bound(gc, trace.n, cfg.alpha, suite.L, dist0, k));
        for (int i = 0; i < trace.n; ++i) {
            std::string f_avg;
            if (k >= 1) f_avg = fmt(eval_sum(suite, trace.average(k, i)));
            writer.row(k, i, trace.x[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)],
                       f_avg, bound, v, "");
        }
    }

    std::vector<std::pair<std::string, std::string>> kv;
    kv.push_back({"mode", cfg.mode == Mode::Verify ? "verify" : "run"});
    kv.push_back({"n", std::to_string(schedule.n())});
    kv.push_back({"m", std::to_string(cfg.m)});
    kv.push_back({"alpha", fmt(cfg.alpha)});
    kv.push_back({"B", std::to_string(schedule.window())});
    kv.push_back({"eta", fmt(schedule.eta())});
    kv.push_back({"k_max", std::to_string(cfg.k_max)});
    kv.push_back({"seed", std::to_string(cfg.seed)});
    kv.push_back({"quantizer", "none"});
    kv.push_back({"L", fmt(suite.L)});
    if (suite.bounded()) {
        result.persistent_bound = persistent_real(gc, trace.n, cfg.alpha, suite.L);
        result.has_persistent = true;
        kv.push_back({"persistent_bound", fmt(result.persistent_bound)});
    }
    if (have_oracle) {
        kv.push_back({"f_star", fmt(f_star)});
        kv.push_back({"dist0", fmt(dist0)});
        double gap = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < trace.n; ++i)
            gap = std::max(gap, eval_sum(suite, trace.average(trace.k_max(), i)) - f_star);
        result.final_gap = gap;
        result.has_gap = true;
        kv.push_back({"final_gap", fmt(gap)});
        kv.push_back({"bound_final", fmt(gap_bound(gc, trace.n, cfg.alpha, suite.L, dist0, trace.k_max()))});
    }
    kv.push_back({"violations", std::to_string(result.violations)});
    write_summary(out_dir, kv);

    result.status = (cfg.mode == Mode::Verify && result.violations > 0) ? ExitStatus::Violation
                                                                        : ExitStatus::Ok;
    return result;
}

ExperimentResult run_rows_quantized(const ExperimentConfig& cfg, const ObjectiveSuite& suite,
                                    const WeightSchedule& schedule, const std::string& out_dir) {
    ExperimentResult result;
    QuantizerSpec spec{static_cast<long long>(*cfg.quantizer), cfg.m};
    auto u0 = build_initial_units(cfg, suite);
    if (cfg.mode == Mode::Verify) {
        if (!suite.optimum) throw UnsupportedQuery("verify mode needs an optimum oracle");
        if (!suite.bounded()) throw UnsupportedQuery("verify mode needs bounded subgradients");
        for (const auto& ui : u0)
            if (norm2(grid_to_real(ui, spec.Q)) > cfg.alpha * suite.L + 1e-12)
                throw ConfigError("init", "verify mode needs |x_i(0)| <= alpha L");
    }
    auto qrun = run_quantized(schedule, suite, u0, cfg.alpha, spec, cfg.k_max);
    auto central = centralized_sequence(qrun);

    bool have_oracle = suite.optimum.has_value() && suite.bounded();
    bool have_constants = cfg.alpha * suite.L > 0.0;
    double dist0 = 0.0, f_star = 0.0;
    QuantGapConstants qc;
    if (have_constants)
        qc = quant_gap_constants(schedule.n(), schedule.window(), schedule.eta(), cfg.alpha,
                                 suite.L, cfg.m, static_cast<double>(spec.Q));
    if (have_oracle) {
        dist0 = dist_to_optimum(suite, qrun.initial_mean());
        f_star = suite.optimum->f_star;
    }
    if (cfg.mode == Mode::Verify) {
        auto range = check_error_range(qrun);
        auto dev = verify_deviation_bound(qrun, central, schedule.window(), schedule.eta(), suite.L);
        auto gaps = check_quant_gap_bound(suite, qrun, central, schedule.window(), schedule.eta());
        result.violations = static_cast<std::int64_t>(range.violations.size() +
                                                      dev.violations.size() +
                                                      gaps.violations.size());
    }

    TraceWriter writer(out_dir, cfg.m);
    for (std::int64_t k = 0; k <= qrun.k_max(); ++k) {
        double v = spread(qrun.n, qrun.m, [&](int i) { return qrun.estimate(k, i); });
        std::string bound;
        if (have_oracle && have_constants && k >= 1)
            bound = fmt(quant_gap_bound(qc, qrun.n, cfg.alpha, suite.L, dist0, k));
        for (int i = 0; i < qrun.n; ++i) {
            std::string f_avg;
            if (k >= 1) f_avg = fmt(eval_sum(suite, qrun.average(k, i)));
            std::string max_err;
            if (k >= 1) {
                double me = 0.0;
                for (double e : qrun.e[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)])
                    me = std::max(me, e);
                max_err = fmt(me);
            }
            writer.row(k, i, qrun.estimate(k, i), f_avg, bound, v, max_err);
        }
    }

    std::vector<std::pair<std::string, std::string>> kv;
    kv.push_back({"mode", cfg.mode == Mode::Verify ? "verify" : "run"});
    kv.push_back({"n", std::to_string(schedule.n())});
    kv.push_back({"m", std::to_string(cfg.m)});
    kv.push_back({"alpha", fmt(cfg.alpha)});
    kv.push_back({"B", std::to_string(schedule.window())});
    kv.push_back({"eta", fmt(schedule.eta())});
    kv.push_back({"k_max", std::to_string(cfg.k_max)});
    kv.push_back({"seed", std::to_string(cfg.seed)});
    kv.push_back({"quantizer", std::to_string(spec.Q)});
    kv.push_back({"L", fmt(suite.L)});
    if (have_constants) {
        result.persistent_bound = persistent_quant(qc, qrun.n, cfg.alpha, suite.L);
        result.has_persistent = true;
        kv.push_back({"persistent_bound", fmt(result.persistent_bound)});
    }
    if (have_oracle) {
        kv.push_back({"f_star", fmt(f_star)});
        kv.push_back({"dist0", fmt(dist0)});
        double gap = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < qrun.n; ++i)
            gap = std::max(gap, eval_sum(suite, qrun.average(qrun.k_max(), i)) - f_star);
        result.final_gap = gap;
        result.has_gap = true;
        kv.push_back({"final_gap", fmt(gap)});
        if (have_constants)
            kv.push_back({"bound_final", fmt(quant_gap_bound(qc, qrun.n, cfg.alpha, suite.L, dist0, qrun.k_max()))});
    }
    kv.push_back({"violations", std::to_string(result.violations)});
    write_summary(out_dir, kv);

    result.status = (cfg.mode == Mode::Verify && result.violations > 0) ? ExitStatus::Violation
                                                                        : ExitStatus::Ok;
    return result;
}

}  // namespace

ObjectiveSuite build_suite(const ExperimentConfig& cfg) {
    std::vector<ConvexObjective> objs;
    for (int i = 0; i < cfg.n; ++i)
        objs.push_back(build_objective(cfg.objectives[static_cast<std::size_t>(i) % cfg.objectives.size()]));
    return make_suite(std::move(objs));
}

WeightSchedule build_schedule(const ExperimentConfig& cfg) {
    return make_schedule(cfg.schedule, cfg.seed);
}

std::vector<Vec> build_initial(const ExperimentConfig& cfg, const ObjectiveSuite& suite) {
    if (const auto* e = std::get_if<ExplicitInit>(&cfg.init)) {
        if (e->x.empty()) throw ConfigError("init", "explicit real-valued init needs x lines");
        return e->x;
    }
    if (!suite.bounded())
        throw ConfigError("init", "random init needs bounded subgradients; give explicit estimates");
    double radius = suite.L > 0.0 ? cfg.alpha * suite.L / std::sqrt(static_cast<double>(cfg.m)) : 0.0;
    SplitMix64 rng(mix_seed(cfg.seed, kInitStream));
    std::vector<Vec> x0(static_cast<std::size_t>(cfg.n), Vec(static_cast<std::size_t>(cfg.m), 0.0));
    for (int i = 0; i < cfg.n; ++i)
        for (int c = 0; c < cfg.m; ++c)
            x0[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] = rng.uniform(-radius, radius);
    return x0;
}

std::vector<GridVec> build_initial_units(const ExperimentConfig& cfg, const ObjectiveSuite& suite) {
    long long Q = static_cast<long long>(*cfg.quantizer);
    if (const auto* e = std::get_if<ExplicitInit>(&cfg.init)) {
        if (e->units.empty()) throw ConfigError("init", "explicit quantized init needs units lines");
        return e->units;
    }
    if (!suite.bounded())
        throw ConfigError("init", "random init needs bounded subgradients; give explicit estimates");
    double root_m = std::sqrt(static_cast<double>(cfg.m));
    long long cap = suite.L > 0.0
                        ? static_cast<long long>(std::floor(cfg.alpha * suite.L *
                                                            static_cast<double>(Q) / root_m))
                        : 0;
    while (cap > 0 && root_m * (static_cast<double>(cap) / static_cast<double>(Q)) > cfg.alpha * suite.L)
        --cap;
    SplitMix64 rng(mix_seed(cfg.seed, kInitStream));
    std::vector<GridVec> u0(static_cast<std::size_t>(cfg.n), GridVec(static_cast<std::size_t>(cfg.m), 0));
    for (int i = 0; i < cfg.n; ++i)
        for (int c = 0; c < cfg.m; ++c)
            u0[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] =
                static_cast<long long>(rng.uniform_int(0, static_cast<std::uint64_t>(2 * cap))) - cap;
    return u0;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    ExperimentResult result;
    try {
        std::filesystem::create_directories(out_dir);
        auto suite = build_suite(cfg);
        if (suite.m() != cfg.m) throw ConfigError("m", "objective dimension disagrees with m");
        auto schedule = build_schedule(cfg);
        preflight(schedule, cfg.k_max);
        if (cfg.quantized()) return run_rows_quantized(cfg, suite, schedule, out_dir);
        return run_rows_real(cfg, suite, schedule, out_dir);
    } catch (const std::exception& e) {
        result.status = ExitStatus::InvalidInput;
        result.message = e.what();
        return result;
    }
}

ExperimentResult sweep(const ExperimentConfig& cfg, const std::string& axis,
                       const std::vector<std::string>& values, const std::string& out_dir) {
    ExperimentResult overall;
    try {
        std::filesystem::create_directories(out_dir);
        if (axis != "Q" && axis != "alpha" && axis != "n" && axis != "B" && axis != "eta" &&
            axis != "k_max")
            throw ConfigError("axis", "unknown sweep axis '" + axis + "'");
        if (values.empty()) throw ConfigError("values", "sweep needs at least one value");

        std::ostringstream table;
        table << "axis,value,c1,c,persistent_bound,final_gap,violations\n";
        for (std::size_t idx = 0; idx < values.size(); ++idx) {
            ExperimentConfig row = cfg;
            const std::string& value = values[idx];
            if (axis == "Q") {
                if (value == "inf") {
                    row.quantizer = std::numeric_limits<double>::infinity();
                } else {
                    long long q = std::stoll(value);
                    if (q < 1) throw ConfigError("values", "Q must be at least 1");
                    row.quantizer = static_cast<double>(q);
                }
            } else if (axis == "alpha") {
                row.alpha = std::stod(value);
                if (!(row.alpha > 0.0)) throw ConfigError("values", "alpha must be positive");
            } else if (axis == "k_max") {
                row.k_max = std::stoll(value);
                if (row.k_max < 1) throw ConfigError("values", "k_max must be positive");
            } else if (axis == "n") {
                auto* spec = std::get_if<RandomConnectedSpec>(&row.schedule);
                if (!spec) throw ConfigError("axis", "axis n needs a random_connected schedule");
                int n = static_cast<int>(std::stoll(value));
                if (n < 1) throw ConfigError("values", "n must be positive");
                spec->n = n;
                row.n = n;
                row.init = RandomInit{};
            } else if (axis == "B") {
                int b = static_cast<int>(std::stoll(value));
                if (b < 1) throw ConfigError("values", "B must be positive");
                if (auto* spec = std::get_if<RandomConnectedSpec>(&row.schedule)) spec->window = b;
                else if (auto* mspec = std::get_if<MatrixSpec>(&row.schedule)) mspec->window = b;
                else throw ConfigError("axis", "axis B needs a random_connected or matrix schedule");
            } else {  // eta
                auto* spec = std::get_if<MatrixSpec>(&row.schedule);
                if (!spec) throw ConfigError("axis", "axis eta needs a matrix schedule");
                spec->eta = std::stod(value);
            }

            std::string row_dir = out_dir + "/sweep_" + axis + "_" + std::to_string(idx);
            auto res = run_experiment(row, row_dir);
            if (res.status == ExitStatus::InvalidInput) {
                overall.status = ExitStatus::InvalidInput;
                overall.message = "value '" + value + "': " + res.message;
                return overall;
            }
            overall.violations += res.violations;
            if (res.status == ExitStatus::Violation) overall.status = ExitStatus::Violation;

            auto suite = build_suite(row);
            auto schedule = build_schedule(row);
            std::string c1s, cs;
            if (row.alpha * suite.L > 0.0) {
                double q = row.quantizer ? *row.quantizer : std::numeric_limits<double>::infinity();
                auto qc = quant_gap_constants(schedule.n(), schedule.window(), schedule.eta(),
                                              row.alpha, suite.L, row.m, q);
                c1s = fmt(qc.c1);
                cs = fmt(qc.c);
            }
            table << axis << ',' << value << ',' << c1s << ',' << cs << ','
                  << (res.has_persistent ? fmt(res.persistent_bound) : "") << ','
                  << (res.has_gap ? fmt(res.final_gap) : "") << ',' << res.violations << '\n';
        }
        std::ofstream out(out_dir + "/sweep.csv", std::ios::binary);
        out << table.str();
        return overall;
    } catch (const std::exception& e) {
        overall.status = ExitStatus::InvalidInput;
        overall.message = e.what();
        return overall;
    }
}

}  // namespace dsm
