#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dsm/config.hpp"
#include "dsm/dynamics.hpp"
#include "dsm/network.hpp"
#include "dsm/objectives.hpp"
#include "dsm/quantized.hpp"

namespace dsm {

enum class ExitStatus : int { Ok = 0, InvalidInput = 1, Violation = 2 };

struct ExperimentResult {
    ExitStatus status = ExitStatus::Ok;
    std::string message;          // diagnostic for nonzero status
    std::int64_t violations = 0;  // bound-check violations found
    double final_gap = 0.0;       // max over agents of f(average) - f* at k_max
    double persistent_bound = 0.0;
    bool has_gap = false;
    bool has_persistent = false;
};

/// Builds the suite from the per-agent entries, assigning entry (i mod count)
/// to agent i so a short entry list can serve a larger n.
ObjectiveSuite build_suite(const ExperimentConfig& cfg);

WeightSchedule build_schedule(const ExperimentConfig& cfg);

/// Deterministic initial estimates for the config: explicit values verbatim,
/// random values drawn inside the |x| <= alpha L ball from the config seed.
std::vector<Vec> build_initial(const ExperimentConfig& cfg, const ObjectiveSuite& suite);
std::vector<GridVec> build_initial_units(const ExperimentConfig& cfg, const ObjectiveSuite& suite);

/// Runs one experiment and writes trace.csv plus summary.txt under out_dir.
/// Never throws for bad input; the status and message report what happened.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

/// Runs the config once per axis value, writing per-value artifacts under
/// out_dir/sweep_<axis>_<index> and a sweep.csv table in out_dir. Rows keep
/// the input order. The first invalid row aborts the sweep.
ExperimentResult sweep(const ExperimentConfig& cfg, const std::string& axis,
                       const std::vector<std::string>& values, const std::string& out_dir);

}  // namespace dsm
