#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "dsm/network.hpp"
#include "dsm/objectives.hpp"
#include "dsm/quantized.hpp"

namespace dsm {

/// Invalid experiment input; carries the offending field name so the CLI can
/// point at it.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& detail)
        : std::runtime_error("config field '" + field + "': " + detail), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct MaxAffineEntry {
    std::vector<AffinePiece> pieces;
};
struct AbsShiftEntry {
    Vec shift;
};
using ObjectiveEntry = std::variant<MaxAffineEntry, AbsShiftEntry>;

struct RandomInit {};
struct ExplicitInit {
    std::vector<Vec> x;        // real-valued runs
    std::vector<GridVec> units;  // quantized runs
};
using InitSpec = std::variant<RandomInit, ExplicitInit>;

enum class Mode { Run, Verify };

struct ExperimentConfig {
    int n = 0;
    int m = 0;
    double alpha = 0.0;
    std::int64_t k_max = 0;
    std::uint64_t seed = 0;
    Mode mode = Mode::Run;
    std::optional<double> quantizer;  // finite Q, infinity for "inf", empty when absent
    ScheduleSpec schedule;
    std::vector<ObjectiveEntry> objectives;
    InitSpec init;

    bool quantized() const;
};

/// Parses the key/value experiment format (see README for the grammar).
/// Throws ConfigError naming the offending field.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace dsm
