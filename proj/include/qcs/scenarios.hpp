// Batch scenario runner: executes the configured pipeline and writes a
// per-point table plus a structured summary. Both outputs embed the seed and
// the full normalized config, so a run can be replayed byte-for-byte.
#pragma once

#include <string>

#include "qcs/config.hpp"

namespace qcs {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDegenerate = 3;
inline constexpr int kExitFit = 4;
inline constexpr int kExitIo = 5;

struct ScenarioOutcome {
    int exit_code = kExitOk;
    std::string message;
};

// Never throws; domain failures are mapped onto the documented exit codes.
ScenarioOutcome run_scenario(const ScenarioConfig& config);

} // namespace qcs
