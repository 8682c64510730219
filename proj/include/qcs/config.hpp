// Scenario configuration: flat key = value lines grouped into [sections],
// '#' comments, unknown keys rejected, every numeric parameter validated
// against its domain with a line-anchored diagnostic. Normalization
// materializes all defaults into a canonical key order.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcs/clock.hpp"
#include "qcs/compare.hpp"
#include "qcs/link.hpp"

namespace qcs {

class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "config line " + std::to_string(line) + ": " + what
                                      : "config: " + what),
          line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

enum class Scenario { Ramsey, Distribute, Sync, Compare, Ghz };

const char* scenario_name(Scenario s);
Scenario scenario_from_name(const std::string& name);

enum class DensityMode { Auto, Pure, Density };

struct RamseyParams {
    double t_max = 0.0; // required
    int points = 100;
    std::uint64_t shots = 1000;
    DensityMode density = DensityMode::Auto;
};

struct DistributeParams {
    std::uint64_t pairs = 0; // required
    double storage_gamma = 0.0;
    double storage_time = 0.0;
};

struct SyncParams {
    std::uint64_t pairs = 0; // required
    double t_max = 0.0;      // required
    int points = 20;
    double message_latency = 1.0;
    SubensembleType alice_keeps = SubensembleType::I;
    SampleMode mode = SampleMode::Sampled;
};

struct CompareParams {
    std::uint64_t pairs = 0;     // required, per ensemble
    std::uint64_t n_periods = 0; // required
    PhaseConvention convention = PhaseConvention::Periods;
    double delta = 0.0; // injected fractional offset: omega_B = omega_A (1 + delta)
    CompareBudgets budgets;
    SampleMode mode = SampleMode::Sampled;
    SubensembleType alice_keeps = SubensembleType::I;
};

struct GhzParams {
    int n = 0;          // required
    double t_max = 0.0; // required
    int points = 50;
    std::uint64_t shots = 200;
};

struct OutputParams {
    std::string table;   // default: <scenario>_table.txt
    std::string summary; // default: <scenario>_summary.txt
};

struct ScenarioConfig {
    Scenario scenario = Scenario::Ramsey;
    std::uint64_t seed = 0;

    // [clock]
    double nu0 = kCesiumClockHz;
    double detuning = 0.0;
    double b_param = 1e6;
    double gamma = 0.0;

    // [channel]
    ChannelModel channel;
    HeraldScheme herald = HeraldScheme::Fluorescence;
    PairPhase pair_phase = PairPhase::Singlet;

    // [field]
    double b_static = 0.0;

    RamseyParams ramsey;
    DistributeParams distribute;
    SyncParams sync;
    CompareParams compare;
    GhzParams ghz;
    OutputParams output;

    ClockConfig clock() const { return {nu0, detuning, b_param, gamma}; }
    // Bob's local oscillator with the injected offset applied.
    ClockConfig bob_clock() const { return {nu0, detuning * (1.0 + compare.delta), b_param, gamma}; }

    // Canonical key = value listing with all defaults materialized;
    // reparsing it reproduces this config exactly.
    std::vector<std::string> normalized_lines() const;
};

// `expected` pins the scenario chosen by the CLI subcommand; a conflicting
// `scenario` key in the file is a config error. Sections belonging to other
// scenarios are rejected.
ScenarioConfig parse_scenario_config(std::istream& in,
                                     std::optional<Scenario> expected = std::nullopt);
ScenarioConfig load_scenario_config(const std::string& path,
                                    std::optional<Scenario> expected = std::nullopt);

} // namespace qcs
