#include <doctest.h>

#include <sstream>
#include <string>

#include "qcs/config.hpp"

using namespace qcs;

namespace {

ScenarioConfig parse(const std::string& text, std::optional<Scenario> expected = std::nullopt) {
    std::stringstream in(text);
    return parse_scenario_config(in, expected);
}

const char* kMinimalRamsey =
    "scenario = ramsey\n"
    "seed = 42\n"
    "[clock]\n"
    "detuning = 31.4\n"
    "[ramsey]\n"
    "t_max = 1.0\n";

std::string error_of(const std::string& text, std::optional<Scenario> expected = std::nullopt) {
    try {
        parse(text, expected);
        return "";
    } catch (const ConfigError& e) {
        return e.what();
    }
}

} // namespace

TEST_CASE("a minimal config parses with defaults materialized") {
    const ScenarioConfig cfg = parse(kMinimalRamsey);
    CHECK(cfg.scenario == Scenario::Ramsey);
    CHECK(cfg.seed == 42);
    CHECK(cfg.nu0 == kCesiumClockHz);
    CHECK(cfg.detuning == 31.4);
    CHECK(cfg.channel.eta_a == 1.0);
    CHECK(cfg.ramsey.points == 100);
    CHECK(cfg.output.table == "ramsey_table.txt");
    CHECK(cfg.output.summary == "ramsey_summary.txt");
}

TEST_CASE("normalization is canonical and idempotent") {
    const ScenarioConfig cfg = parse(kMinimalRamsey);
    std::string normalized;
    for (const std::string& line : cfg.normalized_lines())
        normalized += line + "\n";

    const ScenarioConfig reparsed = parse(normalized);
    std::string second;
    for (const std::string& line : reparsed.normalized_lines())
        second += line + "\n";
    CHECK(second == normalized);
}

TEST_CASE("domain violations name the key, value and bound") {
    const std::string text = std::string(kMinimalRamsey) + "[channel]\neta_a = 1.2\n";
    const std::string err = error_of(text);
    CHECK(err.find("channel.eta_a") != std::string::npos);
    CHECK(err.find("1.2") != std::string::npos);
    CHECK(err.find("[0, 1]") != std::string::npos);
    CHECK(err.find("line 8") != std::string::npos);
}

TEST_CASE("the seed is mandatory") {
    const std::string err = error_of("scenario = ramsey\n[ramsey]\nt_max = 1\n");
    CHECK(err.find("seed") != std::string::npos);
}

TEST_CASE("unknown keys are rejected with their line number") {
    const std::string err = error_of(std::string(kMinimalRamsey) + "typo_key = 3\n");
    CHECK(err.find("unknown key 'ramsey.typo_key'") != std::string::npos);
    CHECK(err.find("line 7") != std::string::npos);
}

TEST_CASE("sections of other scenarios are rejected") {
    const std::string err = error_of(std::string(kMinimalRamsey) + "[compare]\npairs = 10\n");
    CHECK(err.find("compare.pairs") != std::string::npos);
}

TEST_CASE("duplicate keys are rejected") {
    const std::string err =
        error_of(std::string(kMinimalRamsey) + "[clock]\ndetuning = 1\n");
    CHECK(err.find("duplicate key 'clock.detuning'") != std::string::npos);
}

TEST_CASE("the file scenario must match the requested subcommand") {
    CHECK(error_of(kMinimalRamsey, Scenario::Compare).find("conflicts") != std::string::npos);
    CHECK_NOTHROW(parse(kMinimalRamsey, Scenario::Ramsey));

    // Subcommand alone is enough; the scenario key may be omitted.
    const ScenarioConfig cfg = parse("seed = 1\n[clock]\ndetuning = 2\n[ramsey]\nt_max = 1\n",
                                     Scenario::Ramsey);
    CHECK(cfg.scenario == Scenario::Ramsey);
}

TEST_CASE("malformed values and keywords are diagnosed") {
    CHECK(error_of(std::string(kMinimalRamsey) + "[channel]\neta_b = fast\n")
              .find("expected a number") != std::string::npos);
    CHECK(error_of(std::string(kMinimalRamsey) + "[channel]\nherald = maybe\n")
              .find("expected one of fluorescence|none") != std::string::npos);
    CHECK(error_of("scenario = warp\nseed = 1\n").find("expected ramsey|distribute") !=
          std::string::npos);
    CHECK(error_of("seed = 1\nscenario = ramsey\nbroken line\n[ramsey]\nt_max = 1\n")
              .find("key = value") != std::string::npos);
}

TEST_CASE("compare configs require a positive detuning and sane delta") {
    const char* base =
        "scenario = compare\n"
        "seed = 7\n"
        "[compare]\n"
        "pairs = 1000\n"
        "n_periods = 10\n";
    CHECK(error_of(base).find("detuning must be positive") != std::string::npos);
    CHECK(error_of(std::string(base) + "delta = -2\n[clock]\ndetuning = 5\n")
              .find("must be > -1") != std::string::npos);

    const ScenarioConfig ok = parse(std::string(base) + "[clock]\ndetuning = 31.4\n");
    CHECK(ok.compare.n_periods == 10);
    CHECK(ok.bob_clock().detuning() == ok.clock().detuning());
}

TEST_CASE("the injected offset shifts only Bob's local oscillator") {
    const ScenarioConfig cfg = parse(
        "scenario = compare\nseed = 7\n[clock]\ndetuning = 10\n"
        "[compare]\npairs = 100\nn_periods = 5\ndelta = 0.001\n");
    CHECK(cfg.clock().detuning() == 10.0);
    CHECK(cfg.bob_clock().detuning() == doctest::Approx(10.01).epsilon(1e-12));
}
