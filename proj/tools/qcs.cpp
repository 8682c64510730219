// Command-line front end: one subcommand per scenario, a config file as the
// positional argument, and --seed / --out overrides.
//
// Exit codes: 0 success, 1 usage, 2 config error, 3 degenerate run,
// 4 fit failure, 5 I/O error.
#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qcs/config.hpp"
#include "qcs/scenarios.hpp"

namespace {

struct Request {
    qcs::Scenario scenario;
    std::string config_path;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qcs - desk-scale simulator of entanglement-based clock synchronisation"};
    app.require_subcommand(1);

    std::optional<std::uint64_t> seed_override;
    std::optional<std::string> out_prefix;
    app.add_option("--seed", seed_override, "override the config seed")->group("overrides");
    app.add_option("--out", out_prefix,
                   "override output paths to <prefix>_table.txt / <prefix>_summary.txt")
        ->group("overrides");

    std::optional<Request> request;
    const std::pair<const char*, qcs::Scenario> scenarios[] = {
        {"ramsey", qcs::Scenario::Ramsey},   {"distribute", qcs::Scenario::Distribute},
        {"sync", qcs::Scenario::Sync},       {"compare", qcs::Scenario::Compare},
        {"ghz", qcs::Scenario::Ghz},
    };
    for (const auto& [name, scenario] : scenarios) {
        CLI::App* sub = app.add_subcommand(
            name, std::string("run the ") + name + " scenario from a config file");
        auto path = std::make_shared<std::string>();
        sub->add_option("config", *path, "scenario config file")->required();
        sub->callback([&request, scenario, path] { request = Request{scenario, *path}; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? qcs::kExitOk : qcs::kExitUsage;
    }

    try {
        qcs::ScenarioConfig config =
            qcs::load_scenario_config(request->config_path, request->scenario);
        if (seed_override)
            config.seed = *seed_override;
        if (out_prefix) {
            config.output.table = *out_prefix + "_table.txt";
            config.output.summary = *out_prefix + "_summary.txt";
        }
        const qcs::ScenarioOutcome outcome = qcs::run_scenario(config);
        if (outcome.exit_code == qcs::kExitOk)
            std::printf("%s\n", outcome.message.c_str());
        else
            std::fprintf(stderr, "error: %s\n", outcome.message.c_str());
        return outcome.exit_code;
    } catch (const qcs::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return qcs::kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return qcs::kExitUsage;
    }
}
