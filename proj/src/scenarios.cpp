#include "qcs/scenarios.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "qcs/compare.hpp"
#include "qcs/levels.hpp"
#include "qcs/protocol.hpp"
#include "qcs/textio.hpp"

namespace qcs {

namespace {

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    return out;
}

void write_header(std::ostream& out, const ScenarioConfig& cfg, const char* kind) {
    out << "# qcs " << scenario_name(cfg.scenario) << " " << kind << "\n";
    out << "# seed = " << cfg.seed << "\n";
    out << "# config:\n";
    for (const std::string& line : cfg.normalized_lines())
        out << "#   " << line << "\n";
}

struct Summary {
    explicit Summary(const ScenarioConfig& cfg) : cfg_(cfg), out_(open_output(cfg.output.summary)) {
        write_header(out_, cfg, "summary");
        out_ << "scenario = " << scenario_name(cfg.scenario) << "\n";
        out_ << "seed = " << cfg.seed << "\n";
        out_ << "[result]\n";
    }
    void add(const std::string& key, const std::string& value) {
        out_ << key << " = " << value << "\n";
    }
    void add(const std::string& key, double value) { add(key, fmt_double(value)); }
    void add(const std::string& key, std::uint64_t value) { add(key, std::to_string(value)); }

  private:
    const ScenarioConfig& cfg_;
    std::ofstream out_;
};

double closed_fringe_p1(double detuning, double gamma, double dt, bool from_plus) {
    const double v = std::exp(-gamma * dt) * std::cos(detuning * dt);
    return from_plus ? 0.5 * (1.0 - v) : 0.5 * (1.0 + v);
}

ScenarioOutcome run_ramsey(const ScenarioConfig& cfg) {
    const ClockConfig clock = cfg.clock();
    RngStream rng = RngStream(cfg.seed).substream("ramsey");
    const bool use_density = cfg.ramsey.density == DensityMode::Density ||
                             (cfg.ramsey.density == DensityMode::Auto && cfg.gamma > 0.0);

    std::ofstream table = open_output(cfg.output.table);
    write_header(table, cfg, "table");
    if (ramsey_validity_warning(clock))
        table << "# warning: detuning/b_param = " << fmt_double(ramsey_validity(clock))
              << " >= " << fmt_double(kRamseyValidityThreshold)
              << ", fringe formula is approximate\n";
    table << "# columns: time p0_exact p1_exact p1_closed ones shots p1_sampled\n";

    double max_closed_gap = 0.0;
    for (int j = 0; j < cfg.ramsey.points; ++j) {
        const double t = cfg.ramsey.t_max * j / (cfg.ramsey.points - 1);
        const RamseyProbabilities exact = ramsey_sequence(clock, t, use_density);
        const double closed =
            closed_fringe_p1(cfg.detuning, use_density ? cfg.gamma : 0.0, t, true);
        std::uint64_t ones = 0;
        for (std::uint64_t s = 0; s < cfg.ramsey.shots; ++s)
            ones += rng.bernoulli(exact.p1) ? 1 : 0;
        const double sampled = static_cast<double>(ones) / static_cast<double>(cfg.ramsey.shots);
        max_closed_gap = std::max(max_closed_gap, std::abs(exact.p1 - closed));
        table << fmt_double(t) << " " << fmt_double(exact.p0) << " " << fmt_double(exact.p1)
              << " " << fmt_double(closed) << " " << ones << " " << cfg.ramsey.shots << " "
              << fmt_double(sampled) << "\n";
    }

    Summary summary(cfg);
    summary.add("points", static_cast<std::uint64_t>(cfg.ramsey.points));
    summary.add("shots_per_point", cfg.ramsey.shots);
    summary.add("density_path", use_density ? "true" : "false");
    summary.add("validity_ratio", ramsey_validity(clock));
    summary.add("validity_warning", ramsey_validity_warning(clock) ? "true" : "false");
    summary.add("max_gap_to_closed_form", max_closed_gap);
    summary.add("clock_frequency_at_field", clock_frequency({cfg.b_static, cfg.nu0}));
    return {kExitOk, "ramsey table written to " + cfg.output.table};
}

ScenarioOutcome run_distribute(const ScenarioConfig& cfg) {
    RngStream rng = RngStream(cfg.seed).substream("link");
    Ensemble ensemble =
        generate_pairs(cfg.distribute.pairs, cfg.channel, rng, {cfg.pair_phase, cfg.herald});
    if (cfg.distribute.storage_gamma > 0.0 && cfg.distribute.storage_time > 0.0) {
        RngStream storage_rng = RngStream(cfg.seed).substream("storage");
        apply_storage_dephasing(ensemble, cfg.distribute.storage_gamma,
                                cfg.distribute.storage_time, storage_rng);
    }
    ensemble.metadata.config_echo = cfg.normalized_lines();

    std::ofstream table = open_output(cfg.output.table);
    write_header(table, cfg, "table");
    write_ensemble(table, ensemble);

    const double yield =
        static_cast<double>(ensemble.kept_count()) / static_cast<double>(cfg.distribute.pairs);
    Summary summary(cfg);
    summary.add("pairs", cfg.distribute.pairs);
    summary.add("kept", static_cast<std::uint64_t>(ensemble.kept_count()));
    summary.add("yield", yield);
    summary.add("expected_yield", expected_keep_probability(cfg.channel, cfg.herald));
    return {kExitOk, "ensemble written to " + cfg.output.table};
}

ScenarioOutcome run_sync(const ScenarioConfig& cfg) {
    RngStream link_rng = RngStream(cfg.seed).substream("link");
    RngStream protocol_rng = RngStream(cfg.seed).substream("protocol");
    Ensemble ensemble =
        generate_pairs(cfg.sync.pairs, cfg.channel, link_rng, {cfg.pair_phase, cfg.herald});

    const double t0 = 0.0;
    SyncRun run = alice_start(ensemble, t0, protocol_rng);
    const ClassicalMessage msg = send_labels(run, cfg.sync.alice_keeps,
                                             t0 + cfg.sync.message_latency);
    const Selection bob_sel = bob_select(run, msg);
    const auto alice_labels = run.labels_of(cfg.sync.alice_keeps);

    const Party alice{PartyName::Alice, cfg.clock()};
    const Party bob{PartyName::Bob, cfg.clock()};
    // With Alice on type I both parties read |+> atoms; mirrored, both read |->.
    const bool from_plus = cfg.sync.alice_keeps == SubensembleType::I;

    std::ofstream table = open_output(cfg.output.table);
    write_header(table, cfg, "table");
    table << "# columns: time party ones total p1_exact p1_closed\n";

    const std::size_t n_i = run.labels_of(SubensembleType::I).size();
    const std::size_t n_ii = run.labels_of(SubensembleType::II).size();
    const bool degenerate = alice_labels.empty() || bob_sel.degenerate;
    if (!degenerate) {
        const auto alice_slots =
            split_evenly(alice_labels, static_cast<std::size_t>(cfg.sync.points));
        const auto bob_slots =
            split_evenly(bob_sel.labels, static_cast<std::size_t>(cfg.sync.points));
        for (int j = 0; j < cfg.sync.points; ++j) {
            const double t = t0 + cfg.sync.t_max * (j + 1) / cfg.sync.points;
            const double closed = closed_fringe_p1(cfg.detuning, cfg.gamma, t - t0, from_plus);
            for (const Party& party : {alice, bob}) {
                const auto& slot = party.name == PartyName::Alice
                                       ? alice_slots[static_cast<std::size_t>(j)]
                                       : bob_slots[static_cast<std::size_t>(j)];
                if (slot.empty())
                    continue;
                const ReadoutResult r =
                    readout(run, party, slot, t, cfg.sync.mode, protocol_rng);
                table << fmt_double(t) << " " << party_name(party.name) << " "
                      << fmt_double(r.ones) << " " << fmt_double(r.total) << " "
                      << fmt_double(r.p1_exact) << " " << fmt_double(closed) << "\n";
            }
        }
    }

    Summary summary(cfg);
    summary.add("pairs", cfg.sync.pairs);
    summary.add("kept", static_cast<std::uint64_t>(run.pairs.size()));
    summary.add("type_i", static_cast<std::uint64_t>(n_i));
    summary.add("type_ii", static_cast<std::uint64_t>(n_ii));
    if (run.pairs.size() > 0)
        summary.add("type_i_fraction",
                    static_cast<double>(n_i) / static_cast<double>(run.pairs.size()));
    summary.add("message_latency", cfg.sync.message_latency);
    summary.add("degenerate", degenerate ? "true" : "false");
    if (degenerate)
        return {kExitDegenerate, "sync run degenerate: one subensemble is empty"};
    return {kExitOk, "sync table written to " + cfg.output.table};
}

ScenarioOutcome run_compare(const ScenarioConfig& cfg) {
    RngStream link1 = RngStream(cfg.seed).substream("link.first");
    RngStream link2 = RngStream(cfg.seed).substream("link.second");
    RngStream protocol_rng = RngStream(cfg.seed).substream("protocol");

    const GenerateOptions options{cfg.pair_phase, cfg.herald};
    Ensemble first = generate_pairs(cfg.compare.pairs, cfg.channel, link1, options);
    Ensemble second = generate_pairs(cfg.compare.pairs, cfg.channel, link2, options);

    const ComparisonResult result = compare_clocks(
        first, second, cfg.clock(), cfg.bob_clock(), cfg.compare.n_periods,
        cfg.compare.convention, cfg.compare.budgets, cfg.compare.mode, protocol_rng,
        cfg.compare.alice_keeps);

    std::ofstream table = open_output(cfg.output.table);
    write_header(table, cfg, "table");
    table << "# columns: stage time_rel successes trials\n";
    auto dump = [&table](const char* stage, const FringeDataset& ds) {
        for (const FringePoint& p : ds.points)
            table << stage << " " << fmt_double(p.time) << " " << fmt_double(p.successes)
                  << " " << fmt_double(p.trials) << "\n";
    };
    dump("alice_scan", result.alice_scan);
    dump("bob_scan", result.bob_scan);
    dump("window_first", result.window_first);
    dump("window_second", result.window_second);

    Summary summary(cfg);
    summary.add("omega_a_hat", result.omega_a_hat);
    summary.add("omega_a_se", result.omega_a_se);
    summary.add("omega_b_hat", result.omega_b_hat);
    summary.add("omega_b_se", result.omega_b_se);
    summary.add("t1", result.t1);
    summary.add("n_periods", result.n_periods);
    summary.add("convention", phase_convention_name(result.convention));
    summary.add("fractional_offset", result.fractional_offset);
    summary.add("fractional_offset_se", result.fractional_offset_se);
    summary.add("fractional_offset_ci3_lo",
                result.fractional_offset - 3.0 * result.fractional_offset_se);
    summary.add("fractional_offset_ci3_hi",
                result.fractional_offset + 3.0 * result.fractional_offset_se);
    summary.add("phase_first", result.phase_first);
    summary.add("phase_first_se", result.phase_first_se);
    summary.add("phase_second", result.phase_second);
    summary.add("phase_second_se", result.phase_second_se);
    summary.add("alice_scan_points", static_cast<std::uint64_t>(result.alice_scan_points));
    summary.add("bob_scan_points", static_cast<std::uint64_t>(result.bob_scan_points));
    summary.add("window_points", static_cast<std::uint64_t>(result.window_points_used));
    return {kExitOk, "comparison summary written to " + cfg.output.summary};
}

ScenarioOutcome run_ghz(const ScenarioConfig& cfg) {
    RngStream rng = RngStream(cfg.seed).substream("ghz");
    const ClockConfig clock = cfg.clock();

    std::ofstream table = open_output(cfg.output.table);
    write_header(table, cfg, "table");
    table << "# columns: time parity_exact parity_closed parity_sampled kept shots\n";

    double yield_sum = 0.0;
    for (int j = 0; j < cfg.ghz.points; ++j) {
        const double t = cfg.ghz.t_max * j / (cfg.ghz.points - 1);
        const GhzResult r =
            ghz_distribute_and_read(cfg.ghz.n, cfg.channel, clock, t, cfg.ghz.shots, rng);
        const double closed = std::cos(cfg.ghz.n * cfg.detuning * t);
        yield_sum += static_cast<double>(r.kept_shots) / static_cast<double>(r.shots);
        table << fmt_double(t) << " " << fmt_double(r.exact_parity) << " "
              << fmt_double(closed) << " " << fmt_double(r.sampled_parity) << " "
              << r.kept_shots << " " << r.shots << "\n";
    }

    Summary summary(cfg);
    summary.add("n", static_cast<std::uint64_t>(cfg.ghz.n));
    summary.add("points", static_cast<std::uint64_t>(cfg.ghz.points));
    summary.add("shots_per_point", cfg.ghz.shots);
    summary.add("mean_yield", yield_sum / cfg.ghz.points);
    summary.add("fringe_speedup", static_cast<std::uint64_t>(cfg.ghz.n));
    return {kExitOk, "ghz table written to " + cfg.output.table};
}

} // namespace

ScenarioOutcome run_scenario(const ScenarioConfig& cfg) {
    try {
        switch (cfg.scenario) {
        case Scenario::Ramsey: return run_ramsey(cfg);
        case Scenario::Distribute: return run_distribute(cfg);
        case Scenario::Sync: return run_sync(cfg);
        case Scenario::Compare: return run_compare(cfg);
        case Scenario::Ghz: return run_ghz(cfg);
        }
        return {kExitUsage, "unknown scenario"};
    } catch (const ConfigError& e) {
        return {kExitConfig, e.what()};
    } catch (const FitError& e) {
        if (e.kind() == FitErrorKind::InsufficientData)
            return {kExitDegenerate, e.what()};
        return {kExitFit, e.what()};
    } catch (const IoError& e) {
        return {kExitIo, e.what()};
    } catch (const std::exception& e) {
        return {kExitUsage, e.what()};
    }
}

} // namespace qcs
