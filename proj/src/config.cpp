#include "qcs/config.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "qcs/textio.hpp"

namespace qcs {

namespace {

const char* kScenarioNames[] = {"ramsey", "distribute", "sync", "compare", "ghz"};

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

using EntryMap = std::map<std::string, Entry>;

// Typed extraction with domain checks; every failure names the key, the
// offending value, and the source line.
class Extractor {
  public:
    explicit Extractor(EntryMap& entries) : entries_(entries) {}

    std::optional<std::string> raw(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end())
            return std::nullopt;
        it->second.used = true;
        last_line_ = it->second.line;
        return it->second.value;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& value,
                           const std::string& what) const {
        throw ConfigError(key + " = " + value + ": " + what, last_line_);
    }

    double number(const std::string& key, double fallback) {
        const auto v = raw(key);
        if (!v)
            return fallback;
        try {
            return parse_double(*v);
        } catch (const std::exception&) {
            fail(key, *v, "expected a number");
        }
    }

    double number_in(const std::string& key, double fallback, double lo, double hi) {
        const double v = number(key, fallback);
        if (!(v >= lo && v <= hi))
            fail(key, fmt_double(v), "must lie in [" + fmt_double(lo) + ", " + fmt_double(hi) + "]");
        return v;
    }

    double positive(const std::string& key, double fallback) {
        const double v = number(key, fallback);
        if (!(v > 0.0))
            fail(key, fmt_double(v), "must be positive");
        return v;
    }

    double non_negative(const std::string& key, double fallback) {
        const double v = number(key, fallback);
        if (v < 0.0)
            fail(key, fmt_double(v), "must be >= 0");
        return v;
    }

    std::uint64_t unsigned_int(const std::string& key, std::uint64_t fallback,
                               std::uint64_t lo) {
        const auto v = raw(key);
        std::uint64_t value = fallback;
        if (v) {
            try {
                value = parse_u64(*v);
            } catch (const std::exception&) {
                fail(key, *v, "expected a non-negative integer");
            }
        }
        if (value < lo)
            fail(key, std::to_string(value), "must be >= " + std::to_string(lo));
        return value;
    }

    int int_in(const std::string& key, int fallback, int lo, int hi) {
        const auto v = raw(key);
        long long value = fallback;
        if (v) {
            try {
                value = parse_i64(*v);
            } catch (const std::exception&) {
                fail(key, *v, "expected an integer");
            }
        }
        if (value < lo || value > hi)
            fail(key, std::to_string(value),
                 "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return static_cast<int>(value);
    }

    std::string keyword(const std::string& key, const std::string& fallback,
                        std::initializer_list<const char*> allowed) {
        const auto v = raw(key);
        const std::string value = v ? *v : fallback;
        for (const char* a : allowed)
            if (value == a)
                return value;
        std::string expect;
        for (const char* a : allowed)
            expect += std::string(expect.empty() ? "" : "|") + a;
        fail(key, value, "expected one of " + expect);
    }

  private:
    EntryMap& entries_;
    int last_line_ = 0;
};

EntryMap read_entries(std::istream& in) {
    EntryMap entries;
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_comment_or_blank(line))
            continue;
        const auto t = trim(line);
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("malformed section header '" + std::string(t) + "'", line_no);
            section = std::string(trim(t.substr(1, t.size() - 2)));
            if (section.empty())
                throw ConfigError("empty section name", line_no);
            continue;
        }
        std::string key, value;
        if (!split_key_value(line, key, value))
            throw ConfigError("expected key = value, got '" + std::string(t) + "'", line_no);
        if (key.empty())
            throw ConfigError("empty key", line_no);
        const std::string full = section.empty() ? key : section + "." + key;
        if (entries.count(full))
            throw ConfigError("duplicate key '" + full + "'", line_no);
        entries[full] = Entry{value, line_no, false};
    }
    return entries;
}

SubensembleType keeps_from(const std::string& v) {
    return v == "I" ? SubensembleType::I : SubensembleType::II;
}

SampleMode mode_from(const std::string& v) {
    return v == "sampled" ? SampleMode::Sampled : SampleMode::Exact;
}

} // namespace

const char* scenario_name(Scenario s) {
    return kScenarioNames[static_cast<std::size_t>(s)];
}

Scenario scenario_from_name(const std::string& name) {
    for (std::size_t i = 0; i < std::size(kScenarioNames); ++i)
        if (name == kScenarioNames[i])
            return static_cast<Scenario>(i);
    throw ConfigError("unknown scenario '" + name + "'");
}

ScenarioConfig parse_scenario_config(std::istream& in, std::optional<Scenario> expected) {
    EntryMap entries = read_entries(in);
    Extractor get(entries);
    ScenarioConfig cfg;

    // Scenario comes from the subcommand, the file, or both in agreement.
    const auto scenario_raw = get.raw("scenario");
    if (scenario_raw) {
        Scenario from_file;
        try {
            from_file = scenario_from_name(*scenario_raw);
        } catch (const ConfigError&) {
            get.fail("scenario", *scenario_raw, "expected ramsey|distribute|sync|compare|ghz");
        }
        if (expected && from_file != *expected)
            get.fail("scenario", *scenario_raw,
                     std::string("conflicts with the requested scenario '") +
                         scenario_name(*expected) + "'");
        cfg.scenario = from_file;
    } else if (expected) {
        cfg.scenario = *expected;
    } else {
        throw ConfigError("missing required key 'scenario'");
    }

    const auto seed_raw = get.raw("seed");
    if (!seed_raw)
        throw ConfigError("missing required key 'seed' (mandatory for reproducibility)");
    try {
        cfg.seed = parse_u64(*seed_raw);
    } catch (const std::exception&) {
        get.fail("seed", *seed_raw, "expected a 64-bit unsigned integer");
    }

    cfg.nu0 = get.positive("clock.nu0", cfg.nu0);
    cfg.detuning = get.number("clock.detuning", cfg.detuning);
    cfg.b_param = get.positive("clock.b_param", cfg.b_param);
    cfg.gamma = get.non_negative("clock.gamma", cfg.gamma);

    cfg.channel.eta_a = get.number_in("channel.eta_a", cfg.channel.eta_a, 0.0, 1.0);
    cfg.channel.eta_b = get.number_in("channel.eta_b", cfg.channel.eta_b, 0.0, 1.0);
    cfg.channel.p_miss = get.number_in("channel.p_miss", cfg.channel.p_miss, 0.0, 1.0);
    cfg.channel.p_false = get.number_in("channel.p_false", cfg.channel.p_false, 0.0, 1.0);
    cfg.herald = get.keyword("channel.herald", "fluorescence", {"fluorescence", "none"}) ==
                         "fluorescence"
                     ? HeraldScheme::Fluorescence
                     : HeraldScheme::None;
    cfg.pair_phase =
        get.keyword("channel.pair_phase", "singlet", {"singlet", "triplet"}) == "singlet"
            ? PairPhase::Singlet
            : PairPhase::Triplet;

    cfg.b_static = get.non_negative("field.b_static", cfg.b_static);

    switch (cfg.scenario) {
    case Scenario::Ramsey: {
        cfg.ramsey.t_max = get.positive("ramsey.t_max", cfg.ramsey.t_max);
        cfg.ramsey.points = get.int_in("ramsey.points", cfg.ramsey.points, 2, 1000000);
        cfg.ramsey.shots = get.unsigned_int("ramsey.shots", cfg.ramsey.shots, 1);
        const std::string density =
            get.keyword("ramsey.density", "auto", {"auto", "pure", "density"});
        cfg.ramsey.density = density == "auto"    ? DensityMode::Auto
                             : density == "pure" ? DensityMode::Pure
                                                 : DensityMode::Density;
        break;
    }
    case Scenario::Distribute: {
        cfg.distribute.pairs = get.unsigned_int("distribute.pairs", cfg.distribute.pairs, 1);
        cfg.distribute.storage_gamma =
            get.non_negative("distribute.storage_gamma", cfg.distribute.storage_gamma);
        cfg.distribute.storage_time =
            get.non_negative("distribute.storage_time", cfg.distribute.storage_time);
        break;
    }
    case Scenario::Sync: {
        cfg.sync.pairs = get.unsigned_int("sync.pairs", cfg.sync.pairs, 1);
        cfg.sync.t_max = get.positive("sync.t_max", cfg.sync.t_max);
        cfg.sync.points = get.int_in("sync.points", cfg.sync.points, 1, 1000000);
        cfg.sync.message_latency =
            get.non_negative("sync.message_latency", cfg.sync.message_latency);
        cfg.sync.alice_keeps = keeps_from(get.keyword("sync.alice_keeps", "I", {"I", "II"}));
        cfg.sync.mode = mode_from(get.keyword("sync.mode", "sampled", {"sampled", "exact"}));
        break;
    }
    case Scenario::Compare: {
        cfg.compare.pairs = get.unsigned_int("compare.pairs", cfg.compare.pairs, 1);
        cfg.compare.n_periods = get.unsigned_int("compare.n_periods", cfg.compare.n_periods, 1);
        cfg.compare.convention =
            get.keyword("compare.convention", "periods", {"periods", "radians"}) == "periods"
                ? PhaseConvention::Periods
                : PhaseConvention::Radians;
        cfg.compare.delta = get.number("compare.delta", cfg.compare.delta);
        if (cfg.compare.delta <= -1.0)
            get.fail("compare.delta", fmt_double(cfg.compare.delta), "must be > -1");
        cfg.compare.budgets.trials_per_point =
            get.unsigned_int("compare.trials_per_point", cfg.compare.budgets.trials_per_point, 1);
        cfg.compare.budgets.scan_points =
            get.int_in("compare.scan_points", cfg.compare.budgets.scan_points, 5, 100000);
        cfg.compare.budgets.scan_periods =
            get.positive("compare.scan_periods", cfg.compare.budgets.scan_periods);
        cfg.compare.budgets.window_points =
            get.int_in("compare.window_points", cfg.compare.budgets.window_points, 3, 100000);
        cfg.compare.budgets.window_periods =
            get.positive("compare.window_periods", cfg.compare.budgets.window_periods);
        cfg.compare.mode =
            mode_from(get.keyword("compare.mode", "sampled", {"sampled", "exact"}));
        cfg.compare.alice_keeps =
            keeps_from(get.keyword("compare.alice_keeps", "I", {"I", "II"}));
        if (!(cfg.detuning > 0.0))
            throw ConfigError("clock.detuning must be positive for the compare scenario");
        break;
    }
    case Scenario::Ghz: {
        cfg.ghz.n = get.int_in("ghz.n", cfg.ghz.n, 1, kMaxQubits);
        cfg.ghz.t_max = get.positive("ghz.t_max", cfg.ghz.t_max);
        cfg.ghz.points = get.int_in("ghz.points", cfg.ghz.points, 2, 1000000);
        cfg.ghz.shots = get.unsigned_int("ghz.shots", cfg.ghz.shots, 1);
        break;
    }
    }

    const std::string base = scenario_name(cfg.scenario);
    const auto table_raw = get.raw("output.table");
    const auto summary_raw = get.raw("output.summary");
    cfg.output.table = table_raw ? *table_raw : base + "_table.txt";
    cfg.output.summary = summary_raw ? *summary_raw : base + "_summary.txt";
    if (cfg.output.table.empty() || cfg.output.summary.empty())
        throw ConfigError("output paths must not be empty");

    for (const auto& [key, entry] : entries)
        if (!entry.used)
            throw ConfigError("unknown key '" + key + "'", entry.line);
    return cfg;
}

ScenarioConfig load_scenario_config(const std::string& path, std::optional<Scenario> expected) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    return parse_scenario_config(in, expected);
}

std::vector<std::string> ScenarioConfig::normalized_lines() const {
    std::vector<std::string> lines;
    auto add = [&](const std::string& k, const std::string& v) { lines.push_back(k + " = " + v); };

    add("scenario", scenario_name(scenario));
    add("seed", std::to_string(seed));
    lines.push_back("[clock]");
    add("nu0", fmt_double(nu0));
    add("detuning", fmt_double(detuning));
    add("b_param", fmt_double(b_param));
    add("gamma", fmt_double(gamma));
    lines.push_back("[channel]");
    add("eta_a", fmt_double(channel.eta_a));
    add("eta_b", fmt_double(channel.eta_b));
    add("p_miss", fmt_double(channel.p_miss));
    add("p_false", fmt_double(channel.p_false));
    add("herald", herald == HeraldScheme::Fluorescence ? "fluorescence" : "none");
    add("pair_phase", pair_phase == PairPhase::Singlet ? "singlet" : "triplet");
    lines.push_back("[field]");
    add("b_static", fmt_double(b_static));

    switch (scenario) {
    case Scenario::Ramsey:
        lines.push_back("[ramsey]");
        add("t_max", fmt_double(ramsey.t_max));
        add("points", std::to_string(ramsey.points));
        add("shots", std::to_string(ramsey.shots));
        add("density", ramsey.density == DensityMode::Auto    ? "auto"
                       : ramsey.density == DensityMode::Pure ? "pure"
                                                             : "density");
        break;
    case Scenario::Distribute:
        lines.push_back("[distribute]");
        add("pairs", std::to_string(distribute.pairs));
        add("storage_gamma", fmt_double(distribute.storage_gamma));
        add("storage_time", fmt_double(distribute.storage_time));
        break;
    case Scenario::Sync:
        lines.push_back("[sync]");
        add("pairs", std::to_string(sync.pairs));
        add("t_max", fmt_double(sync.t_max));
        add("points", std::to_string(sync.points));
        add("message_latency", fmt_double(sync.message_latency));
        add("alice_keeps", sync.alice_keeps == SubensembleType::I ? "I" : "II");
        add("mode", sync.mode == SampleMode::Sampled ? "sampled" : "exact");
        break;
    case Scenario::Compare:
        lines.push_back("[compare]");
        add("pairs", std::to_string(compare.pairs));
        add("n_periods", std::to_string(compare.n_periods));
        add("convention", phase_convention_name(compare.convention));
        add("delta", fmt_double(compare.delta));
        add("trials_per_point", std::to_string(compare.budgets.trials_per_point));
        add("scan_points", std::to_string(compare.budgets.scan_points));
        add("scan_periods", fmt_double(compare.budgets.scan_periods));
        add("window_points", std::to_string(compare.budgets.window_points));
        add("window_periods", fmt_double(compare.budgets.window_periods));
        add("mode", compare.mode == SampleMode::Sampled ? "sampled" : "exact");
        add("alice_keeps", compare.alice_keeps == SubensembleType::I ? "I" : "II");
        break;
    case Scenario::Ghz:
        lines.push_back("[ghz]");
        add("n", std::to_string(ghz.n));
        add("t_max", fmt_double(ghz.t_max));
        add("points", std::to_string(ghz.points));
        add("shots", std::to_string(ghz.shots));
        break;
    }
    lines.push_back("[output]");
    add("table", output.table);
    add("summary", output.summary);
    return lines;
}

} // namespace qcs
