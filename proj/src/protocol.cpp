#include "qcs/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qcs/textio.hpp"

namespace qcs {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

// Exact P1 of the readout sequence for one pure atom (a0, a1): evolve,
// optionally dephase, Hadamard, read |1>. Identical to the density-matrix
// path, specialised to a single qubit.
double atom_p1(std::complex<double> a0, std::complex<double> a1, double detuning,
               double gamma, double dt) {
    std::complex<double> coherence = a0 * std::conj(a1);
    coherence *= std::polar(1.0, -detuning * dt);
    if (gamma > 0.0)
        coherence *= std::exp(-gamma * dt);
    // Clamp away the f.p. noise at the fringe anchors.
    return std::clamp(0.5 - coherence.real(), 0.0, 1.0);
}

} // namespace

const char* party_name(PartyName p) { return p == PartyName::Alice ? "alice" : "bob"; }

const CollapsedPair& SyncRun::pair(std::uint64_t label) const {
    if (label >= index_by_label_.size() || index_by_label_[label] == UINT32_MAX)
        throw std::out_of_range("SyncRun: label " + std::to_string(label) +
                                " is not a kept pair");
    return pairs[index_by_label_[label]];
}

CollapsedPair& SyncRun::pair(std::uint64_t label) {
    return const_cast<CollapsedPair&>(static_cast<const SyncRun*>(this)->pair(label));
}

SyncRun alice_start(Ensemble& ensemble, double t0, RngStream& rng) {
    if (ensemble.started)
        throw std::invalid_argument("alice_start: ensemble already started");
    ensemble.started = true;

    SyncRun run;
    run.t0 = t0;
    run.pairs.reserve(ensemble.kept_count());
    run.index_by_label_.assign(ensemble.pairs.size() + 1, UINT32_MAX);

    for (AtomPairRecord& record : ensemble.pairs) {
        if (!record.herald_kept)
            continue;
        const auto a = record.joint_state.amplitudes();
        // X measurement of qubit 0, written out for the 2-qubit case:
        // |-> amplitude on Bob's j is (a[0j] - a[1j])/sqrt(2).
        const double p_minus =
            0.5 * (std::norm(a[0] - a[2]) + std::norm(a[1] - a[3]));
        const bool minus = rng.uniform() < p_minus;

        CollapsedPair cp;
        cp.label = record.label;
        cp.type = minus ? SubensembleType::II : SubensembleType::I;
        cp.alice0 = kInvSqrt2;
        cp.alice1 = minus ? -kInvSqrt2 : kInvSqrt2;
        const double p = minus ? p_minus : 1.0 - p_minus;
        const double scale = 1.0 / std::sqrt(2.0 * p);
        const double sign = minus ? -1.0 : 1.0;
        cp.bob0 = (a[0] + sign * a[2]) * scale;
        cp.bob1 = (a[1] + sign * a[3]) * scale;

        record.type_tag = cp.type;
        run.index_by_label_[cp.label] = static_cast<std::uint32_t>(run.pairs.size());
        run.type_labels[static_cast<int>(cp.type)].push_back(cp.label);
        run.pairs.push_back(cp);
    }
    return run;
}

ClassicalMessage send_labels(const SyncRun& run, SubensembleType which, double sent_at) {
    ClassicalMessage msg;
    msg.sent_at = sent_at;
    msg.type = which;
    const auto labels = run.labels_of(which);
    msg.labels.assign(labels.begin(), labels.end());
    return msg;
}

Selection bob_select(const SyncRun& run, const ClassicalMessage& message) {
    for (std::uint64_t label : message.labels) {
        const CollapsedPair& cp = run.pair(label); // throws for unknown labels
        if (cp.type != message.type)
            throw std::invalid_argument("bob_select: label " + std::to_string(label) +
                                        " is not of the announced type");
    }
    // Bob's working set is always the complement of the announced labels:
    // Alice retains what she lists, Bob uses the other subensemble.
    const SubensembleType complement = message.type == SubensembleType::I
                                           ? SubensembleType::II
                                           : SubensembleType::I;
    Selection sel;
    const auto labels = run.labels_of(complement);
    sel.labels.assign(labels.begin(), labels.end());
    sel.degenerate = sel.labels.empty();
    return sel;
}

ReadoutResult readout(SyncRun& run, const Party& party,
                      std::span<const std::uint64_t> labels, double at_time,
                      SampleMode mode, RngStream& rng) {
    if (at_time < run.t0)
        throw std::invalid_argument("readout: at_time before clock start");
    if (labels.empty())
        throw std::invalid_argument("readout: no labels given");
    const bool alice = party.name == PartyName::Alice;
    for (std::uint64_t label : labels) {
        const CollapsedPair& cp = run.pair(label);
        if (alice ? cp.alice_consumed : cp.bob_consumed)
            throw std::invalid_argument("readout: label " + std::to_string(label) +
                                        " already consumed by " + party_name(party.name));
    }

    const double dt = at_time - run.t0;
    const double detuning = party.clock.detuning();
    const double gamma = party.clock.gamma();

    ReadoutResult result;
    result.total = static_cast<double>(labels.size());
    double p_sum = 0.0;
    double ones = 0.0;
    for (std::uint64_t label : labels) {
        CollapsedPair& cp = run.pair(label);
        const double p1 = alice ? atom_p1(cp.alice0, cp.alice1, detuning, gamma, dt)
                                : atom_p1(cp.bob0, cp.bob1, detuning, gamma, dt);
        p_sum += p1;
        if (mode == SampleMode::Sampled)
            ones += rng.uniform() < p1 ? 1.0 : 0.0;
        if (alice)
            cp.alice_consumed = true;
        else
            cp.bob_consumed = true;
    }
    result.p1_exact = p_sum / result.total;
    result.p0_exact = 1.0 - result.p1_exact;
    result.ones = mode == SampleMode::Sampled ? ones : p_sum;

    run.samples.push_back(
        {at_time, party.name, result.ones, result.total, result.p1_exact});
    return result;
}

std::vector<std::vector<std::uint64_t>> split_evenly(std::span<const std::uint64_t> labels,
                                                     std::size_t n_times) {
    if (n_times == 0)
        throw std::invalid_argument("split_evenly: need at least one slot");
    std::vector<std::vector<std::uint64_t>> slots(n_times);
    const std::size_t base = labels.size() / n_times;
    const std::size_t remainder = labels.size() % n_times;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n_times; ++i) {
        const std::size_t take = base + (i < remainder ? 1 : 0);
        slots[i].assign(labels.begin() + pos, labels.begin() + pos + take);
        pos += take;
    }
    return slots;
}

GhzResult ghz_distribute_and_read(int n, const ChannelModel& channel,
                                  const ClockConfig& clock, double duration,
                                  std::uint64_t shots, RngStream& rng) {
    if (n < 1 || n > kMaxQubits)
        throw std::invalid_argument("ghz_distribute_and_read: n out of range");
    if (duration < 0.0)
        throw std::invalid_argument("ghz_distribute_and_read: negative duration");
    channel.validate();

    const LevelScheme scheme = LevelScheme::cesium();
    const int r_bit = raman_transfer(polarization_to_level(PhotonPolarization::R, scheme), scheme);
    const int l_bit = 1 - r_bit;

    // |R...R> + |L...L> relabelled through the transfer chain.
    const std::size_t dim = std::size_t{1} << n;
    std::size_t idx_r = 0, idx_l = 0;
    for (int q = 0; q < n; ++q) {
        idx_r = (idx_r << 1) | static_cast<std::size_t>(r_bit);
        idx_l = (idx_l << 1) | static_cast<std::size_t>(l_bit);
    }
    std::vector<cdouble> amps(dim, cdouble{0.0, 0.0});
    amps[idx_r] = kInvSqrt2;
    amps[idx_l] = kInvSqrt2;
    StateVector evolved = evolve_free(StateVector(n, std::move(amps)),
                                      clock.detuning(), duration);

    // Exact X^(x)n parity: rotate into the X basis and weight Z parities.
    StateVector rotated = evolved;
    for (int q = 0; q < n; ++q)
        rotated = hadamard(rotated, q);
    double exact = 0.0;
    for (std::size_t i = 0; i < rotated.size(); ++i) {
        const int sign = std::popcount(i) % 2 == 0 ? 1 : -1;
        exact += sign * std::norm(rotated.amp(i));
    }

    std::vector<int> all_qubits(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q)
        all_qubits[static_cast<std::size_t>(q)] = q;

    GhzResult result;
    result.n = n;
    result.time = duration;
    result.exact_parity = exact;
    result.shots = shots;
    double parity_sum = 0.0;
    for (std::uint64_t s = 0; s < shots; ++s) {
        bool all_kept = true;
        for (int q = 0; q < n; ++q) {
            const bool absorbed = rng.uniform() < channel.eta_a;
            const bool kept = herald_check(absorbed, channel, rng);
            all_kept = all_kept && absorbed && kept;
        }
        if (!all_kept)
            continue;
        const MeasurementOutcome outcome = measure(evolved, Basis::X, all_qubits, rng);
        int minus_count = 0;
        for (int r : outcome.results)
            minus_count += r;
        parity_sum += minus_count % 2 == 0 ? 1.0 : -1.0;
        ++result.kept_shots;
    }
    result.sampled_parity =
        result.kept_shots > 0 ? parity_sum / static_cast<double>(result.kept_shots) : 0.0;
    return result;
}

void write_sync_run(std::ostream& out, const Ensemble& ensemble, const SyncRun& run) {
    write_ensemble(out, ensemble);
    out << "[sync]\n";
    out << "t0 = " << fmt_double(run.t0) << "\n";
    for (int side = 0; side < 2; ++side) {
        out << (side == 0 ? "consumed_alice =" : "consumed_bob =");
        for (const CollapsedPair& cp : run.pairs)
            if (side == 0 ? cp.alice_consumed : cp.bob_consumed)
                out << " " << cp.label;
        out << "\n";
    }
    out << "samples = " << run.samples.size() << "\n";
    out << "# time party ones total p1_exact\n";
    for (const ReadoutSample& s : run.samples)
        out << fmt_double(s.time) << " " << party_name(s.party) << " " << fmt_double(s.ones)
            << " " << fmt_double(s.total) << " " << fmt_double(s.p1_exact) << "\n";
}

namespace {

// Rebuilds the collapse of one record from its stored tag; deterministic
// because the post-measurement states are fixed by the outcome.
CollapsedPair rebuild_pair(const AtomPairRecord& record) {
    const auto a = record.joint_state.amplitudes();
    const bool minus = record.type_tag == SubensembleType::II;
    CollapsedPair cp;
    cp.label = record.label;
    cp.type = *record.type_tag;
    cp.alice0 = kInvSqrt2;
    cp.alice1 = minus ? -kInvSqrt2 : kInvSqrt2;
    const double sign = minus ? -1.0 : 1.0;
    const double p =
        0.5 * (std::norm(a[0] + sign * a[2]) + std::norm(a[1] + sign * a[3]));
    const double scale = 1.0 / std::sqrt(2.0 * p);
    cp.bob0 = (a[0] + sign * a[2]) * scale;
    cp.bob1 = (a[1] + sign * a[3]) * scale;
    return cp;
}

} // namespace

SyncRun read_sync_run(std::istream& in, Ensemble& ensemble) {
    ensemble = read_ensemble(in);
    if (!ensemble.started)
        throw std::runtime_error("sync run: ensemble section not marked started");

    SyncRun run;
    run.index_by_label_.assign(ensemble.pairs.size() + 1, UINT32_MAX);
    for (const AtomPairRecord& record : ensemble.pairs) {
        if (!record.herald_kept)
            continue;
        if (!record.type_tag)
            throw std::runtime_error("sync run: kept record " + std::to_string(record.label) +
                                     " has no tag");
        CollapsedPair cp = rebuild_pair(record);
        run.index_by_label_[cp.label] = static_cast<std::uint32_t>(run.pairs.size());
        run.type_labels[static_cast<int>(cp.type)].push_back(cp.label);
        run.pairs.push_back(cp);
    }

    // The ensemble reader consumes the stream up to EOF of its own sections;
    // sync sections are parsed from where it stopped. Re-scan is avoided by
    // reading the remaining lines here.
    std::string line;
    bool in_sync = false;
    std::size_t expected_samples = 0;
    while (std::getline(in, line)) {
        if (is_comment_or_blank(line))
            continue;
        const auto t = trim(line);
        if (t == "[sync]") {
            in_sync = true;
            continue;
        }
        if (!in_sync)
            throw std::runtime_error("sync run: unexpected line before [sync]");
        std::string key, value;
        if (split_key_value(line, key, value)) {
            if (key == "t0") {
                run.t0 = parse_double(value);
            } else if (key == "consumed_alice" || key == "consumed_bob") {
                std::istringstream fields(value);
                std::uint64_t label;
                while (fields >> label) {
                    CollapsedPair& cp = run.pair(label);
                    (key == "consumed_alice" ? cp.alice_consumed : cp.bob_consumed) = true;
                }
            } else if (key == "samples") {
                expected_samples = parse_u64(value);
            } else {
                throw std::runtime_error("sync run: unknown key '" + key + "'");
            }
            continue;
        }
        std::istringstream fields(line);
        std::string time_s, party_s, ones_s, total_s, p1_s;
        if (!(fields >> time_s >> party_s >> ones_s >> total_s >> p1_s))
            throw std::runtime_error("sync run: bad sample line");
        ReadoutSample s;
        s.time = parse_double(time_s);
        if (party_s == "alice")
            s.party = PartyName::Alice;
        else if (party_s == "bob")
            s.party = PartyName::Bob;
        else
            throw std::runtime_error("sync run: unknown party '" + party_s + "'");
        s.ones = parse_double(ones_s);
        s.total = parse_double(total_s);
        s.p1_exact = parse_double(p1_s);
        run.samples.push_back(s);
    }
    if (run.samples.size() != expected_samples)
        throw std::runtime_error("sync run: sample count mismatch");
    return run;
}

} // namespace qcs
