// End-to-end pair distribution: photon-pair source, two lossy arms, per-party
// transfer + fluorescence herald, and the labelled shared ensemble with a
// bit-exact text serialization.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qcs/levels.hpp"
#include "qcs/rng.hpp"
#include "qcs/state.hpp"

namespace qcs {

struct ChannelModel {
    double eta_a = 1.0;   // Alice-arm transmission probability
    double eta_b = 1.0;   // Bob-arm transmission probability
    double p_miss = 0.0;  // herald misses the fluorescence of an empty atom
    double p_false = 0.0; // herald falsely flags a loaded atom

    void validate() const;
};

// Logical two-atom state produced by the transfer chain from the photon pair
// |RL> + |LR>. The paper asserts the singlet; the literal relabelling gives
// the triplet, so the phase is a configurable convention.
enum class PairPhase {
    Singlet, // (|01> - |10>)/sqrt(2)
    Triplet, // (|01> + |10>)/sqrt(2)
};

enum class SubensembleType { I, II };

struct AtomPairRecord {
    std::uint64_t label = 0;       // 1, 2, 3, ...
    bool herald_kept = false;
    StateVector joint_state;       // qubit 0 = Alice, qubit 1 = Bob
    bool alice_absorbed = false;
    bool bob_absorbed = false;
    // Set by the protocol once Alice has measured; absent before.
    std::optional<SubensembleType> type_tag;
};

struct GenerateOptions {
    PairPhase pair_phase = PairPhase::Singlet;
    HeraldScheme herald = HeraldScheme::Fluorescence;
};

struct EnsembleMetadata {
    std::uint64_t seed = 0;
    ChannelModel channel;
    GenerateOptions options;
    // Free-form normalized configuration echo, one line per entry; written to
    // the serialization header so a run can be replayed bit-exactly.
    std::vector<std::string> config_echo;
};

struct Ensemble {
    std::vector<AtomPairRecord> pairs; // ordered by label
    EnsembleMetadata metadata;
    bool started = false; // set once Alice has collapsed the ensemble

    std::size_t kept_count() const;
    std::vector<std::uint64_t> kept_labels() const;
    const AtomPairRecord& record(std::uint64_t label) const;
    AtomPairRecord& record(std::uint64_t label);
};

// Runs the source + channel + transfer + herald pipeline `count` times.
// Every attempt is retained as a record (herald_kept marks the survivors) so
// yield statistics stay observable. Consumes exactly six uniform draws per
// pair regardless of outcome.
Ensemble generate_pairs(std::uint64_t count, const ChannelModel& channel, RngStream& rng,
                        const GenerateOptions& options = {});

// Merges ensembles into one, relabelling records 1..N in input order.
// Stored pairs do not accrue phase (the singlet is stationary), so states are
// carried over unchanged. Throws if any input was already started.
Ensemble stockpile(const std::vector<Ensemble>& ensembles);

// Optional finite-trap-coherence model: per-qubit dephasing over a storage
// interval, unravelled as stochastic Z flips with probability
// (1 - exp(-gamma*tau))/2 per qubit so records stay pure. Ensemble-averaged
// statistics match the dephasing channel exactly.
void apply_storage_dephasing(Ensemble& ensemble, double gamma, double duration,
                             RngStream& rng);

// Closed-form probability that a single pair survives both heralds.
double expected_keep_probability(const ChannelModel& channel,
                                 HeraldScheme herald = HeraldScheme::Fluorescence);

// Line-oriented text format: '#' comments, header (seed, configs), then one
// record per line: label, kept flag, 8 amplitude components (re/im pairs of
// the four joint amplitudes), type tag. Round-trips bit-exactly.
void write_ensemble(std::ostream& out, const Ensemble& ensemble);
Ensemble read_ensemble(std::istream& in);
void write_ensemble_file(const std::string& path, const Ensemble& ensemble);
Ensemble read_ensemble_file(const std::string& path);

} // namespace qcs
