// Two-party start-synchronisation state machine: Alice's simultaneous X-basis
// measurement at t0, classical label exchange, Bob's subensemble selection,
// destructive Ramsey readout of either party's atoms, and the n-party GHZ
// variant.
#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "qcs/clock.hpp"
#include "qcs/link.hpp"
#include "qcs/rng.hpp"

namespace qcs {

enum class PartyName { Alice, Bob };

const char* party_name(PartyName p);

struct Party {
    PartyName name;
    ClockConfig clock;

    // Column of the shared pair held by this party (Alice = qubit 0).
    int qubit() const { return name == PartyName::Alice ? 0 : 1; }
};

struct ClassicalMessage {
    double sent_at = 0.0; // simulation time, s; correctness never depends on it
    SubensembleType type{};
    std::vector<std::uint64_t> labels;
};

// One kept pair after Alice's measurement: both single-atom states are pure,
// so two amplitudes per party suffice.
struct CollapsedPair {
    std::uint64_t label = 0;
    SubensembleType type{};
    std::complex<double> alice0, alice1;
    std::complex<double> bob0, bob1;
    bool alice_consumed = false;
    bool bob_consumed = false;
};

enum class SampleMode {
    Sampled, // Born-rule draws, integer counts
    Exact,   // expected counts (fractional); still consumes the atoms
};

struct ReadoutSample {
    double time = 0.0;
    PartyName party{};
    double ones = 0.0; // |1> count; fractional in Exact mode
    double total = 0.0;
    double p1_exact = 0.0; // ensemble-exact probability, for cross-checking
};

struct SyncRun {
    double t0 = 0.0;
    std::vector<CollapsedPair> pairs; // kept pairs only, ordered by label
    std::vector<std::uint64_t> type_labels[2];
    std::vector<ReadoutSample> samples;

    std::span<const std::uint64_t> labels_of(SubensembleType type) const {
        return type_labels[static_cast<int>(type)];
    }
    const CollapsedPair& pair(std::uint64_t label) const;
    CollapsedPair& pair(std::uint64_t label);

  private:
    friend SyncRun alice_start(Ensemble&, double, RngStream&);
    friend SyncRun read_sync_run(std::istream&, Ensemble&);
    std::vector<std::uint32_t> index_by_label_;
};

// Collapses every kept pair at the common time t0: Alice measures her atom in
// {|+>,|->}; outcome |+> tags the pair Type-I (Bob then holds |->), |-> tags
// it Type-II. Tags are written back onto the ensemble records. One uniform
// draw per kept pair. Throws if the ensemble was already started.
SyncRun alice_start(Ensemble& ensemble, double t0, RngStream& rng);

ClassicalMessage send_labels(const SyncRun& run, SubensembleType which,
                             double sent_at = 0.0);

struct Selection {
    std::vector<std::uint64_t> labels;
    bool degenerate = false; // empty subensemble (statistically possible)
};

// Bob's working set: the complement of the Type-I labels Alice announced (or
// directly the announced labels when she sends Type-II).
Selection bob_select(const SyncRun& run, const ClassicalMessage& message);

struct ReadoutResult {
    double ones = 0.0;
    double total = 0.0;
    double p0_exact = 0.0;
    double p1_exact = 0.0;
};

// Ramsey readout of the given atoms at `at_time`: free evolution from t0
// under the party's clock (dephased when gamma > 0), Hadamard, Z measurement.
// Measurement is destructive; a label can be consumed once per party.
// The result is appended to run.samples.
ReadoutResult readout(SyncRun& run, const Party& party,
                      std::span<const std::uint64_t> labels, double at_time,
                      SampleMode mode, RngStream& rng);

// Splits labels across `n_times` readout slots: sizes differ by at most one,
// remainder assigned to the earliest slots.
std::vector<std::vector<std::uint64_t>> split_evenly(std::span<const std::uint64_t> labels,
                                                     std::size_t n_times);

struct GhzResult {
    int n = 0;
    double time = 0.0;
    double exact_parity = 0.0;   // <X^n> of the distributed state
    double sampled_parity = 0.0; // mean over kept shots
    std::uint64_t shots = 0;
    std::uint64_t kept_shots = 0;
};

// Distributes |R...R> + |L...L> to n parties through the lossy channel (the
// Alice-arm transmission applies to every arm), maps it to the atomic GHZ
// state, evolves for `duration`, and reads the n-qubit X parity. n = 1
// degenerates to the ordinary single-atom fringe.
GhzResult ghz_distribute_and_read(int n, const ChannelModel& channel,
                                  const ClockConfig& clock, double duration,
                                  std::uint64_t shots, RngStream& rng);

// Appended-section serialization of a started run (tags live in the ensemble
// record lines; samples and per-party consumption follow).
void write_sync_run(std::ostream& out, const Ensemble& ensemble, const SyncRun& run);
SyncRun read_sync_run(std::istream& in, Ensemble& ensemble);

} // namespace qcs
