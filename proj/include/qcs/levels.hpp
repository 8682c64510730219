// Internal-level bookkeeping for the photon-to-atom transfer: level scheme
// tables (cesium built in, rubidium loadable from a text file), the
// polarization-selective excitation, the Raman pi-pulse relabelling onto the
// clock levels, the fluorescence herald, and the quadratically field-shifted
// clock-transition frequency.
#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "qcs/rng.hpp"

namespace qcs {

struct ChannelModel; // see link.hpp

enum class Term { S6_1_2, P6_3_2, S5_1_2, P5_1_2 };

const char* term_name(Term term);
Term term_from_name(const std::string& name);

struct AtomicLevel {
    Term term;
    int f;
    int mf;

    bool operator==(const AtomicLevel&) const = default;
};

// Throws if |mf| > f or the (term, f) pair is outside the supported scheme:
// cesium 6S1/2 f in {3,4} / 6P3/2 f=3, rubidium 5S1/2 and 5P1/2 f in {1,2}.
void validate_level(const AtomicLevel& level);

std::string level_name(const AtomicLevel& level);

enum class PhotonPolarization { R, L };

// Slots a level can occupy in the transfer scheme.
enum class LevelRole {
    Ground,       // preparation state, also logical |0>
    ExcitedPlus,  // reached by an R photon
    ExcitedMinus, // reached by an L photon
    Logical0,
    Logical1,
    ParkPlus,  // intermediate storage for the fluorescence herald
    ParkMinus,
};

const char* role_name(LevelRole role);
LevelRole role_from_name(const std::string& name);

// One atom species' transfer table plus its unperturbed clock frequency.
struct LevelScheme {
    std::string species;
    double nu0 = 0.0; // Hz
    std::array<AtomicLevel, 7> levels{};

    const AtomicLevel& level(LevelRole role) const {
        return levels[static_cast<std::size_t>(role)];
    }
    AtomicLevel& level(LevelRole role) {
        return levels[static_cast<std::size_t>(role)];
    }

    void validate() const;

    static LevelScheme cesium();
    static LevelScheme load(std::istream& in);
    static LevelScheme load_file(const std::string& path);
    void save(std::ostream& out) const;
};

inline constexpr double kCesiumClockHz = 9192631770.0;

struct FieldConfig {
    double b_static = 0.0;        // tesla
    double nu0 = kCesiumClockHz;  // Hz
};

// Clock-transition frequency with the second-order Zeeman shift:
// nu0 + 427e8 * B^2 (B in tesla, result in Hz).
double clock_frequency(const FieldConfig& field);

// R -> excited mf=+1, L -> excited mf=-1 from the ground preparation state.
AtomicLevel polarization_to_level(PhotonPolarization pol,
                                  const LevelScheme& scheme = LevelScheme::cesium());

// Two Raman pi pulses: excited mf=+1 -> logical |0>, mf=-1 -> logical |1>.
// Returns the logical basis bit; throws for levels outside the transfer path.
int raman_transfer(const AtomicLevel& excited,
                   const LevelScheme& scheme = LevelScheme::cesium());

// Level reached by raman_transfer, for table-level tests and listings.
AtomicLevel raman_transfer_level(const AtomicLevel& excited,
                                 const LevelScheme& scheme = LevelScheme::cesium());

enum class HeraldScheme {
    Fluorescence, // park in mf=+-1, probe mf=0; loss-detecting
    None,         // plain transfer, keeps everything
};

struct TransferOutcome {
    bool absorbed = false;
    std::optional<int> logical_qubit; // present iff absorbed
    bool herald_kept = false;
};

// Fluorescence herald: an atom that absorbed no photon is left in mf=0,
// fluoresces under the probe and is discarded (kept only with probability
// p_miss); an absorbed atom is parked in mf=+-1, stays dark and is kept
// (discarded with probability p_false). Consumes exactly one uniform draw.
bool herald_check(bool absorbed, const ChannelModel& detector, RngStream& rng);

} // namespace qcs
