#include "qcs/link.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qcs/textio.hpp"

namespace qcs {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

void check_rate(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0))
        throw std::invalid_argument(std::string("ChannelModel: ") + name +
                                    " must lie in [0,1]");
}

// Logical two-atom state the transfer chain assigns to the photon pair
// (|RL> + |LR>)/sqrt(2), built from the level tables so the amplitude map and
// the documented Raman path cannot drift apart.
StateVector entangled_pair_state(PairPhase phase, const LevelScheme& scheme) {
    const int r_bit = raman_transfer(polarization_to_level(PhotonPolarization::R, scheme), scheme);
    const int l_bit = raman_transfer(polarization_to_level(PhotonPolarization::L, scheme), scheme);
    const double sign = phase == PairPhase::Singlet ? -1.0 : 1.0;
    std::vector<cdouble> amps(4, cdouble{0.0, 0.0});
    amps[static_cast<std::size_t>(r_bit * 2 + l_bit)] = kInvSqrt2;        // |RL> component
    amps[static_cast<std::size_t>(l_bit * 2 + r_bit)] = sign * kInvSqrt2; // |LR> component
    return StateVector(2, std::move(amps));
}

StateVector product_state(int alice_bit, int bob_bit) {
    std::vector<cdouble> amps(4, cdouble{0.0, 0.0});
    amps[static_cast<std::size_t>(alice_bit * 2 + bob_bit)] = 1.0;
    return StateVector(2, std::move(amps));
}

const char* pair_phase_name(PairPhase p) {
    return p == PairPhase::Singlet ? "singlet" : "triplet";
}

PairPhase pair_phase_from_name(const std::string& s) {
    if (s == "singlet") return PairPhase::Singlet;
    if (s == "triplet") return PairPhase::Triplet;
    throw std::invalid_argument("unknown pair phase '" + s + "'");
}

const char* herald_name(HeraldScheme h) {
    return h == HeraldScheme::Fluorescence ? "fluorescence" : "none";
}

HeraldScheme herald_from_name(const std::string& s) {
    if (s == "fluorescence") return HeraldScheme::Fluorescence;
    if (s == "none") return HeraldScheme::None;
    throw std::invalid_argument("unknown herald scheme '" + s + "'");
}

} // namespace

void ChannelModel::validate() const {
    check_rate(eta_a, "eta_a");
    check_rate(eta_b, "eta_b");
    check_rate(p_miss, "p_miss");
    check_rate(p_false, "p_false");
}

std::size_t Ensemble::kept_count() const {
    return static_cast<std::size_t>(
        std::count_if(pairs.begin(), pairs.end(),
                      [](const AtomPairRecord& r) { return r.herald_kept; }));
}

std::vector<std::uint64_t> Ensemble::kept_labels() const {
    std::vector<std::uint64_t> labels;
    labels.reserve(pairs.size());
    for (const AtomPairRecord& r : pairs)
        if (r.herald_kept)
            labels.push_back(r.label);
    return labels;
}

const AtomPairRecord& Ensemble::record(std::uint64_t label) const {
    if (label == 0 || label > pairs.size() || pairs[label - 1].label != label)
        throw std::out_of_range("Ensemble: no record with label " + std::to_string(label));
    return pairs[label - 1];
}

AtomPairRecord& Ensemble::record(std::uint64_t label) {
    return const_cast<AtomPairRecord&>(static_cast<const Ensemble*>(this)->record(label));
}

Ensemble generate_pairs(std::uint64_t count, const ChannelModel& channel, RngStream& rng,
                        const GenerateOptions& options) {
    if (count < 1)
        throw std::invalid_argument("generate_pairs: count must be >= 1");
    channel.validate();

    const LevelScheme scheme = LevelScheme::cesium();
    const StateVector entangled = entangled_pair_state(options.pair_phase, scheme);

    Ensemble ensemble;
    ensemble.metadata.seed = rng.seed();
    ensemble.metadata.channel = channel;
    ensemble.metadata.options = options;
    ensemble.pairs.reserve(count);

    for (std::uint64_t label = 1; label <= count; ++label) {
        const bool absorbed_a = rng.uniform() < channel.eta_a;
        const bool absorbed_b = rng.uniform() < channel.eta_b;
        bool kept_a, kept_b;
        if (options.herald == HeraldScheme::Fluorescence) {
            kept_a = herald_check(absorbed_a, channel, rng);
            kept_b = herald_check(absorbed_b, channel, rng);
        } else {
            // No herald: nothing to discard on. Draws still consumed so the
            // stream layout does not depend on the scheme.
            rng.uniform();
            rng.uniform();
            kept_a = kept_b = true;
        }
        // Trajectory draws for half-delivered pairs: the lone atom's marginal
        // is maximally mixed, sampled here as a random basis state.
        const int traj_a = rng.uniform() < 0.5 ? 0 : 1;
        const int traj_b = rng.uniform() < 0.5 ? 0 : 1;

        AtomPairRecord record;
        record.label = label;
        record.herald_kept = kept_a && kept_b;
        record.alice_absorbed = absorbed_a;
        record.bob_absorbed = absorbed_b;
        if (absorbed_a && absorbed_b)
            record.joint_state = entangled;
        else if (absorbed_a)
            record.joint_state = product_state(traj_a, 0);
        else if (absorbed_b)
            record.joint_state = product_state(0, traj_b);
        else
            record.joint_state = product_state(0, 0);
        ensemble.pairs.push_back(std::move(record));
    }
    return ensemble;
}

Ensemble stockpile(const std::vector<Ensemble>& ensembles) {
    Ensemble merged;
    bool have_metadata = false;
    std::uint64_t next = 1;
    for (const Ensemble& e : ensembles) {
        if (e.started)
            throw std::invalid_argument("stockpile: cannot merge a started ensemble");
        if (!have_metadata && !e.pairs.empty()) {
            merged.metadata = e.metadata;
            have_metadata = true;
        }
        for (const AtomPairRecord& r : e.pairs) {
            merged.pairs.push_back(r);
            merged.pairs.back().label = next++;
        }
    }
    for (std::size_t i = 0; i < merged.pairs.size(); ++i)
        if (merged.pairs[i].label != i + 1)
            throw std::logic_error("stockpile: duplicate label after merge");
    return merged;
}

void apply_storage_dephasing(Ensemble& ensemble, double gamma, double duration,
                             RngStream& rng) {
    if (gamma < 0.0 || duration < 0.0)
        throw std::invalid_argument("apply_storage_dephasing: negative inputs");
    if (ensemble.started)
        throw std::invalid_argument("apply_storage_dephasing: ensemble already started");
    const double p_flip = 0.5 * (1.0 - std::exp(-gamma * duration));
    for (AtomPairRecord& r : ensemble.pairs) {
        // Two draws per record, consumed unconditionally.
        const bool flip_a = rng.uniform() < p_flip;
        const bool flip_b = rng.uniform() < p_flip;
        if (flip_a)
            r.joint_state = pauli_z(r.joint_state, 0);
        if (flip_b)
            r.joint_state = pauli_z(r.joint_state, 1);
    }
}

double expected_keep_probability(const ChannelModel& channel, HeraldScheme herald) {
    channel.validate();
    if (herald == HeraldScheme::None)
        return 1.0;
    const double keep_a =
        channel.eta_a * (1.0 - channel.p_false) + (1.0 - channel.eta_a) * channel.p_miss;
    const double keep_b =
        channel.eta_b * (1.0 - channel.p_false) + (1.0 - channel.eta_b) * channel.p_miss;
    return keep_a * keep_b;
}

namespace {

const char* tag_name(const std::optional<SubensembleType>& tag) {
    if (!tag)
        return "-";
    return *tag == SubensembleType::I ? "I" : "II";
}

std::optional<SubensembleType> tag_from_name(const std::string& s) {
    if (s == "-") return std::nullopt;
    if (s == "I") return SubensembleType::I;
    if (s == "II") return SubensembleType::II;
    throw std::invalid_argument("unknown type tag '" + s + "'");
}

} // namespace

void write_ensemble(std::ostream& out, const Ensemble& ensemble) {
    out << "# qcs shared-pair ensemble\n";
    out << "format = qcs-ensemble-v1\n";
    out << "seed = " << ensemble.metadata.seed << "\n";
    out << "eta_a = " << fmt_double(ensemble.metadata.channel.eta_a) << "\n";
    out << "eta_b = " << fmt_double(ensemble.metadata.channel.eta_b) << "\n";
    out << "p_miss = " << fmt_double(ensemble.metadata.channel.p_miss) << "\n";
    out << "p_false = " << fmt_double(ensemble.metadata.channel.p_false) << "\n";
    out << "pair_phase = " << pair_phase_name(ensemble.metadata.options.pair_phase) << "\n";
    out << "herald = " << herald_name(ensemble.metadata.options.herald) << "\n";
    for (const std::string& line : ensemble.metadata.config_echo)
        out << "config = " << line << "\n";
    out << "started = " << (ensemble.started ? 1 : 0) << "\n";
    out << "pairs = " << ensemble.pairs.size() << "\n";
    out << "# label kept abs_a abs_b re00 im00 re01 im01 re10 im10 re11 im11 tag\n";
    for (const AtomPairRecord& r : ensemble.pairs) {
        out << r.label << " " << (r.herald_kept ? 1 : 0) << " " << (r.alice_absorbed ? 1 : 0)
            << " " << (r.bob_absorbed ? 1 : 0);
        for (const cdouble& a : r.joint_state.amplitudes())
            out << " " << fmt_double(a.real()) << " " << fmt_double(a.imag());
        out << " " << tag_name(r.type_tag) << "\n";
    }
}

Ensemble read_ensemble(std::istream& in) {
    Ensemble ensemble;
    std::string line;
    int line_no = 0;
    bool saw_format = false;
    std::uint64_t expected_pairs = 0;
    bool in_records = false;

    auto fail = [&](const std::string& what) {
        throw std::runtime_error("ensemble line " + std::to_string(line_no) + ": " + what);
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (is_comment_or_blank(line))
            continue;
        if (!in_records) {
            std::string key, value;
            if (!split_key_value(line, key, value))
                fail("expected key = value");
            if (key == "format") {
                if (value != "qcs-ensemble-v1")
                    fail("unsupported format '" + value + "'");
                saw_format = true;
            } else if (key == "seed") {
                ensemble.metadata.seed = parse_u64(value);
            } else if (key == "eta_a") {
                ensemble.metadata.channel.eta_a = parse_double(value);
            } else if (key == "eta_b") {
                ensemble.metadata.channel.eta_b = parse_double(value);
            } else if (key == "p_miss") {
                ensemble.metadata.channel.p_miss = parse_double(value);
            } else if (key == "p_false") {
                ensemble.metadata.channel.p_false = parse_double(value);
            } else if (key == "pair_phase") {
                ensemble.metadata.options.pair_phase = pair_phase_from_name(value);
            } else if (key == "herald") {
                ensemble.metadata.options.herald = herald_from_name(value);
            } else if (key == "config") {
                ensemble.metadata.config_echo.push_back(value);
            } else if (key == "started") {
                ensemble.started = parse_u64(value) != 0;
            } else if (key == "pairs") {
                expected_pairs = parse_u64(value);
                in_records = true;
                // Stop after the declared record count so appended sections
                // (sync run data) stay in the stream for the caller.
                if (expected_pairs == 0)
                    break;
            } else {
                fail("unknown key '" + key + "'");
            }
            continue;
        }
        std::istringstream fields(line);
        std::uint64_t label = 0;
        int kept = 0, abs_a = 0, abs_b = 0;
        if (!(fields >> label >> kept >> abs_a >> abs_b))
            fail("bad record prefix");
        std::vector<cdouble> amps(4);
        for (cdouble& a : amps) {
            std::string re, im;
            if (!(fields >> re >> im))
                fail("bad amplitude");
            a = {parse_double(re), parse_double(im)};
        }
        std::string tag;
        if (!(fields >> tag))
            fail("missing type tag");
        AtomPairRecord record;
        record.label = label;
        record.herald_kept = kept != 0;
        record.alice_absorbed = abs_a != 0;
        record.bob_absorbed = abs_b != 0;
        record.joint_state = StateVector(2, std::move(amps));
        record.type_tag = tag_from_name(tag);
        ensemble.pairs.push_back(std::move(record));
        if (ensemble.pairs.size() == expected_pairs)
            break;
    }
    if (!saw_format)
        throw std::runtime_error("ensemble: missing format line");
    if (ensemble.pairs.size() != expected_pairs)
        throw std::runtime_error("ensemble: record count mismatch");
    for (std::size_t i = 0; i < ensemble.pairs.size(); ++i)
        if (ensemble.pairs[i].label != i + 1)
            throw std::runtime_error("ensemble: labels must be 1..N in order");
    return ensemble;
}

void write_ensemble_file(const std::string& path, const Ensemble& ensemble) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    write_ensemble(out, ensemble);
}

Ensemble read_ensemble_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "'");
    return read_ensemble(in);
}

} // namespace qcs
