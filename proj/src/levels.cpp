#include "qcs/levels.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "qcs/link.hpp"
#include "qcs/textio.hpp"

namespace qcs {

const char* term_name(Term term) {
    switch (term) {
    case Term::S6_1_2: return "6S1/2";
    case Term::P6_3_2: return "6P3/2";
    case Term::S5_1_2: return "5S1/2";
    case Term::P5_1_2: return "5P1/2";
    }
    throw std::logic_error("term_name: bad term");
}

Term term_from_name(const std::string& name) {
    if (name == "6S1/2") return Term::S6_1_2;
    if (name == "6P3/2") return Term::P6_3_2;
    if (name == "5S1/2") return Term::S5_1_2;
    if (name == "5P1/2") return Term::P5_1_2;
    throw std::invalid_argument("unknown term '" + name + "'");
}

void validate_level(const AtomicLevel& level) {
    if (std::abs(level.mf) > level.f)
        throw std::invalid_argument("level " + level_name(level) + ": |mF| > F");
    bool ok = false;
    switch (level.term) {
    case Term::S6_1_2: ok = level.f == 3 || level.f == 4; break;
    case Term::P6_3_2: ok = level.f == 3; break;
    case Term::S5_1_2:
    case Term::P5_1_2: ok = level.f == 1 || level.f == 2; break;
    }
    if (!ok)
        throw std::invalid_argument("level " + level_name(level) + ": F outside the scheme");
}

std::string level_name(const AtomicLevel& level) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s F=%d mF=%+d", term_name(level.term), level.f, level.mf);
    return buf;
}

namespace {

constexpr const char* kRoleNames[] = {
    "ground", "excited_plus", "excited_minus", "logical0", "logical1",
    "park_plus", "park_minus",
};

bool is_s_term(Term t) { return t == Term::S6_1_2 || t == Term::S5_1_2; }

} // namespace

const char* role_name(LevelRole role) {
    return kRoleNames[static_cast<std::size_t>(role)];
}

LevelRole role_from_name(const std::string& name) {
    for (std::size_t i = 0; i < std::size(kRoleNames); ++i)
        if (name == kRoleNames[i])
            return static_cast<LevelRole>(i);
    throw std::invalid_argument("unknown level role '" + name + "'");
}

void LevelScheme::validate() const {
    if (!(nu0 > 0.0))
        throw std::invalid_argument("level scheme: nu0 must be positive");
    for (const AtomicLevel& l : levels)
        validate_level(l);
    auto require = [&](LevelRole role, bool cond, const char* what) {
        if (!cond)
            throw std::invalid_argument(std::string("level scheme: ") + role_name(role) +
                                        ": " + what);
    };
    require(LevelRole::Ground, is_s_term(level(LevelRole::Ground).term), "must be an S level");
    require(LevelRole::Logical0, is_s_term(level(LevelRole::Logical0).term), "must be an S level");
    require(LevelRole::Logical1, is_s_term(level(LevelRole::Logical1).term), "must be an S level");
    require(LevelRole::ParkPlus, is_s_term(level(LevelRole::ParkPlus).term), "must be an S level");
    require(LevelRole::ParkMinus, is_s_term(level(LevelRole::ParkMinus).term), "must be an S level");
    require(LevelRole::ExcitedPlus, !is_s_term(level(LevelRole::ExcitedPlus).term),
            "must be a P level");
    require(LevelRole::ExcitedMinus, !is_s_term(level(LevelRole::ExcitedMinus).term),
            "must be a P level");
    const int g_mf = level(LevelRole::Ground).mf;
    require(LevelRole::ExcitedPlus, level(LevelRole::ExcitedPlus).mf == g_mf + 1,
            "sigma+ selection rule violated");
    require(LevelRole::ExcitedMinus, level(LevelRole::ExcitedMinus).mf == g_mf - 1,
            "sigma- selection rule violated");
    require(LevelRole::Logical1,
            !(level(LevelRole::Logical0) == level(LevelRole::Logical1)),
            "logical levels must differ");
}

LevelScheme LevelScheme::cesium() {
    LevelScheme s;
    s.species = "cesium";
    s.nu0 = kCesiumClockHz;
    s.level(LevelRole::Ground) = {Term::S6_1_2, 3, 0};
    s.level(LevelRole::ExcitedPlus) = {Term::P6_3_2, 3, +1};
    s.level(LevelRole::ExcitedMinus) = {Term::P6_3_2, 3, -1};
    s.level(LevelRole::Logical0) = {Term::S6_1_2, 3, 0};
    s.level(LevelRole::Logical1) = {Term::S6_1_2, 4, 0};
    s.level(LevelRole::ParkPlus) = {Term::S6_1_2, 3, +1};
    s.level(LevelRole::ParkMinus) = {Term::S6_1_2, 3, -1};
    return s;
}

LevelScheme LevelScheme::load(std::istream& in) {
    LevelScheme s;
    std::array<bool, 7> seen{};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_comment_or_blank(line))
            continue;
        std::string key, value;
        if (!split_key_value(line, key, value))
            throw std::invalid_argument("level scheme line " + std::to_string(line_no) +
                                        ": expected key = value");
        if (key == "species") {
            s.species = value;
        } else if (key == "nu0") {
            s.nu0 = parse_double(value);
        } else if (key == "level") {
            std::istringstream fields(value);
            std::string term, role;
            int f = 0, mf = 0;
            if (!(fields >> term >> f >> mf >> role))
                throw std::invalid_argument("level scheme line " + std::to_string(line_no) +
                                            ": expected 'term F mF role'");
            const LevelRole r = role_from_name(role);
            s.level(r) = {term_from_name(term), f, mf};
            seen[static_cast<std::size_t>(r)] = true;
        } else {
            throw std::invalid_argument("level scheme line " + std::to_string(line_no) +
                                        ": unknown key '" + key + "'");
        }
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i])
            throw std::invalid_argument(std::string("level scheme: missing role '") +
                                        kRoleNames[i] + "'");
    s.validate();
    return s;
}

LevelScheme LevelScheme::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open level scheme file '" + path + "'");
    return load(in);
}

void LevelScheme::save(std::ostream& out) const {
    out << "# " << species << " level scheme\n";
    out << "species = " << species << "\n";
    out << "nu0 = " << fmt_double(nu0) << "\n";
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const AtomicLevel& l = levels[i];
        out << "level = " << term_name(l.term) << " " << l.f << " " << l.mf << " "
            << kRoleNames[i] << "\n";
    }
}

double clock_frequency(const FieldConfig& field) {
    if (field.b_static < 0.0)
        throw std::invalid_argument("clock_frequency: negative field");
    return field.nu0 + 427e8 * field.b_static * field.b_static;
}

AtomicLevel polarization_to_level(PhotonPolarization pol, const LevelScheme& scheme) {
    return pol == PhotonPolarization::R ? scheme.level(LevelRole::ExcitedPlus)
                                        : scheme.level(LevelRole::ExcitedMinus);
}

int raman_transfer(const AtomicLevel& excited, const LevelScheme& scheme) {
    if (excited == scheme.level(LevelRole::ExcitedPlus))
        return 0;
    if (excited == scheme.level(LevelRole::ExcitedMinus))
        return 1;
    throw std::invalid_argument("raman_transfer: level " + level_name(excited) +
                                " is outside the transfer path");
}

AtomicLevel raman_transfer_level(const AtomicLevel& excited, const LevelScheme& scheme) {
    return raman_transfer(excited, scheme) == 0 ? scheme.level(LevelRole::Logical0)
                                                : scheme.level(LevelRole::Logical1);
}

bool herald_check(bool absorbed, const ChannelModel& detector, RngStream& rng) {
    if (detector.p_miss < 0.0 || detector.p_miss > 1.0 || detector.p_false < 0.0 ||
        detector.p_false > 1.0)
        throw std::invalid_argument("herald_check: detector rates must lie in [0,1]");
    const double u = rng.uniform();
    return absorbed ? u >= detector.p_false : u < detector.p_miss;
}

} // namespace qcs
