#include <doctest.h>

#include <cmath>
#include <sstream>

#include "qcs/fit.hpp"
#include "qcs/rng.hpp"
#include "support/oracles.hpp"

using namespace qcs;
using oracles::kPi;

namespace {

FringeDataset exact_dataset(double omega, double gamma, int points, double span,
                            double trials = 1000.0) {
    FringeDataset data;
    for (int j = 1; j <= points; ++j) {
        const double t = span * j / points;
        data.points.push_back({t, oracles::closed_p1(omega, gamma, t) * trials, trials});
    }
    return data;
}

FringeDataset sampled_dataset(double omega, double gamma, int points, double span,
                              std::uint64_t trials, RngStream& rng) {
    FringeDataset data;
    for (int j = 1; j <= points; ++j) {
        const double t = span * j / points;
        const double p = oracles::closed_p1(omega, gamma, t);
        double ones = 0.0;
        for (std::uint64_t s = 0; s < trials; ++s)
            ones += rng.bernoulli(p) ? 1.0 : 0.0;
        data.points.push_back({t, ones, static_cast<double>(trials)});
    }
    return data;
}

} // namespace

TEST_CASE("noiseless fringe data returns the generator") {
    const double omega = 2.0 * kPi * 5.0;
    const FringeDataset data = exact_dataset(omega, 0.0, 50, 1.2);
    const FringeFit fit = fit_fringe(data);
    CHECK(std::abs(fit.omega - omega) / omega < 1e-6);
    CHECK(std::abs(fit.gamma) < 1e-6);
    CHECK(fit.chi2 < 1e-12);
}

TEST_CASE("noiseless dephased fringe data returns both parameters") {
    const double omega = 2.0 * kPi * 3.0;
    const double gamma = 0.8;
    const FringeDataset data = exact_dataset(omega, gamma, 60, 2.0);
    const FringeFit fit = fit_fringe(data);
    CHECK(std::abs(fit.omega - omega) / omega < 1e-6);
    CHECK(std::abs(fit.gamma - gamma) < 1e-6);
    CHECK(fit.chi2 < 1e-12);
}

TEST_CASE("constant data is flagged as degenerate") {
    FringeDataset flat;
    for (int j = 1; j <= 30; ++j)
        flat.points.push_back({0.1 * j, 500.0, 1000.0});
    try {
        fit_fringe(flat);
        FAIL("expected a degenerate-fit error");
    } catch (const FitError& e) {
        CHECK(e.kind() == FitErrorKind::Degenerate);
    }
}

TEST_CASE("too few points or too little span are rejected") {
    const double omega = 2.0 * kPi;
    FringeDataset tiny = exact_dataset(omega, 0.0, 4, 2.0);
    try {
        fit_fringe(tiny);
        FAIL("expected an insufficient-data error");
    } catch (const FitError& e) {
        CHECK(e.kind() == FitErrorKind::InsufficientData);
    }

    FringeDataset narrow = exact_dataset(omega, 0.0, 20, 0.45); // less than one period
    narrow.clock_hint = omega;
    try {
        fit_fringe(narrow);
        FAIL("expected an insufficient-span error");
    } catch (const FitError& e) {
        CHECK(e.kind() == FitErrorKind::InsufficientSpan);
    }
}

TEST_CASE("the clock hint replaces the spectral scan as the initializer") {
    const double omega = 2.0 * kPi * 7.0;
    FringeDataset data = exact_dataset(omega, 0.0, 40, 1.0);
    data.clock_hint = omega * 1.02;
    const FringeFit fit = fit_fringe(data);
    CHECK(std::abs(fit.omega - omega) / omega < 1e-8);
}

TEST_CASE("binomial-noise frequency estimates are calibrated at three sigma") {
    const double omega = 2.0 * kPi * 5.0;
    const int points = 40;
    const double span = 1.2; // six fringe periods
    const std::uint64_t trials = 1000;
    RngStream rng(101);
    int covered = 0;
    int runs = 0;
    for (int rep = 0; rep < 500; ++rep) {
        RngStream rep_rng = rng.substream(static_cast<std::uint64_t>(rep));
        const FringeDataset data = sampled_dataset(omega, 0.0, points, span, trials, rep_rng);
        const FringeFit fit = fit_fringe(data);
        ++runs;
        if (std::abs(fit.omega - omega) <= 3.0 * fit.omega_se)
            ++covered;
    }
    CHECK(runs == 500);
    CHECK(covered >= 495); // >= 99 % empirical coverage
}

TEST_CASE("phase fits recover injected phases over the whole circle") {
    const double omega = 2.0 * kPi * 4.0;
    const double trials = 1000.0;
    for (double psi : {-3.0, -1.2, 0.0, 0.4, 1.9, 3.1}) {
        FringeDataset data;
        for (int j = 1; j <= 25; ++j) {
            const double t = 0.75 * j / 25.0; // three periods
            const double p = 0.5 * (1.0 - std::cos(omega * t + psi));
            data.points.push_back({t, p * trials, trials});
        }
        const PhaseFit fit = fit_phase(data, omega);
        CHECK(std::abs(std::remainder(fit.phase - psi, 2.0 * kPi)) < 1e-8);
        CHECK(fit.phase_se > 0.0);
    }
}

TEST_CASE("phase fits accept a decaying visibility model") {
    const double omega = 2.0 * kPi * 4.0;
    const double gamma = 0.3;
    const double offset = 2.0; // clock started two seconds before the window
    const double psi = 0.8;
    FringeDataset data;
    for (int j = 1; j <= 30; ++j) {
        const double t = 0.75 * j / 30.0;
        const double p = 0.5 * (1.0 - std::exp(-gamma * (t + offset)) * std::cos(omega * t + psi));
        data.points.push_back({t, p * 2000.0, 2000.0});
    }
    const PhaseFit fit = fit_phase(data, omega, gamma, offset);
    CHECK(std::abs(fit.phase - psi) < 1e-8);
}

TEST_CASE("fringe datasets round-trip through the delimited text format") {
    RngStream rng(102);
    FringeDataset data = sampled_dataset(2.0 * kPi * 5.0, 0.1, 20, 1.0, 500, rng);
    data.clock_hint = 31.5;

    std::stringstream first;
    write_fringe_dataset(first, data);
    const std::string text = first.str();
    const FringeDataset parsed = read_fringe_dataset(first);
    REQUIRE(parsed.points.size() == data.points.size());
    CHECK(parsed.clock_hint == data.clock_hint);
    for (std::size_t i = 0; i < data.points.size(); ++i) {
        CHECK(parsed.points[i].time == data.points[i].time);
        CHECK(parsed.points[i].successes == data.points[i].successes);
        CHECK(parsed.points[i].trials == data.points[i].trials);
    }

    std::stringstream second;
    write_fringe_dataset(second, parsed);
    CHECK(second.str() == text);
}

TEST_CASE("fringe datasets validate their invariants") {
    FringeDataset bad_trials;
    bad_trials.points.push_back({0.1, 0.0, 0.0});
    CHECK_THROWS_AS(bad_trials.validate(), std::invalid_argument);

    FringeDataset unsorted;
    unsorted.points.push_back({0.2, 1.0, 10.0});
    unsorted.points.push_back({0.1, 1.0, 10.0});
    CHECK_THROWS_AS(unsorted.validate(), std::invalid_argument);

    FringeDataset overfull;
    overfull.points.push_back({0.1, 20.0, 10.0});
    CHECK_THROWS_AS(overfull.validate(), std::invalid_argument);
}
