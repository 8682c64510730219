#include <doctest.h>

#include <cmath>

#include "qcs/compare.hpp"
#include "support/oracles.hpp"

using namespace qcs;
using oracles::kPi;

namespace {

ClockConfig clock_with(double detuning, double gamma = 0.0) {
    return {kCesiumClockHz, detuning, 1e6, gamma};
}

Ensemble fresh_ensemble(std::uint64_t pairs, std::uint64_t seed) {
    RngStream rng(seed);
    return generate_pairs(pairs, ChannelModel{}, rng);
}

CompareBudgets small_budgets() {
    CompareBudgets b;
    b.trials_per_point = 200;
    b.scan_points = 20;
    b.scan_periods = 6.0;
    b.window_points = 10;
    b.window_periods = 3.0;
    return b;
}

} // namespace

TEST_CASE("identical clocks compare to a null offset in exact mode") {
    const double omega = 2.0 * kPi * 5.0;
    Ensemble first = fresh_ensemble(20000, 201);
    Ensemble second = fresh_ensemble(20000, 202);
    RngStream rng(203);
    const ComparisonResult r =
        compare_clocks(first, second, clock_with(omega), clock_with(omega), 100,
                       PhaseConvention::Periods, small_budgets(), SampleMode::Exact, rng);
    CHECK(std::abs(r.fractional_offset) < 1e-9);
    CHECK(std::abs(r.omega_a_hat - omega) / omega < 1e-9);
    CHECK(std::abs(r.omega_b_hat - omega) / omega < 1e-9);
    // t1 sits exactly n periods of the fitted frequency after t0.
    CHECK(r.t1 * r.omega_a_hat == doctest::Approx(2.0 * kPi * 100.0).epsilon(1e-12));
}

TEST_CASE("an injected offset is recovered inside its reported interval") {
    const double omega = 2.0 * kPi * 5.0;
    const double delta = 1e-3;
    Ensemble first = fresh_ensemble(100000, 204);
    Ensemble second = fresh_ensemble(100000, 205);
    RngStream rng(206);
    CompareBudgets budgets; // full defaults: 1000 trials/point
    const ComparisonResult r = compare_clocks(
        first, second, clock_with(omega), clock_with(omega * (1.0 + delta)), 100,
        PhaseConvention::Periods, budgets, SampleMode::Sampled, rng);
    CHECK(std::abs(r.fractional_offset - delta) < 3.0 * r.fractional_offset_se);
    CHECK(r.fractional_offset_se < 5e-3);
}

TEST_CASE("the offset estimate is linear in the injected offset") {
    const double omega = 2.0 * kPi * 5.0;
    int idx = 0;
    for (double delta : {1e-4, 3e-4, 1e-3}) {
        Ensemble first = fresh_ensemble(20000, 210 + static_cast<std::uint64_t>(idx));
        Ensemble second = fresh_ensemble(20000, 230 + static_cast<std::uint64_t>(idx));
        RngStream rng(250 + static_cast<std::uint64_t>(idx));
        const ComparisonResult r = compare_clocks(
            first, second, clock_with(omega), clock_with(omega * (1.0 + delta)), 50,
            PhaseConvention::Periods, small_budgets(), SampleMode::Exact, rng);
        CHECK(std::abs(r.fractional_offset - delta) < 1e-8);
        ++idx;
    }
}

TEST_CASE("a longer baseline tightens the reported uncertainty monotonically") {
    const double omega = 2.0 * kPi * 5.0;
    double previous = 1e9;
    for (std::uint64_t n : {10ULL, 100ULL, 1000ULL}) {
        Ensemble first = fresh_ensemble(20000, 260);
        Ensemble second = fresh_ensemble(20000, 261);
        RngStream rng(262);
        const ComparisonResult r =
            compare_clocks(first, second, clock_with(omega), clock_with(omega), n,
                           PhaseConvention::Periods, small_budgets(), SampleMode::Exact, rng);
        CHECK(r.fractional_offset_se < previous);
        previous = r.fractional_offset_se;
    }
}

TEST_CASE("the radian convention spaces the second start differently") {
    const double omega = 2.0 * kPi * 5.0;
    Ensemble first_p = fresh_ensemble(20000, 270);
    Ensemble second_p = fresh_ensemble(20000, 271);
    RngStream rng_p(272);
    const ComparisonResult periods =
        compare_clocks(first_p, second_p, clock_with(omega), clock_with(omega), 50,
                       PhaseConvention::Periods, small_budgets(), SampleMode::Exact, rng_p);
    Ensemble first_r = fresh_ensemble(20000, 270);
    Ensemble second_r = fresh_ensemble(20000, 271);
    RngStream rng_r(272);
    const ComparisonResult radians =
        compare_clocks(first_r, second_r, clock_with(omega), clock_with(omega), 50,
                       PhaseConvention::Radians, small_budgets(), SampleMode::Exact, rng_r);
    CHECK(periods.t1 == doctest::Approx(2.0 * kPi * radians.t1).epsilon(1e-9));
    CHECK(std::abs(radians.fractional_offset) < 1e-8);
    CHECK(radians.convention == PhaseConvention::Radians);
}

TEST_CASE("the mirrored subensemble assignment works as well") {
    const double omega = 2.0 * kPi * 5.0;
    Ensemble first = fresh_ensemble(20000, 280);
    Ensemble second = fresh_ensemble(20000, 281);
    RngStream rng(282);
    const ComparisonResult r = compare_clocks(
        first, second, clock_with(omega), clock_with(omega), 50, PhaseConvention::Periods,
        small_budgets(), SampleMode::Exact, rng, SubensembleType::II);
    CHECK(std::abs(r.fractional_offset) < 1e-8);
}

TEST_CASE("budget underflow surfaces as an insufficient-data failure") {
    const double omega = 2.0 * kPi * 5.0;
    Ensemble first = fresh_ensemble(100, 290);
    Ensemble second = fresh_ensemble(100, 291);
    RngStream rng(292);
    try {
        compare_clocks(first, second, clock_with(omega), clock_with(omega), 10,
                       PhaseConvention::Periods, small_budgets(), SampleMode::Exact, rng);
        FAIL("expected an insufficient-data error");
    } catch (const FitError& e) {
        CHECK(e.kind() == FitErrorKind::InsufficientData);
    }
}

TEST_CASE("comparison preconditions are enforced") {
    Ensemble first = fresh_ensemble(100, 293);
    Ensemble second = fresh_ensemble(100, 294);
    RngStream rng(295);
    CHECK_THROWS_AS(compare_clocks(first, second, clock_with(-3.0), clock_with(3.0), 10,
                                   PhaseConvention::Periods, small_budgets(),
                                   SampleMode::Exact, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(compare_clocks(first, second, clock_with(3.0), clock_with(3.0), 0,
                                   PhaseConvention::Periods, small_budgets(),
                                   SampleMode::Exact, rng),
                    std::invalid_argument);
}

TEST_CASE("the second clock starts on a fringe maximum") {
    FringeFit fit;
    fit.omega = 2.0 * kPi;
    CHECK(peak_start_strategy(fit, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(peak_start_strategy(fit, 0.6) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(peak_start_strategy(fit, 1.5) == doctest::Approx(1.5).epsilon(1e-12));

    FringeFit degenerate;
    degenerate.omega = 0.0;
    CHECK_THROWS_AS(peak_start_strategy(degenerate, 0.0), FitError);
    CHECK_THROWS_AS(peak_start_strategy(fit, -1.0), std::invalid_argument);
}
