// Frequency-offset comparison between Alice's and Bob's clocks: a first
// shared ensemble fixes t0 and yields both parties' fringe fits, a second
// ensemble is started at t1 = n periods of Alice's fitted frequency, and the
// dephasing between Bob's two clock ensembles delivers the fractional offset
// over the long baseline.
#pragma once

#include <cstdint>

#include "qcs/fit.hpp"
#include "qcs/protocol.hpp"

namespace qcs {

// The source text's t1 = n/Omega_A leaves open whether n counts full periods
// or radians; both conventions are supported and reported.
enum class PhaseConvention { Periods, Radians };

const char* phase_convention_name(PhaseConvention c);

struct CompareBudgets {
    std::uint64_t trials_per_point = 1000;
    int scan_points = 50;       // upper bound; reduced to fit the label budget
    double scan_periods = 6.0;  // nominal fringe periods spanned by each scan
    int window_points = 25;
    double window_periods = 3.0;
};

struct ComparisonResult {
    double omega_a_hat = 0.0;
    double omega_a_se = 0.0;
    double omega_b_hat = 0.0;
    double omega_b_se = 0.0;
    double t1 = 0.0;
    std::uint64_t n_periods = 0;
    PhaseConvention convention = PhaseConvention::Periods;
    double fractional_offset = 0.0;
    double fractional_offset_se = 0.0;

    // Diagnostics from the window phase comparison.
    double phase_first = 0.0; // Bob's first clock at the window, rad
    double phase_first_se = 0.0;
    double phase_second = 0.0; // Bob's second clock (expected ~ 0)
    double phase_second_se = 0.0;
    int alice_scan_points = 0;
    int bob_scan_points = 0;
    int window_points_used = 0;

    // Datasets, retained for reporting.
    FringeDataset alice_scan;
    FringeDataset bob_scan;
    FringeDataset window_first;
    FringeDataset window_second;
};

// Runs the full procedure on two unstarted ensembles. Alice retains the
// `alice_keeps` subensemble; Bob works with the complement. In Exact mode the
// readouts return expected counts, which makes the whole comparison
// deterministic and noiseless.
ComparisonResult compare_clocks(Ensemble& first, Ensemble& second,
                                const ClockConfig& alice_clock,
                                const ClockConfig& bob_clock, std::uint64_t n_periods,
                                PhaseConvention convention, const CompareBudgets& budgets,
                                SampleMode mode, RngStream& rng,
                                SubensembleType alice_keeps = SubensembleType::I);

// Earliest time >= `earliest` at which the fitted fringe sits on a maximum of
// P1 (omega * t = pi mod 2pi).
double peak_start_strategy(const FringeFit& first_fit, double earliest);

} // namespace qcs
