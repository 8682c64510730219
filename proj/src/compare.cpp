#include "qcs/compare.hpp"

#include <cmath>

namespace qcs {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

double wrap_pi(double x) { return std::remainder(x, 2.0 * kPi); }

// Atoms collapsed onto |-> trace the mirror fringe (1 + cos)/2; flipping the
// counts maps them onto the |+>-anchored fit model. The parties know which
// subensemble they read, so this is their bookkeeping, not an oracle.
FringeDataset oriented_for_fit(const FringeDataset& raw, bool from_plus) {
    if (from_plus)
        return raw;
    FringeDataset flipped = raw;
    for (FringePoint& p : flipped.points)
        p.successes = p.trials - p.successes;
    return flipped;
}

// Consumes labels[first .. first + n_points*trials) in even chunks and reads
// each chunk at its grid time. Dataset times are relative to `time_ref`.
FringeDataset scan_fringe(SyncRun& run, const Party& party,
                          std::span<const std::uint64_t> labels, std::size_t first,
                          int n_points, std::uint64_t trials, double t_start, double dt,
                          double time_ref, SampleMode mode, RngStream& rng) {
    FringeDataset data;
    data.points.reserve(static_cast<std::size_t>(n_points));
    const auto chunked = split_evenly(
        labels.subspan(first, static_cast<std::size_t>(n_points) * trials),
        static_cast<std::size_t>(n_points));
    for (int j = 0; j < n_points; ++j) {
        const double at_time = t_start + (j + 1) * dt;
        const ReadoutResult r =
            readout(run, party, chunked[static_cast<std::size_t>(j)], at_time, mode, rng);
        data.points.push_back({at_time - time_ref, r.ones, r.total});
    }
    return data;
}

} // namespace

const char* phase_convention_name(PhaseConvention c) {
    return c == PhaseConvention::Periods ? "periods" : "radians";
}

ComparisonResult compare_clocks(Ensemble& first, Ensemble& second,
                                const ClockConfig& alice_clock,
                                const ClockConfig& bob_clock, std::uint64_t n_periods,
                                PhaseConvention convention, const CompareBudgets& budgets,
                                SampleMode mode, RngStream& rng,
                                SubensembleType alice_keeps) {
    if (n_periods < 1)
        throw std::invalid_argument("compare_clocks: n_periods must be >= 1");
    if (!(alice_clock.detuning() > 0.0) || !(bob_clock.detuning() > 0.0))
        throw std::invalid_argument(
            "compare_clocks: comparison needs positive detunings (the fringe is even "
            "in omega, so the sign is unobservable)");
    if (budgets.trials_per_point < 1 || budgets.scan_points < 5 || budgets.window_points < 3)
        throw std::invalid_argument("compare_clocks: budgets too small");

    const Party alice{PartyName::Alice, alice_clock};
    const Party bob{PartyName::Bob, bob_clock};
    const std::uint64_t trials = budgets.trials_per_point;

    // Step i: the first shared ensemble fixes the common origin t0.
    const double t0 = 0.0;
    SyncRun run1 = alice_start(first, t0, rng);
    const ClassicalMessage msg1 = send_labels(run1, alice_keeps, t0);
    const Selection bob_sel1 = bob_select(run1, msg1);
    const auto alice_labels = run1.labels_of(alice_keeps);
    if (bob_sel1.degenerate || alice_labels.empty())
        throw FitError(FitErrorKind::InsufficientData,
                       "compare_clocks: empty subensemble in the first run");

    // Step ii: both parties fit their own fringe frequency. Bob holds back
    // window_points slots of his first-run atoms for the step-iii comparison.
    const int scan_a = static_cast<int>(
        std::min<std::uint64_t>(budgets.scan_points, alice_labels.size() / trials));
    if (scan_a < 5)
        throw FitError(FitErrorKind::InsufficientData,
                       "compare_clocks: Alice's scan budget is below 5 points");
    const double period_a = 2.0 * kPi / alice_clock.detuning();
    const double dt_a = budgets.scan_periods * period_a / scan_a;

    const bool from_plus = alice_keeps == SubensembleType::I;
    ComparisonResult result;
    result.alice_scan =
        scan_fringe(run1, alice, alice_labels, 0, scan_a, trials, t0, dt_a, t0, mode, rng);
    const FringeFit fit_a = fit_fringe(oriented_for_fit(result.alice_scan, from_plus));

    const std::uint64_t window_reserve =
        static_cast<std::uint64_t>(budgets.window_points) * trials;
    if (bob_sel1.labels.size() < window_reserve + 5 * trials)
        throw FitError(FitErrorKind::InsufficientData,
                       "compare_clocks: Bob's budget cannot cover scan and window");
    const int scan_b = static_cast<int>(std::min<std::uint64_t>(
        budgets.scan_points, (bob_sel1.labels.size() - window_reserve) / trials));
    const double period_b = 2.0 * kPi / bob_clock.detuning();
    const double dt_b = budgets.scan_periods * period_b / scan_b;
    result.bob_scan =
        scan_fringe(run1, bob, bob_sel1.labels, 0, scan_b, trials, t0, dt_b, t0, mode, rng);
    const FringeFit fit_b = fit_fringe(oriented_for_fit(result.bob_scan, from_plus));

    // Step iii: Alice starts the second ensemble after n periods (or radians)
    // of her fitted frequency.
    const double phase_target =
        convention == PhaseConvention::Periods ? 2.0 * kPi * static_cast<double>(n_periods)
                                               : static_cast<double>(n_periods);
    const double t1 = t0 + phase_target / fit_a.omega;
    SyncRun run2 = alice_start(second, t1, rng);
    const ClassicalMessage msg2 = send_labels(run2, alice_keeps, t1);
    const Selection bob_sel2 = bob_select(run2, msg2);
    if (bob_sel2.degenerate)
        throw FitError(FitErrorKind::InsufficientData,
                       "compare_clocks: empty subensemble in the second run");

    const std::uint64_t window_avail1 =
        (bob_sel1.labels.size() - static_cast<std::uint64_t>(scan_b) * trials) / trials;
    const std::uint64_t window_avail2 = bob_sel2.labels.size() / trials;
    const int window_points = static_cast<int>(std::min<std::uint64_t>(
        {static_cast<std::uint64_t>(budgets.window_points), window_avail1, window_avail2}));
    if (window_points < 3)
        throw FitError(FitErrorKind::InsufficientData,
                       "compare_clocks: window budget below 3 points");

    // Bob dephases his second clock against his first on a common time grid
    // right after t1. Using the same grid for both fringes cancels the phase
    // error induced by his finite omega_b knowledge.
    const double dt_w = budgets.window_periods * (2.0 * kPi / fit_b.omega) / window_points;
    const double gamma_vis = std::max(0.0, fit_b.gamma);
    result.window_first =
        scan_fringe(run1, bob, bob_sel1.labels, static_cast<std::size_t>(scan_b) * trials,
                    window_points, trials, t1, dt_w, t1, mode, rng);
    result.window_second = scan_fringe(run2, bob, bob_sel2.labels, 0, window_points, trials,
                                       t1, dt_w, t1, mode, rng);

    const PhaseFit phase1 =
        fit_phase(oriented_for_fit(result.window_first, from_plus), fit_b.omega, gamma_vis,
                  t1 - t0);
    const PhaseFit phase2 = fit_phase(oriented_for_fit(result.window_second, from_plus),
                                      fit_b.omega, gamma_vis, 0.0);

    // The excess of Bob's elapsed phase over Alice's announced target, wrapped
    // into (-pi, pi]: requires |true offset| * phase_target < pi.
    const double excess = wrap_pi(phase1.phase - phase2.phase - phase_target);
    const double offset = excess / phase_target;
    const double rel_a = fit_a.omega_se / fit_a.omega;
    const double var_offset =
        (phase1.phase_se * phase1.phase_se + phase2.phase_se * phase2.phase_se) /
            (phase_target * phase_target) +
        (1.0 + offset) * (1.0 + offset) * rel_a * rel_a;

    result.omega_a_hat = fit_a.omega;
    result.omega_a_se = fit_a.omega_se;
    result.omega_b_hat = fit_b.omega;
    result.omega_b_se = fit_b.omega_se;
    result.t1 = t1;
    result.n_periods = n_periods;
    result.convention = convention;
    result.fractional_offset = offset;
    result.fractional_offset_se = std::sqrt(var_offset);
    result.phase_first = phase1.phase;
    result.phase_first_se = phase1.phase_se;
    result.phase_second = phase2.phase;
    result.phase_second_se = phase2.phase_se;
    result.alice_scan_points = scan_a;
    result.bob_scan_points = scan_b;
    result.window_points_used = window_points;
    return result;
}

double peak_start_strategy(const FringeFit& first_fit, double earliest) {
    if (!(first_fit.omega > 0.0))
        throw FitError(FitErrorKind::Degenerate, "peak_start_strategy: nonpositive omega");
    if (earliest < 0.0)
        throw std::invalid_argument("peak_start_strategy: earliest must be >= 0");
    const double period = 2.0 * kPi / first_fit.omega;
    // Maxima of P1 sit at omega*t = pi (mod 2pi).
    const double first_max = 0.5 * period;
    if (earliest <= first_max)
        return first_max;
    const double k = std::ceil((earliest - first_max) / period - 1e-12);
    return first_max + k * period;
}

} // namespace qcs
