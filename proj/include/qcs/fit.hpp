// Frequency and phase estimation from binomial fringe counts: weighted
// least squares on P1(t) = (1 - exp(-gamma t) cos(omega t))/2 via damped
// Gauss-Newton, initialized from a coarse spectral scan.
#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcs {

enum class FitErrorKind {
    InsufficientData, // fewer than 5 points or budget too small
    InsufficientSpan, // data span below one fringe period
    Degenerate,       // no fringe information (omega unidentifiable)
    NoConvergence,
};

class FitError : public std::runtime_error {
  public:
    FitError(FitErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    FitErrorKind kind() const { return kind_; }

  private:
    FitErrorKind kind_;
};

struct FringePoint {
    double time = 0.0;      // seconds since clock start
    double successes = 0.0; // |1> counts; fractional for expectation-valued data
    double trials = 0.0;
};

struct FringeDataset {
    std::vector<FringePoint> points;
    std::optional<double> clock_hint; // initial omega guess, rad/s

    void validate() const; // trials >= 1 everywhere, times strictly increasing
};

// Delimited text: "time successes trials" per line, '#' comments. An optional
// "# hint <omega>" comment carries the clock hint.
void write_fringe_dataset(std::ostream& out, const FringeDataset& data);
FringeDataset read_fringe_dataset(std::istream& in);
void write_fringe_dataset_file(const std::string& path, const FringeDataset& data);
FringeDataset read_fringe_dataset_file(const std::string& path);

struct FringeFit {
    double omega = 0.0;
    double gamma = 0.0;
    double omega_se = 0.0;
    double gamma_se = 0.0;
    double covariance = 0.0; // cov(omega, gamma)
    double chi2 = 0.0;
    int dof = 0;
    int iterations = 0;
};

// Two-parameter (omega, gamma) fit with phase pinned to zero at t = 0.
// Deterministic given the data. gamma is left unconstrained so its estimator
// stays calibrated around gamma = 0; negative fitted values are consistent
// with zero at their reported standard error.
FringeFit fit_fringe(const FringeDataset& data);

struct PhaseFit {
    double phase = 0.0; // radians, in (-pi, pi]
    double phase_se = 0.0;
    double chi2 = 0.0;
    int iterations = 0;
};

// One-parameter phase fit of P1(t) = (1 - V(t) cos(omega t + phase))/2 with
// omega fixed and visibility V(t) = exp(-gamma_vis (t + vis_offset)); times
// are relative to the window reference.
PhaseFit fit_phase(const FringeDataset& data, double omega, double gamma_vis = 0.0,
                   double vis_offset = 0.0);

} // namespace qcs
