// Clock parameters and the closed Ramsey sequence: Hadamard, detuned free
// evolution (optionally dephased), second Hadamard, Z readout probabilities.
#pragma once

#include <cmath>
#include <stdexcept>

namespace qcs {

// The drive angular frequency is derived, never stored: at cesium magnitudes
// (2*pi*nu0 ~ 5.8e10 rad/s) a stored omega_drive could not represent the
// detuning to better than ~1e-5 rad/s in binary64.
class ClockConfig {
  public:
    ClockConfig(double nu0, double detuning, double b_param, double gamma)
        : nu0_(nu0), detuning_(detuning), b_param_(b_param), gamma_(gamma) {
        if (!(nu0 > 0.0))
            throw std::invalid_argument("ClockConfig: nu0 must be positive");
        if (!(b_param > 0.0))
            throw std::invalid_argument("ClockConfig: b_param must be positive");
        if (gamma < 0.0)
            throw std::invalid_argument("ClockConfig: gamma must be >= 0");
    }

    double nu0() const { return nu0_; }
    double detuning() const { return detuning_; }
    double omega_drive() const { return 2.0 * kPi * nu0_ + detuning_; }
    double b_param() const { return b_param_; }
    double gamma() const { return gamma_; }

    static constexpr double kPi = 3.14159265358979323846264338327950288;

  private:
    double nu0_;      // resonance frequency (E1 - E0)/h, Hz
    double detuning_; // drive minus resonance angular frequency, rad/s
    double b_param_;  // microwave amplitude parameter b = mu_B B / (2 hbar), rad/s
    double gamma_;    // per-atom dephasing rate, 1/s
};

struct RamseyProbabilities {
    double p0;
    double p1;
};

// Exact probabilities of the full Hadamard -> free evolution -> Hadamard
// sequence started from |0>. With use_density the evolution runs through the
// density-matrix path and applies the configured dephasing rate.
RamseyProbabilities ramsey_sequence(const ClockConfig& clock, double duration,
                                    bool use_density = false);

// |detuning| / b. Ratios at or above kRamseyValidityThreshold mean the
// two-level fringe formula is no longer a good approximation of the full
// microwave interaction.
double ramsey_validity(const ClockConfig& clock);

inline constexpr double kRamseyValidityThreshold = 0.01;

inline bool ramsey_validity_warning(const ClockConfig& clock) {
    return ramsey_validity(clock) >= kRamseyValidityThreshold;
}

} // namespace qcs
