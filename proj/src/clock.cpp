#include "qcs/clock.hpp"

#include "qcs/state.hpp"

namespace qcs {

RamseyProbabilities ramsey_sequence(const ClockConfig& clock, double duration,
                                    bool use_density) {
    if (duration < 0.0)
        throw std::invalid_argument("ramsey_sequence: negative duration");

    if (use_density) {
        DensityMatrix rho{StateVector(1)};
        rho = hadamard(rho, 0);
        rho = evolve_free(rho, clock.detuning(), duration);
        if (clock.gamma() > 0.0)
            rho = dephase(rho, clock.gamma(), duration);
        rho = hadamard(rho, 0);
        return {rho.diagonal_probability(0), rho.diagonal_probability(1)};
    }

    StateVector psi(1);
    psi = hadamard(psi, 0);
    psi = evolve_free(psi, clock.detuning(), duration);
    psi = hadamard(psi, 0);
    return {std::norm(psi.amp(0)), std::norm(psi.amp(1))};
}

double ramsey_validity(const ClockConfig& clock) {
    if (!(clock.b_param() > 0.0))
        throw std::invalid_argument("ramsey_validity: b_param must be positive");
    return std::abs(clock.detuning()) / clock.b_param();
}

} // namespace qcs
