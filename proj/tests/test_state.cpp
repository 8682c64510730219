#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>

#include "qcs/rng.hpp"
#include "qcs/state.hpp"
#include "support/oracles.hpp"

using namespace qcs;
using oracles::kInvSqrt2;
using oracles::kPi;

namespace {

StateVector basis_state(int dims, std::size_t index) {
    std::vector<cdouble> amps(std::size_t{1} << dims, cdouble{0.0, 0.0});
    amps[index] = 1.0;
    return StateVector(dims, std::move(amps));
}

StateVector plus_state() {
    return StateVector(1, {kInvSqrt2, kInvSqrt2});
}

StateVector minus_state() {
    return StateVector(1, {kInvSqrt2, -kInvSqrt2});
}

// <X^(x)n> evaluated by the bit-flip pairing sum, independent of the
// library's Hadamard path.
double x_parity_expectation(const StateVector& s) {
    double acc = 0.0;
    const std::size_t mask = s.size() - 1;
    for (std::size_t i = 0; i < s.size(); ++i)
        acc += (std::conj(s.amp(i ^ mask)) * s.amp(i)).real();
    return acc;
}

} // namespace

TEST_CASE("hadamard maps the computational basis onto the superposition basis") {
    const StateVector plus = hadamard(StateVector(1), 0);
    CHECK(std::abs(plus.amp(0) - kInvSqrt2) < 1e-15);
    CHECK(std::abs(plus.amp(1) - kInvSqrt2) < 1e-15);

    const StateVector minus = hadamard(basis_state(1, 1), 0);
    CHECK(std::abs(minus.amp(0) - kInvSqrt2) < 1e-15);
    CHECK(std::abs(minus.amp(1) + kInvSqrt2) < 1e-15);
}

TEST_CASE("hadamard is an involution on random states") {
    RngStream rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int dims = 1 + static_cast<int>(rng.below(3));
        const StateVector psi = oracles::random_state(dims, rng);
        const int q = static_cast<int>(rng.below(static_cast<std::uint64_t>(dims)));
        const StateVector twice = hadamard(hadamard(psi, q), q);
        for (std::size_t i = 0; i < psi.size(); ++i)
            CHECK(std::abs(twice.amp(i) - psi.amp(i)) < 1e-12);
    }
}

TEST_CASE("hadamard on one qubit of the singlet matches the explicit 4x4 product") {
    const StateVector singlet = oracles::singlet();
    const auto h_on_a = oracles::kron(oracles::hadamard2(), oracles::identity(2));
    const std::vector<cdouble> expected =
        oracles::matvec(h_on_a, {singlet.amp(0), singlet.amp(1), singlet.amp(2), singlet.amp(3)});

    const StateVector got = hadamard(singlet, 0);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(std::abs(got.amp(i) - expected[i]) < 1e-14);
}

TEST_CASE("hadamard rejects out-of-range qubits") {
    CHECK_THROWS_AS(hadamard(StateVector(2), 2), std::out_of_range);
    CHECK_THROWS_AS(hadamard(StateVector(2), -1), std::out_of_range);
}

TEST_CASE("free evolution at t=0 is the identity") {
    const StateVector evolved = evolve_free(plus_state(), 3.7, 0.0);
    CHECK(fidelity(evolved, plus_state()) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("free evolution over half a fringe flips |+> to |-> up to a global phase") {
    const double omega = 2.0;
    const double t = kPi / omega;
    const StateVector evolved = evolve_free(plus_state(), omega, t);
    CHECK(fidelity(evolved, minus_state()) == doctest::Approx(1.0).epsilon(1e-12));
    // Global phase is exp(-i pi / 2) relative to |->.
    const cdouble phase = inner_product(minus_state(), evolved);
    CHECK(std::abs(phase - cdouble{0.0, -1.0}) < 1e-12);
}

TEST_CASE("the singlet is stationary under common free evolution") {
    RngStream rng(12);
    const StateVector singlet = oracles::singlet();
    for (int trial = 0; trial < 100; ++trial) {
        const double omega = (rng.uniform() - 0.5) * 200.0;
        const double t = rng.uniform() * 50.0;
        const StateVector evolved = evolve_free(singlet, omega, t);
        CHECK(std::abs(fidelity(evolved, singlet) - 1.0) < 1e-12);
    }
}

TEST_CASE("free evolution rejects negative durations") {
    CHECK_THROWS_AS(evolve_free(plus_state(), 1.0, -0.1), std::invalid_argument);
}

TEST_CASE("state-returning operations preserve the norm") {
    RngStream rng(13);
    for (int trial = 0; trial < 30; ++trial) {
        const int dims = 1 + static_cast<int>(rng.below(4));
        StateVector psi = oracles::random_state(dims, rng);
        const int q = static_cast<int>(rng.below(static_cast<std::uint64_t>(dims)));
        switch (rng.below(3)) {
        case 0: psi = hadamard(psi, q); break;
        case 1: psi = evolve_free(psi, rng.uniform() * 10.0, rng.uniform()); break;
        default: psi = pauli_z(psi, q); break;
        }
        CHECK(std::abs(psi.norm_squared() - 1.0) < 1e-12);
    }
}

TEST_CASE("StateVector validates its invariants") {
    CHECK_THROWS_AS(StateVector(0), std::invalid_argument);
    CHECK_THROWS_AS(StateVector(13), std::invalid_argument);
    CHECK_THROWS_AS(StateVector(1, {1.0, 1.0}), std::invalid_argument);      // not normalized
    CHECK_THROWS_AS(StateVector(2, {1.0, 0.0}), std::invalid_argument);      // wrong length
}

TEST_CASE("dephasing with gamma = 0 leaves the state untouched") {
    const DensityMatrix rho{oracles::singlet()};
    const DensityMatrix out = dephase(rho, 0.0, 5.0);
    for (std::size_t i = 0; i < 16; ++i)
        CHECK(std::abs(out.entries()[i] - rho.entries()[i]) < 1e-15);
}

TEST_CASE("dephasing |+><+| over gamma*t = ln 2 halves the coherences") {
    const DensityMatrix rho{plus_state()};
    const DensityMatrix out = dephase(rho, std::log(2.0), 1.0);
    // 2x2 oracle: diagonal 1/2 untouched, off-diagonal 1/2 -> 1/4.
    CHECK(out.entry(0, 0).real() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(out.entry(1, 1).real() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(out.entry(0, 1).real() == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(out.entry(1, 0).real() == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(out.trace_real() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("fully dephased |+><+| is the maximally mixed state") {
    const DensityMatrix out = dephase(DensityMatrix{plus_state()}, 1.0, 60.0);
    CHECK(std::abs(out.entry(0, 0).real() - 0.5) < 1e-12);
    CHECK(std::abs(out.entry(1, 1).real() - 0.5) < 1e-12);
    CHECK(std::abs(out.entry(0, 1)) < 1e-12);
}

TEST_CASE("dephase rejects negative inputs") {
    const DensityMatrix rho{plus_state()};
    CHECK_THROWS_AS(dephase(rho, -1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(dephase(rho, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("density matrices stay physical through the channel maps") {
    RngStream rng(14);
    for (int trial = 0; trial < 10; ++trial) {
        DensityMatrix rho{oracles::random_state(2, rng)};
        rho = evolve_free(rho, rng.uniform() * 10.0, rng.uniform());
        rho = dephase(rho, rng.uniform(), rng.uniform() * 3.0);
        rho = hadamard(rho, static_cast<int>(rng.below(2)));
        CHECK(std::abs(rho.trace_real() - 1.0) < 1e-12);
        oracles::Matrix m(4, std::vector<cdouble>(4));
        for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t c = 0; c < 4; ++c) {
                m[r][c] = rho.entry(r, c);
                CHECK(std::abs(rho.entry(r, c) - std::conj(rho.entry(c, r))) < 1e-12);
            }
        for (double eig : oracles::hermitian_eigenvalues(m))
            CHECK(eig >= -1e-10);
    }
}

TEST_CASE("partial trace of the singlet is maximally mixed") {
    const DensityMatrix rho{oracles::singlet()};
    const std::array<int, 1> keep_bob{1};
    const DensityMatrix reduced = partial_trace(rho, keep_bob);
    CHECK(std::abs(reduced.entry(0, 0).real() - 0.5) < 1e-12);
    CHECK(std::abs(reduced.entry(1, 1).real() - 0.5) < 1e-12);
    CHECK(std::abs(reduced.entry(0, 1)) < 1e-12);
}

TEST_CASE("Z measurement of |0> always yields 0 and reproduces itself") {
    RngStream rng(15);
    const std::array<int, 1> qubit{0};
    for (int trial = 0; trial < 50; ++trial) {
        const MeasurementOutcome outcome = measure(StateVector(1), Basis::Z, qubit, rng);
        REQUIRE(outcome.results.size() == 1);
        CHECK(outcome.results[0] == 0);
        CHECK(fidelity(outcome.post_state, StateVector(1)) == doctest::Approx(1.0));
    }
}

TEST_CASE("X measurement of Alice's singlet qubit collapses onto the two product states") {
    RngStream rng(16);
    const StateVector psi_i = StateVector(2, {0.5, -0.5, 0.5, -0.5});  // |+>|->
    const StateVector psi_ii = StateVector(2, {0.5, 0.5, -0.5, -0.5}); // |->|+>
    const std::array<int, 1> alice{0};
    int type_i = 0;
    const int trials = 4000;
    for (int trial = 0; trial < trials; ++trial) {
        const MeasurementOutcome outcome = measure(oracles::singlet(), Basis::X, alice, rng);
        if (outcome.results[0] == 0) {
            ++type_i;
            CHECK(std::abs(fidelity(outcome.post_state, psi_i) - 1.0) < 1e-12);
        } else {
            CHECK(std::abs(fidelity(outcome.post_state, psi_ii) - 1.0) < 1e-12);
        }
    }
    // 3 sigma band around 1/2.
    const double band = oracles::binomial_3sigma(0.5, trials);
    CHECK(std::abs(type_i / static_cast<double>(trials) - 0.5) < band);
}

TEST_CASE("X measurement statistics of |0> sit at 1/2 within the binomial band") {
    RngStream rng(17);
    const std::array<int, 1> qubit{0};
    const int trials = 100000;
    int plus = 0;
    for (int trial = 0; trial < trials; ++trial) {
        const MeasurementOutcome outcome = measure(StateVector(1), Basis::X, qubit, rng);
        plus += outcome.results[0] == 0 ? 1 : 0;
    }
    CHECK(std::abs(plus / static_cast<double>(trials) - 0.5) < 0.0047);
}

TEST_CASE("measurement rejects bad qubit lists") {
    RngStream rng(18);
    CHECK_THROWS_AS(measure(StateVector(2), Basis::Z, std::array<int, 0>{}, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(measure(StateVector(2), Basis::Z, std::array<int, 2>{0, 0}, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(measure(StateVector(2), Basis::Z, std::array<int, 1>{5}, rng),
                    std::out_of_range);
}

TEST_CASE("repeating a projective measurement reproduces its results") {
    RngStream rng(19);
    for (int trial = 0; trial < 20; ++trial) {
        const StateVector psi = oracles::random_state(2, rng);
        const std::array<int, 2> qubits{0, 1};
        const Basis basis = trial % 2 == 0 ? Basis::Z : Basis::X;
        const MeasurementOutcome first = measure(psi, basis, qubits, rng);
        const MeasurementOutcome second = measure(first.post_state, basis, qubits, rng);
        CHECK(first.results == second.results);
        CHECK(std::abs(first.post_state.norm_squared() - 1.0) < 1e-12);
    }
}

TEST_CASE("Born statistics pass a chi-square test on random two-qubit states") {
    RngStream state_rng(20);
    RngStream measure_rng(21);
    const std::array<int, 2> qubits{0, 1};
    const int shots = 100000;
    for (int s = 0; s < 10; ++s) {
        StateVector psi = oracles::random_state(2, state_rng);
        // Keep expected counts comfortably high for the chi-square approximation.
        bool ok = true;
        for (std::size_t i = 0; i < 4; ++i)
            ok = ok && std::norm(psi.amp(i)) > 0.05;
        if (!ok) {
            --s;
            continue;
        }
        std::array<int, 4> counts{};
        for (int shot = 0; shot < shots; ++shot) {
            const MeasurementOutcome outcome = measure(psi, Basis::Z, qubits, measure_rng);
            counts[static_cast<std::size_t>(outcome.results[0] * 2 + outcome.results[1])]++;
        }
        double chi2 = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            const double expected = std::norm(psi.amp(i)) * shots;
            chi2 += (counts[i] - expected) * (counts[i] - expected) / expected;
        }
        CHECK(chi2 < oracles::kChi2Crit001Df3);
    }
}

TEST_CASE("ghz_state lays down the two-branch superposition") {
    const StateVector two = ghz_state(2);
    CHECK(std::abs(two.amp(0) - kInvSqrt2) < 1e-15);
    CHECK(std::abs(two.amp(3) - kInvSqrt2) < 1e-15);
    CHECK(std::abs(two.amp(1)) == 0.0);
    CHECK(std::abs(two.amp(2)) == 0.0);

    const StateVector three = ghz_state(3);
    for (std::size_t i = 0; i < 8; ++i) {
        if (i == 0 || i == 7)
            CHECK(std::abs(three.amp(i) - kInvSqrt2) < 1e-15);
        else
            CHECK(std::abs(three.amp(i)) == 0.0);
    }

    CHECK_THROWS_AS(ghz_state(1), std::invalid_argument);
    CHECK_THROWS_AS(ghz_state(13), std::invalid_argument);
}

TEST_CASE("GHZ parity oscillates at n times the detuning") {
    // Oracle: the branches pick up exp(-+ i n omega t / 2), so the X parity
    // is cos(n omega t).
    const double omega = 2.0 * kPi * 3.0;
    for (int n = 2; n <= 4; ++n) {
        const StateVector ghz = ghz_state(n);
        for (int j = 0; j <= 40; ++j) {
            const double t = 0.7 * j / 40.0;
            const StateVector evolved = evolve_free(ghz, omega, t);
            CHECK(std::abs(x_parity_expectation(evolved) - std::cos(n * omega * t)) < 1e-10);
        }
    }
}
