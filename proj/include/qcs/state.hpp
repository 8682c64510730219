// Dense linear-algebra engine for 1..12 qubit pure states and small density
// matrices: Hadamard, detuned free evolution, per-qubit pure dephasing,
// projective measurement in the Z or X basis.
//
// Index convention: qubit 0 is the leftmost ket label and the most
// significant bit of the amplitude index, so |01> of a two-qubit state sits
// at index 1 and |10> at index 2.
#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "qcs/rng.hpp"

namespace qcs {

using cdouble = std::complex<double>;

inline constexpr int kMaxQubits = 12;           // dense state-vector cap
inline constexpr int kMaxDensityQubits = 8;     // dense density-matrix cap
inline constexpr double kNormTolerance = 1e-12;

enum class Basis { Z, X };

class StateVector {
  public:
    // Empty placeholder (dims() == 0); any operation on it is invalid.
    StateVector() = default;
    // |0...0> on `dims` qubits.
    explicit StateVector(int dims);
    // Takes ownership of amplitudes; validates length and normalization.
    StateVector(int dims, std::vector<cdouble> amplitudes);

    int dims() const { return dims_; }
    std::size_t size() const { return amps_.size(); }
    std::span<const cdouble> amplitudes() const { return amps_; }
    const cdouble& amp(std::size_t index) const { return amps_[index]; }

    double norm_squared() const;

    // Bit of `qubit` within basis-state `index` (qubit 0 = MSB).
    int bit(std::size_t index, int qubit) const {
        return static_cast<int>((index >> (dims_ - 1 - qubit)) & 1u);
    }

  private:
    friend StateVector hadamard(const StateVector&, int);
    friend StateVector evolve_free(const StateVector&, double, double);
    friend StateVector pauli_z(const StateVector&, int);
    friend struct MeasurementOutcome;
    friend StateVector unchecked_state(int, std::vector<cdouble>);

    int dims_ = 0;
    std::vector<cdouble> amps_;
};

struct MeasurementOutcome {
    Basis basis;
    std::vector<int> results; // one bit per measured qubit; X basis: 0 = |+>, 1 = |->
    StateVector post_state;   // normalized projection, in the computational representation
};

// |0> -> |+>, |1> -> |-> on the addressed qubit.
StateVector hadamard(const StateVector& state, int qubit_index);

// Rotating-frame free evolution: every qubit's |0> amplitude acquires
// exp(-i*detuning*t/2) and its |1> amplitude exp(+i*detuning*t/2).
StateVector evolve_free(const StateVector& state, double detuning, double duration);

// Pauli Z on the addressed qubit (sign flip on its |1> amplitudes).
StateVector pauli_z(const StateVector& state, int qubit_index);

// Born-rule projective measurement of the listed qubits. Exactly one uniform
// draw is consumed per measured qubit, in the order given.
MeasurementOutcome measure(const StateVector& state, Basis basis,
                           std::span<const int> qubit_indices, RngStream& rng);

// (|0...0> + |1...1>)/sqrt(2) on n qubits, 2 <= n <= 12.
StateVector ghz_state(int n);

// |<a|b>|^2.
double fidelity(const StateVector& a, const StateVector& b);

cdouble inner_product(const StateVector& a, const StateVector& b);

class DensityMatrix {
  public:
    explicit DensityMatrix(const StateVector& pure);
    // Row-major 2^n x 2^n entries; validates Hermiticity and unit trace.
    DensityMatrix(int dims, std::vector<cdouble> entries);

    int dims() const { return dims_; }
    std::size_t dim() const { return dim_; }
    std::span<const cdouble> entries() const { return entries_; }
    const cdouble& entry(std::size_t row, std::size_t col) const {
        return entries_[row * dim_ + col];
    }

    double trace_real() const;
    // Probability of reading bit pattern `index` in the Z basis.
    double diagonal_probability(std::size_t index) const;

  private:
    friend DensityMatrix dephase(const DensityMatrix&, double, double);
    friend DensityMatrix evolve_free(const DensityMatrix&, double, double);
    friend DensityMatrix hadamard(const DensityMatrix&, int);
    friend DensityMatrix partial_trace(const DensityMatrix&, std::span<const int>);

    DensityMatrix() = default;

    int dims_ = 0;
    std::size_t dim_ = 0;
    std::vector<cdouble> entries_;
};

// Independent per-qubit pure dephasing: entry (i, j) decays by
// exp(-gamma * t * hamming(i, j)). Trace and Hermiticity are preserved.
DensityMatrix dephase(const DensityMatrix& rho, double gamma, double duration);

DensityMatrix evolve_free(const DensityMatrix& rho, double detuning, double duration);

DensityMatrix hadamard(const DensityMatrix& rho, int qubit_index);

// Reduced state over `keep_qubits` (ascending order), tracing out the rest.
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep_qubits);

} // namespace qcs
