#include "qcs/state.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace qcs {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

void check_dims(int dims, int max, const char* what) {
    if (dims < 1 || dims > max)
        throw std::invalid_argument(std::string(what) + ": qubit count out of range");
}

} // namespace

StateVector unchecked_state(int dims, std::vector<cdouble> amps) {
    StateVector s;
    s.dims_ = dims;
    s.amps_ = std::move(amps);
    return s;
}

StateVector::StateVector(int dims) : dims_(dims) {
    check_dims(dims, kMaxQubits, "StateVector");
    amps_.assign(std::size_t{1} << dims, cdouble{0.0, 0.0});
    amps_[0] = 1.0;
}

StateVector::StateVector(int dims, std::vector<cdouble> amplitudes)
    : dims_(dims), amps_(std::move(amplitudes)) {
    check_dims(dims, kMaxQubits, "StateVector");
    if (amps_.size() != (std::size_t{1} << dims))
        throw std::invalid_argument("StateVector: amplitude count != 2^dims");
    if (std::abs(norm_squared() - 1.0) > kNormTolerance)
        throw std::invalid_argument("StateVector: amplitudes not normalized");
}

double StateVector::norm_squared() const {
    double s = 0.0;
    for (const cdouble& a : amps_)
        s += std::norm(a);
    return s;
}

StateVector hadamard(const StateVector& state, int qubit_index) {
    if (qubit_index < 0 || qubit_index >= state.dims())
        throw std::out_of_range("hadamard: qubit index out of range");
    const std::size_t stride = std::size_t{1} << (state.dims() - 1 - qubit_index);
    std::vector<cdouble> out(state.amplitudes().begin(), state.amplitudes().end());
    for (std::size_t base = 0; base < out.size(); base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const cdouble a0 = out[i];
            const cdouble a1 = out[i + stride];
            out[i] = (a0 + a1) * kInvSqrt2;
            out[i + stride] = (a0 - a1) * kInvSqrt2;
        }
    }
    return unchecked_state(state.dims(), std::move(out));
}

StateVector evolve_free(const StateVector& state, double detuning, double duration) {
    if (duration < 0.0)
        throw std::invalid_argument("evolve_free: negative duration");
    const int n = state.dims();
    std::vector<cdouble> out(state.amplitudes().begin(), state.amplitudes().end());
    // Basis state with m ones among n qubits carries total phase
    // exp(i * detuning * t * (m - n/2)).
    const double half_angle = 0.5 * detuning * duration;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const int ones = std::popcount(i);
        const double phase = half_angle * (2 * ones - n);
        out[i] *= std::polar(1.0, phase);
    }
    return unchecked_state(n, std::move(out));
}

StateVector pauli_z(const StateVector& state, int qubit_index) {
    if (qubit_index < 0 || qubit_index >= state.dims())
        throw std::out_of_range("pauli_z: qubit index out of range");
    const std::size_t mask = std::size_t{1} << (state.dims() - 1 - qubit_index);
    std::vector<cdouble> out(state.amplitudes().begin(), state.amplitudes().end());
    for (std::size_t i = 0; i < out.size(); ++i)
        if (i & mask)
            out[i] = -out[i];
    return unchecked_state(state.dims(), std::move(out));
}

MeasurementOutcome measure(const StateVector& state, Basis basis,
                           std::span<const int> qubit_indices, RngStream& rng) {
    if (qubit_indices.empty())
        throw std::invalid_argument("measure: no qubits given");
    for (std::size_t i = 0; i < qubit_indices.size(); ++i) {
        if (qubit_indices[i] < 0 || qubit_indices[i] >= state.dims())
            throw std::out_of_range("measure: qubit index out of range");
        for (std::size_t j = i + 1; j < qubit_indices.size(); ++j)
            if (qubit_indices[i] == qubit_indices[j])
                throw std::invalid_argument("measure: duplicate qubit index");
    }

    StateVector work = state;
    if (basis == Basis::X)
        for (int q : qubit_indices)
            work = hadamard(work, q);

    std::vector<cdouble> amps(work.amplitudes().begin(), work.amplitudes().end());
    const int n = state.dims();
    std::vector<int> results;
    results.reserve(qubit_indices.size());
    for (int q : qubit_indices) {
        const std::size_t mask = std::size_t{1} << (n - 1 - q);
        double p1 = 0.0;
        for (std::size_t i = 0; i < amps.size(); ++i)
            if (i & mask)
                p1 += std::norm(amps[i]);
        const int r = rng.uniform() < p1 ? 1 : 0;
        const double p = r == 1 ? p1 : 1.0 - p1;
        const double scale = 1.0 / std::sqrt(p);
        for (std::size_t i = 0; i < amps.size(); ++i) {
            if (static_cast<int>((i & mask) != 0) == r)
                amps[i] *= scale;
            else
                amps[i] = 0.0;
        }
        results.push_back(r);
    }

    StateVector post = unchecked_state(n, std::move(amps));
    if (basis == Basis::X)
        for (int q : qubit_indices)
            post = hadamard(post, q);
    return MeasurementOutcome{basis, std::move(results), std::move(post)};
}

StateVector ghz_state(int n) {
    if (n < 2 || n > kMaxQubits)
        throw std::invalid_argument("ghz_state: n out of range");
    std::vector<cdouble> amps(std::size_t{1} << n, cdouble{0.0, 0.0});
    amps.front() = kInvSqrt2;
    amps.back() = kInvSqrt2;
    return unchecked_state(n, std::move(amps));
}

cdouble inner_product(const StateVector& a, const StateVector& b) {
    if (a.dims() != b.dims())
        throw std::invalid_argument("inner_product: dimension mismatch");
    cdouble s{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i)
        s += std::conj(a.amp(i)) * b.amp(i);
    return s;
}

double fidelity(const StateVector& a, const StateVector& b) {
    return std::norm(inner_product(a, b));
}

DensityMatrix::DensityMatrix(const StateVector& pure)
    : dims_(pure.dims()), dim_(pure.size()) {
    check_dims(dims_, kMaxDensityQubits, "DensityMatrix");
    entries_.resize(dim_ * dim_);
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t c = 0; c < dim_; ++c)
            entries_[r * dim_ + c] = pure.amp(r) * std::conj(pure.amp(c));
}

DensityMatrix::DensityMatrix(int dims, std::vector<cdouble> entries)
    : dims_(dims), dim_(std::size_t{1} << dims), entries_(std::move(entries)) {
    check_dims(dims, kMaxDensityQubits, "DensityMatrix");
    if (entries_.size() != dim_ * dim_)
        throw std::invalid_argument("DensityMatrix: entry count != 4^dims");
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t c = r; c < dim_; ++c)
            if (std::abs(entries_[r * dim_ + c] - std::conj(entries_[c * dim_ + r])) > kNormTolerance)
                throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (std::abs(trace_real() - 1.0) > kNormTolerance)
        throw std::invalid_argument("DensityMatrix: trace != 1");
}

double DensityMatrix::trace_real() const {
    double t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i)
        t += entries_[i * dim_ + i].real();
    return t;
}

double DensityMatrix::diagonal_probability(std::size_t index) const {
    return entries_[index * dim_ + index].real();
}

DensityMatrix dephase(const DensityMatrix& rho, double gamma, double duration) {
    if (gamma < 0.0)
        throw std::invalid_argument("dephase: negative gamma");
    if (duration < 0.0)
        throw std::invalid_argument("dephase: negative duration");
    DensityMatrix out = rho;
    const double decay = gamma * duration;
    for (std::size_t r = 0; r < out.dim_; ++r) {
        for (std::size_t c = 0; c < out.dim_; ++c) {
            const int differing = std::popcount(r ^ c);
            if (differing > 0)
                out.entries_[r * out.dim_ + c] *= std::exp(-decay * differing);
        }
    }
    return out;
}

DensityMatrix evolve_free(const DensityMatrix& rho, double detuning, double duration) {
    if (duration < 0.0)
        throw std::invalid_argument("evolve_free: negative duration");
    DensityMatrix out = rho;
    const int n = rho.dims();
    const double half_angle = 0.5 * detuning * duration;
    for (std::size_t r = 0; r < out.dim_; ++r) {
        for (std::size_t c = 0; c < out.dim_; ++c) {
            const int dr = 2 * std::popcount(r) - n;
            const int dc = 2 * std::popcount(c) - n;
            out.entries_[r * out.dim_ + c] *= std::polar(1.0, half_angle * (dr - dc));
        }
    }
    return out;
}

DensityMatrix hadamard(const DensityMatrix& rho, int qubit_index) {
    if (qubit_index < 0 || qubit_index >= rho.dims())
        throw std::out_of_range("hadamard: qubit index out of range");
    const std::size_t dim = rho.dim();
    const std::size_t stride = std::size_t{1} << (rho.dims() - 1 - qubit_index);
    std::vector<cdouble> work(rho.entries().begin(), rho.entries().end());
    // Apply H from the left (rows), then from the right (columns).
    for (std::size_t c = 0; c < dim; ++c) {
        for (std::size_t base = 0; base < dim; base += 2 * stride) {
            for (std::size_t r = base; r < base + stride; ++r) {
                const cdouble a0 = work[r * dim + c];
                const cdouble a1 = work[(r + stride) * dim + c];
                work[r * dim + c] = (a0 + a1) * kInvSqrt2;
                work[(r + stride) * dim + c] = (a0 - a1) * kInvSqrt2;
            }
        }
    }
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t base = 0; base < dim; base += 2 * stride) {
            for (std::size_t c = base; c < base + stride; ++c) {
                const cdouble a0 = work[r * dim + c];
                const cdouble a1 = work[r * dim + c + stride];
                work[r * dim + c] = (a0 + a1) * kInvSqrt2;
                work[r * dim + c + stride] = (a0 - a1) * kInvSqrt2;
            }
        }
    }
    DensityMatrix out = rho;
    out.entries_ = std::move(work);
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep_qubits) {
    const int n = rho.dims();
    const int k = static_cast<int>(keep_qubits.size());
    if (k < 1 || k > n)
        throw std::invalid_argument("partial_trace: bad subset size");
    for (std::size_t i = 0; i < keep_qubits.size(); ++i) {
        if (keep_qubits[i] < 0 || keep_qubits[i] >= n)
            throw std::out_of_range("partial_trace: qubit index out of range");
        if (i > 0 && keep_qubits[i] <= keep_qubits[i - 1])
            throw std::invalid_argument("partial_trace: indices must be ascending");
    }

    std::vector<int> traced;
    for (int q = 0; q < n; ++q)
        if (std::find(keep_qubits.begin(), keep_qubits.end(), q) == keep_qubits.end())
            traced.push_back(q);

    const std::size_t kept_dim = std::size_t{1} << k;
    const std::size_t traced_dim = std::size_t{1} << traced.size();

    auto compose_index = [&](std::size_t kept_bits, std::size_t traced_bits) {
        std::size_t idx = 0;
        for (int i = 0; i < k; ++i)
            if (kept_bits & (std::size_t{1} << (k - 1 - i)))
                idx |= std::size_t{1} << (n - 1 - keep_qubits[i]);
        for (std::size_t i = 0; i < traced.size(); ++i)
            if (traced_bits & (std::size_t{1} << (traced.size() - 1 - i)))
                idx |= std::size_t{1} << (n - 1 - traced[i]);
        return idx;
    };

    std::vector<cdouble> reduced(kept_dim * kept_dim, cdouble{0.0, 0.0});
    for (std::size_t r = 0; r < kept_dim; ++r)
        for (std::size_t c = 0; c < kept_dim; ++c)
            for (std::size_t t = 0; t < traced_dim; ++t)
                reduced[r * kept_dim + c] +=
                    rho.entry(compose_index(r, t), compose_index(c, t));
    return DensityMatrix(k, std::move(reduced));
}

} // namespace qcs
