#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

// Dense statevector simulator. Conventions: qubit 0 is the least significant
// bit of a basis index, |0> has Z = +1 (S^z = +1/2).
namespace stdissim::qsim {

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxQubits = 24;

/// Full-register measurement outcome. Bit q is the outcome of qubit q.
struct Bitstring {
    std::uint64_t bits = 0;
    std::size_t n = 0;

    bool operator[](std::size_t q) const noexcept { return (bits >> q) & 1U; }
    Bitstring complement() const noexcept {
        const std::uint64_t mask = n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
        return {~bits & mask, n};
    }

    /// Ket notation, qubit n-1 leftmost: "10" is qubit 1 set.
    static Bitstring from_ket(std::string_view ket) {
        if (ket.size() > 64) throw InvalidInput("bitstring longer than 64 qubits");
        Bitstring b{0, ket.size()};
        for (std::size_t i = 0; i < ket.size(); ++i) {
            const char c = ket[ket.size() - 1 - i];
            if (c == '1') b.bits |= std::uint64_t{1} << i;
            else if (c != '0') throw InvalidInput("bitstring may only contain 0 and 1");
        }
        return b;
    }

    std::string to_ket() const {
        std::string s(n, '0');
        for (std::size_t i = 0; i < n; ++i)
            if ((*this)[i]) s[n - 1 - i] = '1';
        return s;
    }

    friend bool operator==(const Bitstring&, const Bitstring&) = default;
};

/// Row-major 2x2 and 4x4 complex matrices.
using Matrix2 = std::array<Complex, 4>;
using Matrix4 = std::array<Complex, 16>;

/// 4x4 unitary on an ordered qubit pair. Local basis index is
/// 2 * bit(first) + bit(second).
struct TwoQubitUnitary {
    Matrix4 matrix{};
    std::size_t first = 0;
    std::size_t second = 1;
};

template <std::size_t D>
bool is_unitary(const std::array<Complex, D * D>& u, double tol) {
    for (std::size_t i = 0; i < D; ++i)
        for (std::size_t j = 0; j < D; ++j) {
            Complex s = 0.0;
            for (std::size_t k = 0; k < D; ++k) s += std::conj(u[k * D + i]) * u[k * D + j];
            if (std::abs(s - (i == j ? 1.0 : 0.0)) > tol) return false;
        }
    return true;
}

template <std::size_t D>
std::array<Complex, D * D> dagger(const std::array<Complex, D * D>& u) {
    std::array<Complex, D * D> d{};
    for (std::size_t i = 0; i < D; ++i)
        for (std::size_t j = 0; j < D; ++j) d[i * D + j] = std::conj(u[j * D + i]);
    return d;
}

template <std::size_t D>
std::array<Complex, D * D> matmul(const std::array<Complex, D * D>& a, const std::array<Complex, D * D>& b) {
    std::array<Complex, D * D> c{};
    for (std::size_t i = 0; i < D; ++i)
        for (std::size_t k = 0; k < D; ++k)
            for (std::size_t j = 0; j < D; ++j) c[i * D + j] += a[i * D + k] * b[k * D + j];
    return c;
}

namespace gates {

inline Matrix2 pauli_x() { return {0.0, 1.0, 1.0, 0.0}; }
inline Matrix2 pauli_z() { return {1.0, 0.0, 0.0, -1.0}; }
inline Matrix2 hadamard() {
    const double r = std::numbers::sqrt2 / 2.0;
    return {r, r, r, -r};
}
/// exp(-i theta X / 2)
inline Matrix2 rx(double theta) {
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    return {Complex(c, 0.0), Complex(0.0, -s), Complex(0.0, -s), Complex(c, 0.0)};
}
/// exp(-i theta Z / 2)
inline Matrix2 rz(double theta) {
    return {std::polar(1.0, -theta / 2.0), 0.0, 0.0, std::polar(1.0, theta / 2.0)};
}

inline TwoQubitUnitary cnot(std::size_t control, std::size_t target) {
    TwoQubitUnitary u;
    u.first = control;
    u.second = target;
    u.matrix = {1, 0, 0, 0,
                0, 1, 0, 0,
                0, 0, 0, 1,
                0, 0, 1, 0};
    return u;
}

/// exp(-i theta Z_a Z_b / 2)
inline TwoQubitUnitary zz_phase(double theta, std::size_t a, std::size_t b) {
    TwoQubitUnitary u;
    u.first = a;
    u.second = b;
    const Complex same = std::polar(1.0, -theta / 2.0), diff = std::polar(1.0, theta / 2.0);
    u.matrix = {same, 0, 0, 0,
                0, diff, 0, 0,
                0, 0, diff, 0,
                0, 0, 0, same};
    return u;
}

} // namespace gates

class StateVector {
public:
    StateVector() = default;
    explicit StateVector(std::size_t n) : n_(n), amp_(std::size_t{1} << n, Complex(0.0)) {
        if (n == 0 || n > kMaxQubits)
            throw InvalidInput("qubit count must be in [1, " + std::to_string(kMaxQubits) + "]");
        amp_[0] = 1.0;
    }

    std::size_t qubits() const noexcept { return n_; }
    std::size_t dim() const noexcept { return amp_.size(); }
    std::span<Complex> amplitudes() noexcept { return amp_; }
    std::span<const Complex> amplitudes() const noexcept { return amp_; }
    Complex& operator[](std::size_t i) noexcept { return amp_[i]; }
    const Complex& operator[](std::size_t i) const noexcept { return amp_[i]; }

    double norm_squared() const noexcept {
        double s = 0.0;
        for (const Complex& a : amp_) s += a.real() * a.real() + a.imag() * a.imag();
        return s;
    }

private:
    std::size_t n_ = 0;
    std::vector<Complex> amp_;
};

inline StateVector basis_state(std::size_t n, const Bitstring& bits) {
    if (bits.n != n) throw InvalidInput("basis_state: bitstring length " + std::to_string(bits.n) +
                                        " does not match " + std::to_string(n) + " qubits");
    StateVector s(n);
    s[0] = 0.0;
    s[bits.bits] = 1.0;
    return s;
}

/// i.i.d. complex Gaussian amplitudes, normalized: Haar on the unit sphere.
inline StateVector haar_random_state(std::size_t n, Rng& rng) {
    StateVector s(n);
    std::normal_distribution<double> g(0.0, 1.0);
    for (Complex& a : s.amplitudes()) {
        const double re = g(rng);
        const double im = g(rng);
        a = Complex(re, im);
    }
    const double inv = 1.0 / std::sqrt(s.norm_squared());
    for (Complex& a : s.amplitudes()) a *= inv;
    return s;
}

/// |high> (x) |low>: the qubits of `low` become the least significant ones.
inline StateVector tensor_product(const StateVector& high, const StateVector& low) {
    StateVector s(high.qubits() + low.qubits());
    const std::size_t shift = low.qubits();
    for (std::size_t h = 0; h < high.dim(); ++h)
        for (std::size_t l = 0; l < low.dim(); ++l) s[(h << shift) | l] = high[h] * low[l];
    return s;
}

namespace detail {

// Complex product without the C99 Annex G NaN recovery path.
inline Complex mul(Complex a, Complex b) noexcept {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

inline void check_qubit(const StateVector& s, std::size_t q) {
    if (q >= s.qubits())
        throw InvalidGate("qubit " + std::to_string(q) + " out of range for " + std::to_string(s.qubits()) +
                          "-qubit state");
}

} // namespace detail

inline void apply_1q(StateVector& state, const Matrix2& u, std::size_t target) {
    detail::check_qubit(state, target);
    if (!is_unitary<2>(u, 1e-10)) throw InvalidGate("apply_1q: matrix is not unitary");
    const Complex u00 = u[0], u01 = u[1], u10 = u[2], u11 = u[3];
    const std::size_t stride = std::size_t{1} << target;
    auto a = state.amplitudes();
    for (std::size_t base = 0; base < a.size(); base += 2 * stride)
        for (std::size_t i = base; i < base + stride; ++i) {
            const Complex x0 = a[i], x1 = a[i + stride];
            a[i] = detail::mul(u00, x0) + detail::mul(u01, x1);
            a[i + stride] = detail::mul(u10, x0) + detail::mul(u11, x1);
        }
}

namespace detail {

// Kernels over a contiguous run of `dim` amplitudes (interleaved re/im).
// Gates on qubits below kChunkBits act within 2^kChunkBits-amplitude blocks,
// so a batch of them is applied block by block while the block sits in L1.
inline constexpr std::size_t kChunkBits = 10;

inline void rx_kernel(double* a, std::size_t dim, double c, double s, std::size_t target) noexcept {
    const std::size_t stride = std::size_t{1} << target;
    for (std::size_t base = 0; base < dim; base += 2 * stride)
        for (std::size_t i = base; i < base + stride; ++i) {
            double* p = a + 2 * i;
            double* r = a + 2 * (i + stride);
            const double pr = p[0], pi = p[1], qr = r[0], qi = r[1];
            // [c, -is; -is, c]
            p[0] = c * pr + s * qi;
            p[1] = c * pi - s * qr;
            r[0] = c * qr + s * pi;
            r[1] = c * qi - s * pr;
        }
}

// Singlet component of (lo, hi) times (1 + 2w): with u = (p - q) w,
// p += u and q -= u, where p has bit lo set and q is p with lo/hi swapped.
inline void singlet_kernel(double* a, std::size_t dim, double wr, double wi, std::size_t lo,
                           std::size_t hi) noexcept {
    const std::size_t blo = std::size_t{1} << lo, bhi = std::size_t{1} << hi;
    for (std::size_t top = 0; top < dim; top += 2 * bhi)
        for (std::size_t mid = top; mid < top + bhi; mid += 2 * blo)
            for (std::size_t i = mid + blo; i < mid + 2 * blo; ++i) {
                double* p = a + 2 * i;
                double* q = a + 2 * (i - blo + bhi);
                const double dr = p[0] - q[0], di = p[1] - q[1];
                const double ur = dr * wr - di * wi, ui = dr * wi + di * wr;
                p[0] += ur;
                p[1] += ui;
                q[0] -= ur;
                q[1] -= ui;
            }
}

inline double* raw(StateVector& s) noexcept { return reinterpret_cast<double*>(s.amplitudes().data()); }

// Applies op(ptr, len) for every gate in `low` (all acting below kChunkBits)
// chunk by chunk, then every gate in `high` over the whole state.
template <class LowOp, class HighOp>
void chunked(StateVector& state, std::size_t nlow, LowOp&& low, std::size_t nhigh, HighOp&& high) {
    const std::size_t dim = state.dim();
    double* a = raw(state);
    const std::size_t chunk = std::min(dim, std::size_t{1} << kChunkBits);
    if (nlow > 0)
        for (std::size_t off = 0; off < dim; off += chunk)
            for (std::size_t g = 0; g < nlow; ++g) low(g, a + 2 * off, chunk);
    for (std::size_t g = 0; g < nhigh; ++g) high(g, a, dim);
}

} // namespace detail

/// R_x(theta) on one qubit; same action as apply_1q(gates::rx(theta)).
inline void apply_rx(StateVector& state, double theta, std::size_t target) {
    detail::check_qubit(state, target);
    detail::rx_kernel(detail::raw(state), state.dim(), std::cos(theta / 2.0), std::sin(theta / 2.0), target);
}

/// R_x(theta) on every qubit.
inline void apply_rx_all(StateVector& state, double theta) {
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    const std::size_t n = state.qubits();
    const std::size_t nlow = std::min(n, detail::kChunkBits);
    detail::chunked(
        state, nlow, [&](std::size_t q, double* a, std::size_t len) { detail::rx_kernel(a, len, c, s, q); },
        n - nlow, [&](std::size_t g, double* a, std::size_t len) { detail::rx_kernel(a, len, c, s, nlow + g); });
}

inline void apply_2q(StateVector& state, const TwoQubitUnitary& u) {
    detail::check_qubit(state, u.first);
    detail::check_qubit(state, u.second);
    if (u.first == u.second) throw InvalidGate("apply_2q: duplicate target qubits");
    if (!is_unitary<4>(u.matrix, 1e-10)) throw InvalidGate("apply_2q: matrix is not unitary");
    const std::size_t bf = std::size_t{1} << u.first, bs = std::size_t{1} << u.second;
    const std::size_t lo = std::min(u.first, u.second), hi = std::max(u.first, u.second);
    const std::size_t quarter = state.dim() >> 2;
    const auto& m = u.matrix;
    auto a = state.amplitudes();
    for (std::size_t k = 0; k < quarter; ++k) {
        // insert zero bits at positions lo and hi
        std::size_t i = k;
        i = ((i >> lo) << (lo + 1)) | (i & ((std::size_t{1} << lo) - 1));
        i = ((i >> hi) << (hi + 1)) | (i & ((std::size_t{1} << hi) - 1));
        const std::size_t idx[4] = {i, i | bs, i | bf, i | bf | bs};
        const Complex x[4] = {a[idx[0]], a[idx[1]], a[idx[2]], a[idx[3]]};
        for (std::size_t r = 0; r < 4; ++r) {
            Complex acc = 0.0;
            for (std::size_t c = 0; c < 4; ++c) acc += detail::mul(m[r * 4 + c], x[c]);
            a[idx[r]] = acc;
        }
    }
}

/// Multiplies every amplitude by the matching diagonal entry.
inline void apply_diagonal(StateVector& state, std::span<const Complex> diag) {
    if (diag.size() != state.dim()) throw InvalidGate("apply_diagonal: size mismatch");
    auto a = state.amplitudes();
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = detail::mul(a[i], diag[i]);
}

inline void apply_global_phase(StateVector& state, Complex phase) {
    for (Complex& a : state.amplitudes()) a = detail::mul(a, phase);
}

/// Multiplies the singlet component (|01> - |10>)/sqrt2 of the pair (q1, q2)
/// by `phase` and leaves the triplet untouched.
inline void apply_singlet_phase(StateVector& state, std::size_t q1, std::size_t q2, Complex phase) {
    detail::check_qubit(state, q1);
    detail::check_qubit(state, q2);
    if (q1 == q2) throw InvalidGate("apply_singlet_phase: duplicate target qubits");
    detail::singlet_kernel(detail::raw(state), state.dim(), 0.5 * (phase.real() - 1.0), 0.5 * phase.imag(),
                           std::min(q1, q2), std::max(q1, q2));
}

/// apply_singlet_phase on a layer of pairwise-disjoint qubit pairs. Disjoint
/// gates commute, so they are batched in whatever order reuses cache best.
inline void apply_singlet_layer(StateVector& state, std::span<const std::pair<std::size_t, std::size_t>> pairs,
                                Complex phase) {
    std::vector<std::pair<std::size_t, std::size_t>> low, high;
    std::uint64_t used = 0;
    for (auto [q1, q2] : pairs) {
        detail::check_qubit(state, q1);
        detail::check_qubit(state, q2);
        if (q1 == q2) throw InvalidGate("apply_singlet_layer: duplicate target qubits");
        if (used >> q1 & 1 || used >> q2 & 1) throw InvalidGate("apply_singlet_layer: pairs overlap");
        used |= std::uint64_t{1} << q1 | std::uint64_t{1} << q2;
        auto p = std::minmax(q1, q2);
        (p.second < detail::kChunkBits ? low : high).emplace_back(p.first, p.second);
    }
    const double wr = 0.5 * (phase.real() - 1.0), wi = 0.5 * phase.imag();
    detail::chunked(
        state, low.size(),
        [&](std::size_t g, double* a, std::size_t len) { detail::singlet_kernel(a, len, wr, wi, low[g].first, low[g].second); },
        high.size(),
        [&](std::size_t g, double* a, std::size_t len) { detail::singlet_kernel(a, len, wr, wi, high[g].first, high[g].second); });
}

/// <Z_target> in [-1, 1]; S^z expectation is half of this.
inline double expect_z(const StateVector& state, std::size_t target) {
    detail::check_qubit(state, target);
    const std::size_t mask = std::size_t{1} << target;
    const auto a = state.amplitudes();
    double plus = 0.0, minus = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double p = a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
        if (i & mask) minus += p;
        else plus += p;
    }
    return plus - minus;
}

/// One Born-rule sample of all qubits. The state is not modified.
inline Bitstring sample_bitstring(const StateVector& state, Rng& rng) {
    const double norm = state.norm_squared();
    if (std::abs(norm - 1.0) > 1e-6)
        throw CorruptedState("sample_bitstring: state norm^2 " + std::to_string(norm) + " deviates from 1");
    // u in (0, norm]; first index whose cumulative weight reaches u
    const double u = uniform_open_closed(rng) * norm;
    const auto a = state.amplitudes();
    double acc = 0.0;
    std::size_t last_nonzero = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double p = a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
        if (p > 0.0) last_nonzero = i;
        acc += p;
        if (acc >= u && p > 0.0) return {i, state.qubits()};
    }
    return {last_nonzero, state.qubits()};
}

} // namespace stdissim::qsim
