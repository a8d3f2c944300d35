#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dissimilarity.hpp"
#include "errors.hpp"
#include "fit.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "statevector.hpp"
#include "stats.hpp"

// Floquet discrete-time-crystal circuits on an open chain:
//   U_F = exp(-i/2 (1 - eps) pi sum X_i) * exp(-i/2 sum J_i Z_i Z_{i+1} - i/2 sum h_i Z_i)
namespace stdissim::dtc {

using qsim::Bitstring;
using qsim::Complex;
using qsim::StateVector;

inline constexpr double kCouplingMin = -0.75 * std::numbers::pi;
inline constexpr double kCouplingMax = -0.25 * std::numbers::pi;
inline constexpr double kFieldMin = -std::numbers::pi;
inline constexpr double kFieldMax = std::numbers::pi;

struct DisorderRealization {
    std::vector<double> J; // L - 1 nearest-neighbour couplings
    std::vector<double> h; // L longitudinal fields
    double epsilon = 0.0;
    Bitstring initial_bits;
    std::uint64_t seed = 0;

    std::size_t qubits() const noexcept { return h.size(); }

    void validate() const {
        if (h.empty() || h.size() > qsim::kMaxQubits) throw InvalidConfig("dtc: qubit count out of range");
        if (J.size() + 1 != h.size()) throw InvalidConfig("dtc: need L - 1 couplings for L fields");
        if (!(epsilon >= 0.0 && epsilon <= 0.5)) throw InvalidConfig("dtc: epsilon must lie in [0, 0.5]");
        if (initial_bits.n != h.size()) throw InvalidConfig("dtc: initial bitstring length mismatch");
    }
};

/// Couplings, fields and initial bitstring are drawn from `seed` alone, so the
/// same seed gives the same circuit for every epsilon.
inline DisorderRealization draw_disorder(std::size_t L, double epsilon, std::uint64_t seed) {
    if (L < 1 || L > qsim::kMaxQubits) throw InvalidConfig("dtc: qubit count out of range");
    Rng rng(seed);
    DisorderRealization d;
    d.epsilon = epsilon;
    d.seed = seed;
    d.J.resize(L - 1);
    d.h.resize(L);
    for (double& j : d.J) j = uniform_real(rng, kCouplingMin, kCouplingMax);
    for (double& f : d.h) f = uniform_real(rng, kFieldMin, kFieldMax);
    d.initial_bits = {rng() & ((std::uint64_t{1} << L) - 1), L};
    d.validate();
    return d;
}

/// Diagonal of exp(-i/2 [sum J_i Z_i Z_{i+1} + sum h_i Z_i]) in the
/// computational basis.
inline std::vector<Complex> ising_diagonal(const DisorderRealization& d) {
    const std::size_t L = d.qubits();
    std::vector<Complex> diag(std::size_t{1} << L);
    for (std::size_t idx = 0; idx < diag.size(); ++idx) {
        double energy = 0.0;
        for (std::size_t i = 0; i < L; ++i) {
            const double zi = (idx >> i) & 1U ? -1.0 : 1.0;
            energy += d.h[i] * zi;
            if (i + 1 < L) energy += d.J[i] * zi * ((idx >> (i + 1)) & 1U ? -1.0 : 1.0);
        }
        diag[idx] = std::polar(1.0, -0.5 * energy);
    }
    return diag;
}

/// Ising + field unitary first, then the imperfect pi pulse R_x((1 - eps) pi)
/// on every qubit.
inline void apply_floquet_cycle(StateVector& state, const DisorderRealization& d, std::span<const Complex> diag) {
    if (state.qubits() != d.qubits()) throw InvalidInput("apply_floquet_cycle: dimension mismatch");
    qsim::apply_diagonal(state, diag);
    qsim::apply_rx_all(state, (1.0 - d.epsilon) * std::numbers::pi);
}

inline void apply_floquet_cycle(StateVector& state, const DisorderRealization& d) {
    const auto diag = ising_diagonal(d);
    apply_floquet_cycle(state, d, diag);
}

// Gate-level form of one cycle: CNOT . R_z(J) . CNOT per bond, R_z(h) per
// site, then R_x((1 - eps) pi) per site.
struct OneQubitGate {
    qsim::Matrix2 matrix{};
    std::size_t target = 0;
};
using Gate = std::variant<OneQubitGate, qsim::TwoQubitUnitary>;

inline std::vector<Gate> floquet_cycle_gates(const DisorderRealization& d) {
    std::vector<Gate> g;
    const std::size_t L = d.qubits();
    for (std::size_t i = 0; i + 1 < L; ++i) {
        g.emplace_back(qsim::gates::cnot(i, i + 1));
        g.emplace_back(OneQubitGate{qsim::gates::rz(d.J[i]), i + 1});
        g.emplace_back(qsim::gates::cnot(i, i + 1));
    }
    for (std::size_t i = 0; i < L; ++i) g.emplace_back(OneQubitGate{qsim::gates::rz(d.h[i]), i});
    for (std::size_t i = 0; i < L; ++i)
        g.emplace_back(OneQubitGate{qsim::gates::rx((1.0 - d.epsilon) * std::numbers::pi), i});
    return g;
}

inline void apply_gates(StateVector& state, std::span<const Gate> gates) {
    for (const Gate& g : gates) {
        if (const auto* one = std::get_if<OneQubitGate>(&g)) qsim::apply_1q(state, one->matrix, one->target);
        else qsim::apply_2q(state, std::get<qsim::TwoQubitUnitary>(g));
    }
}

/// rows[t] is the bitstring sampled after t Floquet cycles (rows[0] samples
/// the initial state).
struct BitstringRecord {
    std::size_t L = 0;
    Bitstring initial;
    std::vector<Bitstring> rows;

    /// L x rows grid, bit 0 -> -1 and bit 1 -> +1.
    SpaceTimeGrid to_grid() const {
        Matrix m(L, rows.size());
        for (std::size_t t = 0; t < rows.size(); ++t)
            for (std::size_t q = 0; q < L; ++q) m(q, t) = rows[t][q] ? 1.0 : -1.0;
        return SpaceTimeGrid::from_normalized(std::move(m));
    }
};

inline Rng sampling_rng(const DisorderRealization& d) { return Rng(splitmix64(d.seed ^ 0x5a3c9e1f0b7d2468ULL)); }

/// One continued evolution, one full-register sample per cycle, no collapse.
inline BitstringRecord run_circuit(const DisorderRealization& d, std::size_t cycles, std::span<const Complex> diag) {
    d.validate();
    if (cycles < 1) throw InvalidConfig("dtc: cycles must be >= 1");
    BitstringRecord rec;
    rec.L = d.qubits();
    rec.initial = d.initial_bits;
    rec.rows.reserve(cycles);
    Rng rng = sampling_rng(d);
    StateVector state = qsim::basis_state(d.qubits(), d.initial_bits);
    for (std::size_t t = 0; t < cycles; ++t) {
        if (t > 0) apply_floquet_cycle(state, d, diag);
        rec.rows.push_back(qsim::sample_bitstring(state, rng));
    }
    return rec;
}

inline BitstringRecord run_circuit(const DisorderRealization& d, std::size_t cycles) {
    const auto diag = ising_diagonal(d);
    return run_circuit(d, cycles, diag);
}

inline std::size_t hamming_distance(const Bitstring& a, const Bitstring& b) {
    if (a.n != b.n) throw InvalidInput("hamming_distance: length mismatch");
    return static_cast<std::size_t>(std::popcount(a.bits ^ b.bits));
}

struct HammingHistogram {
    std::size_t step_even = 0;
    std::size_t step_odd = 0;
    std::vector<double> p_even; // indexed by d = 0..L
    std::vector<double> p_odd;
};

/// Normalized distributions of d(initial, rows[step]) over the ensemble for
/// the two requested steps.
inline HammingHistogram hamming_histogram(std::span<const BitstringRecord> records,
                                          std::pair<std::size_t, std::size_t> steps) {
    if (records.empty()) throw InvalidInput("hamming_histogram: empty ensemble");
    const std::size_t L = records.front().L;
    HammingHistogram h{steps.first, steps.second, std::vector<double>(L + 1), std::vector<double>(L + 1)};
    for (const auto& r : records) {
        if (r.L != L) throw InvalidInput("hamming_histogram: mixed qubit counts");
        if (r.rows.size() <= std::max(steps.first, steps.second))
            throw InvalidInput("hamming_histogram: record has only " + std::to_string(r.rows.size()) + " cycles");
        h.p_even[hamming_distance(r.initial, r.rows[steps.first])] += 1.0;
        h.p_odd[hamming_distance(r.initial, r.rows[steps.second])] += 1.0;
    }
    const double n = static_cast<double>(records.size());
    for (double& p : h.p_even) p /= n;
    for (double& p : h.p_odd) p /= n;
    return h;
}

struct HammingConfig {
    std::size_t L = 16;
    double epsilon = 0.04;
    std::size_t circuits = 512;
    std::size_t cycles = 64;
    std::pair<std::size_t, std::size_t> steps{62, 63};
    std::uint64_t seed = 1;
    std::size_t workers = 1;
};

inline std::vector<BitstringRecord> run_ensemble(std::size_t L, double epsilon, std::size_t circuits,
                                                 std::size_t cycles, std::uint64_t seed, std::size_t workers) {
    return parallel_map<BitstringRecord>(circuits, workers, [&](std::size_t i) {
        return run_circuit(draw_disorder(L, epsilon, child_seed(seed, i)), cycles);
    });
}

inline HammingHistogram run_hamming(const HammingConfig& c) {
    const auto records = run_ensemble(c.L, c.epsilon, c.circuits, c.cycles, c.seed, c.workers);
    return hamming_histogram(records, c.steps);
}

struct CurvePoint {
    double epsilon = 0.0;
    double mean = 0.0;
    double sem = 0.0;
    std::size_t measurements = 0; // bitstrings consumed
};

struct CurveConfig {
    std::size_t L = 16;
    std::vector<double> epsilons;
    std::size_t realizations = 512;
    std::size_t cycles = 16;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    FilterSpec filter{2, 2};
};

/// Mean D_xt of the sampled L x cycles grids for every epsilon. Realization r
/// uses the same disorder and initial bitstring at every epsilon.
inline std::vector<CurvePoint> dissimilarity_vs_epsilon(const CurveConfig& c) {
    if (c.cycles < 16) throw InvalidConfig("dtc-curve: need at least 16 cycles");
    if (c.realizations < 1) throw InvalidConfig("dtc-curve: need at least one realization");
    for (double e : c.epsilons)
        if (!(e >= 0.0 && e <= 0.5)) throw InvalidConfig("dtc-curve: epsilon outside [0, 0.5]");
    const auto per_realization = parallel_map<std::vector<double>>(c.realizations, c.workers, [&](std::size_t r) {
        DisorderRealization d = draw_disorder(c.L, 0.0, child_seed(c.seed, r));
        const auto diag = ising_diagonal(d);
        std::vector<double> out;
        out.reserve(c.epsilons.size());
        for (double e : c.epsilons) {
            d.epsilon = e;
            out.push_back(total_dissimilarity(run_circuit(d, c.cycles, diag).to_grid(), c.filter).total);
        }
        return out;
    });
    std::vector<CurvePoint> curve;
    std::vector<double> column(c.realizations);
    for (std::size_t k = 0; k < c.epsilons.size(); ++k) {
        for (std::size_t r = 0; r < c.realizations; ++r) column[r] = per_realization[r][k];
        const Summary s = summarize(column);
        curve.push_back({c.epsilons[k], s.mean, s.sem, c.realizations * c.cycles});
    }
    return curve;
}

struct EpsilonWindow {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double e) const noexcept { return e >= lo - 1e-9 && e <= hi + 1e-9; }
};

inline constexpr EpsilonWindow kDefaultDtcWindow{0.04, 0.10};
inline constexpr EpsilonWindow kDefaultThermalWindow{0.25, 0.40};

struct CriticalPoint {
    double epsilon_c = 0.0;
    fit::LineFit dtc;
    fit::LineFit thermal;
};

/// Crossing of least-squares lines fitted inside the two windows.
inline CriticalPoint estimate_epsilon_c(std::span<const CurvePoint> curve, EpsilonWindow dtc_window,
                                        EpsilonWindow thermal_window) {
    std::vector<double> xa, ya, xb, yb;
    for (const auto& p : curve) {
        if (dtc_window.contains(p.epsilon)) {
            xa.push_back(p.epsilon);
            ya.push_back(p.mean);
        }
        if (thermal_window.contains(p.epsilon)) {
            xb.push_back(p.epsilon);
            yb.push_back(p.mean);
        }
    }
    if (xa.size() < 3 || xb.size() < 3) throw FitError("estimate_epsilon_c: need >= 3 points in each window");
    CriticalPoint cp;
    cp.dtc = fit::fit_line(xa, ya);
    cp.thermal = fit::fit_line(xb, yb);
    cp.epsilon_c = fit::crossing(cp.dtc, cp.thermal);
    return cp;
}

} // namespace stdissim::dtc
