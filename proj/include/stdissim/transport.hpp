#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dissimilarity.hpp"
#include "errors.hpp"
#include "fit.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "statevector.hpp"
#include "stats.hpp"

// Spin transport in a Heisenberg ring H = J sum_i S_i . S_{i+1} (J = 1),
// evolved with the two-layer Trotter product exp(-i H_e dt) exp(-i H_o dt) on
// a geometric time mesh.
namespace stdissim::transport {

using qsim::Complex;
using qsim::StateVector;

/// Geometric mesh t_i = t0 * r^i, i = 0..N-1, with r = (T / t0)^(1 / (N - 1)).
struct TrotterSchedule {
    double t0 = 0.01;
    double T = 126.0;
    std::size_t N = 4096;
    double ratio = 1.0;
    std::vector<double> times;
    std::vector<double> deltas; // deltas[i] = times[i+1] - times[i] = t0 r^i (r - 1)
};

inline TrotterSchedule build_schedule(double t0, double T, std::size_t N) {
    if (!(t0 > 0.0) || !(T > t0)) throw InvalidConfig("schedule: need 0 < t0 < T");
    if (N < 2) throw InvalidConfig("schedule: need N >= 2");
    TrotterSchedule s{t0, T, N, std::pow(T / t0, 1.0 / static_cast<double>(N - 1)), {}, {}};
    s.times.resize(N);
    s.deltas.resize(N - 1);
    for (std::size_t i = 0; i < N; ++i) s.times[i] = t0 * std::pow(s.ratio, static_cast<double>(i));
    for (std::size_t i = 0; i + 1 < N; ++i)
        s.deltas[i] = t0 * std::pow(s.ratio, static_cast<double>(i)) * (s.ratio - 1.0);
    return s;
}

/// exp(-i dt S_a . S_b) as an explicit 4x4 matrix. With S_a . S_b = SWAP/2 - 1/4
/// the triplet picks up exp(-i dt/4) and the singlet exp(3i dt/4).
inline qsim::TwoQubitUnitary exchange_bond_unitary(double dt, std::size_t a, std::size_t b) {
    const Complex outer = std::polar(1.0, -dt / 4.0);
    const Complex pre = std::polar(1.0, dt / 4.0);
    const Complex c = pre * std::cos(dt / 2.0);
    const Complex s = pre * Complex(0.0, -std::sin(dt / 2.0));
    qsim::TwoQubitUnitary u;
    u.first = a;
    u.second = b;
    u.matrix = {outer, 0, 0, 0,
                0, c, s, 0,
                0, s, c, 0,
                0, 0, 0, outer};
    return u;
}

using Bond = std::pair<std::size_t, std::size_t>;

/// Ring bonds (b, b+1 mod L) split by the parity of b: {even layer, odd layer}.
/// L = 2 has the single bond (0, 1).
inline std::array<std::vector<Bond>, 2> bond_layers(std::size_t L) {
    std::array<std::vector<Bond>, 2> layers;
    if (L == 2) {
        layers[0].emplace_back(0, 1);
        return layers;
    }
    for (std::size_t b = 0; b < L; ++b) layers[b % 2].emplace_back(b, (b + 1) % L);
    return layers;
}

inline void check_chain(std::size_t L) {
    if (L < 2 || L % 2 != 0) throw InvalidConfig("transport: L must be even and >= 2, got " + std::to_string(L));
}

/// One Trotter step of length dt: even-bond layer, then odd-bond layer. Each
/// bond propagator exp(-i dt S.S) = exp(-i dt/4) (P_triplet + exp(i dt) P_singlet);
/// the exp(-i dt/4) factors are collected into one global phase per step.
inline void trotter_step(StateVector& state, double dt) {
    const std::size_t L = state.qubits();
    check_chain(L);
    if (dt == 0.0) return;
    const Complex singlet = std::polar(1.0, dt);
    std::size_t nbonds = 0;
    for (const auto& layer : bond_layers(L)) {
        qsim::apply_singlet_layer(state, layer, singlet);
        nbonds += layer.size();
    }
    qsim::apply_global_phase(state, std::polar(1.0, -dt / 4.0 * static_cast<double>(nbonds)));
}

inline double total_magnetization(const StateVector& state) {
    double s = 0.0;
    for (std::size_t q = 0; q < state.qubits(); ++q) s += qsim::expect_z(state, q);
    return s;
}

struct TransportConfig {
    std::size_t L = 16;
    bool with_reference = true;
    std::size_t experiments = 128;
    std::size_t window = 16;
    std::uint64_t seed = 1;
    std::size_t workers = 1;

    void validate() const {
        check_chain(L);
        if (L > qsim::kMaxQubits) throw InvalidConfig("transport: too many qubits");
        if (experiments < 1) throw InvalidConfig("transport: need at least one experiment");
        if (window < 2) throw InvalidConfig("transport: window must be >= 2");
    }
};

/// Reference qubit 0 in |0>, the rest Haar random; or all Haar random.
inline StateVector initial_state(const TransportConfig& c, Rng& rng) {
    if (!c.with_reference) return qsim::haar_random_state(c.L, rng);
    const StateVector env = qsim::haar_random_state(c.L - 1, rng);
    return qsim::tensor_product(env, qsim::basis_state(1, qsim::Bitstring{0, 1}));
}

/// One experiment: evolve along the schedule from t = 0. Optionally records
/// <S^z_0> at t = 0 and every mesh time, and one bitstring per mesh time.
struct ExperimentTrace {
    std::vector<double> sz;                 // N + 1 values, first at t = 0
    std::vector<qsim::Bitstring> samples;   // N values
};

inline ExperimentTrace run_experiment(const TransportConfig& c, const TrotterSchedule& s, std::size_t index,
                                      bool record_sz, bool record_samples) {
    Rng rng(child_seed(c.seed, index));
    StateVector state = initial_state(c, rng);
    ExperimentTrace tr;
    if (record_sz) {
        tr.sz.reserve(s.N + 1);
        tr.sz.push_back(qsim::expect_z(state, 0) / 2.0);
    }
    if (record_samples) tr.samples.reserve(s.N);
    for (std::size_t i = 0; i < s.N; ++i) {
        trotter_step(state, i == 0 ? s.t0 : s.deltas[i - 1]);
        if (record_sz) tr.sz.push_back(qsim::expect_z(state, 0) / 2.0);
        if (record_samples) tr.samples.push_back(qsim::sample_bitstring(state, rng));
    }
    return tr;
}

struct MagnetizationPoint {
    double t = 0.0;
    double mean = 0.0;
    double sem = 0.0;
};

/// Ensemble mean of <S^z_0(t)>, which approximates 2 C(t) with C the
/// equal-site correlator (C(0) = 1/4, <S^z_0(0)> = 1/2).
inline std::vector<MagnetizationPoint> run_magnetization(const TransportConfig& c, const TrotterSchedule& s) {
    c.validate();
    if (!c.with_reference) throw InvalidConfig("transport-magnetization needs the reference qubit");
    const auto traces = parallel_map<std::vector<double>>(c.experiments, c.workers, [&](std::size_t i) {
        return run_experiment(c, s, i, true, false).sz;
    });
    std::vector<MagnetizationPoint> out;
    std::vector<double> column(c.experiments);
    for (std::size_t k = 0; k <= s.N; ++k) {
        for (std::size_t e = 0; e < c.experiments; ++e) column[e] = traces[e][k];
        const Summary sm = summarize(column);
        out.push_back({k == 0 ? 0.0 : s.times[k - 1], sm.mean, sm.sem});
    }
    return out;
}

/// L x window grid from consecutive samples, bit 0 -> -1, bit 1 -> +1.
inline SpaceTimeGrid window_grid(std::span<const qsim::Bitstring> samples, std::size_t L) {
    Matrix m(L, samples.size());
    for (std::size_t t = 0; t < samples.size(); ++t)
        for (std::size_t q = 0; q < L; ++q) m(q, t) = samples[t][q] ? 1.0 : -1.0;
    return SpaceTimeGrid::from_normalized(std::move(m));
}

struct WindowPoint {
    double t_center = 0.0; // geometric centre of the window's mesh times
    double t_first = 0.0;
    double t_last = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
    double sem = 0.0;
};

inline std::vector<double> windowed_dissimilarity(std::span<const qsim::Bitstring> samples, std::size_t L,
                                                  std::size_t window, const FilterSpec& filter = {2, 2}) {
    std::vector<double> out;
    for (std::size_t w = 0; w + window <= samples.size(); w += window)
        out.push_back(total_dissimilarity(window_grid(samples.subspan(w, window), L), filter).total);
    return out;
}

inline std::vector<WindowPoint> run_windowed_dissimilarity(const TransportConfig& c, const TrotterSchedule& s) {
    c.validate();
    if (s.N % c.window != 0)
        throw InvalidConfig("transport-dissim: N=" + std::to_string(s.N) + " not divisible by window=" +
                            std::to_string(c.window));
    const auto per_exp = parallel_map<std::vector<double>>(c.experiments, c.workers, [&](std::size_t i) {
        const auto tr = run_experiment(c, s, i, false, true);
        return windowed_dissimilarity(tr.samples, c.L, c.window);
    });
    const std::size_t nw = s.N / c.window;
    std::vector<WindowPoint> out;
    std::vector<double> column(c.experiments);
    for (std::size_t w = 0; w < nw; ++w) {
        for (std::size_t e = 0; e < c.experiments; ++e) column[e] = per_exp[e][w];
        const Summary sm = summarize(column);
        const double a = s.times[w * c.window], b = s.times[(w + 1) * c.window - 1];
        out.push_back({std::sqrt(a * b), a, b, sm.mean, sm.stddev, sm.sem});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Curve analysis

inline constexpr std::size_t kSmoothingWidth = 5;

/// Centred moving average; entry i averages windows i-2..i+2, edges dropped.
/// Returns (index of centre, value) pairs.
struct SmoothedCurve {
    std::vector<std::size_t> centre;
    std::vector<double> value;
    std::vector<double> sem;
};

inline SmoothedCurve smooth(std::span<const WindowPoint> curve, std::size_t width = kSmoothingWidth) {
    SmoothedCurve s;
    const std::size_t half = width / 2;
    for (std::size_t i = half; i + half < curve.size(); ++i) {
        double v = 0.0, e2 = 0.0;
        for (std::size_t j = i - half; j <= i + half; ++j) {
            v += curve[j].mean;
            e2 += curve[j].sem * curve[j].sem;
        }
        s.centre.push_back(i);
        s.value.push_back(v / static_cast<double>(width));
        s.sem.push_back(std::sqrt(e2) / static_cast<double>(width));
    }
    return s;
}

struct TransitionOptions {
    /// only derivative extrema at window centres <= this time count
    double early_limit = 5.0;
    /// required |derivative| in units of its standard error
    double z_floor = 5.0;
    /// absolute floor on |dD/dlog t| for curves without error bars
    double absolute_floor = 1e-9;
};

struct Transition {
    double time = 0.0;
    double derivative = 0.0; // dD / dlog t at the extremum
    double z = 0.0;          // |derivative| / its standard error (inf without error bars)
};

/// Extremum of the derivative of the smoothed curve with respect to log time,
/// searched among early windows. nullopt when the extremum does not clear the
/// noise floor.
inline std::optional<Transition> detect_transition(std::span<const WindowPoint> curve,
                                                   const TransitionOptions& opt = {}) {
    if (curve.size() < kSmoothingWidth) throw InvalidInput("detect_transition: need >= 5 windows");
    const SmoothedCurve s = smooth(curve);
    std::optional<Transition> best;
    double best_mag = -1.0;
    for (std::size_t k = 1; k + 1 < s.value.size(); ++k) {
        const std::size_t i = s.centre[k];
        if (curve[i].t_center > opt.early_limit) continue;
        const double dx = std::log(curve[s.centre[k + 1]].t_center) - std::log(curve[s.centre[k - 1]].t_center);
        const double d = (s.value[k + 1] - s.value[k - 1]) / dx;
        if (std::abs(d) > best_mag) {
            // s[k+1] - s[k-1] only involves the windows that do not overlap
            double e2 = 0.0;
            for (std::size_t j : {i - 3, i - 2, i + 2, i + 3})
                if (j < curve.size()) e2 += curve[j].sem * curve[j].sem;
            const double se = std::sqrt(e2) / static_cast<double>(kSmoothingWidth) / dx;
            best_mag = std::abs(d);
            best = Transition{curve[i].t_center, d, se > 0.0 ? std::abs(d) / se : std::numeric_limits<double>::infinity()};
        }
    }
    if (!best || std::abs(best->derivative) < opt.absolute_floor || best->z < opt.z_floor) return std::nullopt;
    return best;
}

struct PlateauOptions {
    /// windows with centre >= this time define the plateau level
    double reference_from = 40.0;
    /// allowed deviation from the plateau level, in standard errors
    double z_band = 3.0;
};

/// Earliest window centre after which the smoothed curve stays within the
/// band around the late-time plateau level.
inline std::optional<double> detect_plateau_onset(std::span<const WindowPoint> curve, const PlateauOptions& opt = {}) {
    const SmoothedCurve s = smooth(curve);
    double level = 0.0, level_e2 = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < s.value.size(); ++k)
        if (curve[s.centre[k]].t_center >= opt.reference_from) {
            level += s.value[k];
            ++n;
        }
    if (n == 0) return std::nullopt;
    level /= static_cast<double>(n);
    for (std::size_t j = 0; j < curve.size(); ++j)
        if (curve[j].t_center >= opt.reference_from) level_e2 += curve[j].sem * curve[j].sem;
    const double level_se = std::sqrt(level_e2) / static_cast<double>(n);
    std::optional<double> onset;
    for (std::size_t k = s.value.size(); k-- > 0;) {
        const double band = opt.z_band * std::hypot(s.sem[k], level_se);
        if (std::abs(s.value[k] - level) > band) break;
        onset = curve[s.centre[k]].t_center;
    }
    return onset;
}

struct FlatnessResult {
    bool flat = true;
    double worst_z = 0.0; // largest |group mean - grand mean| / group standard error
};

/// Windows are pooled into `groups` consecutive blocks; the curve is flat when
/// every block mean lies within `z` standard errors of the grand mean.
inline FlatnessResult flatness_test(std::span<const WindowPoint> curve, std::size_t groups = 16, double z = 3.0) {
    if (curve.size() < groups || groups == 0) throw InvalidInput("flatness_test: fewer windows than groups");
    double grand = 0.0;
    for (const auto& p : curve) grand += p.mean;
    grand /= static_cast<double>(curve.size());
    FlatnessResult r;
    const std::size_t per = curve.size() / groups;
    for (std::size_t g = 0; g < groups; ++g) {
        const std::size_t lo = g * per, hi = g + 1 == groups ? curve.size() : lo + per;
        double m = 0.0, e2 = 0.0;
        for (std::size_t j = lo; j < hi; ++j) {
            m += curve[j].mean;
            e2 += curve[j].sem * curve[j].sem;
        }
        const double cnt = static_cast<double>(hi - lo);
        m /= cnt;
        const double se = std::sqrt(e2) / cnt;
        const double zz = se > 0.0 ? std::abs(m - grand) / se : (m == grand ? 0.0 : std::numeric_limits<double>::infinity());
        r.worst_z = std::max(r.worst_z, zz);
    }
    r.flat = r.worst_z < z;
    return r;
}

} // namespace stdissim::transport
