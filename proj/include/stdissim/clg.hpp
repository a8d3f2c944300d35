#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "rng.hpp"

// Conserved lattice gas on a ring: a particle with an occupied neighbour is
// active and hops to an empty neighbouring site.
namespace stdissim::clg {

struct ChainConfig {
    std::size_t L = 64;
    std::size_t N = 32;
    std::size_t T = 1024;
    std::uint64_t seed = 0;

    void validate() const {
        if (L < 1) throw InvalidConfig("clg: L must be >= 1");
        if (N > L) throw InvalidConfig("clg: N=" + std::to_string(N) + " exceeds L=" + std::to_string(L));
        if (T < 1) throw InvalidConfig("clg: T must be >= 1");
    }

    double density() const noexcept { return static_cast<double>(N) / static_cast<double>(L); }
};

using Occupancy = std::vector<std::uint8_t>;

struct CLGState {
    Occupancy occupancy;
    std::size_t step = 0;
};

inline std::size_t left_of(std::size_t i, std::size_t L) noexcept { return i == 0 ? L - 1 : i - 1; }
inline std::size_t right_of(std::size_t i, std::size_t L) noexcept { return i + 1 == L ? 0 : i + 1; }

inline CLGState init_random(const ChainConfig& config, Rng& rng) {
    config.validate();
    std::vector<std::size_t> sites(config.L);
    for (std::size_t i = 0; i < config.L; ++i) sites[i] = i;
    // partial Fisher-Yates: the first N entries are a uniform N-subset
    for (std::size_t i = 0; i < config.N; ++i) {
        const std::size_t j = i + uniform_below(rng, config.L - i);
        std::swap(sites[i], sites[j]);
    }
    CLGState s{Occupancy(config.L, 0), 0};
    for (std::size_t i = 0; i < config.N; ++i) s.occupancy[sites[i]] = 1;
    return s;
}

inline CLGState init_random(const ChainConfig& config) {
    Rng rng(config.seed);
    return init_random(config, rng);
}

inline bool is_active(const Occupancy& occ, std::size_t i) noexcept {
    const std::size_t L = occ.size();
    if (L < 2 || !occ[i]) return false;
    return occ[left_of(i, L)] || occ[right_of(i, L)];
}

inline bool is_movable(const Occupancy& occ, std::size_t i) noexcept {
    const std::size_t L = occ.size();
    return is_active(occ, i) && (!occ[left_of(i, L)] || !occ[right_of(i, L)]);
}

inline std::vector<std::size_t> active_particles(const CLGState& state) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < state.occupancy.size(); ++i)
        if (is_active(state.occupancy, i)) out.push_back(i);
    return out;
}

inline std::vector<std::size_t> movable_particles(const CLGState& state) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < state.occupancy.size(); ++i)
        if (is_movable(state.occupancy, i)) out.push_back(i);
    return out;
}

/// Moves one uniformly chosen movable particle to a uniformly chosen empty
/// neighbour. Returns false, leaving the state untouched, when nothing can move.
inline bool advance(CLGState& state, Rng& rng, std::vector<std::size_t>& scratch) {
    auto& occ = state.occupancy;
    const std::size_t L = occ.size();
    scratch.clear();
    for (std::size_t i = 0; i < L; ++i)
        if (is_movable(occ, i)) scratch.push_back(i);
    if (scratch.empty()) return false;
    const std::size_t from = scratch[uniform_below(rng, scratch.size())];
    const std::size_t l = left_of(from, L), r = right_of(from, L);
    std::size_t to;
    if (!occ[l] && !occ[r]) to = uniform_below(rng, 2) == 0 ? l : r;
    else to = occ[l] ? r : l;
    occ[from] = 0;
    occ[to] = 1;
    ++state.step;
    return true;
}

/// Value-semantics step; nullopt signals an absorbing (or fully frozen) state.
inline std::optional<CLGState> step(const CLGState& state, Rng& rng) {
    CLGState next = state;
    std::vector<std::size_t> scratch;
    if (!advance(next, rng, scratch)) return std::nullopt;
    return next;
}

inline double active_fraction(const CLGState& state) {
    if (state.occupancy.empty()) return 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < state.occupancy.size(); ++i) n += is_active(state.occupancy, i);
    return static_cast<double>(n) / static_cast<double>(state.occupancy.size());
}

/// T x L occupancy history, row j = occupancy after update j.
struct CLGTrajectory {
    std::size_t L = 0;
    std::size_t T = 0;
    std::vector<std::uint8_t> cells;
    std::optional<std::size_t> absorbed_at;
    CLGState final_state;

    std::span<const std::uint8_t> row(std::size_t j) const { return {cells.data() + j * L, L}; }
};

inline CLGTrajectory run(const ChainConfig& config) {
    config.validate();
    Rng rng(config.seed);
    CLGState s = init_random(config, rng);
    CLGTrajectory traj;
    traj.L = config.L;
    traj.T = config.T;
    traj.cells.resize(config.L * config.T);
    std::vector<std::size_t> scratch;
    scratch.reserve(config.L);
    for (std::size_t j = 0; j < config.T; ++j) {
        if (!traj.absorbed_at && !advance(s, rng, scratch)) traj.absorbed_at = j;
        std::copy(s.occupancy.begin(), s.occupancy.end(), traj.cells.begin() + j * config.L);
    }
    traj.final_state = std::move(s);
    return traj;
}

/// Space x time grid with empty -> -1 and occupied -> +1.
inline SpaceTimeGrid trajectory_to_grid(const CLGTrajectory& traj) {
    Matrix m(traj.L, traj.T);
    for (std::size_t j = 0; j < traj.T; ++j) {
        auto r = traj.row(j);
        for (std::size_t i = 0; i < traj.L; ++i) m(i, j) = r[i] ? 1.0 : -1.0;
    }
    return SpaceTimeGrid::from_normalized(std::move(m));
}

} // namespace stdissim::clg
