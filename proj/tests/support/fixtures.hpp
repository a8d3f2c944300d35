#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include <stdissim/grid.hpp>

#include "oracles.hpp"

namespace fixtures {

struct RandomGrid {
    stdissim::Matrix matrix;
    oracle::Grid rows;
};

/// Grid of the given shape, either +-1 valued or uniform in [-1, 1].
inline RandomGrid random_grid(std::size_t L, std::size_t T, bool spins, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    RandomGrid g{stdissim::Matrix(L, T), oracle::Grid(L, std::vector<double>(T))};
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = 0; j < T; ++j) {
            const double v = spins ? (coin(gen) ? 1.0 : -1.0) : u(gen);
            g.matrix(i, j) = v;
            g.rows[i][j] = v;
        }
    return g;
}

/// Random shape with both edges in [lo, hi], rejecting shapes the 2x2 filter
/// cannot coarse-grain twice.
inline std::pair<std::size_t, std::size_t> random_shape(std::mt19937_64& gen, std::size_t lo, std::size_t hi) {
    std::uniform_int_distribution<std::size_t> d(lo, hi);
    while (true) {
        const std::size_t L = d(gen), T = d(gen);
        if (std::max(L, T) >= 3) return {L, T};
    }
}

} // namespace fixtures
