#pragma once

#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"

namespace stdissim {

/// Block edges of the coarse-graining filter. Step k uses blocks of
/// lambda_x^k x lambda_t^k, each edge capped at the axis length. An edge of 1
/// leaves that axis untouched.
struct FilterSpec {
    std::size_t lambda_x = 2;
    std::size_t lambda_t = 2;

    static FilterSpec make(std::size_t lambda_x, std::size_t lambda_t) {
        FilterSpec f{lambda_x, lambda_t};
        f.validate();
        return f;
    }

    void validate() const {
        if (lambda_x < 1 || lambda_t < 1) throw InvalidFilter("filter edges must be >= 1");
        if (lambda_x == 1 && lambda_t == 1) throw InvalidFilter("1x1 filter never coarsens");
    }
};

namespace detail {

// min(lambda^k, n); lambda == 1 keeps the axis at single-element blocks.
inline std::size_t effective_block(std::size_t lambda, std::size_t k, std::size_t n) {
    if (lambda == 1) return 1;
    std::size_t b = 1;
    for (std::size_t i = 0; i < k && b < n; ++i) b *= lambda;
    return b < n ? b : n;
}

inline bool axis_exhausted(std::size_t lambda, std::size_t k, std::size_t n) {
    return lambda == 1 || effective_block(lambda, k, n) == n;
}

} // namespace detail

/// Replaces every block_x x block_t block by its mean. Blocks are aligned at
/// multiples of the block edges; edge blocks average over their true extent.
inline Matrix coarse_grain_step(const Matrix& level, std::size_t block_x, std::size_t block_t) {
    if (level.empty()) throw InvalidInput("coarse_grain_step: empty level");
    if (block_x < 1 || block_t < 1) throw InvalidInput("coarse_grain_step: block edges must be >= 1");
    const std::size_t L = level.rows(), T = level.cols();
    Matrix out(L, T);
    std::vector<double> colsum(T);
    for (std::size_t i0 = 0; i0 < L; i0 += block_x) {
        const std::size_t i1 = std::min(L, i0 + block_x);
        std::fill(colsum.begin(), colsum.end(), 0.0);
        for (std::size_t i = i0; i < i1; ++i) {
            auto r = level.row(i);
            for (std::size_t j = 0; j < T; ++j) colsum[j] += r[j];
        }
        for (std::size_t j0 = 0; j0 < T; j0 += block_t) {
            const std::size_t j1 = std::min(T, j0 + block_t);
            double s = 0.0;
            for (std::size_t j = j0; j < j1; ++j) s += colsum[j];
            const double mean = s / static_cast<double>((i1 - i0) * (j1 - j0));
            for (std::size_t i = i0; i < i1; ++i)
                for (std::size_t j = j0; j < j1; ++j) out(i, j) = mean;
        }
    }
    return out;
}

/// Coarse-graining levels B^0 ... B^kmax, all of the input's shape.
struct Pyramid {
    std::vector<Matrix> levels;

    std::size_t k_max() const noexcept { return levels.empty() ? 0 : levels.size() - 1; }
    std::size_t space() const noexcept { return levels.front().rows(); }
    std::size_t time() const noexcept { return levels.front().cols(); }
};

/// Coarse-grains until both axes are merged into a single block. The last level
/// is the grand-mean grid.
inline Pyramid build_pyramid(const SpaceTimeGrid& grid, const FilterSpec& filter) {
    filter.validate();
    const std::size_t L = grid.space(), T = grid.time();
    Pyramid p;
    p.levels.push_back(grid.values());
    for (std::size_t k = 0;; ++k) {
        if (detail::axis_exhausted(filter.lambda_x, k, L) && detail::axis_exhausted(filter.lambda_t, k, T))
            break;
        const std::size_t bx = detail::effective_block(filter.lambda_x, k + 1, L);
        const std::size_t bt = detail::effective_block(filter.lambda_t, k + 1, T);
        p.levels.push_back(coarse_grain_step(p.levels.back(), bx, bt));
    }
    return p;
}

/// |sum_ij (b^{k+1}_ij)^2 - (b^k_ij)^2| / (2 L T), accumulated row-major.
inline double partial_dissimilarity(const Pyramid& pyramid, std::size_t k) {
    if (k + 1 > pyramid.k_max())
        throw OutOfRange("partial_dissimilarity: k=" + std::to_string(k) + " needs level " +
                         std::to_string(k + 1) + " but k_max=" + std::to_string(pyramid.k_max()));
    auto next = pyramid.levels[k + 1].data();
    auto cur = pyramid.levels[k].data();
    double s = 0.0;
    for (std::size_t i = 0; i < cur.size(); ++i) s += next[i] * next[i] - cur[i] * cur[i];
    return std::abs(s) / (2.0 * static_cast<double>(pyramid.space() * pyramid.time()));
}

struct DissimilarityReport {
    double total = 0.0;
    /// partials[i] is the contribution of step k = i + 1.
    std::vector<double> partials;
    /// The k = 0 term; computed for diagnostics, never part of the total.
    double first_step = 0.0;
};

inline DissimilarityReport total_dissimilarity(const SpaceTimeGrid& grid, const FilterSpec& filter) {
    const Pyramid p = build_pyramid(grid, filter);
    if (p.k_max() < 2)
        throw DegenerateGrid("grid " + std::to_string(grid.space()) + "x" + std::to_string(grid.time()) +
                             " yields k_max=" + std::to_string(p.k_max()) + "; need at least 2 steps");
    DissimilarityReport r;
    r.first_step = partial_dissimilarity(p, 0);
    for (std::size_t k = 1; k + 1 <= p.k_max(); ++k) {
        r.partials.push_back(partial_dissimilarity(p, k));
        r.total += r.partials.back();
    }
    return r;
}

/// D_x: space-only pyramid on every time column, averaged over columns.
inline double spatial_dissimilarity(const SpaceTimeGrid& grid, std::size_t lambda_x) {
    if (lambda_x < 2) throw InvalidFilter("spatial_dissimilarity needs lambda_x > 1");
    const FilterSpec f{lambda_x, 1};
    double s = 0.0;
    for (std::size_t j = 0; j < grid.time(); ++j) s += total_dissimilarity(grid.column(j), f).total;
    return s / static_cast<double>(grid.time());
}

/// D_t: time-only pyramid on every space row, averaged over rows.
inline double temporal_dissimilarity(const SpaceTimeGrid& grid, std::size_t lambda_t) {
    if (lambda_t < 2) throw InvalidFilter("temporal_dissimilarity needs lambda_t > 1");
    const FilterSpec f{1, lambda_t};
    double s = 0.0;
    for (std::size_t i = 0; i < grid.space(); ++i) s += total_dissimilarity(grid.row(i), f).total;
    return s / static_cast<double>(grid.space());
}

/// CSV with columns k, partial, cumulative. The k = 0 row carries cumulative 0
/// because that step is excluded from the total.
inline void write_report_csv(std::ostream& out, const DissimilarityReport& r) {
    out << "#schema=dissim-report/1\n";
    out << "k,partial,cumulative\n";
    out << "0," << format_double(r.first_step) << ",0\n";
    double cum = 0.0;
    for (std::size_t i = 0; i < r.partials.size(); ++i) {
        cum += r.partials[i];
        out << (i + 1) << ',' << format_double(r.partials[i]) << ',' << format_double(cum) << '\n';
    }
}

} // namespace stdissim
