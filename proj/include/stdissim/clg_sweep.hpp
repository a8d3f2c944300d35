#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "cid.hpp"
#include "clg.hpp"
#include "dissimilarity.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "stats.hpp"

// Density sweep of the lattice gas: every run yields D_xt, D_x, D_t of its
// space-time grid plus CID and f_a of its final configuration.
namespace stdissim::clg {

struct SweepConfig {
    std::size_t L = 64;
    std::size_t T = 1024;
    std::vector<double> densities;
    std::size_t runs = 100;
    FilterSpec filter{2, 2};
    std::uint64_t seed = 1;
    std::size_t workers = 1;

    void validate() const {
        if (L < 2) throw InvalidConfig("clg-sweep: length must be >= 2");
        if (T < 2) throw InvalidConfig("clg-sweep: steps must be >= 2");
        if (runs < 1) throw InvalidConfig("clg-sweep: runs must be >= 1");
        if (densities.empty()) throw InvalidConfig("clg-sweep: empty density grid");
        for (double r : densities)
            if (!(r >= 0.0 && r <= 1.0)) throw InvalidConfig("clg-sweep: density outside [0, 1]");
        filter.validate();
        if (filter.lambda_x < 2 || filter.lambda_t < 2)
            throw InvalidConfig("clg-sweep: D_x and D_t need lambda_x > 1 and lambda_t > 1");
    }

    /// Particle count for density rho, rounded to the nearest integer.
    std::size_t particles(double rho) const {
        return static_cast<std::size_t>(std::llround(rho * static_cast<double>(L)));
    }
};

struct RunMetrics {
    double d_xt = 0.0;
    double d_x = 0.0;
    double d_t = 0.0;
    double cid = 0.0;
    double f_a = 0.0;
    bool absorbed = false;
};

inline RunMetrics measure_run(const ChainConfig& chain, const FilterSpec& filter) {
    const CLGTrajectory traj = run(chain);
    const SpaceTimeGrid grid = trajectory_to_grid(traj);
    RunMetrics m;
    m.d_xt = total_dissimilarity(grid, filter).total;
    m.d_x = spatial_dissimilarity(grid, filter.lambda_x);
    m.d_t = temporal_dissimilarity(grid, filter.lambda_t);
    m.cid = cid::compute_cid(traj.final_state.occupancy).cid;
    m.f_a = active_fraction(traj.final_state);
    m.absorbed = traj.absorbed_at.has_value();
    return m;
}

struct SweepPoint {
    double rho = 0.0;
    std::size_t N = 0;
    std::size_t runs = 0;
    Summary d_xt, d_x, d_t, cid, f_a;
    double absorbed_fraction = 0.0;
};

/// Run r at every density is seeded with child_seed(seed, r).
inline std::vector<SweepPoint> run_sweep(const SweepConfig& c) {
    c.validate();
    const std::size_t nd = c.densities.size();
    const auto metrics = parallel_map<RunMetrics>(nd * c.runs, c.workers, [&](std::size_t task) {
        const std::size_t d = task / c.runs, r = task % c.runs;
        const ChainConfig chain{c.L, c.particles(c.densities[d]), c.T, child_seed(c.seed, r)};
        return measure_run(chain, c.filter);
    });
    std::vector<SweepPoint> out;
    std::vector<double> xt(c.runs), x(c.runs), t(c.runs), cd(c.runs), fa(c.runs);
    for (std::size_t d = 0; d < nd; ++d) {
        std::size_t absorbed = 0;
        for (std::size_t r = 0; r < c.runs; ++r) {
            const RunMetrics& m = metrics[d * c.runs + r];
            xt[r] = m.d_xt;
            x[r] = m.d_x;
            t[r] = m.d_t;
            cd[r] = m.cid;
            fa[r] = m.f_a;
            absorbed += m.absorbed;
        }
        out.push_back({c.densities[d], c.particles(c.densities[d]), c.runs, summarize(xt), summarize(x), summarize(t),
                       summarize(cd), summarize(fa), static_cast<double>(absorbed) / static_cast<double>(c.runs)});
    }
    return out;
}

} // namespace stdissim::clg
