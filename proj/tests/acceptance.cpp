// Acceptance run at full scale. Prints one PASS/FAIL line per criterion, with
// the measured numbers on indented lines above it. Exits non-zero only when
// the harness itself breaks; failed criteria are reported, not hidden.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <stdissim/clg_sweep.hpp>
#include <stdissim/dissimilarity.hpp>
#include <stdissim/dtc.hpp>
#include <stdissim/fit.hpp>
#include <stdissim/parallel.hpp>
#include <stdissim/table.hpp>
#include <stdissim/transport.hpp>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace stdissim;

namespace {

struct Outcome {
    bool pass = false;
    std::string summary;
};

struct Options {
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    std::size_t c8_experiments = 2048;
    std::size_t c9_experiments = 64;
};

Options opt;
fs::path work_dir;

std::ofstream log_file;

// everything printed is mirrored into the --log file
void emit(const std::string& s) {
    std::cout << s << std::flush;
    if (log_file.is_open()) log_file << s << std::flush;
}

void note(const std::string& s) { emit("    " + s + '\n'); }

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string yes(bool b) { return b ? "yes" : "no"; }

// ---------------------------------------------------------------------------

Outcome c1_oracle() {
    std::mt19937_64 gen(opt.seed);
    const std::vector<FilterSpec> filters{{2, 2}, {2, 3}, {3, 2}, {3, 3}};
    double worst = 0.0;
    std::size_t grids = 0, spins = 0, partials = 0, kmax_mismatch = 0;
    while (grids < 100) {
        const auto [L, T] = fixtures::random_shape(gen, 1, 32);
        const FilterSpec f = filters[grids % filters.size()];
        const bool spin = grids % 2 == 0;
        const auto g = fixtures::random_grid(L, T, spin, gen);
        const auto ref = oracle::dissimilarity(g.rows, f.lambda_x, f.lambda_t);
        if (ref.k_max < 2) continue;
        const auto r = total_dissimilarity(SpaceTimeGrid::from_normalized(g.matrix), f);
        if (r.partials.size() + 1 != ref.k_max) {
            ++kmax_mismatch;
        } else {
            worst = std::max(worst, std::abs(r.total - ref.total));
            worst = std::max(worst, std::abs(r.first_step - ref.partials[0]));
            for (std::size_t k = 0; k < r.partials.size(); ++k) {
                worst = std::max(worst, std::abs(r.partials[k] - ref.partials[k + 1]));
                ++partials;
            }
        }
        ++grids;
        spins += spin;
    }
    note(fmt("%zu grids (%zu +-1, %zu real), %zu partials compared, filters 2x2/2x3/3x2/3x3", grids, spins,
             grids - spins, partials));
    note(fmt("max |library - brute force| = %.3g, k_max mismatches = %zu", worst, kmax_mismatch));
    return {worst <= 1e-12 && kmax_mismatch == 0, fmt("max deviation %.3g (tolerance 1e-12)", worst)};
}

// ---------------------------------------------------------------------------

std::map<std::pair<std::size_t, std::size_t>, std::vector<clg::SweepPoint>> sweep_cache;

const std::vector<clg::SweepPoint>& clg_sweep(std::size_t L, std::size_t T) {
    auto it = sweep_cache.find({L, T});
    if (it != sweep_cache.end()) return it->second;
    clg::SweepConfig c;
    c.L = L;
    c.T = T;
    c.runs = 100;
    c.densities = linear_grid(0.30, 0.95, 0.05);
    c.seed = opt.seed;
    c.workers = opt.workers;
    const auto t0 = std::chrono::steady_clock::now();
    auto pts = clg::run_sweep(c);
    note(fmt("sweep L=%zu T=%zu: %.1f s", L, T,
             std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()));
    return sweep_cache.emplace(std::make_pair(L, T), std::move(pts)).first->second;
}

Outcome c2_clg_transition() {
    const auto& pts = clg_sweep(64, 1024);
    note("rho     N   D_xt      sd        D_x       D_t       f_a       absorbed");
    for (const auto& p : pts)
        note(fmt("%.2f  %3zu   %.5f   %.5f   %.5f   %.5f   %.4f    %.2f", p.rho, p.N, p.d_xt.mean, p.d_xt.stddev,
                 p.d_x.mean, p.d_t.mean, p.f_a.mean, p.absorbed_fraction));
    bool low_ok = true;
    double worst_low = 0.0, at_half = -1.0;
    for (const auto& p : pts)
        if (p.rho <= 0.5 + 1e-9) {
            worst_low = std::max(worst_low, p.d_xt.mean);
            low_ok = low_ok && p.d_xt.mean < 0.02;
            if (std::abs(p.rho - 0.5) < 1e-9) at_half = p.d_xt.mean;
        }
    std::vector<const clg::SweepPoint*> active;
    for (const auto& p : pts)
        if (p.rho > 0.5 + 1e-9 && p.rho <= 0.8 + 1e-9) active.push_back(&p);
    std::size_t arg = 0;
    for (std::size_t i = 1; i < active.size(); ++i)
        if (active[i]->d_xt.mean > active[arg]->d_xt.mean) arg = i;
    bool rising = true;
    for (std::size_t i = 1; i <= arg; ++i) rising = rising && active[i]->d_xt.mean > active[i - 1]->d_xt.mean;
    note(fmt("rho <= 0.5: largest mean D_xt = %.4f (need < 0.02); at rho = 0.5: %.4f", worst_low, at_half));
    note(fmt("(0.5, 0.8]: maximum %.4f at rho = %.2f; strictly increasing up to it: %s", active[arg]->d_xt.mean,
             active[arg]->rho, yes(rising).c_str()));
    return {low_ok && rising, fmt("max D_xt for rho<=0.5 is %.4f (limit 0.02), D_xt(0.5) = %.4f; rise to max: %s",
                                  worst_low, at_half, yes(rising).c_str())};
}

Outcome c3_size_insensitivity() {
    auto spread = [](const std::vector<double>& m) {
        const auto [lo, hi] = std::minmax_element(m.begin(), m.end());
        return (*hi - *lo) / *lo;
    };
    // equal number of updates per site (T = 16 L) is the primary comparison;
    // a fixed T = 1024 for every size is reported alongside
    std::vector<double> maxima, fixed_maxima;
    bool cid_noisier = true;
    std::size_t compared = 0, noisier = 0;
    for (std::size_t L : {16u, 64u, 256u}) {
        const auto& pts = clg_sweep(L, 16 * L);
        const auto best = std::max_element(pts.begin(), pts.end(),
                                           [](const auto& a, const auto& b) { return a.d_xt.mean < b.d_xt.mean; });
        maxima.push_back(best->d_xt.mean);
        std::size_t n = 0, k = 0;
        for (const auto& p : pts)
            if (p.rho > 0.5 + 1e-9) {
                ++n;
                k += p.cid.stddev > p.d_xt.stddev;
            }
        compared += n;
        noisier += k;
        cid_noisier = cid_noisier && k == n;
        note(fmt("L=%3zu T=%4zu: max D_xt = %.4f at rho = %.2f; active-phase densities with sd(CID) > sd(D_xt): %zu/%zu",
                 L, 16 * L, best->d_xt.mean, best->rho, k, n));
        for (const auto& p : pts)
            if (p.rho > 0.5 + 1e-9)
                note(fmt("    rho=%.2f  sd(D_xt)=%.4f  sd(CID)=%.4f  mean CID=%.4f", p.rho, p.d_xt.stddev, p.cid.stddev,
                         p.cid.mean));
    }
    for (std::size_t L : {16u, 64u, 256u}) {
        const auto& pts = clg_sweep(L, 1024);
        fixed_maxima.push_back(std::max_element(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
                                   return a.d_xt.mean < b.d_xt.mean;
                               })->d_xt.mean);
    }
    note(fmt("maxima at T = 16 L: %.4f %.4f %.4f, relative spread %.1f%%", maxima[0], maxima[1], maxima[2],
             100 * spread(maxima)));
    note(fmt("maxima at T = 1024: %.4f %.4f %.4f, relative spread %.1f%% (not the acceptance measure)", fixed_maxima[0],
             fixed_maxima[1], fixed_maxima[2], 100 * spread(fixed_maxima)));
    const bool ok = spread(maxima) <= 0.10 && cid_noisier;
    return {ok, fmt("D_xt maxima spread %.1f%% (limit 10%%); sd(CID) > sd(D_xt) at %zu/%zu active points",
                    100 * spread(maxima), noisier, compared)};
}

// ---------------------------------------------------------------------------

Outcome c4_dtc_exactness() {
    std::size_t bad = 0;
    for (std::size_t i = 0; i < 50; ++i) {
        const auto d = dtc::draw_disorder(16, 0.0, child_seed(opt.seed, i));
        const auto rec = dtc::run_circuit(d, 64);
        for (std::size_t t = 0; t < rec.rows.size(); ++t)
            bad += rec.rows[t] != (t % 2 ? d.initial_bits.complement() : d.initial_bits);
    }
    note(fmt("50 disorders x 64 cycles, rows off the period-2 pattern: %zu", bad));
    return {bad == 0, fmt("%zu deviating rows out of 3200", bad)};
}

Outcome c5_hamming() {
    auto hist = [](double eps) {
        dtc::HammingConfig c{16, eps, 512, 64, {62, 63}, opt.seed, opt.workers};
        return dtc::run_hamming(c);
    };
    const auto lo = hist(0.04), hi = hist(0.30);
    const double even_mass = lo.p_even[0] + lo.p_even[1], odd_mass = lo.p_odd[15] + lo.p_odd[16];
    auto mean = [](const std::vector<double>& p) {
        double m = 0.0;
        for (std::size_t d = 0; d < p.size(); ++d) m += static_cast<double>(d) * p[d];
        return m;
    };
    std::string row_e, row_o;
    for (std::size_t d = 0; d <= 16; ++d) {
        row_e += fmt(" %.3f", lo.p_even[d]);
        row_o += fmt(" %.3f", lo.p_odd[d]);
    }
    note("eps=0.04 P62(d):" + row_e);
    note("eps=0.04 P63(d):" + row_o);
    note(fmt("eps=0.04: mass in d<=1 at step 62 = %.4f, mass in d>=15 at step 63 = %.4f", even_mass, odd_mass));
    const double me = mean(hi.p_even), mo = mean(hi.p_odd);
    note(fmt("eps=0.30: mean d at step 62 = %.3f, at step 63 = %.3f", me, mo));
    const bool ok = even_mass >= 0.9 && odd_mass >= 0.9 && std::abs(me - 8.0) <= 1.0 && std::abs(mo - 8.0) <= 1.0;
    return {ok, fmt("eps=0.04 mass %.3f/%.3f (need >= 0.9); eps=0.30 mean d %.2f/%.2f (need 8 +- 1)", even_mass,
                    odd_mass, me, mo)};
}

Outcome c6_critical_point() {
    dtc::CurveConfig c;
    c.L = 16;
    c.epsilons = linear_grid(0.0, 0.5, 0.01);
    c.realizations = 512;
    c.cycles = 16;
    c.seed = opt.seed;
    c.workers = opt.workers;
    const auto curve = dtc::dissimilarity_vs_epsilon(c);
    bool counts_ok = true;
    for (const auto& p : curve) counts_ok = counts_ok && p.measurements == 8192;
    for (std::size_t i = 0; i < curve.size(); i += 5)
        note(fmt("eps=%.2f  D_xt=%.5f +- %.5f", curve[i].epsilon, curve[i].mean, curve[i].sem));
    const auto cp = dtc::estimate_epsilon_c(curve, dtc::kDefaultDtcWindow, dtc::kDefaultThermalWindow);
    note(fmt("DTC fit: slope %.4f intercept %.4f (%zu points); thermal fit: slope %.4f intercept %.4f (%zu points)",
             cp.dtc.slope, cp.dtc.intercept, cp.dtc.points, cp.thermal.slope, cp.thermal.intercept,
             cp.thermal.points));
    note(fmt("bitstrings per epsilon: %zu (all equal 8192: %s)", curve.front().measurements, yes(counts_ok).c_str()));
    const bool ok = counts_ok && cp.epsilon_c >= 0.13 && cp.epsilon_c <= 0.19;
    return {ok, fmt("epsilon_c = %.4f (window [0.13, 0.19]); 8192 bitstrings per point: %s", cp.epsilon_c,
                    yes(counts_ok).c_str())};
}

// ---------------------------------------------------------------------------

struct MagnetizationCheck {
    double start = 0.0;
    fit::PowerLawFit fit, tail;
};

MagnetizationCheck magnetization(std::size_t N) {
    transport::TransportConfig c;
    c.L = 16;
    c.experiments = 128;
    c.seed = opt.seed;
    c.workers = opt.workers;
    const auto s = transport::build_schedule(0.01, 126.0, N);
    const auto pts = transport::run_magnetization(c, s);
    std::vector<double> t, y;
    for (const auto& p : pts) {
        t.push_back(p.t);
        y.push_back(p.mean);
    }
    for (double probe : {0.1, 0.7, 2.0, 5.0, 10.0, 14.7, 30.0, 126.0}) {
        const auto it = std::lower_bound(t.begin(), t.end(), probe);
        const std::size_t i = std::min<std::size_t>(it - t.begin(), t.size() - 1);
        note(fmt("N=%zu  t=%8.3f  <S^z_1>=%.5f +- %.5f", N, t[i], pts[i].mean, pts[i].sem));
    }
    return {pts.front().mean, fit::fit_power_law(t, y, 5.0, 14.7), fit::fit_power_law(t, y, 20.0, 126.0)};
}

Outcome c7_hydrodynamics() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto full = magnetization(4096);
    const double t_full = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto t1 = std::chrono::steady_clock::now();
    const auto smoke = magnetization(1024);
    const double t_smoke = std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();
    auto in_window = [](double e) { return e >= -0.77 && e <= -0.57; };
    note(fmt("N=4096: <S^z_1>(0) - 1/2 = %.3g; exponent on [5, 14.7] = %.4f (residual %.3g); "
             "log-log slope for t > 20 = %.4f; %.0f s",
             full.start - 0.5, full.fit.exponent, full.fit.residual, full.tail.exponent, t_full));
    note(fmt("N=1024 smoke: exponent on [5, 14.7] = %.4f; %.0f s", smoke.fit.exponent, t_smoke));
    const bool ok = std::abs(full.start - 0.5) <= 1e-12 && in_window(full.fit.exponent) &&
                    std::abs(full.tail.exponent) < 0.05 && in_window(smoke.fit.exponent);
    return {ok, fmt("exponent %.3f (N=4096), %.3f (N=1024) in [-0.77, -0.57]; late slope %.3f (limit 0.05)",
                    full.fit.exponent, smoke.fit.exponent, full.tail.exponent)};
}

void save_curve(const std::string& name, const std::vector<transport::WindowPoint>& curve) {
    CsvTable t("transport-dissim/1", {"t_window", "Dxt_mean", "Dxt_std", "stderr", "t_first", "t_last"});
    for (const auto& p : curve)
        t.add_row({cell(p.t_center), cell(p.mean), cell(p.stddev), cell(p.sem), cell(p.t_first), cell(p.t_last)});
    std::ofstream(work_dir / name) << t.str();
}

Outcome c8_monitoring() {
    transport::TransportConfig c;
    c.L = 16;
    c.experiments = opt.c8_experiments;
    c.window = 16;
    c.seed = opt.seed;
    c.workers = opt.workers;
    const auto s = transport::build_schedule(0.01, 126.0, 4096);
    const auto ref = transport::run_windowed_dissimilarity(c, s);
    c.with_reference = false;
    const auto haar = transport::run_windowed_dissimilarity(c, s);
    save_curve("monitoring_reference.csv", ref);
    save_curve("monitoring_haar.csv", haar);
    for (std::size_t w = 0; w < ref.size(); w += 16)
        note(fmt("t=%8.3f  D_xt(ref)=%.5f +- %.5f  D_xt(haar)=%.5f +- %.5f", ref[w].t_center, ref[w].mean, ref[w].sem,
                 haar[w].mean, haar[w].sem));
    const auto tr = transport::detect_transition(ref);
    const auto onset = transport::detect_plateau_onset(ref);
    const auto flat = transport::flatness_test(haar);
    const auto haar_tr = transport::detect_transition(haar);
    note(fmt("experiments per variant: %zu", c.experiments));
    note(tr ? fmt("reference: transition at t = %.3f (dD/dlog t = %.4g, %.1f standard errors)", tr->time,
                  tr->derivative, tr->z)
            : std::string("reference: no significant early transition"));
    note(onset ? fmt("reference: plateau onset at t = %.3f", *onset) : std::string("reference: no plateau onset"));
    note(fmt("haar control: flat = %s (worst group deviation %.2f standard errors); transition detected: %s",
             yes(flat.flat).c_str(), flat.worst_z, yes(haar_tr.has_value()).c_str()));
    const bool tr_ok = tr && tr->time >= 0.4 && tr->time <= 1.2;
    const bool onset_ok = onset && *onset >= 10.0 && *onset <= 20.0;
    const bool scale_ok = c.experiments >= 2048;
    if (!scale_ok) note("reduced experiment count: below the 2048 required for this criterion");
    return {tr_ok && onset_ok && flat.flat && scale_ok,
            fmt("transition t = %s (window [0.4, 1.2]); plateau onset t = %s (window [10, 20]); control flat: %s",
                tr ? fmt("%.3f", tr->time).c_str() : "none", onset ? fmt("%.2f", *onset).c_str() : "none",
                yes(flat.flat).c_str())};
}

// ---------------------------------------------------------------------------

Outcome c9_conservation() {
    // norm and total S^z along the full production schedule
    const auto s = transport::build_schedule(0.01, 126.0, 4096);
    double norm_drift = 0.0, sz_drift = 0.0;
    for (bool with_ref : {true, false}) {
        transport::TransportConfig c;
        c.L = 16;
        c.with_reference = with_ref;
        Rng rng(child_seed(opt.seed, with_ref));
        auto state = transport::initial_state(c, rng);
        const double n0 = state.norm_squared(), m0 = transport::total_magnetization(state);
        for (std::size_t i = 0; i < s.N; ++i) {
            transport::trotter_step(state, i == 0 ? s.t0 : s.deltas[i - 1]);
            if (i % 64 == 63 || i + 1 == s.N) {
                norm_drift = std::max(norm_drift, std::abs(state.norm_squared() - n0));
                sz_drift = std::max(sz_drift, std::abs(transport::total_magnetization(state) - m0));
            }
        }
    }
    note(fmt("L=16, 4096 steps to T=126: max norm drift %.3g, max total S^z drift %.3g", norm_drift, sz_drift));

    // lattice-gas particle number in every recorded row
    std::size_t rows = 0, violations = 0;
    for (double rho : linear_grid(0.30, 0.95, 0.05))
        for (std::uint64_t r = 0; r < 20; ++r) {
            const std::size_t N = static_cast<std::size_t>(std::llround(rho * 64));
            const auto traj = clg::run(clg::ChainConfig{64, N, 1024, child_seed(opt.seed, r)});
            for (std::size_t j = 0; j < traj.T; ++j) {
                const auto row = traj.row(j);
                violations += std::accumulate(row.begin(), row.end(), std::size_t{0}) != N;
                ++rows;
            }
        }
    note(fmt("lattice gas: %zu rows checked, particle-number violations %zu", rows, violations));

    // Trotter refinement on the production schedule: <S^z_1>(T) of each
    // experiment for N, 2N, 4N with the same initial state. The per-experiment
    // changes are compared by their root mean square; their ensemble mean is
    // far smaller than its own sampling error and is shown for reference only.
    transport::TransportConfig c;
    c.L = 16;
    c.experiments = opt.c9_experiments;
    c.seed = opt.seed;
    c.workers = opt.workers;
    std::vector<std::vector<double>> finals;
    for (std::size_t N : {4096u, 8192u, 16384u}) {
        const auto sched = transport::build_schedule(0.01, 126.0, N);
        finals.push_back(parallel_map<double>(c.experiments, c.workers, [&](std::size_t i) {
            return transport::run_experiment(c, sched, i, true, false).sz.back();
        }));
        note(fmt("N=%5zu: ensemble <S^z_1>(T) = %.9f (%zu experiments)", N, summarize(finals.back()).mean,
                 c.experiments));
    }
    std::vector<double> d1(c.experiments), d2(c.experiments);
    double ss1 = 0.0, ss2 = 0.0;
    for (std::size_t i = 0; i < c.experiments; ++i) {
        d1[i] = finals[1][i] - finals[0][i];
        d2[i] = finals[2][i] - finals[1][i];
        ss1 += d1[i] * d1[i];
        ss2 += d2[i] * d2[i];
    }
    const double ratio = std::sqrt(ss1 / ss2);
    const Summary m1 = summarize(d1), m2 = summarize(d2);
    note(fmt("rms change per experiment: N->2N %.4g, 2N->4N %.4g, ratio %.3f (accepted band [3, 5])",
             std::sqrt(ss1 / c.experiments), std::sqrt(ss2 / c.experiments), ratio));
    note(fmt("ensemble-mean change: N->2N %.3g +- %.2g, 2N->4N %.3g +- %.2g (ratio %.2f, noise dominated)", m1.mean,
             m1.sem, m2.mean, m2.sem, m1.mean / m2.mean));

    // the same refinement without sampling noise: exact ensemble average over
    // every environment basis state at L = 8, uniform steps to T = 2
    {
        const std::size_t L = 8;
        auto ensemble = [&](std::size_t steps) {
            double sum = 0.0;
            for (std::uint64_t e = 0; e < (1u << (L - 1)); ++e) {
                auto st = qsim::basis_state(L, qsim::Bitstring{e << 1, L});
                for (std::size_t i = 0; i < steps; ++i) transport::trotter_step(st, 2.0 / static_cast<double>(steps));
                sum += qsim::expect_z(st, 0) / 2.0;
            }
            return sum / static_cast<double>(1u << (L - 1));
        };
        const double a = ensemble(50), b = ensemble(100), cc = ensemble(200);
        note(fmt("diagnostic, L=8 exact ensemble, uniform steps: change ratio %.3f", (b - a) / (cc - b)));
    }
    const bool ok = norm_drift <= 1e-9 && sz_drift <= 1e-8 && violations == 0 && ratio >= 3.0 && ratio <= 5.0;
    return {ok, fmt("norm drift %.2g (<= 1e-9), S^z drift %.2g (<= 1e-8), particle violations %zu, "
                    "Trotter change ratio %.2f (~4)",
                    norm_drift, sz_drift, violations, ratio)};
}

// ---------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

int shell(const std::string& cmd) { return std::system((cmd + " > /dev/null 2>&1").c_str()); }

Outcome c10_determinism() {
    const fs::path dir = work_dir / "determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
        std::ofstream states(dir / "states.txt");
        for (std::uint64_t r = 0; r < 8; ++r) {
            const auto traj = clg::run(clg::ChainConfig{64, 40, 512, child_seed(opt.seed, r)});
            for (auto b : traj.final_state.occupancy) states << (b ? '1' : '0');
            states << '\n';
        }
        std::ofstream grid(dir / "grid.csv");
        std::mt19937_64 gen(opt.seed);
        write_matrix_csv(grid, fixtures::random_grid(12, 20, false, gen).matrix);
    }
    const std::string exe = STDISSIM_CLI;
    const std::string d = dir.string();
    const std::vector<std::pair<std::string, std::string>> runs = {
        {"clg-sweep", "--length 32 --steps 256 --runs 10 --rho-step 0.1"},
        {"clg-cid", "--state " + d + "/states.txt"},
        {"dtc-curve", "--qubits 8 --realizations 16 --eps-step 0.02"},
        {"dtc-hamming", "--qubits 8 --circuits 32 --cycles 64"},
        {"transport-magnetization", "--qubits 8 --experiments 6 --mesh 512"},
        {"transport-dissim", "--qubits 8 --experiments 6 --mesh 512 --window 16"},
        {"dissim", "--grid " + d + "/grid.csv"},
        {"plot", "--in " + d + "/clg-sweep_w1/clg_sweep.csv"},
    };
    std::size_t identical = 0, total = 0, failures = 0;
    for (const auto& [sub, args] : runs) {
        std::set<std::string> names;
        for (std::size_t w : {1u, 4u}) {
            const std::string out = d + "/" + sub + "_w" + std::to_string(w);
            const int rc = shell(exe + " " + sub + " " + args + " --seed 7 --workers " + std::to_string(w) + " --out " + out);
            if (rc != 0) {
                ++failures;
                note(sub + ": exit status " + std::to_string(rc));
            }
            std::error_code ec;
            for (const auto& e : fs::directory_iterator(out, ec))
                if (e.path().extension() != ".json") names.insert(e.path().filename().string());
        }
        for (const auto& n : names) {
            const auto a = slurp(dir / (sub + "_w1") / n), b = slurp(dir / (sub + "_w4") / n);
            const bool same = !a.empty() && a == b;
            identical += same;
            ++total;
            note(fmt("%-24s %-28s %6zu bytes  identical: %s", sub.c_str(), n.c_str(), a.size(), yes(same).c_str()));
        }
    }
    const bool ok = failures == 0 && identical == total && total >= runs.size();
    return {ok, fmt("%zu/%zu outputs byte-identical across 1 and 4 workers; %zu failed runs", identical, total,
                    failures)};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Full-scale acceptance run"};
    std::vector<int> only;
    app.add_option("--only", only, "Criterion numbers to run (default: all)")->delimiter(',')->check(CLI::Range(1, 10));
    app.add_option("--seed", opt.seed, "Master seed")->capture_default_str();
    app.add_option("--workers", opt.workers, "Worker threads")->capture_default_str();
    app.add_option("--c8-experiments", opt.c8_experiments, "Experiments per variant for criterion 8")
        ->capture_default_str();
    app.add_option("--c9-experiments", opt.c9_experiments, "Experiments for the Trotter refinement check")
        ->capture_default_str();
    std::string log_path;
    app.add_option("--log", log_path, "Also write the report to this file");
    CLI11_PARSE(app, argc, argv);
    if (!log_path.empty()) log_file.open(log_path);
    if (opt.workers == 0) opt.workers = default_workers();

    work_dir = STDISSIM_ACCEPTANCE_TMP;
    fs::create_directories(work_dir);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"dissimilarity kernel matches brute force", c1_oracle},
        {"lattice-gas transition shape", c2_clg_transition},
        {"D_xt maximum insensitive to size; CID noisier", c3_size_insensitivity},
        {"time crystal exact at eps = 0", c4_dtc_exactness},
        {"Hamming histograms", c5_hamming},
        {"critical epsilon", c6_critical_point},
        {"transport hydrodynamics", c7_hydrodynamics},
        {"monitoring profile", c8_monitoring},
        {"conservation and Trotter order", c9_conservation},
        {"determinism across worker counts", c10_determinism},
    };
    std::size_t run = 0, passed = 0;
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        emit("criterion " + std::to_string(id) + ": " + criteria[i].first + '\n');
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        emit((o.pass ? "PASS" : "FAIL") + std::string(" criterion ") + std::to_string(id) + " - " + o.summary +
             fmt(" [%.1f s]", secs) + "\n\n");
        ++run;
        passed += o.pass;
    }
    emit("acceptance: " + std::to_string(passed) + "/" + std::to_string(run) + " criteria passed in " +
         fmt("%.0f s", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()) + '\n');
    return 0;
}
