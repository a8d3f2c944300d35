#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cid.hpp"
#include "clg_sweep.hpp"
#include "dissimilarity.hpp"
#include "dtc.hpp"
#include "errors.hpp"
#include "fit.hpp"
#include "parallel.hpp"
#include "plot.hpp"
#include "stats.hpp"
#include "table.hpp"
#include "transport.hpp"

// Command-line front end: every subcommand validates its parameters, runs the
// ensemble, and writes versioned CSVs, each with a JSON manifest that records
// the resolved configuration (as an INI file that --config accepts).
namespace stdissim::cli {

inline constexpr std::string_view kToolName = "stdissim";
inline constexpr std::string_view kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kRuntimeFailure = 1, kUsageError = 2 };

struct OutputFile {
    std::string name;
    std::string schema;
    std::string content;
};

inline OutputFile csv_file(std::string name, const CsvTable& t) { return {std::move(name), t.schema, t.str()}; }

struct RunContext {
    std::string subcommand;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    std::vector<std::string> argv;
    std::string config_ini;
};

inline nlohmann::ordered_json manifest(const RunContext& ctx, const OutputFile& f) {
    nlohmann::ordered_json j;
    j["tool"] = kToolName;
    j["version"] = kVersion;
    j["subcommand"] = ctx.subcommand;
    j["file"] = f.name;
    j["schema"] = f.schema;
    j["seed"] = ctx.seed;
    j["workers"] = ctx.workers;
    j["argv"] = ctx.argv;
    j["config"] = ctx.config_ini;
    return j;
}

/// Writes every file plus `<name>.manifest.json` into dir. Content goes to a
/// temporary name first and is renamed into place; on any failure every file
/// written so far is removed, as is the directory if this call created it.
inline std::vector<std::filesystem::path> commit(const std::filesystem::path& dir,
                                                 const std::vector<OutputFile>& files, const RunContext& ctx) {
    namespace fs = std::filesystem;
    const bool created = !fs::exists(dir);
    std::vector<fs::path> written;
    auto write = [&](const fs::path& target, const std::string& content) {
        const fs::path tmp = target.string() + ".tmp";
        written.push_back(tmp);
        {
            std::ofstream out(tmp, std::ios::binary);
            out << content;
            out.flush();
            if (!out) throw ToolError("cannot write " + tmp.string());
        }
        fs::rename(tmp, target);
        written.back() = target;
    };
    try {
        fs::create_directories(dir);
        for (const auto& f : files) {
            write(dir / f.name, f.content);
            write(dir / (f.name + ".manifest.json"), manifest(ctx, f).dump(2) + "\n");
        }
    } catch (...) {
        std::error_code ec;
        for (const auto& p : written) fs::remove(p, ec);
        if (created) fs::remove(dir, ec);
        throw;
    }
    return written;
}

// A prepared run: parameters already validated, only compute and formatting left.
using Job = std::function<std::vector<OutputFile>(std::ostream& log)>;

struct Common {
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    std::string out;
};

struct Command {
    CLI::App* app = nullptr;
    std::shared_ptr<Common> common;
    std::function<Job()> prepare;
};

inline std::shared_ptr<Common> add_common(CLI::App* sub) {
    auto c = std::make_shared<Common>();
    sub->add_option("--seed", c->seed, "Master seed; task i uses a splitmix child of (seed, i)")->capture_default_str();
    sub->add_option("--workers", c->workers, "Worker threads (results do not depend on this)")
        ->capture_default_str()
        ->check(CLI::Range(std::size_t{1}, std::size_t{4096}));
    sub->add_option("--out", c->out, "Output directory")->required();
    return c;
}

/// Rejects L x T grids that yield fewer than two coarse-graining steps.
inline void check_grid_shape(std::size_t L, std::size_t T, const FilterSpec& f) {
    if (L == 0 || T == 0) throw InvalidConfig("grid must be non-empty");
    const Pyramid p = build_pyramid(SpaceTimeGrid::from_normalized(Matrix(L, T)), f);
    if (p.k_max() < 2)
        throw InvalidConfig("grid " + std::to_string(L) + "x" + std::to_string(T) + " is too small for filter " +
                            std::to_string(f.lambda_x) + "x" + std::to_string(f.lambda_t));
}

inline std::size_t count_in(std::span<const double> xs, double lo, double hi) {
    std::size_t n = 0;
    for (double x : xs) n += x >= lo - 1e-9 && x <= hi + 1e-9;
    return n;
}

inline void check_window(const std::vector<double>& w, const char* name) {
    if (w.size() != 2 || !(w[0] < w[1])) throw InvalidConfig(std::string(name) + ": need lo < hi");
}

// ---------------------------------------------------------------------------

inline Command add_clg_sweep(CLI::App& app) {
    auto* sub = app.add_subcommand("clg-sweep", "Lattice-gas density sweep: D_xt, D_x, D_t, CID, f_a per density");
    struct Opts {
        std::size_t length = 64, steps = 1024, runs = 100, lambda_x = 2, lambda_t = 2;
        double rho_min = 0.30, rho_max = 0.95, rho_step = 0.05;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("--length", o->length, "Ring length L")->capture_default_str();
    sub->add_option("--steps", o->steps, "Recorded single-particle updates T")->capture_default_str();
    sub->add_option("--rho-min", o->rho_min, "Smallest density")->capture_default_str();
    sub->add_option("--rho-max", o->rho_max, "Largest density")->capture_default_str();
    sub->add_option("--rho-step", o->rho_step, "Density step")->capture_default_str();
    sub->add_option("--runs", o->runs, "Independent starting configurations per density")->capture_default_str();
    sub->add_option("--lambda-x", o->lambda_x, "Spatial filter edge")->capture_default_str();
    sub->add_option("--lambda-t", o->lambda_t, "Temporal filter edge")->capture_default_str();
    auto common = add_common(sub);
    return {sub, common, [o, common]() -> Job {
                clg::SweepConfig c;
                c.L = o->length;
                c.T = o->steps;
                c.runs = o->runs;
                c.filter = FilterSpec{o->lambda_x, o->lambda_t};
                c.densities = linear_grid(o->rho_min, o->rho_max, o->rho_step);
                c.seed = common->seed;
                c.workers = common->workers;
                c.validate();
                check_grid_shape(c.L, c.T, c.filter);
                check_grid_shape(c.L, 1, FilterSpec{c.filter.lambda_x, 1});
                check_grid_shape(1, c.T, FilterSpec{1, c.filter.lambda_t});
                return [c](std::ostream& log) {
                    const auto pts = clg::run_sweep(c);
                    CsvTable t("clg-sweep/1", {"rho", "N", "runs", "D_xt", "D_xt_sd", "D_xt_se", "D_x", "D_x_sd",
                                               "D_x_se", "D_t", "D_t_sd", "D_t_se", "CID", "CID_sd", "CID_se", "f_a",
                                               "f_a_sd", "f_a_se", "absorbed_fraction"});
                    for (const auto& p : pts) {
                        std::vector<std::string> row{cell(p.rho), cell(p.N), cell(p.runs)};
                        for (const Summary* s : {&p.d_xt, &p.d_x, &p.d_t, &p.cid, &p.f_a}) {
                            row.push_back(cell(s->mean));
                            row.push_back(cell(s->stddev));
                            row.push_back(cell(s->sem));
                        }
                        row.push_back(cell(p.absorbed_fraction));
                        t.add_row(std::move(row));
                    }
                    log << "densities: " << pts.size() << ", runs per density: " << c.runs << '\n';
                    return std::vector<OutputFile>{csv_file("clg_sweep.csv", t)};
                };
            }};
}

/// One state per non-empty line, written as '0'/'1' characters; '#' starts a
/// comment line.
inline std::vector<clg::Occupancy> read_state_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    std::vector<clg::Occupancy> states;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        clg::Occupancy occ;
        for (char ch : line) {
            if (ch != '0' && ch != '1')
                throw InvalidInput(path + ":" + std::to_string(lineno) + ": state must contain only '0' and '1'");
            occ.push_back(ch == '1');
        }
        states.push_back(std::move(occ));
    }
    if (states.empty()) throw InvalidInput(path + ": no states found");
    return states;
}

inline Command add_clg_cid(CLI::App& app) {
    auto* sub = app.add_subcommand("clg-cid", "Compression-based information density of lattice states");
    auto state = std::make_shared<std::string>();
    sub->add_option("--state", *state, "State file: one line of 0/1 characters per state")
        ->required()
        ->check(CLI::ExistingFile);
    auto common = add_common(sub);
    return {sub, common, [state, common]() -> Job {
                auto states = read_state_file(*state);
                return [states = std::move(states), common](std::ostream& log) {
                    const auto res = parallel_map<cid::CIDResult>(
                        states.size(), common->workers, [&](std::size_t i) { return cid::compute_cid(states[i]); });
                    CsvTable t("clg-cid/1", {"state", "L", "original_bytes", "compressed_bytes", "cid"});
                    for (std::size_t i = 0; i < res.size(); ++i)
                        t.add_row({cell(i), cell(states[i].size()), cell(res[i].original_bytes),
                                   cell(res[i].compressed_bytes), cell(res[i].cid)});
                    log << "states: " << res.size() << '\n';
                    return std::vector<OutputFile>{csv_file("clg_cid.csv", t)};
                };
            }};
}

inline void check_qubits(std::size_t L) {
    if (L < 1 || L > qsim::kMaxQubits)
        throw InvalidConfig("qubits must lie in [1, " + std::to_string(qsim::kMaxQubits) + "]");
}

inline Command add_dtc_curve(CLI::App& app) {
    auto* sub = app.add_subcommand("dtc-curve", "Mean D_xt of sampled DTC grids vs epsilon, and the crossing point");
    struct Opts {
        std::size_t qubits = 16, realizations = 512, cycles = 16, lambda_x = 2, lambda_t = 2;
        double eps_min = 0.0, eps_max = 0.5, eps_step = 0.01;
        std::vector<double> dtc_window{dtc::kDefaultDtcWindow.lo, dtc::kDefaultDtcWindow.hi};
        std::vector<double> thermal_window{dtc::kDefaultThermalWindow.lo, dtc::kDefaultThermalWindow.hi};
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("--qubits", o->qubits, "Chain length L")->capture_default_str();
    sub->add_option("--eps-min", o->eps_min, "Smallest epsilon")->capture_default_str();
    sub->add_option("--eps-max", o->eps_max, "Largest epsilon")->capture_default_str();
    sub->add_option("--eps-step", o->eps_step, "Epsilon step")->capture_default_str();
    sub->add_option("--realizations", o->realizations, "Disorder realizations per epsilon")->capture_default_str();
    sub->add_option("--cycles", o->cycles, "Floquet cycles (one sample each)")->capture_default_str();
    sub->add_option("--dtc-window", o->dtc_window, "Epsilon interval of the DTC-side line fit")
        ->expected(2)
        ->capture_default_str();
    sub->add_option("--thermal-window", o->thermal_window, "Epsilon interval of the thermal-side line fit")
        ->expected(2)
        ->capture_default_str();
    sub->add_option("--lambda-x", o->lambda_x, "Spatial filter edge")->capture_default_str();
    sub->add_option("--lambda-t", o->lambda_t, "Temporal filter edge")->capture_default_str();
    auto common = add_common(sub);
    return {sub, common, [o, common]() -> Job {
                check_qubits(o->qubits);
                dtc::CurveConfig c;
                c.L = o->qubits;
                c.epsilons = linear_grid(o->eps_min, o->eps_max, o->eps_step);
                c.realizations = o->realizations;
                c.cycles = o->cycles;
                c.seed = common->seed;
                c.workers = common->workers;
                c.filter = FilterSpec::make(o->lambda_x, o->lambda_t);
                if (c.cycles < 16) throw InvalidConfig("--cycles must be >= 16");
                if (c.realizations < 1) throw InvalidConfig("--realizations must be >= 1");
                for (double e : c.epsilons)
                    if (!(e >= 0.0 && e <= 0.5)) throw InvalidConfig("--eps-min/--eps-max must lie in [0, 0.5]");
                check_window(o->dtc_window, "--dtc-window");
                check_window(o->thermal_window, "--thermal-window");
                const dtc::EpsilonWindow dw{o->dtc_window[0], o->dtc_window[1]};
                const dtc::EpsilonWindow tw{o->thermal_window[0], o->thermal_window[1]};
                if (count_in(c.epsilons, dw.lo, dw.hi) < 3 || count_in(c.epsilons, tw.lo, tw.hi) < 3)
                    throw InvalidConfig("each fit window needs at least 3 epsilon grid points");
                check_grid_shape(c.L, c.cycles, c.filter);
                return [c, dw, tw](std::ostream& log) {
                    const auto curve = dtc::dissimilarity_vs_epsilon(c);
                    CsvTable t("dtc-curve/1", {"epsilon", "mean", "stderr", "measurements"});
                    for (const auto& p : curve) t.add_row({cell(p.epsilon), cell(p.mean), cell(p.sem), cell(p.measurements)});
                    const auto cp = dtc::estimate_epsilon_c(curve, dw, tw);
                    CsvTable r("dtc-critical/1", {"epsilon_c", "dtc_slope", "dtc_intercept", "dtc_points", "thermal_slope",
                                                  "thermal_intercept", "thermal_points"});
                    r.add_row({cell(cp.epsilon_c), cell(cp.dtc.slope), cell(cp.dtc.intercept), cell(cp.dtc.points),
                               cell(cp.thermal.slope), cell(cp.thermal.intercept), cell(cp.thermal.points)});
                    log << "epsilon_c = " << format_double(cp.epsilon_c) << '\n';
                    return std::vector<OutputFile>{csv_file("dtc_curve.csv", t), csv_file("dtc_critical.csv", r)};
                };
            }};
}

inline Command add_dtc_hamming(CLI::App& app) {
    auto* sub = app.add_subcommand("dtc-hamming", "Hamming-distance histograms at an even and an odd cycle");
    struct Opts {
        std::size_t qubits = 16, circuits = 512, cycles = 64;
        double epsilon = 0.04;
        std::vector<std::size_t> steps{62, 63};
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("--qubits", o->qubits, "Chain length L")->capture_default_str();
    sub->add_option("--epsilon", o->epsilon, "Pulse imperfection")->capture_default_str();
    sub->add_option("--circuits", o->circuits, "Random circuits")->capture_default_str();
    sub->add_option("--cycles", o->cycles, "Floquet cycles per circuit")->capture_default_str();
    sub->add_option("--steps", o->steps, "Even and odd cycle indices")->expected(2)->capture_default_str();
    auto common = add_common(sub);
    return {sub, common, [o, common]() -> Job {
                check_qubits(o->qubits);
                if (!(o->epsilon >= 0.0 && o->epsilon <= 0.5)) throw InvalidConfig("--epsilon must lie in [0, 0.5]");
                if (o->circuits < 1) throw InvalidConfig("--circuits must be >= 1");
                if (o->steps.size() != 2) throw InvalidConfig("--steps needs two values");
                if (o->steps[0] % 2 != 0 || o->steps[1] % 2 != 1)
                    throw InvalidConfig("--steps: first must be even, second odd");
                if (std::max(o->steps[0], o->steps[1]) >= o->cycles)
                    throw InvalidConfig("--steps must be < --cycles");
                dtc::HammingConfig c{o->qubits, o->epsilon, o->circuits, o->cycles, {o->steps[0], o->steps[1]},
                                     common->seed, common->workers};
                return [c](std::ostream& log) {
                    const auto h = dtc::run_hamming(c);
                    CsvTable t("dtc-hamming/1", {"d", "p_even", "p_odd"});
                    for (std::size_t d = 0; d < h.p_even.size(); ++d) t.add_row({cell(d), cell(h.p_even[d]), cell(h.p_odd[d])});
                    log << "circuits: " << c.circuits << ", steps " << h.step_even << '/' << h.step_odd << '\n';
                    return std::vector<OutputFile>{csv_file("dtc_hamming.csv", t)};
                };
            }};
}

struct TransportOpts {
    std::size_t qubits = 16, experiments = 128, mesh = 4096;
    double t0 = 0.01, tmax = 126.0;
};

inline void add_transport_options(CLI::App* sub, TransportOpts& o) {
    sub->add_option("--qubits", o.qubits, "Ring length L (even)")->capture_default_str();
    sub->add_option("--experiments", o.experiments, "Independent random initial states")->capture_default_str();
    sub->add_option("--t0", o.t0, "First mesh time")->capture_default_str();
    sub->add_option("--tmax", o.tmax, "Last mesh time")->capture_default_str();
    sub->add_option("--mesh", o.mesh, "Number of mesh times N")->capture_default_str();
}

inline Command add_transport_magnetization(CLI::App& app) {
    auto* sub = app.add_subcommand("transport-magnetization", "Reference-qubit magnetization and its power-law fit");
    struct Opts : TransportOpts {
        std::vector<double> fit_window{5.0, 14.7};
        double late_from = 20.0;
    };
    auto o = std::make_shared<Opts>();
    add_transport_options(sub, *o);
    sub->add_option("--fit-window", o->fit_window, "Time interval of the power-law fit")->expected(2)->capture_default_str();
    sub->add_option("--late-from", o->late_from, "Start of the late-time flatness fit")->capture_default_str();
    auto common = add_common(sub);
    return {sub, common, [o, common]() -> Job {
                transport::TransportConfig c;
                c.L = o->qubits;
                c.with_reference = true;
                c.experiments = o->experiments;
                c.seed = common->seed;
                c.workers = common->workers;
                c.validate();
                const auto s = transport::build_schedule(o->t0, o->tmax, o->mesh);
                check_window(o->fit_window, "--fit-window");
                const double fw0 = o->fit_window[0], fw1 = o->fit_window[1], late = o->late_from;
                if (count_in(s.times, fw0, fw1) < 3) throw InvalidConfig("--fit-window holds fewer than 3 mesh times");
                if (count_in(s.times, late, s.T) < 3) throw InvalidConfig("--late-from leaves fewer than 3 mesh times");
                return [c, s, fw0, fw1, late](std::ostream& log) {
                    const auto pts = transport::run_magnetization(c, s);
                    CsvTable t("transport-magnetization/1", {"t", "Sz_mean", "stderr"});
                    std::vector<double> ts, ys;
                    for (const auto& p : pts) {
                        t.add_row({cell(p.t), cell(p.mean), cell(p.sem)});
                        ts.push_back(p.t);
                        ys.push_back(p.mean);
                    }
                    const auto fit = fit::fit_power_law(ts, ys, fw0, fw1);
                    const auto tail = fit::fit_power_law(ts, ys, late, s.T);
                    CsvTable r("transport-fit/1", {"fit_t_min", "fit_t_max", "exponent", "amplitude", "residual",
                                                   "points", "late_t_min", "late_exponent", "late_points"});
                    r.add_row({cell(fw0), cell(fw1), cell(fit.exponent), cell(fit.amplitude), cell(fit.residual),
                               cell(fit.points), cell(late), cell(tail.exponent), cell(tail.points)});
                    log << "exponent = " << format_double(fit.exponent) << ", late exponent = "
                        << format_double(tail.exponent) << '\n';
                    return std::vector<OutputFile>{csv_file("transport_magnetization.csv", t),
                                                   csv_file("transport_fit.csv", r)};
                };
            }};
}

inline Command add_transport_dissim(CLI::App& app) {
    auto* sub = app.add_subcommand("transport-dissim", "Windowed dissimilarity of sampled bitstrings along the mesh");
    struct Opts : TransportOpts {
        std::size_t window = 16, groups = 16;
        bool no_reference = false;
        double early_limit = 5.0, z_floor = 5.0, plateau_from = 40.0, plateau_band = 3.0, flat_z = 3.0;
    };
    auto o = std::make_shared<Opts>();
    add_transport_options(sub, *o);
    sub->add_option("--window", o->window, "Mesh steps per dissimilarity window")->capture_default_str();
    sub->add_flag("--no-reference", o->no_reference, "Haar-random control: no qubit prepared in |0>");
    sub->add_option("--early-limit", o->early_limit, "Latest window centre searched for the early transition")
        ->capture_default_str();
    sub->add_option("--z-floor", o->z_floor, "Significance needed for a transition, in standard errors")
        ->capture_default_str();
    sub->add_option("--plateau-from", o->plateau_from, "Windows after this time define the plateau level")
        ->capture_default_str();
    sub->add_option("--plateau-band", o->plateau_band, "Plateau band half-width, in standard errors")
        ->capture_default_str();
    sub->add_option("--flat-groups", o->groups, "Window groups compared by the flatness test")->capture_default_str();
    sub->add_option("--flat-z", o->flat_z, "Flatness tolerance, in standard errors")->capture_default_str();
    auto common = add_common(sub);
    return {sub, common, [o, common]() -> Job {
                transport::TransportConfig c;
                c.L = o->qubits;
                c.with_reference = !o->no_reference;
                c.experiments = o->experiments;
                c.window = o->window;
                c.seed = common->seed;
                c.workers = common->workers;
                c.validate();
                const auto s = transport::build_schedule(o->t0, o->tmax, o->mesh);
                if (s.N % c.window != 0) throw InvalidConfig("--mesh must be divisible by --window");
                check_grid_shape(c.L, c.window, FilterSpec{2, 2});
                const std::size_t nw = s.N / c.window;
                if (nw < transport::kSmoothingWidth + 2) throw InvalidConfig("need at least 7 windows");
                if (o->groups < 1 || o->groups > nw) throw InvalidConfig("--flat-groups must lie in [1, windows]");
                const transport::TransitionOptions topt{o->early_limit, o->z_floor, 1e-9};
                const transport::PlateauOptions popt{o->plateau_from, o->plateau_band};
                const std::size_t groups = o->groups;
                const double flat_z = o->flat_z;
                return [c, s, topt, popt, groups, flat_z](std::ostream& log) {
                    const auto curve = transport::run_windowed_dissimilarity(c, s);
                    CsvTable t("transport-dissim/1", {"t_window", "Dxt_mean", "Dxt_std", "stderr", "t_first", "t_last"});
                    for (const auto& p : curve)
                        t.add_row({cell(p.t_center), cell(p.mean), cell(p.stddev), cell(p.sem), cell(p.t_first),
                                   cell(p.t_last)});
                    const auto tr = transport::detect_transition(curve, topt);
                    const auto onset = transport::detect_plateau_onset(curve, popt);
                    const auto flat = transport::flatness_test(curve, groups, flat_z);
                    const double nan = std::numeric_limits<double>::quiet_NaN();
                    CsvTable r("transport-transition/1",
                               {"with_reference", "transition_detected", "transition_t", "transition_derivative",
                                "transition_z", "plateau_detected", "plateau_onset_t", "flat", "flatness_worst_z"});
                    r.add_row({cell(c.with_reference), cell(tr.has_value()), cell(tr ? tr->time : nan),
                               cell(tr ? tr->derivative : nan), cell(tr ? tr->z : nan), cell(onset.has_value()),
                               cell(onset.value_or(nan)), cell(flat.flat), cell(flat.worst_z)});
                    log << "transition: " << (tr ? format_double(tr->time) : std::string("none"))
                        << ", plateau onset: " << (onset ? format_double(*onset) : std::string("none"))
                        << ", flat: " << (flat.flat ? "yes" : "no") << '\n';
                    return std::vector<OutputFile>{csv_file("transport_dissim.csv", t),
                                                   csv_file("transport_transition.csv", r)};
                };
            }};
}

inline Command add_dissim(CLI::App& app) {
    auto* sub = app.add_subcommand("dissim", "Dissimilarity report of a grid CSV (rows = space, columns = time)");
    struct Opts {
        std::string grid;
        std::size_t lambda_x = 2, lambda_t = 2;
        bool raw = false;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("--grid", o->grid, "Header-free CSV of decimal values")->required()->check(CLI::ExistingFile);
    sub->add_option("--lambda-x", o->lambda_x, "Spatial filter edge")->capture_default_str();
    sub->add_option("--lambda-t", o->lambda_t, "Temporal filter edge")->capture_default_str();
    sub->add_flag("--raw", o->raw, "Rescale values to [-1, 1] by min/max instead of requiring them there");
    auto common = add_common(sub);
    return {sub, common, [o, common]() -> Job {
                const FilterSpec f = FilterSpec::make(o->lambda_x, o->lambda_t);
                const Matrix m = read_matrix_csv(o->grid);
                const SpaceTimeGrid g = o->raw ? normalize_grid(m) : SpaceTimeGrid::from_normalized(m);
                check_grid_shape(g.space(), g.time(), f);
                return [g, f](std::ostream& log) {
                    const auto rep = total_dissimilarity(g, f);
                    std::ostringstream os;
                    write_report_csv(os, rep);
                    log << "D = " << format_double(rep.total) << '\n';
                    return std::vector<OutputFile>{{"dissim_report.csv", "dissim-report/1", os.str()}};
                };
            }};
}

inline Command add_plot(CLI::App& app) {
    auto* sub = app.add_subcommand("plot", "SVG line chart of a result CSV");
    auto in = std::make_shared<std::string>();
    sub->add_option("--in", *in, "Result CSV written by another subcommand")->required()->check(CLI::ExistingFile);
    auto common = add_common(sub);
    return {sub, common, [in]() -> Job {
                return [path = *in](std::ostream& log) {
                    const CsvTable t = read_table(path);
                    const std::string svg = plot::render_svg(plot::chart_from_table(t));
                    const std::string name = std::filesystem::path(path).stem().string() + ".svg";
                    log << "chart: " << t.schema << '\n';
                    return std::vector<OutputFile>{{name, "svg/" + t.schema, svg}};
                };
            }};
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multiscale dissimilarity experiments: lattice gas, time crystals, spin transport",
                 std::string(kToolName)};
    app.set_version_flag("--version", std::string(kVersion));
    app.set_config("--config", "", "INI file; sections are subcommand names, flags override it");
    app.require_subcommand(1);
    const std::vector<Command> commands = {add_clg_sweep(app),   add_clg_cid(app),
                                           add_dtc_curve(app),   add_dtc_hamming(app),
                                           add_transport_magnetization(app), add_transport_dissim(app),
                                           add_dissim(app),      add_plot(app)};
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }
    const Command* cmd = nullptr;
    for (const auto& c : commands)
        if (c.app->parsed()) cmd = &c;
    if (cmd == nullptr) {
        err << "error: no subcommand\n";
        return kUsageError;
    }

    Job job;
    try {
        job = cmd->prepare();
    } catch (const std::exception& e) {
        err << cmd->app->get_name() << ": invalid configuration: " << e.what() << '\n';
        return kUsageError;
    }

    RunContext ctx;
    ctx.subcommand = cmd->app->get_name();
    ctx.seed = cmd->common->seed;
    ctx.workers = cmd->common->workers;
    for (int i = 1; i < argc; ++i) ctx.argv.emplace_back(argv[i]);
    ctx.config_ini = "[" + ctx.subcommand + "]\n" + cmd->app->config_to_str(true, false);

    try {
        const auto files = job(out);
        for (const auto& p : commit(cmd->common->out, files, ctx)) out << "wrote " << p.string() << '\n';
    } catch (const std::exception& e) {
        err << ctx.subcommand << ": error: " << e.what() << '\n';
        return kRuntimeFailure;
    }
    return kOk;
}

} // namespace stdissim::cli
