#include "bkhm/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <sstream>

#include "bkhm/config.hpp"
#include "bkhm/error.hpp"
#include "bkhm/io.hpp"
#include "bkhm/khm.hpp"
#include "bkhm/oracle.hpp"
#include "bkhm/statistics.hpp"

namespace bkhm {

namespace fs = std::filesystem;

namespace {

class UsageError : public Error {
public:
    using Error::Error;
};

struct Args {
    std::string config, snapshots, out, kinds, range;
};

fs::path output_dir(const Args& a, const RunConfig& c) {
    fs::path dir = a.out.empty() ? fs::path(c.output) : fs::path(a.out);
    fs::create_directories(dir);
    return dir;
}

RunConfig need_config(const Args& a) {
    if (a.config.empty()) throw UsageError("--config is required");
    return load_config(a.config);
}

// Snapshots of a run, checked against the configured grid and each other.
struct Ensemble {
    std::vector<fs::path> files;
    PhysicsParams physics;
};

Ensemble need_snapshots(const Args& a, const RunConfig& c) {
    if (a.snapshots.empty()) throw UsageError("--snapshots is required");
    Ensemble e;
    e.files = list_snapshots(a.snapshots);
    if (e.files.empty()) throw UsageError("no *.bkhm snapshots in " + a.snapshots);
    const Snapshot first = read_snapshot(e.files.front(), c.channel());
    e.physics = first.physics;
    return e;
}

template <class Fn>
void for_each_snapshot(const Ensemble& e, const ChannelGrid& g, Fn&& fn) {
    for (const auto& f : e.files) {
        const Snapshot s = read_snapshot(f, g);
        if (s.physics.nu != e.physics.nu || s.physics.alpha != e.physics.alpha || s.physics.beta != e.physics.beta)
            throw ValidationError(f.string() + ": physics header differs from " + e.files.front().string());
        fn(s);
    }
}

SeparationGrid separations(const Args& a, const RunConfig& c) {
    if (a.range.empty()) return c.separations();
    const auto comma = a.range.find(',');
    double lo = 0, hi = 0;
    try {
        if (comma == std::string::npos) throw std::invalid_argument("");
        std::size_t p1 = 0, p2 = 0;
        lo = std::stod(a.range.substr(0, comma), &p1);
        hi = std::stod(a.range.substr(comma + 1), &p2);
        if (p1 != comma || p2 != a.range.size() - comma - 1) throw std::invalid_argument("");
    } catch (const std::logic_error&) {
        throw UsageError("--range expects l_lo,l_hi");
    }
    return SeparationGrid::log_spaced(c.channel(), lo, hi, c.analysis.n_l, c.analysis.n_dirs);
}

void write_series(const fs::path& path, const DiagnosticSeries& s) {
    CsvWriter csv({"l", "value", "stderr", "n_samples"});
    for (std::size_t i = 0; i < s.values.size(); ++i)
        csv.row({s.grid.lengths[i], s.values[i], s.std_error.empty() ? 0.0 : s.std_error[i],
                 static_cast<double>(s.n_samples)});
    csv.save(path);
}

void write_budget(const fs::path& path, const KHMBudget& b) {
    CsvWriter csv({"l", "flux", "visc_term", "drag_term", "coriolis_term", "noise_term", "residual", "residual_rel",
                   "stderr"});
    for (std::size_t i = 0; i < b.flux.size(); ++i)
        csv.row({b.grid.lengths[i], b.flux[i], b.visc_term[i], b.drag_term[i], b.coriolis_term[i], b.noise_term[i],
                 b.residual[i], b.residual_rel[i], b.flux_std_error[i]});
    csv.save(path);
}

int simulate(const Args& a, std::ostream& out) {
    const RunConfig c = need_config(a);
    const fs::path dir = output_dir(a, c);
    const fs::path snaps = dir / "snapshots";
    fs::create_directories(snaps);
    for (const auto& old : list_snapshots(snaps)) fs::remove(old);
    write_file_atomic(dir / "config.ini", echo_config(c));

    const ForcingBasis basis = c.basis();
    std::int64_t n = 0;
    const auto sink = [&](const FlowState& s) { write_snapshot(snaps / snapshot_name(n++), s, c.physics); };
    const RunSummary r = run_to_stationarity(FlowState(c.channel()), c.physics, basis, RngState{c.seed, 0},
                                             c.time.dt, c.spinup(), sink);

    CsvWriter norms({"t", "energy_total", "enstrophy_total", "palinstrophy_total"});
    for (const auto& s : r.norms) norms.row({s.t, s.energy, s.enstrophy, s.palinstrophy});
    norms.save(dir / "norms.csv");
    CsvWriter summary({"spinup_time", "spinup_steps", "snapshots", "final_time", "final_step"});
    summary.row({r.spinup_time, static_cast<double>(r.spinup_steps), static_cast<double>(r.snapshots),
                 r.final_state.t, static_cast<double>(r.final_state.step_index)});
    summary.save(dir / "summary.csv");
    out << "spin-up reached at t = " << r.spinup_time << " (" << r.spinup_steps << " steps); wrote " << r.snapshots
        << " snapshots to " << snaps.string() << "\n";
    return exit_ok;
}

int budget(const Args& a, std::ostream& out) {
    const RunConfig c = need_config(a);
    const Ensemble e = need_snapshots(a, c);
    const fs::path dir = output_dir(a, c);
    const ChannelGrid g = c.channel();
    const SeparationGrid sep = separations(a, c);
    StatisticsOptions o = c.statistics_options();
    o.beta = e.physics.beta;
    const std::vector<SeriesKind> kinds{SeriesKind::DBar,      SeriesKind::GammaBar, SeriesKind::CThetaBar,
                                        SeriesKind::FrakDBar,  SeriesKind::FrakCBar, SeriesKind::FrakQBar};
    SeriesAccumulator acc(g, sep, kinds, o, static_cast<std::int64_t>(e.files.size()));
    for_each_snapshot(e, g, [&](const Snapshot& s) { acc.add(s.state().omega); });
    const auto s = acc.finish();
    const ForcingBasis basis = c.basis();
    const auto vel = khm_velocity_budget(s[0], s[1], s[2], forcing_series(SeriesKind::ABar, basis, sep),
                                         e.physics.nu, e.physics.alpha);
    const auto vor = khm_vorticity_budget(s[3], s[4], s[5], forcing_series(SeriesKind::FrakABar, basis, sep),
                                          e.physics.nu, e.physics.alpha);
    write_budget(dir / "budget_velocity.csv", vel);
    write_budget(dir / "budget_vorticity.csv", vor);
    out << "budgets from " << acc.count() << " snapshots written to " << dir.string() << "\n";
    return exit_ok;
}

int structure(const Args& a, std::ostream& out) {
    const RunConfig c = need_config(a);
    std::vector<SeriesKind> kinds;
    if (a.kinds.empty()) {
        kinds = {SeriesKind::GammaBar, SeriesKind::CThetaBar,      SeriesKind::FrakCBar,
                 SeriesKind::FrakQBar, SeriesKind::DBar,           SeriesKind::FrakDBar,
                 SeriesKind::S3Longitudinal, SeriesKind::S3MixedLongitudinal};
    } else {
        std::stringstream ss(a.kinds);
        for (std::string k; std::getline(ss, k, ',');) {
            try {
                kinds.push_back(parse_kind(k));
            } catch (const ValidationError& e) {
                throw UsageError(e.what());
            }
        }
    }
    const SeparationGrid sep = separations(a, c);
    std::vector<SeriesKind> snapshot_kinds;
    for (auto k : kinds)
        if (is_snapshot_kind(k)) snapshot_kinds.push_back(k);

    std::vector<DiagnosticSeries> series;
    std::int64_t count = 0;
    if (!snapshot_kinds.empty()) {
        const Ensemble e = need_snapshots(a, c);
        const ChannelGrid g = c.channel();
        StatisticsOptions o = c.statistics_options();
        o.beta = e.physics.beta;
        SeriesAccumulator acc(g, sep, snapshot_kinds, o, static_cast<std::int64_t>(e.files.size()));
        for_each_snapshot(e, g, [&](const Snapshot& s) { acc.add(s.state().omega); });
        series = acc.finish();
        count = acc.count();
    }
    const fs::path dir = output_dir(a, c);
    std::size_t next = 0;
    for (auto k : kinds) {
        const DiagnosticSeries s =
            is_snapshot_kind(k) ? series[next++] : forcing_series(k, c.basis(), sep);
        write_series(dir / (std::string(kind_name(k)) + ".csv"), s);
    }
    out << kinds.size() << " series (" << count << " snapshots) written to " << dir.string() << "\n";
    return exit_ok;
}

int balance(const Args& a, std::ostream& out) {
    const RunConfig c = need_config(a);
    const Ensemble e = need_snapshots(a, c);
    std::vector<NormSample> samples;
    for_each_snapshot(e, c.channel(), [&](const Snapshot& s) { samples.push_back(spectral_norms(s.state())); });
    const BalanceReport r = balance_residuals(samples, c.basis(), e.physics, c.analysis.n_blocks);
    CsvWriter csv({"quantity", "lhs", "stderr", "target", "residual", "n_samples"});
    const auto n = std::to_string(r.n_samples);
    csv.row(std::vector<std::string>{"energy", format_double(r.eps_lhs), format_double(r.eps_lhs_std_error),
                                     format_double(r.eps_target), format_double(r.eps_residual), n});
    csv.row(std::vector<std::string>{"enstrophy", format_double(r.eta_lhs), format_double(r.eta_lhs_std_error),
                                     format_double(r.eta_target), format_double(r.eta_residual), n});
    const fs::path dir = output_dir(a, c);
    csv.save(dir / "balance.csv");
    out << "energy residual " << r.eps_residual << ", enstrophy residual " << r.eta_residual << " over "
        << r.n_samples << " snapshots\n";
    return exit_ok;
}

int spectrum(const Args& a, std::ostream& out) {
    const RunConfig c = need_config(a);
    const Ensemble e = need_snapshots(a, c);
    std::vector<SpectralField> snaps;
    for_each_snapshot(e, c.channel(), [&](const Snapshot& s) { snaps.push_back(s.state().omega); });
    const EnergySpectrum s = energy_spectrum(snaps);
    CsvWriter csv({"kappa", "E", "stderr"});
    for (std::size_t i = 0; i < s.kappa.size(); ++i) csv.row({s.kappa[i], s.energy[i], s.std_error[i]});
    const fs::path dir = output_dir(a, c);
    csv.save(dir / "spectrum.csv");
    out << s.kappa.size() << " shells written to " << (dir / "spectrum.csv").string() << "\n";
    return exit_ok;
}

int oracle_check(std::ostream& out) {
    const auto reports = run_oracle_suite();
    bool ok = true;
    out << std::left << std::setw(48) << "operation" << std::setw(24) << "instances" << std::setw(14) << "max_rel_err"
        << "status\n";
    for (const auto& r : reports) {
        std::ostringstream e;
        e << std::scientific << std::setprecision(3) << r.max_rel_error;
        out << std::left << std::setw(48) << r.operation << std::setw(24) << r.instance << std::setw(14) << e.str()
            << (r.pass ? "PASS" : "FAIL") << "\n";
        ok = ok && r.pass;
    }
    return ok ? exit_ok : exit_oracle;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stochastic beta-plane channel turbulence: simulation and KHM statistics", "bkhm"};
    app.require_subcommand(1);
    Args a;
    auto add_common = [&](CLI::App* s, bool snaps) {
        s->add_option("--config", a.config, "run configuration (INI)");
        s->add_option("--out", a.out, "output directory (default: output.directory)");
        if (snaps) s->add_option("--snapshots", a.snapshots, "directory of *.bkhm snapshots");
    };
    auto* sim = app.add_subcommand("simulate", "run to stationarity and write snapshots and norms.csv");
    add_common(sim, false);
    auto* bud = app.add_subcommand("budget", "velocity and vorticity KHM budgets");
    add_common(bud, true);
    bud->add_option("--range", a.range, "separation range l_lo,l_hi");
    auto* str = app.add_subcommand("structure", "direction-averaged two-point series");
    add_common(str, true);
    str->add_option("--kinds", a.kinds, "comma-separated series kinds");
    str->add_option("--range", a.range, "separation range l_lo,l_hi");
    auto* bal = app.add_subcommand("balance", "stationary energy and enstrophy balance");
    add_common(bal, true);
    auto* spe = app.add_subcommand("spectrum", "shell-averaged energy spectrum");
    add_common(spe, true);
    app.add_subcommand("oracle-check", "compare fast statistics with brute-force oracles");

    std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "bkhm: " << e.what() << "\n\n" << app.help();
        return exit_usage;
    }

    auto* cmd = app.get_subcommands().front();
    const std::string name = cmd->get_name();
    try {
        if (name == "simulate") return simulate(a, out);
        if (name == "budget") return budget(a, out);
        if (name == "structure") return structure(a, out);
        if (name == "balance") return balance(a, out);
        if (name == "spectrum") return spectrum(a, out);
        return oracle_check(out);
    } catch (const UsageError& e) {
        err << "bkhm " << name << ": " << e.what() << "\n\n" << cmd->help();
        return exit_usage;
    } catch (const NumericalError& e) {
        err << "bkhm " << name << ": numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const Error& e) {
        err << "bkhm " << name << ": " << e.what() << "\n";
        return exit_validation;
    } catch (const fs::filesystem_error& e) {
        err << "bkhm " << name << ": " << e.what() << "\n";
        return exit_validation;
    }
}

}  // namespace bkhm
