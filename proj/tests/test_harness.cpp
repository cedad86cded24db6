#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "doctest.h"

#include "bkhm/cli.hpp"
#include "bkhm/config.hpp"
#include "bkhm/error.hpp"
#include "bkhm/io.hpp"
#include "support.hpp"

using namespace bkhm;
namespace fs = std::filesystem;

namespace {

const char* minimal = R"([grid]
N1 = 32
N2 = 31
[forcing]
kappa_lo = 3
kappa_hi = 5
eps_total = 0.5
[rng]
seed = 11
)";

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("bkhm_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    out << s;
}

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

int run(std::vector<std::string> args, std::string* out_text = nullptr) {
    args.insert(args.begin(), "bkhm");
    std::ostringstream out, err;
    const int rc = cli_dispatch(args, out, err);
    if (out_text) *out_text = out.str() + err.str();
    return rc;
}

}  // namespace

TEST_CASE("config: minimal file takes defaults") {
    const RunConfig c = parse_config(minimal);
    CHECK(c.grid.N1 == 32);
    CHECK(c.grid.L == doctest::Approx(2 * std::numbers::pi));
    CHECK(c.physics.nu == 0.0);
    CHECK(c.seed == 11);
    CHECK(c.time.dt > 0);
    CHECK(c.time.spinup_window > 0);
    CHECK(c.analysis.n_dirs == 16);
    CHECK(c.analysis.n_blocks == 10);
    CHECK(c.output == "out");
    CHECK_NOTHROW(c.basis());
    CHECK_NOTHROW(c.separations());
}

TEST_CASE("config: errors name the key") {
    std::string s = minimal;
    s.replace(s.find("kappa_hi = 5"), 12, "kappa_hi = 15");
    CHECK(error_of(s).find("forcing.kappa_hi") != std::string::npos);

    s = minimal;
    s.replace(s.find("seed = 11"), 9, "");
    CHECK(error_of(s).find("rng.seed") != std::string::npos);

    s = minimal;
    s.replace(s.find("N2 = 31"), 7, "N2 = 3x");
    CHECK(error_of(s).find("grid.N2") != std::string::npos);

    s = std::string(minimal) + "[physics]\nnu = -1\n";
    CHECK(error_of(s).find("physics.nu") != std::string::npos);

    s = std::string(minimal) + "[physics]\nviscosity = 1\n";
    CHECK(error_of(s).find("physics.viscosity") != std::string::npos);

    s = std::string(minimal) + "[analysis]\nl_max = 2\n";
    CHECK(error_of(s).find("analysis.l_max") != std::string::npos);
}

TEST_CASE("config: echo reloads to the same config") {
    const std::string full = std::string(minimal) +
                             "[physics]\nnu = 1e-3\nalpha = 0.1\nbeta = 0.7\nf0 = 3\n[time]\ndt = 0.0123456789\n"
                             "[analysis]\ninterpolation = bilinear\nn_l = 12\n[output]\ndirectory = a/b\n";
    const RunConfig c = parse_config(full);
    const RunConfig d = parse_config(echo_config(c));
    CHECK(c == d);
    CHECK(echo_config(d) == echo_config(c));
}

TEST_CASE("snapshot round trip and error kinds") {
    const auto g = ChannelGrid::standard(16, 15);
    const FlowState s(test::random_vorticity(g, 4), 12.5, 2500);
    const PhysicsParams p{1e-3, 0.05, 1.0, 10.0};
    const fs::path dir = scratch("snap");
    const fs::path f = dir / snapshot_name(0);
    write_snapshot(f, s, p);
    CHECK_FALSE(fs::exists(f.string() + ".tmp"));

    const Snapshot r = read_snapshot(f);
    CHECK(r.grid == g);
    CHECK(r.t == 12.5);
    CHECK(r.step_index == 2500);
    CHECK(r.physics.f0 == 10.0);
    const auto back = transform_inverse(s.omega);
    CHECK(r.omega.values == back.values);

    const std::string good = slurp(f);
    std::string bad = good;
    bad[200] ^= 1;
    spit(f, bad);
    CHECK_THROWS_AS(read_snapshot(f), ChecksumError);

    bad = good;
    bad[4] = 9;
    spit(f, bad);
    CHECK_THROWS_AS(read_snapshot(f), VersionError);

    spit(f, good.substr(0, good.size() - 20));
    CHECK_THROWS_AS(read_snapshot(f), TruncatedFileError);
    spit(f, good.substr(0, 30));
    CHECK_THROWS_AS(read_snapshot(f), TruncatedFileError);

    bad = good;
    bad[0] = 'X';
    spit(f, bad);
    CHECK_THROWS_AS(read_snapshot(f), FormatError);

    spit(f, good);
    CHECK_NOTHROW(read_snapshot(f, g));
    CHECK_THROWS_AS(read_snapshot(f, ChannelGrid::standard(32, 15)), GridMismatchError);
    fs::remove_all(dir);
}

TEST_CASE("csv numbers round trip") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, std::numeric_limits<double>::denorm_min()}) {
        const std::string s = format_double(v);
        double w = 0;
        std::from_chars(s.data(), s.data() + s.size(), w);
        CHECK(w == v);
    }
    CsvWriter csv({"a", "b"});
    csv.row({1.5, 2.0});
    CHECK(csv.text() == "a,b\n1.5,2\n");
    CHECK_THROWS_AS(csv.row(std::vector<double>{1.0}), Error);
}

TEST_CASE("cli: usage and validation exit codes") {
    CHECK(run({}) == exit_usage);
    CHECK(run({"frobnicate"}) == exit_usage);
    CHECK(run({"budget"}) == exit_usage);
    const fs::path dir = scratch("cli_codes");
    std::string s = minimal;
    s.replace(s.find("kappa_hi = 5"), 12, "kappa_hi = 15");
    spit(dir / "bad.ini", s);
    std::string text;
    CHECK(run({"simulate", "--config", (dir / "bad.ini").string()}, &text) == exit_validation);
    CHECK(text.find("forcing.kappa_hi") != std::string::npos);
    spit(dir / "good.ini", minimal);
    CHECK(run({"budget", "--config", (dir / "good.ini").string(), "--snapshots", (dir / "none").string()}) ==
          exit_usage);
    fs::remove_all(dir);
}

TEST_CASE("cli: budget of zero-field snapshots is zero") {
    const fs::path dir = scratch("cli_zero");
    std::string s = minimal;
    s.replace(s.find("eps_total = 0.5"), 15, "eps_total = 0");
    spit(dir / "c.ini", s);
    const RunConfig c = parse_config(s);
    fs::create_directories(dir / "snaps");
    for (int i = 0; i < 3; ++i)
        write_snapshot(dir / "snaps" / snapshot_name(i), FlowState(c.channel()), PhysicsParams{0.01, 0.1, 1.0, 0});
    REQUIRE(run({"budget", "--config", (dir / "c.ini").string(), "--snapshots", (dir / "snaps").string(), "--out",
                 (dir / "out").string()}) == exit_ok);
    for (const char* name : {"budget_velocity.csv", "budget_vorticity.csv"}) {
        std::istringstream in(slurp(dir / "out" / name));
        std::string line;
        std::getline(in, line);
        CHECK(line == "l,flux,visc_term,drag_term,coriolis_term,noise_term,residual,residual_rel,stderr");
        int rows = 0;
        while (std::getline(in, line)) {
            ++rows;
            std::istringstream cells(line);
            std::string cell;
            std::getline(cells, cell, ',');
            while (std::getline(cells, cell, ',')) CHECK(cell == "0");
        }
        CHECK(rows == c.analysis.n_l);
    }
    fs::remove_all(dir);
}

TEST_CASE("cli: simulate is deterministic and downstream commands run") {
    const fs::path dir = scratch("cli_sim");
    spit(dir / "c.ini", std::string(minimal) +
                            "[physics]\nnu = 0.01\nalpha = 0.3\nbeta = 1\n[time]\ndt = 0.02\nsample_time = 15\n");
    const std::string cfg = (dir / "c.ini").string();
    REQUIRE(run({"simulate", "--config", cfg, "--out", (dir / "a").string()}) == exit_ok);
    REQUIRE(run({"simulate", "--config", cfg, "--out", (dir / "b").string()}) == exit_ok);
    int files = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir / "a")) {
        if (!e.is_regular_file()) continue;
        const auto rel = fs::relative(e.path(), dir / "a");
        CHECK(slurp(e.path()) == slurp(dir / "b" / rel));
        ++files;
    }
    CHECK(files > 10);

    const std::string snaps = (dir / "a" / "snapshots").string();
    for (const char* cmd : {"budget", "balance", "spectrum"})
        CHECK(run({cmd, "--config", cfg, "--snapshots", snaps, "--out", (dir / "a").string()}) == exit_ok);
    CHECK(run({"structure", "--config", cfg, "--snapshots", snaps, "--out", (dir / "a").string(), "--kinds",
               "D_bar,fraka_bar", "--range", "0.4,0.7"}) == exit_ok);
    CHECK(fs::exists(dir / "a" / "D_bar.csv"));
    CHECK(fs::exists(dir / "a" / "fraka_bar.csv"));
    CHECK(run({"structure", "--config", cfg, "--snapshots", snaps, "--kinds", "nope"}) == exit_usage);
    CHECK(run({"structure", "--config", cfg, "--snapshots", snaps, "--range", "0.01,0.7"}) == exit_validation);
    fs::remove_all(dir);
}

TEST_CASE("cli: oracle-check passes") {
    std::string text;
    CHECK(run({"oracle-check"}, &text) == exit_ok);
    CHECK(text.find("FAIL") == std::string::npos);
}
