#include "bkhm/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <numbers>
#include <set>
#include <sstream>

#include "bkhm/error.hpp"

namespace bkhm {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> k{
        {"grid", {"L", "a", "b", "N1", "N2"}},
        {"physics", {"nu", "alpha", "beta", "f0"}},
        {"forcing", {"kappa_lo", "kappa_hi", "eps_total"}},
        {"time", {"dt", "max_steps", "snapshot_stride", "spinup_window", "spinup_tol", "sample_time"}},
        {"analysis", {"l_min", "l_max", "n_l", "n_dirs", "fit_lo", "fit_hi", "interpolation", "pad_factor", "n_blocks"}},
        {"rng", {"seed"}},
        {"output", {"directory"}},
    };
    return k;
}

class Reader {
public:
    explicit Reader(const pt::ptree& t) : tree_(t) {}

    std::optional<std::string> raw(const std::string& key) const {
        auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
        if (!v) return std::nullopt;
        return *v;
    }

    template <class T>
    T get(const std::string& key, T fallback) const {
        auto v = raw(key);
        return v ? parse<T>(key, *v) : fallback;
    }

    template <class T>
    T require(const std::string& key) const {
        auto v = raw(key);
        if (!v) throw ValidationError("config: missing required key '" + key + "'");
        return parse<T>(key, *v);
    }

private:
    template <class T>
    static T parse(const std::string& key, const std::string& s) {
        T out{};
        const char* first = s.data();
        const char* last = s.data() + s.size();
        while (first < last && std::isspace(static_cast<unsigned char>(*first))) ++first;
        while (last > first && std::isspace(static_cast<unsigned char>(last[-1]))) --last;
        if (first < last && *first == '+') ++first;
        auto [p, ec] = std::from_chars(first, last, out);
        if (ec != std::errc() || p != last || first == last)
            throw ValidationError("config: cannot parse '" + key + "' = '" + s + "'");
        return out;
    }

    const pt::ptree& tree_;
};

template <>
std::string Reader::parse<std::string>(const std::string&, const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

void check(bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ValidationError("config: '" + key + "' " + what);
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

ChannelGrid RunConfig::channel() const { return ChannelGrid(grid.L, grid.a, grid.b, grid.N1, grid.N2); }

ForcingBasis RunConfig::basis() const {
    return build_forcing_basis(channel(), forcing.kappa_lo, forcing.kappa_hi, forcing.eps_total);
}

SeparationGrid RunConfig::separations() const {
    return SeparationGrid::log_spaced(channel(), analysis.l_min, analysis.l_max, analysis.n_l, analysis.n_dirs);
}

SpinupCriterion RunConfig::spinup() const {
    return SpinupCriterion{time.spinup_window, time.spinup_tol, time.max_steps, time.sample_time,
                           time.snapshot_stride};
}

StatisticsOptions RunConfig::statistics_options() const {
    StatisticsOptions o;
    o.interp = analysis.interp;
    o.pad_factor = analysis.pad_factor;
    o.n_blocks = analysis.n_blocks;
    o.beta = physics.beta;
    return o;
}

RunConfig parse_config(const std::string& text) {
    pt::ptree tree;
    try {
        std::istringstream is(text);
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    for (const auto& [section, body] : tree) {
        auto it = known_keys().find(section);
        if (it == known_keys().end()) throw ValidationError("config: unknown section [" + section + "]");
        for (const auto& kv : body)
            if (!it->second.count(kv.first))
                throw ValidationError("config: unknown key '" + section + "." + kv.first + "'");
    }

    const Reader r(tree);
    RunConfig c;
    c.grid.L = r.get("grid.L", 2.0 * std::numbers::pi);
    c.grid.a = r.get("grid.a", 0.0);
    c.grid.b = r.get("grid.b", std::numbers::pi);
    c.grid.N1 = r.require<int>("grid.N1");
    c.grid.N2 = r.require<int>("grid.N2");
    check(std::isfinite(c.grid.L) && c.grid.L > 0, "grid.L", "must be positive");
    check(std::isfinite(c.grid.a) && std::isfinite(c.grid.b) && c.grid.b > c.grid.a, "grid.b",
          "must exceed grid.a");
    check(c.grid.N1 >= 4 && c.grid.N1 % 2 == 0, "grid.N1", "must be even and >= 4");
    check(c.grid.N2 >= 2, "grid.N2", "must be >= 2");
    const ChannelGrid g = c.channel();

    c.physics.nu = r.get("physics.nu", 0.0);
    c.physics.alpha = r.get("physics.alpha", 0.0);
    c.physics.beta = r.get("physics.beta", 0.0);
    c.physics.f0 = r.get("physics.f0", 0.0);
    check(std::isfinite(c.physics.nu) && c.physics.nu >= 0, "physics.nu", "must be >= 0");
    check(std::isfinite(c.physics.alpha) && c.physics.alpha >= 0, "physics.alpha", "must be >= 0");
    check(std::isfinite(c.physics.beta), "physics.beta", "must be finite");
    check(std::isfinite(c.physics.f0), "physics.f0", "must be finite");

    c.forcing.kappa_lo = r.require<double>("forcing.kappa_lo");
    c.forcing.kappa_hi = r.require<double>("forcing.kappa_hi");
    c.forcing.eps_total = r.require<double>("forcing.eps_total");
    check(c.forcing.kappa_lo > 0, "forcing.kappa_lo", "must be positive");
    check(c.forcing.kappa_hi > c.forcing.kappa_lo, "forcing.kappa_hi", "must exceed forcing.kappa_lo");
    check(c.forcing.kappa_hi < g.dealiased_wavenumber(), "forcing.kappa_hi",
          "must lie below the dealiased cutoff " + fmt(g.dealiased_wavenumber()));
    check(std::isfinite(c.forcing.eps_total) && c.forcing.eps_total >= 0, "forcing.eps_total", "must be >= 0");
    ForcingBasis basis = [&] {
        try {
            return c.basis();
        } catch (const ValidationError& e) {
            throw ValidationError(std::string("config: forcing.kappa_lo/forcing.kappa_hi: ") + e.what());
        }
    }();

    const double tau = basis.eta_area > 0 ? eddy_turnover_time(basis) : 1.0;
    c.time.dt = r.get("time.dt", 0.0);
    if (c.time.dt == 0.0) c.time.dt = 0.25 * std::min(g.dx1(), g.dx2());
    c.time.max_steps = r.get<std::int64_t>("time.max_steps", 10000000);
    c.time.snapshot_stride = r.get<std::int64_t>("time.snapshot_stride", 0);
    c.time.spinup_window = r.get("time.spinup_window", 0.0);
    c.time.spinup_tol = r.get("time.spinup_tol", 0.01);
    c.time.sample_time = r.get("time.sample_time", 0.0);
    check(std::isfinite(c.time.dt) && c.time.dt > 0, "time.dt", "must be positive");
    check(c.time.max_steps > 0, "time.max_steps", "must be positive");
    if (c.time.snapshot_stride == 0) c.time.snapshot_stride = std::max<std::int64_t>(1, std::llround(tau / c.time.dt));
    check(c.time.snapshot_stride > 0, "time.snapshot_stride", "must be positive");
    if (c.time.spinup_window == 0.0) c.time.spinup_window = 20.0 * tau;
    if (c.time.sample_time == 0.0) c.time.sample_time = 200.0 * tau;
    check(std::isfinite(c.time.spinup_window) && c.time.spinup_window > 0, "time.spinup_window", "must be positive");
    check(std::isfinite(c.time.spinup_tol) && c.time.spinup_tol > 0, "time.spinup_tol", "must be positive");
    check(std::isfinite(c.time.sample_time) && c.time.sample_time > 0, "time.sample_time", "must be positive");

    const double finest = std::max(g.dx1(), g.dx2());
    c.analysis.l_min = r.get("analysis.l_min", 2.0 * finest);
    c.analysis.l_max = r.get("analysis.l_max", 0.25 * g.height());
    c.analysis.n_l = r.get("analysis.n_l", 40);
    c.analysis.n_dirs = r.get("analysis.n_dirs", 16);
    check(c.analysis.l_min >= 2.0 * finest * (1 - 1e-12), "analysis.l_min", "must be at least two grid spacings");
    check(c.analysis.l_max <= 0.25 * g.height() * (1 + 1e-12), "analysis.l_max",
          "must not exceed a quarter of the channel height");
    check(c.analysis.l_max > c.analysis.l_min, "analysis.l_max", "must exceed analysis.l_min");
    check(c.analysis.n_l >= 3, "analysis.n_l", "must be >= 3");
    check(c.analysis.n_dirs >= 4 && c.analysis.n_dirs % 4 == 0, "analysis.n_dirs", "must be a positive multiple of 4");
    double lo = 4.0 * finest, hi = std::min(0.5 * basis.injection_length(), c.analysis.l_max);
    if (hi <= lo) {
        // coarse grid: no separation between dissipation and injection scales
        lo = c.analysis.l_min;
        hi = c.analysis.l_max;
    }
    c.analysis.fit_lo = r.get("analysis.fit_lo", lo);
    c.analysis.fit_hi = r.get("analysis.fit_hi", hi);
    check(c.analysis.fit_lo >= c.analysis.l_min, "analysis.fit_lo", "must be >= analysis.l_min");
    check(c.analysis.fit_hi > c.analysis.fit_lo, "analysis.fit_hi", "must exceed analysis.fit_lo");
    check(c.analysis.fit_hi <= c.analysis.l_max * (1 + 1e-12), "analysis.fit_hi", "must be <= analysis.l_max");
    const std::string interp = r.get<std::string>("analysis.interpolation", "trigonometric");
    if (interp == "trigonometric")
        c.analysis.interp = Interpolation::Trigonometric;
    else if (interp == "bilinear")
        c.analysis.interp = Interpolation::Bilinear;
    else
        throw ValidationError("config: 'analysis.interpolation' must be trigonometric or bilinear");
    c.analysis.pad_factor = r.get("analysis.pad_factor", 2);
    c.analysis.n_blocks = r.get("analysis.n_blocks", 10);
    check(c.analysis.pad_factor >= 2, "analysis.pad_factor", "must be >= 2");
    check(c.analysis.n_blocks >= 2, "analysis.n_blocks", "must be >= 2");

    c.seed = r.require<std::uint64_t>("rng.seed");
    c.output = r.get<std::string>("output.directory", "out");
    check(!c.output.empty(), "output.directory", "must not be empty");
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string echo_config(const RunConfig& c) {
    std::ostringstream os;
    os << "[grid]\nL = " << fmt(c.grid.L) << "\na = " << fmt(c.grid.a) << "\nb = " << fmt(c.grid.b)
       << "\nN1 = " << c.grid.N1 << "\nN2 = " << c.grid.N2 << "\n\n";
    os << "[physics]\nnu = " << fmt(c.physics.nu) << "\nalpha = " << fmt(c.physics.alpha)
       << "\nbeta = " << fmt(c.physics.beta) << "\nf0 = " << fmt(c.physics.f0) << "\n\n";
    os << "[forcing]\nkappa_lo = " << fmt(c.forcing.kappa_lo) << "\nkappa_hi = " << fmt(c.forcing.kappa_hi)
       << "\neps_total = " << fmt(c.forcing.eps_total) << "\n\n";
    os << "[time]\ndt = " << fmt(c.time.dt) << "\nmax_steps = " << c.time.max_steps
       << "\nsnapshot_stride = " << c.time.snapshot_stride << "\nspinup_window = " << fmt(c.time.spinup_window)
       << "\nspinup_tol = " << fmt(c.time.spinup_tol) << "\nsample_time = " << fmt(c.time.sample_time) << "\n\n";
    os << "[analysis]\nl_min = " << fmt(c.analysis.l_min) << "\nl_max = " << fmt(c.analysis.l_max)
       << "\nn_l = " << c.analysis.n_l << "\nn_dirs = " << c.analysis.n_dirs << "\nfit_lo = " << fmt(c.analysis.fit_lo)
       << "\nfit_hi = " << fmt(c.analysis.fit_hi) << "\ninterpolation = "
       << (c.analysis.interp == Interpolation::Trigonometric ? "trigonometric" : "bilinear")
       << "\npad_factor = " << c.analysis.pad_factor << "\nn_blocks = " << c.analysis.n_blocks << "\n\n";
    os << "[rng]\nseed = " << c.seed << "\n\n";
    os << "[output]\ndirectory = " << c.output << "\n";
    return os.str();
}

}  // namespace bkhm
