#include "bkhm/statistics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bkhm/error.hpp"

namespace bkhm {

namespace {

constexpr std::array<std::pair<SeriesKind, std::string_view>, 10> kNames{{
    {SeriesKind::GammaBar, "gamma_bar"},
    {SeriesKind::CThetaBar, "ctheta_bar"},
    {SeriesKind::ABar, "a_bar"},
    {SeriesKind::FrakCBar, "frakC_bar"},
    {SeriesKind::FrakQBar, "frakQ_bar"},
    {SeriesKind::FrakABar, "fraka_bar"},
    {SeriesKind::DBar, "D_bar"},
    {SeriesKind::FrakDBar, "frakD_bar"},
    {SeriesKind::S3Longitudinal, "S3_longitudinal"},
    {SeriesKind::S3MixedLongitudinal, "S3_mixed_longitudinal"},
}};

bool is_structure_kind(SeriesKind k) {
    return k == SeriesKind::DBar || k == SeriesKind::FrakDBar || k == SeriesKind::S3Longitudinal ||
           k == SeriesKind::S3MixedLongitudinal;
}

}  // namespace

std::string_view kind_name(SeriesKind k) {
    for (auto [kind, name] : kNames)
        if (kind == k) return name;
    return "?";
}

SeriesKind parse_kind(std::string_view name) {
    for (auto [kind, n] : kNames)
        if (n == name) return kind;
    throw ValidationError("unknown series kind '" + std::string(name) + "'");
}

bool is_snapshot_kind(SeriesKind k) { return k != SeriesKind::ABar && k != SeriesKind::FrakABar; }

SeparationGrid::SeparationGrid(std::vector<double> l, int dirs) : lengths(std::move(l)), n_dirs(dirs) {
    if (lengths.empty()) throw ValidationError("analysis: separation grid is empty");
    if (!(lengths.front() > 0.0)) throw ValidationError("analysis.l_min must be positive");
    for (std::size_t i = 1; i < lengths.size(); ++i)
        if (!(lengths[i] > lengths[i - 1])) throw ValidationError("analysis: separations must be strictly increasing");
    if (n_dirs < 8 || n_dirs % 2 != 0) throw ValidationError("analysis.n_dirs must be an even integer >= 8");
}

SeparationGrid SeparationGrid::log_spaced(const ChannelGrid& g, double lmin, double lmax, int n, int n_dirs) {
    const double finest = std::min(g.dx1(), g.dx2());
    if (!(lmin >= 2.0 * finest * (1 - 1e-12))) {
        std::ostringstream os;
        os << "analysis.l_min = " << lmin << " is below twice the finest grid spacing (" << 2 * finest << ")";
        throw ValidationError(os.str());
    }
    if (!(lmax <= 0.25 * g.height() * (1 + 1e-12))) {
        std::ostringstream os;
        os << "analysis.l_max = " << lmax << " exceeds (b - a)/4 = " << 0.25 * g.height();
        throw ValidationError(os.str());
    }
    if (!(lmax > lmin)) throw ValidationError("analysis.l_max must exceed analysis.l_min");
    if (n < 2) throw ValidationError("analysis.n_l must be >= 2");
    std::vector<double> l(n);
    const double r = std::log(lmax / lmin);
    for (int i = 0; i < n; ++i) l[i] = lmin * std::exp(r * i / (n - 1));
    l.back() = lmax;
    return SeparationGrid(std::move(l), n_dirs);
}

double SeparationGrid::angle(int i) const { return 2.0 * std::numbers::pi * i / n_dirs; }

namespace {

DiagnosticSeries from_snapshots(SeriesKind kind, const std::vector<SpectralField>& snapshots,
                                const SeparationGrid& sep, const StatisticsOptions& opts) {
    if (snapshots.empty()) throw ValidationError("analysis: empty snapshot list");
    SeriesAccumulator acc(snapshots.front().grid, sep, {kind}, opts, static_cast<std::int64_t>(snapshots.size()));
    for (const auto& s : snapshots) acc.add(s);
    return acc.finish().front();
}

}  // namespace

DiagnosticSeries two_point_spherical(SeriesKind kind, const std::vector<SpectralField>& snapshots,
                                     const SeparationGrid& sep, const StatisticsOptions& opts,
                                     const ForcingBasis* basis) {
    if (is_structure_kind(kind))
        throw ValidationError(std::string(kind_name(kind)) + " is a structure function, not a correlation");
    if (!is_snapshot_kind(kind)) {
        if (!basis) throw ValidationError(std::string(kind_name(kind)) + " needs the forcing basis");
        return forcing_series(kind, *basis, sep);
    }
    return from_snapshots(kind, snapshots, sep, opts);
}

DiagnosticSeries structure_function_spherical(SeriesKind kind, const std::vector<SpectralField>& snapshots,
                                              const SeparationGrid& sep, const StatisticsOptions& opts) {
    if (!is_structure_kind(kind))
        throw ValidationError(std::string(kind_name(kind)) + " is not a structure-function kind");
    return from_snapshots(kind, snapshots, sep, opts);
}

DiagnosticSeries forcing_series(SeriesKind kind, const ForcingBasis& basis, const SeparationGrid& sep,
                                Continuation c) {
    if (kind != SeriesKind::ABar && kind != SeriesKind::FrakABar)
        throw ValidationError(std::string(kind_name(kind)) + " is not a forcing correlation");
    auto eval = [&](double y1, double y2) {
        return kind == SeriesKind::ABar ? forcing_velocity_correlation(basis, y1, y2, c)
                                        : forcing_vorticity_correlation(basis, y1, y2, c);
    };
    DiagnosticSeries s;
    s.kind = kind;
    s.grid = sep;
    s.values.assign(sep.lengths.size(), 0.0);
    s.std_error.assign(sep.lengths.size(), 0.0);
    for (std::size_t i = 0; i < sep.lengths.size(); ++i) {
        double sum = 0.0;
        for (int d = 0; d < sep.n_dirs; ++d) {
            const double th = sep.angle(d);
            sum += eval(sep.lengths[i] * std::cos(th), sep.lengths[i] * std::sin(th));
        }
        s.values[i] = sum / sep.n_dirs;
    }
    s.origin = eval(0.0, 0.0);
    return s;
}

std::pair<double, double> batch_mean(const std::vector<double>& x, int n_blocks) {
    if (x.empty()) return {0.0, 0.0};
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    const std::size_t nb = std::min<std::size_t>(static_cast<std::size_t>(std::max(n_blocks, 1)), x.size());
    if (nb < 2) return {mean, 0.0};
    std::vector<double> bm(nb, 0.0);
    for (std::size_t b = 0; b < nb; ++b) {
        const std::size_t lo = x.size() * b / nb, hi = x.size() * (b + 1) / nb;
        for (std::size_t i = lo; i < hi; ++i) bm[b] += x[i];
        bm[b] /= static_cast<double>(hi - lo);
    }
    double m = 0.0;
    for (double v : bm) m += v;
    m /= static_cast<double>(nb);
    double var = 0.0;
    for (double v : bm) var += (v - m) * (v - m);
    return {mean, std::sqrt(var / static_cast<double>(nb - 1) / static_cast<double>(nb))};
}

BalanceReport balance_residuals(const std::vector<NormSample>& post, const ForcingBasis& basis,
                                const PhysicsParams& params, int n_blocks) {
    if (post.size() < 10) throw ValidationError("balance: need at least 10 post-spin-up samples");
    std::vector<double> e(post.size()), z(post.size());
    for (std::size_t i = 0; i < post.size(); ++i) {
        // ||grad u||^2 = ||omega||^2 for these fields
        e[i] = params.alpha * post[i].energy + params.nu * post[i].enstrophy;
        z[i] = params.alpha * post[i].enstrophy + params.nu * post[i].palinstrophy;
    }
    BalanceReport r;
    r.n_samples = static_cast<std::int64_t>(post.size());
    std::tie(r.eps_lhs, r.eps_lhs_std_error) = batch_mean(e, n_blocks);
    std::tie(r.eta_lhs, r.eta_lhs_std_error) = batch_mean(z, n_blocks);
    r.eps_target = basis.eps_total;
    r.eta_target = basis.eta_total;
    r.eps_residual = r.eps_target != 0.0 ? (r.eps_lhs - r.eps_target) / r.eps_target : r.eps_lhs;
    r.eta_residual = r.eta_target != 0.0 ? (r.eta_lhs - r.eta_target) / r.eta_target : r.eta_lhs;
    return r;
}

CascadeFit cascade_fit(const DiagnosticSeries& s, double l_lo, double l_hi, double nominal) {
    if (!(l_hi > l_lo)) throw ValidationError("fit range: l_hi must exceed l_lo");
    std::vector<double> x, y, l, v;
    int sign = 0;
    for (std::size_t i = 0; i < s.grid.lengths.size(); ++i) {
        const double li = s.grid.lengths[i];
        if (li < l_lo * (1 - 1e-12) || li > l_hi * (1 + 1e-12)) continue;
        const double vi = s.values[i];
        const int sg = vi > 0 ? 1 : (vi < 0 ? -1 : 0);
        if (sg == 0 || (sign != 0 && sg != sign)) {
            std::ostringstream os;
            os << kind_name(s.kind) << " changes sign or vanishes at l = " << li
               << " inside the fit range: no clean scaling range";
            throw ScalingRangeError(os.str());
        }
        sign = sg;
        x.push_back(std::log(li));
        y.push_back(std::log(std::abs(vi)));
        l.push_back(li);
        v.push_back(vi);
    }
    const auto n = static_cast<int>(x.size());
    if (n < 2) throw ValidationError("fit range contains fewer than two separations");
    double mx = 0, my = 0;
    for (int i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    CascadeFit f;
    f.points = n;
    f.sign = sign;
    f.exponent = sxy / sxx;
    if (n > 2) {
        double ss = 0;
        for (int i = 0; i < n; ++i) {
            const double r = y[i] - (my + f.exponent * (x[i] - mx));
            ss += r * r;
        }
        f.exponent_std_error = std::sqrt(ss / (n - 2) / sxx);
    }
    const double p = nominal >= 0.0 ? nominal : std::round(f.exponent);
    std::vector<double> comp(n);
    double cm = 0;
    for (int i = 0; i < n; ++i) {
        comp[i] = v[i] / std::pow(l[i], p);
        cm += comp[i];
    }
    cm /= n;
    double cv = 0;
    for (int i = 0; i < n; ++i) cv += (comp[i] - cm) * (comp[i] - cm);
    f.prefactor = cm;
    f.prefactor_std_error = n > 1 ? std::sqrt(cv / (n - 1) / n) : 0.0;
    return f;
}

std::vector<double> shell_energy(const SpectralField& w) {
    const auto& g = w.grid;
    const double kmax = std::sqrt(g.kappa_sq(g.N1() / 2, g.N2()));
    std::vector<double> e(static_cast<std::size_t>(std::floor(kmax + 0.5)) + 1, 0.0);
    // per-area kinetic energy (1/2)(1/|Omega|)(|Omega|/2) sum |u_hat|^2
    const double wgt = 0.25;
    for (int m = 1; m <= g.N2(); ++m)
        for (int col = 0; col < g.N1(); ++col) {
            const int k = g.fourier_index(col);
            const double ks = g.kappa_sq(k, m);
            const double grad = 2 * k == g.N1() ? g.ky(m) * g.ky(m) : ks;
            const double a = std::norm(w.coeffs[static_cast<std::size_t>(m - 1) * g.N1() + col]);
            const auto shell = static_cast<std::size_t>(std::floor(std::sqrt(ks) + 0.5));
            e[shell] += wgt * a * grad / (ks * ks);
        }
    return e;
}

EnergySpectrum energy_spectrum(const std::vector<SpectralField>& snapshots) {
    if (snapshots.empty()) throw ValidationError("energy_spectrum: no snapshots");
    EnergySpectrum s;
    std::vector<std::vector<double>> per;
    for (const auto& w : snapshots) per.push_back(shell_energy(w));
    const std::size_t n = per.front().size();
    s.n_samples = static_cast<std::int64_t>(snapshots.size());
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> x;
        for (const auto& p : per) x.push_back(p[i]);
        auto [m, se] = batch_mean(x);
        s.kappa.push_back(static_cast<double>(i));
        s.energy.push_back(m);
        s.std_error.push_back(se);
    }
    return s;
}

}  // namespace bkhm
