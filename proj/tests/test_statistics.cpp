#include <cmath>
#include <cstdlib>
#include <numbers>

#include "doctest.h"

#include "bkhm/error.hpp"
#include "bkhm/khm.hpp"
#include "bkhm/operators.hpp"
#include "bkhm/oracle.hpp"
#include "bkhm/statistics.hpp"
#include "support.hpp"

using namespace bkhm;
using bkhm::test::rel;
using std::numbers::pi;

namespace {

double max_abs(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

std::vector<SpectralField> random_snapshots(const ChannelGrid& g, int n, unsigned seed) {
    std::vector<SpectralField> s;
    for (int i = 0; i < n; ++i) s.push_back(test::random_vorticity(g, seed + i));
    return s;
}

DiagnosticSeries synthetic(SeriesKind k, const SeparationGrid& sep, double origin, auto&& fn) {
    DiagnosticSeries s;
    s.kind = k;
    s.grid = sep;
    s.origin = origin;
    for (double l : sep.lengths) s.values.push_back(fn(l));
    s.std_error.assign(sep.lengths.size(), 0.0);
    return s;
}

// int_0^l r f(r) dr by 200-panel Gauss-Legendre
double moment(auto&& f, double l) {
    static const double x[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
    static const double w[3] = {5.0 / 9, 8.0 / 9, 5.0 / 9};
    const int panels = 200;
    double s = 0;
    for (int p = 0; p < panels; ++p) {
        const double a = l * p / panels, b = l * (p + 1) / panels;
        for (int q = 0; q < 3; ++q) {
            const double r = 0.5 * (a + b) + 0.5 * (b - a) * x[q];
            s += 0.5 * (b - a) * w[q] * r * f(r);
        }
    }
    return s;
}

}  // namespace

TEST_CASE("separation grid") {
    const auto g = ChannelGrid::standard(64, 63);
    const auto s = SeparationGrid::log_spaced(g, 0.2, 0.7, 10, 16);
    CHECK(s.lengths.size() == 10);
    CHECK(s.lengths.front() == doctest::Approx(0.2));
    CHECK(s.lengths.back() == 0.7);
    CHECK_THROWS_AS(SeparationGrid::log_spaced(g, 0.05, 0.7, 10, 16), ValidationError);
    CHECK_THROWS_AS(SeparationGrid::log_spaced(g, 0.2, 0.9, 10, 16), ValidationError);
    CHECK_THROWS_AS(SeparationGrid({0.1, 0.2}, 7), ValidationError);
    CHECK_THROWS_AS(SeparationGrid({0.2, 0.1}, 8), ValidationError);

    // direction set: closed under n -> -n, and avg n n^T = I/2
    double a11 = 0, a12 = 0, a22 = 0;
    for (int i = 0; i < s.n_dirs; ++i) {
        const double c = std::cos(s.angle(i)), d = std::sin(s.angle(i));
        a11 += c * c;
        a12 += c * d;
        a22 += d * d;
        const double oc = std::cos(s.angle((i + s.n_dirs / 2) % s.n_dirs));
        CHECK(std::abs(oc + c) < 1e-14);
    }
    CHECK(std::abs(a11 / s.n_dirs - 0.5) < 1e-14);
    CHECK(std::abs(a22 / s.n_dirs - 0.5) < 1e-14);
    CHECK(std::abs(a12 / s.n_dirs) < 1e-14);
}

TEST_CASE("kind names round trip") {
    for (auto k : {SeriesKind::GammaBar, SeriesKind::CThetaBar, SeriesKind::ABar, SeriesKind::FrakCBar,
                   SeriesKind::FrakQBar, SeriesKind::FrakABar, SeriesKind::DBar, SeriesKind::FrakDBar,
                   SeriesKind::S3Longitudinal, SeriesKind::S3MixedLongitudinal})
        CHECK(parse_kind(kind_name(k)) == k);
    CHECK_THROWS_AS(parse_kind("nope"), ValidationError);
}

TEST_CASE("two-point correlations: exact values") {
    const auto g = ChannelGrid::standard(32, 15);
    const auto snaps = random_snapshots(g, 3, 10);
    const SeparationGrid sep({0.25, 0.4, 0.6, 0.75}, 16);

    StatisticsOptions o;  // beta = 0
    const auto th = two_point_spherical(SeriesKind::CThetaBar, snaps, sep, o);
    CHECK(max_abs(th.values) <= 1e-14);
    const auto q0 = two_point_spherical(SeriesKind::FrakQBar, snaps, sep, o);
    CHECK(max_abs(q0.values) <= 1e-14);

    o.beta = 1.0;
    const auto q = two_point_spherical(SeriesKind::FrakQBar, snaps, sep, o);
    double scale = 0;
    for (const auto& w : snaps) {
        const auto f = snapshot_fields(w);
        double a = 0, b = 0;
        for (std::size_t i = 0; i < f.u2.values.size(); ++i) {
            a += f.u2.values[i] * f.u2.values[i];
            b += f.w.values[i] * f.w.values[i];
        }
        scale = std::max(scale, std::sqrt(a * b) * g.cell_area() / g.area());
    }
    CHECK(std::abs(q.origin) <= 1e-10 * scale);

    const auto gm = two_point_spherical(SeriesKind::GammaBar, snaps, sep, o);
    double e = 0;
    for (const auto& w : snaps) {
        const auto f = snapshot_fields(w);
        for (std::size_t i = 0; i < f.u1.values.size(); ++i)
            e += f.u1.values[i] * f.u1.values[i] + f.u2.values[i] * f.u2.values[i];
    }
    e *= g.cell_area() / g.area() / snaps.size();
    CHECK(rel(gm.origin, e) <= 1e-13);

    CHECK_THROWS_AS(two_point_spherical(SeriesKind::GammaBar, {}, sep, o), ValidationError);
    CHECK_THROWS_AS(two_point_spherical(SeriesKind::ABar, snaps, sep, o), ValidationError);
    CHECK_THROWS_AS(two_point_spherical(SeriesKind::GammaBar, snaps, SeparationGrid({0.5, 3.5}, 8), o),
                    ValidationError);
}

TEST_CASE("trigonometric and bilinear paths agree on lattice lags") {
    const auto g = ChannelGrid::standard(32, 15);
    const auto f = snapshot_fields(test::random_vorticity(g, 3));
    for (auto [p, q] : {std::pair{0, 0}, std::pair{3, 0}, std::pair{-2, 5}, std::pair{7, -4}}) {
        const double y1 = p * g.dx1(), y2 = q * g.dx2();
        const double a = lattice_correlation(f.u1, f.w, y1, y2, Interpolation::Trigonometric);
        const double b = lattice_correlation(f.u1, f.w, y1, y2, Interpolation::Bilinear);
        CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)));
    }
}

TEST_CASE("zero-extended forcing correlation against the lattice") {
    const auto g = ChannelGrid::standard(128, 127);
    const auto basis = build_forcing_basis(g, 4.0, 5.0, 1.0);
    // sum_j (b_j^2/2) R(e_j, e_j) on the lattice, trigonometric shifts
    auto lattice = [&](double y1, double y2) {
        double s = 0;
        for (const auto& m : basis.modes) {
            const auto psi = mode_streamfunction(g, m);
            const auto e = velocity_from_vorticity(-m.kappa_sq * psi);
            s += 0.5 * m.amplitude * m.amplitude *
                 (lattice_correlation(e.u1, e.u1, y1, y2, Interpolation::Trigonometric) +
                  lattice_correlation(e.u2, e.u2, y1, y2, Interpolation::Trigonometric));
        }
        return s;
    };
    for (auto [y1, y2] : {std::pair{0.0, 0.0}, std::pair{0.3, 0.2}, std::pair{-0.1, 0.6}}) {
        // the node rule misses the wall jump of the tangential component: O(dx2)
        CHECK(std::abs(lattice(y1, y2) - forcing_velocity_correlation(basis, y1, y2)) <= 0.02 * basis.eps_area);
    }
}

TEST_CASE("forcing series") {
    const auto g = ChannelGrid::standard(64, 63);
    const auto basis = build_forcing_basis(g, 6.0, 8.0, 0.5);
    const SeparationGrid sep({0.1, 0.2, 0.3}, 16);
    const auto a = forcing_series(SeriesKind::ABar, basis, sep);
    const auto fa = forcing_series(SeriesKind::FrakABar, basis, sep);
    CHECK(rel(a.origin, basis.eps_area) <= 1e-10);
    CHECK(rel(fa.origin, basis.eta_area) <= 1e-10);
    const auto z = forcing_basis_from_modes(g, {{1, 1}}, 0.0);
    CHECK(max_abs(forcing_series(SeriesKind::ABar, z, sep).values) == 0.0);
    CHECK_THROWS_AS(forcing_series(SeriesKind::GammaBar, basis, sep), ValidationError);
}

TEST_CASE("structure functions vanish for constant and zero fields") {
    const auto g = ChannelGrid::standard(32, 31);
    SnapshotFields c{PhysicalField(g), PhysicalField(g), PhysicalField(g)};
    for (auto& v : c.u1.values) v = 0.7;
    for (auto& v : c.u2.values) v = -0.4;
    for (auto& v : c.w.values) v = 1.3;
    const SeparationGrid sep({0.2, 0.3, 0.45}, 8);
    StatisticsOptions o;
    o.interp = Interpolation::Bilinear;
    o.region = Region::Interior;
    const std::vector<SeriesKind> kinds{SeriesKind::DBar, SeriesKind::FrakDBar, SeriesKind::S3Longitudinal,
                                        SeriesKind::S3MixedLongitudinal};
    SeriesAccumulator acc(g, sep, kinds, o, 1);
    acc.add(c);
    for (const auto& s : acc.finish()) CHECK(max_abs(s.values) <= 1e-13);

    StatisticsOptions e;
    const std::vector<SpectralField> zero{SpectralField(g)};
    for (auto k : kinds) CHECK(max_abs(structure_function_spherical(k, zero, sep, e).values) == 0.0);
    CHECK_THROWS_AS(structure_function_spherical(SeriesKind::GammaBar, zero, sep, e), ValidationError);
}

TEST_CASE("series are reproducible across thread counts") {
    const auto g = ChannelGrid::standard(32, 15);
    const auto snaps = random_snapshots(g, 4, 40);
    const SeparationGrid sep({0.25, 0.4, 0.6, 0.75}, 8);
    StatisticsOptions o;
    o.beta = 0.5;
    o.n_blocks = 2;
    auto run = [&] {
        SeriesAccumulator acc(g, sep, {SeriesKind::GammaBar, SeriesKind::DBar, SeriesKind::FrakDBar}, o, 4);
        for (const auto& s : snaps) acc.add(s);
        return acc.finish();
    };
    setenv("BKHM_THREADS", "1", 1);
    const auto a = run();
    setenv("BKHM_THREADS", "3", 1);
    const auto b = run();
    unsetenv("BKHM_THREADS");
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].values == b[k].values);
        CHECK(a[k].std_error == b[k].std_error);
        CHECK(a[k].n_samples == 4);
    }
}

TEST_CASE("KHM budgets: zero input") {
    const SeparationGrid sep({0.1, 0.2, 0.3, 0.4}, 8);
    auto z = [&](SeriesKind k) { return synthetic(k, sep, 0.0, [](double) { return 0.0; }); };
    const auto b = khm_velocity_budget(z(SeriesKind::DBar), z(SeriesKind::GammaBar), z(SeriesKind::CThetaBar),
                                       z(SeriesKind::ABar), 0.1, 0.2);
    CHECK(max_abs(b.residual) == 0.0);
    CHECK(max_abs(b.visc_term) == 0.0);
    CHECK(max_abs(b.noise_term) == 0.0);
    const auto v = khm_vorticity_budget(z(SeriesKind::FrakDBar), z(SeriesKind::FrakCBar), z(SeriesKind::FrakQBar),
                                        z(SeriesKind::FrakABar), 0.1, 0.2);
    CHECK(max_abs(v.residual) == 0.0);

    const SeparationGrid other({0.1, 0.2, 0.3, 0.5}, 8);
    CHECK_THROWS_AS(khm_velocity_budget(z(SeriesKind::DBar), synthetic(SeriesKind::GammaBar, other, 0, [](double) {
                                            return 0.0;
                                        }),
                                        z(SeriesKind::CThetaBar), z(SeriesKind::ABar), 0.1, 0.2),
                    GridMismatchError);
}

TEST_CASE("KHM budgets: synthetic closure") {
    std::vector<double> l(64);
    for (int i = 0; i < 64; ++i) l[i] = 0.02 * std::pow(40.0, i / 63.0);
    const SeparationGrid sep(l, 16);
    const double nu = 3e-3, alpha = 0.07, beta = 0.8, eps = 0.3, eta = 5.0;

    auto G = [](double r) { return 1.2 * std::exp(-r * r / 0.5); };
    auto dG = [](double r) { return -1.2 * 2 * r / 0.5 * std::exp(-r * r / 0.5); };
    auto T = [&](double r) { return beta * r * r * std::exp(-r * r); };
    auto A = [&](double r) { return eps * std::exp(-eta / (4 * eps) * r * r); };
    auto rhs = [&](double r) {
        return -4 * nu * dG(r) + 4 * alpha / r * moment(G, r) + 4 / r * moment(T, r) - 4 / r * moment(A, r);
    };

    for (bool vorticity : {false, true}) {
        const auto flux = synthetic(vorticity ? SeriesKind::FrakDBar : SeriesKind::DBar, sep, 0.0, rhs);
        const auto g = synthetic(SeriesKind::GammaBar, sep, G(0), G);
        const auto t = synthetic(SeriesKind::CThetaBar, sep, 0.0, T);
        const auto a = synthetic(SeriesKind::ABar, sep, A(0), A);
        const auto b = vorticity ? khm_vorticity_budget(flux, g, t, a, nu, alpha)
                                 : khm_velocity_budget(flux, g, t, a, nu, alpha);
        CHECK(max_abs(b.residual_rel) <= 1e-6);
        MESSAGE("synthetic closure max residual_rel " << max_abs(b.residual_rel));
        for (std::size_t i = 0; i < l.size(); ++i) {
            CHECK(b.residual[i] ==
                  b.flux[i] - (b.visc_term[i] + b.drag_term[i] + b.coriolis_term[i] + b.noise_term[i]));
        }
    }

    // beta = 0: the Coriolis term is identically zero
    const auto none = synthetic(SeriesKind::FrakQBar, sep, 0.0, [](double) { return 0.0; });
    const auto b0 = khm_vorticity_budget(synthetic(SeriesKind::FrakDBar, sep, 0.0, rhs),
                                         synthetic(SeriesKind::FrakCBar, sep, G(0), G), none,
                                         synthetic(SeriesKind::FrakABar, sep, A(0), A), nu, alpha);
    CHECK(max_abs(b0.coriolis_term) == 0.0);
}

TEST_CASE("even derivative vanishes at the origin and integrates exactly for polynomials") {
    const std::vector<double> l{0.1, 0.15, 0.3, 0.5, 0.6, 0.9};
    std::vector<double> f;
    for (double x : l) f.push_back(2 - 3 * x * x + x * x * x * x);
    const auto d = even_derivative(l, 2.0, f);
    for (std::size_t i = 0; i + 1 < l.size(); ++i) CHECK(d[i] == doctest::Approx(-6 * l[i] + 4 * l[i] * l[i] * l[i]).epsilon(1e-10));
    std::vector<double> c(l.size(), 1.0);
    const auto m = moment_integral(l, 1.0, c);
    for (std::size_t i = 0; i < l.size(); ++i) CHECK(m[i] == doctest::Approx(0.5 * l[i] * l[i]).epsilon(1e-13));
}

TEST_CASE("balance residuals") {
    const auto g = ChannelGrid::standard(16, 15);
    const auto basis = forcing_basis_from_modes(g, {{1, 1}}, 0.0);
    std::vector<NormSample> s(20, NormSample{});
    const auto r = balance_residuals(s, basis, PhysicsParams{0.1, 0.1, 0, 0});
    CHECK(r.eps_lhs == 0.0);
    CHECK(r.eta_lhs == 0.0);
    CHECK(r.eps_residual == 0.0);
    CHECK_THROWS_AS(balance_residuals(std::vector<NormSample>(9), basis, PhysicsParams{}), ValidationError);
}

TEST_CASE("drag-dominated energy balance approaches eps as nu decreases") {
    const auto g = ChannelGrid::standard(32, 31);
    const auto basis = build_forcing_basis(g, 3.0, 5.0, 0.5);
    const double tau = eddy_turnover_time(basis);
    std::vector<double> gap;
    for (double nu : {4e-2, 1e-2, 2.5e-3}) {
        const PhysicsParams p{nu, 0.3, 0.0, 0.0};
        SpinupCriterion c{20 * tau, 0.01, 400000, 150.0, 1000};
        const auto run = run_to_stationarity(FlowState(g), p, basis, RngState{8, 0}, 0.02, c, nullptr);
        std::vector<NormSample> post(run.norms.begin() + run.spinup_steps + 1, run.norms.end());
        double e = 0;
        for (const auto& n : post) e += n.energy;
        e /= static_cast<double>(post.size());
        gap.push_back(std::abs(basis.eps_total - p.alpha * e));
        MESSAGE("nu " << nu << ": |eps - alpha <||u||^2>| = " << gap.back());
    }
    CHECK(gap[0] > gap[1]);
    CHECK(gap[1] > gap[2]);
}

TEST_CASE("cascade fits of exact laws") {
    std::vector<double> l(30);
    for (int i = 0; i < 30; ++i) l[i] = 0.01 * std::pow(20.0, i / 29.0);
    const SeparationGrid sep(l, 8);
    const double eta = 3.7;
    const auto lin = synthetic(SeriesKind::FrakDBar, sep, 0.0, [&](double r) { return -2 * eta * r; });
    const auto f1 = cascade_fit(lin, 0.02, 0.15);
    CHECK(std::abs(f1.prefactor + 2 * eta) <= 1e-12);
    CHECK(std::abs(f1.exponent - 1.0) < 5e-4);
    CHECK(f1.sign == -1);
    const auto cub = synthetic(SeriesKind::DBar, sep, 0.0, [&](double r) { return 0.25 * eta * r * r * r; });
    const auto f3 = cascade_fit(cub, 0.02, 0.15);
    CHECK(std::abs(f3.exponent - 3.0) < 5e-4);
    CHECK(rel(f3.prefactor, 0.25 * eta) <= 1e-12);
    const auto bad = synthetic(SeriesKind::DBar, sep, 0.0, [](double r) { return r - 0.05; });
    CHECK_THROWS_AS(cascade_fit(bad, 0.02, 0.15), ScalingRangeError);
}

TEST_CASE("energy spectrum") {
    const auto g = ChannelGrid::standard(32, 31);
    SpectralField mode(g);
    mode.at(1, 1) = cplx(0, 1.0);  // psi = sin x sin y
    mode.at(-1, 1) = cplx(0, -1.0);
    const auto s = energy_spectrum({mode});
    double total = 0;
    for (std::size_t i = 0; i < s.energy.size(); ++i) {
        if (i != 1) CHECK(s.energy[i] == 0.0);
        total += s.energy[i];
    }
    CHECK(rel(s.energy[1], 0.5 * pi * pi / g.area()) < 1e-12);

    for (double v : energy_spectrum({SpectralField(g)}).energy) CHECK(v == 0.0);

    const auto w = test::random_vorticity(g, 77);
    const auto r = energy_spectrum({w});
    double sum = 0;
    for (double v : r.energy) sum += v;
    CHECK(rel(sum, 0.5 * l2_norms(w).energy / g.area()) <= 1e-10);
    (void)total;
}
