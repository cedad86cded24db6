#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"

#include "bkhm/dynamics.hpp"
#include "bkhm/error.hpp"
#include "bkhm/operators.hpp"
#include "support.hpp"

using namespace bkhm;
using bkhm::test::rel;

namespace {

double norm(const SpectralField& f) { return std::sqrt(inner_product(f, f)); }

SpectralField eigenmode(const ChannelGrid& g, int k, int m, double amp) {
    SpectralField w(g);
    w.at(k, m) = 0.5 * amp;
    w.at(-k, m) = 0.5 * amp;
    return w;
}

ForcingBasis silent(const ChannelGrid& g) { return forcing_basis_from_modes(g, {{1, 1}}, 0.0); }

}  // namespace

TEST_CASE("advection of an eigenmode vanishes") {
    const auto g = ChannelGrid::standard(32, 31);
    auto w = eigenmode(g, 2, 3, 1.7);
    w += eigenmode(g, 3, 2, -0.4);  // same kappa^2
    CHECK(norm(nonlinear_term(w)) <= 1e-12 * norm(w) * norm(w));
    CHECK(norm(nonlinear_term(SpectralField(g))) == 0.0);
}

TEST_CASE("advection conserves enstrophy and energy") {
    const ChannelGrid g(2.0 * std::numbers::pi, 0.0, 2.0, 48, 35);
    for (unsigned s = 1; s <= 5; ++s) {
        const auto w = test::random_vorticity(g, s);
        const auto n = nonlinear_term(w);
        const auto psi = streamfunction(w);
        CHECK(std::abs(inner_product(w, n)) <= 1e-10 * norm(w) * norm(n));
        CHECK(std::abs(inner_product(psi, n)) <= 1e-10 * norm(psi) * norm(n));
    }
}

TEST_CASE("beta term") {
    const auto g = ChannelGrid::standard(32, 31);
    const auto w = test::random_vorticity(g, 3);
    CHECK(norm(beta_term(w, 0.0)) == 0.0);
    const auto b = beta_term(w, 2.3);
    CHECK(std::abs(inner_product(w, b)) <= 1e-10 * norm(w) * norm(b));

    // psi = sin x sin y  ->  -beta cos x sin y
    SpectralField mode(g);
    mode.at(1, 1) = cplx(0, 1.0);  // -2 sin x sin y = -2 (e^{ix}-e^{-ix})/2i sin y
    mode.at(-1, 1) = cplx(0, -1.0);
    const auto out = transform_inverse(beta_term(mode, 1.5));
    double err = 0;
    for (int j = 1; j <= g.N2(); ++j)
        for (int i = 0; i < g.N1(); ++i)
            err = std::max(err, std::abs(out.at(i, j) + 1.5 * std::cos(g.x1(i)) * std::sin(g.x2(j))));
    CHECK(err < 1e-14);
}

TEST_CASE("linear decay of a single mode is exact") {
    const auto g = ChannelGrid::standard(32, 31);
    const PhysicsParams p{0.01, 0.2, 0.0, 0.0};
    const auto w = eigenmode(g, 2, 1, 3.0);
    FlowState s(w, 0, 0);
    RngState r{1, 0};
    for (int n = 0; n < 10; ++n) std::tie(s, r) = step(s, 0.01, p, silent(g), r);
    const double decay = std::exp(-(p.nu * 5.0 + p.alpha) * 0.1);
    CHECK(rel(s.omega.at(2, 1).real(), 1.5 * decay) <= 1e-12);
    CHECK(rel(s.omega.at(-2, 1).real(), 1.5 * decay) <= 1e-12);
    CHECK(s.step_index == 10);
    CHECK(s.t == doctest::Approx(0.1));
}

TEST_CASE("inviscid drift shrinks at least at third order per step") {
    const auto g = ChannelGrid::standard(32, 31);
    const PhysicsParams p{};
    const auto w = random_low_mode_vorticity(g, 6, 1.0, 4);
    const auto basis = silent(g);
    auto drift = [&](double dt) {
        FlowState s(w, 0, 0);
        RngState r{1, 0};
        const auto e0 = spectral_norms(s);
        for (int n = 0; n < 20; ++n) std::tie(s, r) = step(s, dt, p, basis, r);
        const auto e1 = spectral_norms(s);
        return std::pair{std::abs(e1.energy - e0.energy), std::abs(e1.enstrophy - e0.enstrophy)};
    };
    const auto a = drift(0.02), b = drift(0.01);
    MESSAGE("energy drift ratio " << a.first / b.first << ", enstrophy ratio " << a.second / b.second);
    CHECK(a.first / b.first > 7.0);
    CHECK(a.second / b.second > 7.0);
}

TEST_CASE("determinism and f0 independence") {
    const auto g = ChannelGrid::standard(32, 31);
    const auto basis = build_forcing_basis(g, 3.0, 5.0, 0.5);
    const auto w0 = random_low_mode_vorticity(g, 4, 0.3, 9);
    auto run = [&](double f0) {
        FlowState s(w0, 0, 0);
        RngState r{42, 0};
        const PhysicsParams p{1e-3, 0.05, 1.0, f0};
        for (int n = 0; n < 25; ++n) std::tie(s, r) = step(s, 0.01, p, basis, r);
        return s.omega.coeffs;
    };
    const auto a = run(0.0);
    CHECK(a == run(0.0));
    CHECK(a == run(37.5));
}

TEST_CASE("step errors") {
    const auto g = ChannelGrid::standard(32, 31);
    const auto basis = silent(g);
    const PhysicsParams p{};
    FlowState fast(eigenmode(g, 1, 1, 400.0), 0, 0);
    try {
        step(fast, 0.01, p, basis, RngState{});
        FAIL("expected CflError");
    } catch (const CflError& e) {
        CHECK(e.max_velocity() == doctest::Approx(max_speed(fast.omega)));
    }
    FlowState bad(eigenmode(g, 1, 1, 1.0), 1.0, 17);
    bad.omega.at(3, 3) = std::numeric_limits<double>::quiet_NaN();
    try {
        step(bad, 0.01, p, basis, RngState{});
        FAIL("expected NonFiniteError");
    } catch (const NonFiniteError& e) {
        CHECK(e.step_index() == 17);
    }
    CHECK_THROWS_AS(step(FlowState(g), 0.0, p, basis, RngState{}), ValidationError);
}

TEST_CASE("unforced decay reaches the stationarity test") {
    const auto g = ChannelGrid::standard(16, 15);
    const PhysicsParams p{0.05, 0.5, 0.0, 0.0};
    FlowState s(random_low_mode_vorticity(g, 3, 1.0, 2), 0, 0);
    SpinupCriterion c{1.0, 0.01, 20000, 0.5, 10};
    int emitted = 0;
    const auto out = run_to_stationarity(s, p, silent(g), RngState{3, 0}, 0.01, c, [&](const FlowState&) { ++emitted; });
    CHECK(out.norms.back().energy < 1e-10);
    CHECK(emitted == 5);
    CHECK(out.snapshots == 5);
    CHECK(out.norms.size() == static_cast<std::size_t>(out.spinup_steps + 50 + 1));

    SpinupCriterion tight{1.0, 0.01, 50, 0.0, 1};
    CHECK_THROWS_AS(run_to_stationarity(s, p, silent(g), RngState{}, 0.01, tight, nullptr), ConvergenceError);
}

TEST_CASE("forced run: stationary energy balance and reproducible snapshots") {
    const auto g = ChannelGrid::standard(32, 31);
    const auto basis = build_forcing_basis(g, 3.0, 5.0, 0.5);
    const PhysicsParams p{5e-3, 0.2, 0.0, 0.0};
    const double tau = eddy_turnover_time(basis);
    SpinupCriterion c{20 * tau, 0.01, 400000, 400.0, 100};
    std::vector<std::vector<cplx>> snaps_a, snaps_b;
    const auto a = run_to_stationarity(FlowState(g), p, basis, RngState{5, 0}, 0.02, c,
                                       [&](const FlowState& s) { snaps_a.push_back(s.omega.coeffs); });
    const auto b = run_to_stationarity(FlowState(g), p, basis, RngState{5, 0}, 0.02, c,
                                       [&](const FlowState& s) { snaps_b.push_back(s.omega.coeffs); });
    CHECK(snaps_a == snaps_b);
    double lhs = 0;
    std::size_t n = 0;
    for (std::size_t i = static_cast<std::size_t>(a.spinup_steps) + 1; i < a.norms.size(); ++i, ++n)
        lhs += p.alpha * a.norms[i].energy + p.nu * a.norms[i].enstrophy;
    lhs /= static_cast<double>(n);
    MESSAGE("spin-up " << a.spinup_time << ", balance " << lhs << " vs " << basis.eps_total);
    CHECK(rel(lhs, basis.eps_total) < 0.10);
}
