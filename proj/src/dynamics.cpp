#include "bkhm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "bkhm/error.hpp"
#include "bkhm/operators.hpp"
#include "bkhm/transform.hpp"
#include "fftw_support.hpp"

namespace bkhm {

void PhysicsParams::validate() const {
    if (!(std::isfinite(nu) && nu >= 0.0)) throw ValidationError("physics.nu must be finite and >= 0");
    if (!(std::isfinite(alpha) && alpha >= 0.0)) throw ValidationError("physics.alpha must be finite and >= 0");
    if (!std::isfinite(beta)) throw ValidationError("physics.beta must be finite");
    if (!std::isfinite(f0)) throw ValidationError("physics.f0 must be finite");
}

namespace {

// Products of two dealiased sine/cosine series land in modes whose aliases on
// the interior node set fall outside the retained band, so evaluating on the
// N2 interior nodes and truncating is exact for the retained part.
SpectralField advection(const VelocityPair& u, const SpectralField& w) {
    const auto w1 = detail::inverse_unchecked(d_dx1(w));
    const auto w2 = detail::inverse_unchecked(d_dx2(w));
    PhysicalField p(w.grid);
    for (std::size_t n = 0; n < p.values.size(); ++n)
        p.values[n] = -(u.u1.values[n] * w1.values[n] + u.u2.values[n] * w2.values[n]);
    return transform_forward_dealiased(p);
}

double speed(const VelocityPair& u) {
    double m = 0.0;
    for (std::size_t n = 0; n < u.u1.values.size(); ++n)
        m = std::max(m, std::hypot(u.u1.values[n], u.u2.values[n]));
    return m;
}

// N(w) + B(w), reusing one velocity evaluation.
SpectralField tendency(const VelocityPair& u, const SpectralField& w, double beta) {
    auto f = advection(u, w);
    if (beta != 0.0) {
        auto b = u.u2_hat;
        b *= -beta;
        f += b;
    }
    return f;
}

void apply_factor(SpectralField& f, const std::vector<double>& e) {
    for (std::size_t n = 0; n < f.coeffs.size(); ++n) f.coeffs[n] *= e[n];
}

std::vector<double> damping(const ChannelGrid& g, const PhysicsParams& p, double dt) {
    std::vector<double> e(g.size());
    for (int m = 1; m <= g.N2(); ++m)
        for (int col = 0; col < g.N1(); ++col)
            e[static_cast<std::size_t>(m - 1) * g.N1() + col] =
                std::exp(-(p.nu * g.kappa_sq(g.fourier_index(col), m) + p.alpha) * dt);
    return e;
}

bool finite(const SpectralField& f) {
    for (auto c : f.coeffs)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

// Integrating factors are cached per (grid, nu, alpha, dt) since step() is
// called with the same arguments for a whole run.
struct FactorCache {
    ChannelGrid grid = ChannelGrid::standard(4, 2);
    double nu = -1, alpha = -1, dt = -1;
    std::vector<double> full, half;

    void refresh(const ChannelGrid& g, const PhysicsParams& p, double h) {
        if (g == grid && p.nu == nu && p.alpha == alpha && h == dt) return;
        grid = g;
        nu = p.nu;
        alpha = p.alpha;
        dt = h;
        full = damping(g, p, h);
        half = damping(g, p, 0.5 * h);
    }
};

}  // namespace

SpectralField nonlinear_term(const SpectralField& w) { return advection(velocity_from_vorticity(w), w); }

SpectralField beta_term(const SpectralField& w, double beta) {
    auto u2 = d_dx1(streamfunction(w));
    u2 *= -beta;
    return u2;
}

double max_speed(const SpectralField& w) { return speed(velocity_from_vorticity(w)); }

std::pair<FlowState, RngState> step(const FlowState& state, double dt, const PhysicsParams& params,
                                    const ForcingBasis& basis, RngState rng) {
    if (!(dt > 0.0)) throw ValidationError("step: dt must be positive");
    const auto& g = state.omega.grid;
    if (!(basis.grid == g)) throw GridMismatchError("step: forcing basis and state grids differ");

    if (!finite(state.omega)) {
        std::ostringstream os;
        os << "non-finite vorticity at step " << state.step_index;
        throw NonFiniteError(os.str(), state.step_index);
    }
    thread_local FactorCache cache;
    cache.refresh(g, params, dt);

    const auto u0 = velocity_from_vorticity(state.omega);
    const double umax = speed(u0);
    const double cfl = dt * umax / std::min(g.dx1(), g.dx2());
    if (!(cfl <= 0.5)) {
        std::ostringstream os;
        os << "CFL violated at step " << state.step_index << ": dt*max|u|/dx = " << cfl << " (max|u| = " << umax
           << ")";
        throw CflError(os.str(), umax);
    }

    auto [noise, next_rng] = sample_vorticity_increment(basis, dt, rng);
    apply_factor(noise, cache.half);

    const auto f0 = tendency(u0, state.omega, params.beta);

    // predictor: E (w + dt F(w)) + E_h dW
    SpectralField pred = f0;
    pred *= dt;
    pred += state.omega;
    apply_factor(pred, cache.full);
    pred += noise;

    const auto f1 = tendency(velocity_from_vorticity(pred), pred, params.beta);

    // corrector: E w + dt/2 (E F(w) + F(w*)) + E_h dW
    SpectralField ef0 = f0;
    apply_factor(ef0, cache.full);
    SpectralField next = state.omega;
    apply_factor(next, cache.full);
    ef0 += f1;
    ef0 *= 0.5 * dt;
    next += ef0;
    next += noise;

    if (!finite(next)) {
        std::ostringstream os;
        os << "non-finite vorticity at step " << state.step_index + 1;
        throw NonFiniteError(os.str(), state.step_index + 1);
    }
    return {FlowState(std::move(next), state.t + dt, state.step_index + 1), next_rng};
}

NormSample spectral_norms(const FlowState& s) {
    const auto& g = s.omega.grid;
    double en = 0, z = 0, p = 0;
    for (int m = 1; m <= g.N2(); ++m)
        for (int col = 0; col < g.N1(); ++col) {
            const int k = g.fourier_index(col);
            const double a = std::norm(s.omega.coeffs[static_cast<std::size_t>(m - 1) * g.N1() + col]);
            const double ks = g.kappa_sq(k, m);
            // the Nyquist column carries no x1 derivative
            const double grad = 2 * k == g.N1() ? g.ky(m) * g.ky(m) : ks;
            z += a;
            en += a * grad / (ks * ks);
            p += a * grad;
        }
    const double w = parseval_weight(g);
    return {s.t, w * en, w * z, w * p};
}

double eddy_turnover_time(const ForcingBasis& basis) {
    if (!(basis.eta_area > 0.0)) return 0.0;
    return std::cbrt(1.0 / basis.eta_area);
}

RunSummary run_to_stationarity(FlowState initial, const PhysicsParams& params, const ForcingBasis& basis,
                               RngState rng, double dt, const SpinupCriterion& crit, const SnapshotSink& sink) {
    params.validate();
    if (!(crit.window > 0.0)) throw ValidationError("time.spinup_window must be positive");
    if (!(crit.tolerance > 0.0)) throw ValidationError("time.spinup_tol must be positive");
    if (crit.snapshot_stride < 1) throw ValidationError("time.snapshot_stride must be >= 1");
    if (!(crit.sample_time >= 0.0)) throw ValidationError("time.sample_time must be >= 0");

    RunSummary out{initial, rng, 0.0, 0, 0, {}};
    FlowState s = std::move(initial);
    out.norms.push_back(spectral_norms(s));

    // cumulative trapezoid integral of ||u||^2 and its history at window spacing
    const auto wsteps = std::max<std::int64_t>(1, std::llround(crit.window / dt));
    std::deque<double> integral{0.0};
    double acc = 0.0, peak = 0.0;
    bool settled = false;
    std::int64_t n = 0;
    double last_rel = 0.0;
    while (!settled) {
        if (n >= crit.max_steps) {
            std::ostringstream os;
            os << "no stationarity after " << n << " steps (t = " << s.t << "); running-mean change over the window "
               << last_rel << " > " << crit.tolerance << ", last ||u||^2 = " << out.norms.back().energy;
            throw ConvergenceError(os.str());
        }
        std::tie(s, rng) = step(s, dt, params, basis, rng);
        ++n;
        const auto ns = spectral_norms(s);
        acc += 0.5 * dt * (out.norms.back().energy + ns.energy);
        out.norms.push_back(ns);
        integral.push_back(acc);
        if (static_cast<std::int64_t>(integral.size()) > wsteps + 1) integral.pop_front();
        if (n >= 2 * wsteps) {
            const double t = s.t - out.norms.front().t;
            const double mean_now = acc / t;
            const double mean_then = integral.front() / (t - dt * static_cast<double>(wsteps));
            peak = std::max(peak, mean_now);
            const double scale = std::max(mean_now, 1e-12 * peak);
            last_rel = std::abs(mean_now - mean_then) / std::max(scale, 1e-300);
            settled = last_rel < crit.tolerance;
        }
    }
    out.spinup_steps = n;
    out.spinup_time = s.t - out.norms.front().t;

    const auto sample_steps = static_cast<std::int64_t>(std::llround(crit.sample_time / dt));
    for (std::int64_t k = 1; k <= sample_steps; ++k) {
        std::tie(s, rng) = step(s, dt, params, basis, rng);
        out.norms.push_back(spectral_norms(s));
        if (k % crit.snapshot_stride == 0) {
            if (sink) sink(s);
            ++out.snapshots;
        }
    }
    out.final_state = std::move(s);
    out.rng = rng;
    return out;
}

SpectralField random_low_mode_vorticity(const ChannelGrid& g, int kmax, double energy, std::uint64_t seed) {
    SpectralField w(g, Parity::Sine);
    std::uint64_t idx = 0;
    for (int m = 1; m <= std::min(kmax, g.N2()); ++m)
        for (int k = 0; k <= std::min(kmax, g.N1() / 2 - 1); ++k) {
            if (!g.retained(k, m)) continue;
            const double re = gaussian(seed, 0, idx++);
            const double im = k == 0 ? 0.0 : gaussian(seed, 0, idx++);
            w.at(k, m) = cplx(re, im);
            if (k != 0) w.at(-k, m) = cplx(re, -im);
        }
    const double e = spectral_norms(FlowState(w, 0, 0)).energy;
    if (e > 0) w *= std::sqrt(energy / e);
    return w;
}

}  // namespace bkhm
