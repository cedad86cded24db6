#include "bkhm/khm.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "bkhm/error.hpp"

namespace bkhm {

namespace {

// Reflected grid [-l_{n-1}, ..., -l_0, 0, l_0, ..., l_{n-1}] with even values.
struct Reflected {
    std::vector<double> x, f;
    std::size_t zero;  // index of l = 0
};

Reflected reflect(const std::vector<double>& l, double f0, const std::vector<double>& f, bool odd_times_r) {
    Reflected r;
    const std::size_t n = l.size();
    r.zero = n;
    r.x.resize(2 * n + 1);
    r.f.resize(2 * n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double g = odd_times_r ? l[i] * f[i] : f[i];
        r.x[n + 1 + i] = l[i];
        r.f[n + 1 + i] = g;
        r.x[n - 1 - i] = -l[i];
        r.f[n - 1 - i] = odd_times_r ? -g : g;
    }
    r.x[n] = 0.0;
    r.f[n] = odd_times_r ? 0.0 : f0;
    return r;
}

// Lagrange interpolant through nodes z[lo..lo+p) evaluated at x (value or derivative).
double lagrange(const Reflected& r, std::size_t lo, std::size_t p, double x, bool derivative) {
    double s = 0.0;
    for (std::size_t j = lo; j < lo + p; ++j) {
        double term = 0.0;
        if (!derivative) {
            term = 1.0;
            for (std::size_t m = lo; m < lo + p; ++m)
                if (m != j) term *= (x - r.x[m]) / (r.x[j] - r.x[m]);
        } else {
            for (std::size_t m = lo; m < lo + p; ++m) {
                if (m == j) continue;
                double prod = 1.0 / (r.x[j] - r.x[m]);
                for (std::size_t q = lo; q < lo + p; ++q)
                    if (q != j && q != m) prod *= (x - r.x[q]) / (r.x[j] - r.x[q]);
                term += prod;
            }
        }
        s += term * r.f[j];
    }
    return s;
}

std::size_t stencil_start(std::size_t centre, std::size_t width, std::size_t size) {
    const std::size_t half = width / 2;
    std::size_t lo = centre >= half ? centre - half : 0;
    return std::min(lo, size - width);
}

void require_same(const SeparationGrid& g, const DiagnosticSeries& s) {
    if (!(s.grid == g) || s.values.size() != g.lengths.size())
        throw GridMismatchError("KHM budget: series '" + std::string(kind_name(s.kind)) +
                                "' lives on a different separation grid");
}

KHMBudget budget(const DiagnosticSeries& flux, const DiagnosticSeries& corr, const DiagnosticSeries& cor,
                 const DiagnosticSeries& noise, double nu, double alpha) {
    const auto& g = flux.grid;
    require_same(g, corr);
    require_same(g, cor);
    require_same(g, noise);
    if (g.lengths.size() < 3) throw ValidationError("KHM budget: need at least three separations");
    const auto& l = g.lengths;
    const auto dg = even_derivative(l, corr.origin, corr.values);
    const auto ig = moment_integral(l, corr.origin, corr.values);
    const auto it = moment_integral(l, cor.origin, cor.values);
    const auto ia = moment_integral(l, noise.origin, noise.values);
    KHMBudget b;
    b.grid = g;
    const std::size_t n = l.size();
    b.flux = flux.values;
    b.flux_std_error = flux.std_error.size() == n ? flux.std_error : std::vector<double>(n, 0.0);
    b.visc_term.resize(n);
    b.drag_term.resize(n);
    b.coriolis_term.resize(n);
    b.noise_term.resize(n);
    b.residual.resize(n);
    b.residual_rel.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        b.visc_term[i] = -4.0 * nu * dg[i];
        b.drag_term[i] = 4.0 * alpha / l[i] * ig[i];
        b.coriolis_term[i] = 4.0 / l[i] * it[i];
        b.noise_term[i] = -4.0 / l[i] * ia[i];
        b.residual[i] = b.flux[i] - (b.visc_term[i] + b.drag_term[i] + b.coriolis_term[i] + b.noise_term[i]);
        const double scale = std::max({std::abs(b.visc_term[i]), std::abs(b.drag_term[i]),
                                       std::abs(b.coriolis_term[i]), std::abs(b.noise_term[i])});
        b.residual_rel[i] = scale > 0.0 ? b.residual[i] / scale : 0.0;
    }
    return b;
}

}  // namespace

std::vector<double> even_derivative(const std::vector<double>& l, double f0, const std::vector<double>& f) {
    const auto r = reflect(l, f0, f, false);
    std::vector<double> d(l.size());
    const std::size_t width = std::min<std::size_t>(7, r.x.size());
    for (std::size_t i = 0; i < l.size(); ++i) {
        const std::size_t c = r.zero + 1 + i;
        d[i] = lagrange(r, stencil_start(c, width, r.x.size()), width, r.x[c], true);
    }
    return d;
}

std::vector<double> moment_integral(const std::vector<double>& l, double f0, const std::vector<double>& f) {
    const auto r = reflect(l, f0, f, true);
    // three-point Gauss-Legendre is exact for the quintic pieces
    static const std::array<double, 3> gx{-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
    static const std::array<double, 3> gw{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    const std::size_t width = std::min<std::size_t>(6, r.x.size());
    std::vector<double> out(l.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < l.size(); ++i) {
        const std::size_t k = r.zero + i;  // interval [x_k, x_{k+1}]
        const double a = r.x[k], b = r.x[k + 1];
        const std::size_t lo = std::min(k >= 2 ? k - 2 : 0, r.x.size() - width);
        double piece = 0.0;
        for (int q = 0; q < 3; ++q) {
            const double x = 0.5 * (a + b) + 0.5 * (b - a) * gx[q];
            piece += gw[q] * lagrange(r, lo, width, x, false);
        }
        acc += 0.5 * (b - a) * piece;
        out[i] = acc;
    }
    return out;
}

KHMBudget khm_velocity_budget(const DiagnosticSeries& d_bar, const DiagnosticSeries& gamma_bar,
                              const DiagnosticSeries& ctheta_bar, const DiagnosticSeries& a_bar, double nu,
                              double alpha) {
    return budget(d_bar, gamma_bar, ctheta_bar, a_bar, nu, alpha);
}

KHMBudget khm_vorticity_budget(const DiagnosticSeries& frakD_bar, const DiagnosticSeries& frakC_bar,
                               const DiagnosticSeries& frakQ_bar, const DiagnosticSeries& fraka_bar, double nu,
                               double alpha) {
    return budget(frakD_bar, frakC_bar, frakQ_bar, fraka_bar, nu, alpha);
}

}  // namespace bkhm
