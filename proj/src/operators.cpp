#include "bkhm/operators.hpp"

#include <algorithm>
#include <string>

#include "bkhm/error.hpp"
#include "bkhm/transform.hpp"
#include "fftw_support.hpp"

namespace bkhm {

SpectralField streamfunction(const SpectralField& w) {
    const auto& g = w.grid;
    SpectralField psi(g, Parity::Sine);
    for (int m = 1; m <= g.N2(); ++m)
        for (int col = 0; col < g.N1(); ++col) {
            const auto n = static_cast<std::size_t>(m - 1) * g.N1() + col;
            psi.coeffs[n] = -w.coeffs[n] / g.kappa_sq(g.fourier_index(col), m);
        }
    return psi;
}

SpectralField d_dx1(const SpectralField& f) {
    const auto& g = f.grid;
    SpectralField out(g, f.parity);
    for (int m = 1; m <= g.N2(); ++m)
        for (int col = 0; col < g.N1(); ++col) {
            const int k = g.fourier_index(col);
            if (2 * k == g.N1()) continue;  // Nyquist column has no real derivative
            const auto n = static_cast<std::size_t>(m - 1) * g.N1() + col;
            out.coeffs[n] = cplx(0.0, g.kx(k)) * f.coeffs[n];
        }
    return out;
}

SpectralField d_dx2(const SpectralField& f) {
    const auto& g = f.grid;
    // d/dx2 sin(q y) = q cos(q y);  d/dx2 cos(q y) = -q sin(q y)
    const bool sine = f.parity == Parity::Sine;
    SpectralField out(g, sine ? Parity::Cosine : Parity::Sine);
    for (int m = 1; m <= g.N2(); ++m) {
        const double q = sine ? g.ky(m) : -g.ky(m);
        for (int col = 0; col < g.N1(); ++col) {
            const auto n = static_cast<std::size_t>(m - 1) * g.N1() + col;
            out.coeffs[n] = q * f.coeffs[n];
        }
    }
    return out;
}

VelocityPair velocity_from_vorticity(const SpectralField& w) {
    if (w.parity != Parity::Sine) throw ValidationError("vorticity must be a sine series");
    if (conjugate_asymmetry(w) > 1e-10) throw CorruptSpectrumError("vorticity is not conjugate symmetric");
    // u1 = -d2 psi, u2 = d1 psi with psi = -w / kappa^2, in one pass
    const auto& g = w.grid;
    SpectralField u1(g, Parity::Cosine), u2(g, Parity::Sine);
    for (int m = 1; m <= g.N2(); ++m) {
        const double q = g.ky(m);
        for (int col = 0; col < g.N1(); ++col) {
            const int k = g.fourier_index(col);
            const auto n = static_cast<std::size_t>(m - 1) * g.N1() + col;
            const cplx psi = -w.coeffs[n] / g.kappa_sq(k, m);
            u1.coeffs[n] = -q * psi;
            u2.coeffs[n] = 2 * k == g.N1() ? cplx{} : cplx(0.0, g.kx(k)) * psi;
        }
    }
    auto p1 = detail::inverse_unchecked(u1);
    auto p2 = detail::inverse_unchecked(u2);
    return VelocityPair{std::move(u1), std::move(u2), std::move(p1), std::move(p2)};
}

SpectralField curl(const VelocityPair& u) { return d_dx1(u.u2_hat) - d_dx2(u.u1_hat); }

SpectralField divergence(const VelocityPair& u) { return d_dx1(u.u1_hat) + d_dx2(u.u2_hat); }

namespace {

double sum_sq(const SpectralField& f) {
    double s = 0.0;
    for (const auto& c : f.coeffs) s += std::norm(c);
    return s;
}

}  // namespace

Norms l2_norms(const VelocityPair& u, const SpectralField& w) {
    if (!(u.u1_hat.grid == w.grid) || !(u.u2_hat.grid == w.grid))
        throw GridMismatchError("l2_norms: velocity and vorticity grids differ");
    const double wgt = parseval_weight(w.grid);
    Norms n;
    n.energy = wgt * (sum_sq(u.u1_hat) + sum_sq(u.u2_hat));
    n.enstrophy = wgt * sum_sq(w);
    n.palinstrophy = wgt * (sum_sq(d_dx1(w)) + sum_sq(d_dx2(w)));
    n.grad_u = wgt * (sum_sq(d_dx1(u.u1_hat)) + sum_sq(d_dx2(u.u1_hat)) + sum_sq(d_dx1(u.u2_hat)) +
                      sum_sq(d_dx2(u.u2_hat)));
    return n;
}

Norms l2_norms(const SpectralField& w) { return l2_norms(velocity_from_vorticity(w), w); }

PaddedField extend_by_zero(const PhysicalField& f, int pad_factor) {
    if (pad_factor < 2)
        throw ValidationError("extend_by_zero: pad_factor must be >= 2, got " + std::to_string(pad_factor));
    const auto& g = f.grid;
    const int rows = pad_factor * (g.N2() + 1);
    PaddedField p{g, pad_factor, rows, std::vector<double>(static_cast<std::size_t>(rows) * g.N1(), 0.0)};
    std::copy(f.values.begin(), f.values.end(), p.values.begin() + g.N1());
    return p;
}

}  // namespace bkhm
