#include "bkhm/forcing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <tuple>

#include "bkhm/error.hpp"
#include "bkhm/operators.hpp"
#include "bkhm/transform.hpp"

namespace bkhm {

double ForcingBasis::injection_length() const {
    return kappa_injection > 0.0 ? 2.0 * std::numbers::pi / kappa_injection : 0.0;
}

namespace {

// Normalisation of psi_j so that ||grad psi_j||_{L2} = 1.
double mode_norm(const ChannelGrid& g, const ForcingMode& md) {
    const double kap = std::sqrt(md.kappa_sq);
    return (md.k == 0 ? std::sqrt(2.0) : 2.0) / (kap * std::sqrt(g.area()));
}

// Checks int |curl e_j|^2 = kappa_j^2 by physical-space quadrature. curl e_j
// is a sine series, for which the interior cell sum is exact.
void verify_mode(const ChannelGrid& g, const ForcingMode& md) {
    auto w = mode_streamfunction(g, md);
    w *= -md.kappa_sq;
    const auto f = transform_inverse(w);
    double s = 0.0;
    for (double v : f.values) s += v * v;
    s *= g.cell_area();
    if (std::abs(s - md.kappa_sq) > 1e-10 * md.kappa_sq) {
        std::ostringstream os;
        os << "forcing mode (k=" << md.k << ", m=" << md.m << ") failed the curl-norm check: " << s << " vs "
           << md.kappa_sq;
        throw NumericalError(os.str());
    }
}

ForcingBasis finish_basis(const ChannelGrid& grid, std::vector<ForcingMode> modes, double target_eps_total) {
    if (!(std::isfinite(target_eps_total) && target_eps_total >= 0.0))
        throw ValidationError("forcing.eps_total must be a finite non-negative number");
    if (modes.empty()) throw ValidationError("forcing: the band contains no eigenmodes");
    const double b = std::sqrt(2.0 * target_eps_total / static_cast<double>(modes.size()));
    ForcingBasis basis{grid, std::move(modes)};
    double eps = 0.0, eta = 0.0, kap = 0.0;
    for (auto& md : basis.modes) {
        md.amplitude = b;
        verify_mode(grid, md);
        eps += 0.5 * b * b;
        eta += 0.5 * b * b * md.kappa_sq;
        kap += std::sqrt(md.kappa_sq);
    }
    basis.eps_total = eps;
    basis.eta_total = eta;
    basis.eps_area = eps / grid.area();
    basis.eta_area = eta / grid.area();
    basis.kappa_injection = kap / static_cast<double>(basis.modes.size());
    return basis;
}

}  // namespace

ForcingBasis build_forcing_basis(const ChannelGrid& grid, double kappa_lo, double kappa_hi, double target_eps_total) {
    const double kdeal = grid.dealiased_wavenumber();
    if (!(kappa_lo > 0.0)) throw ValidationError("forcing.kappa_lo must be positive");
    if (!(kappa_hi > kappa_lo)) throw ValidationError("forcing.kappa_hi must exceed forcing.kappa_lo");
    if (!(kappa_hi < kdeal)) {
        std::ostringstream os;
        os << "forcing.kappa_hi = " << kappa_hi << " exceeds the dealiased range (< " << kdeal << ")";
        throw ValidationError(os.str());
    }
    std::vector<ForcingMode> modes;
    const int kmax = grid.N1() / 2 - 1;
    for (int m = 1; m <= grid.N2(); ++m) {
        for (int k = -kmax; k <= kmax; ++k) {
            const double ksq = grid.kappa_sq(k, m);
            const double kap = std::sqrt(ksq);
            if (kap >= kappa_lo && kap <= kappa_hi && grid.retained(k, m)) modes.push_back({k, m, 0.0, ksq});
        }
    }
    auto basis = finish_basis(grid, std::move(modes), target_eps_total);
    basis.kappa_injection = 0.5 * (kappa_lo + kappa_hi);
    return basis;
}

ForcingBasis forcing_basis_from_modes(const ChannelGrid& grid, const std::vector<std::pair<int, int>>& km,
                                      double target_eps_total) {
    std::vector<ForcingMode> modes;
    for (auto [k, m] : km) {
        if (m < 1 || m > grid.N2() || !grid.retained(k, m))
            throw ValidationError("forcing mode outside the dealiased range");
        modes.push_back({k, m, 0.0, grid.kappa_sq(k, m)});
    }
    std::sort(modes.begin(), modes.end(),
              [](const ForcingMode& x, const ForcingMode& y) { return std::tie(x.m, x.k) < std::tie(y.m, y.k); });
    return finish_basis(grid, std::move(modes), target_eps_total);
}

SpectralField mode_streamfunction(const ChannelGrid& g, const ForcingMode& md) {
    SpectralField psi(g, Parity::Sine);
    const double n = mode_norm(g, md);
    if (md.k == 0) {
        psi.at(0, md.m) = n;
    } else if (md.k > 0) {
        psi.at(md.k, md.m) = 0.5 * n;
        psi.at(-md.k, md.m) = 0.5 * n;
    } else {
        const int k = -md.k;
        psi.at(k, md.m) = cplx(0.0, -0.5 * n);
        psi.at(-k, md.m) = cplx(0.0, 0.5 * n);
    }
    return psi;
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform in (0, 1): 53 random bits, offset by half an ulp so log() is safe.
double uniform(std::uint64_t seed, std::uint64_t counter, std::uint64_t index) {
    const std::uint64_t h = splitmix(splitmix(splitmix(seed) ^ counter) ^ index);
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

double gaussian(std::uint64_t seed, std::uint64_t counter, std::uint64_t index) {
    const double u1 = uniform(seed, counter, 2 * index);
    const double u2 = uniform(seed, counter, 2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::pair<SpectralField, RngState> sample_vorticity_increment(const ForcingBasis& basis, double dt, RngState rng) {
    if (!(dt >= 0.0)) throw ValidationError("sample_vorticity_increment: dt must be non-negative");
    const auto& g = basis.grid;
    SpectralField inc(g, Parity::Sine);
    const double sdt = std::sqrt(dt);
    for (std::size_t j = 0; j < basis.modes.size(); ++j) {
        const auto& md = basis.modes[j];
        const double xi = gaussian(rng.seed, rng.counter, j);
        // curl e_j = Delta psi_j = -kappa^2 psi_j
        const double s = -md.amplitude * sdt * xi * md.kappa_sq * mode_norm(g, md);
        if (md.k == 0) {
            inc.at(0, md.m) += s;
        } else if (md.k > 0) {
            inc.at(md.k, md.m) += 0.5 * s;
            inc.at(-md.k, md.m) += 0.5 * s;
        } else {
            inc.at(-md.k, md.m) += cplx(0.0, -0.5 * s);
            inc.at(md.k, md.m) += cplx(0.0, 0.5 * s);
        }
    }
    ++rng.counter;
    return {std::move(inc), rng};
}

namespace {

// Overlap integrals over [0, H] of cos(qy)cos(q(y+s)) and sin(qy)sin(q(y+s))
// with both arguments restricted to the strip (zero extension).
struct Overlap {
    double cc, ss;
};

Overlap overlap(double q, double H, double s, Continuation c) {
    if (c == Continuation::Reflection) return {0.5 * H * std::cos(q * s), 0.5 * H * std::cos(q * s)};
    const double a = std::abs(s);
    if (a >= H) return {0.0, 0.0};
    const double base = (H - a) * std::cos(q * a);
    const double edge = std::sin(q * a) / q;
    return {0.5 * (base - edge), 0.5 * (base + edge)};
}

template <class PerMode>
double sum_modes(const ForcingBasis& basis, PerMode&& f) {
    double s = 0.0;
    for (const auto& md : basis.modes) s += 0.5 * md.amplitude * md.amplitude * f(md);
    return s / basis.grid.area();
}

}  // namespace

double forcing_velocity_correlation(const ForcingBasis& basis, double y1, double y2, Continuation c) {
    const auto& g = basis.grid;
    return sum_modes(basis, [&](const ForcingMode& md) {
        const double n = mode_norm(g, md);
        const double k = g.kx(md.k), q = g.ky(md.m);
        const auto ov = overlap(q, g.height(), y2, c);
        if (md.k == 0) return n * n * q * q * g.L() * ov.cc;
        return n * n * 0.5 * g.L() * std::cos(k * y1) * (q * q * ov.cc + k * k * ov.ss);
    });
}

double forcing_vorticity_correlation(const ForcingBasis& basis, double y1, double y2, Continuation c) {
    const auto& g = basis.grid;
    return sum_modes(basis, [&](const ForcingMode& md) {
        const double n = mode_norm(g, md);
        const double k = g.kx(md.k), q = g.ky(md.m);
        const auto ov = overlap(q, g.height(), y2, c);
        const double k4 = md.kappa_sq * md.kappa_sq;
        if (md.k == 0) return n * n * k4 * g.L() * ov.ss;
        return n * n * k4 * 0.5 * g.L() * std::cos(k * y1) * ov.ss;
    });
}

}  // namespace bkhm
