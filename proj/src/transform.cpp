#include "bkhm/transform.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include "bkhm/error.hpp"
#include "fftw_support.hpp"

namespace bkhm {

PhysicalField::PhysicalField(const ChannelGrid& g, std::vector<double> v)
    : grid(g), values(std::move(v)) {
    if (values.size() != g.size()) throw GridMismatchError("PhysicalField: sample count does not match grid");
}

std::mutex& detail::fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

namespace {

void require_same_grid(const SpectralField& a, const SpectralField& b) {
    if (!(a.grid == b.grid) || a.parity != b.parity)
        throw GridMismatchError("spectral fields live on different grids or bases");
}

}  // namespace

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    require_same_grid(*this, o);
    for (std::size_t n = 0; n < coeffs.size(); ++n) coeffs[n] += o.coeffs[n];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    require_same_grid(*this, o);
    for (std::size_t n = 0; n < coeffs.size(); ++n) coeffs[n] -= o.coeffs[n];
    return *this;
}

SpectralField& SpectralField::operator*=(double s) {
    for (auto& c : coeffs) c *= s;
    return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

double inner_product(const SpectralField& f, const SpectralField& h) {
    require_same_grid(f, h);
    double sum = 0.0;
    for (std::size_t n = 0; n < f.coeffs.size(); ++n) sum += (std::conj(f.coeffs[n]) * h.coeffs[n]).real();
    return parseval_weight(f.grid) * sum;
}

double conjugate_asymmetry(const SpectralField& c) {
    const int N1 = c.grid.N1(), N2 = c.grid.N2();
    double cmax = 0.0, worst = 0.0;
    for (const auto& v : c.coeffs) cmax = std::max(cmax, std::norm(v));
    if (cmax == 0.0) return 0.0;
    for (int m = 0; m < N2; ++m) {
        const cplx* row = c.coeffs.data() + static_cast<std::size_t>(m) * N1;
        worst = std::max(worst, row[0].imag() * row[0].imag());
        worst = std::max(worst, row[N1 / 2].imag() * row[N1 / 2].imag());
        for (int k = 1; k < N1 / 2; ++k) worst = std::max(worst, std::norm(row[N1 - k] - std::conj(row[k])));
    }
    return std::sqrt(worst / cmax);
}

void dealias(SpectralField& c) {
    const auto& g = c.grid;
    for (int m = 1; m <= g.N2(); ++m)
        for (int col = 0; col < g.N1(); ++col)
            if (!g.retained(g.fourier_index(col), m)) c.coeffs[static_cast<std::size_t>(m - 1) * g.N1() + col] = {};
}

namespace {

// Two-dimensional real-to-real plans for one (N1, N2) pair: sine or cosine
// (DST-I / DCT-I) along x2 combined with a halfcomplex DFT along x1. Arrays
// are N1 wide with x2 outer. FFTW_ESTIMATE keeps plan selection, and hence
// rounding, deterministic across runs.
struct ChannelPlans {
    int N1, N2;
    fftw_plan forward;       // N2 rows: RODFT00 x R2HC
    fftw_plan inverse_sine;  // N2 rows: RODFT00 x HC2R
    fftw_plan inverse_cos;   // N2 + 2 rows (walls included): REDFT00 x HC2R

    ChannelPlans(int n1, int n2) : N1(n1), N2(n2) {
        const std::size_t n = static_cast<std::size_t>(N1) * (N2 + 2);
        double* a = fftw_alloc_real(n);
        double* b = fftw_alloc_real(n);
        forward = fftw_plan_r2r_2d(N2, N1, a, b, FFTW_RODFT00, FFTW_R2HC, FFTW_ESTIMATE);
        inverse_sine = fftw_plan_r2r_2d(N2, N1, a, b, FFTW_RODFT00, FFTW_HC2R, FFTW_ESTIMATE);
        inverse_cos = fftw_plan_r2r_2d(N2 + 2, N1, a, b, FFTW_REDFT00, FFTW_HC2R, FFTW_ESTIMATE);
        fftw_free(a);
        fftw_free(b);
    }
    ~ChannelPlans() {
        fftw_destroy_plan(forward);
        fftw_destroy_plan(inverse_sine);
        fftw_destroy_plan(inverse_cos);
    }
    ChannelPlans(const ChannelPlans&) = delete;
    ChannelPlans& operator=(const ChannelPlans&) = delete;
};

const ChannelPlans& plans_for(const ChannelGrid& g) {
    static std::map<std::pair<int, int>, std::unique_ptr<ChannelPlans>> cache;
    std::lock_guard lock(detail::fftw_planner_mutex());
    auto key = std::make_pair(g.N1(), g.N2());
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, std::make_unique<ChannelPlans>(g.N1(), g.N2())).first;
    return *it->second;
}

// Per-thread SIMD-aligned work arrays, so plans made on aligned storage can
// be executed concurrently through the new-array interface.
struct Scratch {
    std::size_t size = 0;
    double* in = nullptr;
    double* out = nullptr;

    void reserve(std::size_t n) {
        if (n <= size) return;
        release();
        in = fftw_alloc_real(n);
        out = fftw_alloc_real(n);
        size = n;
    }
    void release() {
        fftw_free(in);
        fftw_free(out);
        in = out = nullptr;
        size = 0;
    }
    ~Scratch() { release(); }
};

Scratch& scratch(std::size_t n) {
    thread_local Scratch s;
    s.reserve(n);
    return s;
}

void check_symmetric(const SpectralField& c) {
    const double asym = conjugate_asymmetry(c);
    if (asym > 1e-10) {
        std::ostringstream os;
        os << "spectral data is not conjugate symmetric (relative asymmetry " << asym << ")";
        throw CorruptSpectrumError(os.str());
    }
}

// Coefficient row -> halfcomplex row (r0, r1, ..., r_{N1/2}, i_{N1/2-1}, ..., i1).
void to_halfcomplex(const cplx* row, int N1, double* hc) {
    hc[0] = row[0].real();
    hc[N1 / 2] = row[N1 / 2].real();
    for (int k = 1; k < N1 / 2; ++k) {
        hc[k] = row[k].real();
        hc[N1 - k] = row[k].imag();
    }
}

// Evaluate a series with the given parity; for a cosine series the result has
// N2 + 2 rows (walls included), otherwise N2 rows. The DST-I/DCT-I carry a
// factor 2 that the 0.5 removes.
const double* evaluate(const SpectralField& c, Scratch& w) {
    const auto& p = plans_for(c.grid);
    const int N1 = c.grid.N1(), N2 = c.grid.N2();
    const bool cosine = c.parity == Parity::Cosine;
    const int rows = cosine ? N2 + 2 : N2;
    const int offset = cosine ? 1 : 0;
    std::fill_n(w.in, static_cast<std::size_t>(N1) * rows, 0.0);
    for (int m = 0; m < N2; ++m)
        to_halfcomplex(c.coeffs.data() + static_cast<std::size_t>(m) * N1, N1,
                       w.in + static_cast<std::size_t>(m + offset) * N1);
    for (std::size_t n = 0; n < static_cast<std::size_t>(N1) * rows; ++n) w.in[n] *= 0.5;
    fftw_execute_r2r(cosine ? p.inverse_cos : p.inverse_sine, w.in, w.out);
    return w.out;
}

SpectralField forward(const PhysicalField& f, bool truncate) {
    const auto& g = f.grid;
    const auto& p = plans_for(g);
    const int N1 = g.N1(), N2 = g.N2();
    Scratch& w = scratch(static_cast<std::size_t>(N1) * (N2 + 2));
    std::copy(f.values.begin(), f.values.end(), w.in);
    fftw_execute_r2r(p.forward, w.in, w.out);
    const double scale = 1.0 / (static_cast<double>(N1) * (N2 + 1));
    SpectralField c(g, Parity::Sine);
    for (int m = 1; m <= N2; ++m) {
        const double* hc = w.out + static_cast<std::size_t>(m - 1) * N1;
        cplx* row = c.coeffs.data() + static_cast<std::size_t>(m - 1) * N1;
        for (int k = 0; k <= N1 / 2; ++k) {
            if (truncate && !g.retained(k, m)) continue;
            if (k == 0 || k == N1 / 2) {
                row[k] = hc[k] * scale;
            } else {
                // R2HC uses e^{-ikx}, matching the forward convention
                row[k] = cplx(hc[k], hc[N1 - k]) * scale;
                row[N1 - k] = std::conj(row[k]);
            }
        }
    }
    return c;
}

}  // namespace

SpectralField transform_forward(const PhysicalField& f) { return forward(f, false); }

SpectralField transform_forward_dealiased(const PhysicalField& f) { return forward(f, true); }

PhysicalField detail::inverse_unchecked(const SpectralField& c) {
    const auto& g = c.grid;
    const int N1 = g.N1(), N2 = g.N2();
    Scratch& w = scratch(static_cast<std::size_t>(N1) * (N2 + 2));
    const double* v = evaluate(c, w);
    if (c.parity == Parity::Cosine) v += N1;  // skip the lower wall row
    PhysicalField f(g);
    std::copy_n(v, f.values.size(), f.values.begin());
    return f;
}

PhysicalField transform_inverse(const SpectralField& c) {
    check_symmetric(c);
    return detail::inverse_unchecked(c);
}

WallValues wall_values(const SpectralField& c) {
    const int N1 = c.grid.N1(), N2 = c.grid.N2();
    WallValues w{std::vector<double>(N1, 0.0), std::vector<double>(N1, 0.0)};
    if (c.parity == Parity::Sine) return w;
    check_symmetric(c);
    Scratch& s = scratch(static_cast<std::size_t>(N1) * (N2 + 2));
    const double* v = evaluate(c, s);
    std::copy_n(v, N1, w.lower.begin());
    std::copy_n(v + static_cast<std::ptrdiff_t>(N1) * (N2 + 1), N1, w.upper.begin());
    return w;
}

}  // namespace bkhm
