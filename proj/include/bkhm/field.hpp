#pragma once

#include <complex>
#include <vector>

#include "bkhm/grid.hpp"

namespace bkhm {

using cplx = std::complex<double>;

/// Real samples on the N1 x N2 interior nodes, stored row-major with x2
/// outer (row r holds node j = r + 1) and x1 inner.
struct PhysicalField {
    ChannelGrid grid;
    std::vector<double> values;

    explicit PhysicalField(const ChannelGrid& g) : grid(g), values(g.size(), 0.0) {}
    PhysicalField(const ChannelGrid& g, std::vector<double> v);

    double& at(int i, int j) { return values[static_cast<std::size_t>(j - 1) * grid.N1() + i]; }
    double at(int i, int j) const { return values[static_cast<std::size_t>(j - 1) * grid.N1() + i]; }
};

/// Which x2 basis the coefficients refer to. Vorticity, streamfunction and
/// u2 are sine series; u1 and d/dx2 of a sine series are cosine series.
enum class Parity { Sine, Cosine };

/// Coefficients c_{k,m} of sum_k sum_m c e^{i k x1} phi_m(x2), where
/// phi_m = sin or cos of m*pi*(x2-a)/(b-a), m = 1..N2. Row m-1 holds all N1
/// Fourier columns in FFT order.
struct SpectralField {
    ChannelGrid grid;
    Parity parity = Parity::Sine;
    std::vector<cplx> coeffs;

    explicit SpectralField(const ChannelGrid& g, Parity p = Parity::Sine)
        : grid(g), parity(p), coeffs(g.size(), cplx{}) {}

    cplx& at(int k, int m) {
        return coeffs[static_cast<std::size_t>(m - 1) * grid.N1() + grid.fourier_column(k)];
    }
    cplx at(int k, int m) const {
        return coeffs[static_cast<std::size_t>(m - 1) * grid.N1() + grid.fourier_column(k)];
    }

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(double s);
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

/// Basis-normalisation weight: integral of |e^{ikx1} phi_m|^2 over the channel.
inline double parseval_weight(const ChannelGrid& g) { return 0.5 * g.area(); }

/// L2 inner product <f, h> of two real fields given by coefficients, via
/// spectral quadrature.
double inner_product(const SpectralField& f, const SpectralField& h);

/// Largest |c_{-k,m} - conj(c_{k,m})| (and imaginary parts of self-paired
/// columns) relative to max |c|.
double conjugate_asymmetry(const SpectralField& c);

/// Zero every coefficient outside the 2/3-rule retained set.
void dealias(SpectralField& c);

}  // namespace bkhm
