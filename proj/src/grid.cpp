#include "bkhm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bkhm/error.hpp"

namespace bkhm {

ChannelGrid::ChannelGrid(double L, double a, double b, int N1, int N2)
    : L_(L), a_(a), b_(b), N1_(N1), N2_(N2) {
    if (!(std::isfinite(L) && L > 0.0))
        throw ValidationError("grid.L must be positive, got " + std::to_string(L));
    if (!(std::isfinite(a) && std::isfinite(b) && b > a))
        throw ValidationError("grid: wall positions need a < b");
    if (N1 < 4 || N1 % 2 != 0)
        throw ValidationError("grid.N1 must be an even integer >= 4, got " + std::to_string(N1));
    if (N2 < 2)
        throw ValidationError("grid.N2 must be >= 2, got " + std::to_string(N2));
}

double ChannelGrid::dealiased_wavenumber() const noexcept {
    // Nyquist wavenumbers: pi*N1/L in x1 and pi*(N2+1)/(b-a) in x2.
    const double nyq1 = std::numbers::pi * N1_ / L_;
    const double nyq2 = std::numbers::pi * (N2_ + 1) / (b_ - a_);
    return std::min(nyq1, nyq2) * 2.0 / 3.0;
}

}  // namespace bkhm
