#pragma once

#include <cstddef>
#include <numbers>

namespace bkhm {

/// Periodic channel T_L x [a, b] discretised by N1 Fourier points in x1 and
/// N2 interior sine collocation points in x2. Wall values are zero by
/// construction of the sine basis and are never stored.
class ChannelGrid {
public:
    ChannelGrid(double L, double a, double b, int N1, int N2);

    /// Default domain: L = 2*pi, [a, b] = [0, pi].
    static ChannelGrid standard(int N1, int N2) {
        return ChannelGrid(2.0 * std::numbers::pi, 0.0, std::numbers::pi, N1, N2);
    }

    double L() const noexcept { return L_; }
    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    int N1() const noexcept { return N1_; }
    int N2() const noexcept { return N2_; }

    double height() const noexcept { return b_ - a_; }
    double area() const noexcept { return L_ * (b_ - a_); }
    double dx1() const noexcept { return L_ / N1_; }
    double dx2() const noexcept { return (b_ - a_) / (N2_ + 1); }
    double cell_area() const noexcept { return dx1() * dx2(); }
    std::size_t size() const noexcept { return static_cast<std::size_t>(N1_) * N2_; }

    double x1(int i) const noexcept { return i * dx1(); }
    /// j runs over 1..N2 (interior nodes).
    double x2(int j) const noexcept { return a_ + j * dx2(); }

    /// Signed Fourier index of storage column `col` (FFT ordering).
    int fourier_index(int col) const noexcept { return col <= N1_ / 2 ? col : col - N1_; }
    /// Storage column of signed Fourier index k.
    int fourier_column(int k) const noexcept { return k >= 0 ? k : k + N1_; }

    double kx(int k) const noexcept { return 2.0 * std::numbers::pi * k / L_; }
    /// Sine wavenumber of mode m = 1..N2.
    double ky(int m) const noexcept { return std::numbers::pi * m / (b_ - a_); }
    double kappa_sq(int k, int m) const noexcept { return kx(k) * kx(k) + ky(m) * ky(m); }

    /// 2/3-rule retention: |k| < N1/3 and m < 2(N2+1)/3.
    bool retained(int k, int m) const noexcept {
        const int ak = k < 0 ? -k : k;
        return 3 * ak < N1_ && 3 * m < 2 * (N2_ + 1);
    }
    /// Largest wavenumber magnitude kept by the 2/3 rule in each direction (the smaller one).
    double dealiased_wavenumber() const noexcept;

    bool operator==(const ChannelGrid&) const = default;

private:
    double L_, a_, b_;
    int N1_, N2_;
};

}  // namespace bkhm
