#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bkhm/field.hpp"

namespace bkhm {

/// One real forcing element e_j = grad-perp psi_j / ||grad psi_j||.
/// The sign of k selects the x1 phase of psi_j: k > 0 -> cos(k x1),
/// k < 0 -> sin(|k| x1), k = 0 -> no x1 dependence; x2 profile sin(m pi (x2-a)/(b-a)).
struct ForcingMode {
    int k = 0;
    int m = 1;
    double amplitude = 0.0;  ///< b_j
    double kappa_sq = 0.0;
};

struct ForcingBasis {
    ChannelGrid grid;
    std::vector<ForcingMode> modes;
    double eps_total = 0.0;  ///< 1/2 sum b_j^2
    double eta_total = 0.0;  ///< 1/2 sum b_j^2 kappa_j^2
    double eps_area = 0.0;
    double eta_area = 0.0;
    double kappa_injection = 0.0;  ///< centre of the band

    /// Injection length 2 pi / kappa_injection.
    double injection_length() const;
};

/// Every eigenmode with kappa_lo <= kappa <= kappa_hi, equal amplitudes
/// normalised to the requested total energy injection.
ForcingBasis build_forcing_basis(const ChannelGrid& grid, double kappa_lo, double kappa_hi, double target_eps_total);

/// Equal-amplitude basis over an explicit list of (k, m) modes.
ForcingBasis forcing_basis_from_modes(const ChannelGrid& grid, const std::vector<std::pair<int, int>>& km,
                                      double target_eps_total);

/// Spectral streamfunction of mode j normalised so that ||e_j|| = 1.
SpectralField mode_streamfunction(const ChannelGrid& grid, const ForcingMode& mode);

/// Counter-based random stream. Draw i of step `counter` is a pure function
/// of (seed, counter, i).
struct RngState {
    std::uint64_t seed = 0;
    std::uint64_t counter = 0;

    bool operator==(const RngState&) const = default;
};

/// Standard normal draw for (seed, counter, index).
double gaussian(std::uint64_t seed, std::uint64_t counter, std::uint64_t index);

/// sum_j b_j sqrt(dt) xi_j curl(e_j) as a spectral vorticity field; returns
/// the stream advanced by one counter step.
std::pair<SpectralField, RngState> sample_vorticity_increment(const ForcingBasis& basis, double dt, RngState rng);

/// How channel fields are continued past the walls when forming two-point
/// correlations of the forcing.
enum class Continuation {
    ZeroExtension,  ///< fields set to zero outside [a, b]
    Reflection,     ///< smooth odd/even periodic continuation of the sine/cosine basis
};

/// trace a(y) = 1/2 sum_j b_j^2 avg_x e_j(x).e_j(x+y), area-normalised by |Omega|.
double forcing_velocity_correlation(const ForcingBasis& basis, double y1, double y2,
                                    Continuation c = Continuation::ZeroExtension);
/// 1/2 sum_j b_j^2 avg_x curl e_j(x) curl e_j(x+y), area-normalised.
double forcing_vorticity_correlation(const ForcingBasis& basis, double y1, double y2,
                                     Continuation c = Continuation::ZeroExtension);

}  // namespace bkhm
