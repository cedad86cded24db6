#pragma once

#include <vector>

#include "bkhm/field.hpp"

namespace bkhm {

/// Velocity recovered from vorticity through the streamfunction:
/// Delta psi = omega, u = (-d2 psi, d1 psi). u1 is a cosine series, u2 a
/// sine series; both spectral and sampled forms are kept.
struct VelocityPair {
    SpectralField u1_hat;  // Parity::Cosine
    SpectralField u2_hat;  // Parity::Sine
    PhysicalField u1;
    PhysicalField u2;
};

SpectralField streamfunction(const SpectralField& w);
VelocityPair velocity_from_vorticity(const SpectralField& w);

/// d/dx1 (same parity as the input).
SpectralField d_dx1(const SpectralField& f);
/// d/dx2 (sine <-> cosine).
SpectralField d_dx2(const SpectralField& f);

/// Discrete curl d1 u2 - d2 u1 (a sine series).
SpectralField curl(const VelocityPair& u);
/// Discrete divergence d1 u1 + d2 u2 (a cosine series).
SpectralField divergence(const VelocityPair& u);

/// Unnormalised squared L2 integrals by spectral quadrature.
struct Norms {
    double energy = 0.0;        ///< ||u||^2
    double enstrophy = 0.0;     ///< ||omega||^2
    double palinstrophy = 0.0;  ///< ||grad omega||^2
    double grad_u = 0.0;        ///< ||grad u||^2, equal to enstrophy for free-slip fields
};

Norms l2_norms(const VelocityPair& u, const SpectralField& w);
/// Shortcut that derives the velocity internally.
Norms l2_norms(const SpectralField& w);

/// Channel field copied onto a fully periodic N1 x M lattice (M = pad*(N2+1))
/// with zeros off the strip. Lattice row r sits at x2 = a + r*dx2, so the
/// interior nodes occupy rows 1..N2 and the wall rows are zero.
struct PaddedField {
    ChannelGrid grid;
    int pad_factor;
    int rows;  ///< M
    std::vector<double> values;

    int cols() const noexcept { return grid.N1(); }
    double cell_area() const noexcept { return grid.cell_area(); }
    double at(int i, int r) const { return values[static_cast<std::size_t>(r) * grid.N1() + i]; }
};

PaddedField extend_by_zero(const PhysicalField& f, int pad_factor);

}  // namespace bkhm
