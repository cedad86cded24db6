#pragma once

#include "bkhm/field.hpp"

namespace bkhm {

/// Physical samples -> mixed Fourier(x1) x sine(x2) coefficients.
SpectralField transform_forward(const PhysicalField& f);

/// transform_forward followed by dealias, without computing the dropped modes.
SpectralField transform_forward_dealiased(const PhysicalField& f);

/// Coefficients -> samples on the interior nodes. Works for both parities.
/// Throws CorruptSpectrumError when the input is not conjugate symmetric.
PhysicalField transform_inverse(const SpectralField& c);

/// Cosine series evaluated on the two wall rows (x2 = a, x2 = b); each entry
/// holds N1 samples. Sine series vanish there identically.
struct WallValues {
    std::vector<double> lower, upper;
};
WallValues wall_values(const SpectralField& c);

}  // namespace bkhm
