#pragma once

#include <mutex>

#include "bkhm/field.hpp"

namespace bkhm::detail {

// transform_inverse without the conjugate-symmetry check, for callers that
// built the input from an already checked field.
PhysicalField inverse_unchecked(const SpectralField& c);

// FFTW's planner is not reentrant; every plan creation goes through this lock.
std::mutex& fftw_planner_mutex();

}  // namespace bkhm::detail
