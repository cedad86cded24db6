#pragma once

#include <random>

#include "bkhm/field.hpp"
#include "bkhm/transform.hpp"

namespace bkhm::test {

inline PhysicalField random_physical(const ChannelGrid& g, unsigned seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    PhysicalField f(g);
    for (auto& v : f.values) v = nd(gen);
    return f;
}

// Random real vorticity restricted to the retained modes.
inline SpectralField random_vorticity(const ChannelGrid& g, unsigned seed) {
    auto w = transform_forward(random_physical(g, seed));
    dealias(w);
    return w;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace bkhm::test
