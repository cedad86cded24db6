#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "bkhm/dynamics.hpp"
#include "bkhm/forcing.hpp"
#include "bkhm/grid.hpp"
#include "bkhm/statistics.hpp"

namespace bkhm {

struct GridConfig {
    double L = 0.0, a = 0.0, b = 0.0;
    int N1 = 0, N2 = 0;

    bool operator==(const GridConfig&) const = default;
};

struct ForcingConfig {
    double kappa_lo = 0.0, kappa_hi = 0.0, eps_total = 0.0;

    bool operator==(const ForcingConfig&) const = default;
};

/// Times are in simulation units. Zero in spinup_window / sample_time means
/// "20 / 200 eddy-turnover times" and is resolved at load.
struct TimeConfig {
    double dt = 0.0;
    std::int64_t max_steps = 0;
    std::int64_t snapshot_stride = 0;
    double spinup_window = 0.0;
    double spinup_tol = 0.0;
    double sample_time = 0.0;

    bool operator==(const TimeConfig&) const = default;
};

struct AnalysisConfig {
    double l_min = 0.0, l_max = 0.0;
    int n_l = 0;
    int n_dirs = 0;
    double fit_lo = 0.0, fit_hi = 0.0;
    Interpolation interp = Interpolation::Trigonometric;
    int pad_factor = 0;
    int n_blocks = 0;

    bool operator==(const AnalysisConfig&) const = default;
};

struct RunConfig {
    GridConfig grid;
    PhysicsParams physics;
    ForcingConfig forcing;
    TimeConfig time;
    AnalysisConfig analysis;
    std::uint64_t seed = 0;
    std::string output = "out";

    ChannelGrid channel() const;
    ForcingBasis basis() const;
    SeparationGrid separations() const;
    SpinupCriterion spinup() const;
    StatisticsOptions statistics_options() const;

    bool operator==(const RunConfig&) const = default;
};

/// Parse INI text ([grid] [physics] [forcing] [time] [analysis] [rng]
/// [output]). Required: grid.N1, grid.N2, forcing.kappa_lo,
/// forcing.kappa_hi, forcing.eps_total, rng.seed. Errors name the key.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Effective config with every default resolved; floats to 17 digits.
std::string echo_config(const RunConfig& c);

}  // namespace bkhm
