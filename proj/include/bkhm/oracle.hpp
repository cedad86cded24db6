#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bkhm/operators.hpp"
#include "bkhm/statistics.hpp"

namespace bkhm {

/// (1/|Omega|) sum over cells of A(x) B(x + y), with B zero-extended and
/// evaluated bilinearly at x + y. Plain loops, no FFT.
double brute_correlation(const PhysicalField& a, const PhysicalField& b, double y1, double y2);

struct StructureSample {
    double velocity_flux = 0.0;  ///< avg |du|^2 du.n
    double mixed_flux = 0.0;     ///< avg |dw|^2 du.n
    double longitudinal = 0.0;   ///< avg (du.n)^3
};

/// Cubic increments at y = l n by direct loops over the zero-extended fields.
/// Off-lattice shifts blend the exact results at the four surrounding
/// lattice lags with bilinear weights (the cubic integrand is not linear in
/// the shifted samples, so interpolating the fields first would not match
/// any correlation-based evaluation).
StructureSample brute_structure3(const VelocityPair& u, const PhysicalField& w, double l, double n1, double n2,
                                 Region region = Region::Extended, double margin = 0.0);

/// Spherically averaged trace of Theta(l n) from its unreduced definition with
/// f(x) = f0 + beta x2, averaged over the given snapshots.
DiagnosticSeries theta_general_f(const std::vector<SnapshotFields>& snapshots, double f0, double beta,
                                 const SeparationGrid& sep);

/// Any snapshot kind evaluated with the brute-force routines above.
DiagnosticSeries brute_series(SeriesKind kind, const std::vector<SnapshotFields>& snapshots,
                              const SeparationGrid& sep, const StatisticsOptions& opts);

struct OracleReport {
    std::string operation;
    std::string instance;
    double max_rel_error = 0.0;
    bool pass = false;
};

/// Largest |fast - slow| over the series, relative to the largest |slow|.
double series_error(const std::vector<double>& fast, const std::vector<double>& slow);

/// Fast bilinear paths against the oracles on `instances` random 16 x 8 cases.
std::vector<OracleReport> run_oracle_suite(int instances = 20, std::uint64_t seed = 2024, double threshold = 1e-10);

}  // namespace bkhm
