#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bkhm/dynamics.hpp"
#include "bkhm/field.hpp"
#include "bkhm/forcing.hpp"

namespace bkhm {

enum class SeriesKind {
    GammaBar,             ///< spherical average of trace Gamma
    CThetaBar,            ///< Coriolis correlation
    ABar,                 ///< forcing velocity correlation
    FrakCBar,             ///< vorticity correlation
    FrakQBar,             ///< beta u2 / omega cross correlation
    FrakABar,             ///< forcing vorticity correlation
    DBar,                 ///< energy flux structure function
    FrakDBar,             ///< enstrophy flux structure function
    S3Longitudinal,       ///< (delta u . n)^3
    S3MixedLongitudinal,  ///< |delta omega|^2 delta u . n
};

std::string_view kind_name(SeriesKind k);
/// Inverse of kind_name; throws ValidationError for unknown names.
SeriesKind parse_kind(std::string_view name);
/// Kinds built from snapshots (everything except the two forcing kinds).
bool is_snapshot_kind(SeriesKind k);

/// Log-spaced separations plus an even set of unit directions on the circle.
struct SeparationGrid {
    std::vector<double> lengths;
    int n_dirs = 16;
    // scale markers (annotations only)
    double l_injection = 0.0;
    double l_viscous = 0.0;
    double l_drag = 0.0;

    SeparationGrid() = default;
    /// Strictly increasing positive lengths, n_dirs even and >= 8.
    SeparationGrid(std::vector<double> lengths, int n_dirs);

    /// n log-spaced lengths in [lmin, lmax] with lmin >= 2 min(dx1, dx2) and lmax <= (b - a)/4.
    static SeparationGrid log_spaced(const ChannelGrid& g, double lmin, double lmax, int n, int n_dirs);

    double max() const { return lengths.back(); }
    double angle(int i) const;

    bool operator==(const SeparationGrid& o) const { return lengths == o.lengths && n_dirs == o.n_dirs; }
};

struct DiagnosticSeries {
    SeriesKind kind = SeriesKind::GammaBar;
    SeparationGrid grid;
    std::vector<double> values;
    std::vector<double> std_error;
    std::int64_t n_samples = 0;
    double origin = 0.0;  ///< value at l = 0
    double origin_std_error = 0.0;
};

/// Off-lattice shifts x + l n: trigonometric (phase-shift) interpolation of
/// the correlation on the padded lattice, or bilinear interpolation between
/// the four neighbouring lattice lags.
enum class Interpolation { Trigonometric, Bilinear };
/// Where x ranges: all of T x R (normalised by |Omega|), or an interior
/// window of rows at least `interior_margin` from either wall (normalised by
/// the window area).
enum class Region { Extended, Interior };

struct StatisticsOptions {
    Interpolation interp = Interpolation::Trigonometric;
    Region region = Region::Extended;
    int pad_factor = 2;
    int n_blocks = 10;              ///< batch-means blocks for std_error
    double beta = 0.0;              ///< enters CThetaBar and FrakQBar
    double interior_margin = -1.0;  ///< < 0: max(l) + dx2
};

/// Velocity and vorticity samples of one snapshot.
struct SnapshotFields {
    PhysicalField u1, u2, w;
};
SnapshotFields snapshot_fields(const SpectralField& omega);

/// Streams snapshots into per-block lattice cross-spectra and evaluates the
/// requested kinds once per block. Snapshots are assigned to blocks in arrival
/// order using `expected_snapshots`.
class SeriesAccumulator {
public:
    SeriesAccumulator(const ChannelGrid& g, SeparationGrid sep, std::vector<SeriesKind> kinds,
                      StatisticsOptions opts, std::int64_t expected_snapshots);
    ~SeriesAccumulator();
    SeriesAccumulator(const SeriesAccumulator&) = delete;
    SeriesAccumulator& operator=(const SeriesAccumulator&) = delete;

    void add(const SpectralField& omega);
    void add(const SnapshotFields& f);
    std::int64_t count() const;
    /// One series per requested kind, in request order.
    std::vector<DiagnosticSeries> finish();

private:
    struct Impl;
    Impl* impl_;
};

/// Spherical average of a two-point correlation kind. The forcing kinds
/// (ABar, FrakABar) need `basis`; the others need at least one snapshot.
DiagnosticSeries two_point_spherical(SeriesKind kind, const std::vector<SpectralField>& snapshots,
                                     const SeparationGrid& sep, const StatisticsOptions& opts,
                                     const ForcingBasis* basis = nullptr);

/// Spherical average of a cubic structure-function kind.
DiagnosticSeries structure_function_spherical(SeriesKind kind, const std::vector<SpectralField>& snapshots,
                                              const SeparationGrid& sep, const StatisticsOptions& opts);

/// ABar or FrakABar straight from the forcing basis.
DiagnosticSeries forcing_series(SeriesKind kind, const ForcingBasis& basis, const SeparationGrid& sep,
                                Continuation c = Continuation::ZeroExtension);

/// Integrand of `kind` for one snapshot at the single separation y = l n,
/// before any direction average (the fast path the oracle checks).
double directional_statistic(SeriesKind kind, const SnapshotFields& f, double l, double n1, double n2,
                             const StatisticsOptions& opts);

/// Area-normalised zero-extended correlation (1/|Omega|) int A(x) B(x+y) dx on
/// the padded lattice.
double lattice_correlation(const PhysicalField& a, const PhysicalField& b, double y1, double y2,
                           Interpolation interp, int pad_factor = 2);

/// Stationary balance check.
struct BalanceReport {
    double eps_lhs = 0.0, eps_lhs_std_error = 0.0, eps_target = 0.0, eps_residual = 0.0;
    double eta_lhs = 0.0, eta_lhs_std_error = 0.0, eta_target = 0.0, eta_residual = 0.0;
    std::int64_t n_samples = 0;
};
/// Residuals are (lhs - target)/target, or lhs - target when the target is 0.
BalanceReport balance_residuals(const std::vector<NormSample>& post_spinup, const ForcingBasis& basis,
                                const PhysicsParams& params, int n_blocks = 10);

struct CascadeFit {
    double prefactor = 0.0;
    double exponent = 0.0;
    double exponent_std_error = 0.0;
    double prefactor_std_error = 0.0;
    int sign = 0;
    int points = 0;
};
/// Least-squares slope of log|value| against log l on [l_lo, l_hi], and the
/// compensated mean of value / l^nominal (nominal < 0: rounded fitted slope).
CascadeFit cascade_fit(const DiagnosticSeries& s, double l_lo, double l_hi, double nominal_exponent = -1.0);

struct EnergySpectrum {
    std::vector<double> kappa;  ///< shell centres 0, 1, 2, ...
    std::vector<double> energy;
    std::vector<double> std_error;
    std::int64_t n_samples = 0;
};
/// Unit-width shells [n - 1/2, n + 1/2); energy per unit area, so the shells
/// sum to (1/2)(1/|Omega|)||u||^2.
EnergySpectrum energy_spectrum(const std::vector<SpectralField>& snapshots);
/// Shell energies of one snapshot (index n holds shell n).
std::vector<double> shell_energy(const SpectralField& omega);

/// Blocked batch-means mean and standard error.
std::pair<double, double> batch_mean(const std::vector<double>& x, int n_blocks = 10);

}  // namespace bkhm
