#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "bkhm/field.hpp"
#include "bkhm/forcing.hpp"

namespace bkhm {

struct PhysicsParams {
    double nu = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double f0 = 0.0;  ///< carried for output only; drops out of the vorticity equation

    void validate() const;
    bool operator==(const PhysicsParams&) const = default;
};

struct FlowState {
    SpectralField omega;
    double t = 0.0;
    std::int64_t step_index = 0;

    explicit FlowState(const ChannelGrid& g) : omega(g, Parity::Sine) {}
    FlowState(SpectralField w, double t_, std::int64_t step) : omega(std::move(w)), t(t_), step_index(step) {}
};

/// -(u . grad) omega, 2/3-rule dealiased.
SpectralField nonlinear_term(const SpectralField& w);

/// -beta u2.
SpectralField beta_term(const SpectralField& w, double beta);

/// Largest |u| over the interior nodes.
double max_speed(const SpectralField& w);

/// One Heun step with exact integrating factor and additive noise.
/// Throws CflError when dt * max|u| / min(dx1, dx2) > 0.5.
std::pair<FlowState, RngState> step(const FlowState& state, double dt, const PhysicsParams& params,
                                    const ForcingBasis& basis, RngState rng);

/// Squared L2 norms of the state, from the coefficients alone.
struct NormSample {
    double t = 0.0;
    double energy = 0.0;        ///< ||u||^2
    double enstrophy = 0.0;     ///< ||omega||^2, also ||grad u||^2
    double palinstrophy = 0.0;  ///< ||grad omega||^2
};
NormSample spectral_norms(const FlowState& s);

struct SpinupCriterion {
    double window = 0.0;       ///< trailing window (time units) for the running-mean test
    double tolerance = 0.01;   ///< relative change allowed over the window
    std::int64_t max_steps = 1000000;
    double sample_time = 0.0;  ///< how long to sample after spin-up
    std::int64_t snapshot_stride = 1;  ///< steps between emitted snapshots
};

/// Eddy-turnover time eta^{-1/3} with per-area eta.
double eddy_turnover_time(const ForcingBasis& basis);

struct RunSummary {
    FlowState final_state;
    RngState rng;
    double spinup_time = 0.0;
    std::int64_t spinup_steps = 0;
    std::int64_t snapshots = 0;
    std::vector<NormSample> norms;  ///< one entry per step, from step 0
};

using SnapshotSink = std::function<void(const FlowState&)>;

/// Spin up until the running time-average of ||u||^2 settles, then emit
/// snapshots every `snapshot_stride` steps for `sample_time`.
RunSummary run_to_stationarity(FlowState initial, const PhysicsParams& params, const ForcingBasis& basis,
                               RngState rng, double dt, const SpinupCriterion& crit, const SnapshotSink& sink);

/// Seeded random vorticity confined to |k|, m <= kmax, scaled to the given energy ||u||^2.
SpectralField random_low_mode_vorticity(const ChannelGrid& g, int kmax, double energy, std::uint64_t seed);

}  // namespace bkhm
