#pragma once

#include <limits>
#include <map>
#include <vector>

#include "encircle/geometry.hpp"
#include "encircle/network.hpp"

namespace encircle {

// Index layout of the tracked scalar components of the target frame:
// [0..2] p_T, [3..5] v_T, [6..14] R_T (row major), [15..23] R_dot_T.
inline constexpr std::size_t kTrackedCount = 24;

using TrackedValues = std::array<double, kTrackedCount>;

TrackedValues tracked_from_frame(const TargetFrame& frame);
TrackedValues tracked_rates_from_frame(const TargetFrame& frame);

// Reassemble a frame snapshot from tracked scalars. The rotation estimate is
// projected onto the nearest rotation (Gram-Schmidt); the rate matrix is used
// raw.
FrameKinematics frame_from_tracked(const TrackedValues& values);

// One robot's consensus-tracking estimator for all tracked scalars. The
// informed robot feeds in the true value and derivative; everyone else
// averages neighbor estimates and their reported rates.
class TrackingEstimator {
public:
    TrackingEstimator(bool informed, const TrackedValues& initial);

    // Informed update. `truth`/`truth_rate` are the values at the step start.
    void step_informed(const TrackedValues& truth, const TrackedValues& truth_rate, double k_eta,
                       double dt);

    // Uninformed update from the freshest neighbor packets (values + rates).
    void step_from_neighbors(const std::vector<const EstimatePacket*>& packets, double k_eta,
                             double dt);

    bool informed() const { return informed_; }
    const TrackedValues& values() const { return values_; }
    const TrackedValues& rates() const { return rates_; }
    EstimatePacket packet() const;
    FrameKinematics frame() const { return frame_from_tracked(values_); }

private:
    bool informed_;
    TrackedValues values_;
    TrackedValues rates_;  // backward differences, shipped to neighbors
};

// Finite-time extremum consensus with periodic reset: every robot floods the
// extremum of its neighborhood and resets to its local value every m ticks.
enum class ExtremumDirection { kMax, kMin };

class ExtremumConsensus {
public:
    ExtremumConsensus(int reset_period_m, ExtremumDirection direction, double initial_local);

    // Advance one tick. `neighbor_gammas` are the neighbors' previous-tick
    // values; `local` is this robot's current local quantity.
    void step(long tick, double local, const std::vector<double>& neighbor_gammas);

    double gamma() const { return gamma_; }

    // Agreed value frozen at the last tick that was a multiple of m, or
    // nullopt while tick < m.
    bool has_agreement() const { return has_agreement_; }
    double agreed() const { return agreed_; }

private:
    int m_;
    ExtremumDirection direction_;
    double gamma_;
    bool has_agreement_{false};
    double agreed_{0.0};
};

// sigma_hat from the agreed minimum consecutive phase difference: +inf until
// the first agreement (tick < m), then r / |sin(delta_agreed / 2)|.
double sigma_hat_from_agreement(const ExtremumConsensus& consensus, double r);

}  // namespace encircle
