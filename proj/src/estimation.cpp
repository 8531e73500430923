#include "encircle/estimation.hpp"

#include <algorithm>
#include <cmath>

#include "encircle/safety.hpp"

namespace encircle {

TrackedValues tracked_from_frame(const TargetFrame& frame) {
    TrackedValues v{};
    for (int i = 0; i < 3; ++i) {
        v[static_cast<std::size_t>(i)] = frame.position[i];
        v[static_cast<std::size_t>(3 + i)] = frame.velocity[i];
    }
    const Mat3 r_dot = skew(frame.omega) * frame.rotation;
    for (int row = 0; row < 3; ++row)
        for (int col = 0; col < 3; ++col) {
            v[static_cast<std::size_t>(6 + 3 * row + col)] = frame.rotation(row, col);
            v[static_cast<std::size_t>(15 + 3 * row + col)] = r_dot(row, col);
        }
    return v;
}

TrackedValues tracked_rates_from_frame(const TargetFrame& frame) {
    TrackedValues v{};
    for (int i = 0; i < 3; ++i) {
        v[static_cast<std::size_t>(i)] = frame.velocity[i];
        v[static_cast<std::size_t>(3 + i)] = 0.0;  // piecewise-constant v_T
    }
    const Mat3 w = skew(frame.omega);
    const Mat3 r_dot = w * frame.rotation;
    const Mat3 r_ddot = w * r_dot;  // constant omega within a segment
    for (int row = 0; row < 3; ++row)
        for (int col = 0; col < 3; ++col) {
            v[static_cast<std::size_t>(6 + 3 * row + col)] = r_dot(row, col);
            v[static_cast<std::size_t>(15 + 3 * row + col)] = r_ddot(row, col);
        }
    return v;
}

FrameKinematics frame_from_tracked(const TrackedValues& values) {
    FrameKinematics f;
    for (int i = 0; i < 3; ++i) {
        f.position[i] = values[static_cast<std::size_t>(i)];
        f.velocity[i] = values[static_cast<std::size_t>(3 + i)];
    }
    Mat3 raw;
    for (int row = 0; row < 3; ++row)
        for (int col = 0; col < 3; ++col) {
            raw(row, col) = values[static_cast<std::size_t>(6 + 3 * row + col)];
            f.rotation_rate(row, col) = values[static_cast<std::size_t>(15 + 3 * row + col)];
        }
    f.rotation = orthonormalized(raw);
    return f;
}

TrackingEstimator::TrackingEstimator(bool informed, const TrackedValues& initial)
    : informed_(informed), values_(initial), rates_{} {}

void TrackingEstimator::step_informed(const TrackedValues& truth, const TrackedValues& truth_rate,
                                      double k_eta, double dt) {
    for (std::size_t i = 0; i < kTrackedCount; ++i) {
        const double prev = values_[i];
        values_[i] = prev + dt * (truth_rate[i] + k_eta * (truth[i] - prev));
        rates_[i] = (values_[i] - prev) / dt;
    }
}

void TrackingEstimator::step_from_neighbors(const std::vector<const EstimatePacket*>& packets,
                                            double k_eta, double dt) {
    if (packets.empty()) return;  // nothing heard yet; hold the current estimate
    const double inv = 1.0 / static_cast<double>(packets.size());
    for (std::size_t i = 0; i < kTrackedCount; ++i) {
        double ave_value = 0.0;
        double ave_rate = 0.0;
        for (const EstimatePacket* p : packets) {
            ave_value += p->values[i];
            ave_rate += p->rates[i];
        }
        ave_value *= inv;
        ave_rate *= inv;
        const double prev = values_[i];
        values_[i] = prev + dt * (ave_rate + k_eta * (ave_value - prev));
        rates_[i] = (values_[i] - prev) / dt;
    }
}

EstimatePacket TrackingEstimator::packet() const {
    EstimatePacket p;
    p.values.assign(values_.begin(), values_.end());
    p.rates.assign(rates_.begin(), rates_.end());
    return p;
}

ExtremumConsensus::ExtremumConsensus(int reset_period_m, ExtremumDirection direction,
                                     double initial_local)
    : m_(reset_period_m), direction_(direction), gamma_(initial_local) {
    if (reset_period_m < 1) throw ConfigError("extremum consensus reset period must be >= 1");
}

void ExtremumConsensus::step(long tick, double local, const std::vector<double>& neighbor_gammas) {
    if (tick % m_ == 1 % m_) {
        gamma_ = local;
    } else {
        for (double g : neighbor_gammas)
            gamma_ = direction_ == ExtremumDirection::kMax ? std::max(gamma_, g)
                                                           : std::min(gamma_, g);
    }
    if (tick >= m_ && tick % m_ == 0) {
        agreed_ = gamma_;
        has_agreement_ = true;
    }
}

double sigma_hat_from_agreement(const ExtremumConsensus& consensus, double r) {
    if (!consensus.has_agreement()) return std::numeric_limits<double>::infinity();
    return sigma_bound(consensus.agreed(), r);
}

}  // namespace encircle
