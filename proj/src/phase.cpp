#include "encircle/phase.hpp"

#include <algorithm>
#include <cmath>

namespace encircle {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
}

double wrap_to_pi(double angle) {
    double a = std::fmod(angle, kTwoPi);
    if (a > M_PI) a -= kTwoPi;
    if (a <= -M_PI) a += kTwoPi;
    return a;
}

double wrap_to_two_pi(double angle) {
    double a = std::fmod(angle, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    return a;
}

double unwrap_step(double prev_unwrapped, double new_wrapped) {
    return prev_unwrapped + wrap_to_pi(new_wrapped - wrap_to_two_pi(prev_unwrapped));
}

RingView ring_view(bool first, bool last, double phi_pred, double phi_self, double phi_succ) {
    RingView v;
    v.phi_self = phi_self;
    v.phi_pred = first ? phi_pred - kTwoPi : phi_pred;
    v.phi_succ = last ? phi_succ + kTwoPi : phi_succ;
    v.phi_bar = 0.5 * (v.phi_succ + v.phi_pred);
    v.delta_half = 0.5 * (v.phi_succ - v.phi_pred);
    v.delta = v.phi_self - v.phi_pred;
    return v;
}

double phase_error(double phi_bar, double phi) {
    return phi_bar - phi;
}

RingOrder RingOrder::from_initial_phases(const std::vector<std::pair<int, double>>& phases) {
    if (phases.size() < 2) throw TooFewRobots(static_cast<int>(phases.size()));
    std::vector<std::pair<int, double>> sorted = phases;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second < b.second;
        return a.first < b.first;
    });
    RingOrder order;
    order.ids_.reserve(sorted.size());
    for (const auto& [id, phi] : sorted) order.ids_.push_back(id);
    return order;
}

std::size_t RingOrder::position_of(int id) const {
    const auto it = std::find(ids_.begin(), ids_.end(), id);
    if (it == ids_.end()) throw Error("robot " + std::to_string(id) + " is not in the ring");
    return static_cast<std::size_t>(it - ids_.begin());
}

bool RingOrder::contains(int id) const {
    return std::find(ids_.begin(), ids_.end(), id) != ids_.end();
}

int RingOrder::predecessor_of(int id) const {
    const std::size_t pos = position_of(id);
    return ids_[(pos + ids_.size() - 1) % ids_.size()];
}

int RingOrder::successor_of(int id) const {
    const std::size_t pos = position_of(id);
    return ids_[(pos + 1) % ids_.size()];
}

void RingOrder::remove(int id) {
    const std::size_t pos = position_of(id);
    ids_.erase(ids_.begin() + static_cast<std::ptrdiff_t>(pos));
    if (ids_.size() < 2) throw TooFewRobots(static_cast<int>(ids_.size()));
}

void RingOrder::insert_after(int after_id, int id) {
    if (contains(id)) throw Error("robot " + std::to_string(id) + " is already in the ring");
    const std::size_t pos = position_of(after_id);
    ids_.insert(ids_.begin() + static_cast<std::ptrdiff_t>(pos) + 1, id);
}

}  // namespace encircle
