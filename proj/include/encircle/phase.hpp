#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "encircle/errors.hpp"

namespace encircle {

// Per-step unwrapping: extend the continuous phase by the representative of
// (new_wrapped - old) in (-pi, pi]. Control laws need wrap-free differences.
double unwrap_step(double prev_unwrapped, double new_wrapped);

// Reduce an angle difference to (-pi, pi].
double wrap_to_pi(double angle);

// Reduce an angle to [0, 2*pi).
double wrap_to_two_pi(double angle);

// Local knowledge of the ring neighborhood of one robot, with the derived
// quantities used by every phase controller. Phases are unwrapped; the ring
// seam corrections (+-2*pi at the first/last index) are already applied.
struct RingView {
    double phi_self{0.0};
    double phi_pred{0.0};  // seam-corrected
    double phi_succ{0.0};  // seam-corrected
    double phi_bar{0.0};   // (phi_succ + phi_pred) / 2
    double delta_half{0.0};  // (phi_succ - phi_pred) / 2
    double delta{0.0};       // phi_self - phi_pred
};

// Build the view for a robot given its position in the ring ordering.
// `first` marks ring index 1 (its predecessor phase gets -2*pi), `last`
// marks ring index n (its successor phase gets +2*pi). For n = 2 a robot is
// both, and the predecessor and successor are the same robot.
RingView ring_view(bool first, bool last, double phi_pred, double phi_self, double phi_succ);

double phase_error(double phi_bar, double phi);

// Cyclic ordering of robot ids fixed by the phases at t0. Ids keep their
// ring position for the whole run; churn inserts/removes entries but never
// reorders the survivors.
class RingOrder {
public:
    // Sorts by increasing initial phase, ties broken by ascending id.
    static RingOrder from_initial_phases(const std::vector<std::pair<int, double>>& phases);

    std::size_t size() const { return ids_.size(); }
    const std::vector<int>& ids() const { return ids_; }

    std::size_t position_of(int id) const;
    bool contains(int id) const;
    bool is_first(int id) const { return position_of(id) == 0; }
    bool is_last(int id) const { return position_of(id) == ids_.size() - 1; }

    int predecessor_of(int id) const;
    int successor_of(int id) const;

    void remove(int id);
    // Insert `id` so that it becomes the successor of `after_id`.
    void insert_after(int after_id, int id);

private:
    std::vector<int> ids_;  // ring positions 1..n in order
};

}  // namespace encircle
