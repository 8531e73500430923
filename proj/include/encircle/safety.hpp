#pragma once

#include <vector>

#include "encircle/geometry.hpp"

namespace encircle {

// The three distance measures of a robot pair in cylindrical coordinates:
// full 3D inter-distance, its in-plane projection, and the chord bound
// d_tilde = 2 * min(rho_i, rho_j) * |sin((phi_j - phi_i) / 2)|.
struct PairDistances {
    double full{0.0};      // D_ij
    double planar{0.0};    // d_ij
    double chord{0.0};     // d_tilde_ij
};

PairDistances inter_distance(const CylCoords& qi, const CylCoords& qj);

struct SeparationFlags {
    bool radial{false};
    bool phase{false};
};

// Sufficient pairwise no-collision predicates: radial iff |rho_i - rho_j| > 2r,
// phase iff min(rho_i, rho_j) > r / |sin((phi_j - phi_i) / 2)|.
SeparationFlags separation_predicates(const CylCoords& qi, const CylCoords& qj, double r);

// Safety bound sigma = r / |sin(delta_min / 2)|. Throws DegenerateDelta for
// delta_min <= 0.
double sigma_bound(double delta_min, double r);

struct CollisionEvent {
    long tick{0};
    int robot_i{0};
    int robot_j{0};
    double distance{0.0};
};

// Offline audit of a position history: minimum pairwise distance over the
// whole run and every (tick, pair) with D_ij <= 2r. `positions[k]` holds the
// Cartesian positions of all robots at tick k; `ids[k]` the matching ids.
struct CollisionAudit {
    double min_distance{0.0};
    long min_tick{0};
    int min_robot_i{0};
    int min_robot_j{0};
    std::vector<CollisionEvent> violations;
};

CollisionAudit collision_audit(const std::vector<std::vector<Vec3>>& positions,
                               const std::vector<std::vector<int>>& ids, double r);

}  // namespace encircle
