#include "encircle/safety.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "encircle/phase.hpp"

namespace encircle {

PairDistances inter_distance(const CylCoords& qi, const CylCoords& qj) {
    const double dphi = qj.phi - qi.phi;
    const double planar2 = qi.rho * qi.rho + qj.rho * qj.rho - 2.0 * qi.rho * qj.rho * std::cos(dphi);
    const double dz = qj.z - qi.z;
    PairDistances d;
    d.planar = std::sqrt(std::max(planar2, 0.0));
    d.full = std::sqrt(std::max(planar2 + dz * dz, 0.0));
    d.chord = 2.0 * std::min(qi.rho, qj.rho) * std::abs(std::sin(0.5 * wrap_to_pi(dphi)));
    return d;
}

SeparationFlags separation_predicates(const CylCoords& qi, const CylCoords& qj, double r) {
    SeparationFlags flags;
    flags.radial = std::abs(qi.rho - qj.rho) > 2.0 * r;
    const double s = std::abs(std::sin(0.5 * wrap_to_pi(qj.phi - qi.phi)));
    flags.phase = s > 0.0 && std::min(qi.rho, qj.rho) > r / s;
    return flags;
}

double sigma_bound(double delta_min, double r) {
    if (delta_min <= 0.0) throw DegenerateDelta(delta_min);
    return r / std::abs(std::sin(0.5 * delta_min));
}

CollisionAudit collision_audit(const std::vector<std::vector<Vec3>>& positions,
                               const std::vector<std::vector<int>>& ids, double r) {
    CollisionAudit audit;
    audit.min_distance = std::numeric_limits<double>::infinity();
    const double threshold = 2.0 * r;
    for (std::size_t k = 0; k < positions.size(); ++k) {
        const auto& ps = positions[k];
        for (std::size_t a = 0; a < ps.size(); ++a) {
            for (std::size_t b = a + 1; b < ps.size(); ++b) {
                const double d = (ps[a] - ps[b]).norm();
                if (d < audit.min_distance) {
                    audit.min_distance = d;
                    audit.min_tick = static_cast<long>(k);
                    audit.min_robot_i = ids[k][a];
                    audit.min_robot_j = ids[k][b];
                }
                if (d <= threshold)
                    audit.violations.push_back(
                        {static_cast<long>(k), ids[k][a], ids[k][b], d});
            }
        }
    }
    return audit;  // min_distance stays +inf when there are no pairs
}

}  // namespace encircle
