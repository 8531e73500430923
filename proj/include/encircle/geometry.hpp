#pragma once

#include <Eigen/Dense>

#include "encircle/errors.hpp"

namespace encircle {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Radii below this are treated as "robot on the cylinder axis" and raise
// SingularRadius instead of being regularized, so faults stay visible.
inline constexpr double kSingularRadius = 1e-9;

// Cylindrical coordinates of a robot in the target frame. `phi` is stored
// unwrapped by the callers that track it over time; fresh conversions report
// it in [0, 2*pi).
struct CylCoords {
    double rho{0.0};
    double phi{0.0};
    double z{0.0};
};

// Rates (rho_dot, phi_dot, z_dot) commanded in cylindrical coordinates.
struct CylRates {
    double rho_dot{0.0};
    double phi_dot{0.0};
    double z_dot{0.0};
};

// Snapshot of the target frame kinematics needed by the feedback transform.
// R_dot is carried explicitly so that estimated frames (whose entries are
// tracked as independent scalars) can be used interchangeably with the true
// scenario frame.
struct FrameKinematics {
    Vec3 position{Vec3::Zero()};
    Vec3 velocity{Vec3::Zero()};
    Mat3 rotation{Mat3::Identity()};
    Mat3 rotation_rate{Mat3::Zero()};
};

// The moving target frame used by scenarios: position/velocity of the target
// point plus the encirclement-plane rotation and its world-frame angular
// velocity. R_dot is derived from omega (R_dot = skew(omega) * R), never
// stored, so the pair cannot drift apart.
struct TargetFrame {
    Vec3 position{Vec3::Zero()};
    Vec3 velocity{Vec3::Zero()};
    Mat3 rotation{Mat3::Identity()};
    Vec3 omega{Vec3::Zero()};

    FrameKinematics kinematics() const;
};

Mat3 skew(const Vec3& w);

// Gram-Schmidt projection onto the nearest well-conditioned rotation. Falls
// back to identity if the columns are too degenerate to orthonormalize.
Mat3 orthonormalized(const Mat3& m);

bool is_rotation(const Mat3& m, double tol = 1e-9);

// Cylindrical coordinates of the relative vector R^T (p - p_T). phi is
// reported in [0, 2*pi). Throws SingularRadius on the axis.
CylCoords to_cylindrical(const Vec3& p, const FrameKinematics& frame);
CylCoords to_cylindrical(const Vec3& p, const TargetFrame& frame);

// Inverse map: target-frame relative position, then world position.
Vec3 from_cylindrical(const CylCoords& q);
Vec3 from_cylindrical(const CylCoords& q, const FrameKinematics& frame);

// Jacobian of (rho, phi, z) w.r.t. the target-frame relative position.
Mat3 jacobian(const Vec3& p_rel);

// Closed-form inverse of the Jacobian evaluated at q.
Mat3 jacobian_inverse(const CylCoords& q);

// Feedback transform: the Cartesian velocity command that realizes the
// cylindrical rates v at the current position, given the frame motion.
Vec3 cartesian_command(const Vec3& p, const FrameKinematics& frame, const CylRates& v);
Vec3 cartesian_command(const Vec3& p, const TargetFrame& frame, const CylRates& v);

// Advance the frame by dt assuming piecewise-constant velocity and angular
// velocity: exact translation plus Rodrigues rotation update, followed by
// re-orthonormalization.
TargetFrame advance_frame(const TargetFrame& frame, double dt);

}  // namespace encircle
