#include "encircle/geometry.hpp"

#include <cmath>

namespace encircle {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
}

Mat3 skew(const Vec3& w) {
    Mat3 s;
    s << 0.0, -w.z(), w.y(),
         w.z(), 0.0, -w.x(),
        -w.y(), w.x(), 0.0;
    return s;
}

Mat3 orthonormalized(const Mat3& m) {
    Vec3 c0 = m.col(0);
    if (c0.norm() < 1e-12) return Mat3::Identity();
    c0.normalize();
    Vec3 c1 = m.col(1) - c0.dot(m.col(1)) * c0;
    if (c1.norm() < 1e-12) return Mat3::Identity();
    c1.normalize();
    const Vec3 c2 = c0.cross(c1);
    Mat3 out;
    out.col(0) = c0;
    out.col(1) = c1;
    out.col(2) = c2;
    return out;
}

bool is_rotation(const Mat3& m, double tol) {
    const Mat3 gram = m.transpose() * m;
    return (gram - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol
        && std::abs(m.determinant() - 1.0) <= tol;
}

FrameKinematics TargetFrame::kinematics() const {
    FrameKinematics f;
    f.position = position;
    f.velocity = velocity;
    f.rotation = rotation;
    f.rotation_rate = skew(omega) * rotation;
    return f;
}

CylCoords to_cylindrical(const Vec3& p, const FrameKinematics& frame) {
    const Vec3 rel = frame.rotation.transpose() * (p - frame.position);
    const double rho = std::hypot(rel.x(), rel.y());
    if (rho < kSingularRadius) throw SingularRadius(rho);
    double phi = std::atan2(rel.y(), rel.x());
    if (phi < 0.0) phi += kTwoPi;
    return {rho, phi, rel.z()};
}

CylCoords to_cylindrical(const Vec3& p, const TargetFrame& frame) {
    return to_cylindrical(p, frame.kinematics());
}

Vec3 from_cylindrical(const CylCoords& q) {
    return {q.rho * std::cos(q.phi), q.rho * std::sin(q.phi), q.z};
}

Vec3 from_cylindrical(const CylCoords& q, const FrameKinematics& frame) {
    return frame.position + frame.rotation * from_cylindrical(q);
}

Mat3 jacobian(const Vec3& p_rel) {
    const double rho = std::hypot(p_rel.x(), p_rel.y());
    if (rho < kSingularRadius) throw SingularRadius(rho);
    const double rho2 = rho * rho;
    Mat3 j;
    j << p_rel.x() / rho, p_rel.y() / rho, 0.0,
        -p_rel.y() / rho2, p_rel.x() / rho2, 0.0,
         0.0, 0.0, 1.0;
    return j;
}

Mat3 jacobian_inverse(const CylCoords& q) {
    if (q.rho < kSingularRadius) throw SingularRadius(q.rho);
    const double c = std::cos(q.phi);
    const double s = std::sin(q.phi);
    Mat3 j;
    j << c, -q.rho * s, 0.0,
         s, q.rho * c, 0.0,
         0.0, 0.0, 1.0;
    return j;
}

Vec3 cartesian_command(const Vec3& p, const FrameKinematics& frame, const CylRates& v) {
    const CylCoords q = to_cylindrical(p, frame);
    const Vec3 vq(v.rho_dot, v.phi_dot, v.z_dot);
    const Vec3 rel = p - frame.position;
    return frame.velocity
         + frame.rotation * (jacobian_inverse(q) * vq - frame.rotation_rate.transpose() * rel);
}

Vec3 cartesian_command(const Vec3& p, const TargetFrame& frame, const CylRates& v) {
    return cartesian_command(p, frame.kinematics(), v);
}

TargetFrame advance_frame(const TargetFrame& frame, double dt) {
    TargetFrame out = frame;
    out.position += frame.velocity * dt;
    const double angle = frame.omega.norm() * dt;
    if (angle > 0.0) {
        const Vec3 axis = frame.omega.normalized();
        const Mat3 k = skew(axis);
        const Mat3 rot = Mat3::Identity() + std::sin(angle) * k + (1.0 - std::cos(angle)) * k * k;
        out.rotation = orthonormalized(rot * frame.rotation);
    }
    return out;
}

}  // namespace encircle
