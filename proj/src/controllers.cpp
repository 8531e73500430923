#include "encircle/controllers.hpp"

#include <cmath>

namespace encircle {

void GainSet::validate() const {
    if (k_rho <= 0.0 || k_z <= 0.0 || k_phi <= 0.0 || k_omega <= 0.0 || k_eta <= 0.0)
        throw ConfigError("all gains must be strictly positive");
}

void SafetyParams::validate() const {
    if (radius <= 0.0) throw ConfigError("safety radius must be positive");
    if (eps_r <= 0.0) throw ConfigError("eps_r must be positive");
}

double radial_law(double rho, double rho_star, double k_rho) {
    return k_rho * (rho_star - rho);
}

double height_law(double z, double k_z) {
    return -k_z * z;
}

double phase_law_v1(const RingView& view, double omega_star, double k_phi) {
    return omega_star + k_phi * phase_error(view.phi_bar, view.phi_self);
}

double phase_law_v2(const RingView& view, double s, double k_phi) {
    if (s <= 0.0) throw InvalidWindow(s);
    return view.delta_half / s + k_phi * phase_error(view.phi_bar, view.phi_self);
}

double phase_law_v3(const RingView& view, PhaseState& state, double xi, double k_phi,
                    double k_omega, double dt) {
    const double e = phase_error(view.phi_bar, view.phi_self);
    state.omega += k_omega * e * dt;
    return state.omega + k_phi * e + xi;
}

double lambda_gate(double rho, double sigma, const SafetyParams& safety) {
    const double inner = sigma + 2.0 * safety.radius;
    if (rho < inner) return 0.0;  // also covers the sigma = +inf sentinel
    if (rho > inner + safety.eps_r) return 1.0;
    const double x = (rho - inner) / safety.eps_r;
    return safety.lambda_shape == LambdaShape::kLinear ? x : 0.5 * (1.0 - std::cos(M_PI * x));
}

double radial_law_safe(double rho, double rho_star, double k_rho, double sigma_hat,
                       const SafetyParams& safety) {
    return lambda_gate(rho, sigma_hat, safety) * k_rho * (rho_star - rho);
}

ControlResult control_step(const Vec3& position, const FrameKinematics& frame,
                           const RingView& view, const ControllerMode& mode, PhaseState& state,
                           const GainSet& gains, double rho_star, double dt, double sigma_hat) {
    const CylCoords q_wrapped = to_cylindrical(position, frame);
    const double rho = q_wrapped.rho;
    const double z = q_wrapped.z;

    ControlResult out;
    out.v.z_dot = height_law(z, gains.k_z);
    out.v.rho_dot = std::visit(
        [&](const auto& m) -> double {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, ModeV1Star>)
                return radial_law_safe(rho, rho_star, gains.k_rho, sigma_hat, m.safety);
            else
                return radial_law(rho, rho_star, gains.k_rho);
        },
        mode);
    out.v.phi_dot = std::visit(
        [&](const auto& m) -> double {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, ModeV1>)
                return phase_law_v1(view, m.omega_star, gains.k_phi);
            else if constexpr (std::is_same_v<M, ModeV1Star>)
                return phase_law_v1(view, m.omega_star, gains.k_phi);
            else if constexpr (std::is_same_v<M, ModeV2>)
                return phase_law_v2(view, m.escape_window, gains.k_phi);
            else
                return phase_law_v3(view, state, m.xi, gains.k_phi, gains.k_omega, dt);
        },
        mode);
    out.u = cartesian_command(position, frame, out.v);
    return out;
}

}  // namespace encircle
