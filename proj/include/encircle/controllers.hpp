#pragma once

#include <limits>
#include <variant>

#include "encircle/geometry.hpp"
#include "encircle/phase.hpp"

namespace encircle {

struct GainSet {
    double k_rho{1.0};
    double k_z{1.5};
    double k_phi{2.0};
    double k_omega{3.0};  // angular-speed consensus only
    double k_eta{20.0};   // estimator

    void validate() const;
};

enum class LambdaShape { kLinear, kSinusoidal };

struct SafetyParams {
    double radius{0.25};  // safety radius r; collision means D_ij <= 2r
    double eps_r{0.1};    // width of the lambda ramp
    LambdaShape lambda_shape{LambdaShape::kSinusoidal};

    void validate() const;
};

// Phase-law selection. V3 carries the per-robot forcing term; its integrator
// state omega_i lives in PhaseState (one per robot, starts at 0).
struct ModeV1 {
    double omega_star{0.0};
};
struct ModeV2 {
    double escape_window{1.0};
};
struct ModeV3 {
    double xi{0.0};
};
struct ModeV1Star {
    double omega_star{0.0};
    SafetyParams safety;
};
using ControllerMode = std::variant<ModeV1, ModeV2, ModeV3, ModeV1Star>;

struct PhaseState {
    double omega{0.0};
};

double radial_law(double rho, double rho_star, double k_rho);

double height_law(double z, double k_z);

double phase_law_v1(const RingView& view, double omega_star, double k_phi);

// Throws InvalidWindow when s <= 0. The feedforward Delta/s embeds the local
// robot-count estimate n_hat = 2*pi / Delta.
double phase_law_v2(const RingView& view, double s, double k_phi);

// Integrates omega by explicit Euler at the control rate, then emits the
// phase rate. Returns the commanded rate; `state` is updated in place.
double phase_law_v3(const RingView& view, PhaseState& state, double xi, double k_phi,
                    double k_omega, double dt);

// Gate in [0, 1] that blocks radial motion while rho is within sigma + 2r.
double lambda_gate(double rho, double sigma, const SafetyParams& safety);

// Radial law gated by the (estimated) safety bound. sigma_hat = +inf is the
// pre-agreement sentinel and freezes the radius.
double radial_law_safe(double rho, double rho_star, double k_rho, double sigma_hat,
                       const SafetyParams& safety);

// One robot's control tick: cylindrical rates from the selected laws, then
// the Cartesian command through the feedback transform. sigma_hat is only
// read in V1Star mode.
struct ControlResult {
    CylRates v;
    Vec3 u{Vec3::Zero()};
};

ControlResult control_step(const Vec3& position, const FrameKinematics& frame,
                           const RingView& view, const ControllerMode& mode, PhaseState& state,
                           const GainSet& gains, double rho_star, double dt,
                           double sigma_hat = std::numeric_limits<double>::infinity());

}  // namespace encircle
