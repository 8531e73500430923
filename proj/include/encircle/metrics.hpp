#pragma once

#include <limits>

#include "encircle/scenario.hpp"
#include "encircle/simlog.hpp"

namespace encircle {

// Run-level verification quantities distilled from a log.
struct RunMetrics {
    // Values at the final tick, max over robots.
    double final_rho_error{0.0};
    double final_phase_error{0.0};
    double final_phi_rate_error{0.0};
    double final_height_error{0.0};

    // Least-squares exponential decay rates over the tail window (last half
    // of the samples whose error exceeds 1e-8). Invalid when the window is
    // too small to fit.
    double fitted_phase_rate{std::numeric_limits<double>::quiet_NaN()};
    double fitted_rho_rate{std::numeric_limits<double>::quiet_NaN()};
    double fitted_height_rate{std::numeric_limits<double>::quiet_NaN()};
    bool phase_rate_valid{false};
    bool rho_rate_valid{false};
    bool height_rate_valid{false};

    // Mean interval between consecutive ray crossings over the last half of
    // the run; NaN when fewer than two crossings happened.
    double escape_window{std::numeric_limits<double>::quiet_NaN()};

    double min_pair_distance{0.0};
    double final_delta_min{0.0};
    long delta_min_violations{0};   // per-step decreases beyond 1e-9
    double worst_delta_min_dip{0.0};

    // Safety-estimate audit (only meaningful when the scenario has a safety
    // block): positive deficit means sigma_hat dropped below sigma somewhere.
    double max_sigma_deficit{-std::numeric_limits<double>::infinity()};
    double final_sigma_gap{std::numeric_limits<double>::quiet_NaN()};

    double per_robot_rate_min{0.0};
    double per_robot_rate_max{0.0};
    double total_message_rate{0.0};

    double omega_target{0.0};
};

// The phase-rate target implied by the controller configuration: omega_star
// for v1/v1*, 2*pi/(n*s) for v2, the xi mean for v3.
double omega_target_for(const Scenario& scenario);

// Throws InsufficientData when the log is empty.
RunMetrics compute_metrics(const SimLog& log, const Scenario& scenario);

std::string summary_text(const RunMetrics& m, const SimLog& log, const Scenario& scenario);

}  // namespace encircle
