#pragma once

#include <string>
#include <vector>

#include "encircle/controllers.hpp"
#include "encircle/geometry.hpp"

namespace encircle {

// Per-robot snapshot at one control tick. Cylindrical quantities are taken
// in the true target frame (ground truth for verification); the control
// fields (v, phase_error, sigma_hat) are what the robot itself computed from
// local information.
struct RobotSample {
    int id{0};
    Vec3 position{Vec3::Zero()};
    Vec3 command{Vec3::Zero()};  // Cartesian u
    double rho{0.0};
    double phi{0.0};  // unwrapped true phase
    double z{0.0};
    CylRates v;
    double phase_error{0.0};
    double omega_state{0.0};
    double sigma_hat{0.0};
    double estimate_error{0.0};  // max |eta_hat - eta| over tracked scalars
};

struct TickSample {
    long tick{0};
    double t{0.0};
    std::vector<RobotSample> robots;  // in ring order
    std::vector<double> delta;        // consecutive true phase differences, ring order
    double delta_min{0.0};
    double min_pair_distance{0.0};
    long messages_sent{0};      // this tick
    long messages_received{0};  // this tick
    std::vector<double> estimate_error_per_quantity;  // max over robots, 24 entries
};

struct MessageTraceRow {
    long tick{0};
    int src{0};
    int dst{0};
    std::string type;
    int hops{0};
};

struct SimLog {
    std::string scenario_name;
    double control_period{0.0};
    double dt{0.0};
    int n_initial{0};
    std::vector<TickSample> ticks;
    std::vector<MessageTraceRow> message_trace;
    // Per-robot cumulative message counts at the end of the run.
    std::vector<std::pair<int, long>> sent_totals;
    std::vector<std::pair<int, long>> received_totals;
};

// CSV emission; one file per table, fixed column schema (see README).
void write_states_csv(const SimLog& log, const std::string& path);
void write_errors_csv(const SimLog& log, const std::string& path, double rho_star,
                      double omega_target);
void write_distances_csv(const SimLog& log, const std::string& path);
void write_messages_csv(const SimLog& log, const std::string& path);
void write_estimates_csv(const SimLog& log, const std::string& path);
void write_message_trace_csv(const SimLog& log, const std::string& path);

}  // namespace encircle
