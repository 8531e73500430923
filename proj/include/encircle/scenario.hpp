#pragma once

#include <optional>
#include <string>
#include <vector>

#include "encircle/controllers.hpp"
#include "encircle/geometry.hpp"

namespace encircle {

enum class ControllerKind { kV1, kV2, kV3, kV1Star };
enum class TopologyKind { kRing, kLine, kCustom };

struct InitialConditions {
    // Either explicit cylindrical triplets (rho, phi, z) in the t0 frame, or
    // a seeded random shell.
    std::vector<CylCoords> explicit_positions;
    double rho_min{1.2};
    double rho_max{3.0};
    double z_span{0.5};
    // 0 = phases uniform in [0, 2*pi); > 0 = splay plus U(-x, x) jitter.
    double phase_perturbation{0.0};
};

struct TargetSegment {
    double duration{0.0};
    Vec3 velocity{Vec3::Zero()};
    Vec3 omega{Vec3::Zero()};
};

struct TargetMotion {
    Vec3 position{Vec3::Zero()};
    Vec3 plane_axis{0.0, 0.0, 1.0};  // Z_T direction at t0
    std::vector<TargetSegment> segments;

    // Frame state at the start (segments supply velocity/omega over time).
    TargetFrame initial_frame() const;
};

struct XiConfig {
    std::vector<double> values;  // explicit, or generated from the fields below
    double mean{0.8};
    double spread{0.1};
    unsigned seed{1};
};

struct ControllerConfig {
    ControllerKind kind{ControllerKind::kV1};
    double rho_star{2.0};
    double omega_star{0.8};
    double escape_window{0.78};
    XiConfig xi;
    GainSet gains;
};

struct TopologyConfig {
    TopologyKind kind{TopologyKind::kRing};
    // Custom schedules: epochs of edge lists over ring positions 1..n.
    struct Epoch {
        std::vector<std::pair<int, int>> edges;
        long ticks{1};
    };
    std::vector<Epoch> schedule;
    int staleness_ticks{2};
};

struct EstimatorConfig {
    int informed{1};  // robot id
    std::optional<double> k_eta;  // default: 10 * max(k_rho, k_phi, k_z)
    bool oracle_globals{false};
};

struct ChurnEvent {
    double time{0.0};
    bool add{false};  // false = remove
    int robot{0};     // remove: the id; add: ignored (next free id is used)
    CylCoords position;  // add: cylindrical in the current true frame
};

struct OutputConfig {
    bool message_trace{false};
    bool distances{true};
};

struct Scenario {
    std::string name{"scenario"};
    int n{2};
    unsigned seed{1};
    double duration{20.0};
    double dt{1e-3};
    double control_period{1e-2};
    int n_max{0};  // 0 = use n
    InitialConditions initial;
    TargetMotion target;
    ControllerConfig controller;
    std::optional<SafetyParams> safety;
    TopologyConfig topology;
    EstimatorConfig estimator;
    std::vector<ChurnEvent> churn;
    OutputConfig output;

    long control_ticks() const;
    int substeps_per_tick() const;
    double k_eta() const;
    int reset_period_m() const;
    void validate() const;
};

// Parse a scenario from JSON text / file. Unknown keys are rejected with the
// offending path in the message.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario_file(const std::string& path);

// Apply a dotted-path override such as "controller.omega_star=1.2". The value
// is parsed as a JSON literal; strings may be given bare.
std::string apply_override(const std::string& json_text, const std::string& key_value);

}  // namespace encircle
