#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "encircle/estimation.hpp"
#include "encircle/network.hpp"
#include "encircle/phase.hpp"
#include "encircle/scenario.hpp"
#include "encircle/simlog.hpp"

namespace encircle {

// Deterministic fixed-step closed-loop simulation. Each control tick runs the
// barrier sequence: (1) every robot computes its command from local data,
// (2) messages advance/deliver, (3) estimators step, (4) states integrate
// (RK4 under zero-order-hold commands). Identical scenario + seed produces a
// byte-identical log.
class Simulation {
public:
    explicit Simulation(const Scenario& scenario);

    SimLog run();

    // Test hook: per-tick robot processing order (ids). Results must not
    // depend on it; the permutation test relies on this.
    void set_step_order(std::vector<int> order) { step_order_ = std::move(order); }

    const Scenario& scenario() const { return scenario_; }

private:
    struct Agent {
        int id{0};
        Vec3 position{Vec3::Zero()};
        // Unwrapped phase chains: the control chain lives in the robot's own
        // estimated frame; the true chain is bookkeeping for verification.
        std::optional<double> phi_ctrl;
        std::optional<double> phi_true;
        PhaseState phase_state;
        double xi{0.0};
        std::unique_ptr<RingNeighborCache> neighbors;
        std::unique_ptr<TrackingEstimator> estimator;
        std::unique_ptr<ExtremumConsensus> gamma;
        std::map<int, std::pair<double, long>> gamma_cache;          // freshest per src
        std::map<int, std::pair<EstimatePacket, long>> packet_cache;  // freshest per src
        CylRates v;
        Vec3 command{Vec3::Zero()};
        double last_phase_error{0.0};
        double last_delta{0.0};
        double sigma_hat{0.0};
    };

    void setup_agents();
    void seed_neighbor_caches();
    void rebuild_graph();

    FrameKinematics frame_for(Agent& agent) const;
    RingView view_for(Agent& agent, long tick);

    void control_phase(long tick);
    void deliver_phase(long tick);
    void estimate_phase(long tick);
    void integrate_phase(long tick);
    void apply_churn(long tick);
    void log_tick(long tick);

    Agent& agent_of(int id);
    ControllerMode mode_for(const Agent& agent) const;
    double true_wrapped_phase(const Agent& agent) const;

    Scenario scenario_;
    TargetFrame true_frame_;
    RingOrder ring_;
    std::map<int, Agent> agents_;
    std::unique_ptr<CommGraph> graph_;
    std::unique_ptr<MessageBus> bus_;
    std::vector<int> step_order_;
    std::vector<ChurnEvent> pending_churn_;
    int next_id_{0};
    std::size_t segment_index_{0};
    double segment_elapsed_{0.0};
    long last_sent_total_{0};
    long last_received_total_{0};
    SimLog log_;
};

SimLog run_scenario(const Scenario& scenario);

}  // namespace encircle
