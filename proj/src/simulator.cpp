#include "encircle/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>
#include <set>

#include "encircle/safety.hpp"

namespace encircle {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;

// RK4 for p' = u with zero-order-hold u; exact for constant u but kept in
// integrator form so richer dynamics can slot in.
Vec3 rk4_step(const Vec3& p, const Vec3& u, double h) {
    const Vec3 k1 = u;
    const Vec3 k2 = u;
    const Vec3 k3 = u;
    const Vec3 k4 = u;
    return p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

Simulation::Simulation(const Scenario& scenario) : scenario_(scenario) {
    scenario_.validate();
    true_frame_ = scenario_.target.initial_frame();
    setup_agents();
    rebuild_graph();
    bus_ = std::make_unique<MessageBus>(graph_.get());
    seed_neighbor_caches();
    pending_churn_ = scenario_.churn;
    std::sort(pending_churn_.begin(), pending_churn_.end(),
              [](const ChurnEvent& a, const ChurnEvent& b) { return a.time < b.time; });
    if (!pending_churn_.empty() && scenario_.topology.kind != TopologyKind::kRing)
        throw ConfigError("churn is only supported on ring topologies");
    log_.scenario_name = scenario_.name;
    log_.control_period = scenario_.control_period;
    log_.dt = scenario_.dt;
    log_.n_initial = scenario_.n;
}

void Simulation::setup_agents() {
    std::mt19937_64 rng(scenario_.seed);
    const int n = scenario_.n;
    std::vector<CylCoords> initial;
    if (!scenario_.initial.explicit_positions.empty()) {
        initial = scenario_.initial.explicit_positions;
        for (auto& q : initial) q.phi = wrap_to_two_pi(q.phi);
    } else {
        std::uniform_real_distribution<double> rho_dist(scenario_.initial.rho_min,
                                                        scenario_.initial.rho_max);
        std::uniform_real_distribution<double> z_dist(-scenario_.initial.z_span,
                                                      scenario_.initial.z_span);
        std::uniform_real_distribution<double> phase_dist(0.0, kTwoPi);
        std::uniform_real_distribution<double> jitter_dist(-scenario_.initial.phase_perturbation,
                                                           scenario_.initial.phase_perturbation);
        for (int i = 0; i < n; ++i) {
            CylCoords q;
            q.rho = rho_dist(rng);
            if (scenario_.initial.phase_perturbation > 0.0)
                q.phi = wrap_to_two_pi(kTwoPi * i / n + jitter_dist(rng));
            else
                q.phi = phase_dist(rng);
            q.z = scenario_.initial.z_span > 0.0 ? z_dist(rng) : 0.0;
            initial.push_back(q);
        }
    }

    // Ring labeling: ids 1..n in order of increasing phase at t0.
    std::vector<std::pair<int, double>> id_phase;
    for (int i = 0; i < n; ++i) id_phase.emplace_back(i + 1, initial[static_cast<std::size_t>(i)].phi);
    std::sort(id_phase.begin(), id_phase.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second < b.second;
        return a.first < b.first;
    });
    for (std::size_t i = 0; i + 1 < id_phase.size(); ++i)
        if (id_phase[i].second == id_phase[i + 1].second)
            std::cerr << "warning: robots share the initial phase " << id_phase[i].second
                      << "; ordering by id\n";

    std::vector<CylCoords> sorted;
    for (const auto& [orig_id, phi] : id_phase) sorted.push_back(initial[static_cast<std::size_t>(orig_id - 1)]);

    std::vector<std::pair<int, double>> ring_input;
    for (int i = 0; i < n; ++i) ring_input.emplace_back(i + 1, sorted[static_cast<std::size_t>(i)].phi);
    ring_ = RingOrder::from_initial_phases(ring_input);
    next_id_ = n + 1;

    // Forcing terms for the angular-speed consensus, shifted to the exact mean.
    std::vector<double> xi(static_cast<std::size_t>(n), 0.0);
    if (scenario_.controller.kind == ControllerKind::kV3) {
        if (!scenario_.controller.xi.values.empty()) {
            if (scenario_.controller.xi.values.size() != static_cast<std::size_t>(n))
                throw ConfigError("controller.xi.values must list exactly n entries");
            xi = scenario_.controller.xi.values;
        } else {
            std::mt19937_64 xi_rng(scenario_.controller.xi.seed);
            std::uniform_real_distribution<double> dist(
                scenario_.controller.xi.mean - scenario_.controller.xi.spread,
                scenario_.controller.xi.mean + scenario_.controller.xi.spread);
            double sum = 0.0;
            for (auto& value : xi) {
                value = dist(xi_rng);
                sum += value;
            }
            const double shift = scenario_.controller.xi.mean - sum / n;
            for (auto& value : xi) value += shift;
        }
        for (double value : xi)
            if (value < 0.0) throw ConfigError("xi forcing terms must be nonnegative");
    }

    const TargetFrame pose_prior{true_frame_.position, Vec3::Zero(), true_frame_.rotation,
                                 Vec3::Zero()};
    for (int i = 0; i < n; ++i) {
        Agent agent;
        agent.id = i + 1;
        agent.position = from_cylindrical(sorted[static_cast<std::size_t>(i)], true_frame_.kinematics());
        agent.xi = xi[static_cast<std::size_t>(i)];
        agent.neighbors = std::make_unique<RingNeighborCache>(scenario_.topology.staleness_ticks);
        if (!scenario_.estimator.oracle_globals) {
            const bool informed = agent.id == scenario_.estimator.informed;
            // Uninformed robots start from the t0 pose exchanged during the
            // labeling handshake; every time-varying part starts at zero.
            agent.estimator = std::make_unique<TrackingEstimator>(
                informed, tracked_from_frame(informed ? true_frame_ : pose_prior));
        }
        agents_.emplace(agent.id, std::move(agent));
    }

    if (scenario_.controller.kind == ControllerKind::kV1Star) {
        // Sufficient conditions of the collision-safe controller; violating
        // them only voids the guarantee, so warn and continue.
        const SafetyParams& sp = *scenario_.safety;
        const double bound = sp.radius / std::abs(std::sin(M_PI / n)) + 2.0 * sp.radius;
        if (scenario_.controller.rho_star <= bound)
            std::cerr << "warning: rho_star violates safe-controller condition (a)\n";
        for (const auto& [id, agent] : agents_) {
            const CylCoords q = to_cylindrical(agent.position, true_frame_);
            if (q.rho <= bound)
                std::cerr << "warning: robot " << id << " violates safe-controller condition (b)\n";
            for (const auto& [jd, other] : agents_) {
                if (jd <= id) continue;
                const CylCoords qj = to_cylindrical(other.position, true_frame_);
                if (std::abs(q.rho - qj.rho) < 2.0 * sp.radius)
                    std::cerr << "warning: robots " << id << "," << jd
                              << " violate safe-controller condition (c)\n";
            }
        }
    }
}

void Simulation::rebuild_graph() {
    const std::vector<int>& ids = ring_.ids();
    CommGraph next = [&] {
        switch (scenario_.topology.kind) {
            case TopologyKind::kLine:
                return CommGraph::line(ids);
            case TopologyKind::kCustom: {
                std::vector<CommGraph::Epoch> schedule;
                for (const auto& ep : scenario_.topology.schedule)
                    schedule.push_back({ep.edges, ep.ticks});
                return CommGraph::custom(ids, std::move(schedule));
            }
            case TopologyKind::kRing:
            default:
                return CommGraph::ring(ids);
        }
    }();
    // Mutate in place: the bus keeps its pointer (and its stats) across churn.
    if (graph_)
        *graph_ = std::move(next);
    else
        graph_ = std::make_unique<CommGraph>(std::move(next));
}

void Simulation::seed_neighbor_caches() {
    // t0 handshake: the labeling round distributes the initial phases.
    for (const int id : ring_.ids()) {
        Agent& agent = agent_of(id);
        const FrameKinematics f = frame_for(agent);
        const CylCoords q = to_cylindrical(agent.position, f);
        agent.phi_ctrl = q.phi;
    }
    for (const int id : ring_.ids()) {
        Agent& agent = agent_of(id);
        const int pred = ring_.predecessor_of(id);
        const int succ = ring_.successor_of(id);
        agent.neighbors->seed(pred, {*agent_of(pred).phi_ctrl, 0.0, 0}, succ,
                              {*agent_of(succ).phi_ctrl, 0.0, 0});
        if (scenario_.safety) {
            const RingView view0 = ring_view(ring_.is_first(id), ring_.is_last(id),
                                             *agent_of(pred).phi_ctrl, *agent.phi_ctrl,
                                             *agent_of(succ).phi_ctrl);
            agent.last_delta = view0.delta;
            agent.gamma = std::make_unique<ExtremumConsensus>(scenario_.reset_period_m(),
                                                              ExtremumDirection::kMin, view0.delta);
        }
    }
}

Simulation::Agent& Simulation::agent_of(int id) {
    const auto it = agents_.find(id);
    if (it == agents_.end()) throw Error("unknown robot id " + std::to_string(id));
    return it->second;
}

FrameKinematics Simulation::frame_for(Agent& agent) const {
    if (scenario_.estimator.oracle_globals || !agent.estimator || agent.estimator->informed())
        return true_frame_.kinematics();
    return agent.estimator->frame();
}

RingView Simulation::view_for(Agent& agent, long tick) {
    const NeighborPhase pred =
        agent.neighbors->pred_at(tick, scenario_.control_period, agent.id);
    const NeighborPhase succ =
        agent.neighbors->succ_at(tick, scenario_.control_period, agent.id);
    return ring_view(ring_.is_first(agent.id), ring_.is_last(agent.id), pred.phi,
                     *agent.phi_ctrl, succ.phi);
}

ControllerMode Simulation::mode_for(const Agent& agent) const {
    switch (scenario_.controller.kind) {
        case ControllerKind::kV1:
            return ModeV1{scenario_.controller.omega_star};
        case ControllerKind::kV2:
            return ModeV2{scenario_.controller.escape_window};
        case ControllerKind::kV3:
            return ModeV3{agent.xi};
        case ControllerKind::kV1Star:
            return ModeV1Star{scenario_.controller.omega_star, *scenario_.safety};
    }
    throw Error("unreachable controller kind");
}

double Simulation::true_wrapped_phase(const Agent& agent) const {
    return to_cylindrical(agent.position, true_frame_).phi;
}

void Simulation::control_phase(long tick) {
    const std::vector<int> order = step_order_.empty() ? ring_.ids() : step_order_;
    for (const int id : order) {
        Agent& agent = agent_of(id);
        const FrameKinematics frame = frame_for(agent);
        const CylCoords q = to_cylindrical(agent.position, frame);
        agent.phi_ctrl = agent.phi_ctrl ? unwrap_step(*agent.phi_ctrl, q.phi) : q.phi;

        const RingView view = view_for(agent, tick);
        agent.last_phase_error = phase_error(view.phi_bar, view.phi_self);
        agent.last_delta = view.delta;
        agent.sigma_hat = scenario_.safety
                              ? sigma_hat_from_agreement(*agent.gamma, scenario_.safety->radius)
                              : 0.0;

        const ControllerMode mode = mode_for(agent);
        const ControlResult result =
            control_step(agent.position, frame, view, mode, agent.phase_state,
                         scenario_.controller.gains, scenario_.controller.rho_star,
                         scenario_.control_period, agent.sigma_hat);
        agent.v = result.v;
        agent.command = result.u;

        const PhaseReport report{*agent.phi_ctrl, agent.v.phi_dot};
        const int pred = ring_.predecessor_of(id);
        const int succ = ring_.successor_of(id);
        bus_->send(id, pred, report, tick);
        if (succ != pred) bus_->send(id, succ, report, tick);
    }
}

void Simulation::deliver_phase(long tick) {
    for (const DeliveredMessage& dm : bus_->deliver(tick)) {
        Agent& agent = agent_of(dm.message.dst);
        if (const auto* report = std::get_if<PhaseReport>(&dm.message.payload)) {
            agent.neighbors->store(dm.message.src, *report, dm.message.sent_tick);
            if (scenario_.output.message_trace)
                log_.message_trace.push_back({tick, dm.message.src, dm.message.dst, "phase", dm.hops});
        } else if (const auto* packet = std::get_if<EstimatePacket>(&dm.message.payload)) {
            auto& slot = agent.packet_cache[dm.message.src];
            if (slot.first.values.empty() || slot.second < dm.message.sent_tick)
                slot = {*packet, dm.message.sent_tick};
            if (scenario_.output.message_trace)
                log_.message_trace.push_back({tick, dm.message.src, dm.message.dst, "estimate", dm.hops});
        } else if (const auto* gamma = std::get_if<GammaPacket>(&dm.message.payload)) {
            auto& slot = agent.gamma_cache[dm.message.src];
            if (slot.second < dm.message.sent_tick || slot.second == 0)
                slot = {gamma->gamma, dm.message.sent_tick};
            if (scenario_.output.message_trace)
                log_.message_trace.push_back({tick, dm.message.src, dm.message.dst, "gamma", dm.hops});
        }
    }
}

void Simulation::estimate_phase(long tick) {
    const std::vector<int> order = step_order_.empty() ? ring_.ids() : step_order_;
    if (!scenario_.estimator.oracle_globals) {
        const TrackedValues truth = tracked_from_frame(true_frame_);
        const TrackedValues truth_rate = tracked_rates_from_frame(true_frame_);
        for (const int id : order) {
            Agent& agent = agent_of(id);
            if (agent.estimator->informed()) {
                agent.estimator->step_informed(truth, truth_rate, scenario_.k_eta(),
                                               scenario_.control_period);
            } else {
                std::vector<const EstimatePacket*> packets;
                for (const int nb : graph_->neighbors_of(id, tick)) {
                    const auto it = agent.packet_cache.find(nb);
                    if (it != agent.packet_cache.end()) packets.push_back(&it->second.first);
                }
                agent.estimator->step_from_neighbors(packets, scenario_.k_eta(),
                                                     scenario_.control_period);
            }
            const EstimatePacket packet = agent.estimator->packet();
            for (const int nb : graph_->neighbors_of(id, tick)) bus_->send(id, nb, packet, tick);
        }
    }
    if (scenario_.safety) {
        for (const int id : order) {
            Agent& agent = agent_of(id);
            if (tick >= 1) {
                std::vector<double> neighbor_gammas;
                for (const int nb : graph_->neighbors_of(id, tick)) {
                    const auto it = agent.gamma_cache.find(nb);
                    if (it != agent.gamma_cache.end()) neighbor_gammas.push_back(it->second.first);
                }
                agent.gamma->step(tick, agent.last_delta, neighbor_gammas);
            }
            for (const int nb : graph_->neighbors_of(id, tick))
                bus_->send(id, nb, GammaPacket{agent.gamma->gamma()}, tick);
        }
    }
}

void Simulation::integrate_phase(long tick) {
    (void)tick;
    const int substeps = scenario_.substeps_per_tick();
    for (auto& [id, agent] : agents_)
        for (int s = 0; s < substeps; ++s)
            agent.position = rk4_step(agent.position, agent.command, scenario_.dt);

    // Advance the true frame across segment boundaries.
    double remaining = scenario_.control_period;
    while (remaining > 1e-15) {
        const auto& segments = scenario_.target.segments;
        if (segment_index_ >= segments.size()) {
            true_frame_.velocity = Vec3::Zero();
            true_frame_.omega = Vec3::Zero();
            true_frame_ = advance_frame(true_frame_, remaining);
            break;
        }
        const TargetSegment& seg = segments[segment_index_];
        true_frame_.velocity = seg.velocity;
        true_frame_.omega = seg.omega;
        const double left_in_segment = seg.duration - segment_elapsed_;
        const double step = std::min(remaining, left_in_segment);
        true_frame_ = advance_frame(true_frame_, step);
        segment_elapsed_ += step;
        remaining -= step;
        if (segment_elapsed_ >= seg.duration - 1e-15) {
            ++segment_index_;
            segment_elapsed_ = 0.0;
        }
    }
    // Expose the rates of the segment active at the next tick.
    if (segment_index_ < scenario_.target.segments.size()) {
        true_frame_.velocity = scenario_.target.segments[segment_index_].velocity;
        true_frame_.omega = scenario_.target.segments[segment_index_].omega;
    } else {
        true_frame_.velocity = Vec3::Zero();
        true_frame_.omega = Vec3::Zero();
    }
}

void Simulation::apply_churn(long tick) {
    const double next_time = static_cast<double>(tick + 1) * scenario_.control_period;
    bool changed = false;
    while (!pending_churn_.empty() && pending_churn_.front().time <= next_time + 1e-12) {
        const ChurnEvent event = pending_churn_.front();
        pending_churn_.erase(pending_churn_.begin());
        if (!event.add) {
            if (!scenario_.estimator.oracle_globals && event.robot == scenario_.estimator.informed)
                throw ConfigError("cannot remove the informed robot mid-run");
            ring_.remove(event.robot);
            agents_.erase(event.robot);
            bus_->drop_messages_for(event.robot);
            for (auto& [id, agent] : agents_) {
                agent.gamma_cache.erase(event.robot);
                agent.packet_cache.erase(event.robot);
            }
        } else {
            const int new_id = next_id_++;
            if (static_cast<int>(ring_.size()) + 1 > std::max(scenario_.n_max, scenario_.n))
                throw ConfigError("churn grows the ring beyond n_max");
            Agent agent;
            agent.id = new_id;
            agent.position = from_cylindrical(event.position, true_frame_.kinematics());
            agent.neighbors = std::make_unique<RingNeighborCache>(scenario_.topology.staleness_ticks);
            if (!scenario_.estimator.oracle_globals) {
                const TargetFrame pose_prior{true_frame_.position, Vec3::Zero(),
                                             true_frame_.rotation, Vec3::Zero()};
                agent.estimator =
                    std::make_unique<TrackingEstimator>(false, tracked_from_frame(pose_prior));
            }

            // Insert between the pair whose wrapped phases bracket the newcomer.
            const double phi_new = to_cylindrical(agent.position, true_frame_).phi;
            int after = ring_.ids().back();
            for (const int a : ring_.ids()) {
                const int b = ring_.successor_of(a);
                const double pa = true_wrapped_phase(agent_of(a));
                const double gap = wrap_to_two_pi(true_wrapped_phase(agent_of(b)) - pa);
                const double offset = wrap_to_two_pi(phi_new - pa);
                if (offset > 0.0 && offset < gap) {
                    after = a;
                    break;
                }
            }
            // Join the predecessor's unwrapped branch.
            Agent& pred_agent = agent_of(after);
            agent.phi_ctrl =
                *pred_agent.phi_ctrl + wrap_to_two_pi(phi_new - wrap_to_two_pi(*pred_agent.phi_ctrl));
            agent.phi_true = *pred_agent.phi_true
                + wrap_to_two_pi(phi_new - wrap_to_two_pi(*pred_agent.phi_true));
            if (scenario_.safety) {
                agent.gamma = std::make_unique<ExtremumConsensus>(
                    scenario_.reset_period_m(), ExtremumDirection::kMin,
                    wrap_to_two_pi(phi_new - true_wrapped_phase(pred_agent)));
            }
            ring_.insert_after(after, new_id);
            agents_.emplace(new_id, std::move(agent));
        }
        changed = true;
    }
    if (changed) {
        rebuild_graph();
        // Re-target every cache and hand the churn-barrier handshake values
        // to the sides whose neighbor changed.
        for (const int id : ring_.ids()) {
            Agent& agent = agent_of(id);
            const int pred = ring_.predecessor_of(id);
            const int succ = ring_.successor_of(id);
            const bool pred_changed = agent.neighbors->pred_id() != pred;
            const bool succ_changed = agent.neighbors->succ_id() != succ;
            agent.neighbors->retarget_pred(pred);
            agent.neighbors->retarget_succ(succ);
            if (pred_changed)
                agent.neighbors->store(pred, {*agent_of(pred).phi_ctrl, 0.0}, tick);
            if (succ_changed)
                agent.neighbors->store(succ, {*agent_of(succ).phi_ctrl, 0.0}, tick);
        }
    }
}

void Simulation::log_tick(long tick) {
    TickSample ts;
    ts.tick = tick;
    ts.t = static_cast<double>(tick) * scenario_.control_period;
    const TrackedValues truth = tracked_from_frame(true_frame_);

    std::vector<double> est_err_per_quantity(kTrackedCount, 0.0);
    for (const int id : ring_.ids()) {
        Agent& agent = agent_of(id);
        const CylCoords q = to_cylindrical(agent.position, true_frame_);
        agent.phi_true = agent.phi_true ? unwrap_step(*agent.phi_true, q.phi) : q.phi;

        RobotSample rs;
        rs.id = id;
        rs.position = agent.position;
        rs.command = agent.command;
        rs.rho = q.rho;
        rs.phi = *agent.phi_true;
        rs.z = q.z;
        rs.v = agent.v;
        rs.phase_error = agent.last_phase_error;
        rs.omega_state = agent.phase_state.omega;
        rs.sigma_hat = agent.sigma_hat;
        if (agent.estimator) {
            double worst = 0.0;
            for (std::size_t qi = 0; qi < kTrackedCount; ++qi) {
                const double err = std::abs(agent.estimator->values()[qi] - truth[qi]);
                worst = std::max(worst, err);
                est_err_per_quantity[qi] = std::max(est_err_per_quantity[qi], err);
            }
            rs.estimate_error = worst;
        }
        ts.robots.push_back(rs);
    }

    const std::vector<int>& ids = ring_.ids();
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const double phi_i = *agent_of(ids[i]).phi_true;
        const double phi_pred = *agent_of(ids[(i + ids.size() - 1) % ids.size()]).phi_true;
        ts.delta.push_back(i == 0 ? phi_i - (phi_pred - kTwoPi) : phi_i - phi_pred);
    }
    ts.delta_min = *std::min_element(ts.delta.begin(), ts.delta.end());

    double min_d = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < ids.size(); ++a)
        for (std::size_t b = a + 1; b < ids.size(); ++b)
            min_d = std::min(min_d, (agent_of(ids[a]).position - agent_of(ids[b]).position).norm());
    ts.min_pair_distance = min_d;

    bus_->count_tick();
    ts.messages_sent = bus_->stats().total_sent - last_sent_total_;
    ts.messages_received = bus_->stats().total_received - last_received_total_;
    last_sent_total_ = bus_->stats().total_sent;
    last_received_total_ = bus_->stats().total_received;
    ts.estimate_error_per_quantity = std::move(est_err_per_quantity);
    log_.ticks.push_back(std::move(ts));
}

SimLog Simulation::run() {
    const long ticks = scenario_.control_ticks();
    for (long k = 0; k < ticks; ++k) {
        try {
            graph_->check_connectivity(k);
            control_phase(k);
            log_tick(k);
            deliver_phase(k);
            estimate_phase(k);
            integrate_phase(k);
            apply_churn(k);
        } catch (const DisconnectedGraph&) {
            throw;
        } catch (const Error& e) {
            throw Error("tick " + std::to_string(k) + ": " + e.what());
        }
    }
    for (const auto& [id, count] : bus_->stats().sent) log_.sent_totals.emplace_back(id, count);
    for (const auto& [id, count] : bus_->stats().received)
        log_.received_totals.emplace_back(id, count);
    return std::move(log_);
}

SimLog run_scenario(const Scenario& scenario) {
    Simulation sim(scenario);
    return sim.run();
}

}  // namespace encircle
