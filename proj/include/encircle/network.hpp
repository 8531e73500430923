#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "encircle/errors.hpp"

namespace encircle {

// Undirected communication graph, possibly varying over time as a cyclic
// schedule of epochs. Connectivity is mandatory at every tick.
class CommGraph {
public:
    struct Epoch {
        std::vector<std::pair<int, int>> edges;
        long ticks{1};  // how many ticks this epoch lasts before the next one
    };

    static CommGraph ring(const std::vector<int>& ids);
    static CommGraph line(const std::vector<int>& ids);
    static CommGraph custom(std::vector<int> ids, std::vector<Epoch> schedule);

    const std::vector<int>& ids() const { return ids_; }
    std::size_t size() const { return ids_.size(); }

    // Epoch index active at `tick` (schedule cycles).
    std::size_t epoch_at(long tick) const;
    const std::vector<int>& neighbors_of(int id, long tick) const;
    bool has_edge(int a, int b, long tick) const;

    // Hops of the shortest route, ties broken by lowest next-hop id.
    int hop_distance(int src, int dst, long tick) const;
    int next_hop(int from, int dst, long tick) const;

    // Throws DisconnectedGraph (with the tick) if any epoch is disconnected.
    void check_connectivity(long tick) const;

    void add_robot(int id, const std::vector<int>& attach_to);
    void remove_robot(int id);

private:
    void rebuild_tables();

    std::vector<int> ids_;
    std::vector<Epoch> schedule_;
    long total_schedule_ticks_{1};
    // Per epoch: adjacency and next-hop tables keyed by robot id.
    struct EpochTables {
        std::map<int, std::vector<int>> adjacency;
        std::map<int, std::map<int, int>> next_hop;  // next_hop[src][dst]
        std::map<int, std::map<int, int>> hops;
    };
    std::vector<EpochTables> tables_;
};

// Message payloads. Phase reports travel (possibly multi-hop) to the fixed
// ring neighbors; estimate and gamma packets only ever go to direct graph
// neighbors.
struct PhaseReport {
    double phi{0.0};      // sender's unwrapped phase
    double phi_rate{0.0};  // sender's commanded phase rate (for extrapolation)
};

struct EstimatePacket {
    std::vector<double> values;
    std::vector<double> rates;
};

struct GammaPacket {
    double gamma{0.0};
};

using Payload = std::variant<PhaseReport, EstimatePacket, GammaPacket>;

struct Message {
    int src{0};
    int dst{0};
    long sent_tick{0};
    std::uint64_t seq{0};
    Payload payload;
};

struct DeliveredMessage {
    Message message;
    long delivered_tick{0};
    int hops{0};
};

struct MessageStats {
    std::map<int, long> sent;
    std::map<int, long> received;
    long total_sent{0};
    long total_received{0};
    long ticks{0};

    double per_robot_rate(int id) const;
    double total_rate() const;
};

// Tick-synchronous bus: messages advance one hop per deliver() call and are
// handed to the destination on the tick they arrive. Delivery order is
// deterministic: sorted by (sent_tick, src, dst, seq).
class MessageBus {
public:
    explicit MessageBus(const CommGraph* graph) : graph_(graph) {}

    void send(int src, int dst, const Payload& payload, long tick);

    // Advance every in-flight message one hop using the topology of `tick`;
    // returns everything that reached its destination, sorted.
    std::vector<DeliveredMessage> deliver(long tick);

    const MessageStats& stats() const { return stats_; }
    void count_tick() { ++stats_.ticks; }

    void drop_messages_for(int id);

private:
    struct InFlight {
        Message message;
        int holder{0};
        int hops{0};
    };
    const CommGraph* graph_;
    std::vector<InFlight> in_flight_;
    std::uint64_t next_seq_{0};
    MessageStats stats_;
};

// Latest phase knowledge a robot holds about one ring neighbor.
struct NeighborPhase {
    double phi{0.0};
    double phi_rate{0.0};
    long sampled_tick{0};
};

// Per-robot cache of predecessor/successor phases fed by delivered
// PhaseReports. Throws StaleNeighborData when the freshest value is older
// than the configured bound.
class RingNeighborCache {
public:
    explicit RingNeighborCache(int staleness_bound) : bound_(staleness_bound) {}

    void seed(int pred_id, const NeighborPhase& pred, int succ_id, const NeighborPhase& succ);
    void retarget_pred(int pred_id);
    void retarget_succ(int succ_id);
    void store(int from_id, const PhaseReport& report, long sampled_tick);

    int pred_id() const { return pred_id_; }
    int succ_id() const { return succ_id_; }

    // Freshest values, extrapolated by their age to the current tick.
    NeighborPhase pred_at(long tick, double tick_seconds, int robot_for_error) const;
    NeighborPhase succ_at(long tick, double tick_seconds, int robot_for_error) const;

private:
    NeighborPhase extrapolate(const std::optional<NeighborPhase>& entry, long tick,
                              double tick_seconds, int robot_for_error) const;

    int bound_;
    int pred_id_{-1};
    int succ_id_{-1};
    std::optional<NeighborPhase> pred_;
    std::optional<NeighborPhase> succ_;
};

}  // namespace encircle
