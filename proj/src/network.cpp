#include "encircle/network.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace encircle {

namespace {

std::vector<std::pair<int, int>> ring_edges(const std::vector<int>& ids) {
    std::vector<std::pair<int, int>> edges;
    const std::size_t n = ids.size();
    for (std::size_t i = 0; i < n; ++i) edges.emplace_back(ids[i], ids[(i + 1) % n]);
    if (n == 2) edges.pop_back();  // avoid the duplicate edge
    return edges;
}

std::vector<std::pair<int, int>> line_edges(const std::vector<int>& ids) {
    std::vector<std::pair<int, int>> edges;
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) edges.emplace_back(ids[i], ids[i + 1]);
    return edges;
}

}  // namespace

CommGraph CommGraph::ring(const std::vector<int>& ids) {
    return custom(ids, {Epoch{ring_edges(ids), 1}});
}

CommGraph CommGraph::line(const std::vector<int>& ids) {
    return custom(ids, {Epoch{line_edges(ids), 1}});
}

CommGraph CommGraph::custom(std::vector<int> ids, std::vector<Epoch> schedule) {
    if (ids.size() < 2) throw TooFewRobots(static_cast<int>(ids.size()));
    if (schedule.empty()) throw ConfigError("topology schedule must have at least one epoch");
    CommGraph g;
    g.ids_ = std::move(ids);
    g.schedule_ = std::move(schedule);
    g.rebuild_tables();
    return g;
}

void CommGraph::rebuild_tables() {
    total_schedule_ticks_ = 0;
    for (auto& epoch : schedule_) {
        if (epoch.ticks < 1) throw ConfigError("epoch length must be at least one tick");
        total_schedule_ticks_ += epoch.ticks;
    }
    tables_.clear();
    tables_.resize(schedule_.size());
    const std::set<int> known(ids_.begin(), ids_.end());
    for (std::size_t e = 0; e < schedule_.size(); ++e) {
        auto& t = tables_[e];
        for (int id : ids_) t.adjacency[id];
        for (const auto& [a, b] : schedule_[e].edges) {
            if (a == b) throw ConfigError("self-loop on robot " + std::to_string(a));
            if (!known.count(a) || !known.count(b))
                throw ConfigError("edge references unknown robot " + std::to_string(known.count(a) ? b : a));
            t.adjacency[a].push_back(b);
            t.adjacency[b].push_back(a);
        }
        for (auto& [id, nbrs] : t.adjacency) {
            std::sort(nbrs.begin(), nbrs.end());
            nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
        }
        // BFS from every node; neighbors visited in ascending id order makes
        // the next-hop choice deterministic (lowest next-hop id wins ties).
        for (int src : ids_) {
            auto& hop_row = t.next_hop[src];
            auto& dist_row = t.hops[src];
            dist_row[src] = 0;
            std::deque<int> queue{src};
            while (!queue.empty()) {
                const int cur = queue.front();
                queue.pop_front();
                for (int nb : t.adjacency[cur]) {
                    if (dist_row.count(nb)) continue;
                    dist_row[nb] = dist_row[cur] + 1;
                    hop_row[nb] = (cur == src) ? nb : hop_row[cur];
                    queue.push_back(nb);
                }
            }
        }
    }
}

std::size_t CommGraph::epoch_at(long tick) const {
    long offset = tick % total_schedule_ticks_;
    for (std::size_t e = 0; e < schedule_.size(); ++e) {
        if (offset < schedule_[e].ticks) return e;
        offset -= schedule_[e].ticks;
    }
    return schedule_.size() - 1;
}

const std::vector<int>& CommGraph::neighbors_of(int id, long tick) const {
    const auto& adj = tables_[epoch_at(tick)].adjacency;
    const auto it = adj.find(id);
    if (it == adj.end()) throw Error("robot " + std::to_string(id) + " is not in the graph");
    return it->second;
}

bool CommGraph::has_edge(int a, int b, long tick) const {
    const auto& nbrs = neighbors_of(a, tick);
    return std::find(nbrs.begin(), nbrs.end(), b) != nbrs.end();
}

int CommGraph::hop_distance(int src, int dst, long tick) const {
    const auto& hops = tables_[epoch_at(tick)].hops;
    const auto row = hops.find(src);
    if (row == hops.end()) throw Error("robot " + std::to_string(src) + " is not in the graph");
    const auto it = row->second.find(dst);
    if (it == row->second.end()) throw NoRoute(src, dst);
    return it->second;
}

int CommGraph::next_hop(int from, int dst, long tick) const {
    if (from == dst) return dst;
    const auto& table = tables_[epoch_at(tick)].next_hop;
    const auto row = table.find(from);
    if (row == table.end()) throw Error("robot " + std::to_string(from) + " is not in the graph");
    const auto it = row->second.find(dst);
    if (it == row->second.end()) throw NoRoute(from, dst);
    return it->second;
}

void CommGraph::check_connectivity(long tick) const {
    const auto& reach = tables_[epoch_at(tick)].hops.at(ids_.front());
    if (reach.size() != ids_.size()) throw DisconnectedGraph(tick);
}

void CommGraph::add_robot(int id, const std::vector<int>& attach_to) {
    ids_.push_back(id);
    for (auto& epoch : schedule_)
        for (int nb : attach_to) epoch.edges.emplace_back(id, nb);
    rebuild_tables();
}

void CommGraph::remove_robot(int id) {
    ids_.erase(std::remove(ids_.begin(), ids_.end(), id), ids_.end());
    for (auto& epoch : schedule_) {
        auto& edges = epoch.edges;
        edges.erase(std::remove_if(edges.begin(), edges.end(),
                                   [id](const auto& e) { return e.first == id || e.second == id; }),
                    edges.end());
    }
    rebuild_tables();
}

double MessageStats::per_robot_rate(int id) const {
    if (ticks == 0) return 0.0;
    const auto it = sent.find(id);
    return it == sent.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(ticks);
}

double MessageStats::total_rate() const {
    return ticks == 0 ? 0.0 : static_cast<double>(total_sent) / static_cast<double>(ticks);
}

void MessageBus::send(int src, int dst, const Payload& payload, long tick) {
    InFlight f;
    f.message = Message{src, dst, tick, next_seq_++, payload};
    f.holder = src;
    f.hops = 0;
    in_flight_.push_back(std::move(f));
    ++stats_.sent[src];
    ++stats_.total_sent;
}

std::vector<DeliveredMessage> MessageBus::deliver(long tick) {
    std::sort(in_flight_.begin(), in_flight_.end(), [](const InFlight& a, const InFlight& b) {
        if (a.message.sent_tick != b.message.sent_tick) return a.message.sent_tick < b.message.sent_tick;
        if (a.message.src != b.message.src) return a.message.src < b.message.src;
        if (a.message.dst != b.message.dst) return a.message.dst < b.message.dst;
        return a.message.seq < b.message.seq;
    });
    std::vector<DeliveredMessage> delivered;
    std::vector<InFlight> still_flying;
    for (auto& f : in_flight_) {
        if (f.message.sent_tick >= tick) {  // sent this tick; first hop happens next tick
            still_flying.push_back(std::move(f));
            continue;
        }
        const int next = graph_->next_hop(f.holder, f.message.dst, tick);
        ++f.hops;
        if (f.holder != f.message.src) {
            // A relay transmission is a real send by the forwarding robot.
            ++stats_.sent[f.holder];
            ++stats_.total_sent;
        }
        ++stats_.received[next];
        ++stats_.total_received;
        if (next == f.message.dst) {
            delivered.push_back({std::move(f.message), tick, f.hops});
        } else {
            f.holder = next;
            still_flying.push_back(std::move(f));
        }
    }
    in_flight_ = std::move(still_flying);
    return delivered;
}

void MessageBus::drop_messages_for(int id) {
    in_flight_.erase(std::remove_if(in_flight_.begin(), in_flight_.end(),
                                    [id](const InFlight& f) {
                                        return f.message.dst == id || f.message.src == id
                                            || f.holder == id;
                                    }),
                     in_flight_.end());
}

void RingNeighborCache::seed(int pred_id, const NeighborPhase& pred, int succ_id,
                             const NeighborPhase& succ) {
    pred_id_ = pred_id;
    succ_id_ = succ_id;
    pred_ = pred;
    succ_ = succ;
}

void RingNeighborCache::retarget_pred(int pred_id) {
    if (pred_id_ != pred_id) {
        pred_id_ = pred_id;
        pred_.reset();
    }
}

void RingNeighborCache::retarget_succ(int succ_id) {
    if (succ_id_ != succ_id) {
        succ_id_ = succ_id;
        succ_.reset();
    }
}

void RingNeighborCache::store(int from_id, const PhaseReport& report, long sampled_tick) {
    const NeighborPhase entry{report.phi, report.phi_rate, sampled_tick};
    if (from_id == pred_id_ && (!pred_ || pred_->sampled_tick < sampled_tick)) pred_ = entry;
    if (from_id == succ_id_ && (!succ_ || succ_->sampled_tick < sampled_tick)) succ_ = entry;
}

NeighborPhase RingNeighborCache::extrapolate(const std::optional<NeighborPhase>& entry, long tick,
                                             double tick_seconds, int robot_for_error) const {
    if (!entry) throw StaleNeighborData(robot_for_error, bound_ + 1, bound_);
    const long age = tick - entry->sampled_tick;
    if (age > bound_) throw StaleNeighborData(robot_for_error, static_cast<int>(age), bound_);
    NeighborPhase out = *entry;
    out.phi += out.phi_rate * static_cast<double>(age) * tick_seconds;
    out.sampled_tick = tick;
    return out;
}

NeighborPhase RingNeighborCache::pred_at(long tick, double tick_seconds, int robot_for_error) const {
    return extrapolate(pred_, tick, tick_seconds, robot_for_error);
}

NeighborPhase RingNeighborCache::succ_at(long tick, double tick_seconds, int robot_for_error) const {
    return extrapolate(succ_, tick, tick_seconds, robot_for_error);
}

}  // namespace encircle
