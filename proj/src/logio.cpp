#include "encircle/simlog.hpp"

#include <cstdio>
#include <fstream>

#include "encircle/errors.hpp"

namespace encircle {

namespace {

std::ofstream open_or_throw(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file: " + path);
    return out;
}

// Shortest round-trippable decimal form keeps the CSVs byte-stable.
std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_states_csv(const SimLog& log, const std::string& path) {
    auto out = open_or_throw(path);
    out << "tick,t,robot,px,py,pz,ux,uy,uz,rho,phi,z,v_rho,v_phi,v_z,omega_state,sigma_hat\n";
    for (const TickSample& ts : log.ticks)
        for (const RobotSample& r : ts.robots)
            out << ts.tick << ',' << num(ts.t) << ',' << r.id << ',' << num(r.position.x()) << ','
                << num(r.position.y()) << ',' << num(r.position.z()) << ',' << num(r.command.x())
                << ',' << num(r.command.y()) << ',' << num(r.command.z()) << ',' << num(r.rho)
                << ',' << num(r.phi) << ',' << num(r.z) << ',' << num(r.v.rho_dot) << ','
                << num(r.v.phi_dot) << ',' << num(r.v.z_dot) << ',' << num(r.omega_state) << ','
                << num(r.sigma_hat) << '\n';
}

void write_errors_csv(const SimLog& log, const std::string& path, double rho_star,
                      double omega_target) {
    auto out = open_or_throw(path);
    out << "tick,t,robot,rho_error,phase_error,phi_rate_error,height,estimate_error,"
           "delta_min,min_pair_distance\n";
    for (const TickSample& ts : log.ticks)
        for (const RobotSample& r : ts.robots)
            out << ts.tick << ',' << num(ts.t) << ',' << r.id << ',' << num(r.rho - rho_star) << ','
                << num(r.phase_error) << ',' << num(r.v.phi_dot - omega_target) << ',' << num(r.z)
                << ',' << num(r.estimate_error) << ',' << num(ts.delta_min) << ','
                << num(ts.min_pair_distance) << '\n';
}

void write_distances_csv(const SimLog& log, const std::string& path) {
    auto out = open_or_throw(path);
    out << "tick,t,robot_i,robot_j,distance\n";
    for (const TickSample& ts : log.ticks)
        for (std::size_t a = 0; a < ts.robots.size(); ++a)
            for (std::size_t b = a + 1; b < ts.robots.size(); ++b)
                out << ts.tick << ',' << num(ts.t) << ',' << ts.robots[a].id << ','
                    << ts.robots[b].id << ','
                    << num((ts.robots[a].position - ts.robots[b].position).norm()) << '\n';
}

void write_messages_csv(const SimLog& log, const std::string& path) {
    auto out = open_or_throw(path);
    out << "tick,t,sent,received\n";
    for (const TickSample& ts : log.ticks)
        out << ts.tick << ',' << num(ts.t) << ',' << ts.messages_sent << ','
            << ts.messages_received << '\n';
}

void write_estimates_csv(const SimLog& log, const std::string& path) {
    auto out = open_or_throw(path);
    out << "tick,t";
    static const char* kNames[] = {"pT_x", "pT_y", "pT_z", "vT_x", "vT_y", "vT_z",
                                   "R_00", "R_01", "R_02", "R_10", "R_11", "R_12",
                                   "R_20", "R_21", "R_22", "Rd_00", "Rd_01", "Rd_02",
                                   "Rd_10", "Rd_11", "Rd_12", "Rd_20", "Rd_21", "Rd_22"};
    for (const char* name : kNames) out << ',' << name;
    out << '\n';
    for (const TickSample& ts : log.ticks) {
        out << ts.tick << ',' << num(ts.t);
        for (double e : ts.estimate_error_per_quantity) out << ',' << num(e);
        out << '\n';
    }
}

void write_message_trace_csv(const SimLog& log, const std::string& path) {
    auto out = open_or_throw(path);
    out << "tick,src,dst,type,hops\n";
    for (const MessageTraceRow& row : log.message_trace)
        out << row.tick << ',' << row.src << ',' << row.dst << ',' << row.type << ',' << row.hops
            << '\n';
}

}  // namespace encircle
