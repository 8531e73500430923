#include "encircle/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "encircle/safety.hpp"

namespace encircle {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
constexpr double kRateFloor = 1e-8;

// Least-squares slope of ln(value) over the last half of the above-floor
// samples. Returns false when there is not enough signal to fit.
bool fit_decay_rate(const std::vector<double>& t, const std::vector<double>& value, double& rate) {
    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < value.size(); ++i)
        if (value[i] > kRateFloor) usable.push_back(i);
    if (usable.size() < 10) return false;
    const std::size_t begin = usable.size() / 2;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double count = static_cast<double>(usable.size() - begin);
    for (std::size_t k = begin; k < usable.size(); ++k) {
        const double x = t[usable[k]];
        const double y = std::log(value[usable[k]]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = count * sxx - sx * sx;
    if (std::abs(denom) < 1e-12) return false;
    rate = -(count * sxy - sx * sy) / denom;
    return true;
}

}  // namespace

double omega_target_for(const Scenario& scenario) {
    switch (scenario.controller.kind) {
        case ControllerKind::kV1:
        case ControllerKind::kV1Star:
            return scenario.controller.omega_star;
        case ControllerKind::kV2:
            return kTwoPi / (scenario.n * scenario.controller.escape_window);
        case ControllerKind::kV3: {
            const auto& xi = scenario.controller.xi;
            if (xi.values.empty()) return xi.mean;
            return std::accumulate(xi.values.begin(), xi.values.end(), 0.0)
                 / static_cast<double>(xi.values.size());
        }
    }
    return 0.0;
}

RunMetrics compute_metrics(const SimLog& log, const Scenario& scenario) {
    if (log.ticks.empty()) throw InsufficientData("empty log");
    RunMetrics m;
    m.omega_target = omega_target_for(scenario);
    const double rho_star = scenario.controller.rho_star;

    const TickSample& last = log.ticks.back();
    for (const RobotSample& r : last.robots) {
        m.final_rho_error = std::max(m.final_rho_error, std::abs(r.rho - rho_star));
        m.final_phase_error = std::max(m.final_phase_error, std::abs(r.phase_error));
        m.final_phi_rate_error = std::max(m.final_phi_rate_error, std::abs(r.v.phi_dot - m.omega_target));
        m.final_height_error = std::max(m.final_height_error, std::abs(r.z));
    }

    std::vector<double> t, phase_norm, rho_err, height_err;
    t.reserve(log.ticks.size());
    for (const TickSample& ts : log.ticks) {
        t.push_back(ts.t);
        double pn = 0.0, re = 0.0, he = 0.0;
        for (const RobotSample& r : ts.robots) {
            pn += r.phase_error * r.phase_error;
            re = std::max(re, std::abs(r.rho - rho_star));
            he = std::max(he, std::abs(r.z));
        }
        phase_norm.push_back(std::sqrt(pn));
        rho_err.push_back(re);
        height_err.push_back(he);
    }
    m.phase_rate_valid = fit_decay_rate(t, phase_norm, m.fitted_phase_rate);
    m.rho_rate_valid = fit_decay_rate(t, rho_err, m.fitted_rho_rate);
    m.height_rate_valid = fit_decay_rate(t, height_err, m.fitted_height_rate);

    // Escape window: crossings of the ray phi = 0 (mod 2*pi) over the last
    // half of the run, all robots pooled, linear interpolation between ticks.
    std::vector<double> crossings;
    const double t_tail = log.ticks.back().t / 2.0;
    std::map<int, std::pair<double, double>> prev;  // id -> (t, phi)
    for (const TickSample& ts : log.ticks) {
        for (const RobotSample& r : ts.robots) {
            const auto it = prev.find(r.id);
            if (it != prev.end()) {
                const double phi0 = it->second.second;
                const double phi1 = r.phi;
                const double k0 = std::floor(phi0 / kTwoPi);
                const double k1 = std::floor(phi1 / kTwoPi);
                if (k1 > k0 && phi1 > phi0) {
                    const double target = (k0 + 1.0) * kTwoPi;
                    const double alpha = (target - phi0) / (phi1 - phi0);
                    const double tc = it->second.first + alpha * (ts.t - it->second.first);
                    if (tc >= t_tail) crossings.push_back(tc);
                }
            }
            prev[r.id] = {ts.t, r.phi};
        }
    }
    std::sort(crossings.begin(), crossings.end());
    if (crossings.size() >= 2) {
        double sum = 0.0;
        for (std::size_t i = 1; i < crossings.size(); ++i) sum += crossings[i] - crossings[i - 1];
        m.escape_window = sum / static_cast<double>(crossings.size() - 1);
    }

    m.min_pair_distance = std::numeric_limits<double>::infinity();
    for (const TickSample& ts : log.ticks)
        m.min_pair_distance = std::min(m.min_pair_distance, ts.min_pair_distance);

    m.final_delta_min = last.delta_min;
    for (std::size_t k = 0; k + 1 < log.ticks.size(); ++k) {
        if (log.ticks[k].robots.size() != log.ticks[k + 1].robots.size()) continue;  // churn tick
        const double dip = log.ticks[k].delta_min - log.ticks[k + 1].delta_min;
        if (dip > 1e-9) ++m.delta_min_violations;
        m.worst_delta_min_dip = std::max(m.worst_delta_min_dip, dip);
    }

    if (scenario.safety) {
        const double r = scenario.safety->radius;
        for (const TickSample& ts : log.ticks) {
            const double sigma = sigma_bound(ts.delta_min, r);
            for (const RobotSample& rs : ts.robots)
                m.max_sigma_deficit = std::max(m.max_sigma_deficit, sigma - rs.sigma_hat);
        }
        const double sigma_end = sigma_bound(last.delta_min, r);
        double gap = 0.0;
        for (const RobotSample& rs : last.robots)
            gap = std::max(gap, std::abs(rs.sigma_hat - sigma_end));
        m.final_sigma_gap = gap;
    }

    if (!log.sent_totals.empty() && !log.ticks.empty()) {
        const double ticks = static_cast<double>(log.ticks.size());
        m.per_robot_rate_min = std::numeric_limits<double>::infinity();
        for (const auto& [id, count] : log.sent_totals) {
            const double rate = static_cast<double>(count) / ticks;
            m.per_robot_rate_min = std::min(m.per_robot_rate_min, rate);
            m.per_robot_rate_max = std::max(m.per_robot_rate_max, rate);
            m.total_message_rate += rate;
        }
    }
    return m;
}

std::string summary_text(const RunMetrics& m, const SimLog& log, const Scenario& scenario) {
    std::ostringstream out;
    out.precision(10);
    out << "scenario: " << scenario.name << "\n";
    out << "ticks: " << log.ticks.size() << "  control_period: " << log.control_period
        << "  dt: " << log.dt << "\n";
    out << "omega_target: " << m.omega_target << "\n";
    out << "final_rho_error: " << m.final_rho_error << "\n";
    out << "final_phase_error: " << m.final_phase_error << "\n";
    out << "final_phi_rate_error: " << m.final_phi_rate_error << "\n";
    out << "final_height_error: " << m.final_height_error << "\n";
    if (m.phase_rate_valid) out << "fitted_phase_rate: " << m.fitted_phase_rate << "\n";
    else out << "fitted_phase_rate: undefined (error below fit floor)\n";
    if (m.rho_rate_valid) out << "fitted_rho_rate: " << m.fitted_rho_rate << "\n";
    if (m.height_rate_valid) out << "fitted_height_rate: " << m.fitted_height_rate << "\n";
    if (std::isfinite(m.escape_window)) out << "escape_window: " << m.escape_window << "\n";
    out << "min_pair_distance: " << m.min_pair_distance << "\n";
    out << "final_delta_min: " << m.final_delta_min << "\n";
    out << "delta_min_violations: " << m.delta_min_violations
        << "  worst_dip: " << m.worst_delta_min_dip << "\n";
    if (scenario.safety) {
        out << "max_sigma_deficit: " << m.max_sigma_deficit << "\n";
        out << "final_sigma_gap: " << m.final_sigma_gap << "\n";
    }
    out << "per_robot_message_rate: [" << m.per_robot_rate_min << ", " << m.per_robot_rate_max
        << "]  total: " << m.total_message_rate << "\n";
    return out.str();
}

}  // namespace encircle
