#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "encircle/metrics.hpp"
#include "encircle/simulator.hpp"

using namespace encircle;

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// Small planar scenario used by several tests.
std::string base_scenario(const std::string& extra = "") {
    return R"({
      "name": "mini",
      "n": 4,
      "seed": 3,
      "duration": 2.0,
      "dt": 0.001,
      "control_period": 0.01,
      "initial": {
        "kind": "explicit",
        "positions": [[2.3, 0.4, 0.2], [1.7, 1.9, -0.1], [2.6, 3.4, 0.3], [2.0, 5.0, 0.0]]
      },
      "target": { "position": [0,0,0], "plane_axis": [0,0,1], "segments": [] },
      "controller": { "mode": "v1", "rho_star": 2.0, "omega_star": 0.8,
                      "gains": { "k_rho": 1.0, "k_z": 1.5, "k_phi": 2.0 } },
      "topology": { "kind": "ring", "staleness_ticks": 2 },
      "estimator": { "informed": 1, "oracle_globals": true })"
        + extra + "\n}";
}

std::string csv_bytes(const SimLog& log) {
    const auto tmp = std::filesystem::temp_directory_path() / "encircle_test_states.csv";
    write_states_csv(log, tmp.string());
    std::ifstream in(tmp);
    std::stringstream buf;
    buf << in.rdbuf();
    std::filesystem::remove(tmp);
    return buf.str();
}

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("scenario parsing rejects unknown keys with the offending path") {
    CHECK_THROWS_AS(parse_scenario(R"({"title": "x"})"), ConfigError);
    try {
        parse_scenario(R"({"n": 4, "controller": {"mode": "v1", "bogus": 1}})");
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("controller.bogus") != std::string::npos);
    }
}

TEST_CASE("scenario validation catches inconsistent timing and modes") {
    CHECK_THROWS_AS(parse_scenario(R"({"n": 1})"), TooFewRobots);
    CHECK_THROWS_AS(parse_scenario(R"({"n": 4, "dt": 0.02, "control_period": 0.01})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_scenario(R"({"n": 4, "dt": 0.003, "control_period": 0.01})"),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_scenario(R"({"n": 4, "controller": {"mode": "v2", "escape_window": -1.0}})"),
        InvalidWindow);
    CHECK_THROWS_AS(parse_scenario(R"({"n": 4, "controller": {"mode": "v1_star"}})"),
                    ConfigError);
}

TEST_CASE("overrides rewrite nested keys") {
    const std::string text = apply_override(base_scenario(), "controller.omega_star=1.2");
    const Scenario s = parse_scenario(text);
    CHECK(s.controller.omega_star == doctest::Approx(1.2));
    const Scenario s2 = parse_scenario(apply_override(text, "seed=99"));
    CHECK(s2.seed == 99);
}

TEST_CASE("identical scenario and seed give byte-identical logs") {
    const Scenario s = parse_scenario(base_scenario());
    const SimLog a = run_scenario(s);
    const SimLog b = run_scenario(s);
    CHECK(csv_bytes(a) == csv_bytes(b));
    CHECK(!csv_bytes(a).empty());
}

TEST_CASE("robot processing order does not change the result") {
    const Scenario s = parse_scenario(base_scenario());
    Simulation forward(s);
    Simulation reversed(s);
    reversed.set_step_order({4, 3, 2, 1});
    const SimLog a = forward.run();
    const SimLog b = reversed.run();
    CHECK(csv_bytes(a) == csv_bytes(b));
}

TEST_CASE("per-tick motion is bounded by the command magnitude") {
    const Scenario s = parse_scenario(base_scenario());
    const SimLog log = run_scenario(s);
    for (std::size_t k = 0; k + 1 < log.ticks.size(); ++k) {
        for (std::size_t i = 0; i < log.ticks[k].robots.size(); ++i) {
            const auto& now = log.ticks[k].robots[i];
            const auto& next = log.ticks[k + 1].robots[i];
            const double moved = (next.position - now.position).norm();
            CHECK(moved <= now.command.norm() * log.control_period + 1e-12);
        }
    }
}

TEST_CASE("a splay start under zero commanded speed stays put") {
    const std::string text = R"({
      "name": "splay",
      "n": 4,
      "seed": 3,
      "duration": 1.0,
      "dt": 0.001,
      "control_period": 0.01,
      "initial": {
        "kind": "explicit",
        "positions": [[2.0, 0.0, 0.0], [2.0, 1.5707963267948966, 0.0],
                      [2.0, 3.141592653589793, 0.0], [2.0, 4.71238898038469, 0.0]]
      },
      "target": { "position": [0,0,0], "plane_axis": [0,0,1], "segments": [] },
      "controller": { "mode": "v1", "rho_star": 2.0, "omega_star": 0.0,
                      "gains": { "k_rho": 1.0, "k_z": 1.5, "k_phi": 2.0 } },
      "topology": { "kind": "ring", "staleness_ticks": 2 },
      "estimator": { "informed": 1, "oracle_globals": true }
    })";
    const Scenario s = parse_scenario(text);
    const SimLog log = run_scenario(s);
    const RunMetrics m = compute_metrics(log, s);
    CHECK(m.final_rho_error < 1e-9);
    CHECK(m.final_phase_error < 1e-9);
    CHECK(m.final_height_error < 1e-9);
    CHECK_FALSE(m.phase_rate_valid);  // nothing to fit
    CHECK(std::isnan(m.escape_window));
}

TEST_CASE("estimated-globals run converges like the oracle run") {
    Scenario s = parse_scenario(base_scenario());
    s.estimator.oracle_globals = false;
    s.duration = 6.0;
    const SimLog log = run_scenario(s);
    const RunMetrics m = compute_metrics(log, s);
    CHECK(m.final_phase_error < 1e-2);
    CHECK(m.final_rho_error < 2e-2);
}

TEST_CASE("metrics on a converged run report the escape window") {
    Scenario s = parse_scenario(base_scenario());
    s.duration = 12.0;
    const SimLog log = run_scenario(s);
    const RunMetrics m = compute_metrics(log, s);
    // Splay of 4 robots at omega* = 0.8: window = 2*pi / (n * omega).
    CHECK(m.escape_window == doctest::Approx(kTwoPi / (4 * 0.8)).epsilon(0.02));
    CHECK(m.final_delta_min == doctest::Approx(kTwoPi / 4).epsilon(1e-3));
    CHECK(m.delta_min_violations == 0);
}

TEST_CASE("churn: insertion and removal re-target the ring") {
    const std::string text = R"({
      "name": "churn",
      "n": 4,
      "seed": 3,
      "duration": 9.0,
      "dt": 0.001,
      "control_period": 0.01,
      "n_max": 6,
      "initial": {
        "kind": "explicit",
        "positions": [[2.3, 0.4, 0.1], [1.7, 1.9, -0.1], [2.6, 3.4, 0.2], [2.0, 5.0, 0.0]]
      },
      "target": { "position": [0,0,0], "plane_axis": [0,0,1], "segments": [] },
      "controller": { "mode": "v1", "rho_star": 2.0, "omega_star": 0.6,
                      "gains": { "k_rho": 1.0, "k_z": 1.5, "k_phi": 2.0 } },
      "topology": { "kind": "ring", "staleness_ticks": 2 },
      "estimator": { "informed": 1, "oracle_globals": true },
      "churn": [
        { "t": 3.0, "action": "add", "position": [2.1, 1.2, 0.0] },
        { "t": 6.0, "action": "remove", "robot": 3 }
      ]
    })";
    const Scenario s = parse_scenario(text);
    const SimLog log = run_scenario(s);

    // Hand-computed neighbor map: the newcomer (id 5) lands between the
    // robots that bracket phase 1.2 at t = 3. All robots rotate together, so
    // the bracket pair keeps the t0 ordering: 5 sits between ids 1 and 2.
    auto ids_at = [&](double t) {
        for (const TickSample& ts : log.ticks)
            if (std::abs(ts.t - t) < 1e-9) {
                std::vector<int> ids;
                for (const RobotSample& r : ts.robots) ids.push_back(r.id);
                return ids;
            }
        return std::vector<int>{};
    };
    CHECK(ids_at(2.99) == std::vector<int>{1, 2, 3, 4});
    CHECK(ids_at(3.01) == std::vector<int>{1, 5, 2, 3, 4});
    CHECK(ids_at(6.01) == std::vector<int>{1, 5, 2, 4});

    // The ring settles again after both events.
    const RunMetrics m = compute_metrics(log, s);
    CHECK(m.final_delta_min == doctest::Approx(kTwoPi / 4).epsilon(1e-2));
    CHECK(m.final_phase_error < 1e-2);

    // Delta sums stay at 2*pi through both ring rearrangements.
    for (const TickSample& ts : log.ticks) {
        double sum = 0.0;
        for (double d : ts.delta) sum += d;
        CHECK(sum == doctest::Approx(kTwoPi).epsilon(1e-9));
    }
}

TEST_CASE("neighbor data that can no longer arrive in time aborts the run") {
    // Ring epoch first, then a line epoch: the seam pair is suddenly 4 hops
    // apart, which the 2-tick staleness bound cannot absorb.
    const std::string text = R"({
      "name": "stale",
      "n": 5,
      "seed": 3,
      "duration": 2.0,
      "dt": 0.001,
      "control_period": 0.01,
      "initial": {
        "kind": "explicit",
        "positions": [[2.0, 0.3, 0.0], [2.0, 1.5, 0.0], [2.0, 2.7, 0.0],
                      [2.0, 3.9, 0.0], [2.0, 5.1, 0.0]]
      },
      "target": { "position": [0,0,0], "plane_axis": [0,0,1], "segments": [] },
      "controller": { "mode": "v1", "rho_star": 2.0, "omega_star": 0.8,
                      "gains": { "k_rho": 1.0, "k_z": 1.5, "k_phi": 2.0 } },
      "topology": {
        "kind": "custom",
        "staleness_ticks": 2,
        "schedule": [
          { "edges": [[1,2],[2,3],[3,4],[4,5],[5,1]], "ticks": 3 },
          { "edges": [[1,2],[2,3],[3,4],[4,5]], "ticks": 1000 }
        ]
      },
      "estimator": { "informed": 1, "oracle_globals": true }
    })";
    const Scenario s = parse_scenario(text);
    try {
        run_scenario(s);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("neighbor phase") != std::string::npos);
    }
}

TEST_CASE("line topology works when the staleness bound covers the diameter") {
    Scenario s = parse_scenario(base_scenario());
    s.topology.kind = TopologyKind::kLine;
    s.topology.staleness_ticks = 4;
    s.duration = 6.0;
    const SimLog log = run_scenario(s);
    const RunMetrics m = compute_metrics(log, s);
    CHECK(m.final_phase_error < 5e-2);
}

}  // TEST_SUITE
