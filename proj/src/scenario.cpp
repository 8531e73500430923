#include "encircle/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace encircle {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path.empty() ? what : path + ": " + what);
}

void require_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key)) fail(path.empty() ? key : path + "." + key, "unknown key");
}

double get_number(const json& obj, const std::string& path, const std::string& key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) fail(path + "." + key, "expected a number");
    return obj[key].get<double>();
}

long get_integer(const json& obj, const std::string& path, const std::string& key, long fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer()) fail(path + "." + key, "expected an integer");
    return obj[key].get<long>();
}

bool get_bool(const json& obj, const std::string& path, const std::string& key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_boolean()) fail(path + "." + key, "expected a boolean");
    return obj[key].get<bool>();
}

std::string get_string(const json& obj, const std::string& path, const std::string& key,
                       const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_string()) fail(path + "." + key, "expected a string");
    return obj[key].get<std::string>();
}

Vec3 get_vec3(const json& obj, const std::string& path, const std::string& key, const Vec3& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& arr = obj[key];
    if (!arr.is_array() || arr.size() != 3) fail(path + "." + key, "expected an array of 3 numbers");
    return Vec3(arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>());
}

void parse_initial(const json& obj, const std::string& path, InitialConditions& out) {
    require_keys(obj, path, {"kind", "positions", "rho_range", "z_span", "phase_perturbation"});
    const std::string kind = get_string(obj, path, "kind", "random_shell");
    if (kind == "explicit") {
        if (!obj.contains("positions")) fail(path + ".positions", "required for explicit initials");
        for (const auto& row : obj["positions"]) {
            if (!row.is_array() || row.size() != 3)
                fail(path + ".positions", "each entry must be [rho, phi, z]");
            out.explicit_positions.push_back(
                {row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
        }
    } else if (kind == "random_shell") {
        if (obj.contains("rho_range")) {
            const json& r = obj["rho_range"];
            if (!r.is_array() || r.size() != 2) fail(path + ".rho_range", "expected [min, max]");
            out.rho_min = r[0].get<double>();
            out.rho_max = r[1].get<double>();
        }
        out.z_span = get_number(obj, path, "z_span", out.z_span);
        out.phase_perturbation = get_number(obj, path, "phase_perturbation", out.phase_perturbation);
    } else {
        fail(path + ".kind", "expected \"explicit\" or \"random_shell\"");
    }
}

void parse_target(const json& obj, const std::string& path, TargetMotion& out) {
    require_keys(obj, path, {"position", "plane_axis", "segments"});
    out.position = get_vec3(obj, path, "position", out.position);
    out.plane_axis = get_vec3(obj, path, "plane_axis", out.plane_axis);
    if (obj.contains("segments")) {
        for (const auto& seg : obj["segments"]) {
            require_keys(seg, path + ".segments[]", {"duration", "velocity", "omega"});
            TargetSegment s;
            s.duration = get_number(seg, path + ".segments[]", "duration", 0.0);
            s.velocity = get_vec3(seg, path + ".segments[]", "velocity", Vec3::Zero());
            s.omega = get_vec3(seg, path + ".segments[]", "omega", Vec3::Zero());
            out.segments.push_back(s);
        }
    }
}

void parse_controller(const json& obj, const std::string& path, ControllerConfig& out) {
    require_keys(obj, path, {"mode", "rho_star", "omega_star", "escape_window", "xi", "gains"});
    const std::string mode = get_string(obj, path, "mode", "v1");
    if (mode == "v1") out.kind = ControllerKind::kV1;
    else if (mode == "v2") out.kind = ControllerKind::kV2;
    else if (mode == "v3") out.kind = ControllerKind::kV3;
    else if (mode == "v1_star") out.kind = ControllerKind::kV1Star;
    else fail(path + ".mode", "expected v1, v2, v3 or v1_star");
    out.rho_star = get_number(obj, path, "rho_star", out.rho_star);
    out.omega_star = get_number(obj, path, "omega_star", out.omega_star);
    out.escape_window = get_number(obj, path, "escape_window", out.escape_window);
    if (obj.contains("xi")) {
        const json& xi = obj["xi"];
        require_keys(xi, path + ".xi", {"values", "mean", "spread", "seed"});
        if (xi.contains("values"))
            for (const auto& v : xi["values"]) out.xi.values.push_back(v.get<double>());
        out.xi.mean = get_number(xi, path + ".xi", "mean", out.xi.mean);
        out.xi.spread = get_number(xi, path + ".xi", "spread", out.xi.spread);
        out.xi.seed = static_cast<unsigned>(get_integer(xi, path + ".xi", "seed", out.xi.seed));
    }
    if (obj.contains("gains")) {
        const json& g = obj["gains"];
        require_keys(g, path + ".gains", {"k_rho", "k_z", "k_phi", "k_omega"});
        out.gains.k_rho = get_number(g, path + ".gains", "k_rho", out.gains.k_rho);
        out.gains.k_z = get_number(g, path + ".gains", "k_z", out.gains.k_z);
        out.gains.k_phi = get_number(g, path + ".gains", "k_phi", out.gains.k_phi);
        out.gains.k_omega = get_number(g, path + ".gains", "k_omega", out.gains.k_omega);
    }
}

void parse_safety(const json& obj, const std::string& path, std::optional<SafetyParams>& out) {
    require_keys(obj, path, {"radius", "eps_r", "lambda_shape"});
    SafetyParams p;
    p.radius = get_number(obj, path, "radius", p.radius);
    p.eps_r = get_number(obj, path, "eps_r", p.eps_r);
    const std::string shape = get_string(obj, path, "lambda_shape", "sinusoidal");
    if (shape == "linear") p.lambda_shape = LambdaShape::kLinear;
    else if (shape == "sinusoidal") p.lambda_shape = LambdaShape::kSinusoidal;
    else fail(path + ".lambda_shape", "expected linear or sinusoidal");
    out = p;
}

void parse_topology(const json& obj, const std::string& path, TopologyConfig& out) {
    require_keys(obj, path, {"kind", "schedule", "staleness_ticks"});
    const std::string kind = get_string(obj, path, "kind", "ring");
    if (kind == "ring") out.kind = TopologyKind::kRing;
    else if (kind == "line") out.kind = TopologyKind::kLine;
    else if (kind == "custom") out.kind = TopologyKind::kCustom;
    else fail(path + ".kind", "expected ring, line or custom");
    if (obj.contains("schedule")) {
        for (const auto& ep : obj["schedule"]) {
            require_keys(ep, path + ".schedule[]", {"edges", "ticks"});
            TopologyConfig::Epoch epoch;
            epoch.ticks = get_integer(ep, path + ".schedule[]", "ticks", 1);
            if (ep.contains("edges"))
                for (const auto& e : ep["edges"]) {
                    if (!e.is_array() || e.size() != 2)
                        fail(path + ".schedule[].edges", "each edge must be [a, b]");
                    epoch.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
                }
            out.schedule.push_back(std::move(epoch));
        }
    }
    out.staleness_ticks =
        static_cast<int>(get_integer(obj, path, "staleness_ticks", out.staleness_ticks));
}

void parse_estimator(const json& obj, const std::string& path, EstimatorConfig& out) {
    require_keys(obj, path, {"informed", "k_eta", "oracle_globals"});
    out.informed = static_cast<int>(get_integer(obj, path, "informed", out.informed));
    if (obj.contains("k_eta")) out.k_eta = get_number(obj, path, "k_eta", 0.0);
    out.oracle_globals = get_bool(obj, path, "oracle_globals", out.oracle_globals);
}

void parse_churn(const json& arr, const std::string& path, std::vector<ChurnEvent>& out) {
    for (const auto& ev : arr) {
        require_keys(ev, path + "[]", {"t", "action", "robot", "position"});
        ChurnEvent e;
        e.time = get_number(ev, path + "[]", "t", 0.0);
        const std::string action = get_string(ev, path + "[]", "action", "");
        if (action == "add") e.add = true;
        else if (action == "remove") e.add = false;
        else fail(path + "[].action", "expected add or remove");
        e.robot = static_cast<int>(get_integer(ev, path + "[]", "robot", 0));
        if (ev.contains("position")) {
            const json& p = ev["position"];
            if (!p.is_array() || p.size() != 3) fail(path + "[].position", "expected [rho, phi, z]");
            e.position = {p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
        }
        out.push_back(e);
    }
}

}  // namespace

TargetFrame TargetMotion::initial_frame() const {
    TargetFrame f;
    f.position = position;
    Vec3 z_axis = plane_axis;
    if (z_axis.norm() < 1e-12) throw ConfigError("target.plane_axis must be nonzero");
    z_axis.normalize();
    // Any orthonormal completion works; pick the most stable seed axis.
    Vec3 seed = std::abs(z_axis.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 x_axis = (seed - z_axis.dot(seed) * z_axis).normalized();
    const Vec3 y_axis = z_axis.cross(x_axis);
    f.rotation.col(0) = x_axis;
    f.rotation.col(1) = y_axis;
    f.rotation.col(2) = z_axis;
    if (!segments.empty()) {
        f.velocity = segments.front().velocity;
        f.omega = segments.front().omega;
    }
    return f;
}

long Scenario::control_ticks() const {
    return std::lround(duration / control_period);
}

int Scenario::substeps_per_tick() const {
    return static_cast<int>(std::lround(control_period / dt));
}

double Scenario::k_eta() const {
    if (estimator.k_eta) return *estimator.k_eta;
    return 10.0 * std::max({controller.gains.k_rho, controller.gains.k_phi, controller.gains.k_z});
}

int Scenario::reset_period_m() const {
    return n_max > 0 ? n_max : n;
}

void Scenario::validate() const {
    if (n < 2) throw TooFewRobots(n);
    if (duration <= 0.0) throw ConfigError("duration must be positive");
    if (dt <= 0.0 || control_period <= 0.0) throw ConfigError("dt and control_period must be positive");
    if (dt > control_period + 1e-15) throw ConfigError("dt must not exceed control_period");
    const double ratio = control_period / dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9)
        throw ConfigError("control_period must be an integer multiple of dt");
    controller.gains.validate();
    if (safety) safety->validate();
    if (controller.kind == ControllerKind::kV1Star && !safety)
        throw ConfigError("v1_star requires a safety block");
    if (controller.kind == ControllerKind::kV2 && controller.escape_window <= 0.0)
        throw InvalidWindow(controller.escape_window);
    if (!initial.explicit_positions.empty()
        && initial.explicit_positions.size() != static_cast<std::size_t>(n))
        throw ConfigError("explicit positions must list exactly n robots");
    if (n_max > 0 && n_max < n) throw ConfigError("n_max must be at least n");
    if (estimator.informed < 1 || estimator.informed > n)
        throw ConfigError("estimator.informed must name a robot id in 1..n");
}

Scenario parse_scenario(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario parse error: ") + e.what());
    }
    require_keys(root, "",
                 {"name", "n", "seed", "duration", "dt", "control_period", "n_max", "initial",
                  "target", "controller", "safety", "topology", "estimator", "churn", "output"});
    Scenario s;
    s.name = get_string(root, "", "name", s.name);
    s.n = static_cast<int>(get_integer(root, "", "n", s.n));
    s.seed = static_cast<unsigned>(get_integer(root, "", "seed", s.seed));
    s.duration = get_number(root, "", "duration", s.duration);
    s.dt = get_number(root, "", "dt", s.dt);
    s.control_period = get_number(root, "", "control_period", s.control_period);
    s.n_max = static_cast<int>(get_integer(root, "", "n_max", s.n_max));
    if (root.contains("initial")) parse_initial(root["initial"], "initial", s.initial);
    if (root.contains("target")) parse_target(root["target"], "target", s.target);
    if (root.contains("controller")) parse_controller(root["controller"], "controller", s.controller);
    if (root.contains("safety")) parse_safety(root["safety"], "safety", s.safety);
    if (root.contains("topology")) parse_topology(root["topology"], "topology", s.topology);
    if (root.contains("estimator")) parse_estimator(root["estimator"], "estimator", s.estimator);
    if (root.contains("churn")) parse_churn(root["churn"], "churn", s.churn);
    if (root.contains("output")) {
        require_keys(root["output"], "output", {"message_trace", "distances"});
        s.output.message_trace = get_bool(root["output"], "output", "message_trace", false);
        s.output.distances = get_bool(root["output"], "output", "distances", true);
    }
    s.validate();
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

std::string apply_override(const std::string& json_text, const std::string& key_value) {
    const auto eq = key_value.find('=');
    if (eq == std::string::npos) throw ConfigError("override must look like key.path=value");
    const std::string key_path = key_value.substr(0, eq);
    const std::string value_text = key_value.substr(eq + 1);

    json root = json::parse(json_text);
    json* node = &root;
    std::stringstream keys(key_path);
    std::string key;
    std::vector<std::string> parts;
    while (std::getline(keys, key, '.')) parts.push_back(key);
    if (parts.empty()) throw ConfigError("override key path is empty");
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!node->contains(parts[i])) (*node)[parts[i]] = json::object();
        node = &(*node)[parts[i]];
    }
    json value;
    try {
        value = json::parse(value_text);
    } catch (const json::parse_error&) {
        value = value_text;  // bare string
    }
    (*node)[parts.back()] = value;
    return root.dump();
}

}  // namespace encircle
