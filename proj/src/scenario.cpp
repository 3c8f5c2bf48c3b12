#include "cdad/errors.hpp"
#include "cdad/model_io.hpp"
#include "cdad/simulator.hpp"

#include <algorithm>
#include <sstream>

namespace cdad {

using nlohmann::json;

double AttackSpec::value(double t, double dt) const
{
    if (t < start - 1e-12) return 0.0;
    switch (kind) {
    case Kind::ramp: return slope * (t - start);
    case Kind::step: return magnitude;
    case Kind::custom: {
        if (samples.empty()) return 0.0;
        const auto idx = static_cast<std::size_t>(std::llround((t - start) / dt));
        return samples[std::min(idx, samples.size() - 1)];
    }
    }
    return 0.0;
}

Vector AttackSpec::offset(double t, double dt, std::size_t n) const
{
    Vector out = Vector::Zero(static_cast<Eigen::Index>(n));
    const double g = value(t, dt);
    for (int a : axes) {
        if (a < 0 || static_cast<std::size_t>(a) >= n)
            throw PreconditionError("attack axis " + std::to_string(a) + " out of range");
        out(a) = g;
    }
    return out;
}

namespace {

double parse_number(const std::string& s, const std::string& what)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ModelError("attack: bad number '" + s + "' for " + what);
    }
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

AttackSpec::Kind attack_kind(const std::string& name)
{
    if (name == "ramp") return AttackSpec::Kind::ramp;
    if (name == "step") return AttackSpec::Kind::step;
    if (name == "custom") return AttackSpec::Kind::custom;
    throw ModelError("attack: unknown kind '" + name + "' (ramp, step, custom)");
}

const char* attack_kind_name(AttackSpec::Kind k)
{
    switch (k) {
    case AttackSpec::Kind::ramp: return "ramp";
    case AttackSpec::Kind::step: return "step";
    case AttackSpec::Kind::custom: return "custom";
    }
    return "ramp";
}

AttackSpec attack_from_json(const json& j)
{
    if (j.is_string()) return parse_attack(j.get<std::string>());
    io::reject_unknown_keys(j, {"kind", "axes", "slope", "magnitude", "start", "values"}, "attack");
    AttackSpec a;
    a.kind = attack_kind(j.value("kind", std::string("ramp")));
    a.axes = j.value("axes", std::vector<int>{0});
    a.slope = j.value("slope", 0.0);
    a.magnitude = j.value("magnitude", 0.0);
    a.start = j.value("start", 0.0);
    a.samples = j.value("values", std::vector<double>{});
    return a;
}

json attack_to_json(const AttackSpec& a)
{
    json j{{"kind", attack_kind_name(a.kind)}, {"axes", a.axes}, {"start", a.start}};
    if (a.kind == AttackSpec::Kind::ramp) j["slope"] = a.slope;
    if (a.kind == AttackSpec::Kind::step) j["magnitude"] = a.magnitude;
    if (a.kind == AttackSpec::Kind::custom) j["values"] = a.samples;
    return j;
}

}  // namespace

AttackSpec parse_attack(const std::string& text)
{
    const auto colon = text.find(':');
    AttackSpec a;
    a.kind = attack_kind(text.substr(0, colon));
    a.axes = {0};
    if (colon == std::string::npos) return a;
    for (const auto& kv : split(text.substr(colon + 1), ',')) {
        if (kv.empty()) continue;
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ModelError("attack: expected key=value, got '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        const std::string val = kv.substr(eq + 1);
        if (key == "axis" || key == "axes") {
            a.axes.clear();
            for (const auto& s : split(val, '+'))
                a.axes.push_back(static_cast<int>(parse_number(s, key)));
        } else if (key == "slope") {
            a.slope = parse_number(val, key);
        } else if (key == "magnitude") {
            a.magnitude = parse_number(val, key);
        } else if (key == "start") {
            a.start = parse_number(val, key);
        } else if (key == "values") {
            for (const auto& s : split(val, ';')) a.samples.push_back(parse_number(s, key));
        } else {
            throw ModelError("attack: unknown key '" + key + "'");
        }
    }
    return a;
}

double ControllerConfig::reference(const Vector& y) const
{
    const double p = y(position_axis);
    for (const auto& z : zones)
        if (z.lo <= p && p < z.hi) return z.reference;
    return default_reference;
}

Vector ControllerConfig::input(const Vector& y, double mu, std::size_t n_inputs) const
{
    const double ref = reference(y);
    Vector u = Vector::Zero(static_cast<Eigen::Index>(n_inputs));
    if (n_inputs > 0) u(0) = std::clamp(ref + speed_gain * (ref - y(speed_axis)), -mu, mu);
    return u;
}

bool SafetyConfig::violated(const Vector& x) const
{
    return std::abs(x(position_axis) - center) <= radius && x(speed_axis) > max_speed;
}

ScenarioConfig scenario_from_json(const json& doc)
{
    io::reject_unknown_keys(doc,
                            {"initial_state", "initial_discrete_state", "prior_events", "controller",
                             "safety", "halt", "duration", "seed", "attack", "baseline_threshold"},
                            "scenario");
    ScenarioConfig cfg;
    if (!doc.contains("initial_state")) throw ModelError("scenario: missing initial_state");
    cfg.initial_state = io::to_vector(doc.at("initial_state"), "scenario.initial_state");
    cfg.initial_discrete_state = doc.value("initial_discrete_state", 0);
    for (const auto& p : doc.value("prior_events", json::array())) {
        if (!p.is_array() || p.size() != 2) throw ModelError("scenario: prior_events entries are [input, output]");
        cfg.prior_events.push_back({p[0].get<std::string>(), p[1].get<std::string>()});
    }
    if (doc.contains("controller")) {
        const auto& c = doc.at("controller");
        io::reject_unknown_keys(c, {"position_axis", "speed_axis", "default_reference", "speed_gain", "zones"},
                                "controller");
        cfg.controller.position_axis = c.value("position_axis", 0);
        cfg.controller.speed_axis = c.value("speed_axis", 1);
        cfg.controller.default_reference = c.value("default_reference", 1.0);
        cfg.controller.speed_gain = c.value("speed_gain", 2.0);
        for (const auto& z : c.value("zones", json::array())) {
            io::reject_unknown_keys(z, {"lo", "hi", "reference"}, "controller zone");
            cfg.controller.zones.push_back(
                {z.at("lo").get<double>(), z.at("hi").get<double>(), z.at("reference").get<double>()});
        }
    }
    if (doc.contains("safety")) {
        const auto& s = doc.at("safety");
        io::reject_unknown_keys(s, {"position_axis", "speed_axis", "center", "radius", "max_speed"}, "safety");
        cfg.safety.position_axis = s.value("position_axis", 0);
        cfg.safety.speed_axis = s.value("speed_axis", 1);
        cfg.safety.center = s.value("center", 60.0);
        cfg.safety.radius = s.value("radius", 12.0);
        cfg.safety.max_speed = s.value("max_speed", 0.4);
    }
    if (doc.contains("halt")) {
        const auto& h = doc.at("halt");
        io::reject_unknown_keys(h, {"axis", "value"}, "halt");
        cfg.halt = HaltConfig{h.value("axis", 0), h.at("value").get<double>()};
    }
    cfg.duration = doc.value("duration", 0.0);
    cfg.seed = doc.value("seed", std::uint64_t{0});
    if (doc.contains("attack") && !doc.at("attack").is_null()) cfg.attack = attack_from_json(doc.at("attack"));
    if (doc.contains("baseline_threshold")) cfg.baseline_threshold = doc.at("baseline_threshold").get<double>();
    return cfg;
}

json scenario_to_json(const ScenarioConfig& cfg)
{
    json j;
    j["initial_state"] = io::from_vector(cfg.initial_state);
    j["initial_discrete_state"] = cfg.initial_discrete_state;
    j["prior_events"] = json::array();
    for (const auto& p : cfg.prior_events) j["prior_events"].push_back({p.input, p.output});
    json zones = json::array();
    for (const auto& z : cfg.controller.zones) zones.push_back({{"lo", z.lo}, {"hi", z.hi}, {"reference", z.reference}});
    j["controller"] = {{"position_axis", cfg.controller.position_axis},
                       {"speed_axis", cfg.controller.speed_axis},
                       {"default_reference", cfg.controller.default_reference},
                       {"speed_gain", cfg.controller.speed_gain},
                       {"zones", zones}};
    j["safety"] = {{"position_axis", cfg.safety.position_axis},
                   {"speed_axis", cfg.safety.speed_axis},
                   {"center", cfg.safety.center},
                   {"radius", cfg.safety.radius},
                   {"max_speed", cfg.safety.max_speed}};
    if (cfg.halt) j["halt"] = {{"axis", cfg.halt->axis}, {"value", cfg.halt->value}};
    j["duration"] = cfg.duration;
    j["seed"] = cfg.seed;
    if (cfg.attack) j["attack"] = attack_to_json(*cfg.attack);
    if (cfg.baseline_threshold) j["baseline_threshold"] = *cfg.baseline_threshold;
    return j;
}

namespace {

// Train-Gate: position/speed of a train on an 80 m track, gate at 60 m,
// sensors at 45 m and 75 m, 0.1 s sampling.
constexpr const char* kTrainGate = R"json({
  "name": "train-gate",
  "states": [
    {"id": 1, "A": [[1, 0.1], [0, 0.95]], "B": [[0], [0.05]], "invariant": [[0, 46], [0, 1.5]]},
    {"id": 2, "A": [[1, 0.1], [0, 0.95]], "B": [[0], [0.05]], "invariant": [[45, 76], [0, 0.4]]},
    {"id": 3, "A": [[1, 0.1], [0, 0.95]], "B": [[0], [0.05]], "invariant": [[75, 80], [0, 1.5]]}
  ],
  "events": [
    {"id": "c_down", "kind": "input"},
    {"id": "c_up", "kind": "input"},
    {"id": "c_exit", "kind": "input"},
    {"id": "s_1", "kind": "output"},
    {"id": "s_2", "kind": "output"},
    {"id": "s_exit", "kind": "output"}
  ],
  "transitions": [
    {"source": 1, "input_event": "c_down", "output_event": "s_1", "target": 2,
     "guard": {"axis": 0, "sign": 1, "threshold": 45}},
    {"source": 2, "input_event": "c_up", "output_event": "s_2", "target": 3,
     "guard": {"axis": 0, "sign": 1, "threshold": 75}},
    {"source": 3, "input_event": "c_exit", "output_event": "s_exit", "target": 1,
     "guard": {"axis": 0, "sign": 1, "threshold": 80}}
  ],
  "noise": {"w": [0.01, 0.01], "v": [0.1, 0.1]},
  "input_bound": 1.0,
  "sampling_period": 0.1,
  "dwell_time": 100,
  "theta": 0.05,
  "scenario": {
    "initial_state": [0, 1],
    "initial_discrete_state": 1,
    "prior_events": [["c_exit", "s_exit"]],
    "controller": {
      "position_axis": 0, "speed_axis": 1, "default_reference": 1.0, "speed_gain": 2.0,
      "zones": [{"lo": 44, "hi": 75, "reference": 0.2}]
    },
    "safety": {"position_axis": 0, "speed_axis": 1, "center": 60, "radius": 12, "max_speed": 0.4},
    "halt": {"axis": 0, "value": 80},
    "duration": 300,
    "seed": 0
  }
})json";

}  // namespace

HybridAutomaton builtin_train_gate() { return parse_model(kTrainGate); }

ScenarioConfig builtin_train_gate_scenario()
{
    return scenario_from_json(json::parse(kTrainGate).at("scenario"));
}

LoadedScenario load_scenario(const std::string& path_or_builtin)
{
    if (path_or_builtin == "train-gate")
        return {builtin_train_gate(), builtin_train_gate_scenario()};
    const json doc = read_json_file(path_or_builtin);
    if (!doc.contains("scenario"))
        throw ModelError(path_or_builtin + ": no scenario section; simulation needs one");
    return {model_from_json(doc), scenario_from_json(doc.at("scenario"))};
}

}  // namespace cdad
