// Command-line front end: model checks, horizon/bound tables and simulation.

#include "cdad/errors.hpp"
#include "cdad/guarantee_solver.hpp"
#include "cdad/model_io.hpp"
#include "cdad/simulator.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>

namespace {

using namespace cdad;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitAlarm = 2;

HybridAutomaton load_any(const std::string& path)
{
    return path == "train-gate" ? builtin_train_gate() : load_model(path);
}

std::string fmt_bound(double v)
{
    if (!std::isfinite(v)) return "n/a";
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

json thresholds_json(const HybridAutomaton& model)
{
    json out = json::object();
    for (const auto& [q, b] : compute_bounds(model))
        out[std::to_string(q)] = b.threshold ? json(*b.threshold) : json(nullptr);
    return out;
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& s)
{
    const auto dots = s.find("..");
    if (dots == std::string::npos) {
        const auto v = std::stoull(s);
        return {v, v};
    }
    return {std::stoull(s.substr(0, dots)), std::stoull(s.substr(dots + 2))};
}

int cmd_validate(const std::string& path)
{
    const auto model = load_any(path);
    const auto issues = validate_model(model);
    if (issues.empty()) {
        std::cout << "OK: " << (model.name.empty() ? path : model.name) << " satisfies all checks\n";
        return kExitOk;
    }
    for (const auto& v : issues) std::cout << to_string(v.kind) << ": " << v.message << '\n';
    return kExitError;
}

int cmd_regions(const std::string& path)
{
    const auto model = load_any(path);
    const auto regions = decompose_regions(model);
    auto box_str = [](const Box& b) {
        std::ostringstream os;
        for (std::size_t i = 0; i < b.dim(); ++i) os << (i ? " x " : "") << '[' << b[i].lo << ", " << b[i].hi << ']';
        return os.str();
    };
    std::cout << "intermediate:\n";
    for (const auto& b : regions.intermediate) std::cout << "  " << box_str(b) << '\n';
    for (const auto& r : regions.normal) {
        std::cout << "normal " << r.state << ": " << box_str(r.invariant);
        for (const auto& h : r.holes) std::cout << " minus " << box_str(h);
        std::cout << '\n';
    }
    for (const auto& [ti, nb] : regions.neighbors)
        std::cout << "neighbor of transition " << ti << ": axis " << nb.axis << " guard " << nb.guard_plane
                  << " neighbor " << nb.value << '\n';
    return kExitOk;
}

int cmd_observability(const std::string& path)
{
    const auto model = load_any(path);
    const auto obs = build_observer(extract_fsm(model));
    const auto verdict = check_current_state_observability(obs);
    if (verdict.observable) {
        std::cout << "k = " << verdict.k << '\n';
        return kExitOk;
    }
    std::cout << "NOT-OBSERVABLE";
    for (const auto& node : verdict.offending) std::cout << ' ' << to_string(node);
    std::cout << '\n';
    return kExitOk;
}

int cmd_delta(const std::string& path)
{
    const auto model = load_any(path);
    std::cout << std::left << std::setw(8) << "state" << std::setw(8) << "delta" << "per-guard\n";
    for (const auto& [q, d] : compute_all_deltas(model)) {
        std::cout << std::setw(8) << q << std::setw(8) << d.delta;
        for (const auto& [ti, v] : d.per_guard) std::cout << " t" << ti << '=' << v;
        std::cout << '\n';
    }
    return kExitOk;
}

int cmd_bounds(const std::string& path)
{
    const auto model = load_any(path);
    std::cout << std::left << std::setw(8) << "state" << std::setw(8) << "delta" << std::setw(12) << "z*"
              << std::setw(12) << "d*" << "threshold\n";
    for (const auto& [q, b] : compute_bounds(model)) {
        std::cout << std::setw(8) << q << std::setw(8) << b.delta << std::setw(12) << fmt_bound(b.z_star)
                  << std::setw(12) << fmt_bound(b.d_star)
                  << (b.threshold ? fmt_bound(*b.threshold) : std::string("no guarantee")) << '\n';
    }
    return kExitOk;
}

int cmd_fdia(const std::string& path, int state, const std::vector<int>& gamma)
{
    const auto model = load_any(path);
    const auto c = classify_fdia(model, state, gamma);
    std::cout << to_string(c.verdict) << ": " << c.message << '\n';
    if (c.eigenvalue) std::cout << "eigenvalue " << c.eigenvalue->real() << (c.eigenvalue->imag() < 0 ? "" : "+")
                                << c.eigenvalue->imag() << "i\n";
    if (c.eigenvector) std::cout << "eigenvector " << c.eigenvector->transpose() << '\n';
    return kExitOk;
}

struct RunOptions {
    std::string model = "train-gate";
    std::string attack;
    std::optional<double> duration;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format = "csv";
    std::string seeds = "0..19";
    unsigned workers = 0;
    int runs = 100;
};

ScenarioConfig scenario_for(const LoadedScenario& ls, const RunOptions& o)
{
    ScenarioConfig cfg = ls.scenario;
    if (!o.attack.empty()) cfg.attack = o.attack == "none" ? std::nullopt : std::optional(parse_attack(o.attack));
    if (o.duration) cfg.duration = *o.duration;
    if (o.seed) cfg.seed = *o.seed;
    return cfg;
}

int cmd_run(const RunOptions& o)
{
    const auto ls = load_scenario(o.model);
    const Simulator sim(ls.model);
    const auto cfg = scenario_for(ls, o);
    const auto res = sim.run(cfg);
    if (!o.out.empty()) {
        std::ofstream f(o.out);
        if (!f) throw Error("cannot write " + o.out);
        if (o.format == "jsonl")
            write_trace_jsonl(f, res.trace);
        else
            write_trace_csv(f, res.trace);
    }
    json summary = summary_to_json(res.summary);
    summary["detection_thresholds"] = thresholds_json(ls.model);
    std::cout << summary.dump(2) << '\n';
    return res.summary.conflict_alarm || res.summary.residual_alarm ? kExitAlarm : kExitOk;
}

int cmd_sweep(const RunOptions& o)
{
    const auto ls = load_scenario(o.model);
    const Simulator sim(ls.model);
    const auto cfg = scenario_for(ls, o);
    const auto [first, last] = parse_seed_range(o.seeds);
    const auto results = sweep(sim, cfg, first, last, o.workers);
    json runs = json::array();
    int conflict_runs = 0;
    int residual_runs = 0;
    int violation_runs = 0;
    for (const auto& s : results) {
        runs.push_back(summary_to_json(s));
        conflict_runs += s.conflict_alarm.has_value();
        residual_runs += s.residual_alarm.has_value();
        violation_runs += s.violation.has_value();
    }
    json doc{{"runs", runs},
             {"aggregate",
              {{"count", results.size()},
               {"conflict_alarm_runs", conflict_runs},
               {"residual_alarm_runs", residual_runs},
               {"safety_violation_runs", violation_runs}}},
             {"detection_thresholds", thresholds_json(ls.model)}};
    std::cout << doc.dump(2) << '\n';
    return conflict_runs || residual_runs ? kExitAlarm : kExitOk;
}

int cmd_calibrate(const RunOptions& o)
{
    const auto ls = load_scenario(o.model);
    const Simulator sim(ls.model);
    const auto cal = calibrate_theta(sim, scenario_for(ls, o), o.runs, o.seed.value_or(0), o.workers);
    std::cout << "runs " << cal.runs << "\nmax steady-state error " << cal.max_error
              << "\nmax steady-state residual " << cal.max_residual << "\nconfigured theta "
              << cal.configured_theta << '\n';
    if (cal.max_error > cal.configured_theta)
        std::cout << "warning: empirical error exceeds the configured theta\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Conflict-driven anomaly detection for hybrid systems"};
    app.require_subcommand(1);
    std::string model_path;
    RunOptions ro;
    int fdia_state = 1;
    std::vector<int> fdia_gamma;

    auto add_model = [&](CLI::App* sub) {
        sub->add_option("model", model_path, "Model JSON file, or 'train-gate'")->required();
    };
    auto* validate = app.add_subcommand("validate", "Check the structural assumptions of a model");
    add_model(validate);
    auto* regions = app.add_subcommand("regions", "Print intermediate and normal operating regions");
    add_model(regions);
    auto* obs = app.add_subcommand("check-observability", "Discrete observer horizon k");
    add_model(obs);
    auto* delta = app.add_subcommand("compute-delta", "Per-state reachability horizon table");
    add_model(delta);
    auto* bounds = app.add_subcommand("compute-bounds", "Guaranteed-detection thresholds per state");
    add_model(bounds);
    auto* fdia = app.add_subcommand("classify-fdia", "Residual-stealthy attack feasibility");
    add_model(fdia);
    fdia->add_option("--state", fdia_state, "Discrete state id")->required();
    fdia->add_option("--gamma", fdia_gamma, "Attacked coordinates")->required();

    auto add_run_opts = [&](CLI::App* sub) {
        sub->add_option("model", ro.model, "Model JSON file with a scenario section, or 'train-gate'")->required();
        sub->add_option("--attack", ro.attack, "e.g. ramp:axis=0,slope=0.02,start=0 (or 'none')");
        sub->add_option("--duration", ro.duration, "Seconds");
        sub->add_option("--workers", ro.workers, "Worker threads (0 = hardware)");
    };
    auto* run = app.add_subcommand("run", "Simulate one seeded run and print its summary");
    add_run_opts(run);
    run->add_option("--seed", ro.seed, "RNG seed");
    run->add_option("--out", ro.out, "Trace output file");
    run->add_option("--format", ro.format, "Trace format")->check(CLI::IsMember({"csv", "jsonl"}));
    auto* sweep_cmd = app.add_subcommand("sweep", "Simulate a range of seeds in parallel");
    add_run_opts(sweep_cmd);
    sweep_cmd->add_option("--seeds", ro.seeds, "Seed range A..B");
    auto* calibrate = app.add_subcommand("calibrate-theta", "Empirical steady-state error over nominal runs");
    add_run_opts(calibrate);
    calibrate->add_option("--runs", ro.runs, "Number of runs");
    calibrate->add_option("--seed", ro.seed, "First seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitError;
    }
    try {
        if (*validate) return cmd_validate(model_path);
        if (*regions) return cmd_regions(model_path);
        if (*obs) return cmd_observability(model_path);
        if (*delta) return cmd_delta(model_path);
        if (*bounds) return cmd_bounds(model_path);
        if (*fdia) return cmd_fdia(model_path, fdia_state, fdia_gamma);
        if (*run) return cmd_run(ro);
        if (*sweep_cmd) return cmd_sweep(ro);
        if (*calibrate) return cmd_calibrate(ro);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
