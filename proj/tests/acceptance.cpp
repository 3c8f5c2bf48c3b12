// Acceptance checks on the Train-Gate model. One PASS/FAIL line per criterion.
// Usage: cdad_acceptance [--only N]

#include "support.hpp"

#include "cdad/guarantee_solver.hpp"
#include "cdad/reachability.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

using namespace cdad;
using namespace cdad::test;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::vector<RunResult> run_seeds(const Simulator& sim, const ScenarioConfig& base, int count)
{
    std::vector<RunResult> out(static_cast<std::size_t>(count));
    std::atomic<int> next{0};
    auto work = [&] {
        for (int i = next++; i < count; i = next++) {
            ScenarioConfig cfg = base;
            cfg.seed = static_cast<std::uint64_t>(i);
            out[static_cast<std::size_t>(i)] = sim.run(cfg);
        }
    };
    const unsigned n = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    return out;
}

ScenarioConfig ramp_scenario(double slope, double start)
{
    auto cfg = builtin_train_gate_scenario();
    std::ostringstream os;
    os << "ramp:axis=0,slope=" << slope << ",start=" << start;
    cfg.attack = parse_attack(os.str());
    return cfg;
}

ScenarioConfig nominal_scenario()
{
    auto cfg = builtin_train_gate_scenario();
    cfg.attack.reset();
    return cfg;
}

const std::vector<RunResult>& nominal_runs(const Simulator& sim)
{
    static const std::vector<RunResult> runs = run_seeds(sim, nominal_scenario(), 100);
    return runs;
}

Outcome regions()
{
    const auto m = train_gate();
    const auto r = decompose_regions(m);
    const std::vector<Box> expect_in{Box({{45, 46}, {0, 0.4}}), Box({{75, 76}, {0, 0.4}})};
    bool ok = r.intermediate == expect_in && r.normal.size() == 3;
    const std::vector<std::vector<Box>> holes{{expect_in[0]}, {expect_in[0], expect_in[1]}, {expect_in[1]}};
    for (std::size_t i = 0; ok && i < 3; ++i)
        ok = r.normal[i].invariant == m.states[i].invariant && r.normal[i].holes == holes[i];
    return {ok, "intermediate [45,46]x[0,0.4] and [75,76]x[0,0.4]"};
}

Outcome horizons()
{
    const auto d = compute_all_deltas(train_gate());
    const int d1 = d.at(1).delta, d2 = d.at(2).delta, d3 = d.at(3).delta;
    std::ostringstream os;
    os << "delta = " << d1 << '/' << d2 << '/' << d3 << " (target 9/9/0, +-2 on the first two)";
    return {d1 >= 7 && d1 <= 11 && d2 >= 7 && d2 <= 11 && d3 == 0, os.str()};
}

Outcome stealth(const Simulator& sim)
{
    const auto runs = run_seeds(sim, ramp_scenario(0.02, 0), 20);
    double worst = 0;
    for (const auto& r : runs)
        for (const auto& rec : r.trace) worst = std::max(worst, rec.residual_norm);
    std::ostringstream os;
    os << "max residual over 20 ramp runs " << worst << " (limit 0.15)";
    return {worst <= 0.15, os.str()};
}

Outcome ordering(const Simulator& sim)
{
    const auto runs = run_seeds(sim, ramp_scenario(0.02, 0), 20);
    int good = 0, violations = 0, early = 0;
    double worst_ratio = 0;
    for (const auto& r : runs) {
        const auto& s = r.summary;
        if (!s.violation) continue;
        ++violations;
        if (s.residual_alarm) continue;
        std::optional<double> first_bc;
        for (const auto& rec : r.trace)
            if (rec.conflict_b || rec.conflict_c) {
                first_bc = rec.t;
                break;
            }
        if (!first_bc) continue;
        const double ratio = *first_bc / s.violation->t;
        worst_ratio = std::max(worst_ratio, ratio);
        if (*first_bc < s.violation->t) ++early;
        if (*first_bc < s.violation->t && ratio < 0.5) ++good;
    }
    std::ostringstream os;
    os << good << "/20 seeds detect by B/C before half the violation time; " << violations
       << " violations, " << early << " detected before violation, worst detection/violation ratio "
       << worst_ratio;
    return {good >= 19, os.str()};
}

Outcome no_false_alarms(const Simulator& sim)
{
    int conflicts = 0, residual = 0;
    for (const auto& r : nominal_runs(sim)) {
        conflicts += r.summary.conflict_count > 0;
        residual += r.summary.residual_alarm.has_value();
    }
    std::ostringstream os;
    os << "100 nominal runs: " << conflicts << " with conflicts, " << residual << " with residual alarms";
    return {conflicts == 0 && residual == 0, os.str()};
}

Outcome volume_bound_holds(const Simulator& sim)
{
    const double bound = volume_bound(sim.model());
    double worst = 0;
    long samples = 0;
    bool ok = std::abs(bound - 0.25) < 1e-15;
    for (const auto& r : nominal_runs(sim))
        for (const auto& rec : r.trace) {
            if (!rec.steady) continue;
            ++samples;
            const double v = volume(initial_set(rec.x_hat, rec.residual, sim.model().noise.v));
            worst = std::max(worst, v);
            ok = ok && v <= bound;
        }
    std::ostringstream os;
    os << "max volume " << worst << " over " << samples << " steady samples (bound " << bound << ')';
    return {ok && samples > 0, os.str()};
}

Outcome guaranteed_detection(const Simulator& sim)
{
    const auto bounds = compute_bounds(sim.model());
    const double th1 = bounds.at(1).threshold.value_or(kUnavailable);
    const double th2 = bounds.at(2).threshold.value_or(kUnavailable);
    const bool band = th1 >= 0.5 && th1 <= 1.5 && th2 >= 0.5 && th2 <= 1.5;

    const auto cfg = ramp_scenario(0.04, 10);
    const auto runs = run_seeds(sim, cfg, 50);
    int eligible = 0, detected = 0;
    double min_mag = kUnavailable;
    for (const auto& r : runs) {
        if (r.summary.events.empty()) continue;
        const auto& e = r.summary.events.front();
        const double mag = cfg.attack->value(e.t, sim.model().sampling_period);
        min_mag = std::min(min_mag, mag);
        const double th = bounds.at(e.source).threshold.value_or(kUnavailable);
        if (!(mag > th)) continue;
        ++eligible;
        const long last = e.k + sim.detector().horizon(e.source) + 1;
        for (const auto& rec : r.trace) {
            if (rec.k > last) break;
            if ((rec.conflict_b || rec.conflict_c) && rec.attack.cwiseAbs().maxCoeff() > 0) {
                ++detected;
                break;
            }
        }
    }
    std::ostringstream os;
    os << "threshold " << th1 << '/' << th2 << " m; " << detected << '/' << eligible
       << " runs above threshold detected by B/C (min magnitude at event " << min_mag << ')';
    return {band && eligible == 50 && detected == 50, os.str()};
}

Outcome oracle()
{
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> d(-10, 10);
    std::uniform_real_distribution<double> w(0, 5);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        const int n = 1 + i % 6;
        Vector a(n);
        std::vector<Interval> axes;
        for (int k = 0; k < n; ++k) {
            a(k) = d(gen);
            const double lo = d(gen);
            axes.push_back({lo, lo + w(gen)});
        }
        const Box b(axes);
        worst = std::max(worst, std::abs(box_max(a, b) - oracle_box_optimum(a, b)));
        worst = std::max(worst, std::abs(box_min(a, b) + oracle_box_optimum(-a, b)));
    }
    std::ostringstream os;
    os << "max deviation " << worst << " over 1000 instances";
    return {worst <= 1e-12, os.str()};
}

Outcome soundness()
{
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> rho(0.5, 1.0);
    std::bernoulli_distribution extreme(0.3);
    long escapes = 0, total = 0;
    for (int sys = 0; sys < 100; ++sys) {
        const int n = 2 + sys % 2;
        auto m = scalar_model(1, 1, 0.3, 0.02, -1e6, 1e6, 0);
        auto& dyn = m.states[0].dynamics;
        dyn.A = random_stable(gen, n, sys % 10 == 0 ? 1.0 : rho(gen));
        dyn.B = Matrix(n, 1);
        for (int i = 0; i < n; ++i) dyn.B(i, 0) = unit(gen);
        m.states[0].invariant = Box(std::vector<Interval>(n, {-1e6, 1e6}));
        m.noise = {Vector::Constant(n, 0.02), Vector::Zero(n)};
        m.transitions.clear();

        Vector c(n);
        Matrix g(n, 3);
        for (int i = 0; i < n; ++i) {
            c(i) = 5 * unit(gen);
            for (int j = 0; j < 3; ++j) g(i, j) = unit(gen);
        }
        const Zonotope z0(c, g);
        const int delta = 1 + sys % 10;
        const Zonotope R = reach(m, 1, z0, delta);
        auto draw = [&](double bound) { return extreme(gen) ? (unit(gen) < 0 ? -bound : bound) : bound * unit(gen); };
        for (int s = 0; s < 100; ++s) {
            Vector b(3);
            for (int j = 0; j < 3; ++j) b(j) = draw(1.0);
            Vector x = z0.at(b);
            for (int k = 0; k < delta; ++k) {
                Vector w(n);
                for (int i = 0; i < n; ++i) w(i) = draw(0.02);
                x = dyn.A * x + dyn.B * vec({draw(0.3)}) + w;
            }
            ++total;
            escapes += !intersects_box(R, Box::from_bounds(x, x));
        }
    }
    std::ostringstream os;
    os << escapes << " of " << total << " trajectories outside reach on 100 systems";
    return {escapes == 0 && total == 10000, os.str()};
}

Outcome observer(const Simulator& sim)
{
    const auto& obs = sim.observer();
    const int k = obs.k.value_or(-1);
    const auto prior = static_cast<int>(nominal_scenario().prior_events.size());
    long bad_member = 0, bad_singleton = 0;
    for (const auto& r : nominal_runs(sim)) {
        bad_member += !r.summary.observer_consistent;
        int seen = prior;
        for (const auto& rec : r.trace) {
            if (std::find(rec.node.begin(), rec.node.end(), rec.q) == rec.node.end()) ++bad_member;
            if (k >= 0 && seen >= k && rec.node.size() != 1) ++bad_singleton;
            if (rec.event) ++seen;
        }
    }
    std::ostringstream os;
    os << "k = " << k << "; " << bad_member << " samples with the true state outside the node, " << bad_singleton
       << " non-singleton samples after k pairs";
    return {k >= 0 && bad_member == 0 && bad_singleton == 0, os.str()};
}

struct Criterion {
    int id;
    const char* name;
    double budget;  ///< seconds, 0 = none
    std::function<Outcome(const Simulator&)> check;
};

}  // namespace

int main(int argc, char** argv)
{
    int only = 0;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);

    const Simulator sim(train_gate());
    const std::vector<Criterion> criteria{
        {1, "region reproduction", 1.0, [](const Simulator&) { return regions(); }},
        {2, "horizon reproduction", 5.0, [](const Simulator&) { return horizons(); }},
        {3, "stealthy ramp residual", 30.0, stealth},
        {4, "detection before safety violation", 0.0, ordering},
        {5, "no false alarms", 60.0, no_false_alarms},
        {6, "initial-set volume bound", 0.0, volume_bound_holds},
        {7, "guaranteed detection threshold", 0.0, guaranteed_detection},
        {8, "robust optimum oracle equivalence", 10.0, [](const Simulator&) { return oracle(); }},
        {9, "reachability soundness", 60.0, [](const Simulator&) { return soundness(); }},
        {10, "observer correctness", 0.0, observer},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        if (only && c.id != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check(sim);
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget > 0 && secs >= c.budget) {
            o.pass = false;
            o.detail += "; over the time budget";
        }
        failures += !o.pass;
        std::printf("%s criterion %d (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), secs);
    }
    return failures ? 1 : 0;
}
