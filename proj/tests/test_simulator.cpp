#include "support.hpp"

#include "cdad/errors.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace cdad;
using namespace cdad::test;

namespace {

ScenarioConfig short_scenario(double duration)
{
    auto cfg = builtin_train_gate_scenario();
    cfg.duration = duration;
    return cfg;
}

}  // namespace

TEST(Attack, ParseForms)
{
    auto a = parse_attack("ramp:axis=0,slope=0.02,start=0");
    EXPECT_EQ(a.kind, AttackSpec::Kind::ramp);
    EXPECT_EQ(a.axes, std::vector<int>{0});
    EXPECT_DOUBLE_EQ(a.value(10.0, 0.1), 0.2);
    a = parse_attack("step:axis=0+1,magnitude=1,start=5");
    EXPECT_EQ(a.axes, (std::vector<int>{0, 1}));
    EXPECT_DOUBLE_EQ(a.value(4.9, 0.1), 0.0);
    EXPECT_DOUBLE_EQ(a.value(5.0, 0.1), 1.0);
    EXPECT_TRUE(a.offset(6.0, 0.1, 2).isApprox(vec({1, 1})));
    a = parse_attack("custom:axis=1,start=1,values=0.1;0.2;0.3");
    EXPECT_DOUBLE_EQ(a.value(1.1, 0.1), 0.2);
    EXPECT_DOUBLE_EQ(a.value(9.0, 0.1), 0.3);
    EXPECT_THROW(parse_attack("sine:axis=0"), ModelError);
    EXPECT_THROW(parse_attack("ramp:axis=0,slope=abc"), ModelError);
}

TEST(Scenario, JsonRoundTrip)
{
    auto cfg = builtin_train_gate_scenario();
    cfg.attack = parse_attack("ramp:axis=0,slope=0.02,start=3");
    const auto j = scenario_to_json(cfg);
    EXPECT_EQ(scenario_to_json(scenario_from_json(j)).dump(), j.dump());
}

TEST(Simulator, SameSeedGivesIdenticalTraceBytes)
{
    const Simulator sim(train_gate());
    auto cfg = short_scenario(20);
    cfg.seed = 5;
    std::ostringstream a, b;
    write_trace_csv(a, sim.run(cfg).trace);
    write_trace_csv(b, sim.run(cfg).trace);
    EXPECT_EQ(a.str(), b.str());
    cfg.seed = 6;
    std::ostringstream c;
    write_trace_csv(c, sim.run(cfg).trace);
    EXPECT_NE(a.str(), c.str());
}

TEST(Simulator, CsvHeaderAndRowCount)
{
    const Simulator sim(train_gate());
    const auto res = sim.run(short_scenario(1));
    std::ostringstream os;
    write_trace_csv(os, res.trace);
    std::istringstream is(os.str());
    std::string header;
    std::getline(is, header);
    EXPECT_EQ(header.rfind("k,t,x0,x1,y0,y1,x_hat0,x_hat1,r0,r1,attack0,attack1,q,q_hat", 0), 0u);
    long rows = 0;
    for (std::string line; std::getline(is, line);) ++rows;
    EXPECT_EQ(rows, static_cast<long>(res.trace.size()));
    EXPECT_EQ(res.trace.size(), 10u);
}

TEST(Simulator, NoDetectionBeforeSteadyState)
{
    const Simulator sim(train_gate());
    const auto res = sim.run(short_scenario(15));
    for (const auto& r : res.trace) {
        if (r.k < sim.model().dwell_time) {
            EXPECT_FALSE(r.steady);
            EXPECT_FALSE(r.detecting);
            EXPECT_FALSE(r.alarm());
        }
    }
}

TEST(Simulator, GuardFiresAndObserverFollows)
{
    const Simulator sim(train_gate());
    const auto res = sim.run(short_scenario(80));
    ASSERT_FALSE(res.summary.events.empty());
    const auto& e = res.summary.events.front();
    EXPECT_EQ(e.source, 1);
    EXPECT_EQ(e.target, 2);
    EXPECT_GE(e.x(0), 45.0);
    EXPECT_TRUE(res.summary.observer_consistent);
    // Discrete state and observer switch one sample after the event.
    const auto& next = res.trace.at(static_cast<std::size_t>(e.k + 1));
    EXPECT_EQ(next.q, 2);
    EXPECT_EQ(next.node, ObserverNode{2});
}

TEST(Simulator, StepAttackTripsResidualBaseline)
{
    const Simulator sim(train_gate());
    auto cfg = short_scenario(20);
    cfg.attack = parse_attack("step:axis=0,magnitude=1,start=15");
    const auto res = sim.run(cfg);
    ASSERT_TRUE(res.summary.residual_alarm);
    EXPECT_GE(*res.summary.residual_alarm, 15.0 - 1e-9);
    EXPECT_LE(*res.summary.residual_alarm, 15.5);
}

TEST(Simulator, EarlyAttackIsFlaggedUnsupported)
{
    const Simulator sim(train_gate());
    auto cfg = short_scenario(5);
    cfg.attack = parse_attack("ramp:axis=0,slope=0.02,start=0");
    EXPECT_FALSE(sim.run(cfg).summary.unsupported.empty());
    cfg.attack = parse_attack("ramp:axis=0,slope=0.02,start=20");
    EXPECT_TRUE(sim.run(cfg).summary.unsupported.empty());
}

TEST(Simulator, SweepIsOrderedAndMatchesSingleRuns)
{
    const Simulator sim(train_gate());
    const auto cfg = short_scenario(12);
    const auto all = sweep(sim, cfg, 3, 8, 3);
    ASSERT_EQ(all.size(), 6u);
    for (std::size_t i = 0; i < all.size(); ++i) {
        EXPECT_EQ(all[i].seed, 3 + i);
        auto one = cfg;
        one.seed = 3 + i;
        EXPECT_EQ(summary_to_json(sim.run(one).summary).dump(), summary_to_json(all[i]).dump());
    }
}

TEST(Simulator, ResidualBaselineUsesSteadySamplesOnly)
{
    std::vector<TraceRecord> trace(3);
    trace[0].residual_norm = 5;
    trace[1].residual_norm = 0.1;
    trace[1].steady = true;
    trace[2].residual_norm = 0.2;
    trace[2].steady = true;
    trace[2].t = 0.2;
    EXPECT_EQ(residual_baseline(trace, 0.15), std::optional<double>(0.2));
    EXPECT_FALSE(residual_baseline(trace, 0.25));
}

TEST(Calibration, NominalRunsStayWithinTheta)
{
    const Simulator sim(train_gate());
    const auto cal = calibrate_theta(sim, short_scenario(30), 5, 0, 2);
    EXPECT_EQ(cal.runs, 5);
    EXPECT_DOUBLE_EQ(cal.configured_theta, 0.05);
    EXPECT_GT(cal.max_error, 0.0);
    EXPECT_LT(cal.max_error, cal.configured_theta);
}

TEST(Fdia, TrainGatePositionAttackIsFeasible)
{
    const auto c = classify_fdia(train_gate(), 1, {0});
    EXPECT_EQ(c.verdict, FdiaClassification::Verdict::feasible);
    ASSERT_TRUE(c.eigenvalue);
    EXPECT_NEAR(std::abs(*c.eigenvalue - 1.0), 0.0, 1e-12);
}

TEST(Fdia, InfeasibleCases)
{
    auto m = train_gate();
    m.states[0].dynamics.A = mat({{0.5, 0}, {0, 0.4}});
    EXPECT_EQ(classify_fdia(m, 1, {0}).verdict, FdiaClassification::Verdict::infeasible);
    EXPECT_EQ(classify_fdia(train_gate(), 1, {}).verdict, FdiaClassification::Verdict::infeasible);
    // Speed-only attack: the unit eigenvector has no speed component.
    EXPECT_EQ(classify_fdia(train_gate(), 1, {1}).verdict, FdiaClassification::Verdict::infeasible);
}

TEST(Fdia, DefectiveUnitEigenvalueIsIndeterminate)
{
    auto m = train_gate();
    m.states[0].dynamics.A = mat({{1, 1}, {0, 1}});
    EXPECT_EQ(classify_fdia(m, 1, {0}).verdict, FdiaClassification::Verdict::indeterminate);
}
