#include "support.hpp"

#include "cdad/continuous_observer.hpp"
#include "cdad/discrete_observer.hpp"
#include "cdad/errors.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

using namespace cdad;
using namespace cdad::test;

namespace {

Fsm fsm_of(std::vector<StateId> states, std::vector<FsmTransition> ts)
{
    Fsm f;
    f.states = std::move(states);
    f.transitions = std::move(ts);
    return f;
}

}  // namespace

TEST(DiscreteObserver, TrainGateSubsetConstruction)
{
    const auto obs = build_observer(extract_fsm(train_gate()));
    ASSERT_EQ(obs.nodes.size(), 4u);
    EXPECT_EQ(obs.nodes[obs.root], (ObserverNode{1, 2, 3}));
    EXPECT_EQ(obs.node(step_discrete(obs, obs.root, {"c_down", "s_1"})), ObserverNode{2});
    EXPECT_EQ(obs.node(step_discrete(obs, obs.root, {"c_up", "s_2"})), ObserverNode{3});
    EXPECT_EQ(obs.node(step_discrete(obs, obs.root, {"c_exit", "s_exit"})), ObserverNode{1});
    ASSERT_TRUE(obs.k);
    EXPECT_EQ(*obs.k, 1);
}

TEST(DiscreteObserver, InactivePairIsInconsistent)
{
    const auto obs = build_observer(extract_fsm(train_gate()));
    const auto two = step_discrete(obs, obs.root, {"c_down", "s_1"});
    EXPECT_THROW(step_discrete(obs, two, {"c_down", "s_1"}), DiscreteInconsistency);
    EXPECT_THROW(step_discrete(obs, 99, {"c_down", "s_1"}), PreconditionError);
    EXPECT_EQ(obs.active_pairs(two).size(), 1u);
}

TEST(DiscreteObserver, SingleStateHasZeroHorizon)
{
    const auto obs = build_observer(fsm_of({7}, {}));
    ASSERT_EQ(obs.nodes.size(), 1u);
    const auto v = check_current_state_observability(obs);
    EXPECT_TRUE(v.observable);
    EXPECT_EQ(v.k, 0);
}

TEST(DiscreteObserver, IndistinguishableStatesAreNotObservable)
{
    const auto obs = build_observer(fsm_of({1, 2}, {{1, "a", "o", 2}, {2, "a", "o", 1}}));
    const auto v = check_current_state_observability(obs);
    EXPECT_FALSE(v.observable);
    ASSERT_EQ(v.offending.size(), 1u);
    EXPECT_EQ(v.offending[0], (ObserverNode{1, 2}));
    EXPECT_FALSE(obs.k);
}

TEST(DiscreteObserver, TwoPairsNeededGivesHorizonTwo)
{
    const auto obs = build_observer(
        fsm_of({1, 2, 3}, {{1, "a", "o", 2}, {2, "a", "o", 3}, {3, "b", "o", 1}}));
    const auto v = check_current_state_observability(obs);
    ASSERT_TRUE(v.observable);
    EXPECT_EQ(v.k, 2);
    auto n = step_discrete(obs, obs.root, {"a", "o"});
    EXPECT_EQ(obs.node(n), (ObserverNode{2, 3}));
    n = step_discrete(obs, n, {"a", "o"});
    EXPECT_EQ(obs.node(n), ObserverNode{3});
}

TEST(DiscreteObserver, SubsetConstructionMatchesDefinition)
{
    // Every observer edge must equal the image of its node under the pair.
    const auto fsm = fsm_of({1, 2, 3, 4}, {{1, "a", "x", 2},
                                           {2, "a", "x", 3},
                                           {3, "b", "y", 4},
                                           {4, "a", "y", 1},
                                           {2, "b", "x", 1},
                                           {3, "a", "x", 1}});
    const auto obs = build_observer(fsm);
    for (const auto& [key, target] : obs.transitions) {
        std::set<StateId> image;
        for (const auto& t : fsm.transitions)
            if (t.input_event == key.second.input && t.output_event == key.second.output &&
                std::count(obs.nodes[key.first].begin(), obs.nodes[key.first].end(), t.source))
                image.insert(t.target);
        EXPECT_EQ(obs.nodes[target], ObserverNode(image.begin(), image.end()));
    }
}

TEST(ContinuousObserver, TrainGateGainsAreStable)
{
    const auto m = train_gate();
    const auto bank = synthesize_gains(m);
    ASSERT_EQ(bank.gains.size(), 3u);
    for (const auto& [q, g] : bank.gains) {
        const Matrix& A = m.state(q).dynamics.A;
        Eigen::EigenSolver<Matrix> es(A - g.K * A, false);
        EXPECT_LT(es.eigenvalues().cwiseAbs().maxCoeff(), 1.0);
        EXPECT_LT(g.final_increment, kRiccatiTolerance);
        EXPECT_GT(g.iterations, 0);
        // Riccati fixed point: P = A (I - K) P A' + W.
        const Matrix next = A * g.P_posterior * A.transpose() + process_covariance(m);
        EXPECT_LT((next - g.P_prior).cwiseAbs().maxCoeff(), 1e-8);
    }
}

TEST(ContinuousObserver, ZeroDynamicsGivesStaticGain)
{
    auto m = scalar_model(0.0, 0.0, 0.0, 0.3, -1, 1, 0.5);
    m.noise.v = vec({0.6});
    const auto bank = synthesize_gains(m);
    const double w = 0.01, v = 0.04;  // (0.3/3)^2 and (0.6/3)^2
    EXPECT_NEAR(bank.at(1).K(0, 0), w / (w + v), 1e-12);
}

TEST(ContinuousObserver, GainsAreDeterministic)
{
    const auto a = synthesize_gains(train_gate());
    const auto b = synthesize_gains(train_gate());
    EXPECT_EQ(a.at(1).K, b.at(1).K);
}

TEST(ContinuousObserver, DivergentRiccatiThrows)
{
    auto m = scalar_model(1e200, 0.0, 0.0, 0.3, -1, 1, 0.5);
    m.noise.v = vec({0.6});
    EXPECT_THROW(synthesize_gains(m), SynthesisError);
}

TEST(ContinuousObserver, NoiseFreeMeasurementGivesZeroResidual)
{
    const auto m = train_gate();
    const auto bank = synthesize_gains(m);
    const Vector xh = vec({10, 0.8});
    const Vector u = vec({0.5});
    const Vector y = m.state(1).dynamics.A * xh + m.state(1).dynamics.B * u;
    const auto e = step_continuous(bank, m, 1, xh, u, y, 5);
    EXPECT_LT(e.residual.cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_TRUE((e.residual - (y - e.x_hat)).isZero(0));
    EXPECT_FALSE(e.steady);
    EXPECT_TRUE(step_continuous(bank, m, 1, xh, u, y, m.dwell_time).steady);
}

TEST(ContinuousObserver, NonFiniteInputThrows)
{
    const auto m = train_gate();
    const auto bank = synthesize_gains(m);
    const Vector bad = vec({std::nan(""), 0});
    EXPECT_THROW(step_continuous(bank, m, 1, vec({0, 0}), vec({0}), bad, 1), NumericError);
    EXPECT_THROW(step_continuous(bank, m, 1, vec({0, 0}), vec({0, 0}), vec({0, 0}), 1), PreconditionError);
}

TEST(ContinuousObserver, DwellCheck)
{
    auto m = train_gate();
    m.dwell_time = 50;
    EXPECT_TRUE(check_dwell(m, {100, 400}));
    EXPECT_FALSE(check_dwell(m, {100, 120}));
    EXPECT_TRUE(check_dwell(m, {}));
    EXPECT_FALSE(check_dwell(m, {100, 151}));  // gap of exactly 50 is not enough
    EXPECT_TRUE(check_dwell(m, {100, 152}));
}
