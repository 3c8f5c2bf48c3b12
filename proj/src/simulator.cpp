#include "cdad/simulator.hpp"

#include "cdad/errors.hpp"
#include "cdad/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace cdad {

namespace {

constexpr std::uint64_t kMeasurementStream = 0;
constexpr std::uint64_t kProcessStream = 1;

bool contains(const ObserverNode& node, StateId q)
{
    return std::find(node.begin(), node.end(), q) != node.end();
}

}  // namespace

Simulator::Simulator(HybridAutomaton model) : model_(std::move(model))
{
    model_.check_structure();
    bank_ = synthesize_gains(model_);
    observer_ = build_observer(extract_fsm(model_));
    detector_.emplace(model_);
}

RunResult Simulator::run(const ScenarioConfig& cfg) const
{
    const auto n = model_.dim();
    const auto ni = static_cast<Eigen::Index>(n);
    if (static_cast<std::size_t>(cfg.initial_state.size()) != n)
        throw PreconditionError("scenario initial_state has the wrong dimension");
    if (!model_.has_state(cfg.initial_discrete_state) || !model_.state(cfg.initial_discrete_state).nominal)
        throw PreconditionError("scenario initial_discrete_state is not a nominal state");
    const double dt = model_.sampling_period;
    const CounterRng rng(cfg.seed);

    RunResult out;
    RunSummary& sum = out.summary;
    sum.seed = cfg.seed;
    sum.volume_bound = volume_bound(model_);
    sum.residual_threshold = cfg.baseline_threshold.value_or(model_.theta + model_.noise.v_norm());

    const double t_ss = model_.dwell_time * dt;
    if (cfg.attack && cfg.attack->start < t_ss - 1e-12)
        sum.unsupported.push_back("attack starts before the observer reaches steady state");

    std::size_t node = observer_.root;
    for (const auto& p : cfg.prior_events) node = step_discrete(observer_, node, p);

    Vector x = cfg.initial_state;
    StateId q = cfg.initial_discrete_state;
    ContinuousEstimate est;
    Vector u_prev = Vector::Zero(model_.state(q).dynamics.B.cols());
    StateId filter_state = observer_.node(node).front();
    std::vector<long> event_samples;

    const long steps = std::max(0L, static_cast<long>(std::llround(cfg.duration / dt)));
    out.trace.reserve(static_cast<std::size_t>(steps));
    for (long k = 0; k < steps; ++k) {
        const double t = k * dt;
        if (cfg.halt && x(cfg.halt->axis) >= cfg.halt->value) {
            sum.halted = true;
            break;
        }

        TraceRecord rec;
        rec.k = k;
        rec.t = t;
        rec.x = x;
        rec.q = q;
        rec.node = observer_.node(node);
        rec.attack = cfg.attack ? cfg.attack->offset(t, dt, n) : Vector::Zero(ni);
        rec.y = x + rec.attack;
        for (Eigen::Index i = 0; i < ni; ++i)
            rec.y(i) += rng.truncated(kMeasurementStream, static_cast<std::uint64_t>(k) * n + i,
                                      model_.noise.v(i));

        est = k == 0 ? initial_estimate(model_, rec.y)
                     : step_continuous(bank_, model_, filter_state, est.x_hat, u_prev, rec.y, k);
        rec.x_hat = est.x_hat;
        rec.residual = est.residual;
        rec.steady = est.steady;
        rec.residual_norm = est.residual.cwiseAbs().maxCoeff();
        rec.error_norm = (x - est.x_hat).cwiseAbs().maxCoeff();
        if (!contains(rec.node, q)) sum.observer_consistent = false;

        if (est.steady) {
            sum.max_residual_steady = std::max(sum.max_residual_steady, rec.residual_norm);
            sum.max_error_steady = std::max(sum.max_error_steady, rec.error_norm);
        }
        if (est.steady && rec.node.size() == 1) {
            const ConflictReport rep = detector_->detect(k, rec.node, est);
            rec.detecting = true;
            rec.conflict_a = rep.conflict_a;
            rec.conflict_b = rep.conflict_b;
            rec.conflict_c = rep.conflict_c;
            rec.volume = rep.volume;
            sum.max_volume = std::max(sum.max_volume, rep.volume);
            if (rep.alarm()) {
                ++sum.conflict_count;
                if (!sum.conflict_alarm)
                    sum.conflict_alarm = FirstAlarm{k, t, rep.estimated_state, rep.conflict_a,
                                                    rep.conflict_b, rep.conflict_c};
            }
        }

        const Vector u = cfg.controller.input(rec.y, model_.input_bound,
                                              static_cast<std::size_t>(u_prev.size()));
        rec.safety_violation = cfg.safety.violated(x);
        if (rec.safety_violation && !sum.violation) sum.violation = SafetyViolation{k, t, x};

        // Guards are evaluated on the true state; the switch lands one sample later.
        std::optional<std::size_t> fired;
        for (std::size_t ti : model_.guarded_transitions_from(q)) {
            const auto& tr = model_.transitions[ti];
            if (model_.state(tr.target).nominal && tr.guard->enabled(x)) {
                fired = ti;
                break;
            }
        }
        rec.event = fired;

        const auto& dyn = model_.state(q).dynamics;
        Vector w(ni);
        for (Eigen::Index i = 0; i < ni; ++i)
            w(i) = rng.truncated(kProcessStream, static_cast<std::uint64_t>(k) * n + i, model_.noise.w(i));
        x = dyn.A * x + dyn.B * u + w;
        filter_state = rec.node.size() == 1 ? rec.node.front() : q;

        if (fired) {
            const auto& tr = model_.transitions[*fired];
            const EventPair pair{tr.input_event, tr.output_event};
            sum.events.push_back({k, t, *fired, tr.source, tr.target, pair, rec.x});
            event_samples.push_back(k);
            q = tr.target;
            node = step_discrete(observer_, node, pair);
        }
        u_prev = u;
        out.trace.push_back(std::move(rec));
    }

    sum.samples = static_cast<long>(out.trace.size());
    sum.end_time = out.trace.empty() ? 0.0 : out.trace.back().t;
    sum.residual_alarm = residual_baseline(out.trace, sum.residual_threshold);
    sum.dwell_ok = check_dwell(model_, event_samples);
    if (!sum.dwell_ok) sum.unsupported.push_back("events closer together than the dwell time");
    return out;
}

RunResult simulate(const HybridAutomaton& model, const ScenarioConfig& cfg)
{
    const Simulator sim(model);
    return sim.run(cfg);
}

std::vector<RunSummary> sweep(const Simulator& sim, const ScenarioConfig& base,
                              std::uint64_t first_seed, std::uint64_t last_seed, unsigned workers)
{
    if (last_seed < first_seed) throw PreconditionError("sweep: empty seed range");
    const std::size_t count = static_cast<std::size_t>(last_seed - first_seed + 1);
    std::vector<RunSummary> results(count);
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto work = [&] {
        for (std::size_t i = next++; i < count && !failed; i = next++) {
            try {
                ScenarioConfig cfg = base;
                cfg.seed = first_seed + i;
                results[i] = sim.run(cfg).summary;
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return results;
}

std::optional<double> residual_baseline(const std::vector<TraceRecord>& trace, double threshold)
{
    for (const auto& rec : trace)
        if (rec.steady && rec.residual_norm > threshold) return rec.t;
    return std::nullopt;
}

ThetaCalibration calibrate_theta(const Simulator& sim, const ScenarioConfig& base, int runs,
                                 std::uint64_t seed, unsigned workers)
{
    if (runs <= 0) throw PreconditionError("calibrate_theta: runs must be positive");
    ScenarioConfig nominal = base;
    nominal.attack.reset();
    const auto results = sweep(sim, nominal, seed, seed + static_cast<std::uint64_t>(runs) - 1, workers);
    ThetaCalibration cal;
    cal.runs = runs;
    cal.configured_theta = sim.model().theta;
    for (const auto& s : results) {
        cal.max_error = std::max(cal.max_error, s.max_error_steady);
        cal.max_residual = std::max(cal.max_residual, s.max_residual_steady);
    }
    return cal;
}

}  // namespace cdad
