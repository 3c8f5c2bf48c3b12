#pragma once

#include "cdad/conflict_engine.hpp"
#include "cdad/continuous_observer.hpp"
#include "cdad/discrete_observer.hpp"

#include <nlohmann/json.hpp>

#include <complex>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cdad {

/// Additive output attack: y = x + v + Gamma * gamma(t).
struct AttackSpec {
    enum class Kind { ramp, step, custom };
    Kind kind = Kind::ramp;
    std::vector<int> axes;        ///< coordinates selected by Gamma
    double slope = 0.0;           ///< ramp, units per second
    double magnitude = 0.0;       ///< step
    double start = 0.0;           ///< seconds
    std::vector<double> samples;  ///< custom, one value per sample from `start`, last value held

    /// Scalar signal gamma(t); zero before the start time.
    double value(double t, double dt) const;
    /// Gamma * gamma(t) as an n-vector.
    Vector offset(double t, double dt, std::size_t n) const;
};

/// Parses "ramp:axis=0,slope=0.02,start=0", "step:axis=0,magnitude=1" and
/// "custom:axis=0,start=5,values=0.1;0.2;0.3". Several axes: axis=0+1.
AttackSpec parse_attack(const std::string& text);

struct SpeedZone {
    double lo = 0.0;  ///< measured position, inclusive
    double hi = 0.0;  ///< exclusive
    double reference = 0.0;
};

/// Speed-tracking controller driven by the measured output:
/// u = clamp(ref + gain * (ref - y[speed]), -mu, mu), ref picked by position zone.
struct ControllerConfig {
    int position_axis = 0;
    int speed_axis = 1;
    double default_reference = 1.0;
    double speed_gain = 2.0;
    std::vector<SpeedZone> zones;

    double reference(const Vector& y) const;
    Vector input(const Vector& y, double mu, std::size_t n_inputs) const;
};

/// Speed must stay at or below max_speed while within `radius` of `center`.
struct SafetyConfig {
    int position_axis = 0;
    int speed_axis = 1;
    double center = 60.0;
    double radius = 12.0;
    double max_speed = 0.4;

    bool violated(const Vector& x) const;
};

struct HaltConfig {
    int axis = 0;
    double value = 0.0;
};

struct ScenarioConfig {
    Vector initial_state;
    StateId initial_discrete_state = 0;
    /// Event pairs fed to the discrete observer before the run starts.
    std::vector<EventPair> prior_events;
    ControllerConfig controller;
    SafetyConfig safety;
    std::optional<HaltConfig> halt;  ///< stop once x[axis] >= value
    double duration = 0.0;           ///< seconds
    std::uint64_t seed = 0;
    std::optional<AttackSpec> attack;
    std::optional<double> baseline_threshold;  ///< defaults to theta + v
};

ScenarioConfig scenario_from_json(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const ScenarioConfig& cfg);

struct TraceRecord {
    long k = 0;
    double t = 0.0;
    Vector x;
    Vector y;
    Vector x_hat;
    Vector residual;
    Vector attack;
    StateId q = 0;
    ObserverNode node;
    bool steady = false;
    bool detecting = false;  ///< false while warming up
    bool conflict_a = false;
    bool conflict_b = false;
    bool conflict_c = false;
    double volume = 0.0;
    double residual_norm = 0.0;
    double error_norm = 0.0;  ///< |x - x_hat|_inf
    bool safety_violation = false;
    std::optional<std::size_t> event;  ///< transition fired at this sample

    bool alarm() const { return conflict_a || conflict_b || conflict_c; }
};

struct EventRecord {
    long k = 0;
    double t = 0.0;
    std::size_t transition = 0;
    StateId source = 0;
    StateId target = 0;
    EventPair pair;
    Vector x;
};

struct FirstAlarm {
    long k = 0;
    double t = 0.0;
    StateId state = 0;
    bool conflict_a = false;
    bool conflict_b = false;
    bool conflict_c = false;
};

struct SafetyViolation {
    long k = 0;
    double t = 0.0;
    Vector x;
};

struct RunSummary {
    std::uint64_t seed = 0;
    long samples = 0;
    double end_time = 0.0;
    bool halted = false;
    std::optional<FirstAlarm> conflict_alarm;
    std::optional<double> residual_alarm;
    double residual_threshold = 0.0;
    std::optional<SafetyViolation> violation;
    std::vector<EventRecord> events;
    bool dwell_ok = true;
    std::vector<std::string> unsupported;  ///< assumption breaches that void the guarantees
    double max_residual_steady = 0.0;
    double max_error_steady = 0.0;
    double max_volume = 0.0;
    double volume_bound = 0.0;
    bool observer_consistent = true;  ///< true state always inside the observer node
    long conflict_count = 0;
};

struct RunResult {
    std::vector<TraceRecord> trace;
    RunSummary summary;
};

/// Everything derived from the model once and shared across runs.
class Simulator {
public:
    explicit Simulator(HybridAutomaton model);
    Simulator(const Simulator&) = delete;
    Simulator& operator=(const Simulator&) = delete;

    const HybridAutomaton& model() const { return model_; }
    const KalmanBank& bank() const { return bank_; }
    const ObserverFsm& observer() const { return observer_; }
    const ConflictDetector& detector() const { return *detector_; }

    RunResult run(const ScenarioConfig& cfg) const;

private:
    HybridAutomaton model_;
    KalmanBank bank_;
    ObserverFsm observer_;
    std::optional<ConflictDetector> detector_;
};

RunResult simulate(const HybridAutomaton& model, const ScenarioConfig& cfg);

/// Runs one scenario per seed on `workers` threads; results sorted by seed.
std::vector<RunSummary> sweep(const Simulator& sim, const ScenarioConfig& base,
                              std::uint64_t first_seed, std::uint64_t last_seed,
                              unsigned workers = 0);

/// First steady sample whose residual exceeds the threshold.
std::optional<double> residual_baseline(const std::vector<TraceRecord>& trace, double threshold);

struct FdiaClassification {
    enum class Verdict { feasible, infeasible, indeterminate };
    Verdict verdict = Verdict::infeasible;
    std::optional<std::complex<double>> eigenvalue;
    std::optional<Vector> eigenvector;  ///< real part, normalized to unit inf-norm
    std::string message;
};

const char* to_string(FdiaClassification::Verdict v);

/// Can a residual-stealthy attack on the coordinates in `gamma` exist in state q?
FdiaClassification classify_fdia(const HybridAutomaton& model, StateId q,
                                 const std::vector<int>& gamma);

/// Train-Gate model and its nominal scenario.
HybridAutomaton builtin_train_gate();
ScenarioConfig builtin_train_gate_scenario();

/// Model plus scenario from one file; "train-gate" names the built-in model.
struct LoadedScenario {
    HybridAutomaton model;
    ScenarioConfig scenario;
};
LoadedScenario load_scenario(const std::string& path_or_builtin);

struct ThetaCalibration {
    int runs = 0;
    double max_error = 0.0;
    double max_residual = 0.0;
    double configured_theta = 0.0;
};

/// Monte Carlo max steady-state estimation error over nominal runs.
ThetaCalibration calibrate_theta(const Simulator& sim, const ScenarioConfig& base, int runs,
                                 std::uint64_t seed, unsigned workers = 0);

/// Fixed column order; see README.
void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace);
void write_trace_jsonl(std::ostream& os, const std::vector<TraceRecord>& trace);
nlohmann::json summary_to_json(const RunSummary& s);

}  // namespace cdad
