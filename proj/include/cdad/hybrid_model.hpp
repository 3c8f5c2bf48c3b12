#pragma once

#include "cdad/box.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cdad {

using StateId = int;

/// Per-state LTI dynamics x+ = A x + B u + w. The output matrix is the
/// identity, so there is no C.
struct LtiDynamics {
    Matrix A;
    Matrix B;
};

/// Per-entry noise bounds, shared by every discrete state.
struct NoiseBounds {
    Vector w;  ///< |w_i| <= w(i)
    Vector v;  ///< |v_i| <= v(i)

    double w_norm() const { return w.size() ? w.maxCoeff() : 0.0; }
    double v_norm() const { return v.size() ? v.maxCoeff() : 0.0; }
};

/// Guard {x : sign * x[axis] >= threshold}.
struct Guard {
    int axis = 0;
    int sign = 1;
    double threshold = 0.0;

    /// Position of the guard hyperplane on its axis (sign * threshold).
    double plane() const { return sign * threshold; }
    bool enabled(const Vector& x) const { return sign * x(axis) >= threshold; }
};

struct DiscreteState {
    StateId id = 0;
    LtiDynamics dynamics;
    Box invariant;
    bool nominal = true;
};

enum class EventKind { input, output };

struct Event {
    std::string id;
    EventKind kind = EventKind::input;
    bool observable = true;
};

struct Transition {
    StateId source = 0;
    std::string input_event;
    std::string output_event;
    StateId target = 0;
    /// Required between nominal states; transitions into anomalous states may omit it.
    std::optional<Guard> guard;
};

struct HybridAutomaton {
    std::string name;
    std::vector<DiscreteState> states;
    std::vector<Event> events;
    std::vector<Transition> transitions;
    NoiseBounds noise;
    double input_bound = 0.0;
    double sampling_period = 1.0;
    int dwell_time = 0;       ///< samples
    double theta = 0.0;       ///< steady-state estimation error bound

    std::size_t dim() const;
    const DiscreteState& state(StateId id) const;
    bool has_state(StateId id) const;
    const Event* find_event(const std::string& id) const;
    std::vector<StateId> nominal_ids() const;
    /// Indices into `transitions` leaving `q` that carry a guard.
    std::vector<std::size_t> guarded_transitions_from(StateId q) const;
    /// Throws ModelError on shape mismatches or dangling references.
    void check_structure() const;
};

enum class ViolationKind {
    identity_output,       ///< output map must be the identity
    intermediate_region,   ///< nominal overlaps must sit inside guard bands
    stability,             ///< spectral radius at most one
    guard_placement,       ///< guard hyperplane outside the source invariant
};

struct Violation {
    ViolationKind kind;
    StateId state = 0;
    std::optional<std::size_t> transition;
    std::string message;
};

const char* to_string(ViolationKind kind);

/// Eigenvalue slack for marginal stability.
inline constexpr double kEigenTolerance = 1e-9;

/// Checks the structural assumptions the detector relies on. Structural
/// problems (bad shapes) throw ModelError instead.
std::vector<Violation> validate_model(const HybridAutomaton& model);

/// Closed(Inv_q) minus closed(R_in); membership excludes the holes'
/// boundaries, which is how the strict inequalities of the region
/// descriptions arise.
struct NormalRegion {
    StateId state = 0;
    Box invariant;
    std::vector<Box> holes;

    bool contains(const Vector& x) const;
};

struct NeighborPlane {
    std::size_t transition = 0;
    int axis = 0;
    double guard_plane = 0.0;  ///< c_G position on the axis
    double value = 0.0;        ///< c_L
    bool degenerate() const { return guard_plane == value; }
};

struct RegionDecomposition {
    std::vector<Box> intermediate;  ///< R_in as a union of boxes
    std::vector<NormalRegion> normal;
    std::map<std::size_t, NeighborPlane> neighbors;  ///< keyed by transition index

    bool in_intermediate(const Vector& x) const;
    const NormalRegion& normal_region(StateId q) const;
};

/// Neighbor hyperplane value c_L for a guard inside an invariant.
double neighbor_plane_value(const Guard& guard, const Box& invariant);

RegionDecomposition decompose_regions(const HybridAutomaton& model);

struct FsmTransition {
    StateId source = 0;
    std::string input_event;
    std::string output_event;
    StateId target = 0;
    friend auto operator<=>(const FsmTransition&, const FsmTransition&) = default;
};

/// Discrete skeleton of the nominal automaton.
struct Fsm {
    std::vector<StateId> states;
    std::vector<FsmTransition> transitions;

    /// Deterministic text form used for byte-level comparisons.
    std::string canonical() const;
};

Fsm extract_fsm(const HybridAutomaton& model);

}  // namespace cdad
