#pragma once

#include "cdad/continuous_observer.hpp"
#include "cdad/discrete_observer.hpp"
#include "cdad/reachability.hpp"

#include <map>
#include <optional>

namespace cdad {

struct ConflictReport {
    long t = 0;
    bool conflict_a = false;
    bool conflict_b = false;
    bool conflict_c = false;
    Zonotope initial_set;
    std::optional<Zonotope> reach_set;
    double volume = 0.0;
    double volume_bound = 0.0;
    StateId estimated_state = 0;
    int horizon = 0;

    bool alarm() const { return conflict_a || conflict_b || conflict_c; }
};

/// Axis-aligned box around the estimate, half-width |r_i| + v_i on axis i.
Zonotope initial_set(const Vector& x_hat, const Vector& residual, const Vector& v);

/// Product of full widths; throws UnsupportedShapeError unless axis-aligned.
double volume(const Zonotope& z);

/// Nominal bound on the initial-set volume: prod(2 theta + 4 v_i).
double volume_bound(const HybridAutomaton& model);

class ConflictDetector {
public:
    ConflictDetector(const HybridAutomaton& model, std::map<StateId, DeltaResult> deltas);
    explicit ConflictDetector(const HybridAutomaton& model);

    const std::map<StateId, DeltaResult>& deltas() const { return deltas_; }
    int horizon(StateId q) const;

    /// Requires a singleton observer node and a steady estimate.
    ConflictReport detect(long t, const ObserverNode& node, const ContinuousEstimate& est) const;

private:
    const HybridAutomaton* model_;
    std::map<StateId, DeltaResult> deltas_;
    double volume_bound_;
};

}  // namespace cdad
