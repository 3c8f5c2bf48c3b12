#include "cdad/conflict_engine.hpp"

#include "cdad/errors.hpp"

namespace cdad {

Zonotope initial_set(const Vector& x_hat, const Vector& residual, const Vector& v)
{
    if (residual.size() != x_hat.size() || v.size() != x_hat.size())
        throw PreconditionError("initial_set: dimension mismatch");
    const Vector hw = residual.cwiseAbs() + v;
    return Zonotope(x_hat, Matrix(hw.asDiagonal()));
}

double volume(const Zonotope& z)
{
    if (!z.is_axis_aligned()) throw UnsupportedShapeError("volume needs an axis-aligned zonotope");
    return (2.0 * z.radius()).prod();
}

double volume_bound(const HybridAutomaton& model)
{
    return (2.0 * model.theta + 4.0 * model.noise.v.array()).prod();
}

ConflictDetector::ConflictDetector(const HybridAutomaton& model,
                                   std::map<StateId, DeltaResult> deltas)
    : model_(&model), deltas_(std::move(deltas)), volume_bound_(volume_bound(model))
{
}

ConflictDetector::ConflictDetector(const HybridAutomaton& model)
    : ConflictDetector(model, compute_all_deltas(model))
{
}

int ConflictDetector::horizon(StateId q) const
{
    auto it = deltas_.find(q);
    if (it == deltas_.end()) throw PreconditionError("no horizon for state " + std::to_string(q));
    return it->second.delta;
}

ConflictReport ConflictDetector::detect(long t, const ObserverNode& node,
                                        const ContinuousEstimate& est) const
{
    if (node.size() != 1)
        throw PreconditionError("detect: discrete estimate " + to_string(node) + " is not a singleton");
    if (!est.steady) throw PreconditionError("detect: continuous estimate is not yet steady");

    ConflictReport rep;
    rep.t = t;
    rep.estimated_state = node.front();
    rep.horizon = horizon(rep.estimated_state);
    rep.initial_set = initial_set(est.x_hat, est.residual, model_->noise.v);
    rep.volume = volume(rep.initial_set);
    rep.volume_bound = volume_bound_;

    const Box& inv = model_->state(rep.estimated_state).invariant;
    rep.conflict_a = rep.volume > rep.volume_bound;
    rep.conflict_b = !intersects_box(rep.initial_set, inv);
    if (rep.horizon > 0) {
        rep.reach_set = reach(*model_, rep.estimated_state, rep.initial_set, rep.horizon);
        rep.conflict_c = !intersects_box(*rep.reach_set, inv);
    }
    return rep;
}

}  // namespace cdad
