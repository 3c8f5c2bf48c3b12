#include "cdad/hybrid_model.hpp"

#include "cdad/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace cdad {

std::size_t HybridAutomaton::dim() const
{
    return states.empty() ? 0 : static_cast<std::size_t>(states.front().dynamics.A.rows());
}

const DiscreteState& HybridAutomaton::state(StateId id) const
{
    for (const auto& s : states)
        if (s.id == id) return s;
    throw ModelError("unknown discrete state " + std::to_string(id));
}

bool HybridAutomaton::has_state(StateId id) const
{
    return std::any_of(states.begin(), states.end(), [id](const auto& s) { return s.id == id; });
}

const Event* HybridAutomaton::find_event(const std::string& id) const
{
    for (const auto& e : events)
        if (e.id == id) return &e;
    return nullptr;
}

std::vector<StateId> HybridAutomaton::nominal_ids() const
{
    std::vector<StateId> out;
    for (const auto& s : states)
        if (s.nominal) out.push_back(s.id);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::size_t> HybridAutomaton::guarded_transitions_from(StateId q) const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < transitions.size(); ++i)
        if (transitions[i].source == q && transitions[i].guard) out.push_back(i);
    return out;
}

void HybridAutomaton::check_structure() const
{
    if (states.empty()) throw ModelError("model has no states");
    const auto n = static_cast<Eigen::Index>(dim());
    if (n == 0) throw ModelError("state dimension is zero");
    const Eigen::Index nu = states.front().dynamics.B.cols();

    std::set<StateId> ids;
    for (const auto& s : states) {
        const std::string where = "state " + std::to_string(s.id);
        if (!ids.insert(s.id).second) throw ModelError("duplicate " + where);
        if (s.dynamics.A.rows() != s.dynamics.A.cols())
            throw ModelError(where + ": A is not square");
        if (s.dynamics.A.rows() != n) throw ModelError(where + ": A dimension mismatch");
        if (s.dynamics.B.rows() != n) throw ModelError(where + ": B row count differs from A");
        if (s.dynamics.B.cols() != nu) throw ModelError(where + ": input dimension mismatch");
        if (!s.dynamics.A.allFinite() || !s.dynamics.B.allFinite())
            throw ModelError(where + ": non-finite matrix entry");
        if (static_cast<Eigen::Index>(s.invariant.dim()) != n)
            throw ModelError(where + ": invariant dimension mismatch");
        if (!s.invariant.is_valid())
            throw ModelError(where + ": invariant interval with lo > hi or non-finite bound");
    }
    if (noise.w.size() != n || noise.v.size() != n)
        throw ModelError("noise bound vectors must have one entry per state variable");
    if ((noise.w.array() < 0).any() || (noise.v.array() < 0).any())
        throw ModelError("noise bounds must be nonnegative");
    if (!(input_bound >= 0)) throw ModelError("input_bound must be nonnegative");
    if (!(sampling_period > 0)) throw ModelError("sampling_period must be positive");
    if (dwell_time < 0) throw ModelError("dwell_time must be nonnegative");
    if (!(theta >= 0)) throw ModelError("theta must be nonnegative");

    std::set<std::string> event_ids;
    for (const auto& e : events)
        if (!event_ids.insert(e.id).second) throw ModelError("duplicate event " + e.id);

    std::set<std::pair<StateId, std::string>> seen;
    for (const auto& t : transitions) {
        const std::string where =
            "transition " + std::to_string(t.source) + "->" + std::to_string(t.target);
        if (!has_state(t.source) || !has_state(t.target))
            throw ModelError(where + ": unknown state");
        const Event* in = find_event(t.input_event);
        const Event* out = find_event(t.output_event);
        if (!in || in->kind != EventKind::input)
            throw ModelError(where + ": '" + t.input_event + "' is not an input event");
        if (!out || out->kind != EventKind::output)
            throw ModelError(where + ": '" + t.output_event + "' is not an output event");
        if (!seen.insert({t.source, t.input_event}).second)
            throw ModelError(where + ": duplicate (state, input event) pair");
        const bool nominal = state(t.source).nominal && state(t.target).nominal;
        if (nominal && !t.guard) throw ModelError(where + ": nominal transition needs a guard");
        if (t.guard) {
            if (t.guard->axis < 0 || t.guard->axis >= n)
                throw ModelError(where + ": guard axis out of range");
            if (t.guard->sign != 1 && t.guard->sign != -1)
                throw ModelError(where + ": guard sign must be -1 or +1");
            if (!std::isfinite(t.guard->threshold))
                throw ModelError(where + ": non-finite guard threshold");
        }
    }
}

const char* to_string(ViolationKind kind)
{
    switch (kind) {
    case ViolationKind::identity_output: return "identity-output";
    case ViolationKind::intermediate_region: return "intermediate-region";
    case ViolationKind::stability: return "stability";
    case ViolationKind::guard_placement: return "guard-placement";
    }
    return "unknown";
}

double neighbor_plane_value(const Guard& guard, const Box& invariant)
{
    const Interval& iv = invariant[static_cast<std::size_t>(guard.axis)];
    const double p = guard.plane();
    const double below = p - iv.lo;
    const double above = iv.hi - p;
    if (below < above) return iv.lo;
    if (above < below) return iv.hi;
    // Equidistant: take the boundary the guard points at.
    return guard.sign > 0 ? iv.hi : iv.lo;
}

namespace {

std::vector<Violation> check_guards(const HybridAutomaton& model)
{
    std::vector<Violation> out;
    for (std::size_t i = 0; i < model.transitions.size(); ++i) {
        const auto& t = model.transitions[i];
        if (!t.guard || !model.state(t.source).nominal || !model.state(t.target).nominal) continue;
        const Box& inv = model.state(t.source).invariant;
        const Interval& iv = inv[static_cast<std::size_t>(t.guard->axis)];
        if (!iv.contains(t.guard->plane())) {
            std::ostringstream os;
            os << "guard plane " << t.guard->plane() << " on axis " << t.guard->axis
               << " lies outside [" << iv.lo << ", " << iv.hi << "] of state " << t.source;
            out.push_back({ViolationKind::guard_placement, t.source, i, os.str()});
        }
    }
    return out;
}

// Overlap of two invariants must sit inside a guard band [c_G, c_L] of one of them.
bool overlap_in_band(const HybridAutomaton& model, StateId q, const Box& overlap)
{
    for (std::size_t ti : model.guarded_transitions_from(q)) {
        const auto& t = model.transitions[ti];
        if (!model.state(t.target).nominal) continue;
        const Box& inv = model.state(q).invariant;
        const double p = t.guard->plane();
        if (!inv[static_cast<std::size_t>(t.guard->axis)].contains(p)) continue;
        const double cl = neighbor_plane_value(*t.guard, inv);
        const Interval band{std::min(p, cl), std::max(p, cl)};
        const Interval& ov = overlap[static_cast<std::size_t>(t.guard->axis)];
        if (band.lo <= ov.lo && ov.hi <= band.hi) return true;
    }
    return false;
}

}  // namespace

std::vector<Violation> validate_model(const HybridAutomaton& model)
{
    model.check_structure();
    std::vector<Violation> out;

    // The identity output is structural: there is no C field, and every state
    // variable must carry a measurement-noise bound.
    if (static_cast<std::size_t>(model.noise.v.size()) != model.dim())
        out.push_back({ViolationKind::identity_output, 0, std::nullopt,
                       "measurement noise must cover every state variable"});

    for (const auto& s : model.states) {
        if (!s.nominal) continue;
        Eigen::EigenSolver<Matrix> es(s.dynamics.A, false);
        const double rho = es.eigenvalues().cwiseAbs().maxCoeff();
        if (rho > 1.0 + kEigenTolerance) {
            std::ostringstream os;
            os << "state " << s.id << " has spectral radius " << rho << " > 1";
            out.push_back({ViolationKind::stability, s.id, std::nullopt, os.str()});
        }
    }

    auto guards = check_guards(model);
    out.insert(out.end(), guards.begin(), guards.end());

    const auto ids = model.nominal_ids();
    for (std::size_t a = 0; a < ids.size(); ++a) {
        for (std::size_t b = a + 1; b < ids.size(); ++b) {
            auto ov = model.state(ids[a]).invariant.intersect(model.state(ids[b]).invariant);
            if (!ov) continue;
            if (overlap_in_band(model, ids[a], *ov) || overlap_in_band(model, ids[b], *ov))
                continue;
            std::ostringstream os;
            os << "overlap of Inv_" << ids[a] << " and Inv_" << ids[b]
               << " is not bounded by a guard hyperplane and its neighbor hyperplane";
            out.push_back({ViolationKind::intermediate_region, ids[a], std::nullopt, os.str()});
        }
    }
    return out;
}

bool NormalRegion::contains(const Vector& x) const
{
    if (!invariant.contains(x)) return false;
    return std::none_of(holes.begin(), holes.end(), [&](const Box& h) { return h.contains(x); });
}

bool RegionDecomposition::in_intermediate(const Vector& x) const
{
    return std::any_of(intermediate.begin(), intermediate.end(),
                       [&](const Box& b) { return b.contains(x); });
}

const NormalRegion& RegionDecomposition::normal_region(StateId q) const
{
    for (const auto& r : normal)
        if (r.state == q) return r;
    throw ModelError("no normal region for state " + std::to_string(q));
}

RegionDecomposition decompose_regions(const HybridAutomaton& model)
{
    model.check_structure();
    RegionDecomposition out;
    const auto ids = model.nominal_ids();

    for (std::size_t a = 0; a < ids.size(); ++a) {
        for (std::size_t b = a + 1; b < ids.size(); ++b) {
            const Box& ia = model.state(ids[a]).invariant;
            const Box& ib = model.state(ids[b]).invariant;
            if (ia == ib)
                throw DegenerateModelError("invariants of states " + std::to_string(ids[a]) +
                                           " and " + std::to_string(ids[b]) + " are identical");
            if (auto ov = ia.intersect(ib)) out.intermediate.push_back(*ov);
        }
    }

    for (StateId q : ids) {
        NormalRegion r{q, model.state(q).invariant, {}};
        for (const Box& h : out.intermediate)
            if (auto part = r.invariant.intersect(h)) r.holes.push_back(*part);
        out.normal.push_back(std::move(r));
    }

    for (std::size_t i = 0; i < model.transitions.size(); ++i) {
        const auto& t = model.transitions[i];
        if (!t.guard || !model.state(t.source).nominal || !model.state(t.target).nominal) continue;
        const Box& inv = model.state(t.source).invariant;
        out.neighbors[i] = {i, t.guard->axis, t.guard->plane(),
                            neighbor_plane_value(*t.guard, inv)};
    }
    return out;
}

std::string Fsm::canonical() const
{
    std::ostringstream os;
    os << "states:";
    for (StateId s : states) os << ' ' << s;
    os << '\n';
    for (const auto& t : transitions)
        os << t.source << " --(" << t.input_event << ',' << t.output_event << ")--> " << t.target
           << '\n';
    return os.str();
}

Fsm extract_fsm(const HybridAutomaton& model)
{
    model.check_structure();
    Fsm fsm;
    fsm.states = model.nominal_ids();
    for (const auto& t : model.transitions) {
        if (!model.state(t.source).nominal || !model.state(t.target).nominal) continue;
        fsm.transitions.push_back({t.source, t.input_event, t.output_event, t.target});
    }
    std::sort(fsm.transitions.begin(), fsm.transitions.end());
    return fsm;
}

}  // namespace cdad
