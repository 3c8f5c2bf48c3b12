#include "cdad/guarantee_solver.hpp"

#include "cdad/errors.hpp"

#include <algorithm>
#include <cmath>

namespace cdad {

double estimation_margin(const HybridAutomaton& model)
{
    return model.theta + 2.0 * model.noise.v_norm();
}

namespace {

/// Axis interval in reflected coordinates.
Interval reflect(const Interval& iv, int sign)
{
    return sign > 0 ? iv : Interval{-iv.hi, -iv.lo};
}

/// Inv with the axis restricted to the reflected slab [lo, hi]; empty when disjoint.
std::optional<Box> slab(const Box& inv, int axis, int sign, double lo, double hi)
{
    Box cut = inv;
    const auto a = static_cast<std::size_t>(axis);
    const Interval want = reflect(Interval{lo, hi}, sign);
    const Interval have = inv[a];
    const Interval both{std::max(want.lo, have.lo), std::min(want.hi, have.hi)};
    if (both.lo > both.hi) return std::nullopt;
    cut[a] = both;
    return cut;
}

Matrix matrix_power(const Matrix& A, int k)
{
    Matrix P = Matrix::Identity(A.rows(), A.cols());
    for (int s = 0; s < k; ++s) P = A * P;
    return P;
}

}  // namespace

double guard_epsilon(const HybridAutomaton& model, std::size_t transition)
{
    const auto& t = model.transitions.at(transition);
    if (!t.guard) throw PreconditionError("transition has no guard");
    const auto& A = model.state(t.source).dynamics.A;
    const Vector row = t.guard->sign * A.row(t.guard->axis).transpose();
    return box_max(row, guard_facet(model, transition)) + noise_radius(model, t.source, 1);
}

GuardProblem make_guard_problem(const HybridAutomaton& model, const RegionDecomposition& regions,
                                std::size_t transition, int delta)
{
    const auto& t = model.transitions.at(transition);
    auto nb = regions.neighbors.find(transition);
    if (!t.guard || nb == regions.neighbors.end())
        throw PreconditionError("transition " + std::to_string(transition) +
                                " is not a guarded nominal transition");
    const Guard& g = *t.guard;
    GuardProblem p;
    p.axis = g.axis;
    p.sign = g.sign;
    p.threshold = g.threshold;
    p.neighbor = g.sign * nb->second.value;
    p.epsilon = guard_epsilon(model, transition);
    p.invariant = model.state(t.source).invariant;
    p.row_next = g.sign * model.state(t.target).dynamics.A.row(g.axis).transpose();
    p.sigma_next = noise_radius(model, t.target, 1);
    p.delta = delta;
    p.row_horizon =
        g.sign * matrix_power(model.state(t.source).dynamics.A, delta).row(g.axis).transpose();
    p.sigma_horizon = noise_radius(model, t.source, delta);
    p.margin = estimation_margin(model);
    return p;
}

double solve_z_star(const GuardProblem& p)
{
    if (p.epsilon < p.threshold)
        throw GeometryError("guard slab is empty: epsilon below the guard threshold");
    const auto U = slab(p.invariant, p.axis, p.sign, p.threshold, p.epsilon);
    if (!U) throw GeometryError("guard slab misses the source invariant");
    return std::max(0.0, box_max(p.row_next, *U) + p.sigma_next + p.margin - p.threshold);
}

double solve_d_star(const GuardProblem& p)
{
    if (p.delta <= 0) return kUnavailable;
    const Interval axis = reflect(p.invariant[static_cast<std::size_t>(p.axis)], p.sign);
    const double span = axis.width();
    const double h = p.margin;

    auto detected = [&](double d) {
        const auto band = slab(p.invariant, p.axis, p.sign, p.threshold + d - h, p.threshold + d + h);
        if (!band) return true;
        return box_min(p.row_horizon, *band) - p.sigma_horizon >= p.neighbor;
    };

    if (detected(0.0)) return 0.0;
    if (!detected(span)) return kUnavailable;
    double lo = 0.0;
    double hi = span;
    while (hi - lo > kBisectionTolerance) {
        const double mid = 0.5 * (lo + hi);
        (detected(mid) ? hi : lo) = mid;
    }
    // The band leaves the invariant at a known offset; report it exactly when
    // that is where the condition switches.
    const double d_empty = axis.hi - p.threshold + h;
    if (lo <= d_empty && d_empty <= hi) return d_empty;
    return hi;
}

double solve_z_star(const HybridAutomaton& model, const RegionDecomposition& regions,
                    std::size_t transition)
{
    return solve_z_star(make_guard_problem(model, regions, transition, 0));
}

double solve_d_star(const HybridAutomaton& model, const RegionDecomposition& regions,
                    std::size_t transition, int delta)
{
    return solve_d_star(make_guard_problem(model, regions, transition, delta));
}

double oracle_box_optimum(const Vector& a, const Box& box)
{
    const std::size_t n = box.dim();
    if (n > 10) throw OracleScaleError("vertex enumeration is limited to 10 dimensions");
    if (static_cast<std::size_t>(a.size()) != n) throw PreconditionError("oracle: dimension mismatch");
    if (!box.is_valid()) throw PreconditionError("oracle: empty box");
    double best = -std::numeric_limits<double>::infinity();
    Vector x(static_cast<Eigen::Index>(n));
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        for (std::size_t i = 0; i < n; ++i)
            x(static_cast<Eigen::Index>(i)) = (mask >> i) & 1u ? box[i].hi : box[i].lo;
        best = std::max(best, a.dot(x));
    }
    return best;
}

double theorem1_threshold(const HybridAutomaton& model, const StateBound& bound)
{
    const bool z_ok = std::isfinite(bound.z_star);
    const bool d_ok = std::isfinite(bound.d_star);
    if (!z_ok && !d_ok)
        throw NoGuaranteeError("no detection guarantee for state " + std::to_string(bound.state));
    double worst = 0.0;
    if (z_ok) worst = bound.z_star;
    if (d_ok) worst = z_ok ? std::max(worst, bound.d_star) : bound.d_star;
    return worst + estimation_margin(model);
}

std::map<StateId, StateBound> compute_bounds(const HybridAutomaton& model)
{
    const auto regions = decompose_regions(model);
    std::map<StateId, StateBound> out;
    for (StateId q : model.nominal_ids()) {
        const DeltaResult dr = compute_delta(model, regions, q);
        StateBound sb;
        sb.state = q;
        sb.delta = dr.delta;
        for (const auto& [ti, guard_delta] : dr.per_guard) {
            const GuardProblem p = make_guard_problem(model, regions, ti, dr.delta);
            GuardBound gb;
            gb.transition = ti;
            gb.epsilon = p.epsilon;
            gb.z_star = solve_z_star(p);
            gb.d_star = solve_d_star(p);
            sb.guards.push_back(gb);
        }
        if (!sb.guards.empty()) {
            sb.z_star = 0.0;
            sb.d_star = 0.0;
            for (const auto& gb : sb.guards) {
                sb.z_star = std::max(sb.z_star, gb.z_star);
                sb.d_star = std::max(sb.d_star, gb.d_star);
            }
            sb.threshold = theorem1_threshold(model, sb);
        }
        out.emplace(q, std::move(sb));
    }
    return out;
}

}  // namespace cdad
