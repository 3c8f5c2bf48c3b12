#include "cdad/reachability.hpp"

#include "cdad/errors.hpp"
#include "cdad/lp.hpp"

#include <cmath>

namespace cdad {

Zonotope::Zonotope(Vector center, Matrix generators)
    : center_(std::move(center)), generators_(std::move(generators))
{
    if (generators_.cols() > 0 && generators_.rows() != center_.size())
        throw PreconditionError("zonotope generators do not match the center dimension");
    if (generators_.cols() == 0) generators_.resize(center_.size(), 0);
}

Zonotope Zonotope::point(const Vector& c) { return Zonotope(c, Matrix(c.size(), 0)); }

Zonotope Zonotope::from_box(const Box& box)
{
    const Vector hw = box.half_widths();
    std::vector<Eigen::Index> axes;
    for (Eigen::Index i = 0; i < hw.size(); ++i)
        if (hw(i) > 0.0) axes.push_back(i);
    Matrix g = Matrix::Zero(hw.size(), static_cast<Eigen::Index>(axes.size()));
    for (std::size_t k = 0; k < axes.size(); ++k)
        g(axes[k], static_cast<Eigen::Index>(k)) = hw(axes[k]);
    return Zonotope(box.center(), std::move(g));
}

Vector Zonotope::radius() const
{
    if (generators_.cols() == 0) return Vector::Zero(center_.size());
    return generators_.cwiseAbs().rowwise().sum();
}

Box Zonotope::interval_hull() const
{
    const Vector r = radius();
    return Box::from_bounds(center_ - r, center_ + r);
}

bool Zonotope::is_axis_aligned() const
{
    for (Eigen::Index j = 0; j < generators_.cols(); ++j)
        if ((generators_.col(j).array() != 0.0).count() > 1) return false;
    return true;
}

Vector Zonotope::at(const Vector& b) const
{
    if (b.size() != generators_.cols()) throw PreconditionError("zonotope coefficient size mismatch");
    return center_ + generators_ * b;
}

Zonotope linear_map(const Matrix& M, const Zonotope& z)
{
    if (M.cols() != static_cast<Eigen::Index>(z.dim()))
        throw PreconditionError("linear_map: dimension mismatch");
    return Zonotope(M * z.center(), M * z.generators());
}

Zonotope inflate(const Zonotope& z, double sigma)
{
    if (sigma < 0.0) throw PreconditionError("inflate: negative radius");
    if (sigma == 0.0) return z;
    const auto n = static_cast<Eigen::Index>(z.dim());
    Matrix g(n, z.generators().cols() + n);
    g << z.generators(), sigma * Matrix::Identity(n, n);
    return Zonotope(z.center(), std::move(g));
}

double inf_norm(const Matrix& M)
{
    if (M.size() == 0) return 0.0;
    return M.cwiseAbs().rowwise().sum().maxCoeff();
}

namespace {

double series_radius(double a_norm, double per_step, int steps)
{
    if (steps <= 0) return 0.0;
    if (std::abs(a_norm - 1.0) <= 1e-12) return steps * per_step;
    return (1.0 - std::pow(a_norm, steps)) / (1.0 - a_norm) * per_step;
}

double per_step_disturbance(const HybridAutomaton& model, const LtiDynamics& dyn)
{
    return inf_norm(dyn.B) * model.input_bound + model.noise.w_norm();
}

}  // namespace

double noise_radius(const HybridAutomaton& model, StateId q, int steps)
{
    const auto& dyn = model.state(q).dynamics;
    return series_radius(inf_norm(dyn.A), per_step_disturbance(model, dyn), steps);
}

Zonotope reach(const HybridAutomaton& model, StateId q, const Zonotope& z, int steps)
{
    if (steps < 0) throw PreconditionError("reach: negative horizon");
    if (steps == 0) return z;
    const Matrix& A = model.state(q).dynamics.A;
    Matrix P = Matrix::Identity(A.rows(), A.cols());
    for (int s = 0; s < steps; ++s) P = A * P;
    return inflate(linear_map(P, z), noise_radius(model, q, steps));
}

bool intersects_box(const Zonotope& z, const Box& box)
{
    if (box.dim() != z.dim()) throw PreconditionError("intersects_box: dimension mismatch");
    if (!z.interval_hull().intersect(box)) return false;
    if (z.is_axis_aligned()) return true;

    // Shift b in [-1, 1] to beta = b + 1 in [0, 2] so the LP is in x >= 0 form.
    const Matrix& G = z.generators();
    const auto n = G.rows();
    const auto p = G.cols();
    const Vector shift = z.center() - G * Vector::Ones(p);
    Matrix A(2 * n + p, p);
    Vector b(2 * n + p);
    A << G, -G, Matrix::Identity(p, p);
    b << box.upper() - shift, shift - box.lower(), Vector::Constant(p, 2.0);
    return lp::feasible(A, b);
}

Box guard_facet(const HybridAutomaton& model, std::size_t transition)
{
    const auto& t = model.transitions.at(transition);
    if (!t.guard) throw PreconditionError("transition has no guard");
    Box facet = model.state(t.source).invariant;
    const auto axis = static_cast<std::size_t>(t.guard->axis);
    facet[axis] = {t.guard->plane(), t.guard->plane()};
    if (auto cut = facet.intersect(model.state(t.target).invariant)) return *cut;
    return facet;
}

DeltaResult compute_delta(const HybridAutomaton& model, const RegionDecomposition& regions,
                          StateId q)
{
    DeltaResult out;
    out.state = q;
    const auto& dyn = model.state(q).dynamics;
    const double a_norm = inf_norm(dyn.A);
    const double per_step = per_step_disturbance(model, dyn);

    bool any = false;
    for (std::size_t ti : model.guarded_transitions_from(q)) {
        auto nb = regions.neighbors.find(ti);
        if (nb == regions.neighbors.end()) continue;
        const NeighborPlane& plane = nb->second;
        any = true;
        if (plane.degenerate()) {
            out.per_guard[ti] = 0;
            continue;
        }
        const double dir = plane.value > plane.guard_plane ? 1.0 : -1.0;
        const auto axis = static_cast<Eigen::Index>(plane.axis);
        const Box facet = guard_facet(model, ti);
        const Vector c = facet.center();
        const Vector hw = facet.half_widths();

        // Track row `axis` of A^s only; that is all the hull contact needs.
        Eigen::RowVectorXd row = Eigen::RowVectorXd::Unit(dyn.A.cols(), axis);
        int found = -1;
        for (int s = 1; s <= kDeltaSearchCap + 1; ++s) {
            row = row * dyn.A;
            const double mid = row.dot(c);
            const double rad = row.cwiseAbs().dot(hw) + series_radius(a_norm, per_step, s);
            const double extreme = mid + dir * rad;
            if (!std::isfinite(extreme)) break;
            if (dir * extreme >= dir * plane.value - 1e-12) {
                found = s - 1;
                break;
            }
        }
        if (found < 0)
            throw HorizonError("no neighbor-plane contact within " + std::to_string(kDeltaSearchCap) +
                               " steps for state " + std::to_string(q));
        out.per_guard[ti] = found;
    }

    if (any) {
        out.delta = out.per_guard.begin()->second;
        for (const auto& [ti, d] : out.per_guard) out.delta = std::min(out.delta, d);
    }
    return out;
}

std::map<StateId, DeltaResult> compute_all_deltas(const HybridAutomaton& model)
{
    const auto regions = decompose_regions(model);
    std::map<StateId, DeltaResult> out;
    for (StateId q : model.nominal_ids()) out.emplace(q, compute_delta(model, regions, q));
    return out;
}

}  // namespace cdad
